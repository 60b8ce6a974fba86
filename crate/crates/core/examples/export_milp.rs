// Builds the binary program for small n and T, writes it in LP format and
// checks a real trajectory against it.

use std::collections::HashMap;

use hk_exact::dynamics::{influence_graph, step, OpinionProfile};
use hk_exact::milp::{assignment_from_sequence, build_blp, emit_lp, model_stats, sidecar_path, BlpOptions, Sidecar};
use hk_exact::rational::{self, frac, Rational};

pub fn run_example() -> hk_exact::Result<()> {
    let (n, horizon) = (3, 1);
    let model = build_blp(n, horizon, &frac(-1, 100), &BlpOptions::default())?;
    let stats = model_stats(&model);
    println!("x={} u={} z={} rows={}", stats.x, stats.u, stats.z, stats.rows);
    for (family, count) in &stats.by_family {
        println!("  {:<8} {count}", family.prefix());
    }

    let dir = std::env::temp_dir().join(format!("hk-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("hk_n3_T1.lp");
    emit_lp(&model, &path)?;
    println!("wrote {} and {}", path.display(), sidecar_path(&path).display());

    // Gaps of 9/10 keep a margin against eps = -1/100; the trajectory
    // reaches the complete graph exactly at t = T.
    let x0 = OpinionProfile::new(vec![frac(0, 1), frac(9, 10), frac(9, 5)])?;
    let mut x = x0.clone();
    let seq: Vec<usize> = (0..=horizon)
        .map(|_| {
            let g = influence_graph(&x);
            x = step(&x);
            model.graphs.iter().position(|h| *h == g).expect("connected")
        })
        .collect();
    let values = assignment_from_sequence(&model, x0.opinions(), &seq);
    println!("violations at eps=-1/100: {}", model.violations(&values).len());

    let named: HashMap<String, Rational> = model.vars.iter().zip(values).map(|(v, x)| (v.key.name(), x)).collect();
    let (witness, graphs) = Sidecar::from_model(&model).decode(&named)?;
    let shown: Vec<String> = witness.iter().map(rational::format).collect();
    println!("decoded witness [{}]", shown.join(", "));
    for (t, g) in graphs.iter().enumerate() {
        println!("  t={t} r={:?}", g.rightmost_one_based());
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> hk_exact::Result<()> {
    run_example()
}
