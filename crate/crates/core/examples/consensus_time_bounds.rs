// Brackets the maximum consensus time f(n) with the exact graph-sequence search.
//
// cargo run --release --example consensus_time_bounds -- 5 12

use hk_exact::solver::{default_strict_eps, f_bounds, replay_certificate, SearchConfig};

fn bounds_for(n: usize, t_max: usize) -> hk_exact::Result<()> {
    let cfg = SearchConfig::from_env();
    let start = std::time::Instant::now();
    let bounds = f_bounds(n, t_max, &default_strict_eps(), &cfg)?;
    for rec in &bounds.log {
        println!(
            "T={:<2} {:?} ({} LP calls, {} pivots)",
            rec.horizon, rec.verdict, rec.stats.lp_calls, rec.stats.pivots
        );
    }
    match bounds.exact() {
        Some(f) => println!("f({n}) = {f}"),
        None => println!("{} <= f({n}) <= {:?}", bounds.lower, bounds.upper),
    }
    println!("witness {}", bounds.lower_witness);
    if let Some(cert) = &bounds.certificate {
        println!("certificate replay: {:?}", replay_certificate(cert));
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}

pub fn run_example() -> hk_exact::Result<()> {
    bounds_for(4, 8)
}

fn main() -> hk_exact::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().ok());
    let n = args.next().flatten().unwrap_or(4);
    let t_max = args.next().flatten().unwrap_or(12);
    bounds_for(n, t_max)
}
