// Steps the lower-bound construction and checks its inequality chains.
//
// cargo run --example verify_lower_bound -- 12

use hk_exact::certify::{verify_lemma, LemmaVariant};
use hk_exact::configs::{lower_bound_config, LowerBoundParams};
use hk_exact::dynamics::f_of;

fn check(k: usize) -> hk_exact::Result<()> {
    let params = LowerBoundParams::new(k)?;
    let f = f_of(&lower_bound_config(params), 10_000)?;
    println!("k={k}: n={} agents, f = {f}", params.n());
    for variant in [LemmaVariant::Shifted, LemmaVariant::AsPrinted] {
        let report = verify_lemma(k, variant)?;
        println!("  {report}");
        for c in report.failures().take(3) {
            println!("    t={} {}: {}", c.t, c.name, c.value);
        }
    }
    Ok(())
}

pub fn run_example() -> hk_exact::Result<()> {
    check(4)?;
    check(9)
}

fn main() -> hk_exact::Result<()> {
    match std::env::args().nth(1).and_then(|a| a.parse().ok()) {
        Some(k) => check(k),
        None => run_example(),
    }
}
