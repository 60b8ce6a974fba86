// Exact trajectories of the equidistant profiles x_i = i.
//
// cargo run --example simulate_equidistant -- 6

use hk_exact::configs::equidistant;
use hk_exact::dynamics::{default_cap, simulate, trajectory_csv};

fn report(n: usize, csv: bool) -> hk_exact::Result<()> {
    let p = equidistant(n)?;
    let traj = simulate(&p, default_cap(n))?;
    println!("N={n}: {} after {} steps", traj.termination(), traj.profiles.len() - 1);
    println!("  final profile {}", traj.final_profile());
    println!("  clusters {}", traj.final_profile().cluster_count());
    if csv {
        print!("{}", trajectory_csv(&traj, true));
    }
    Ok(())
}

pub fn run_example() -> hk_exact::Result<()> {
    for n in 2..=6 {
        report(n, false)?;
    }
    report(4, true)
}

fn main() -> hk_exact::Result<()> {
    match std::env::args().nth(1).and_then(|a| a.parse().ok()) {
        Some(n) => report(n, true),
        None => run_example(),
    }
}
