// Connected ordered unit interval graphs: the candidate influence graphs.

use hk_exact::graphs::{connected_count, enumerate_connected};

pub fn run_example() -> hk_exact::Result<()> {
    for g in enumerate_connected(4)? {
        let edges: Vec<String> = g.edges().map(|(i, j)| format!("{}-{}", i + 1, j + 1)).collect();
        println!("r={:?} |E|={} edges {}", g.rightmost_one_based(), g.edge_count(), edges.join(" "));
    }
    for n in 1..=12 {
        println!("n={n:<2} count {}", connected_count(n));
    }
    Ok(())
}

fn main() -> hk_exact::Result<()> {
    run_example()
}
