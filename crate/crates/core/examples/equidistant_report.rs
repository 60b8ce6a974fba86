// Simulated convergence times of equidistant profiles against the closed form.

use hk_exact::certify::equidistant_report;

pub fn run_example() -> hk_exact::Result<()> {
    let rows = equidistant_report(2, 30)?;
    println!("{:>3} {:>9} {:>7}", "n", "simulated", "formula");
    for row in &rows {
        let sim = row.simulated.map_or("cap".to_string(), |t| t.to_string());
        let mark = if row.matches() { "" } else { "  differs" };
        println!("{:>3} {:>9} {:>7}{mark}", row.n, sim, row.formula);
    }
    let agree = rows.iter().filter(|r| r.matches()).count();
    println!("{agree}/{} agree", rows.len());
    Ok(())
}

fn main() -> hk_exact::Result<()> {
    run_example()
}
