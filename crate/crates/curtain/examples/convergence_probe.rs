//! Refinement study: the uniform law on [0, 2] is discretized at growing
//! resolutions against a fixed dominating four-point target; the coupled
//! joint laws converge in Wasserstein-1 and the triples stabilize on a grid.

use curtain::limits::convergence_probe;
use curtain::AtomicMeasure;

fn main() -> curtain::Result<()> {
    let nu = AtomicMeasure::new([
        (0.0, 0.25),
        (2.0 / 3.0, 0.25),
        (4.0 / 3.0, 0.25),
        (2.0, 0.25),
    ])?;
    let grid: Vec<f64> = (1..=19).map(|i| i as f64 / 20.0).collect();
    let report = convergence_probe(|u| 2.0 * u, &nu, &[10, 100, 1000], &grid)?;

    println!("{:>6} {:>12} {:>12} {:>14}", "n", "max |S-S*|", "max |G-G*|", "W1 to previous");
    for e in &report.entries {
        println!(
            "{:>6} {:>12.6} {:>12.6} {:>14}",
            e.n,
            e.max_dev_s,
            e.max_dev_g,
            e.w1_to_prev
                .map(|d| format!("{d:.6}"))
                .unwrap_or_else(|| "-".into())
        );
    }
    if report.excluded.is_empty() {
        println!("no grid points excluded");
    } else {
        println!("excluded grid points (limit jumps): {:?}", report.excluded);
    }
    Ok(())
}
