//! Certifies a coupling end to end: structural invariants, envelope bounds,
//! the dispersion identity and the exact marginals.

use curtain::coupling::{joint_law, transport_cost};
use curtain::limits::envelope_report;
use curtain::{build_left_curtain, AtomicMeasure};

fn main() -> curtain::Result<()> {
    let mu = AtomicMeasure::new([(-2.0, 0.2), (-0.5, 0.45), (1.5, 0.35)])?;
    // Each atom of mu split by a mean-preserving dilation.
    let nu = AtomicMeasure::new([
        (-3.0, 0.1),
        (-2.0, 0.15),
        (-1.0, 0.1),
        (0.25, 0.3),
        (0.5, 0.1),
        (1.5, 0.15),
        (2.5, 0.1),
    ])?;
    let triple = build_left_curtain(&mu, &nu)?;
    println!(
        "certification: {}",
        if triple.is_certified() { "clean" } else { "violations" }
    );
    for v in &triple.certification.violations {
        println!("  {v}");
    }

    let law = joint_law(&triple)?;
    println!(
        "second marginal TV distance: {:.2e}",
        law.second_marginal().tv_distance(&nu)
    );
    for (x, mean) in law.conditional_means() {
        println!("  E[Y | X = {x:+.2}] - x = {:+.2e}", mean - x);
    }

    let cost = transport_cost(&triple)?;
    println!(
        "dispersion: E|Y-X| = {:.6}, 2 I(R,G,S) = {:.6}",
        law.mean_abs_displacement(),
        2.0 * cost
    );

    let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let envelopes = envelope_report(&triple, &grid)?;
    println!(
        "envelope bounds on {} grid points: {}",
        envelopes.points.len(),
        if envelopes.violations.is_empty() { "all hold" } else { "VIOLATED" }
    );
    Ok(())
}
