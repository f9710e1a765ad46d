//! Seeded sampling from the coupling: draws reproduce bit-exactly for a
//! fixed seed and their empirical law matches the exact joint law.

use curtain::coupling::{joint_law, sample};
use curtain::{build_left_curtain, AtomicMeasure};

fn main() -> curtain::Result<()> {
    let mu = AtomicMeasure::dirac(0.0);
    let nu = AtomicMeasure::new([(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)])?;
    let triple = build_left_curtain(&mu, &nu)?;

    let n = 200_000;
    let draws = sample(&triple, 7, n);
    assert_eq!(draws, sample(&triple, 7, n));

    let law = joint_law(&triple)?;
    println!("{:>8} {:>8} {:>10} {:>10}", "x", "y", "exact", "empirical");
    for atom in &law.atoms {
        let hits = draws
            .iter()
            .filter(|(x, y)| *x == atom.x && *y == atom.y)
            .count();
        println!(
            "{:>8.3} {:>8.3} {:>10.5} {:>10.5}",
            atom.x,
            atom.y,
            atom.mass,
            hits as f64 / n as f64
        );
    }
    println!("\nfirst draws: {:?}", &draws[..5]);
    Ok(())
}
