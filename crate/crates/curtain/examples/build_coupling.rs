//! Builds the left-curtain coupling of two small atomic laws and prints the
//! triple (R, G, S) piece by piece, together with the multi-valued (f, g)
//! view at the atoms of the initial law.

use curtain::curtain::{check_mass_mean, fg_view};
use curtain::{build_left_curtain, AtomicMeasure};

fn main() -> curtain::Result<()> {
    let mu = AtomicMeasure::new([(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)])?;
    let nu = AtomicMeasure::new([
        (-2.0, 0.2),
        (-1.0, 0.15),
        (0.0, 0.3),
        (1.0, 0.15),
        (2.0, 0.2),
    ])?;
    println!("mu <=cx nu: {}", mu.convex_order_leq(&nu));

    let triple = build_left_curtain(&mu, &nu)?;
    println!("certified: {}\n", triple.is_certified());
    println!("{:>10} {:>10} {:>8} {:>8} {:>8}", "u_lo", "u_hi", "R", "G", "S");
    for p in &triple.pieces {
        println!(
            "{:>10.4} {:>10.4} {:>8.3} {:>8.3} {:>8.3}",
            p.u_lo, p.u_hi, p.r, p.g, p.s
        );
    }

    println!("\nmass/mean preservation at selected levels:");
    for u in [0.2, 0.45, 0.7, 0.9] {
        let c = check_mass_mean(&triple, u)?;
        println!(
            "  u = {u:.2}: mass {:.6} = {:.6}, mean {:+.6} = {:+.6}",
            c.lhs_mass, c.rhs_mass, c.lhs_mean, c.rhs_mean
        );
    }

    println!("\nlower/upper branches per atom of mu:");
    for entry in fg_view(&triple) {
        let branches: Vec<String> = entry
            .branches
            .iter()
            .map(|(f, g)| format!("(f = {f:.3}, g = {g:.3})"))
            .collect();
        println!("  x = {:+.3}: {}", entry.x, branches.join(", "));
    }
    Ok(())
}
