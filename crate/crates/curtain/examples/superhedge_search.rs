//! Superhedge construction across archetypes: an exact root closes the
//! duality gap with a two-put portfolio, while a sign jump across atoms
//! leaves an honestly reported gap within the two-put family.

use curtain::american_put::{dual_price, dual_search, find_ustar, model_price, PutPair};
use curtain::{build_left_curtain, AtomicMeasure};

fn main() -> curtain::Result<()> {
    let mu = AtomicMeasure::new([(-1.0, 0.5), (1.0, 0.5)])?;
    let nu = AtomicMeasure::new([(-2.0, 0.5), (2.0, 0.5)])?;
    let triple = build_left_curtain(&mu, &nu)?;

    // Strikes solved so the chords at the first piece are colinear.
    let exact = PutPair::new(0.5, 0.0)?;
    // Strikes forcing the sign change between the two atoms.
    let jump = PutPair::new(0.5, -0.5)?;

    for (label, k) in [("exact root", exact), ("jump", jump)] {
        let (primal, _) = model_price(&triple, k)?;
        let ustar = find_ustar(&triple, k)?;
        let hedge = dual_search(&triple.mu, &triple.nu, k, &[])?;
        println!("{label}: strikes K1 = {}, K2 = {}", k.k1, k.k2);
        println!("  archetype   = {}", ustar.archetype.as_str());
        println!("  model price = {primal:.6}");
        println!(
            "  best two-put hedge = {:.4} x put({:.4}) + {:.4} x put({:.4}), cost {:.6}",
            hedge.theta,
            hedge.strike_high,
            1.0 - hedge.theta,
            hedge.strike_low,
            hedge.cost
        );
        println!("  gap = {:.6}\n", hedge.cost - primal);
    }

    // Any feasible convex put portfolio prices above the model: weak duality.
    let k = PutPair::new(0.5, 0.0)?;
    let (primal, _) = model_price(&triple, k)?;
    for psi in [vec![(0.0, 1.0)], vec![(0.0, 1.0), (1.5, 0.3)]] {
        let d = dual_price(&triple.mu, &triple.nu, k, &psi)?;
        println!("feasible psi {psi:?}: dual {d:.6} >= primal {primal:.6}");
    }
    Ok(())
}
