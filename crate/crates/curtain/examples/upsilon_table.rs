//! Prints the tangent table behind a single point-mass embedding: the
//! tangency points α and β, the tangent slopes a and b, and Υ = a - b whose
//! inverse drives (R, S).

use curtain::single_atom::{build_upsilon, embed_point_mass};
use curtain::AtomicMeasure;

fn main() -> curtain::Result<()> {
    let nu = AtomicMeasure::new([(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)])?;
    let table = build_upsilon(&nu, 0.0)?;

    println!("base point w = 0, P(w) = {:.4}", table.p_w);
    println!("capacity upsilon(0) = {:.4}", table.capacity());
    println!("target mass at w   = {:.4}\n", table.atom_mass);
    println!("{:>8} {:>8} {:>8} {:>8} {:>8} {:>8}", "p", "alpha", "beta", "a", "b", "upsilon");
    for row in table.rows() {
        println!(
            "{:>8.4} {:>8.3} {:>8.3} {:>8.4} {:>8.4} {:>8.4}",
            row[0], row[1], row[2], row[3], row[4], row[5]
        );
    }

    let result = embed_point_mass(&nu, 0.0, 1.0, 0.0)?;
    println!("\nembedding the full unit mass:");
    for seg in &result.segments {
        println!(
            "  u in ({:.3}, {:.3}]: R = {:+.3}, S = {:+.3}",
            seg.u_lo, seg.u_hi, seg.r, seg.s
        );
    }
    println!(
        "boundary masses: {:.4} at R, {:.4} at S",
        result.lambda_lower, result.lambda_upper
    );
    println!("residual mass: {:.2e}", result.residual.total_mass());
    Ok(())
}
