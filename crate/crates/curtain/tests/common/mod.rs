//! Shared helpers for the integration suites: seeded generation of random
//! convex-ordered atomic pairs by martingale splitting.

use curtain::measures::AtomicMeasure;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Random initial law with up to `max_atoms` atoms on [-5, 5].
pub fn random_initial(rng: &mut ChaCha12Rng, max_atoms: usize) -> AtomicMeasure {
    let count = rng.gen_range(1..=max_atoms);
    let mut pairs = Vec::with_capacity(count);
    let mut weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut position = rng.gen_range(-5.0..-2.0);
    for weight in weights {
        position += rng.gen_range(0.3..1.8);
        pairs.push((position, weight));
    }
    AtomicMeasure::new(pairs).expect("valid random measure")
}

/// Splits atoms of `mu` by mean-preserving dilations until the target count
/// is reached. Every step is a dilation, so `mu` precedes the result in
/// convex order by construction.
pub fn martingale_split(
    rng: &mut ChaCha12Rng,
    mu: &AtomicMeasure,
    target_atoms: usize,
    spread: f64,
) -> AtomicMeasure {
    let mut atoms: Vec<(f64, f64)> = mu
        .atoms()
        .iter()
        .map(|a| (a.position, a.mass))
        .collect();
    let mut guard = 0;
    while atoms.len() < target_atoms && guard < 10 * target_atoms {
        guard += 1;
        let i = rng.gen_range(0..atoms.len());
        let (x, m) = atoms[i];
        if m < 1e-4 {
            continue;
        }
        let d_lo = rng.gen_range(0.1..spread);
        let d_hi = rng.gen_range(0.1..spread);
        // Masses balance the mean around x.
        let p = d_hi / (d_lo + d_hi);
        atoms.swap_remove(i);
        atoms.push((x - d_lo, m * p));
        atoms.push((x + d_hi, m * (1.0 - p)));
    }
    AtomicMeasure::new(atoms).expect("valid split measure")
}

/// A random convex-ordered pair (μ, ν) with the given size caps.
pub fn random_convex_pair(
    rng: &mut ChaCha12Rng,
    max_mu_atoms: usize,
    max_nu_atoms: usize,
) -> (AtomicMeasure, AtomicMeasure) {
    let mu = random_initial(rng, max_mu_atoms);
    let target = rng.gen_range(mu.len().max(2)..=max_nu_atoms.max(mu.len().max(2)));
    let nu = martingale_split(rng, &mu, target, 1.5);
    (mu, nu)
}

/// Strikes making the chord slopes at one spread piece of the triple exactly
/// colinear, so the exercise-indifference profile attains zero there.
pub fn exact_root_strikes(
    rng: &mut ChaCha12Rng,
    triple: &curtain::CouplingTriple,
) -> Option<(f64, f64)> {
    let candidates: Vec<_> = triple
        .pieces
        .iter()
        .filter(|p| p.g - p.r >= 0.05 && p.s - p.g >= 0.05)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    for _ in 0..40 {
        let piece = candidates[rng.gen_range(0..candidates.len())];
        let (r, g, s) = (piece.r, piece.g, piece.s);
        let k1 = g + rng.gen_range(0.2..0.8) * (s - g);
        let k2 = r + (k1 - g) * (s - r) / (s - g);
        if k2 < k1 && k2 > r && g < k1 {
            return Some((k1, k2));
        }
    }
    None
}
