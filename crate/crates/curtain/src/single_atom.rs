//! Embedding a point mass into a target measure: tangent points to the put
//! function, the slope-difference function Υ and its inverse, and the
//! resulting (R, S) segments with exactly split boundary masses.

use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, PutFunction, MERGE_TOL};

/// Relative tolerance for tangency ties; flat arginf sets resolve by the
/// right-continuity convention (smallest kink for α, largest for β).
const TIE_TOL: f64 = 1e-12;

/// Tolerance on the `λ ≤ Υ(0)` capacity precondition.
const CAPACITY_TOL: f64 = 1e-9;

/// Tolerance for clipping slightly negative boundary masses.
const BOUNDARY_CLIP: f64 = 1e-10;

/// Right tangency: the kink α of `P` minimizing `(P(k) - p) / (k - w)` over
/// `k > w`, together with the minimal ratio `a`.
///
/// Ties take the smallest kink. At `p = P(w)` a target atom at `w` forces
/// `α = w` with `a = P'(w+)`.
pub fn tangent_right(put: &PutFunction, w: f64, p: f64) -> Result<(f64, f64)> {
    let p_w = put.eval(w);
    if p >= p_w - MERGE_TOL && put.slope_right(w) - put.slope_left(w) > MERGE_TOL {
        return Ok((w, put.slope_right(w)));
    }
    let mut best: Option<(f64, f64)> = None;
    for &z in put.kinks() {
        if z <= w + MERGE_TOL {
            continue;
        }
        let ratio = (put.eval(z) - p) / (z - w);
        match best {
            Some((_, r)) if ratio >= r - TIE_TOL * (1.0 + r.abs()) => {}
            _ => best = Some((z, ratio)),
        }
    }
    let (alpha, a) = best.ok_or(Error::ExhaustedAbove { w })?;
    // The ratio tends to the total mass as k grows; a strictly smaller limit
    // means the infimum is not attained and the embedding would not be a
    // martingale.
    let limit = put.total_mass();
    if a > limit + 1e-9 * (1.0 + limit) {
        return Err(Error::UnattainedTangent { w, p });
    }
    Ok((alpha, a))
}

/// Left tangency: the kink β maximizing `(p - P(k)) / (w - k)` over `k < w`,
/// with the maximal ratio `b`. Mirror image of [`tangent_right`]; ties take
/// the largest kink, and at `p = P(w)` an atom at `w` forces `β = w`.
pub fn tangent_left(put: &PutFunction, w: f64, p: f64) -> Result<(f64, f64)> {
    let p_w = put.eval(w);
    if p >= p_w - MERGE_TOL && put.slope_right(w) - put.slope_left(w) > MERGE_TOL {
        return Ok((w, put.slope_left(w)));
    }
    let mut best: Option<(f64, f64)> = None;
    for &z in put.kinks() {
        if z >= w - MERGE_TOL {
            break;
        }
        let ratio = (p - put.eval(z)) / (w - z);
        // Kinks arrive in ascending order, so replacing on a tie keeps the
        // largest one and β stays right-continuous in p.
        match best {
            Some((_, r)) if ratio < r - TIE_TOL * (1.0 + r.abs()) => {}
            Some((_, r)) => best = Some((z, ratio.max(r))),
            None => best = Some((z, ratio)),
        }
    }
    best.ok_or(Error::ExhaustedBelow { w })
}

/// Piecewise record of `p ↦ (α, β, a, b, Υ)` for one point-mass embedding.
///
/// Breakpoints are ascending in `p` with `p_breaks[0] = 0` and the last entry
/// equal to `P(w)`; `alpha_seg[i]`, `beta_seg[i]` are the constant tangency
/// points on the open segment between consecutive breakpoints, and the value
/// arrays hold `a`, `b`, `Υ = a - b` at the breakpoints.
#[derive(Debug, Clone)]
pub struct UpsilonTable {
    pub w: f64,
    pub p_w: f64,
    /// Target mass sitting exactly at `w`.
    pub atom_mass: f64,
    pub p_breaks: Vec<f64>,
    pub alpha_seg: Vec<f64>,
    pub beta_seg: Vec<f64>,
    pub a_vals: Vec<f64>,
    pub b_vals: Vec<f64>,
    pub upsilon_vals: Vec<f64>,
    /// Convention values at `p = P(w)`: the atom position when the target
    /// charges `w`, otherwise the adjacent support points.
    pub alpha_top: f64,
    pub beta_top: f64,
}

impl UpsilonTable {
    /// Υ(0): the largest point-mass weight this target can absorb at `w`.
    pub fn capacity(&self) -> f64 {
        self.upsilon_vals[0]
    }

    /// Υ(p) by linear interpolation.
    pub fn upsilon(&self, p: f64) -> f64 {
        let i = self
            .p_breaks
            .partition_point(|&q| q < p)
            .clamp(1, self.p_breaks.len() - 1);
        let (p0, p1) = (self.p_breaks[i - 1], self.p_breaks[i]);
        let (y0, y1) = (self.upsilon_vals[i - 1], self.upsilon_vals[i]);
        if p1 <= p0 {
            return y0;
        }
        y0 + (y1 - y0) * (p - p0) / (p1 - p0)
    }

    /// Υ⁻¹(q) with the plateau convention Υ⁻¹(q) = P(w) for q ≤ Υ(P(w)).
    pub fn upsilon_inv(&self, q: f64) -> f64 {
        if q <= *self.upsilon_vals.last().unwrap() {
            return self.p_w;
        }
        // Υ decreases in p, so the values array decreases left to right.
        for i in (1..self.p_breaks.len()).rev() {
            let (y_hi, y_lo) = (self.upsilon_vals[i - 1], self.upsilon_vals[i]);
            if q <= y_hi + MERGE_TOL && q >= y_lo - MERGE_TOL {
                if y_hi - y_lo <= MERGE_TOL {
                    return self.p_breaks[i];
                }
                let t = (y_hi - q) / (y_hi - y_lo);
                return self.p_breaks[i - 1] + t * (self.p_breaks[i] - self.p_breaks[i - 1]);
            }
        }
        0.0
    }

    /// Rows (p, alpha, beta, a, b, upsilon) at the breakpoints, ascending in p.
    pub fn rows(&self) -> Vec<[f64; 6]> {
        let n = self.p_breaks.len();
        (0..n)
            .map(|i| {
                let (alpha, beta) = if i + 1 < n {
                    (self.alpha_seg[i], self.beta_seg[i])
                } else {
                    (self.alpha_top, self.beta_top)
                };
                [
                    self.p_breaks[i],
                    alpha,
                    beta,
                    self.a_vals[i],
                    self.b_vals[i],
                    self.upsilon_vals[i],
                ]
            })
            .collect()
    }
}

/// Sweeps the lower envelope of the right-tangent ratio lines from `p = p_w`
/// down to 0. Returns segments as (p_lo, p_hi, kink), descending in p.
fn sweep_envelope(
    kinks: &[(f64, f64)],
    w: f64,
    p_w: f64,
    right_side: bool,
) -> Vec<(f64, f64, f64)> {
    let ratio = |z: f64, pz: f64, p: f64| {
        if right_side {
            (pz - p) / (z - w)
        } else {
            (p - pz) / (w - z)
        }
    };
    // Active kink at the top of the p range. For the right envelope the
    // chord slope grows with z, so the smallest kink starts; mirrored on the
    // left.
    let mut current = {
        let mut best = kinks[0];
        let mut best_r = ratio(best.0, best.1, p_w);
        for &(z, pz) in &kinks[1..] {
            let r = ratio(z, pz, p_w);
            let tol = TIE_TOL * (1.0 + best_r.abs());
            let better = if right_side { r < best_r - tol } else { r > best_r + tol };
            let tie = (r - best_r).abs() <= tol;
            // Ascending kinks: on a tie the right envelope keeps the smallest
            // and the left envelope takes the largest.
            if better || (tie && !right_side) {
                best = (z, pz);
                best_r = r;
            }
        }
        best
    };
    let mut segments = Vec::new();
    let mut p_cur = p_w;
    loop {
        // Takeover point of z' against the current kink; only kinks farther
        // from w can win as p decreases.
        let mut next: Option<(f64, (f64, f64))> = None;
        for &(z, pz) in kinks {
            let farther = if right_side { z > current.0 } else { z < current.0 };
            if !farther {
                continue;
            }
            let p_star = if right_side {
                (current.1 * (z - w) - pz * (current.0 - w)) / (z - current.0)
            } else {
                (current.1 * (w - z) - pz * (w - current.0)) / (current.0 - z)
            };
            if p_star <= 1e-15 || p_star >= p_cur - 1e-15 {
                continue;
            }
            match next {
                Some((pn, (zn, _))) => {
                    let tie = (p_star - pn).abs() <= TIE_TOL * (1.0 + pn.abs());
                    let jumps_farther = if right_side { z > zn } else { z < zn };
                    if p_star > pn + TIE_TOL * (1.0 + pn.abs()) || (tie && jumps_farther) {
                        next = Some((p_star, (z, pz)));
                    }
                }
                None => next = Some((p_star, (z, pz))),
            }
        }
        match next {
            Some((p_star, kink)) => {
                segments.push((p_star, p_cur, current.0));
                p_cur = p_star;
                current = kink;
            }
            None => {
                segments.push((0.0, p_cur, current.0));
                return segments;
            }
        }
    }
}

/// Builds the Υ table for embedding a point mass at `w` into `target`.
pub fn build_upsilon(target: &AtomicMeasure, w: f64) -> Result<UpsilonTable> {
    if target.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let put = PutFunction::of(target);
    let p_w = put.eval(w);
    let atom_mass = target.mass_at(w);

    if p_w <= MERGE_TOL {
        // No target mass below w: only the atom at w itself can be embedded.
        return Ok(UpsilonTable {
            w,
            p_w: 0.0,
            atom_mass,
            p_breaks: vec![0.0],
            alpha_seg: vec![],
            beta_seg: vec![],
            a_vals: vec![atom_mass],
            b_vals: vec![0.0],
            upsilon_vals: vec![atom_mass],
            alpha_top: w,
            beta_top: w,
        });
    }

    let above: Vec<(f64, f64)> = put
        .kinks()
        .iter()
        .filter(|&&z| z > w + MERGE_TOL)
        .map(|&z| (z, put.eval(z)))
        .collect();
    let below: Vec<(f64, f64)> = put
        .kinks()
        .iter()
        .filter(|&&z| z < w - MERGE_TOL)
        .map(|&z| (z, put.eval(z)))
        .collect();
    if above.is_empty() {
        return Err(Error::ExhaustedAbove { w });
    }
    if below.is_empty() {
        return Err(Error::ExhaustedBelow { w });
    }

    let alpha_segments = sweep_envelope(&above, w, p_w, true);
    let beta_segments = sweep_envelope(&below, w, p_w, false);

    let mut p_breaks: Vec<f64> = alpha_segments
        .iter()
        .chain(beta_segments.iter())
        .map(|&(p_lo, _, _)| p_lo)
        .chain([0.0, p_w])
        .collect();
    p_breaks.sort_by(f64::total_cmp);
    p_breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + p_w));
    if (p_breaks[0] - 0.0).abs() > 0.0 {
        p_breaks[0] = 0.0;
    }
    *p_breaks.last_mut().unwrap() = p_w;

    let seg_value = |segments: &[(f64, f64, f64)], p_mid: f64| -> f64 {
        segments
            .iter()
            .find(|&&(lo, hi, _)| p_mid >= lo - 1e-12 && p_mid <= hi + 1e-12)
            .map(|&(_, _, z)| z)
            .unwrap_or(segments.last().unwrap().2)
    };

    let n_seg = p_breaks.len() - 1;
    let mut alpha_seg = Vec::with_capacity(n_seg);
    let mut beta_seg = Vec::with_capacity(n_seg);
    for i in 0..n_seg {
        let mid = 0.5 * (p_breaks[i] + p_breaks[i + 1]);
        alpha_seg.push(seg_value(&alpha_segments, mid));
        beta_seg.push(seg_value(&beta_segments, mid));
    }

    let mut a_vals = Vec::with_capacity(p_breaks.len());
    let mut b_vals = Vec::with_capacity(p_breaks.len());
    let mut upsilon_vals = Vec::with_capacity(p_breaks.len());
    for (i, &p) in p_breaks.iter().enumerate() {
        // Evaluate on the adjacent active lines; both sides agree at interior
        // breakpoints since a and b are continuous.
        let seg = i.min(n_seg - 1);
        let (za, zb) = (alpha_seg[seg], beta_seg[seg]);
        let a = (put.eval(za) - p) / (za - w);
        let b = (p - put.eval(zb)) / (w - zb);
        a_vals.push(a);
        b_vals.push(b);
        upsilon_vals.push(a - b);
    }

    let (alpha_top, a_top) = tangent_right(&put, w, p_w)?;
    let (beta_top, b_top) = tangent_left(&put, w, p_w)?;
    let last = p_breaks.len() - 1;
    a_vals[last] = a_top;
    b_vals[last] = b_top;
    upsilon_vals[last] = a_top - b_top;

    Ok(UpsilonTable {
        w,
        p_w,
        atom_mass,
        p_breaks,
        alpha_seg,
        beta_seg,
        a_vals,
        b_vals,
        upsilon_vals,
        alpha_top,
        beta_top,
    })
}

/// One piecewise-constant stretch of the embedding on (u_lo, u_hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub u_lo: f64,
    pub u_hi: f64,
    pub r: f64,
    pub s: f64,
}

/// Output of embedding one point mass: left-closed-right segments, the
/// exactly embedded sub-measure, the residual, and the boundary masses at the
/// spread endpoints.
#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub segments: Vec<Segment>,
    pub embedded: AtomicMeasure,
    pub residual: AtomicMeasure,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
}

/// Embeds the point mass `weight · δ_w` into `target`, offsetting the local
/// u-interval (0, weight] by `u_offset`.
///
/// The target is consumed entirely on the open interval between the final
/// spread endpoints; the masses placed at the endpoints solve the mass and
/// mean preservation system.
pub fn embed_point_mass(
    target: &AtomicMeasure,
    w: f64,
    weight: f64,
    u_offset: f64,
) -> Result<EmbeddingResult> {
    let table = build_upsilon(target, w)?;
    let capacity = table.capacity();
    if weight > capacity + CAPACITY_TOL {
        return Err(Error::AtomTooHeavy {
            weight,
            capacity,
        });
    }
    let weight = weight.min(capacity);
    let atom_mass = table.atom_mass;

    let mut segments = Vec::new();
    if atom_mass > MERGE_TOL {
        segments.push(Segment {
            u_lo: u_offset,
            u_hi: u_offset + weight.min(atom_mass),
            r: w,
            s: w,
        });
    }

    if weight <= atom_mass + MERGE_TOL {
        // The whole point mass is absorbed by the target's own atom at w.
        let embedded = AtomicMeasure::new([(w, weight)])?;
        let residual = target.subtract(&embedded)?;
        return Ok(EmbeddingResult {
            segments,
            embedded,
            residual,
            lambda_lower: 0.0,
            lambda_upper: 0.0,
        });
    }

    // Walk the table from p = P(w) downwards; u = Υ(p) rises from the atom
    // mass towards the weight, and (R, S) = (β, α) step outwards.
    let n_seg = table.alpha_seg.len();
    let mut r_final = w;
    let mut s_final = w;
    for i in (0..n_seg).rev() {
        let u_start = table.upsilon_vals[i + 1].max(atom_mass);
        let u_end = table.upsilon_vals[i].min(weight);
        if u_end <= u_start + 1e-15 {
            if table.upsilon_vals[i + 1] >= weight {
                break;
            }
            continue;
        }
        r_final = table.beta_seg[i];
        s_final = table.alpha_seg[i];
        segments.push(Segment {
            u_lo: u_offset + u_start,
            u_hi: u_offset + u_end,
            r: r_final,
            s: s_final,
        });
        if table.upsilon_vals[i] >= weight {
            break;
        }
    }
    if let Some(last) = segments.last_mut() {
        last.u_hi = u_offset + weight;
    }

    // Mass and mean preservation fix the boundary masses at R and S.
    let inner_mass = target.mass_in_open(r_final, s_final);
    let inner_moment = target.moment_in_open(r_final, s_final);
    let rest = weight - inner_mass;
    let spread = s_final - r_final;
    if spread <= MERGE_TOL {
        return Err(Error::DegenerateBoundary {
            lower: r_final,
            upper: s_final,
        });
    }
    let mut lambda_upper = (weight * w - inner_moment - r_final * rest) / spread;
    let mut lambda_lower = rest - lambda_upper;
    for lam in [&mut lambda_lower, &mut lambda_upper] {
        if *lam < 0.0 {
            if *lam < -BOUNDARY_CLIP {
                return Err(Error::DegenerateBoundary {
                    lower: r_final,
                    upper: s_final,
                });
            }
            *lam = 0.0;
        }
    }
    for (lam, position) in [(lambda_lower, r_final), (lambda_upper, s_final)] {
        if lam > target.mass_at(position) + CAPACITY_TOL {
            return Err(Error::DegenerateBoundary {
                lower: r_final,
                upper: s_final,
            });
        }
    }

    let embedded = AtomicMeasure::new(
        target
            .atoms()
            .iter()
            .filter(|a| a.position > r_final + MERGE_TOL && a.position < s_final - MERGE_TOL)
            .map(|a| (a.position, a.mass))
            .chain([(r_final, lambda_lower), (s_final, lambda_upper)]),
    )?;
    let residual = target.subtract(&embedded)?;

    Ok(EmbeddingResult {
        segments,
        embedded,
        residual,
        lambda_lower,
        lambda_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measure(pairs: &[(f64, f64)]) -> AtomicMeasure {
        AtomicMeasure::new(pairs.iter().copied()).unwrap()
    }

    fn three_point() -> AtomicMeasure {
        measure(&[(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)])
    }

    /// Brute-force tangent oracle: enumerate every kink ratio directly.
    fn oracle_right(target: &AtomicMeasure, w: f64, p: f64) -> (f64, f64) {
        let mut best: Option<(f64, f64)> = None;
        for a in target.atoms() {
            let z = a.position;
            if z <= w + 1e-12 {
                continue;
            }
            let r = (target.put_value(z) - p) / (z - w);
            if best.is_none_or(|(_, br)| r < br - 1e-12) {
                best = Some((z, r));
            }
        }
        best.unwrap()
    }

    fn oracle_left(target: &AtomicMeasure, w: f64, p: f64) -> (f64, f64) {
        let mut best: Option<(f64, f64)> = None;
        for a in target.atoms() {
            let z = a.position;
            if z >= w - 1e-12 {
                continue;
            }
            let r = (p - target.put_value(z)) / (w - z);
            if best.is_none_or(|(_, br)| r > br + 1e-12 || (r >= br - 1e-12)) {
                best = Some((z, r));
            }
        }
        best.unwrap()
    }

    #[test]
    fn tangent_right_examples() {
        let put = PutFunction::of(&three_point());
        let (alpha, a) = tangent_right(&put, 0.0, 0.25).unwrap();
        assert_eq!(alpha, 2.0);
        assert!((a - 0.875).abs() < 1e-15);

        // Single kink above 0; the ratio there is P(1)/1 = 1, matching the
        // kink-enumeration oracle and Υ(0) = 1 for this law.
        let sym = measure(&[(-1.0, 0.5), (1.0, 0.5)]);
        let (alpha, a) = tangent_right(&PutFunction::of(&sym), 0.0, 0.0).unwrap();
        assert_eq!(alpha, 1.0);
        assert!((a - 1.0).abs() < 1e-15);

        // Atom at w forces the tangency onto w at p = P(w).
        let (alpha, a) = tangent_right(&put, 0.0, 0.5).unwrap();
        assert_eq!(alpha, 0.0);
        assert!((a - 0.75).abs() < 1e-15);
    }

    #[test]
    fn tangent_left_examples() {
        let put = PutFunction::of(&three_point());
        let (beta, b) = tangent_left(&put, 0.0, 0.25).unwrap();
        assert_eq!(beta, -2.0);
        assert!((b - 0.125).abs() < 1e-15);

        let sym = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        let (beta, b) = tangent_left(&PutFunction::of(&sym), -1.0, 0.25).unwrap();
        assert_eq!(beta, -2.0);
        assert!((b - 0.25).abs() < 1e-15);

        let err = tangent_left(&PutFunction::of(&sym), -3.0, 0.0);
        assert!(matches!(err, Err(Error::ExhaustedBelow { .. })));
    }

    #[test]
    fn tangents_match_enumeration_oracle() {
        let target = measure(&[(-3.0, 0.15), (-1.0, 0.25), (0.5, 0.3), (2.0, 0.2), (4.0, 0.1)]);
        let put = PutFunction::of(&target);
        // Base point at the barycentre keeps every tangent attained.
        let w = target.barycentre().unwrap();
        let p_w = put.eval(w);
        for i in 0..50 {
            let p = p_w * i as f64 / 50.0;
            let (alpha, a) = tangent_right(&put, w, p).unwrap();
            let (oa, or) = oracle_right(&target, w, p);
            assert_eq!(alpha, oa, "alpha at p={p}");
            assert!((a - or).abs() < 1e-12);
            let (beta, b) = tangent_left(&put, w, p).unwrap();
            let (ob, obr) = oracle_left(&target, w, p);
            assert_eq!(beta, ob, "beta at p={p}");
            assert!((b - obr).abs() < 1e-12);
        }
    }

    #[test]
    fn upsilon_two_point_target() {
        let table = build_upsilon(&measure(&[(-1.0, 0.5), (1.0, 0.5)]), 0.0).unwrap();
        assert!((table.p_w - 0.5).abs() < 1e-15);
        // Kink enumeration gives a(p) = 1 - p, b(p) = p, so Υ(p) = 1 - 2p.
        for i in 0..=10 {
            let p = 0.5 * i as f64 / 10.0;
            assert!((table.upsilon(p) - (1.0 - 2.0 * p)).abs() < 1e-12);
        }
        assert!((table.capacity() - 1.0).abs() < 1e-12);
        assert!(table.upsilon(0.5).abs() < 1e-12);
    }

    #[test]
    fn upsilon_three_point_target() {
        let table = build_upsilon(&three_point(), 0.0).unwrap();
        for i in 0..=10 {
            let p = 0.5 * i as f64 / 10.0;
            let a = (2.0 - p) / 2.0;
            let b = p / 2.0;
            assert!((table.upsilon(p) - (a - b)).abs() < 1e-12);
        }
        assert!((table.capacity() - 1.0).abs() < 1e-12);
        // Υ(P(w)) equals the target mass at w.
        assert!((table.upsilon(0.5) - 0.5).abs() < 1e-12);
        assert_eq!(table.alpha_top, 0.0);
        assert_eq!(table.beta_top, 0.0);
    }

    #[test]
    fn upsilon_offset_base_point() {
        // Base point below the barycentre: Υ(0) = Λ1 bounds the weight.
        let table = build_upsilon(&measure(&[(-2.0, 0.5), (2.0, 0.5)]), -1.0).unwrap();
        for i in 0..=10 {
            let p = 0.5 * i as f64 / 10.0;
            assert!((table.upsilon(p) - (2.0 / 3.0 - 4.0 * p / 3.0)).abs() < 1e-12);
        }
        assert!((table.capacity() - 2.0 / 3.0).abs() < 1e-12);
        assert!(table.capacity() >= 0.5);
    }

    #[test]
    fn upsilon_monotonicity_and_integral_representation() {
        let target = measure(&[(-3.0, 0.15), (-1.0, 0.25), (0.5, 0.3), (2.0, 0.2), (4.0, 0.1)]);
        let table = build_upsilon(&target, 0.5).unwrap();
        let n = table.p_breaks.len();
        for i in 1..n {
            assert!(table.a_vals[i] <= table.a_vals[i - 1] + 1e-12, "a nonincreasing");
            assert!(table.b_vals[i] >= table.b_vals[i - 1] - 1e-12, "b nondecreasing");
            assert!(
                table.upsilon_vals[i] <= table.upsilon_vals[i - 1] + 1e-12,
                "upsilon nonincreasing"
            );
        }
        // Concavity of Υ across breakpoints.
        for i in 2..n {
            let s1 = (table.upsilon_vals[i - 1] - table.upsilon_vals[i - 2])
                / (table.p_breaks[i - 1] - table.p_breaks[i - 2]);
            let s2 = (table.upsilon_vals[i] - table.upsilon_vals[i - 1])
                / (table.p_breaks[i] - table.p_breaks[i - 1]);
            assert!(s2 <= s1 + 1e-9, "upsilon concave");
        }
        // a(p) - a(0) + ∫_0^p dq / (α(q) - w) = 0, piecewise-exact integral.
        let w = 0.5;
        for i in 0..n {
            let mut integral = 0.0;
            for j in 0..i {
                let dq = table.p_breaks[j + 1] - table.p_breaks[j];
                integral += dq / (table.alpha_seg[j] - w);
            }
            let defect = table.a_vals[i] - table.a_vals[0] + integral;
            assert!(defect.abs() < 1e-10, "integral representation, defect {defect}");
        }
    }

    #[test]
    fn embed_full_three_point() {
        let nu = three_point();
        let result = embed_point_mass(&nu, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(
            result.segments,
            vec![
                Segment { u_lo: 0.0, u_hi: 0.5, r: 0.0, s: 0.0 },
                Segment { u_lo: 0.5, u_hi: 1.0, r: -2.0, s: 2.0 },
            ]
        );
        assert!(result.embedded.tv_distance(&nu) < 1e-12);
        assert!(result.residual.is_empty());
    }

    #[test]
    fn embed_partial_offset_atom() {
        let nu = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        let result = embed_point_mass(&nu, -1.0, 0.5, 0.0).unwrap();
        assert_eq!(
            result.segments,
            vec![Segment { u_lo: 0.0, u_hi: 0.5, r: -2.0, s: 2.0 }]
        );
        assert!(result.embedded.tv_distance(&measure(&[(-2.0, 0.375), (2.0, 0.125)])) < 1e-12);
        assert!(result.residual.tv_distance(&measure(&[(-2.0, 0.125), (2.0, 0.375)])) < 1e-12);
        // The embedded sub-measure carries the point mass's weight and mean.
        assert!((result.embedded.total_mass() - 0.5).abs() < 1e-12);
        assert!((result.embedded.barycentre().unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn embed_identity_point_mass() {
        let nu = AtomicMeasure::dirac(0.7);
        let result = embed_point_mass(&nu, 0.7, 1.0, 0.0).unwrap();
        assert_eq!(
            result.segments,
            vec![Segment { u_lo: 0.0, u_hi: 1.0, r: 0.7, s: 0.7 }]
        );
        assert!(result.residual.is_empty());
    }

    #[test]
    fn embed_rejects_overweight_atom() {
        let nu = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        let err = embed_point_mass(&nu, -1.0, 0.9, 0.0);
        assert!(matches!(err, Err(Error::AtomTooHeavy { .. })));
    }

    /// Lemma-style pushforward check: for a full-mass embedding the segment
    /// flows reproduce the target law exactly.
    #[test]
    fn embedded_law_matches_pushforward() {
        let targets = [
            three_point(),
            measure(&[(-3.0, 0.2), (-1.0, 0.2), (0.0, 0.1), (1.5, 0.3), (3.0, 0.2)]),
            measure(&[(-1.0, 0.4), (0.25, 0.35), (2.0, 0.25)]),
        ];
        for nu in targets {
            let w = nu.barycentre().unwrap();
            let result = embed_point_mass(&nu, w, 1.0, 0.0).unwrap();
            let mut pairs: Vec<(f64, f64)> = Vec::new();
            for seg in &result.segments {
                let len = seg.u_hi - seg.u_lo;
                if (seg.s - seg.r).abs() <= 1e-12 {
                    pairs.push((seg.r, len));
                } else {
                    let down = (seg.s - w) / (seg.s - seg.r);
                    pairs.push((seg.r, len * down));
                    pairs.push((seg.s, len * (1.0 - down)));
                }
            }
            let law = AtomicMeasure::new(pairs).unwrap();
            assert!(law.tv_distance(&nu) < 1e-10, "pushforward law off");
            // S never lands in an open interval the target does not charge.
            for seg in &result.segments {
                assert!(
                    nu.mass_at(seg.s) > 0.0 || (seg.s - w).abs() < 1e-12,
                    "S value {} outside target support",
                    seg.s
                );
                assert!(nu.mass_at(seg.r) > 0.0 || (seg.r - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn segments_are_left_continuous_steps() {
        let nu = measure(&[(-3.0, 0.2), (-1.0, 0.2), (0.0, 0.1), (1.5, 0.3), (3.0, 0.2)]);
        let result = embed_point_mass(&nu, nu.barycentre().unwrap(), 1.0, 0.0).unwrap();
        let mut prev_hi = 0.0;
        let mut prev_s = f64::NEG_INFINITY;
        for seg in &result.segments {
            assert!((seg.u_lo - prev_hi).abs() < 1e-12, "segments tile (0,1]");
            assert!(seg.s >= prev_s - 1e-12, "S nondecreasing");
            assert!(seg.u_hi > seg.u_lo);
            prev_hi = seg.u_hi;
            prev_s = seg.s;
        }
        assert!((prev_hi - 1.0).abs() < 1e-12);
    }
}
