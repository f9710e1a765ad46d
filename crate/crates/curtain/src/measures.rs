//! Finitely-atomic measures: put functions, quantiles, barycentres, convex
//! order, subtraction and convex-order-preserving discretization.
//!
//! Sub-probability measures are first class; operations that require a
//! probability law assert total mass 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used to merge coincident positions and compare masses.
pub const MERGE_TOL: f64 = 1e-12;

/// One weighted point of an atomic measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

/// A finitely supported nonnegative measure with total mass at most 1.
///
/// Positions are strictly increasing (coincident inputs are merged at
/// ingestion) and every retained mass is positive. The empty measure is the
/// residual of subtracting a measure from itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// Builds a measure from (position, mass) pairs, sorting and merging
    /// positions closer than [`MERGE_TOL`]. Masses below tolerance are dropped.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<Atom> = Vec::new();
        for (position, mass) in pairs {
            if !position.is_finite() || !mass.is_finite() {
                return Err(Error::NonFinite { position, mass });
            }
            if mass < -MERGE_TOL {
                return Err(Error::NegativeMass { position, mass });
            }
            if mass > MERGE_TOL {
                raw.push(Atom { position, mass });
            }
        }
        raw.sort_by(|a, b| a.position.total_cmp(&b.position));
        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for atom in raw {
            match atoms.last_mut() {
                Some(last) if atom.position - last.position <= MERGE_TOL => {
                    // Mass-weighted position keeps the barycentre intact.
                    let m = last.mass + atom.mass;
                    last.position =
                        (last.position * last.mass + atom.position * atom.mass) / m;
                    last.mass = m;
                }
                _ => atoms.push(atom),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if total > 1.0 + MERGE_TOL {
            return Err(Error::MassExceedsOne(total));
        }
        Ok(Self { atoms })
    }

    /// Unit point mass at `w`.
    pub fn dirac(w: f64) -> Self {
        Self {
            atoms: vec![Atom { position: w, mass: 1.0 }],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-9
    }

    /// Left endpoint of the support.
    pub fn inf_support(&self) -> Option<f64> {
        self.atoms.first().map(|a| a.position)
    }

    /// Right endpoint of the support.
    pub fn sup_support(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.position)
    }

    /// Mass of the atom at `x`, zero when no atom sits there.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.index_at(x).map_or(0.0, |i| self.atoms[i].mass)
    }

    /// Index of the atom at `x` within [`MERGE_TOL`], if any.
    pub fn index_at(&self, x: f64) -> Option<usize> {
        let i = self
            .atoms
            .partition_point(|a| a.position < x - MERGE_TOL);
        (i < self.atoms.len() && (self.atoms[i].position - x).abs() <= MERGE_TOL).then_some(i)
    }

    /// Mass on the open interval (a, b).
    pub fn mass_in_open(&self, a: f64, b: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|at| at.position > a + MERGE_TOL && at.position < b - MERGE_TOL)
            .map(|at| at.mass)
            .sum()
    }

    /// First moment on the open interval (a, b).
    pub fn moment_in_open(&self, a: f64, b: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|at| at.position > a + MERGE_TOL && at.position < b - MERGE_TOL)
            .map(|at| at.mass * at.position)
            .sum()
    }

    /// Distribution function F(x): mass at or below `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.position <= x + MERGE_TOL)
            .map(|a| a.mass)
            .sum()
    }

    /// Left limit F(x-): mass strictly below `x`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.position < x - MERGE_TOL)
            .map(|a| a.mass)
            .sum()
    }

    /// Put value P(k) = sum of mass * (k - x)^+.
    pub fn put_value(&self, k: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * (k - a.position).max(0.0))
            .sum()
    }

    /// Mass-weighted mean. Errors on the empty measure.
    pub fn barycentre(&self) -> Result<f64> {
        let total = self.total_mass();
        if self.atoms.is_empty() || total <= MERGE_TOL {
            return Err(Error::EmptyMeasure);
        }
        Ok(self.atoms.iter().map(|a| a.mass * a.position).sum::<f64>() / total)
    }

    /// Left-continuous quantile function of a probability measure.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::QuantileDomain(u));
        }
        if !self.is_probability() {
            return Err(Error::NotProbability(self.total_mass()));
        }
        let mut cum = 0.0;
        for a in &self.atoms {
            cum += a.mass;
            // Strict inequality below the cumulative keeps G left-continuous:
            // at u equal to a jump of F the lower atom is returned.
            if u <= cum + MERGE_TOL {
                return Ok(a.position);
            }
        }
        Ok(self.atoms.last().expect("probability measure").position)
    }

    /// Right-continuous quantile G(u+): smallest x with F(x) strictly above u.
    pub fn quantile_right(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::QuantileDomain(u));
        }
        if !self.is_probability() {
            return Err(Error::NotProbability(self.total_mass()));
        }
        let mut cum = 0.0;
        for a in &self.atoms {
            cum += a.mass;
            if u < cum - MERGE_TOL {
                return Ok(a.position);
            }
        }
        Ok(self.atoms.last().expect("probability measure").position)
    }

    /// Convex order test: equal masses, equal barycentres and P_self <= P_other
    /// at every kink of either measure (sufficient by piecewise linearity).
    pub fn convex_order_leq(&self, other: &AtomicMeasure) -> bool {
        if self.is_empty() && other.is_empty() {
            return true;
        }
        if self.is_empty() != other.is_empty() {
            return false;
        }
        if (self.total_mass() - other.total_mass()).abs() > MERGE_TOL {
            return false;
        }
        let (Ok(b1), Ok(b2)) = (self.barycentre(), other.barycentre()) else {
            return false;
        };
        if (b1 - b2).abs() > MERGE_TOL {
            return false;
        }
        self.atoms
            .iter()
            .chain(other.atoms.iter())
            .all(|a| self.put_value(a.position) <= other.put_value(a.position) + MERGE_TOL)
    }

    /// Atomwise difference `self - other`; residual masses at or below
    /// tolerance are dropped. Errors when `other` exceeds `self` anywhere.
    pub fn subtract(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        let mut masses: Vec<f64> = self.atoms.iter().map(|a| a.mass).collect();
        for b in &other.atoms {
            match self.index_at(b.position) {
                Some(i) if masses[i] >= b.mass - MERGE_TOL => masses[i] -= b.mass,
                Some(i) => {
                    return Err(Error::NotDominated {
                        position: b.position,
                        excess: b.mass - masses[i],
                    })
                }
                None => {
                    return Err(Error::NotDominated {
                        position: b.position,
                        excess: b.mass,
                    })
                }
            }
        }
        AtomicMeasure::new(
            self.atoms
                .iter()
                .zip(masses)
                .map(|(a, m)| (a.position, m)),
        )
    }

    /// Total-variation distance to another atomic measure.
    pub fn tv_distance(&self, other: &AtomicMeasure) -> f64 {
        let mut keys: Vec<f64> = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .map(|a| a.position)
            .collect();
        keys.sort_by(f64::total_cmp);
        keys.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);
        0.5 * keys
            .iter()
            .map(|&x| (self.mass_at(x) - other.mass_at(x)).abs())
            .sum::<f64>()
    }
}

/// Piecewise-linear convex view of an atomic measure: prefix sums over the
/// sorted atoms give P, its kinks and one-sided slopes in O(log n) per query.
#[derive(Debug, Clone)]
pub struct PutFunction {
    positions: Vec<f64>,
    masses: Vec<f64>,
    prefix_mass: Vec<f64>,
    prefix_moment: Vec<f64>,
    total_mass: f64,
    total_moment: f64,
}

impl PutFunction {
    pub fn of(measure: &AtomicMeasure) -> Self {
        let n = measure.atoms().len();
        let mut prefix_mass = Vec::with_capacity(n + 1);
        let mut prefix_moment = Vec::with_capacity(n + 1);
        prefix_mass.push(0.0);
        prefix_moment.push(0.0);
        for a in measure.atoms() {
            prefix_mass.push(prefix_mass.last().unwrap() + a.mass);
            prefix_moment.push(prefix_moment.last().unwrap() + a.mass * a.position);
        }
        Self {
            positions: measure.atoms().iter().map(|a| a.position).collect(),
            masses: measure.atoms().iter().map(|a| a.mass).collect(),
            prefix_mass: prefix_mass.clone(),
            prefix_moment: prefix_moment.clone(),
            total_mass: *prefix_mass.last().unwrap(),
            total_moment: *prefix_moment.last().unwrap(),
        }
    }

    pub fn kinks(&self) -> &[f64] {
        &self.positions
    }

    pub fn kink_mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// P(k) via the prefix sums over atoms at or below k.
    pub fn eval(&self, k: f64) -> f64 {
        let i = self
            .positions
            .partition_point(|&x| x <= k + MERGE_TOL);
        k * self.prefix_mass[i] - self.prefix_moment[i]
    }

    /// Right slope P'(k+) = F(k).
    pub fn slope_right(&self, k: f64) -> f64 {
        let i = self
            .positions
            .partition_point(|&x| x <= k + MERGE_TOL);
        self.prefix_mass[i]
    }

    /// Left slope P'(k-) = F(k-).
    pub fn slope_left(&self, k: f64) -> f64 {
        let i = self
            .positions
            .partition_point(|&x| x < k - MERGE_TOL);
        self.prefix_mass[i]
    }

    /// Mass-weighted mean (NaN for the empty function).
    pub fn mean(&self) -> f64 {
        self.total_moment / self.total_mass
    }
}

/// JSON measure description accepted by the command line tools.
///
/// One of `{"atoms": [[x, m], ...]}`, `{"uniform": [a, b], "n": N}` or
/// `{"samples": [...], "n": N}`; the latter two route through [`discretize`]
/// and [`discretize_samples`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Atoms { atoms: Vec<(f64, f64)> },
    Uniform { uniform: (f64, f64), n: usize },
    Samples { samples: Vec<f64>, n: usize },
}

impl MeasureSpec {
    pub fn to_measure(&self) -> Result<AtomicMeasure> {
        match self {
            MeasureSpec::Atoms { atoms } => AtomicMeasure::new(atoms.iter().copied()),
            MeasureSpec::Uniform { uniform: (a, b), n } => {
                let (a, b) = (*a, *b);
                discretize(|u| a + (b - a) * u, *n)
            }
            MeasureSpec::Samples { samples, n } => discretize_samples(samples, *n),
        }
    }

    /// Quantile function of the undiscretized source, when one exists.
    pub fn quantile_fn(&self) -> Option<Box<dyn Fn(f64) -> f64>> {
        match self {
            MeasureSpec::Uniform { uniform: (a, b), .. } => {
                let (a, b) = (*a, *b);
                Some(Box::new(move |u| a + (b - a) * u))
            }
            MeasureSpec::Samples { samples, .. } => {
                let mut sorted = samples.clone();
                sorted.sort_by(f64::total_cmp);
                Some(Box::new(move |u: f64| {
                    let i = ((u * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
                    sorted[i - 1]
                }))
            }
            MeasureSpec::Atoms { .. } => None,
        }
    }
}

const SIMPSON_PANELS: usize = 64;

/// Discretizes a quantile-described law into `n` atoms: (0,1) is split into n
/// equal bins and each bin contributes its conditional barycentre with mass
/// 1/n. The result precedes the source in convex order and preserves the
/// barycentre.
pub fn discretize(quantile: impl Fn(f64) -> f64, n: usize) -> Result<AtomicMeasure> {
    assert!(n >= 1, "discretize requires n >= 1");
    let mut pairs = Vec::with_capacity(n);
    for bin in 0..n {
        let lo = bin as f64 / n as f64;
        let hi = (bin + 1) as f64 / n as f64;
        // Composite Simpson over the bin; exact for affine quantiles.
        let h = (hi - lo) / SIMPSON_PANELS as f64;
        let mut acc = 0.0;
        for p in 0..SIMPSON_PANELS {
            let a = lo + p as f64 * h;
            let b = a + h;
            acc += (quantile(a) + 4.0 * quantile(0.5 * (a + b)) + quantile(b)) * h / 6.0;
        }
        let mean = acc / (hi - lo);
        if !mean.is_finite() {
            return Err(Error::NonIntegrable { bin });
        }
        pairs.push((mean, 1.0 / n as f64));
    }
    AtomicMeasure::new(pairs)
}

/// Discretizes an empirical sample list into `n` atoms with exact mass
/// splitting of samples across bin boundaries.
pub fn discretize_samples(samples: &[f64], n: usize) -> Result<AtomicMeasure> {
    assert!(n >= 1, "discretize requires n >= 1");
    if samples.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonIntegrable { bin: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut pairs = Vec::with_capacity(n);
    for bin in 0..n {
        let lo = bin as f64 / n as f64;
        let hi = (bin + 1) as f64 / n as f64;
        let mut mass = 0.0;
        let mut moment = 0.0;
        for (j, &s) in sorted.iter().enumerate() {
            let s_lo = j as f64 / m;
            let s_hi = (j + 1) as f64 / m;
            let overlap = (hi.min(s_hi) - lo.max(s_lo)).max(0.0);
            mass += overlap;
            moment += overlap * s;
        }
        if mass > 0.0 {
            pairs.push((moment / mass, mass));
        }
    }
    AtomicMeasure::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn measure(pairs: &[(f64, f64)]) -> AtomicMeasure {
        AtomicMeasure::new(pairs.iter().copied()).unwrap()
    }

    fn three_point() -> AtomicMeasure {
        measure(&[(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)])
    }

    #[test]
    fn put_value_examples() {
        assert_eq!(AtomicMeasure::dirac(0.0).put_value(0.0), 0.0);
        let sym = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        // Direct evaluation of the defining sum: 0.5 * (0 - (-2)).
        assert!((sym.put_value(0.0) - 1.0).abs() < 1e-15);
        assert!((three_point().put_value(2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn put_value_is_convex_and_caps_at_intrinsic() {
        let eta = measure(&[(-1.5, 0.25), (-0.25, 0.25), (0.5, 0.3), (2.0, 0.2)]);
        let kinks: Vec<f64> = eta.atoms().iter().map(|a| a.position).collect();
        for w in kinks.windows(3) {
            let (k1, k2, k3) = (w[0], w[1], w[2]);
            let s12 = (eta.put_value(k2) - eta.put_value(k1)) / (k2 - k1);
            let s23 = (eta.put_value(k3) - eta.put_value(k2)) / (k3 - k2);
            assert!(s12 <= s23 + 1e-12);
        }
        // Beyond the support the put collapses onto mass * (k - mean)^+.
        let mean = eta.barycentre().unwrap();
        for k in [2.0, 2.5, 10.0] {
            let intrinsic = eta.total_mass() * (k - mean).max(0.0);
            assert!((eta.put_value(k) - intrinsic).abs() < 1e-12);
        }
    }

    #[test]
    fn barycentre_examples() {
        assert_eq!(AtomicMeasure::dirac(3.5).barycentre().unwrap(), 3.5);
        let sym = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        assert_eq!(sym.barycentre().unwrap(), 0.0);
        let skew = measure(&[(-2.0, 0.125), (2.0, 0.375)]);
        assert!((skew.barycentre().unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            AtomicMeasure::new([]).unwrap().barycentre(),
            Err(Error::EmptyMeasure)
        ));
    }

    #[test]
    fn quantile_examples() {
        let point = AtomicMeasure::dirac(2.0);
        assert_eq!(point.quantile(0.3).unwrap(), 2.0);
        let sym = measure(&[(-1.0, 0.5), (1.0, 0.5)]);
        // Left continuity at the jump of F.
        assert_eq!(sym.quantile(0.5).unwrap(), -1.0);
        assert_eq!(sym.quantile_right(0.5).unwrap(), 1.0);
        assert_eq!(three_point().quantile(0.8).unwrap(), 2.0);
        assert!(matches!(
            three_point().quantile(1.0),
            Err(Error::QuantileDomain(_))
        ));
    }

    #[test]
    fn quantile_put_duality() {
        // P(G(u)) equals the brute-force partial expectation at the quantile.
        let eta = measure(&[(-2.0, 0.2), (-0.5, 0.3), (1.0, 0.4), (3.0, 0.1)]);
        for i in 1..20 {
            let u = i as f64 / 20.0;
            let g = eta.quantile(u).unwrap();
            let brute: f64 = eta
                .atoms()
                .iter()
                .map(|a| a.mass * (g - a.position).max(0.0))
                .sum();
            assert!((eta.put_value(g) - brute).abs() < 1e-14);
        }
    }

    #[test]
    fn convex_order_examples() {
        let sym1 = measure(&[(-1.0, 0.5), (1.0, 0.5)]);
        let sym2 = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        assert!(sym1.convex_order_leq(&sym1));
        assert!(AtomicMeasure::dirac(0.0).convex_order_leq(&sym1));
        assert!(sym1.convex_order_leq(&sym2));
        assert!(!sym2.convex_order_leq(&sym1));
        // Different means are never comparable.
        let shifted = measure(&[(-1.0, 0.5), (2.0, 0.5)]);
        assert!(!sym1.convex_order_leq(&shifted));
    }

    #[test]
    fn subtract_examples() {
        let sym = measure(&[(-2.0, 0.5), (2.0, 0.5)]);
        assert!(sym.subtract(&sym).unwrap().is_empty());
        let part = measure(&[(-2.0, 0.375), (2.0, 0.125)]);
        let rest = sym.subtract(&part).unwrap();
        assert_eq!(rest, measure(&[(-2.0, 0.125), (2.0, 0.375)]));
        // Domination violated: more mass requested than present.
        let half = measure(&[(0.0, 0.5)]);
        assert!(matches!(
            half.subtract(&AtomicMeasure::dirac(0.0)),
            Err(Error::NotDominated { .. })
        ));
        assert!(half.subtract(&measure(&[(1.0, 0.25)])).is_err());
    }

    #[test]
    fn merges_coincident_atoms() {
        let m = measure(&[(1.0, 0.25), (1.0, 0.25), (2.0, 0.5)]);
        assert_eq!(m.len(), 2);
        assert!((m.mass_at(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn discretize_examples() {
        let point = discretize(|_| 1.5, 7).unwrap();
        assert_eq!(point.len(), 1);
        assert!((point.mass_at(1.5) - 1.0).abs() < 1e-12);

        let u2 = discretize(|u| 2.0 * u, 2).unwrap();
        assert_eq!(u2, measure(&[(0.5, 0.5), (1.5, 0.5)]));

        let u4 = discretize(|u| 2.0 * u, 4).unwrap();
        assert_eq!(
            u4,
            measure(&[(0.25, 0.25), (0.75, 0.25), (1.25, 0.25), (1.75, 0.25)])
        );
    }

    #[test]
    fn discretize_nested_refinement_is_monotone() {
        // Dyadic bins nest, so mu_n <=cx mu_2n <=cx exact bin means of mu.
        let g = |u: f64| (2.0 * u).powi(2) - 1.0;
        let mut prev = discretize(g, 2).unwrap();
        for k in [4usize, 8, 16, 32] {
            let next = discretize(g, k).unwrap();
            assert!(prev.convex_order_leq(&next));
            assert!((prev.barycentre().unwrap() - next.barycentre().unwrap()).abs() < 1e-10);
            prev = next;
        }
    }

    #[test]
    fn discretize_samples_splits_mass_exactly() {
        let samples = [0.0, 1.0, 2.0];
        let m = discretize_samples(&samples, 2).unwrap();
        // Bin 1 holds sample 0 plus half of sample 1: mean (0 + 0.5)/1.5 * ...
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        assert!((m.barycentre().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(m.len(), 2);
        assert!((m.atoms()[0].position - (0.0 / 3.0 + 0.5 * 1.0 / 3.0) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn put_function_matches_measure() {
        let eta = measure(&[(-2.0, 0.2), (-0.5, 0.3), (1.0, 0.4), (3.0, 0.1)]);
        let p = PutFunction::of(&eta);
        for k in [-3.0, -2.0, -1.0, -0.5, 0.0, 1.0, 2.9, 3.0, 4.0] {
            assert!((p.eval(k) - eta.put_value(k)).abs() < 1e-14);
        }
        assert!((p.slope_right(-0.5) - 0.5).abs() < 1e-15);
        assert!((p.slope_left(-0.5) - 0.2).abs() < 1e-15);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_probability() -> impl Strategy<Value = AtomicMeasure> {
            proptest::collection::vec((-50.0f64..50.0, 0.05f64..1.0), 1..8).prop_map(|raw| {
                let total: f64 = raw.iter().map(|(_, m)| m).sum();
                AtomicMeasure::new(raw.into_iter().map(|(x, m)| (x, m / total))).unwrap()
            })
        }

        proptest! {
            #[test]
            fn put_is_convex_and_quantile_dual(eta in arb_probability(), u in 0.01f64..0.99) {
                let kinks: Vec<f64> = eta.atoms().iter().map(|a| a.position).collect();
                for w in kinks.windows(3) {
                    let s12 = (eta.put_value(w[1]) - eta.put_value(w[0])) / (w[1] - w[0]);
                    let s23 = (eta.put_value(w[2]) - eta.put_value(w[1])) / (w[2] - w[1]);
                    prop_assert!(s12 <= s23 + 1e-9);
                }
                let g = eta.quantile(u).unwrap();
                let brute: f64 = eta
                    .atoms()
                    .iter()
                    .map(|a| a.mass * (g - a.position).max(0.0))
                    .sum();
                prop_assert!((eta.put_value(g) - brute).abs() < 1e-12);
            }

            #[test]
            fn subtract_then_add_back(eta in arb_probability(), frac in 0.1f64..0.9) {
                let part = AtomicMeasure::new(
                    eta.atoms().iter().map(|a| (a.position, a.mass * frac)),
                )
                .unwrap();
                let rest = eta.subtract(&part).unwrap();
                prop_assert!((rest.total_mass() - (1.0 - frac) * eta.total_mass()).abs() < 1e-9);
                let rebuilt = AtomicMeasure::new(
                    rest.atoms()
                        .iter()
                        .chain(part.atoms().iter())
                        .map(|a| (a.position, a.mass)),
                )
                .unwrap();
                prop_assert!(rebuilt.tv_distance(&eta) < 1e-9);
            }
        }
    }

    #[test]
    fn measure_spec_json_round_trip() {
        let spec: MeasureSpec = serde_json::from_str(r#"{"atoms": [[0.0, 1.0]]}"#).unwrap();
        assert_eq!(spec.to_measure().unwrap(), AtomicMeasure::dirac(0.0));
        let spec: MeasureSpec =
            serde_json::from_str(r#"{"uniform": [0.0, 2.0], "n": 2}"#).unwrap();
        assert_eq!(
            spec.to_measure().unwrap(),
            measure(&[(0.5, 0.5), (1.5, 0.5)])
        );
        let spec: MeasureSpec =
            serde_json::from_str(r#"{"samples": [0.0, 1.0, 2.0], "n": 3}"#).unwrap();
        assert!((spec.to_measure().unwrap().barycentre().unwrap() - 1.0).abs() < 1e-12);
    }
}
