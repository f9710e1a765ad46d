//! The left-curtain induction: embed the atoms of μ lowest-first into
//! successive residuals of ν, assembling the global piecewise-constant triple
//! (R, G, S) together with a certification report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, MERGE_TOL};
use crate::single_atom::embed_point_mass;

/// Tolerance for the certification checks (marginals, mass/mean balances).
pub const CERT_TOL: f64 = 1e-9;

/// One piece of the triple on (u_lo, u_hi]: constant lower function R,
/// quantile level G and upper function S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub u_lo: f64,
    pub u_hi: f64,
    pub r: f64,
    pub g: f64,
    pub s: f64,
}

impl Piece {
    pub fn len(&self) -> f64 {
        self.u_hi - self.u_lo
    }

    /// Conditional probability that the piece maps down to R.
    pub fn down_weight(&self) -> f64 {
        if self.s - self.g <= MERGE_TOL {
            0.0
        } else {
            (self.s - self.g) / (self.s - self.r)
        }
    }
}

/// Residual snapshot kept after embedding one atom of μ, for audit and for
/// the mass/mean reconstruction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomAudit {
    pub position: f64,
    pub weight: f64,
    pub embedded: AtomicMeasure,
    pub residual: AtomicMeasure,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub residual_convex_order: bool,
}

/// Certification outcome; an empty violation list means the triple satisfies
/// every structural invariant at the stated tolerances.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Certification {
    pub violations: Vec<String>,
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The generalized left-curtain coupling of (μ, ν) as a piecewise-constant
/// triple on (0, 1], with per-atom audit trail and certification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingTriple {
    pub pieces: Vec<Piece>,
    pub mu: AtomicMeasure,
    pub nu: AtomicMeasure,
    pub audits: Vec<AtomAudit>,
    pub certification: Certification,
}

impl CouplingTriple {
    pub fn is_certified(&self) -> bool {
        self.certification.is_certified()
    }

    pub fn require_certified(&self) -> Result<()> {
        if self.is_certified() {
            Ok(())
        } else {
            Err(Error::Uncertified(self.certification.violations.join("; ")))
        }
    }

    /// Reruns the structural certification, e.g. after loading a stored
    /// triple from disk.
    pub fn recertify(&mut self) {
        self.certification.violations.clear();
        certify(self);
    }

    /// Index of the piece containing u under the left-continuous convention
    /// (pieces are closed at their right endpoint).
    pub fn piece_index(&self, u: f64) -> usize {
        let i = self.pieces.partition_point(|p| p.u_hi < u);
        i.min(self.pieces.len() - 1)
    }

    pub fn piece_at(&self, u: f64) -> &Piece {
        &self.pieces[self.piece_index(u)]
    }

    /// Cumulative embedded mass per position of ν after `upto` pieces, the
    /// last one counted with length `partial`.
    fn embedded_mass(&self, upto: usize, partial: f64) -> Vec<(f64, f64)> {
        let mut acc: Vec<(f64, f64)> = Vec::new();
        let add = |acc: &mut Vec<(f64, f64)>, position: f64, mass: f64| {
            if mass <= 0.0 {
                return;
            }
            let i = acc.partition_point(|(p, _)| *p < position - MERGE_TOL);
            if i < acc.len() && (acc[i].0 - position).abs() <= MERGE_TOL {
                acc[i].1 += mass;
            } else {
                acc.insert(i, (position, mass));
            }
        };
        for (i, piece) in self.pieces.iter().enumerate().take(upto + 1) {
            let len = if i == upto { partial } else { piece.len() };
            if len <= 0.0 {
                continue;
            }
            if piece.s - piece.g <= MERGE_TOL {
                add(&mut acc, piece.g, len);
            } else {
                let down = piece.down_weight();
                add(&mut acc, piece.r, len * down);
                add(&mut acc, piece.s, len * (1.0 - down));
            }
        }
        acc
    }

    /// Second marginal of the coupling as an atomic measure.
    pub fn second_marginal(&self) -> AtomicMeasure {
        let last = self.pieces.len() - 1;
        let flows = self.embedded_mass(last, self.pieces[last].len());
        AtomicMeasure::new(flows).unwrap_or_else(|_| AtomicMeasure::new([]).unwrap())
    }

    /// Embedded flows that the preservation balances at level u account for:
    /// the current atom's pieces cut at u, plus the complete flows of the
    /// earlier atoms lying strictly inside the open window (R(u), G(u)).
    /// Left-monotonicity confines those flows to [R(u), S(u)].
    fn qualifying_flows(&self, u: f64) -> Vec<(f64, f64)> {
        let cur = self.pieces[self.piece_index(u)];
        let mut acc: Vec<(f64, f64)> = Vec::new();
        let add = |acc: &mut Vec<(f64, f64)>, position: f64, mass: f64| {
            if mass <= 0.0 {
                return;
            }
            let i = acc.partition_point(|(p, _)| *p < position - MERGE_TOL);
            if i < acc.len() && (acc[i].0 - position).abs() <= MERGE_TOL {
                acc[i].1 += mass;
            } else {
                acc.insert(i, (position, mass));
            }
        };
        for piece in &self.pieces {
            let same_atom = (piece.g - cur.g).abs() <= MERGE_TOL;
            let inside = piece.g > cur.r + MERGE_TOL && piece.g < cur.g - MERGE_TOL;
            if !(same_atom || inside) {
                continue;
            }
            let len = if same_atom {
                (u.min(piece.u_hi) - piece.u_lo).max(0.0)
            } else {
                piece.len()
            };
            if len <= 0.0 {
                continue;
            }
            if piece.s - piece.g <= MERGE_TOL {
                add(&mut acc, piece.g, len);
            } else {
                let down = piece.down_weight();
                add(&mut acc, piece.r, len * down);
                add(&mut acc, piece.s, len * (1.0 - down));
            }
        }
        acc
    }

    /// Both sides of the mass and mean preservation balances at level u.
    pub fn mass_mean_at(&self, u: f64) -> MassMeanCheck {
        let idx = self.piece_index(u);
        let piece = self.pieces[idx];
        let embedded = self.qualifying_flows(u);
        let at = |x: f64| -> f64 {
            let i = embedded.partition_point(|(p, _)| *p < x - MERGE_TOL);
            if i < embedded.len() && (embedded[i].0 - x).abs() <= MERGE_TOL {
                embedded[i].1
            } else {
                0.0
            }
        };

        let lambda_mu = (u - self.mu.cdf_left(piece.g)).clamp(0.0, self.mu.mass_at(piece.g));
        let lhs_mass = self.mu.mass_in_open(piece.r, piece.g) + lambda_mu;
        let lhs_mean = self.mu.moment_in_open(piece.r, piece.g) + lambda_mu * piece.g;

        let (lambda_r, lambda_s) = if piece.s - piece.r <= MERGE_TOL {
            (at(piece.r), 0.0)
        } else {
            (at(piece.r), at(piece.s))
        };
        let rhs_mass = self.nu.mass_in_open(piece.r, piece.s) + lambda_r + lambda_s;
        let rhs_mean =
            self.nu.moment_in_open(piece.r, piece.s) + lambda_r * piece.r + lambda_s * piece.s;

        MassMeanCheck {
            lhs_mass,
            rhs_mass,
            lhs_mean,
            rhs_mean,
        }
    }
}

/// Evaluations of the two preservation balances at one level.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MassMeanCheck {
    pub lhs_mass: f64,
    pub rhs_mass: f64,
    pub lhs_mean: f64,
    pub rhs_mean: f64,
}

impl MassMeanCheck {
    pub fn max_defect(&self) -> f64 {
        (self.lhs_mass - self.rhs_mass)
            .abs()
            .max((self.lhs_mean - self.rhs_mean).abs())
    }
}

/// Both sides of the preservation balances, reconstructed from the triple and
/// the cumulative embedded masses.
pub fn check_mass_mean(triple: &CouplingTriple, u: f64) -> Result<MassMeanCheck> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::QuantileDomain(u));
    }
    Ok(triple.mass_mean_at(u))
}

/// Builds the generalized left-curtain coupling of μ and ν.
///
/// Atoms of μ are processed lowest-first; each one is embedded into the
/// current residual of ν and the local segments are concatenated. The result
/// always carries a certification report; structural violations are recorded
/// there rather than silently accepted.
pub fn build_left_curtain(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<CouplingTriple> {
    if !mu.convex_order_leq(nu) {
        return Err(Error::NotConvexOrder);
    }
    let mut residual = nu.clone();
    let mut pieces: Vec<Piece> = Vec::new();
    let mut audits: Vec<AtomAudit> = Vec::new();
    let mut violations: Vec<String> = Vec::new();

    let mut cum = 0.0;
    for (index, atom) in mu.atoms().iter().enumerate() {
        let result = embed_point_mass(&residual, atom.position, atom.mass, cum).map_err(
            |source| Error::AtomEmbedding {
                index,
                position: atom.position,
                source: Box::new(source),
            },
        )?;
        for seg in &result.segments {
            pieces.push(Piece {
                u_lo: seg.u_lo,
                u_hi: seg.u_hi,
                r: seg.r,
                g: atom.position,
                s: seg.s,
            });
        }
        let remaining =
            AtomicMeasure::new(mu.atoms()[index + 1..].iter().map(|a| (a.position, a.mass)))?;
        let residual_convex_order =
            remaining.is_empty() || remaining.convex_order_leq(&result.residual);
        if !residual_convex_order {
            violations.push(format!(
                "residual after atom {index} at {} not in convex order with the remaining initial law",
                atom.position
            ));
        }
        audits.push(AtomAudit {
            position: atom.position,
            weight: atom.mass,
            embedded: result.embedded,
            residual: result.residual.clone(),
            lambda_lower: result.lambda_lower,
            lambda_upper: result.lambda_upper,
            residual_convex_order,
        });
        residual = result.residual;
        cum += atom.mass;
    }

    if residual.total_mass() > 1e-10 {
        violations.push(format!(
            "final residual mass {} exceeds tolerance",
            residual.total_mass()
        ));
    }

    // Merge zero-length pieces and adjacent pieces with identical values.
    pieces.retain(|p| p.len() > 1e-15);
    let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        match merged.last_mut() {
            Some(last)
                if (last.r - piece.r).abs() <= MERGE_TOL
                    && (last.g - piece.g).abs() <= MERGE_TOL
                    && (last.s - piece.s).abs() <= MERGE_TOL =>
            {
                last.u_hi = piece.u_hi;
            }
            _ => merged.push(piece),
        }
    }
    if let Some(last) = merged.last_mut() {
        if (last.u_hi - 1.0).abs() <= CERT_TOL {
            last.u_hi = 1.0;
        }
    }

    let mut triple = CouplingTriple {
        pieces: merged,
        mu: mu.clone(),
        nu: nu.clone(),
        audits,
        certification: Certification { violations },
    };
    certify(&mut triple);
    Ok(triple)
}

/// Runs the structural certification and records violations on the triple.
fn certify(triple: &mut CouplingTriple) {
    let mut violations = std::mem::take(&mut triple.certification.violations);
    let pieces = &triple.pieces;

    if pieces.is_empty() {
        violations.push("empty triple".into());
        triple.certification.violations = violations;
        return;
    }
    if pieces[0].u_lo.abs() > CERT_TOL || (pieces.last().unwrap().u_hi - 1.0).abs() > CERT_TOL {
        violations.push("pieces do not cover (0,1]".into());
    }
    for (i, w) in pieces.windows(2).enumerate() {
        if (w[0].u_hi - w[1].u_lo).abs() > CERT_TOL {
            violations.push(format!("gap between pieces {} and {}", i, i + 1));
        }
    }

    for (i, p) in pieces.iter().enumerate() {
        if p.r > p.g + MERGE_TOL || p.g > p.s + MERGE_TOL {
            violations.push(format!("piece {i}: R <= G <= S fails"));
        }
    }
    for (i, w) in pieces.windows(2).enumerate() {
        if w[1].s < w[0].s - MERGE_TOL {
            violations.push(format!("S decreases across pieces {} and {}", i, i + 1));
        }
        if w[1].g < w[0].g - MERGE_TOL {
            violations.push(format!("G decreases across pieces {} and {}", i, i + 1));
        }
    }

    // Left-monotonicity: R never re-enters an earlier open spread.
    'outer: for i in 0..pieces.len() {
        let (r_i, s_i) = (pieces[i].r, pieces[i].s);
        if s_i - r_i <= MERGE_TOL {
            continue;
        }
        for p in pieces.iter().skip(i + 1) {
            if p.r > r_i + CERT_TOL && p.r < s_i - CERT_TOL {
                violations.push(format!(
                    "left-monotonicity fails: R = {} lands inside ({}, {})",
                    p.r, r_i, s_i
                ));
                break 'outer;
            }
        }
    }

    // G is the quantile step function of μ.
    for (i, p) in pieces.iter().enumerate() {
        let mid = 0.5 * (p.u_lo + p.u_hi);
        match triple.mu.quantile(mid) {
            Ok(q) if (q - p.g).abs() <= 1e-9 => {}
            _ => violations.push(format!("piece {i}: G differs from the quantile of mu")),
        }
    }

    // Exact second marginal and per-atom martingale property.
    let tv = triple.second_marginal().tv_distance(&triple.nu);
    if tv > CERT_TOL {
        violations.push(format!("second marginal differs from nu in TV by {tv}"));
    }
    for atom in triple.mu.atoms() {
        let mut mean = 0.0;
        let mut mass = 0.0;
        for p in pieces
            .iter()
            .filter(|p| (p.g - atom.position).abs() <= MERGE_TOL)
        {
            let len = p.len();
            let down = p.down_weight();
            mean += len * (down * p.r + (1.0 - down) * p.s);
            mass += len;
        }
        if mass > 0.0 && (mean / mass - atom.position).abs() > 1e-10 {
            violations.push(format!(
                "martingale defect {} at atom {}",
                (mean / mass - atom.position).abs(),
                atom.position
            ));
        }
    }

    // Mass and mean preservation at breakpoints and midpoints.
    let mut worst = 0.0_f64;
    for p in pieces.iter() {
        for u in [0.5 * (p.u_lo + p.u_hi), p.u_hi] {
            if u <= 0.0 || u >= 1.0 {
                continue;
            }
            worst = worst.max(triple.mass_mean_at(u).max_defect());
        }
    }
    if worst > CERT_TOL {
        violations.push(format!("mass/mean preservation defect {worst}"));
    }

    triple.certification.violations = violations;
}

/// Multi-valued view (x, f(x), g(x)) of the coupling at the points where G is
/// strictly increasing; atoms spanning several spread segments report every
/// branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FgEntry {
    pub x: f64,
    pub branches: Vec<(f64, f64)>,
}

pub fn fg_view(triple: &CouplingTriple) -> Vec<FgEntry> {
    let mut entries: Vec<FgEntry> = Vec::new();
    for piece in &triple.pieces {
        match entries.last_mut() {
            Some(e) if (e.x - piece.g).abs() <= MERGE_TOL => {
                e.branches.push((piece.r, piece.s));
            }
            _ => entries.push(FgEntry {
                x: piece.g,
                branches: vec![(piece.r, piece.s)],
            }),
        }
    }
    entries
}
