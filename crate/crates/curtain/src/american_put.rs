//! Model price of the two-exercise-date American put under the left-curtain
//! model, the exercise threshold, the two-put static superhedge and the dual
//! upper bound.

use serde::{Deserialize, Serialize};

use crate::curtain::CouplingTriple;
use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, MERGE_TOL};

/// Strikes for the two exercise dates; the later strike is the lower one.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PutPair {
    pub k1: f64,
    pub k2: f64,
}

impl PutPair {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if k2 >= k1 {
            return Err(Error::StrikeOrder { k1, k2 });
        }
        Ok(Self { k1, k2 })
    }
}

/// A nonnegative combination of two puts held statically as a superhedge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HedgePortfolio {
    pub theta: f64,
    #[serde(rename = "r")]
    pub strike_low: f64,
    #[serde(rename = "s")]
    pub strike_high: f64,
    pub cost: f64,
}

impl HedgePortfolio {
    /// ψ(x) = θ (s - x)^+ + (1 - θ)(r - x)^+.
    pub fn psi(&self, x: f64) -> f64 {
        self.theta * (self.strike_high - x).max(0.0)
            + (1.0 - self.theta) * (self.strike_low - x).max(0.0)
    }

    pub fn kinks(&self) -> Vec<(f64, f64)> {
        vec![
            (self.strike_low, 1.0 - self.theta),
            (self.strike_high, self.theta),
        ]
    }
}

/// Shape of the exercise-indifference profile across pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    /// Λ̄ vanishes on a piece, or crosses zero inside one atom of μ.
    Root,
    AlwaysNegative,
    AlwaysPositive,
    /// Λ̄ changes sign without attaining zero, across distinct atoms.
    Jump,
}

impl Archetype {
    pub fn as_str(&self) -> &'static str {
        match self {
            Archetype::Root => "root",
            Archetype::AlwaysNegative => "always-negative",
            Archetype::AlwaysPositive => "always-positive",
            Archetype::Jump => "jump",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UStar {
    pub archetype: Archetype,
    pub u_star: Option<f64>,
}

fn immediate(piece: &crate::curtain::Piece, k: PutPair) -> f64 {
    (k.k1 - piece.g).max(0.0)
}

fn continuation(piece: &crate::curtain::Piece, k: PutPair) -> f64 {
    if piece.s - piece.g <= MERGE_TOL {
        (k.k2 - piece.g).max(0.0)
    } else {
        let down = piece.down_weight();
        (k.k2 - piece.r).max(0.0) * down + (k.k2 - piece.s).max(0.0) * (1.0 - down)
    }
}

/// Optimal stopping value: each piece independently takes the better of
/// exercising at the first date or continuing to the second. Ties exercise.
pub fn model_price(triple: &CouplingTriple, k: PutPair) -> Result<(f64, Vec<bool>)> {
    triple.require_certified()?;
    let mut price = 0.0;
    let mut decisions = Vec::with_capacity(triple.pieces.len());
    for piece in &triple.pieces {
        let imm = immediate(piece, k);
        let cont = continuation(piece, k);
        decisions.push(imm >= cont);
        price += piece.len() * imm.max(cont);
    }
    Ok((price, decisions))
}

/// Value A(u) of the threshold rule "exercise iff U ≤ u" at every piece
/// breakpoint. Piecewise linear in u; its maximum equals the model price
/// exactly when the per-piece decisions are monotone, and never exceeds it.
pub fn threshold_profile(triple: &CouplingTriple, k: PutPair) -> Result<Vec<(f64, f64)>> {
    triple.require_certified()?;
    let mut profile = Vec::with_capacity(triple.pieces.len() + 1);
    let mut tail: f64 = triple
        .pieces
        .iter()
        .map(|p| p.len() * continuation(p, k))
        .sum();
    let mut head = 0.0;
    profile.push((0.0, tail));
    for piece in &triple.pieces {
        head += piece.len() * immediate(piece, k);
        tail -= piece.len() * continuation(piece, k);
        profile.push((piece.u_hi, head + tail));
    }
    Ok(profile)
}

/// Λ̄(u): difference of the chord slopes joining (R, K2 - R), (G, K1 - G) and
/// (S, 0); positive values favour exercising the marginal path at the first
/// date. Total by convention outside the chord domain: a spread capped by K1
/// returns +∞, a worthless first date or worthless continuation returns -∞.
pub fn lambda_bar(triple: &CouplingTriple, k: PutPair, u: f64) -> f64 {
    lambda_bar_piece(triple.piece_at(u), k)
}

fn lambda_bar_piece(piece: &crate::curtain::Piece, k: PutPair) -> f64 {
    let (r, g, s) = (piece.r, piece.g, piece.s);
    if s <= k.k1 {
        return f64::INFINITY;
    }
    if g >= k.k1 {
        return f64::NEG_INFINITY;
    }
    if r >= k.k2 {
        return f64::NEG_INFINITY;
    }
    if g - r <= MERGE_TOL {
        return f64::INFINITY;
    }
    (k.k1 - g) / (s - g) - ((k.k2 - r) - (k.k1 - g)) / (g - r)
}

/// Zero tolerance for declaring Λ̄ = 0 attained on a piece.
const ROOT_TOL: f64 = 1e-10;

fn root_domain_valid(piece: &crate::curtain::Piece, k: PutPair) -> bool {
    piece.r < k.k2 && piece.g < k.k1 && k.k1 < piece.s
}

/// Locates the exercise threshold.
///
/// A piece on which Λ̄ vanishes (within tolerance, with a valid chord domain)
/// gives archetype `Root` with u* at its upper boundary. Otherwise the first
/// transition from Λ̄ ≥ 0 to Λ̄ < 0 is a `Root` when it happens inside one
/// atom of μ with a finite left value, and a `Jump` when the sign change
/// skips zero across atoms. Profiles without such a transition are
/// `AlwaysPositive` or `AlwaysNegative`.
pub fn find_ustar(triple: &CouplingTriple, k: PutPair) -> Result<UStar> {
    triple.require_certified()?;
    let lambdas: Vec<f64> = triple
        .pieces
        .iter()
        .map(|p| lambda_bar_piece(p, k))
        .collect();

    for (piece, lam) in triple.pieces.iter().zip(&lambdas) {
        if lam.is_finite() && lam.abs() <= ROOT_TOL && root_domain_valid(piece, k) {
            return Ok(UStar {
                archetype: Archetype::Root,
                u_star: Some(piece.u_hi),
            });
        }
    }

    for i in 0..lambdas.len().saturating_sub(1) {
        if lambdas[i] >= 0.0 && lambdas[i + 1] < 0.0 {
            let same_atom = (triple.pieces[i].g - triple.pieces[i + 1].g).abs() <= MERGE_TOL;
            let archetype = if same_atom
                && lambdas[i].is_finite()
                && root_domain_valid(&triple.pieces[i], k)
            {
                Archetype::Root
            } else {
                Archetype::Jump
            };
            return Ok(UStar {
                archetype,
                u_star: Some(triple.pieces[i].u_hi),
            });
        }
    }

    if lambdas.iter().all(|l| *l < 0.0) {
        return Ok(UStar {
            archetype: Archetype::AlwaysNegative,
            u_star: None,
        });
    }
    if lambdas.iter().all(|l| *l >= 0.0) {
        return Ok(UStar {
            archetype: Archetype::AlwaysPositive,
            u_star: None,
        });
    }
    // Mixed signs with only upward transitions: no threshold structure.
    let boundary = lambdas
        .iter()
        .zip(triple.pieces.iter())
        .find(|(l, _)| **l >= 0.0)
        .map(|(_, p)| p.u_lo);
    Ok(UStar {
        archetype: Archetype::Jump,
        u_star: boundary,
    })
}

/// Builds the two-put superhedge from the left limits (R*, G*, S*) at u*:
/// θ = (K1 - G*)/(S* - G*) with strikes R* and S*. The portfolio touches the
/// first-date intrinsic value at G* and, at an exact root, the maturity put
/// at R*; domination is verified when pricing it.
pub fn build_hedge(triple: &CouplingTriple, k: PutPair, u_star: f64) -> Result<HedgePortfolio> {
    let piece = triple.piece_at(u_star);
    if !root_domain_valid(piece, k) {
        return Err(Error::NoTwoPutHedge(format!(
            "piece at {u_star} has no valid chord domain"
        )));
    }
    let theta = (k.k1 - piece.g) / (piece.s - piece.g);
    let mut hedge = HedgePortfolio {
        theta,
        strike_low: piece.r,
        strike_high: piece.s,
        cost: f64::NAN,
    };
    hedge.cost = dual_price(&triple.mu, &triple.nu, k, &hedge.kinks())?;
    Ok(hedge)
}

/// Slack allowed when checking that ψ dominates the maturity put.
const DOMINATION_TOL: f64 = 1e-9;

/// Dual cost of a static put portfolio ψ given as (strike, weight) pairs:
/// E_μ[((K1 - x)^+ - ψ(x))^+] + E_ν[ψ(y)].
///
/// Errors unless ψ dominates (K2 - ·)^+; by piecewise linearity it is enough
/// to check the kinks of both sides and a total weight of at least one.
pub fn dual_price(
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    k: PutPair,
    psi_kinks: &[(f64, f64)],
) -> Result<f64> {
    for &(strike, weight) in psi_kinks {
        if weight < -MERGE_TOL || !strike.is_finite() {
            return Err(Error::NotSuperhedge {
                at: strike,
                shortfall: weight,
            });
        }
    }
    let total_weight: f64 = psi_kinks.iter().map(|(_, w)| w).sum();
    if total_weight < 1.0 - DOMINATION_TOL {
        return Err(Error::NotSuperhedge {
            at: f64::NEG_INFINITY,
            shortfall: 1.0 - total_weight,
        });
    }
    let psi = |x: f64| -> f64 {
        psi_kinks
            .iter()
            .map(|&(strike, weight)| weight * (strike - x).max(0.0))
            .sum()
    };
    for &(x, _) in psi_kinks.iter().chain([(k.k2, 0.0)].iter()) {
        let shortfall = (k.k2 - x).max(0.0) - psi(x);
        if shortfall > DOMINATION_TOL {
            return Err(Error::NotSuperhedge { at: x, shortfall });
        }
    }

    let phi_leg: f64 = mu
        .atoms()
        .iter()
        .map(|a| a.mass * ((k.k1 - a.position).max(0.0) - psi(a.position)).max(0.0))
        .sum();
    let psi_leg: f64 = nu.atoms().iter().map(|a| a.mass * psi(a.position)).sum();
    Ok(phi_leg + psi_leg)
}

/// Cheapest feasible member of the two-put family with θ fixed by the
/// first-date touching condition θ = (K1 - g)/(s - g), over candidate strike
/// pairs drawn from the atom positions of both marginals. The plain maturity
/// put is always included, so the search cannot come back empty.
pub fn dual_search(
    mu: &AtomicMeasure,
    nu: &AtomicMeasure,
    k: PutPair,
    extra: &[HedgePortfolio],
) -> Result<HedgePortfolio> {
    let mut positions: Vec<f64> = mu
        .atoms()
        .iter()
        .chain(nu.atoms().iter())
        .map(|a| a.position)
        .collect();
    positions.sort_by(f64::total_cmp);
    positions.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);

    // The maturity leg collapses to put-function values at the strikes, so
    // each candidate prices in O(|mu|) after this precomputation.
    let put_nu = crate::measures::PutFunction::of(nu);
    let price_two_put = |h: &HedgePortfolio| -> Option<f64> {
        let psi_r = h.psi(h.strike_low);
        if (k.k2 - h.strike_low).max(0.0) - psi_r > DOMINATION_TOL
            || (k.k2 - h.strike_high).max(0.0) - h.psi(h.strike_high) > DOMINATION_TOL
        {
            return None;
        }
        let psi_leg =
            h.theta * put_nu.eval(h.strike_high) + (1.0 - h.theta) * put_nu.eval(h.strike_low);
        let phi_leg: f64 = mu
            .atoms()
            .iter()
            .map(|a| a.mass * ((k.k1 - a.position).max(0.0) - h.psi(a.position)).max(0.0))
            .sum();
        Some(phi_leg + psi_leg)
    };

    let mut best = HedgePortfolio {
        theta: 1.0,
        strike_low: k.k2,
        strike_high: k.k2,
        cost: dual_price(mu, nu, k, &[(k.k2, 1.0)])?,
    };

    for candidate in extra {
        if let Some(cost) = price_two_put(candidate) {
            if cost < best.cost {
                best = HedgePortfolio {
                    cost,
                    ..candidate.clone()
                };
            }
        }
    }
    for g in mu.atoms().iter().map(|a| a.position).filter(|g| *g < k.k1) {
        for &s in positions.iter().filter(|&&s| s > k.k1 && s > g) {
            let theta = (k.k1 - g) / (s - g);
            if !(0.0..=1.0).contains(&theta) {
                continue;
            }
            for &r in positions.iter().filter(|&&r| r < s) {
                let mut candidate = HedgePortfolio {
                    theta,
                    strike_low: r,
                    strike_high: s,
                    cost: f64::NAN,
                };
                if let Some(cost) = price_two_put(&candidate) {
                    if cost < best.cost {
                        candidate.cost = cost;
                        best = candidate;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Price bound when the first marginal is a point mass and the filtration
/// carries no first-date information: the better of exercising everything
/// immediately or holding everything to maturity.
pub fn bhz_price_trivial(w: f64, nu: &AtomicMeasure, k: PutPair) -> f64 {
    let hold: f64 = nu
        .atoms()
        .iter()
        .map(|a| a.mass * (k.k2 - a.position).max(0.0))
        .sum();
    (k.k1 - w).max(0.0).max(hold)
}

/// Full pricing report: primal model price, exercise decisions, threshold
/// archetype, best known dual bound and the matching hedge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceReport {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub u_star: Option<f64>,
    pub archetype: String,
    pub hedge: HedgePortfolio,
    pub bhz: Option<f64>,
    pub decisions: Vec<bool>,
}

pub fn price_report(triple: &CouplingTriple, k: PutPair) -> Result<PriceReport> {
    let (primal, decisions) = model_price(triple, k)?;
    let ustar = find_ustar(triple, k)?;

    // One-sided limits at the sign change seed the search in jump cases.
    let mut extra: Vec<HedgePortfolio> = Vec::new();
    if let Some(u) = ustar.u_star {
        for candidate_u in [u, (u + 1e-9).min(1.0)] {
            let piece = triple.piece_at(candidate_u);
            if root_domain_valid(piece, k) {
                extra.push(HedgePortfolio {
                    theta: (k.k1 - piece.g) / (piece.s - piece.g),
                    strike_low: piece.r,
                    strike_high: piece.s,
                    cost: f64::NAN,
                });
            }
        }
    }
    let mut hedge = dual_search(&triple.mu, &triple.nu, k, &extra)?;
    if ustar.archetype == Archetype::Root {
        if let Ok(two_put) = build_hedge(triple, k, ustar.u_star.unwrap()) {
            if two_put.cost < hedge.cost {
                hedge = two_put;
            }
        }
    }

    let bhz = (triple.mu.len() == 1)
        .then(|| bhz_price_trivial(triple.mu.atoms()[0].position, &triple.nu, k));

    Ok(PriceReport {
        primal,
        dual: hedge.cost,
        gap: hedge.cost - primal,
        u_star: ustar.u_star,
        archetype: ustar.archetype.as_str().to_string(),
        hedge,
        bhz,
        decisions,
    })
}
