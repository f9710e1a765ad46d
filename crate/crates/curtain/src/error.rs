//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by measure algebra, coupling construction and pricing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty measure")]
    EmptyMeasure,

    #[error("non-finite value in measure: ({position}, {mass})")]
    NonFinite { position: f64, mass: f64 },

    #[error("negative mass {mass} at position {position}")]
    NegativeMass { position: f64, mass: f64 },

    #[error("total mass {0} exceeds 1")]
    MassExceedsOne(f64),

    #[error("expected a probability measure, total mass is {0}")]
    NotProbability(f64),

    #[error("quantile argument {0} outside (0,1)")]
    QuantileDomain(f64),

    #[error("not dominated: subtrahend exceeds measure at position {position} by {excess}")]
    NotDominated { position: f64, excess: f64 },

    #[error("non-integrable source: bin {bin} has non-finite mean")]
    NonIntegrable { bin: usize },

    #[error("target exhausted above {w}: no kink and no atom at the base point")]
    ExhaustedAbove { w: f64 },

    #[error("target exhausted below {w}: no kink below the base point")]
    ExhaustedBelow { w: f64 },

    #[error("tangent infimum from ({w}, {p}) not attained at any kink")]
    UnattainedTangent { w: f64, p: f64 },

    #[error("atom too heavy: weight {weight} exceeds upsilon(0) = {capacity}")]
    AtomTooHeavy { weight: f64, capacity: f64 },

    #[error("degenerate boundary system at spread [{lower}, {upper}]")]
    DegenerateBoundary { lower: f64, upper: f64 },

    #[error("marginals not in convex order")]
    NotConvexOrder,

    #[error("embedding of atom {index} at {position} failed: {source}")]
    AtomEmbedding {
        index: usize,
        position: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("coupling triple is not certified: {0}")]
    Uncertified(String),

    #[error("strikes violate K2 < K1: K1 = {k1}, K2 = {k2}")]
    StrikeOrder { k1: f64, k2: f64 },

    #[error("no two-put hedge; use dual_search (archetype {0})")]
    NoTwoPutHedge(String),

    #[error("not a superhedge: psi fails to dominate the maturity put at x = {at} by {shortfall}")]
    NotSuperhedge { at: f64, shortfall: f64 },

    #[error("BHZ implemented for point-mass initial law only")]
    BhzNonTrivial,

    #[error("unbalanced transport problem: masses {0} vs {1}")]
    UnbalancedTransport(f64, f64),

    #[error("transport simplex stalled before optimality")]
    TransportStalled,
}

pub type Result<T> = std::result::Result<T, Error>;
