//! Left-curtain martingale couplings of atomic marginals, and the robust
//! two-exercise-date American put bounds they induce.
//!
//! Given probability measures `μ ≤cx ν` on the line, the library constructs
//! the generalized left-curtain martingale coupling as an exact
//! piecewise-constant triple `(R, G, S)` on `(0, 1]`: `X = G(U)` is the
//! quantile map of `μ`, and `Y ∈ {R(U), S(U)}` splits conditionally so that
//! `(X, Y)` is a martingale with `Y ~ ν`. Initial laws with atoms are first
//! class; the construction embeds the atoms of `μ` lowest-first into
//! successive residuals of `ν` via tangent lines to the put function of the
//! target.
//!
//! On top of the coupling the crate computes the model price of an American
//! put with strikes `K2 < K1` exercisable at the two dates, the matching
//! two-put static superhedge, and the dual upper bound, along with envelope
//! and convergence diagnostics for refining discretizations.
//!
//! Entry points:
//!
//! - [`measures::AtomicMeasure`] — measure algebra, quantiles, convex order.
//! - [`curtain::build_left_curtain`] — the coupling triple plus certification.
//! - [`coupling`] — joint law, transport cost, seeded sampling.
//! - [`american_put`] — pricing, exercise threshold, superhedges.
//! - [`limits`] — envelope bounds and refinement probes.
//!
//! The `examples/` directory has one runnable program per capability; the
//! thin `curtain` binary exposes the same operations for batch use.

pub mod american_put;
pub mod cli;
pub mod coupling;
pub mod curtain;
pub mod error;
pub mod limits;
pub mod measures;
pub mod single_atom;
pub mod wasserstein;


pub use crate::curtain::{build_left_curtain, CouplingTriple};
pub use crate::error::{Error, Result};
pub use crate::measures::{discretize, discretize_samples, AtomicMeasure, MeasureSpec, PutFunction};
