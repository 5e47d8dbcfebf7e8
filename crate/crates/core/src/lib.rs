//! Lower-bound toolkit for small-deviation probabilities of weighted sums
//! of independent unit-mean non-negative random variables.
//!
//! Given positive weights μ_1 ≥ … ≥ μ_n summing to one and a slack δ > 0,
//! the quantity of interest is P(Z < 1 + δ) where Z = Σ μ_i X_i for
//! independent X_i ≥ 0 with E X_i = 1. The crate evaluates and
//! stress-tests two conjectured lower bounds on that probability:
//!
//! * the Samuels bound, a minimum over prefix products
//!   min_i Π_{j≤i} (1 − μ_j/(σ_i + δ)), and
//! * the Feige bound, min(δ/(δ + M), 1/e) with M = μ_1,
//!
//! together with the inequality chain showing the first dominates the
//! second.
//!
//! Modules:
//!
//! * [`model`] — validated value objects in two numeric modes (exact
//!   rational and `f64`); JSON interchange lives in [`schema`].
//! * [`bounds`] — both bounds plus the four-step inequality chain,
//!   reported as signed margins.
//! * [`phi`] — the Φ function and the auxiliary inequalities behind the
//!   chain.
//! * [`exact`] — exact enumeration of P(Z < T) over finite supports, with
//!   a seeded Monte Carlo cross-check.
//! * [`extremal`] — the equality-achieving two-point constructions.
//! * [`explorer`] — randomized sweeps and a derivative-free search for
//!   counterexamples within the two-point family.
//!
//! ```
//! use smalldev_core::bounds;
//! use smalldev_core::model::{DeltaThreshold, WeightVector};
//!
//! let w = WeightVector::<f64>::new(vec![0.6, 0.4]).unwrap();
//! let d = DeltaThreshold::new(0.5).unwrap();
//! let report = bounds::implication_margin(&w, &d);
//! assert!((report.samuels - 0.44).abs() < 1e-12);
//! assert!(report.implication_margin >= -1e-12);
//! ```

pub mod bounds;
pub mod exact;
pub mod explorer;
pub mod extremal;
pub mod model;
pub mod numeric;
pub mod phi;
pub mod schema;

pub use numeric::{Mode, Scalar};
