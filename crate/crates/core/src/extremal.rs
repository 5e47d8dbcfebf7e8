//! The equality-achieving two-point constructions for both bounds.
//!
//! Each construction places mass so that Z lands either strictly below T
//! or exactly on T, which makes P(Z < T) hit the corresponding bound with
//! equality. In rational mode the exact engine reproduces the closed
//! forms literally, which is what [`verify_extremal_equality`] checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{samuels_term, BoundsError};
use crate::exact::{exact_prob_below_budgeted, ExactError, DEFAULT_LEAF_BUDGET};
use crate::model::{DeltaThreshold, DiscreteVar, Instance, ModelError, WeightVector};
use crate::numeric::{BigRational, Scalar};

#[derive(Error, Debug)]
pub enum ExtremalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// X_1 two-point at {0, (δ+M)/M} with P(X_1 = (δ+M)/M) = M/(δ+M); all
/// other variables constant 1. Then P(Z < T) = δ/(δ+M).
pub fn feige_extremal<R: Scalar>(
    w: &WeightVector<R>,
    d: &DeltaThreshold<R>,
) -> Result<Instance<R>, ExtremalError> {
    let m = w.max_weight().clone();
    let delta_plus_m = d.delta().clone() + m.clone();
    let x1 = DiscreteVar::new(vec![
        (R::zero(), d.delta().clone() / delta_plus_m.clone()),
        (delta_plus_m.clone() / m.clone(), m / delta_plus_m),
    ])?;
    let mut vars = vec![x1];
    for _ in 1..w.n() {
        vars.push(DiscreteVar::constant_one());
    }
    Ok(Instance::new(w.clone(), vars)?)
}

/// For a 1-based prefix length i: X_j two-point at {0, (σ_i+δ)/μ_j} with
/// P(X_j = 0) = 1 − μ_j/(σ_i+δ) for j ≤ i, and X_j ≡ 1 beyond. Then
/// P(Z < T) equals the i-th prefix product exactly: the only point of the
/// support below T is the all-zeros assignment, and any single non-zero
/// coordinate already lifts Z to exactly T.
pub fn samuels_extremal<R: Scalar>(
    w: &WeightVector<R>,
    d: &DeltaThreshold<R>,
    prefix_len: usize,
) -> Result<Instance<R>, ExtremalError> {
    if prefix_len == 0 || prefix_len > w.n() {
        return Err(ExtremalError::Bounds(BoundsError::IndexOutOfRange {
            prefix_len,
            n: w.n(),
        }));
    }
    let reach = w.prefix_sum(prefix_len).clone() + d.delta().clone(); // σ_i + δ
    let mut vars = Vec::with_capacity(w.n());
    for mu in &w.weights()[..prefix_len] {
        let hit = mu.clone() / reach.clone();
        // hit < 1 since μ_j ≤ σ_i and δ > 0, so the two-point var never
        // degenerates.
        debug_assert!(hit < R::one());
        vars.push(DiscreteVar::new(vec![
            (R::zero(), R::one() - hit.clone()),
            (reach.clone() / mu.clone(), hit),
        ])?);
    }
    for _ in prefix_len..w.n() {
        vars.push(DiscreteVar::constant_one());
    }
    Ok(Instance::new(w.clone(), vars)?)
}

/// Uniform weights 1/n with iid X ∈ {0, n(1+δ)}, P(X = n(1+δ)) =
/// 1/(n(1+δ)). Then P(Z < T) = (1 − 1/(n(1+δ)))^n.
pub fn iid_extremal<R: Scalar>(
    n: usize,
    d: &DeltaThreshold<R>,
) -> Result<Instance<R>, ExtremalError> {
    let w = WeightVector::uniform(n)?;
    let top = R::from_usize(n) * d.threshold().clone();
    let hit = R::one() / top.clone();
    let x = DiscreteVar::new(vec![(R::zero(), R::one() - hit.clone()), (top, hit)])?;
    let vars = vec![x; n];
    Ok(Instance::new(w, vars)?)
}

/// n → ∞ limit of (1 − 1/(n(1+δ)))^n, namely e^{−1/(1+δ)}. As δ → 0 this
/// tends to 1/e, which is why no constant larger than 1/e can work.
pub fn iid_limit(d: &DeltaThreshold<f64>) -> f64 {
    (-1.0 / d.threshold()).exp()
}

/// One comparison of an exact enumeration against a closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityEntry {
    pub label: String,
    /// Prefix length for the per-index cases; absent for the feige case.
    pub index: Option<usize>,
    pub expected: String,
    pub actual: String,
    pub equal: bool,
}

/// Per-index equality results plus the δ/(δ+M) case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub entries: Vec<EqualityEntry>,
    pub all_equal: bool,
}

/// Rational-mode check that the exact engine reproduces every equality
/// case: for each i, P(Z < T) of the prefix construction equals the i-th
/// prefix product as exact rationals, and the feige construction yields
/// exactly δ/(δ+M).
pub fn verify_extremal_equality(
    w: &WeightVector<BigRational>,
    d: &DeltaThreshold<BigRational>,
) -> Result<EqualityReport, ExtremalError> {
    let mut entries = Vec::with_capacity(w.n() + 1);
    for prefix_len in 1..=w.n() {
        let inst = samuels_extremal(w, d, prefix_len)?;
        let actual = exact_prob_below_budgeted(&inst, d, DEFAULT_LEAF_BUDGET)?.prob_below;
        let expected = samuels_term(w, d, prefix_len)?;
        entries.push(EqualityEntry {
            label: format!("samuels i={prefix_len}"),
            index: Some(prefix_len),
            equal: actual == expected,
            expected: expected.render_text(),
            actual: actual.render_text(),
        });
    }
    let inst = feige_extremal(w, d)?;
    let actual = exact_prob_below_budgeted(&inst, d, DEFAULT_LEAF_BUDGET)?.prob_below;
    let m = w.max_weight().clone();
    let expected = d.delta().clone() / (d.delta().clone() + m);
    entries.push(EqualityEntry {
        label: "feige".to_owned(),
        index: None,
        equal: actual == expected,
        expected: expected.render_text(),
        actual: actual.render_text(),
    });
    let all_equal = entries.iter().all(|e| e.equal);
    Ok(EqualityReport { entries, all_equal })
}
