//! The two conjectured lower bounds on P(Z < 1+δ) and the inequality
//! chain connecting them.
//!
//! For weights μ_1 ≥ … ≥ μ_n with prefix sums σ_i and slack δ:
//!
//! * the prefix-product (Samuels) bound is
//!   min over i of Π_{j≤i} (1 − μ_j/(σ_i + δ)); the denominator is
//!   evaluated as σ_i + δ rather than T − Σ_{k>i} μ_k, which is the same
//!   number without the cancellation when σ_i is tiny;
//! * the coarser (Feige) bound is min(δ/(δ + M), 1/e) with M = μ_1.
//!
//! [`implication_margin`] reports their difference, which is claimed
//! non-negative for every valid input. [`proof_chain`] re-derives that
//! claim in four checkable steps at the minimizing index i*, each a
//! `(lhs, rhs, margin)` triple in log space:
//!
//! 1. `sum-identity` — log of the product equals Σ (μ_j/σ)·Φ(μ_j/σ, δ/σ),
//!    an algebraic identity (margin ≈ 0);
//! 2. `phi-monotone` — that sum is at least Φ(M/σ, δ/σ), since Φ is
//!    decreasing in its first argument and the weights μ_j/σ sum to one;
//! 3. `concavity-min` — Φ(M/σ, δ/σ) is at least
//!    min(Φ(1, δ/M), Φ(M, δ)), by concavity of t ↦ Φ(t, αt) on the ray
//!    α = δ/M (the minimum over the slice sits at an endpoint);
//! 4. `lemma3-floor` — that minimum is at least log(min(δ/(δ+M), 1/e)),
//!    the log of the coarser bound (note Φ(1, δ/M) = log(δ/(δ+M))
//!    exactly).

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::model::{DeltaThreshold, WeightVector};
use crate::numeric::Scalar;
use crate::phi::{phi, PhiPoint, INV_E};

/// Above this prefix length, float-mode products go through summed logs
/// to dodge underflow.
const DIRECT_PRODUCT_MAX_LEN: usize = 32;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum BoundsError {
    #[error("prefix length {prefix_len} outside 1..={n}")]
    IndexOutOfRange { prefix_len: usize, n: usize },
    #[error("max weight {0} outside (0, 1]")]
    MaxWeightOutOfRange(f64),
}

/// Both bounds at one input, with the per-index terms behind the min.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samuels: f64,
    /// 1-based index of the smallest minimizing prefix.
    pub argmin_index: usize,
    pub feige: f64,
    /// samuels − feige; claimed ≥ 0 everywhere.
    pub implication_margin: f64,
    pub per_index_terms: Vec<f64>,
}

/// Labels for the four chain steps, fixed identifiers in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainStepLabel {
    SumIdentity,
    PhiMonotone,
    ConcavityMin,
    Lemma3Floor,
}

impl ChainStepLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainStepLabel::SumIdentity => "sum-identity",
            ChainStepLabel::PhiMonotone => "phi-monotone",
            ChainStepLabel::ConcavityMin => "concavity-min",
            ChainStepLabel::Lemma3Floor => "lemma3-floor",
        }
    }
}

impl fmt::Display for ChainStepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub label: ChainStepLabel,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs.
    pub margin: f64,
}

/// The evaluated inequality chain at the minimizing prefix index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// σ_{i*}, the prefix sum at the minimizing index.
    pub sigma_star: f64,
    pub argmin_index: usize,
    pub steps: Vec<ChainStep>,
}

/// The i-th candidate bound Π_{j≤i} (1 − μ_j/(σ_i + δ)) for a 1-based
/// prefix length. Always in (0, 1) since μ_j ≤ σ_i < σ_i + δ.
pub fn samuels_term<R: Scalar>(
    w: &WeightVector<R>,
    d: &DeltaThreshold<R>,
    prefix_len: usize,
) -> Result<R, BoundsError> {
    if prefix_len == 0 || prefix_len > w.n() {
        return Err(BoundsError::IndexOutOfRange {
            prefix_len,
            n: w.n(),
        });
    }
    let denom = w.prefix_sum(prefix_len).clone() + d.delta().clone();
    let factors = w.weights()[..prefix_len]
        .iter()
        .map(|mu| R::one() - mu.clone() / denom.clone());
    if R::EXACT || prefix_len <= DIRECT_PRODUCT_MAX_LEN {
        Ok(factors.fold(R::one(), |acc, f| acc * f))
    } else {
        let log_sum: f64 = factors.map(|f| f.to_f64().ln()).sum();
        Ok(R::from_f64_lossy(log_sum.exp()))
    }
}

/// All candidate terms, index i at position i−1.
pub fn samuels_terms<R: Scalar>(w: &WeightVector<R>, d: &DeltaThreshold<R>) -> Vec<R> {
    (1..=w.n())
        .map(|i| samuels_term(w, d, i).expect("prefix length in range"))
        .collect()
}

/// The prefix-product bound: minimum term and the smallest 1-based index
/// attaining it.
pub fn samuels_bound<R: Scalar>(w: &WeightVector<R>, d: &DeltaThreshold<R>) -> (R, usize) {
    let terms = samuels_terms(w, d);
    let mut best = 0usize;
    for (k, term) in terms.iter().enumerate().skip(1) {
        if *term < terms[best] {
            best = k;
        }
    }
    (terms[best].clone(), best + 1)
}

/// min(δ/(δ + M), 1/e) for the largest weight M ∈ (0, 1].
pub fn feige_bound(max_weight: f64, d: &DeltaThreshold<f64>) -> Result<f64, BoundsError> {
    if !max_weight.is_finite() || max_weight <= 0.0 || max_weight > 1.0 {
        return Err(BoundsError::MaxWeightOutOfRange(max_weight));
    }
    let delta = *d.delta();
    Ok((delta / (delta + max_weight)).min(INV_E))
}

/// Evaluates both bounds and their difference.
pub fn implication_margin(w: &WeightVector<f64>, d: &DeltaThreshold<f64>) -> BoundReport {
    let per_index_terms = samuels_terms(w, d);
    let mut argmin = 0usize;
    for (k, term) in per_index_terms.iter().enumerate().skip(1) {
        if *term < per_index_terms[argmin] {
            argmin = k;
        }
    }
    let samuels = per_index_terms[argmin];
    let feige = feige_bound(*w.max_weight(), d).expect("validated weights have M in (0,1]");
    BoundReport {
        samuels,
        argmin_index: argmin + 1,
        feige,
        implication_margin: samuels - feige,
        per_index_terms,
    }
}

/// Evaluates the four-step chain at the minimizing prefix index.
pub fn proof_chain(w: &WeightVector<f64>, d: &DeltaThreshold<f64>) -> ChainReport {
    let (samuels, argmin_index) = samuels_bound(w, d);
    let sigma = *w.prefix_sum(argmin_index);
    let delta = *d.delta();
    let m = *w.max_weight();
    let rho = delta / sigma;

    let log_product = samuels.ln();
    let mut weighted_sum = 0.0;
    for mu in &w.weights()[..argmin_index] {
        // μ_j/σ ≤ 1 in exact arithmetic; clamp the last ulp of rounding.
        let ratio = (mu / sigma).min(1.0);
        weighted_sum += ratio * phi(PhiPoint::new(ratio, rho).expect("ratio in [0,1], rho > 0"));
    }
    let phi_at_max = phi(PhiPoint::new((m / sigma).min(1.0), rho).expect("M/σ in (0,1]"));
    let endpoint_min = phi(PhiPoint::new(1.0, delta / m).expect("δ/M > 0"))
        .min(phi(PhiPoint::new(m, delta).expect("M in (0,1], δ > 0")));
    let feige = feige_bound(m, d).expect("validated weights have M in (0,1]");
    let log_floor = feige.ln();

    let steps = vec![
        step(ChainStepLabel::SumIdentity, log_product, weighted_sum),
        step(ChainStepLabel::PhiMonotone, weighted_sum, phi_at_max),
        step(ChainStepLabel::ConcavityMin, phi_at_max, endpoint_min),
        step(ChainStepLabel::Lemma3Floor, endpoint_min, log_floor),
    ];
    ChainReport {
        sigma_star: sigma,
        argmin_index,
        steps,
    }
}

fn step(label: ChainStepLabel, lhs: f64, rhs: f64) -> ChainStep {
    ChainStep {
        label,
        lhs,
        rhs,
        margin: lhs - rhs,
    }
}
