//! Exact P(Z < T) for finite-support instances, plus a seeded Monte
//! Carlo estimator used as an independent cross-check.
//!
//! The enumerator walks the product support depth-first, variables in
//! weight-descending order and atoms in value-descending order, so the
//! combinations that exceed T die earliest. A branch is cut as soon as
//! the partial weighted sum plus the smallest possible completion is
//! strictly above T: everything below it lands on the ≥ T side, and none
//! of it can sit exactly at T, so the threshold accounting stays exact.
//!
//! Mass landing exactly on T is never folded into either side silently:
//! it is returned separately in `atoms_at_threshold`. "Exactly" means
//! exact equality in rational mode and |z − T| ≤ 1e-12 in float mode;
//! every equality-achieving construction puts an atom of Z precisely at
//! T, so this band is what keeps float-mode runs honest about
//! strictness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DeltaThreshold, Instance};
use crate::numeric::Scalar;

/// Default cap on enumerated leaves.
pub const DEFAULT_LEAF_BUDGET: u64 = 1 << 24;

/// Float-mode snapping band around T; mass within it is reported as
/// sitting at the threshold.
pub const THRESHOLD_BAND: f64 = 1e-12;

const WILSON_Z_95: f64 = 1.96;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ExactError {
    #[error("support size {support} exceeds budget {budget}")]
    BudgetExceeded { support: u64, budget: u64 },
    #[error("need at least 100 samples, got {0}")]
    TooFewSamples(u64),
}

/// Outcome of an exact enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbResult<R> {
    /// P(Z < T), excluding threshold mass.
    pub prob_below: R,
    /// Mass with Z exactly at T (within the float-mode band).
    pub atoms_at_threshold: R,
    /// Leaves actually visited.
    pub enumerated_count: u64,
    /// Branches cut by the ≥ T bound.
    pub pruned_count: u64,
}

/// Monte Carlo estimate of P(Z < T).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    pub half_width_95: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Π |atoms(X_i)|, saturating at `u64::MAX`.
pub fn support_size<R: Scalar>(inst: &Instance<R>) -> u64 {
    inst.vars().iter().fold(1u64, |acc, v| {
        acc.saturating_mul(v.atoms().len() as u64)
    })
}

/// Exact P(Z < T) under the default leaf budget.
pub fn exact_prob_below<R: Scalar>(
    inst: &Instance<R>,
    d: &DeltaThreshold<R>,
) -> Result<ProbResult<R>, ExactError> {
    exact_prob_below_budgeted(inst, d, DEFAULT_LEAF_BUDGET)
}

/// Exact P(Z < T) with an explicit leaf budget.
pub fn exact_prob_below_budgeted<R: Scalar>(
    inst: &Instance<R>,
    d: &DeltaThreshold<R>,
    budget: u64,
) -> Result<ProbResult<R>, ExactError> {
    let support = support_size(inst);
    if support > budget {
        return Err(ExactError::BudgetExceeded { support, budget });
    }

    let n = inst.n();
    // suffix_min[k] = Σ_{j ≥ k} μ_j · min(X_j); the cheapest completion
    // from depth k.
    let mut suffix_min = vec![R::zero(); n + 1];
    for k in (0..n).rev() {
        suffix_min[k] = suffix_min[k + 1].clone()
            + inst.weights().weights()[k].clone() * inst.vars()[k].min_value().clone();
    }

    let mut walker = Walker {
        inst,
        threshold: d.threshold(),
        suffix_min,
        below: R::zero(),
        at: R::zero(),
        enumerated: 0,
        pruned: 0,
    };
    walker.walk(0, R::zero(), R::one());
    Ok(ProbResult {
        prob_below: walker.below,
        atoms_at_threshold: walker.at,
        enumerated_count: walker.enumerated,
        pruned_count: walker.pruned,
    })
}

struct Walker<'a, R: Scalar> {
    inst: &'a Instance<R>,
    threshold: &'a R,
    suffix_min: Vec<R>,
    below: R,
    at: R,
    enumerated: u64,
    pruned: u64,
}

impl<R: Scalar> Walker<'_, R> {
    fn walk(&mut self, depth: usize, partial: R, prob: R) {
        let floor = partial.clone() + self.suffix_min[depth].clone();
        if definitely_above(&floor, self.threshold) {
            self.pruned += 1;
            return;
        }
        if depth == self.inst.n() {
            self.enumerated += 1;
            match classify(&partial, self.threshold) {
                Side::Below => self.below = self.below.clone() + prob,
                Side::At => self.at = self.at.clone() + prob,
                Side::Above => {}
            }
            return;
        }
        let weight = &self.inst.weights().weights()[depth];
        for atom in self.inst.vars()[depth].atoms() {
            let z = partial.clone() + weight.clone() * atom.value.clone();
            self.walk(depth + 1, z, prob.clone() * atom.prob.clone());
        }
    }
}

enum Side {
    Below,
    At,
    Above,
}

fn classify<R: Scalar>(z: &R, t: &R) -> Side {
    if R::EXACT {
        if z < t {
            Side::Below
        } else if z == t {
            Side::At
        } else {
            Side::Above
        }
    } else {
        let diff = z.to_f64() - t.to_f64();
        if diff.abs() <= THRESHOLD_BAND {
            Side::At
        } else if diff < 0.0 {
            Side::Below
        } else {
            Side::Above
        }
    }
}

/// True when every completion of `floor` is strictly above T (and above
/// the float band), so the subtree holds no below or at-threshold mass.
fn definitely_above<R: Scalar>(floor: &R, t: &R) -> bool {
    if R::EXACT {
        floor > t
    } else {
        floor.to_f64() > t.to_f64() + THRESHOLD_BAND
    }
}

/// Seeded Monte Carlo estimate of P(Z < T), strict float comparison.
///
/// Identical (instance, samples, seed) always produce identical output.
/// The half-width is the 95% normal approximation, falling back to the
/// Wilson interval when the empirical rate is 0 or 1.
pub fn monte_carlo_below<R: Scalar>(
    inst: &Instance<R>,
    d: &DeltaThreshold<R>,
    samples: u64,
    seed: u64,
) -> Result<McResult, ExactError> {
    if samples < 100 {
        return Err(ExactError::TooFewSamples(samples));
    }
    let t = d.threshold().to_f64();

    // Per-variable lookup tables: cumulative probabilities paired with
    // weighted atom values, so the inner loop is one draw and one scan.
    let tables: Vec<(Vec<f64>, Vec<f64>)> = inst
        .vars()
        .iter()
        .zip(inst.weights().weights())
        .map(|(var, w)| {
            let wf = w.to_f64();
            let mut cum = Vec::with_capacity(var.atoms().len());
            let mut weighted = Vec::with_capacity(var.atoms().len());
            let mut acc = 0.0;
            for atom in var.atoms() {
                acc += atom.prob.to_f64();
                cum.push(acc);
                weighted.push(wf * atom.value.to_f64());
            }
            (cum, weighted)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits: u64 = 0;
    for _ in 0..samples {
        let mut z = 0.0;
        for (cum, weighted) in &tables {
            let u: f64 = rng.random();
            let mut idx = cum.len() - 1;
            for (k, threshold) in cum.iter().enumerate() {
                if u < *threshold {
                    idx = k;
                    break;
                }
            }
            z += weighted[idx];
        }
        if z < t {
            hits += 1;
        }
    }

    let nf = samples as f64;
    let estimate = hits as f64 / nf;
    let half_width_95 = if estimate > 0.0 && estimate < 1.0 {
        WILSON_Z_95 * (estimate * (1.0 - estimate) / nf).sqrt()
    } else {
        let (lo, hi) = wilson_bounds(hits as f64, nf, WILSON_Z_95);
        (hi - lo) / 2.0
    };
    Ok(McResult {
        estimate,
        half_width_95,
        samples,
        seed,
    })
}

fn wilson_bounds(successes: f64, n: f64, z: f64) -> (f64, f64) {
    let p_hat = successes / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p_hat + z2 / (2.0 * n);
    let radius = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - radius) / denom, (center + radius) / denom)
}
