//! Value objects for weights, thresholds, discrete unit-mean
//! distributions, and whole problem instances.
//!
//! Everything here is immutable after construction and validated up
//! front, in the numeric mode selected by the scalar type:
//!
//! * [`WeightVector`] — weights sorted non-increasing, strictly positive,
//!   summing to one, with prefix sums σ_i.
//! * [`DeltaThreshold`] — the slack δ > 0 and threshold T = 1 + δ.
//! * [`DiscreteVar`] — a finite-support non-negative distribution with
//!   mean exactly one, atoms sorted by value descending.
//! * [`Instance`] — a weight vector paired with one variable per weight.
//!
//! Unvalidated input (for example parsed JSON) is represented by
//! [`RawInstance`]; [`validate_instance`] turns it into machine-readable
//! [`Diagnostic`]s instead of failing on the first problem.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::numeric::{is_positive, Scalar, FLOAT_TOLERANCE};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ModelError {
    #[error("weight list is empty")]
    EmptyWeights,
    #[error("{what} is not finite")]
    NonFinite { what: &'static str },
    #[error("weight {value} is not strictly positive")]
    NonPositiveWeight { value: String },
    #[error("weights sum to {sum}, expected 1")]
    WeightSumNotOne { sum: String },
    #[error("delta {value} is not strictly positive")]
    NonPositiveDelta { value: String },
    #[error("atom list is empty")]
    EmptyAtoms,
    #[error("atom value {value} is negative")]
    NegativeAtomValue { value: String },
    #[error("atom probability {value} is not strictly positive")]
    NonPositiveProb { value: String },
    #[error("duplicate atom value {value}")]
    DuplicateAtomValue { value: String },
    #[error("atom probabilities sum to {sum}, expected 1")]
    ProbSumNotOne { sum: String },
    #[error("distribution mean is {mean}, expected 1")]
    MeanNotOne { mean: String },
    #[error("instance has {weights} weights but {vars} variables")]
    LengthMismatch { weights: usize, vars: usize },
    #[error("instance violates invariants: {}", render_codes(.diagnostics))]
    InvalidInstance { diagnostics: Vec<Diagnostic> },
}

fn render_codes(diagnostics: &[Diagnostic]) -> String {
    let codes: Vec<&str> = diagnostics.iter().map(|d| d.code.as_str()).collect();
    codes.join(", ")
}

/// Machine-readable invariant violation codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticCode {
    EmptyWeights,
    NonFiniteValue,
    NonPositiveWeight,
    WeightSumViolation,
    LengthMismatch,
    EmptyAtoms,
    NegativeAtomValue,
    NonPositiveProb,
    DuplicateAtomValue,
    ProbSumViolation,
    MeanViolation,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::EmptyWeights => "empty-weights",
            DiagnosticCode::NonFiniteValue => "non-finite-value",
            DiagnosticCode::NonPositiveWeight => "non-positive-weight",
            DiagnosticCode::WeightSumViolation => "weight-sum-violation",
            DiagnosticCode::LengthMismatch => "length-mismatch",
            DiagnosticCode::EmptyAtoms => "empty-atoms",
            DiagnosticCode::NegativeAtomValue => "negative-atom-value",
            DiagnosticCode::NonPositiveProb => "non-positive-prob",
            DiagnosticCode::DuplicateAtomValue => "duplicate-atom-value",
            DiagnosticCode::ProbSumViolation => "prob-sum-violation",
            DiagnosticCode::MeanViolation => "mean-violation",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One violated invariant, with a human-readable location/detail string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub detail: String,
}

impl Diagnostic {
    fn new(code: DiagnosticCode, detail: impl Into<String>) -> Self {
        Diagnostic {
            code,
            detail: detail.into(),
        }
    }
}

/// Sorted positive weights summing to one, with prefix sums.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<R> {
    weights: Vec<R>,
    prefix: Vec<R>,
}

impl<R: Scalar> WeightVector<R> {
    /// Validates and sorts `raw` (callers may pass any order); the sum
    /// must already be one, exactly in rational mode or within 1e-12 in
    /// float mode.
    pub fn new(raw: Vec<R>) -> Result<Self, ModelError> {
        Self::build(raw, false)
    }

    /// Like [`WeightVector::new`] but divides every entry by the total
    /// first.
    pub fn normalized(raw: Vec<R>) -> Result<Self, ModelError> {
        Self::build(raw, true)
    }

    /// Uniform weights 1/n.
    pub fn uniform(n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::EmptyWeights);
        }
        let share = R::one() / R::from_usize(n);
        Self::new(vec![share; n])
    }

    fn build(mut raw: Vec<R>, normalize: bool) -> Result<Self, ModelError> {
        if raw.is_empty() {
            return Err(ModelError::EmptyWeights);
        }
        for w in &raw {
            if !w.is_finite_value() {
                return Err(ModelError::NonFinite { what: "weight" });
            }
            if !is_positive(w) {
                return Err(ModelError::NonPositiveWeight {
                    value: w.render_text(),
                });
            }
        }
        let mut sum = R::zero();
        for w in &raw {
            sum = sum + w.clone();
        }
        if normalize {
            if !sum.is_finite_value() || !is_positive(&sum) {
                return Err(ModelError::NonFinite { what: "weight sum" });
            }
            for w in &mut raw {
                *w = w.clone() / sum.clone();
            }
            sum = R::zero();
            for w in &raw {
                sum = sum + w.clone();
            }
        }
        if !sum.eq_within(&R::one(), FLOAT_TOLERANCE) {
            return Err(ModelError::WeightSumNotOne {
                sum: sum.render_text(),
            });
        }
        raw.sort_by(|a, b| b.partial_cmp(a).expect("weights are finite"));
        let mut prefix = Vec::with_capacity(raw.len());
        let mut acc = R::zero();
        for w in &raw {
            acc = acc + w.clone();
            prefix.push(acc.clone());
        }
        Ok(WeightVector {
            weights: raw,
            prefix,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// μ_1 ≥ … ≥ μ_n, non-increasing.
    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    /// σ_1 … σ_n; `prefix()[i-1]` is the sum of the i largest weights.
    pub fn prefix(&self) -> &[R] {
        &self.prefix
    }

    /// M, the largest weight.
    pub fn max_weight(&self) -> &R {
        &self.weights[0]
    }

    /// σ_i for a 1-based prefix length `i` in `1..=n`.
    pub fn prefix_sum(&self, prefix_len: usize) -> &R {
        &self.prefix[prefix_len - 1]
    }
}

/// The slack δ > 0 and derived threshold T = 1 + δ.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaThreshold<R> {
    delta: R,
    threshold: R,
}

impl<R: Scalar> DeltaThreshold<R> {
    pub fn new(delta: R) -> Result<Self, ModelError> {
        if !delta.is_finite_value() {
            return Err(ModelError::NonFinite { what: "delta" });
        }
        if !is_positive(&delta) {
            return Err(ModelError::NonPositiveDelta {
                value: delta.render_text(),
            });
        }
        let threshold = R::one() + delta.clone();
        Ok(DeltaThreshold { delta, threshold })
    }

    pub fn delta(&self) -> &R {
        &self.delta
    }

    pub fn threshold(&self) -> &R {
        &self.threshold
    }
}

/// One atom of a discrete distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<R> {
    pub value: R,
    pub prob: R,
}

/// A finite-support non-negative distribution with mean one.
///
/// Atoms are stored sorted by value descending, which is also the order
/// the enumeration engine wants.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteVar<R> {
    atoms: Vec<Atom<R>>,
}

impl<R: Scalar> DiscreteVar<R> {
    pub fn new(atoms: Vec<(R, R)>) -> Result<Self, ModelError> {
        if atoms.is_empty() {
            return Err(ModelError::EmptyAtoms);
        }
        for (value, prob) in &atoms {
            if !value.is_finite_value() || !prob.is_finite_value() {
                return Err(ModelError::NonFinite { what: "atom" });
            }
            if *value < R::zero() {
                return Err(ModelError::NegativeAtomValue {
                    value: value.render_text(),
                });
            }
            if !is_positive(prob) {
                return Err(ModelError::NonPositiveProb {
                    value: prob.render_text(),
                });
            }
        }
        let mut atoms: Vec<Atom<R>> = atoms
            .into_iter()
            .map(|(value, prob)| Atom { value, prob })
            .collect();
        atoms.sort_by(|a, b| b.value.partial_cmp(&a.value).expect("atom values are finite"));
        for pair in atoms.windows(2) {
            if pair[0].value == pair[1].value {
                return Err(ModelError::DuplicateAtomValue {
                    value: pair[0].value.render_text(),
                });
            }
        }
        let mut prob_sum = R::zero();
        let mut mean = R::zero();
        for atom in &atoms {
            prob_sum = prob_sum + atom.prob.clone();
            mean = mean + atom.value.clone() * atom.prob.clone();
        }
        if !prob_sum.eq_within(&R::one(), FLOAT_TOLERANCE) {
            return Err(ModelError::ProbSumNotOne {
                sum: prob_sum.render_text(),
            });
        }
        if !mean.eq_within(&R::one(), FLOAT_TOLERANCE) {
            return Err(ModelError::MeanNotOne {
                mean: mean.render_text(),
            });
        }
        Ok(DiscreteVar { atoms })
    }

    /// The constant variable X ≡ 1.
    pub fn constant_one() -> Self {
        DiscreteVar {
            atoms: vec![Atom {
                value: R::one(),
                prob: R::one(),
            }],
        }
    }

    pub fn atoms(&self) -> &[Atom<R>] {
        &self.atoms
    }

    /// Smallest atom value (atoms are sorted descending).
    pub fn min_value(&self) -> &R {
        &self.atoms[self.atoms.len() - 1].value
    }
}

/// A weight vector paired with one distribution per weight; together they
/// define Z = Σ μ_i X_i.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<R> {
    weights: WeightVector<R>,
    vars: Vec<DiscreteVar<R>>,
}

impl<R: Scalar> Instance<R> {
    pub fn new(weights: WeightVector<R>, vars: Vec<DiscreteVar<R>>) -> Result<Self, ModelError> {
        if weights.n() != vars.len() {
            return Err(ModelError::LengthMismatch {
                weights: weights.n(),
                vars: vars.len(),
            });
        }
        Ok(Instance { weights, vars })
    }

    /// Validates raw data and builds the instance, pairing each variable
    /// with its weight. Weight/variable pairs are sorted together by
    /// weight descending (stable, so ties keep their input order).
    pub fn from_raw(raw: RawInstance<R>) -> Result<Self, ModelError> {
        let diagnostics = validate_instance(&raw);
        if !diagnostics.is_empty() {
            return Err(ModelError::InvalidInstance { diagnostics });
        }
        let RawInstance { weights, vars } = raw;
        let mut pairs: Vec<(R, Vec<(R, R)>)> = weights.into_iter().zip(vars).collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("weights are finite"));
        let mut sorted_weights = Vec::with_capacity(pairs.len());
        let mut sorted_vars = Vec::with_capacity(pairs.len());
        for (w, atoms) in pairs {
            sorted_weights.push(w);
            sorted_vars.push(DiscreteVar::new(atoms)?);
        }
        let weights = WeightVector::new(sorted_weights)?;
        Instance::new(weights, sorted_vars)
    }

    pub fn to_raw(&self) -> RawInstance<R> {
        RawInstance {
            weights: self.weights.weights().to_vec(),
            vars: self
                .vars
                .iter()
                .map(|v| {
                    v.atoms()
                        .iter()
                        .map(|a| (a.value.clone(), a.prob.clone()))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn weights(&self) -> &WeightVector<R> {
        &self.weights
    }

    pub fn vars(&self) -> &[DiscreteVar<R>] {
        &self.vars
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }
}

/// Unvalidated instance data: weights plus `(value, prob)` atom lists.
#[derive(Clone, Debug, PartialEq)]
pub struct RawInstance<R> {
    pub weights: Vec<R>,
    pub vars: Vec<Vec<(R, R)>>,
}

/// Pure check of every instance invariant; returns one diagnostic per
/// violation (empty means valid). Never mutates and never fails early.
pub fn validate_instance<R: Scalar>(raw: &RawInstance<R>) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if raw.weights.is_empty() {
        out.push(Diagnostic::new(DiagnosticCode::EmptyWeights, "no weights"));
    }
    if raw.weights.len() != raw.vars.len() {
        out.push(Diagnostic::new(
            DiagnosticCode::LengthMismatch,
            format!("{} weights vs {} vars", raw.weights.len(), raw.vars.len()),
        ));
    }

    let mut weights_clean = !raw.weights.is_empty();
    for (k, w) in raw.weights.iter().enumerate() {
        if !w.is_finite_value() {
            out.push(Diagnostic::new(
                DiagnosticCode::NonFiniteValue,
                format!("weight {}", k + 1),
            ));
            weights_clean = false;
        } else if !is_positive(w) {
            out.push(Diagnostic::new(
                DiagnosticCode::NonPositiveWeight,
                format!("weight {} = {}", k + 1, w.render_text()),
            ));
            weights_clean = false;
        }
    }
    if weights_clean {
        let mut sum = R::zero();
        for w in &raw.weights {
            sum = sum + w.clone();
        }
        if !sum.eq_within(&R::one(), FLOAT_TOLERANCE) {
            out.push(Diagnostic::new(
                DiagnosticCode::WeightSumViolation,
                format!("weights sum to {}", sum.render_text()),
            ));
        }
    }

    for (k, atoms) in raw.vars.iter().enumerate() {
        let var_id = k + 1;
        if atoms.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::EmptyAtoms,
                format!("var {var_id}"),
            ));
            continue;
        }
        let mut clean = true;
        for (value, prob) in atoms {
            if !value.is_finite_value() || !prob.is_finite_value() {
                out.push(Diagnostic::new(
                    DiagnosticCode::NonFiniteValue,
                    format!("var {var_id}"),
                ));
                clean = false;
            } else {
                if *value < R::zero() {
                    out.push(Diagnostic::new(
                        DiagnosticCode::NegativeAtomValue,
                        format!("var {var_id}: value {}", value.render_text()),
                    ));
                    clean = false;
                }
                if !is_positive(prob) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::NonPositiveProb,
                        format!("var {var_id}: prob {}", prob.render_text()),
                    ));
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        for (i, (vi, _)) in atoms.iter().enumerate() {
            if atoms[i + 1..].iter().any(|(vj, _)| vj == vi) {
                out.push(Diagnostic::new(
                    DiagnosticCode::DuplicateAtomValue,
                    format!("var {var_id}: value {}", vi.render_text()),
                ));
            }
        }
        let mut prob_sum = R::zero();
        let mut mean = R::zero();
        for (value, prob) in atoms {
            prob_sum = prob_sum + prob.clone();
            mean = mean + value.clone() * prob.clone();
        }
        if !prob_sum.eq_within(&R::one(), FLOAT_TOLERANCE) {
            out.push(Diagnostic::new(
                DiagnosticCode::ProbSumViolation,
                format!("var {var_id}: probs sum to {}", prob_sum.render_text()),
            ));
        }
        if !mean.eq_within(&R::one(), FLOAT_TOLERANCE) {
            out.push(Diagnostic::new(
                DiagnosticCode::MeanViolation,
                format!("var {var_id}: mean {}", mean.render_text()),
            ));
        }
    }

    out
}
