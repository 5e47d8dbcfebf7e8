//! Randomized sweeps certifying the bound implication and the lemma
//! grids at scale, plus a derivative-free search for instances that
//! would undercut the prefix-product bound.
//!
//! Everything here is deterministic per seed: per-instance generators
//! are derived as separate ChaCha8 streams of the master seed, and
//! reports are assembled in instance order.

mod nelder_mead;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, ChainStepLabel};
use crate::exact::{exact_prob_below_budgeted, ExactError};
use crate::model::{DeltaThreshold, DiscreteVar, Instance, ModelError, WeightVector};
use crate::phi::{
    check_lemma1, check_lemma3, eta, eta_prime, f_lemma1, h_alpha, phi, AlphaSlice, PhiPoint,
};
use crate::schema::{instance_to_json, InstanceJson};

use nelder_mead::NelderMead;

/// One-sided margin checks fail below −1e-12.
pub const MARGIN_TOLERANCE: f64 = 1e-12;
/// The chain's first step is an identity; |margin| above this fails.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Central second differences of the concavity slice must stay below
/// this (they are negative up to rounding for a concave function).
pub const CURVATURE_TOLERANCE: f64 = 1e-8;
/// |η(α, 1e-6)| must stay below this (η vanishes at 0+).
pub const ETA_LIMIT_TOLERANCE: f64 = 1e-5;
/// The search must never report a probability this far below the bound.
pub const SEARCH_SOUNDNESS_TOLERANCE: f64 = 1e-9;

const MAX_STORED_FAILURES: usize = 1000;
const CURVATURE_STEP: f64 = 1e-4;
const LEMMA4_ALPHAS: [f64; 7] = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
const SEARCH_LEAF_BUDGET: u64 = 1 << 20;
const SEARCH_MAX_N: usize = 16;
/// Largest representable low atom: the family needs a < 1 strictly.
const LOW_ATOM_MAX: f64 = 1.0 - 1e-9;

/// Histogram bin edges for recorded margins; the first and last bins are
/// open-ended.
const HISTOGRAM_EDGES: [f64; 8] = [-1e-12, 0.0, 1e-12, 1e-9, 1e-6, 1e-3, 1e-2, 1e-1];

#[derive(Error, Debug)]
pub enum ExplorerError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("search supports at most {max} variables, got {n}")]
    SearchTooLarge { n: usize, max: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Weight generation families for sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSampler {
    /// iid unit exponentials normalized by their sum (uniform on the
    /// simplex), sorted descending.
    DirichletUniform,
    /// weights proportional to r^k with r drawn in [0.2, 0.95].
    GeometricDecay,
    /// μ_1 drawn in [0.5, 0.99], remainder split evenly.
    OneDominant,
}

impl WeightSampler {
    pub const ALL: [WeightSampler; 3] = [
        WeightSampler::DirichletUniform,
        WeightSampler::GeometricDecay,
        WeightSampler::OneDominant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightSampler::DirichletUniform => "dirichlet-uniform",
            WeightSampler::GeometricDecay => "geometric-decay",
            WeightSampler::OneDominant => "one-dominant",
        }
    }
}

impl fmt::Display for WeightSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightSampler {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dirichlet-uniform" => Ok(WeightSampler::DirichletUniform),
            "geometric-decay" => Ok(WeightSampler::GeometricDecay),
            "one-dominant" => Ok(WeightSampler::OneDominant),
            other => Err(format!("unknown weight sampler `{other}`")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub instance_count: u64,
    /// inclusive (min, max) on n.
    pub n_range: (usize, usize),
    /// (min, max) on δ, sampled log-uniformly.
    pub delta_range: (f64, f64),
    pub seed: u64,
    pub weight_sampler: WeightSampler,
}

impl SweepConfig {
    fn validate(&self) -> Result<(), ExplorerError> {
        if self.instance_count == 0 {
            return Err(ExplorerError::InvalidConfig(
                "instance_count must be at least 1".into(),
            ));
        }
        if self.n_range.0 == 0 || self.n_range.0 > self.n_range.1 {
            return Err(ExplorerError::InvalidConfig(format!(
                "bad n range {:?}",
                self.n_range
            )));
        }
        if !(self.delta_range.0 > 0.0 && self.delta_range.0 <= self.delta_range.1) {
            return Err(ExplorerError::InvalidConfig(format!(
                "bad delta range {:?}",
                self.delta_range
            )));
        }
        Ok(())
    }
}

/// Where a margin or failure was observed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRef {
    pub label: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    pub limit: f64,
    pub case: CaseRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// None means unbounded below.
    pub lo: Option<f64>,
    /// None means unbounded above.
    pub hi: Option<f64>,
    pub count: u64,
}

/// Aggregated sweep outcome.
///
/// `worst_margin` tracks the margin-type checks (the ones that must stay
/// ≥ −1e-12); the identity, curvature, splice, and η-limit checks carry
/// their own limits and are reported through `per_check` and `failures`.
/// `failures` is capped at 1000 stored entries; `failure_count` is the
/// true count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub checks: u64,
    pub worst_margin: f64,
    pub worst_case: Option<CaseRef>,
    /// Worst observed value per named check, in each check's own
    /// convention (minimum for margins, maximum for capped quantities).
    pub per_check: BTreeMap<String, f64>,
    pub histogram: Vec<HistogramBin>,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// One sweep instance, the CSV record shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: u64,
    pub sampler: String,
    pub n: usize,
    pub delta: f64,
    pub weights_digest: String,
    pub samuels: f64,
    pub feige: f64,
    pub margin: f64,
    pub chain_margins: [f64; 4],
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "index,sampler,n,delta,weights_digest,samuels,feige,\
                                          margin,step_sum_identity,step_phi_monotone,\
                                          step_concavity_min,step_lemma3_floor";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.index,
            self.sampler,
            self.n,
            self.delta,
            self.weights_digest,
            self.samuels,
            self.feige,
            self.margin,
            self.chain_margins[0],
            self.chain_margins[1],
            self.chain_margins[2],
            self.chain_margins[3],
        )
    }
}

/// A sweep report plus its per-instance rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub report: SweepReport,
    pub rows: Vec<SweepRow>,
}

struct ReportBuilder {
    checks: u64,
    worst_margin: f64,
    worst_case: Option<CaseRef>,
    per_check: BTreeMap<String, f64>,
    histogram: [u64; HISTOGRAM_EDGES.len() + 1],
    failure_count: u64,
    failures: Vec<Failure>,
}

impl ReportBuilder {
    fn new() -> Self {
        ReportBuilder {
            checks: 0,
            worst_margin: f64::INFINITY,
            worst_case: None,
            per_check: BTreeMap::new(),
            histogram: [0; HISTOGRAM_EDGES.len() + 1],
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn keep_min(&mut self, check: &str, value: f64) {
        match self.per_check.get_mut(check) {
            Some(v) => *v = v.min(value),
            None => {
                self.per_check.insert(check.to_owned(), value);
            }
        }
    }

    fn keep_max(&mut self, check: &str, value: f64) {
        match self.per_check.get_mut(check) {
            Some(v) => *v = v.max(value),
            None => {
                self.per_check.insert(check.to_owned(), value);
            }
        }
    }

    fn fail(&mut self, check: &str, value: f64, limit: f64, case: &CaseRef) {
        self.failure_count += 1;
        if self.failures.len() < MAX_STORED_FAILURES {
            self.failures.push(Failure {
                check: check.to_owned(),
                value,
                limit,
                case: case.clone(),
            });
        }
    }

    /// A signed margin that must stay ≥ −tol.
    fn record_margin(&mut self, check: &str, margin: f64, tol: f64, case: &CaseRef) {
        self.checks += 1;
        let bin = HISTOGRAM_EDGES.iter().position(|e| margin < *e);
        self.histogram[bin.unwrap_or(HISTOGRAM_EDGES.len())] += 1;
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_case = Some(case.clone());
        }
        self.keep_min(check, margin);
        // NaN counts as a failure
        if margin.is_nan() || margin < -tol {
            self.fail(check, margin, -tol, case);
        }
    }

    /// A quantity that must stay strictly positive.
    fn record_strict(&mut self, check: &str, value: f64, case: &CaseRef) {
        self.checks += 1;
        let bin = HISTOGRAM_EDGES.iter().position(|e| value < *e);
        self.histogram[bin.unwrap_or(HISTOGRAM_EDGES.len())] += 1;
        if value < self.worst_margin {
            self.worst_margin = value;
            self.worst_case = Some(case.clone());
        }
        self.keep_min(check, value);
        if value.is_nan() || value <= 0.0 {
            self.fail(check, value, 0.0, case);
        }
    }

    /// A quantity that must stay ≤ limit.
    fn record_cap(&mut self, check: &str, value: f64, limit: f64, case: &CaseRef) {
        self.checks += 1;
        self.keep_max(check, value);
        if value.is_nan() || value > limit {
            self.fail(check, value, limit, case);
        }
    }

    fn finish(self) -> SweepReport {
        let mut bins = Vec::with_capacity(self.histogram.len());
        for (k, count) in self.histogram.iter().enumerate() {
            bins.push(HistogramBin {
                lo: if k == 0 {
                    None
                } else {
                    Some(HISTOGRAM_EDGES[k - 1])
                },
                hi: HISTOGRAM_EDGES.get(k).copied(),
                count: *count,
            });
        }
        SweepReport {
            checks: self.checks,
            worst_margin: self.worst_margin,
            worst_case: self.worst_case,
            per_check: self.per_check,
            histogram: bins,
            failure_count: self.failure_count,
            failures: self.failures,
        }
    }
}

/// Draws a weight vector for one of the named families; deterministic
/// per seed.
pub fn sample_weights(
    n: usize,
    sampler: WeightSampler,
    seed: u64,
) -> Result<WeightVector<f64>, ExplorerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_weights_with(&mut rng, n, sampler)
}

fn sample_weights_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    sampler: WeightSampler,
) -> Result<WeightVector<f64>, ExplorerError> {
    if n == 0 {
        return Err(ExplorerError::InvalidConfig("n must be at least 1".into()));
    }
    if n == 1 {
        return Ok(WeightVector::new(vec![1.0])?);
    }
    let raw: Vec<f64> = match sampler {
        WeightSampler::DirichletUniform => (0..n).map(|_| unit_exponential(rng)).collect(),
        WeightSampler::GeometricDecay => {
            let r: f64 = rng.random_range(0.2..=0.95);
            (0..n).map(|k| r.powi(k as i32)).collect()
        }
        WeightSampler::OneDominant => {
            let top = rng.random_range(0.5..=0.99);
            let share = (1.0 - top) / (n - 1) as f64;
            let mut raw = vec![share; n];
            raw[0] = top;
            raw
        }
    };
    Ok(WeightVector::normalized(raw)?)
}

fn unit_exponential(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let e = -(1.0 - rng.random::<f64>()).ln();
        if e > 0.0 && e.is_finite() {
            return e;
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        return range.0;
    }
    let (lo, hi) = (range.0.ln(), range.1.ln());
    (lo + rng.random::<f64>() * (hi - lo)).exp()
}

fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn chain_check_name(label: ChainStepLabel) -> &'static str {
    match label {
        ChainStepLabel::SumIdentity => "chain-sum-identity",
        ChainStepLabel::PhiMonotone => "chain-phi-monotone",
        ChainStepLabel::ConcavityMin => "chain-concavity-min",
        ChainStepLabel::Lemma3Floor => "chain-lemma3-floor",
    }
}

fn weights_digest(weights: &[f64]) -> String {
    // FNV-1a over the bit patterns
    let mut hash: u64 = 0xcbf29ce484222325;
    for w in weights {
        for byte in w.to_bits().to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    format!("{hash:016x}")
}

/// Samples (weights, δ) pairs and records the implication margin plus all
/// four chain-step margins for each.
pub fn sweep_implication(cfg: &SweepConfig) -> Result<SweepRun, ExplorerError> {
    cfg.validate()?;
    let mut builder = ReportBuilder::new();
    let mut rows = Vec::with_capacity(cfg.instance_count.min(1 << 21) as usize);

    for index in 0..cfg.instance_count {
        let mut rng = instance_rng(cfg.seed, index);
        let n = rng.random_range(cfg.n_range.0..=cfg.n_range.1);
        let w = sample_weights_with(&mut rng, n, cfg.weight_sampler)?;
        let delta = log_uniform(&mut rng, cfg.delta_range);
        let d = DeltaThreshold::new(delta)?;

        let bound = bounds::implication_margin(&w, &d);
        let chain = bounds::proof_chain(&w, &d);
        let case = CaseRef {
            label: format!("{} #{index}", cfg.weight_sampler.name()),
            weights: w.weights().to_vec(),
            delta: Some(delta),
        };

        builder.record_margin(
            "implication-margin",
            bound.implication_margin,
            MARGIN_TOLERANCE,
            &case,
        );
        builder.record_cap(
            chain_check_name(ChainStepLabel::SumIdentity),
            chain.steps[0].margin.abs(),
            IDENTITY_TOLERANCE,
            &case,
        );
        for step in &chain.steps[1..] {
            builder.record_margin(
                chain_check_name(step.label),
                step.margin,
                MARGIN_TOLERANCE,
                &case,
            );
        }

        rows.push(SweepRow {
            index,
            sampler: cfg.weight_sampler.name().to_owned(),
            n,
            delta,
            weights_digest: weights_digest(w.weights()),
            samuels: bound.samuels,
            feige: bound.feige,
            margin: bound.implication_margin,
            chain_margins: [
                chain.steps[0].margin,
                chain.steps[1].margin,
                chain.steps[2].margin,
                chain.steps[3].margin,
            ],
        });
    }

    Ok(SweepRun {
        report: builder.finish(),
        rows,
    })
}

/// Runs the fixed lemma grids and reports worst margins per check:
///
/// * `lemma1-*` — the basic inequality on [0,1], step 1e-3;
/// * `lemma2-monotone-gap` — strict decrease of Φ in μ on a 0.01 grid
///   against a log grid of ρ;
/// * `lemma3-floor-margin` — the Φ floor on the product grid;
/// * `lemma4-*` — concavity of the slice: second differences, η < 0,
///   η′ < 0, and η(α, 1e-6) ≈ 0;
/// * `phi-splice` — continuity of Φ across the μ = 0 branch.
pub fn sweep_lemmas() -> SweepReport {
    let mut builder = ReportBuilder::new();
    let rhos = log_grid(1e-3, 1e3, 61);

    for k in 0..=1000 {
        let t = k as f64 / 1000.0;
        let case = grid_case(format!("lemma1 t={t}"));
        builder.record_margin(
            "lemma1-direct",
            check_lemma1(t).expect("t within [0,1]"),
            MARGIN_TOLERANCE,
            &case,
        );
        builder.record_margin(
            "lemma1-difference-form",
            f_lemma1(t).expect("t within [0,1]"),
            MARGIN_TOLERANCE,
            &case,
        );
    }

    for &rho in &rhos {
        for k in 1..=100u32 {
            let mu = f64::from(k) / 100.0;
            let lambda = f64::from(k - 1) / 100.0;
            let gap = phi(PhiPoint::new(lambda, rho).expect("grid point in domain"))
                - phi(PhiPoint::new(mu, rho).expect("grid point in domain"));
            let case = grid_case(format!("lemma2 mu={mu} rho={rho:.6e}"));
            builder.record_strict("lemma2-monotone-gap", gap, &case);
        }
    }

    for &rho in &rhos {
        for k in 0..=100u32 {
            let mu = f64::from(k) / 100.0;
            let margin = check_lemma3(PhiPoint::new(mu, rho).expect("grid point in domain"));
            let case = grid_case(format!("lemma3 mu={mu} rho={rho:.6e}"));
            builder.record_margin("lemma3-floor-margin", margin, MARGIN_TOLERANCE, &case);
        }
    }

    for &rho in &rhos {
        let near = phi(PhiPoint::new(1e-9, rho).expect("in domain"));
        let limit = phi(PhiPoint::new(0.0, rho).expect("in domain"));
        let case = grid_case(format!("splice rho={rho:.6e}"));
        builder.record_cap("phi-splice", (near - limit).abs(), CURVATURE_TOLERANCE, &case);
    }

    for &alpha in &LEMMA4_ALPHAS {
        let slice = AlphaSlice::new(alpha).expect("alpha > 0");
        for k in 1..=99u32 {
            let t = f64::from(k) / 100.0;
            let case = grid_case(format!("lemma4 alpha={alpha} t={t}"));
            let h = |x: f64| h_alpha(slice, x).expect("t within [0,1]");
            let second_diff = h(t + CURVATURE_STEP) - 2.0 * h(t) + h(t - CURVATURE_STEP);
            builder.record_cap(
                "lemma4-second-difference",
                second_diff,
                CURVATURE_TOLERANCE,
                &case,
            );
            builder.record_strict(
                "lemma4-eta-negative",
                -eta(slice, t).expect("interior t"),
                &case,
            );
            builder.record_strict(
                "lemma4-eta-prime-negative",
                -eta_prime(slice, t).expect("interior t"),
                &case,
            );
        }
        let case = grid_case(format!("lemma4 alpha={alpha} t->0"));
        builder.record_cap(
            "lemma4-eta-limit",
            eta(slice, 1e-6).expect("interior t").abs(),
            ETA_LIMIT_TOLERANCE,
            &case,
        );
    }

    builder.finish()
}

fn grid_case(label: String) -> CaseRef {
    CaseRef {
        label,
        weights: Vec::new(),
        delta: None,
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Nelder–Mead configuration for [`search_counterexample`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: u32,
    pub max_evals: u32,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 50,
            max_evals: 500,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            seed: 0,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<(), ExplorerError> {
        let ok = self.reflection > 0.0
            && self.expansion > 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.max_evals >= 1;
        if ok {
            Ok(())
        } else {
            Err(ExplorerError::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// One optimized variable: a two-point distribution {low, high} with
/// 0 ≤ low < 1 ≤ high and the mass pinned by the unit mean; high = 1
/// degenerates to the constant 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointParams {
    pub low: f64,
    pub high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub best_prob: f64,
    pub samuels: f64,
    /// best_prob − samuels; a value below −1e-9 would be a
    /// counterexample within the family.
    pub gap_vs_samuels: f64,
    /// Which distribution family was searched.
    pub family: String,
    pub best_params: Vec<TwoPointParams>,
    pub best_instance: InstanceJson,
    pub evals: u64,
    pub starts: u32,
    /// Starts whose simplex collapsed below the diameter tolerance
    /// (rather than running out of evaluations).
    pub converged_starts: u32,
    pub seed: u64,
}

/// Minimizes exact P(Z < T) over two-point distributions per coordinate,
/// warm-starting from each prefix construction and adding seeded random
/// restarts. The objective is exact enumeration, so any value reported
/// below the prefix-product bound beyond float noise would be a genuine
/// counterexample within the family.
pub fn search_counterexample(
    w: &WeightVector<f64>,
    d: &DeltaThreshold<f64>,
    cfg: &SearchConfig,
) -> Result<SearchReport, ExplorerError> {
    cfg.validate()?;
    let n = w.n();
    if n > SEARCH_MAX_N {
        return Err(ExplorerError::SearchTooLarge {
            n,
            max: SEARCH_MAX_N,
        });
    }
    let delta = *d.delta();
    let mu_min = w.weights()[n - 1];
    // The cap must dominate every warm-start value (σ_i + δ)/μ_j, which
    // can exceed 10·n·(1+δ) when the smallest weight is tiny.
    let high_cap = (10.0 * n as f64 * (1.0 + delta)).max(1.5 * (1.0 + delta) / mu_min);

    let nm = NelderMead {
        reflection: cfg.reflection,
        expansion: cfg.expansion,
        contraction: cfg.contraction,
        shrink: cfg.shrink,
        max_evals: cfg.max_evals,
        diameter_tol: 1e-10,
    };

    let mut objective = |x: &[f64]| -> f64 {
        match build_two_point_instance(w, x, high_cap) {
            Ok(inst) => match exact_prob_below_budgeted(&inst, d, SEARCH_LEAF_BUDGET) {
                Ok(result) => result.prob_below,
                Err(_) => f64::INFINITY,
            },
            Err(_) => f64::INFINITY,
        }
    };

    let mut best_x: Option<Vec<f64>> = None;
    let mut best_value = f64::INFINITY;
    let mut total_evals: u64 = 0;
    let mut starts = 0u32;
    let mut converged_starts = 0u32;

    let mut start_points: Vec<Vec<f64>> = (1..=n)
        .map(|prefix_len| warm_start_params(w, d, prefix_len))
        .collect();
    for restart in 0..cfg.restarts {
        let mut rng = instance_rng(cfg.seed, u64::from(restart));
        start_points.push(random_params(&mut rng, n, high_cap));
    }

    for x0 in start_points {
        let steps: Vec<f64> = x0
            .chunks(2)
            .flat_map(|ab| [0.1, 0.1 * ab[1].max(1.0)])
            .collect();
        let outcome = nm.minimize(&x0, &steps, &mut objective);
        total_evals += u64::from(outcome.evals);
        starts += 1;
        if outcome.converged {
            converged_starts += 1;
        }
        if outcome.value < best_value {
            best_value = outcome.value;
            best_x = Some(outcome.x);
        }
    }

    let best_x = best_x.expect("at least the warm starts ran");
    let best_params: Vec<TwoPointParams> = clamp_params(&best_x, high_cap)
        .chunks(2)
        .map(|ab| TwoPointParams {
            low: ab[0],
            high: ab[1],
        })
        .collect();
    let best_instance = build_two_point_instance(w, &best_x, high_cap)?;
    let best_prob = exact_prob_below_budgeted(&best_instance, d, SEARCH_LEAF_BUDGET)?.prob_below;
    let (samuels, _) = bounds::samuels_bound(w, d);

    Ok(SearchReport {
        best_prob,
        samuels,
        gap_vs_samuels: best_prob - samuels,
        family: "two-point".to_owned(),
        best_params,
        best_instance: instance_to_json(&best_instance),
        evals: total_evals,
        starts,
        converged_starts,
        seed: cfg.seed,
    })
}

fn clamp_params(x: &[f64], high_cap: f64) -> Vec<f64> {
    x.chunks(2)
        .flat_map(|ab| {
            let low = if ab[0].is_finite() {
                ab[0].clamp(0.0, LOW_ATOM_MAX)
            } else {
                0.0
            };
            let high = if ab[1].is_finite() {
                ab[1].clamp(1.0, high_cap)
            } else {
                high_cap
            };
            [low, high]
        })
        .collect()
}

fn build_two_point_instance(
    w: &WeightVector<f64>,
    x: &[f64],
    high_cap: f64,
) -> Result<Instance<f64>, ModelError> {
    let params = clamp_params(x, high_cap);
    let vars: Result<Vec<_>, ModelError> = params
        .chunks(2)
        .map(|ab| {
            let (low, high) = (ab[0], ab[1]);
            let p_low = (high - 1.0) / (high - low);
            if p_low <= 0.0 {
                // high = 1: the constant variable
                Ok(DiscreteVar::constant_one())
            } else {
                DiscreteVar::new(vec![(low, p_low), (high, 1.0 - p_low)])
            }
        })
        .collect();
    Instance::new(w.clone(), vars?)
}

fn warm_start_params(w: &WeightVector<f64>, d: &DeltaThreshold<f64>, prefix_len: usize) -> Vec<f64> {
    let reach = w.prefix_sum(prefix_len) + d.delta();
    let mut x = Vec::with_capacity(2 * w.n());
    for (j, mu) in w.weights().iter().enumerate() {
        if j < prefix_len {
            x.push(0.0);
            x.push(reach / mu);
        } else {
            x.push(0.0);
            x.push(1.0);
        }
    }
    x
}

fn random_params(rng: &mut ChaCha8Rng, n: usize, high_cap: f64) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * n);
    for _ in 0..n {
        x.push(rng.random_range(0.0..0.99));
        // high − 1 log-uniform over [1e-3, cap − 1]
        let excess = log_uniform(rng, (1e-3, high_cap - 1.0));
        x.push(1.0 + excess);
    }
    x
}
