//! Acceptance suite: every release criterion as one test, each printing a
//! pass/fail line (run with `--nocapture` to see them on success).
//!
//! Expected values are produced by independent oracles local to this
//! file (full-support enumeration, finite differences, closed forms),
//! never by the code paths under test.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use smalldev_core::bounds::samuels_term;
use smalldev_core::exact::{exact_prob_below, monte_carlo_below, support_size};
use smalldev_core::explorer::{
    sample_weights, search_counterexample, sweep_implication, sweep_lemmas, SearchConfig,
    SweepConfig, SweepRun, WeightSampler,
};
use smalldev_core::extremal::{feige_extremal, iid_extremal, iid_limit, samuels_extremal};
use smalldev_core::model::{DeltaThreshold, DiscreteVar, Instance, WeightVector};
use smalldev_core::numeric::{big_ratio, BigRational, Scalar};
use smalldev_core::phi::{
    eta, eta_prime, g_prime_lemma3, h_alpha, partial2_phi, phi, AlphaSlice, PhiPoint, INV_E,
};

const MARGIN_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;
const CURVATURE_TOL: f64 = 1e-8;
const ETA_LIMIT_TOL: f64 = 1e-5;
const DERIVATIVE_REL_TOL: f64 = 1e-4;
const SEARCH_SOUNDNESS_TOL: f64 = 1e-9;
const SEARCH_GAP_TOL: f64 = 1e-6;
const MODE_AGREEMENT_TOL: f64 = 1e-9;
const IID_LIMIT_TOL: f64 = 1e-6;
const IID_SMALL_DELTA_GAP: f64 = 4e-4;

fn criterion(num: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {num:2} [{verdict}] {name}: {detail}");
    assert!(pass, "criterion {num} ({name}) failed: {detail}");
}

// ---------------------------------------------------------------------
// criteria 1 + 2: the big implication sweep, shared between both tests
// ---------------------------------------------------------------------

struct TheoremSweep {
    runs: Vec<SweepRun>,
    total_instances: u64,
    elapsed: Duration,
}

static SWEEP: OnceLock<TheoremSweep> = OnceLock::new();

fn theorem_sweep() -> &'static TheoremSweep {
    SWEEP.get_or_init(|| {
        let per_sampler = 33_334; // three samplers, ≥ 1e5 total
        let start = Instant::now();
        let runs: Vec<SweepRun> = WeightSampler::ALL
            .iter()
            .enumerate()
            .map(|(k, &sampler)| {
                sweep_implication(&SweepConfig {
                    instance_count: per_sampler,
                    n_range: (1, 16),
                    delta_range: (1e-4, 10.0),
                    seed: 0x5EED_0000 + k as u64,
                    weight_sampler: sampler,
                })
                .expect("sweep config is valid")
            })
            .collect();
        TheoremSweep {
            total_instances: per_sampler * runs.len() as u64,
            elapsed: start.elapsed(),
            runs,
        }
    })
}

#[test]
fn criterion_01_implication_sweep() {
    let sweep = theorem_sweep();
    let worst = sweep
        .runs
        .iter()
        .map(|r| r.report.per_check["implication-margin"])
        .fold(f64::INFINITY, f64::min);
    let failures: u64 = sweep.runs.iter().map(|r| r.report.failure_count).sum();
    let within_time = sweep.elapsed < Duration::from_secs(60);
    criterion(
        1,
        "implication margin over randomized instances",
        sweep.total_instances >= 100_000 && failures == 0 && worst >= -MARGIN_TOL && within_time,
        format!(
            "{} instances, worst margin {worst:.3e}, {failures} failures, {:.2?}",
            sweep.total_instances, sweep.elapsed
        ),
    );
}

#[test]
fn criterion_02_chain_identity_and_ordering() {
    let sweep = theorem_sweep();
    let worst_identity = sweep
        .runs
        .iter()
        .map(|r| r.report.per_check["chain-sum-identity"])
        .fold(0.0f64, f64::max);
    let worst_step = sweep
        .runs
        .iter()
        .flat_map(|r| {
            [
                r.report.per_check["chain-phi-monotone"],
                r.report.per_check["chain-concavity-min"],
                r.report.per_check["chain-lemma3-floor"],
            ]
        })
        .fold(f64::INFINITY, f64::min);
    criterion(
        2,
        "chain identity and step ordering",
        worst_identity <= IDENTITY_TOL && worst_step >= -MARGIN_TOL,
        format!("worst |identity| {worst_identity:.3e}, worst step margin {worst_step:.3e}"),
    );
}

// ---------------------------------------------------------------------
// criteria 3-5: rational equality cases
// ---------------------------------------------------------------------

fn random_rational_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector<BigRational> {
    let nums: Vec<i64> = (0..n).map(|_| rng.random_range(1..100i64)).collect();
    let total: i64 = nums.iter().sum();
    WeightVector::new(nums.into_iter().map(|k| big_ratio(k, total)).collect())
        .expect("positive rationals summing to one")
}

fn random_rational_delta(rng: &mut ChaCha8Rng) -> DeltaThreshold<BigRational> {
    let numer = rng.random_range(1..=20i64);
    let denom = rng.random_range(1..=20i64);
    DeltaThreshold::new(big_ratio(numer, denom)).expect("positive delta")
}

#[test]
fn criterion_03_samuels_equality_cases() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0311);
    let mut checked = 0u32;
    for _ in 0..50 {
        let n = rng.random_range(1..=8usize);
        let w = random_rational_weights(&mut rng, n);
        let d = random_rational_delta(&mut rng);
        for prefix_len in 1..=n {
            let inst = samuels_extremal(&w, &d, prefix_len).expect("valid construction");
            let actual = exact_prob_below(&inst, &d).expect("within budget").prob_below;
            let expected = samuels_term(&w, &d, prefix_len).expect("index in range");
            assert_eq!(
                actual, expected,
                "prefix construction at i={prefix_len} missed its product"
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    criterion(
        3,
        "prefix constructions hit their products exactly",
        elapsed < Duration::from_secs(30),
        format!("{checked} exact equalities over 50 draws, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_04_feige_equality_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0412);
    for _ in 0..50 {
        let n = rng.random_range(1..=8usize);
        let w = random_rational_weights(&mut rng, n);
        let d = random_rational_delta(&mut rng);
        let inst = feige_extremal(&w, &d).expect("valid construction");
        let actual = exact_prob_below(&inst, &d).expect("within budget").prob_below;
        let expected = d.delta().clone() / (d.delta().clone() + w.max_weight().clone());
        assert_eq!(actual, expected, "feige construction missed δ/(δ+M)");
    }
    criterion(
        4,
        "feige construction hits δ/(δ+M) exactly",
        true,
        "50 exact equalities".to_owned(),
    );
}

#[test]
fn criterion_05_iid_case_and_limit() {
    // exact closed form for n ≤ 16, rational mode
    let mut rng = ChaCha8Rng::seed_from_u64(0x0513);
    for n in 1..=16usize {
        let d = random_rational_delta(&mut rng);
        let inst = iid_extremal::<BigRational>(n, &d).expect("valid construction");
        let actual = exact_prob_below(&inst, &d).expect("within budget").prob_below;
        let one = <BigRational as Scalar>::one();
        let base = one.clone()
            - one.clone() / (BigRational::from_integer(n.into()) * d.threshold().clone());
        let expected = (0..n).fold(one, |acc, _| acc * base.clone());
        assert_eq!(actual, expected, "iid case failed at n={n}");
    }

    // closed-form value at n = 1e6 approaches the limit
    let mut max_gap = 0.0f64;
    for delta in [0.01, 0.1, 1.0] {
        let d = DeltaThreshold::new(delta).expect("positive delta");
        let n = 1_000_000.0f64;
        let closed = (1.0 - 1.0 / (n * d.threshold())).powi(1_000_000);
        let gap = (closed - iid_limit(&d)).abs();
        max_gap = max_gap.max(gap);
        assert!(gap <= IID_LIMIT_TOL, "delta={delta}: gap {gap:.3e}");
    }

    // the limit sits just above 1/e for small δ
    let small = iid_limit(&DeltaThreshold::new(1e-3).expect("positive delta"));
    let excess = small - INV_E;
    assert!(
        excess > 0.0 && excess <= IID_SMALL_DELTA_GAP,
        "limit excess {excess:.3e}"
    );

    criterion(
        5,
        "iid case exact for n ≤ 16 and limit behaviour",
        true,
        format!("worst closed-form gap at n=1e6: {max_gap:.3e}, limit excess {excess:.3e}"),
    );
}

// ---------------------------------------------------------------------
// criterion 6: lemma grid suite
// ---------------------------------------------------------------------

#[test]
fn criterion_06_lemma_suite() {
    let start = Instant::now();
    let report = sweep_lemmas();
    let elapsed = start.elapsed();
    let margin_checks = [
        "lemma1-direct",
        "lemma1-difference-form",
        "lemma2-monotone-gap",
        "lemma3-floor-margin",
        "lemma4-eta-negative",
        "lemma4-eta-prime-negative",
    ];
    let worst_margin = margin_checks
        .iter()
        .map(|c| report.per_check[*c])
        .fold(f64::INFINITY, f64::min);
    let pass = report.failure_count == 0
        && worst_margin >= -MARGIN_TOL
        && report.per_check["lemma4-second-difference"] <= CURVATURE_TOL
        && report.per_check["lemma4-eta-limit"] <= ETA_LIMIT_TOL
        && report.per_check["phi-splice"] <= CURVATURE_TOL
        && elapsed < Duration::from_secs(30);
    criterion(
        6,
        "lemma grids",
        pass,
        format!(
            "{} checks, worst margin {worst_margin:.3e}, max second diff {:.3e}, \
             eta limit {:.3e}, {elapsed:.2?}",
            report.checks,
            report.per_check["lemma4-second-difference"],
            report.per_check["lemma4-eta-limit"],
        ),
    );
}

// ---------------------------------------------------------------------
// criterion 7: closed forms vs finite differences
// ---------------------------------------------------------------------

fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn criterion_07_derivative_cross_checks() {
    let alphas = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
    let t_grid: Vec<f64> = (4..=196).map(|k| k as f64 / 200.0).collect(); // 0.02..0.98
    let mut counts = [0u32; 4];
    let mut worst = [0.0f64; 4];

    // t³·h″ against the second difference of the slice itself
    for &alpha in &alphas {
        let a = AlphaSlice::new(alpha).expect("alpha > 0");
        let h = |x: f64| h_alpha(a, x).expect("x within [0,1]");
        for &t in &t_grid {
            let step = 1e-4;
            let second = (h(t + step) - 2.0 * h(t) + h(t - step)) / (step * step);
            let oracle = t.powi(3) * second;
            let err = rel_error(eta(a, t).expect("interior t"), oracle);
            worst[0] = worst[0].max(err);
            counts[0] += 1;
        }
    }

    // η′ against the central difference of η
    for &alpha in &alphas {
        let a = AlphaSlice::new(alpha).expect("alpha > 0");
        for &t in &t_grid {
            let step = 1e-6;
            let oracle =
                (eta(a, t + step).expect("interior") - eta(a, t - step).expect("interior"))
                    / (2.0 * step);
            let err = rel_error(eta_prime(a, t).expect("interior t"), oracle);
            worst[1] = worst[1].max(err);
            counts[1] += 1;
        }
    }

    // g′ against the central difference of g(ρ) = Φ − log(ρ/(μ+ρ)),
    // skipping the thin band around g′'s interior zero where a relative
    // comparison is ill-conditioned
    let mu_grid: Vec<f64> = (1..=49).map(|k| k as f64 / 50.0).collect(); // 0.02..0.98
    let rho_grid: Vec<f64> = (0..40)
        .map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 39.0))
        .collect();
    for &mu in &mu_grid {
        let g = |rho: f64| {
            phi(PhiPoint::new(mu, rho).expect("in domain")) - (rho / (mu + rho)).ln()
        };
        for &rho in &rho_grid {
            let closed = g_prime_lemma3(PhiPoint::new(mu, rho).expect("in domain"))
                .expect("interior mu");
            if closed.abs() < 1e-4 {
                continue;
            }
            let step = 1e-6 * rho.max(1.0);
            let oracle = (g(rho + step) - g(rho - step)) / (2.0 * step);
            let err = rel_error(closed, oracle);
            worst[2] = worst[2].max(err);
            counts[2] += 1;
        }
    }

    // ∂Φ/∂ρ against the central difference of Φ in ρ
    for &mu in &mu_grid {
        for &rho in &rho_grid {
            let closed =
                partial2_phi(PhiPoint::new(mu, rho).expect("in domain")).expect("interior mu");
            let step = 1e-6 * rho.max(1.0);
            let oracle = (phi(PhiPoint::new(mu, rho + step).expect("in domain"))
                - phi(PhiPoint::new(mu, rho - step).expect("in domain")))
                / (2.0 * step);
            let err = rel_error(closed, oracle);
            worst[3] = worst[3].max(err);
            counts[3] += 1;
        }
    }

    let pass = counts.iter().all(|&c| c >= 1000)
        && worst.iter().all(|&e| e <= DERIVATIVE_REL_TOL);
    criterion(
        7,
        "derivative formulas match finite differences",
        pass,
        format!(
            "eta {}@{:.2e}, eta' {}@{:.2e}, g' {}@{:.2e}, d2phi {}@{:.2e}",
            counts[0], worst[0], counts[1], worst[1], counts[2], worst[2], counts[3], worst[3]
        ),
    );
}

// ---------------------------------------------------------------------
// criterion 8: Monte Carlo vs exact engine
// ---------------------------------------------------------------------

fn random_float_instance(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_atoms: usize,
) -> (Instance<f64>, DeltaThreshold<f64>) {
    let n = rng.random_range(1..=max_n);
    let weights: Vec<f64> = (0..n)
        .map(|_| (-(1.0 - rng.random::<f64>()).ln()).max(1e-12))
        .collect();
    let w = WeightVector::normalized(weights).expect("positive weights");
    let vars: Vec<DiscreteVar<f64>> = (0..n)
        .map(|_| loop {
            let k = rng.random_range(2..=max_atoms);
            let mut values: Vec<f64> = Vec::with_capacity(k);
            while values.len() < k {
                let v = rng.random_range(0..=80u32) as f64 * 0.05;
                if !values.contains(&v) {
                    values.push(v);
                }
            }
            let mut probs: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = probs.iter().sum();
            for p in &mut probs {
                *p /= total;
            }
            let mean: f64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
            if mean < 0.05 {
                continue;
            }
            let atoms: Vec<(f64, f64)> = values
                .iter()
                .zip(&probs)
                .map(|(v, p)| (v / mean, *p))
                .collect();
            if let Ok(var) = DiscreteVar::new(atoms) {
                break var;
            }
        })
        .collect();
    let delta = (rng.random::<f64>() * (2.0f64.ln() - 0.05f64.ln()) + 0.05f64.ln()).exp();
    (
        Instance::new(w, vars).expect("lengths match"),
        DeltaThreshold::new(delta).expect("positive delta"),
    )
}

#[test]
fn criterion_08_monte_carlo_agrees_with_exact() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0815);
    let cases = 100;
    let mut agreeing = 0u32;
    let mut conjecture_ok = true;
    for case in 0..cases {
        let (inst, d) = random_float_instance(&mut rng, 6, 3);
        assert!(support_size(&inst) <= 729);
        let exact = exact_prob_below(&inst, &d).expect("tiny support").prob_below;
        let mc = monte_carlo_below(&inst, &d, 1_000_000, 0xACC0 + case).expect("samples ≥ 100");
        if (mc.estimate - exact).abs() <= 4.0 * mc.half_width_95 {
            agreeing += 1;
        }
        // desk-scale spot check of both conjectured bounds on the way
        let report = smalldev_core::bounds::implication_margin(inst.weights(), &d);
        if exact < report.samuels - MARGIN_TOL || exact < report.feige - MARGIN_TOL {
            conjecture_ok = false;
        }
    }
    let elapsed = start.elapsed();
    criterion(
        8,
        "Monte Carlo vs exact engine",
        agreeing >= 95 && conjecture_ok && elapsed < Duration::from_secs(120),
        format!("{agreeing}/{cases} within 4 half-widths, bounds hold on all, {elapsed:.2?}"),
    );
}

// ---------------------------------------------------------------------
// criterion 9: counterexample search recovers the constructions
// ---------------------------------------------------------------------

#[test]
fn criterion_09_search_recovers_constructions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0916);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_soundness = f64::INFINITY;
    for case in 0..20u64 {
        let n = rng.random_range(1..=5usize);
        let w = sample_weights(n, WeightSampler::DirichletUniform, 0x91600 + case)
            .expect("n ≥ 1");
        let delta = (rng.random::<f64>() * (2.0f64.ln() - 0.05f64.ln()) + 0.05f64.ln()).exp();
        let d = DeltaThreshold::new(delta).expect("positive delta");
        let cfg = SearchConfig {
            restarts: 50,
            max_evals: 400,
            seed: 0x9F0 + case,
            ..SearchConfig::default()
        };
        let report = search_counterexample(&w, &d, &cfg).expect("search ran");
        worst_gap = worst_gap.max(report.gap_vs_samuels);
        worst_soundness = worst_soundness.min(report.best_prob - report.samuels);
        assert!(
            report.best_prob >= report.samuels - SEARCH_SOUNDNESS_TOL,
            "case {case}: found {} below bound {}",
            report.best_prob,
            report.samuels
        );
        assert!(
            report.gap_vs_samuels < SEARCH_GAP_TOL,
            "case {case}: warm starts should pin the gap, got {}",
            report.gap_vs_samuels
        );
    }
    let elapsed = start.elapsed();
    criterion(
        9,
        "two-point search never undercuts the bound and recovers it",
        elapsed < Duration::from_secs(300),
        format!(
            "20 searches, worst gap {worst_gap:.3e}, worst soundness slack {worst_soundness:.3e}, \
             {elapsed:.2?}"
        ),
    );
}

// ---------------------------------------------------------------------
// criterion 10: pruning soundness and mode agreement
// ---------------------------------------------------------------------

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
        if diff.abs() <= 1e-12 {
            Side::At
        } else if diff < 0.0 {
            Side::Below
        } else {
            Side::Above
        }
    }
}

/// Unpruned oracle: walks the whole product support with an odometer in
/// the same lexicographic order the engine uses, so float-mode sums are
/// comparable term for term.
fn naive_prob<R: Scalar>(inst: &Instance<R>, d: &DeltaThreshold<R>) -> (R, R) {
    let n = inst.n();
    let mut below = R::zero();
    let mut at = R::zero();
    let mut idx = vec![0usize; n];
    loop {
        let mut z = R::zero();
        let mut p = R::one();
        for ((choice, var), weight) in idx.iter().zip(inst.vars()).zip(inst.weights().weights()) {
            let atom = &var.atoms()[*choice];
            z = z + weight.clone() * atom.value.clone();
            p = p * atom.prob.clone();
        }
        match classify(&z, d.threshold()) {
            Side::Below => below = below + p,
            Side::At => at = at + p,
            Side::Above => {}
        }
        let mut k = n;
        loop {
            if k == 0 {
                return (below, at);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < inst.vars()[k].atoms().len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn random_rational_instance(
    rng: &mut ChaCha8Rng,
    max_n: usize,
) -> (Instance<BigRational>, DeltaThreshold<BigRational>) {
    let n = rng.random_range(1..=max_n);
    let w = random_rational_weights(rng, n);
    let d = random_rational_delta(rng);
    let vars: Vec<DiscreteVar<BigRational>> = (0..n)
        .map(|_| loop {
            let k = rng.random_range(2..=3usize);
            let mut values: Vec<i64> = Vec::with_capacity(k);
            while values.len() < k {
                let v = rng.random_range(0..=12i64);
                if !values.contains(&v) {
                    values.push(v);
                }
            }
            let probs: Vec<i64> = (0..k).map(|_| rng.random_range(1..20i64)).collect();
            let total: i64 = probs.iter().sum();
            let dot: i64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
            if dot == 0 {
                continue;
            }
            // value·4 grid scaled so the mean is exactly one
            let mean = big_ratio(dot, 4 * total);
            let atoms: Vec<(BigRational, BigRational)> = values
                .iter()
                .zip(&probs)
                .map(|(v, p)| (big_ratio(*v, 4) / mean.clone(), big_ratio(*p, total)))
                .collect();
            break DiscreteVar::new(atoms).expect("unit mean by construction");
        })
        .collect();
    (
        Instance::new(w, vars).expect("lengths match"),
        d,
    )
}

fn to_float_instance(inst: &Instance<BigRational>) -> Instance<f64> {
    let raw = inst.to_raw();
    let weights: Vec<f64> = raw.weights.iter().map(Scalar::to_f64).collect();
    let vars: Vec<DiscreteVar<f64>> = raw
        .vars
        .iter()
        .map(|atoms| {
            DiscreteVar::new(
                atoms
                    .iter()
                    .map(|(v, p)| (v.to_f64(), p.to_f64()))
                    .collect(),
            )
            .expect("float images stay valid within tolerance")
        })
        .collect();
    Instance::new(
        WeightVector::new(weights).expect("float weights still sum to one"),
        vars,
    )
    .expect("lengths match")
}

#[test]
fn criterion_10_pruning_soundness_and_mode_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1017);
    let mut mode_comparisons = 0u32;
    let mut worst_mode_gap = 0.0f64;
    for case in 0..60 {
        let (inst, d) = random_rational_instance(&mut rng, 5);
        assert!(support_size(&inst) <= 1 << 12);

        // pruned engine vs unpruned oracle, exact rational equality
        let pruned = exact_prob_below(&inst, &d).expect("within budget");
        let (below, at) = naive_prob(&inst, &d);
        assert_eq!(pruned.prob_below, below, "case {case}: pruning changed the result");
        assert_eq!(pruned.atoms_at_threshold, at, "case {case}");

        // same instance in float mode: engine vs oracle bitwise
        let finst = to_float_instance(&inst);
        let fd = DeltaThreshold::new(d.delta().to_f64()).expect("positive delta");
        let fpruned = exact_prob_below(&finst, &fd).expect("within budget");
        let (fbelow, fat) = naive_prob(&finst, &fd);
        assert_eq!(fpruned.prob_below, fbelow, "case {case}: float pruning drifted");
        assert_eq!(fpruned.atoms_at_threshold, fat, "case {case}");

        // rational vs float agreement away from the threshold band
        if pruned.atoms_at_threshold == <BigRational as Scalar>::zero() {
            let gap = (pruned.prob_below.to_f64() - fpruned.prob_below).abs();
            worst_mode_gap = worst_mode_gap.max(gap);
            assert!(
                gap <= MODE_AGREEMENT_TOL,
                "case {case}: modes disagree by {gap:.3e}"
            );
            mode_comparisons += 1;
        }
    }

    // the extremal constructions sit exactly on the threshold; they must
    // agree between pruned and unpruned runs too
    let w = random_rational_weights(&mut ChaCha8Rng::seed_from_u64(0x1018), 6);
    let d = DeltaThreshold::new(big_ratio(1, 7)).expect("positive delta");
    for prefix_len in 1..=6 {
        let inst = samuels_extremal(&w, &d, prefix_len).expect("valid construction");
        let pruned = exact_prob_below(&inst, &d).expect("within budget");
        let (below, at) = naive_prob(&inst, &d);
        assert_eq!(pruned.prob_below, below);
        assert_eq!(pruned.atoms_at_threshold, at);
    }

    criterion(
        10,
        "pruning soundness and mode agreement",
        mode_comparisons >= 30,
        format!(
            "60 pruned/unpruned equalities (plus 6 threshold-heavy), \
             {mode_comparisons} mode comparisons, worst gap {worst_mode_gap:.3e}"
        ),
    );
}
