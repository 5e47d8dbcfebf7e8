//! `smalldev` — lower bounds for small-deviation probabilities of
//! weighted sums, on the command line.
//!
//! Every subcommand emits machine-readable JSON (or CSV where a run has
//! per-case records). Exit codes: 0 on success with all margins within
//! tolerance, 1 when any checked property is violated (a counterexample
//! signal), 2 on usage or input errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use smalldev_core::bounds;
use smalldev_core::exact::{self, ProbResult};
use smalldev_core::explorer::{
    self, SearchConfig, SweepConfig, SweepRow, WeightSampler, IDENTITY_TOLERANCE,
    SEARCH_SOUNDNESS_TOLERANCE,
};
use smalldev_core::extremal::{self, EqualityEntry, EqualityReport};
use smalldev_core::model::{DeltaThreshold, WeightVector};
use smalldev_core::numeric::{BigRational, Mode, Scalar};
use smalldev_core::phi::{
    check_lemma1, check_lemma3, eta, eta_prime, f_lemma1, g_prime_lemma3, h_alpha, partial2_phi,
    phi, phi_series, AlphaSlice, PhiPoint,
};
use smalldev_core::schema::{instance_from_json, instance_to_json, AnyInstance, InstanceJson};

#[derive(Parser)]
#[command(
    name = "smalldev",
    version,
    about = "Lower bounds for P(Z < 1+delta), Z a weighted sum of independent unit-mean variables",
    after_help = "Exit codes: 0 ok, 1 property violation (counterexample signal), 2 usage/input error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Numeric mode for weights/delta; instance files carry their own.
    /// Defaults: float for bounds/chain/sweep/search, rational for
    /// extremal.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Seed for every randomized subcommand (bit-reproducible).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the payload to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; csv is available for sweep and lemmas.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Margin tolerance for the exit-code contract (the chain identity
    /// step keeps its own 1e-10 limit).
    #[arg(long, global = true, default_value_t = 1e-12)]
    tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Rational,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(value: ModeArg) -> Mode {
        match value {
            ModeArg::Rational => Mode::Rational,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate both bounds and their difference for (weights, delta).
    Bounds(WeightsArgs),
    /// Evaluate the four-step inequality chain at the minimizing index.
    Chain(WeightsArgs),
    /// Evaluate phi and related closed forms at a point.
    Phi(PhiArgs),
    /// Run the lemma grids; prints worst margins per check.
    Lemmas,
    /// Exact P(Z < T) for an instance file.
    Exact(ExactArgs),
    /// Seeded Monte Carlo estimate of P(Z < T) for an instance file.
    Mc(McArgs),
    /// Construct an equality-achieving instance; --verify checks it.
    Extremal(ExtremalArgs),
    /// Random sweep of the implication margin and proof chain.
    Sweep(SweepArgs),
    /// Derivative-free search for counterexamples (two-point family).
    Search(SearchArgs),
}

#[derive(Args)]
struct WeightsArgs {
    /// Comma-separated weights; "p/q" fractions and decimals accepted.
    #[arg(long, required_unless_present = "weights_file", conflicts_with = "weights_file")]
    weights: Option<String>,
    /// File containing whitespace- or comma-separated weights.
    #[arg(long)]
    weights_file: Option<PathBuf>,
    /// Divide the weights by their sum first.
    #[arg(long)]
    normalize: bool,
    /// The slack delta > 0.
    #[arg(long)]
    delta: String,
}

#[derive(Args)]
struct PhiArgs {
    /// First argument of phi, in [0, 1].
    #[arg(long)]
    mu: Option<f64>,
    /// Second argument of phi, > 0.
    #[arg(long)]
    rho: Option<f64>,
    /// Ray slope for the concavity slice t -> phi(t, alpha t).
    #[arg(long)]
    alpha: Option<f64>,
    /// Position on the slice, in [0, 1].
    #[arg(long)]
    t: Option<f64>,
    /// Argument for the series form phi(s) = log(1-s)/s, in [0, 1).
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args)]
struct ExactArgs {
    /// Instance JSON file (mode is read from the file).
    #[arg(long)]
    instance: PathBuf,
    /// The slack delta > 0, parsed in the file's mode.
    #[arg(long)]
    delta: String,
    /// Cap on enumerated leaves (default 2^24).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct McArgs {
    /// Instance JSON file (mode is read from the file).
    #[arg(long)]
    instance: PathBuf,
    /// The slack delta > 0, parsed in the file's mode.
    #[arg(long)]
    delta: String,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Args)]
#[command(group = ArgGroup::new("family").required(true).args(["feige", "samuels", "iid"]))]
struct ExtremalArgs {
    /// The two-point construction attaining delta/(delta+M).
    #[arg(long)]
    feige: bool,
    /// The per-prefix construction attaining the i-th product
    /// (--index picks i for the dump; --verify checks every i).
    #[arg(long)]
    samuels: bool,
    /// The uniform iid construction attaining (1 - 1/(n(1+delta)))^n.
    #[arg(long)]
    iid: bool,
    /// Prefix length for --samuels (1-based).
    #[arg(long)]
    index: Option<usize>,
    /// Number of variables for --iid.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, conflicts_with = "weights_file")]
    weights: Option<String>,
    #[arg(long)]
    weights_file: Option<PathBuf>,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    delta: String,
    /// Check the exact probability against the closed form (rational
    /// mode only) instead of dumping the instance.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 100_000)]
    count: u64,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    #[arg(long, default_value_t = 1e-4)]
    delta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    delta_max: f64,
    /// dirichlet-uniform | geometric-decay | one-dominant | all
    #[arg(long, default_value = "all")]
    sampler: String,
    /// Shorthand for --format csv (per-instance records).
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    inputs: WeightsArgs,
    #[arg(long, default_value_t = 50)]
    restarts: u32,
    #[arg(long, default_value_t = 500)]
    max_evals: u32,
}

#[derive(thiserror::Error, Debug)]
enum CliError {
    #[error("{0}")]
    Message(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Parse(#[from] smalldev_core::numeric::NumericParseError),
    #[error(transparent)]
    Model(#[from] smalldev_core::model::ModelError),
    #[error(transparent)]
    Schema(#[from] smalldev_core::schema::SchemaError),
    #[error(transparent)]
    Bounds(#[from] smalldev_core::bounds::BoundsError),
    #[error(transparent)]
    Exact(#[from] smalldev_core::exact::ExactError),
    #[error(transparent)]
    Extremal(#[from] smalldev_core::extremal::ExtremalError),
    #[error(transparent)]
    Explorer(#[from] smalldev_core::explorer::ExplorerError),
    #[error(transparent)]
    Phi(#[from] smalldev_core::phi::PhiError),
}

fn bail<T>(message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Message(message.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Bounds(args) => cmd_bounds(&cli, args),
        Command::Chain(args) => cmd_chain(&cli, args),
        Command::Phi(args) => cmd_phi(&cli, args),
        Command::Lemmas => cmd_lemmas(&cli),
        Command::Exact(args) => cmd_exact(&cli, args),
        Command::Mc(args) => cmd_mc(&cli, args),
        Command::Extremal(args) => cmd_extremal(&cli, args),
        Command::Sweep(args) => cmd_sweep(&cli, args),
        Command::Search(args) => cmd_search(&cli, args),
    }
}

// ---------------------------------------------------------------------
// input helpers
// ---------------------------------------------------------------------

fn weight_tokens(args: &WeightsArgs) -> Result<Vec<String>, CliError> {
    let text = match (&args.weights, &args.weights_file) {
        (Some(inline), None) => inline.clone(),
        (None, Some(path)) => fs::read_to_string(path)?,
        _ => return bail("provide exactly one of --weights or --weights-file"),
    };
    let tokens: Vec<String> = text
        .split([',', ' ', '\t', '\n', '\r'])
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    if tokens.is_empty() {
        return bail("no weights given");
    }
    Ok(tokens)
}

fn build_inputs<R: Scalar>(
    args: &WeightsArgs,
) -> Result<(WeightVector<R>, DeltaThreshold<R>), CliError> {
    let tokens = weight_tokens(args)?;
    let raw = tokens
        .iter()
        .map(|t| R::parse_text(t))
        .collect::<Result<Vec<R>, _>>()?;
    let weights = if args.normalize {
        WeightVector::normalized(raw)?
    } else {
        WeightVector::new(raw)?
    };
    let delta = DeltaThreshold::new(R::parse_text(&args.delta)?)?;
    Ok((weights, delta))
}

/// Float inputs; in rational mode the input is validated exactly first
/// and then converted.
fn float_inputs(
    cli: &Cli,
    args: &WeightsArgs,
) -> Result<(WeightVector<f64>, DeltaThreshold<f64>), CliError> {
    match cli.mode.map(Mode::from).unwrap_or(Mode::Float) {
        Mode::Float => build_inputs::<f64>(args),
        Mode::Rational => {
            let (w, d) = build_inputs::<BigRational>(args)?;
            let weights =
                WeightVector::new(w.weights().iter().map(Scalar::to_f64).collect())?;
            let delta = DeltaThreshold::new(d.delta().to_f64())?;
            Ok((weights, delta))
        }
    }
}

fn read_instance(path: &PathBuf) -> Result<(InstanceJson, AnyInstance), CliError> {
    let text = fs::read_to_string(path)?;
    let json: InstanceJson = serde_json::from_str(&text)?;
    let parsed = instance_from_json(&json)?;
    Ok((json, parsed))
}

// ---------------------------------------------------------------------
// output helpers
// ---------------------------------------------------------------------

fn write_payload(cli: &Cli, payload: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => fs::write(path, payload)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(payload.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_payload(cli, &text)
}

fn require_json(cli: &Cli, what: &str) -> Result<(), CliError> {
    if cli.format == FormatArg::Csv {
        return bail(format!("csv output is not available for {what}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------

fn cmd_bounds(cli: &Cli, args: &WeightsArgs) -> Result<bool, CliError> {
    require_json(cli, "bounds")?;
    let (w, d) = float_inputs(cli, args)?;
    let report = bounds::implication_margin(&w, &d);
    emit_json(cli, &report)?;
    Ok(report.implication_margin >= -cli.tolerance)
}

fn cmd_chain(cli: &Cli, args: &WeightsArgs) -> Result<bool, CliError> {
    require_json(cli, "chain")?;
    let (w, d) = float_inputs(cli, args)?;
    let report = bounds::proof_chain(&w, &d);
    emit_json(cli, &report)?;
    let identity_ok = report.steps[0].margin.abs() <= IDENTITY_TOLERANCE;
    let steps_ok = report.steps[1..]
        .iter()
        .all(|s| s.margin >= -cli.tolerance);
    Ok(identity_ok && steps_ok)
}

fn cmd_phi(cli: &Cli, args: &PhiArgs) -> Result<bool, CliError> {
    require_json(cli, "phi")?;
    let mut out = serde_json::Map::new();
    let mut worst_margin = f64::INFINITY;

    if let Some(s) = args.s {
        out.insert("phi_series".into(), json!(phi_series(s)?));
    }
    if let (Some(mu), Some(rho)) = (args.mu, args.rho) {
        let point = PhiPoint::new(mu, rho)?;
        out.insert("phi".into(), json!(phi(point)));
        let margin = check_lemma3(point);
        worst_margin = worst_margin.min(margin);
        out.insert("lemma3_margin".into(), json!(margin));
        if mu > 0.0 && mu < 1.0 {
            out.insert("g_prime".into(), json!(g_prime_lemma3(point)?));
            out.insert("partial2_phi".into(), json!(partial2_phi(point)?));
        }
    }
    if let (Some(alpha), Some(t)) = (args.alpha, args.t) {
        let slice = AlphaSlice::new(alpha)?;
        out.insert("h_alpha".into(), json!(h_alpha(slice, t)?));
        if t > 0.0 && t < 1.0 {
            out.insert("eta".into(), json!(eta(slice, t)?));
            out.insert("eta_prime".into(), json!(eta_prime(slice, t)?));
        }
    }
    if let Some(t) = args.t {
        if args.alpha.is_none() {
            let margin = check_lemma1(t)?;
            worst_margin = worst_margin.min(margin);
            out.insert("lemma1_margin".into(), json!(margin));
            out.insert("lemma1_difference_form".into(), json!(f_lemma1(t)?));
        }
    }
    if out.is_empty() {
        return bail("nothing to evaluate: pass --mu with --rho, --alpha with --t, --t, or --s");
    }
    emit_json(cli, &serde_json::Value::Object(out))?;
    Ok(worst_margin >= -cli.tolerance)
}

fn cmd_lemmas(cli: &Cli) -> Result<bool, CliError> {
    let report = explorer::sweep_lemmas();
    match cli.format {
        FormatArg::Json => emit_json(cli, &report)?,
        FormatArg::Csv => {
            let mut text = String::from("check,worst\n");
            for (check, worst) in &report.per_check {
                text.push_str(&format!("{check},{worst}\n"));
            }
            write_payload(cli, &text)?;
        }
    }
    Ok(report.failure_count == 0 && report.worst_margin >= -cli.tolerance)
}

fn prob_result_json<R: Scalar>(result: &ProbResult<R>) -> serde_json::Value {
    if R::EXACT {
        json!({
            "mode": "rational",
            "prob_below": result.prob_below.render_text(),
            "prob_below_float": result.prob_below.to_f64(),
            "atoms_at_threshold": result.atoms_at_threshold.render_text(),
            "atoms_at_threshold_float": result.atoms_at_threshold.to_f64(),
            "enumerated_count": result.enumerated_count,
            "pruned_count": result.pruned_count,
        })
    } else {
        json!({
            "mode": "float",
            "prob_below": result.prob_below.to_f64(),
            "atoms_at_threshold": result.atoms_at_threshold.to_f64(),
            "enumerated_count": result.enumerated_count,
            "pruned_count": result.pruned_count,
        })
    }
}

fn check_file_mode(cli: &Cli, found: Mode) -> Result<(), CliError> {
    if let Some(requested) = cli.mode.map(Mode::from) {
        if requested != found {
            return bail(format!(
                "mode mismatch: --mode {requested} but the instance file is {found}"
            ));
        }
    }
    Ok(())
}

fn cmd_exact(cli: &Cli, args: &ExactArgs) -> Result<bool, CliError> {
    require_json(cli, "exact")?;
    let (_, parsed) = read_instance(&args.instance)?;
    check_file_mode(cli, parsed.mode())?;
    let budget = args.budget.unwrap_or(exact::DEFAULT_LEAF_BUDGET);
    let payload = match &parsed {
        AnyInstance::Rational(inst) => {
            let d = DeltaThreshold::new(BigRational::parse_text(&args.delta)?)?;
            prob_result_json(&exact::exact_prob_below_budgeted(inst, &d, budget)?)
        }
        AnyInstance::Float(inst) => {
            let d = DeltaThreshold::new(f64::parse_text(&args.delta)?)?;
            prob_result_json(&exact::exact_prob_below_budgeted(inst, &d, budget)?)
        }
    };
    emit_json(cli, &payload)?;
    Ok(true)
}

fn cmd_mc(cli: &Cli, args: &McArgs) -> Result<bool, CliError> {
    require_json(cli, "mc")?;
    let (_, parsed) = read_instance(&args.instance)?;
    check_file_mode(cli, parsed.mode())?;
    let result = match &parsed {
        AnyInstance::Rational(inst) => {
            let d = DeltaThreshold::new(BigRational::parse_text(&args.delta)?)?;
            exact::monte_carlo_below(inst, &d, args.samples, cli.seed)?
        }
        AnyInstance::Float(inst) => {
            let d = DeltaThreshold::new(f64::parse_text(&args.delta)?)?;
            exact::monte_carlo_below(inst, &d, args.samples, cli.seed)?
        }
    };
    emit_json(cli, &result)?;
    Ok(true)
}

fn cmd_extremal(cli: &Cli, args: &ExtremalArgs) -> Result<bool, CliError> {
    require_json(cli, "extremal")?;
    let mode = cli.mode.map(Mode::from).unwrap_or(Mode::Rational);
    if args.verify && mode != Mode::Rational {
        return bail("--verify needs rational mode (equality is checked exactly)");
    }
    match mode {
        Mode::Rational => cmd_extremal_in::<BigRational>(cli, args),
        Mode::Float => cmd_extremal_in::<f64>(cli, args),
    }
}

fn cmd_extremal_in<R: Scalar>(cli: &Cli, args: &ExtremalArgs) -> Result<bool, CliError> {
    let delta = DeltaThreshold::new(R::parse_text(&args.delta)?)?;

    let weights = |args: &ExtremalArgs| -> Result<WeightVector<R>, CliError> {
        let inputs = WeightsArgs {
            weights: args.weights.clone(),
            weights_file: args.weights_file.clone(),
            normalize: args.normalize,
            delta: args.delta.clone(),
        };
        Ok(build_inputs::<R>(&inputs)?.0)
    };

    if args.verify {
        // reachable only with R = BigRational; re-parse exactly
        let delta = DeltaThreshold::new(BigRational::parse_text(&args.delta)?)?;
        let report = if args.iid {
            let n = match args.n {
                Some(n) if n >= 1 => n,
                _ => return bail("--iid needs --n N (at least 1)"),
            };
            verify_iid(n, &delta)?
        } else {
            let inputs = WeightsArgs {
                weights: args.weights.clone(),
                weights_file: args.weights_file.clone(),
                normalize: args.normalize,
                delta: args.delta.clone(),
            };
            let (w, _) = build_inputs::<BigRational>(&inputs)?;
            let full = extremal::verify_extremal_equality(&w, &delta)?;
            if args.feige {
                let entries: Vec<EqualityEntry> = full
                    .entries
                    .into_iter()
                    .filter(|e| e.index.is_none())
                    .collect();
                let all_equal = entries.iter().all(|e| e.equal);
                EqualityReport { entries, all_equal }
            } else {
                full
            }
        };
        emit_json(cli, &report)?;
        return Ok(report.all_equal);
    }

    let instance = if args.iid {
        let n = match args.n {
            Some(n) if n >= 1 => n,
            _ => return bail("--iid needs --n N (at least 1)"),
        };
        extremal::iid_extremal::<R>(n, &delta)?
    } else if args.feige {
        extremal::feige_extremal(&weights(args)?, &delta)?
    } else {
        let w = weights(args)?;
        let index = match args.index {
            Some(i) if i >= 1 && i <= w.n() => i,
            _ => return bail("--samuels needs --index I in 1..=n"),
        };
        extremal::samuels_extremal(&w, &delta, index)?
    };
    emit_json(cli, &instance_to_json(&instance))?;
    Ok(true)
}

fn verify_iid(n: usize, d: &DeltaThreshold<BigRational>) -> Result<EqualityReport, CliError> {
    let inst = extremal::iid_extremal(n, d)?;
    let actual = exact::exact_prob_below(&inst, d)?.prob_below;
    let one = <BigRational as Scalar>::one();
    let base = one.clone()
        - one.clone() / (<BigRational as Scalar>::from_usize(n) * d.threshold().clone());
    let expected = (0..n).fold(one, |acc, _| acc * base.clone());
    let entry = EqualityEntry {
        label: format!("iid n={n}"),
        index: None,
        equal: actual == expected,
        expected: expected.render_text(),
        actual: actual.render_text(),
    };
    Ok(EqualityReport {
        all_equal: entry.equal,
        entries: vec![entry],
    })
}

#[derive(Serialize)]
struct SamplerSweep<'a> {
    sampler: &'a str,
    report: &'a explorer::SweepReport,
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<bool, CliError> {
    let samplers: Vec<WeightSampler> = if args.sampler == "all" {
        WeightSampler::ALL.to_vec()
    } else {
        vec![args
            .sampler
            .parse::<WeightSampler>()
            .map_err(CliError::Message)?]
    };
    let per_sampler = args.count.div_ceil(samplers.len() as u64);

    let mut runs = Vec::with_capacity(samplers.len());
    for (k, sampler) in samplers.iter().enumerate() {
        let cfg = SweepConfig {
            instance_count: per_sampler,
            n_range: (args.n_min, args.n_max),
            delta_range: (args.delta_min, args.delta_max),
            seed: cli.seed.wrapping_add(k as u64),
            weight_sampler: *sampler,
        };
        runs.push((sampler.name(), explorer::sweep_implication(&cfg)?));
    }

    let csv = args.csv || cli.format == FormatArg::Csv;
    if csv {
        let mut text = String::from(SweepRow::CSV_HEADER);
        text.push('\n');
        for (_, run) in &runs {
            for row in &run.rows {
                text.push_str(&row.to_csv());
                text.push('\n');
            }
        }
        write_payload(cli, &text)?;
    } else {
        let reports: Vec<SamplerSweep> = runs
            .iter()
            .map(|(name, run)| SamplerSweep {
                sampler: name,
                report: &run.report,
            })
            .collect();
        emit_json(cli, &reports)?;
    }

    let ok = runs.iter().all(|(_, run)| {
        run.report.failure_count == 0 && run.report.worst_margin >= -cli.tolerance
    });
    Ok(ok)
}

fn cmd_search(cli: &Cli, args: &SearchArgs) -> Result<bool, CliError> {
    require_json(cli, "search")?;
    let (w, d) = float_inputs(cli, &args.inputs)?;
    let cfg = SearchConfig {
        restarts: args.restarts,
        max_evals: args.max_evals,
        seed: cli.seed,
        ..SearchConfig::default()
    };
    let report = explorer::search_counterexample(&w, &d, &cfg)?;
    emit_json(cli, &report)?;
    Ok(report.best_prob >= report.samuels - SEARCH_SOUNDNESS_TOLERANCE)
}
