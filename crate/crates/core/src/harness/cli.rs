//! `wiener` command line.
//!
//! Every subcommand prints a JSON [`Report`] on stdout. Experiments also
//! write one CSV row per trial when `--out` is given. `--config FILE` reads
//! `key = value` lines that act as flags placed before the command-line
//! ones, so explicit flags win. Exit status: 0 on success, 1 on an
//! operational error, 2 on invalid arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::report::{write_csv, Report, TrialRecord};
use super::{
    exact_recovery_probability, mc_condition_iv_probability, mc_recovery_probability, omega_concentration_check,
    recovery_sweep, DeviationScale, ExperimentConfig, OmegaSampling,
};
use crate::certificates::{make_kernel, omega_parseval_lower_bound, verify_implication_iv_to_recovery};
use crate::error::{Error, Result};
use crate::lacunary::{
    band_recovery_experiment, band_threshold, check_theorem_conditions, construct_failure_example, majorant_chain,
    single_tone_off_band, theta_kernel, LacunaryParams,
};
use crate::rng::{random_phase, random_subset, trial_rng};
use crate::solver::{
    dh_decompose_l0, dh_decompose_l1, decompose::L0_MAX_N, FrequencySamples, MinimalExtensionSolver, SolverConfig,
};
use crate::spectral::{dft, Signal, Spectrum, SupportSet, ZeroTolerance};
use crate::uncertainty::{max_zero_run, sum_bound, verify_support_product, CombWitness, SupportProduct, SupportSum};

#[derive(Debug, Parser)]
#[command(name = "wiener", version, about = "Sparse recovery by l1-minimal extension on Z_N")]
struct Cli {
    /// File of `key = value` lines applied as flags before the command line.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recover a signal from frequency samples.
    #[command(args_override_self = true)]
    Recover(RecoverArgs),
    /// Check the kernel condition for a frequency set and test recovery.
    #[command(args_override_self = true)]
    Certify(CertifyArgs),
    /// Support-size uncertainty checks for one signal.
    #[command(args_override_self = true)]
    Uncertainty(UncertaintyArgs),
    /// Split a signal into time-sparse and frequency-sparse parts.
    #[command(args_override_self = true)]
    Dh(DhArgs),
    /// Gaussian majorants and step/radius conditions.
    #[command(args_override_self = true)]
    Lacunary(LacunaryArgs),
    /// Recovery of well-separated supports from a frequency band.
    #[command(args_override_self = true)]
    Band(BandArgs),
    /// Monte Carlo failure rate of the kernel condition.
    #[command(name = "mc-iv", args_override_self = true)]
    McIv(McArgs),
    /// Monte Carlo exact-recovery rate.
    #[command(name = "mc-recovery", args_override_self = true)]
    McRecovery(McRecoveryArgs),
    /// Concentration of the Bernoulli sample size.
    #[command(name = "mc-omega", args_override_self = true)]
    McOmega(McOmegaArgs),
    /// Build a signal that band-limited l1 extension provably misses.
    #[command(name = "failure-example", args_override_self = true)]
    FailureExample(FailureArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct SolverArgs {
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    eps_feasibility: f64,
    #[arg(long, default_value_t = 1e-10)]
    eps_step: f64,
    #[arg(long, default_value_t = 1.0)]
    relaxation: f64,
    /// Relative l2 error under which recovery counts as exact.
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            max_iter: self.max_iter,
            eps_feasibility: self.eps_feasibility,
            eps_step: self.eps_step,
            relaxation: self.relaxation,
            recovery_rel_tol: self.rel_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Serialize)]
struct RecoverArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Sampled frequencies, comma separated.
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<usize>>,
    /// JSON array of {"omega": int, "re": float, "im": float}.
    #[arg(long)]
    samples_file: Option<PathBuf>,
    /// Real signal to sample on Ω (also used as ground truth).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    signal: Option<Vec<f64>>,
    /// Real ground truth for the recovered flag.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    truth: Option<Vec<f64>>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Deserialize)]
struct SampleEntry {
    omega: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Args, Serialize)]
struct CertifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: usize,
    /// Frequency set, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "omega_size")]
    omega: Option<Vec<usize>>,
    /// Size of a random frequency set drawn from `--seed`.
    #[arg(long)]
    omega_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
struct UncertaintyArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Use the subgroup indicator of order √N (N a perfect square).
    #[arg(long)]
    comb: bool,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    signal: Option<Vec<f64>>,
    /// Indicator of these time indices.
    #[arg(long, value_delimiter = ',')]
    support: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1e-10)]
    eps_zero: f64,
}

#[derive(Debug, Args, Serialize)]
struct DhArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    signal: Vec<f64>,
    /// Also run the exhaustive l0 search (N ≤ 16).
    #[arg(long)]
    exhaustive: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
struct LacunaryArgs {
    #[arg(long, default_value_t = 1)]
    nu: u32,
    #[arg(long)]
    d: f64,
    #[arg(long)]
    r: f64,
    /// Gaussian scale; defaults to √(d/r).
    #[arg(long)]
    a: Option<f64>,
    /// Also evaluate the periodized Gaussian at this point.
    #[arg(long, allow_hyphen_values = true)]
    theta_at: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
struct BandArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Defaults to ⌈10·(N/d)·√(log d)⌉, capped at N.
    #[arg(long)]
    band_size: Option<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
struct McArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: usize,
    /// Bernoulli sampling parameter.
    #[arg(long, conflicts_with = "omega", required_unless_present = "omega")]
    tau: Option<f64>,
    /// Fixed frequency-set size.
    #[arg(long)]
    omega: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    n_phases: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    m_exponent: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

impl McArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let omega = match (self.tau, self.omega) {
            (Some(tau), None) => OmegaSampling::Bernoulli { tau },
            (None, Some(omega_size)) => OmegaSampling::FixedSize { omega_size },
            _ => return Err(Error::InvalidArgument("give exactly one of --tau and --omega".into())),
        };
        let cfg = ExperimentConfig {
            n: self.n,
            t_sparsity: self.t,
            omega,
            trials: self.trials,
            master_seed: self.seed,
            m_exponent: self.m_exponent,
            delta: self.delta,
            n_phases: self.n_phases,
            solver: self.solver.config()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Serialize)]
struct McRecoveryArgs {
    #[command(flatten)]
    common: McArgs,
    /// Also sweep these frequency-set sizes with nested sets.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    /// Exact recovery probability over all frequency sets for this many
    /// planted signals (Bernoulli sampling, small N).
    #[arg(long)]
    exact_signals: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScaleArg {
    Log,
    SqrtLog,
    None,
}

impl From<ScaleArg> for DeviationScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Log => DeviationScale::Log,
            ScaleArg::SqrtLog => DeviationScale::SqrtLog,
            ScaleArg::None => DeviationScale::None,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct McOmegaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
    scale: ScaleArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct FailureArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    band_start: usize,
    #[arg(long)]
    band_size: usize,
    #[arg(long, default_value_t = 1)]
    keep: usize,
    /// Random complex spectrum off the band instead of a single tone.
    #[arg(long)]
    random_spectrum: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Runs the CLI on `args` (including the program name), printing to the
/// process streams.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().ansi().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(cli.command).and_then(|r| r.to_json()) {
        Ok(json) => {
            if writeln!(out, "{json}").is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::EmptySet(_) | Error::EmptyConstraint => 2,
        _ => 1,
    }
}

/// Removes `--config FILE` and splices the file's settings in right after
/// the subcommand name.
fn expand_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            if i + 1 >= argv.len() {
                return Err(Error::InvalidArgument("--config needs a file".into()));
            }
            path = Some(PathBuf::from(argv.remove(i + 1)));
            argv.remove(i);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let flags = config_flags(&path)?;
    let Some(sub) = argv.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(argv);
    };
    let at = sub + 2;
    argv.splice(at..at, flags);
    Ok(argv)
}

fn config_flags(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path)?;
    let mut flags = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("{}:{}: expected key = value", path.display(), lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        match value.trim() {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            v => {
                flags.push(format!("--{key}").into());
                flags.push(v.into());
            }
        }
    }
    Ok(flags)
}

fn real_signal(values: &[f64], n: Option<usize>) -> Result<Signal> {
    if let Some(n) = n {
        if n != values.len() {
            return Err(Error::InvalidArgument(format!("--n {n} but {} signal values", values.len())));
        }
    }
    Signal::from_real(values)
}

fn write_rows(out: &Option<PathBuf>, rows: &[TrialRecord]) -> Result<()> {
    match out {
        Some(path) => write_csv(path, rows),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct RecoverResults {
    #[serde(flatten)]
    report: crate::solver::RecoveryReport,
    relative_error: Option<f64>,
    max_sample_mismatch: f64,
}

fn recover(a: RecoverArgs) -> Result<Report> {
    let cfg = a.solver.config()?;
    let (samples, signal_truth) = if let Some(path) = &a.samples_file {
        let entries: Vec<SampleEntry> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let n = a.n.ok_or(Error::InvalidArgument("--samples-file needs --n".into()))?;
        let mut entries = entries;
        entries.sort_by_key(|e| e.omega);
        let omega = SupportSet::new(n, entries.iter().map(|e| e.omega))?;
        if let Some(list) = &a.omega {
            if SupportSet::new(n, list.iter().copied())? != omega {
                return Err(Error::InvalidArgument("--omega disagrees with the samples file".into()));
            }
        }
        let values = entries.iter().map(|e| Complex64::new(e.re, e.im)).collect();
        (FrequencySamples::new(omega, values)?, None)
    } else if let Some(values) = &a.signal {
        let x = real_signal(values, a.n)?;
        let list = a.omega.as_ref().ok_or(Error::InvalidArgument("--signal needs --omega".into()))?;
        let omega = SupportSet::new(x.n(), list.iter().copied())?;
        (FrequencySamples::from_spectrum(&dft(&x), &omega)?, Some(x))
    } else {
        return Err(Error::InvalidArgument("give --samples-file or --signal".into()));
    };
    let truth = match &a.truth {
        Some(values) => Some(real_signal(values, Some(samples.n()))?),
        None => signal_truth,
    };
    let solver = MinimalExtensionSolver::new(samples.n(), cfg)?;
    let mut report = solver.recover(&samples)?;
    let relative_error = truth.as_ref().map(|x| report.assess(x, cfg.recovery_rel_tol));
    let results = RecoverResults {
        max_sample_mismatch: report.max_sample_mismatch(&samples, solver.plan()),
        report,
        relative_error,
    };
    Report::new("recover", &a, results)
}

#[derive(Serialize)]
struct CertifyResults {
    omega: Vec<usize>,
    kernel_peak: f64,
    kernel_max_off_peak: f64,
    kernel_energy: f64,
    condition_iv: crate::certificates::ConditionIv,
    implication: crate::certificates::ImplicationReport,
}

fn certify(a: CertifyArgs) -> Result<Report> {
    let cfg = a.solver.config()?;
    let omega = match (&a.omega, a.omega_size) {
        (Some(list), _) => SupportSet::new(a.n, list.iter().copied())?,
        (None, Some(size)) if size <= a.n => random_subset(&mut trial_rng(a.seed), a.n, size),
        (None, Some(size)) => return Err(Error::InvalidArgument(format!("omega size {size} exceeds N = {}", a.n))),
        (None, None) => return Err(Error::InvalidArgument("give --omega or --omega-size".into())),
    };
    let k = make_kernel(&omega)?;
    let implication = verify_implication_iv_to_recovery(&k, a.t, a.trials, a.seed, &cfg)?;
    let results = CertifyResults {
        omega: omega.members().to_vec(),
        kernel_peak: k.peak(),
        kernel_max_off_peak: k.max_off_peak(),
        kernel_energy: k.energy(),
        condition_iv: k.check_condition_iv(a.t),
        implication,
    };
    let bounds = serde_json::json!({ "parseval_lower_bound": omega_parseval_lower_bound(a.t, a.n) });
    Report::new("certify", &a, results)?.with_bounds(bounds)
}

#[derive(Serialize)]
struct UncertaintyResults {
    #[serde(flatten)]
    product: SupportProduct,
    sum_bound: SupportSum,
    max_zero_run: usize,
    zero_run_within_bound: bool,
}

fn uncertainty(a: UncertaintyArgs) -> Result<Report> {
    let tol = ZeroTolerance::new(a.eps_zero)?;
    let x = match (a.comb, &a.signal, &a.support) {
        (true, None, None) => {
            let n = a.n.ok_or(Error::InvalidArgument("--comb needs --n".into()))?;
            CombWitness::for_square(n)?.signal().clone()
        }
        (false, Some(values), None) => real_signal(values, a.n)?,
        (false, None, Some(indices)) => {
            let n = a.n.ok_or(Error::InvalidArgument("--support needs --n".into()))?;
            let s = SupportSet::new(n, indices.iter().copied())?;
            Signal::from_real(&s.mask().iter().map(|&b| f64::from(u8::from(b))).collect::<Vec<_>>())?
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --comb, --signal, --support".into())),
    };
    let product = verify_support_product(&x, tol)?;
    let run = max_zero_run(&dft(&x.normalized()), tol);
    let results = UncertaintyResults {
        sum_bound: sum_bound(&x, tol)?,
        max_zero_run: run,
        zero_run_within_bound: run < product.time_support,
        product,
    };
    Report::new("uncertainty", &a, results)
}

#[derive(Serialize)]
struct DhResults {
    l1: crate::solver::MixedDecomposition,
    l0: Option<crate::solver::L0Decomposition>,
    /// `½√N`, below which a split of smaller total support is unique.
    uniqueness_level: f64,
}

fn dh(a: DhArgs) -> Result<Report> {
    let cfg = a.solver.config()?;
    let x = real_signal(&a.signal, None)?;
    let l0 = if a.exhaustive {
        if x.n() > L0_MAX_N {
            return Err(Error::InstanceTooLarge { n: x.n(), limit: L0_MAX_N });
        }
        Some(dh_decompose_l0(&x, ZeroTolerance::DEFAULT)?)
    } else {
        None
    };
    let results = DhResults { l1: dh_decompose_l1(&x, &cfg)?, l0, uniqueness_level: 0.5 * (x.n() as f64).sqrt() };
    Report::new("dh", &a, results)
}

#[derive(Serialize)]
struct LacunaryResults {
    params: LacunaryParams,
    chain: Option<crate::lacunary::BoundReport>,
    chain_error: Option<String>,
    conditions: crate::lacunary::TheoremConditions,
    theta: Option<f64>,
}

fn lacunary(a: LacunaryArgs) -> Result<Report> {
    let params = match a.a {
        Some(scale) => LacunaryParams::new(a.nu, a.d, a.r, scale)?,
        None => LacunaryParams::with_default_scale(a.nu, a.d, a.r)?,
    };
    let (chain, chain_error) = match majorant_chain(&params) {
        Ok(b) => (Some(b), None),
        Err(e @ Error::ScaleOutOfRange(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let theta = a.theta_at.map(|t| theta_kernel(t, params.a, params.nu)).transpose()?;
    let results = LacunaryResults { params, chain, chain_error, conditions: check_theorem_conditions(&params), theta };
    Report::new("lacunary", &a, results)
}

fn band(a: BandArgs) -> Result<Report> {
    let cfg = a.solver.config()?;
    if a.d == 0 {
        return Err(Error::InvalidArgument("--d must be positive".into()));
    }
    let band_size = a.band_size.unwrap_or_else(|| (band_threshold(a.n, a.d).ceil() as usize).min(a.n));
    let report = band_recovery_experiment(a.n, a.d, band_size, a.trials, a.seed, &cfg)?;
    let rows: Vec<TrialRecord> = report
        .per_trial
        .iter()
        .map(|t| TrialRecord {
            trial_index: t.trial_index,
            seed: t.seed,
            omega_size: band_size,
            success: t.success,
            objective: Some(t.objective),
            residual: Some(t.residual),
        })
        .collect();
    write_rows(&a.out, &rows)?;
    let bounds = serde_json::json!({ "band_threshold": report.threshold, "clears_threshold": report.clears_threshold });
    Report::new("band", &a, report)?.with_bounds(bounds)
}

fn mc_iv(a: McArgs) -> Result<Report> {
    let cfg = a.config()?;
    let report = mc_condition_iv_probability(&cfg)?;
    write_rows(&a.out, &report.per_trial)?;
    let bounds = serde_json::json!({
        "condition_failure": report.bounds,
        "thresholds": report.thresholds,
        "parseval_lower_bound": report.parseval_lower_bound,
    });
    let vacuous = report.thresholds.threshold_vacuous;
    Ok(Report::new("mc-iv", cfg, &report)?.with_bounds(bounds)?.with_vacuity(vacuous))
}

#[derive(Serialize)]
struct McRecoveryResults {
    #[serde(flatten)]
    report: super::RecoveryMcReport,
    sweep: Option<Vec<super::SweepPoint>>,
    exact: Option<super::ExactRecoveryProbability>,
}

fn mc_recovery(a: McRecoveryArgs) -> Result<Report> {
    let cfg = a.common.config()?;
    let report = mc_recovery_probability(&cfg)?;
    write_rows(&a.common.out, &report.per_trial)?;
    let sweep = match &a.sweep {
        Some(sizes) => Some(recovery_sweep(cfg.n, cfg.t_sparsity, sizes, cfg.trials, cfg.master_seed, &cfg.solver)?),
        None => None,
    };
    let exact = match (a.exact_signals, cfg.omega) {
        (Some(k), OmegaSampling::Bernoulli { tau }) => {
            Some(exact_recovery_probability(cfg.n, cfg.t_sparsity, tau, k, cfg.master_seed, &cfg.solver)?)
        }
        (Some(_), _) => return Err(Error::InvalidArgument("--exact-signals needs --tau".into())),
        (None, _) => None,
    };
    let th = report.thresholds;
    let bounds = serde_json::json!({ "thresholds": th });
    let results = McRecoveryResults { report, sweep, exact };
    Ok(Report::new("mc-recovery", cfg, results)?.with_bounds(bounds)?.with_vacuity(th.threshold_vacuous))
}

fn mc_omega(a: McOmegaArgs) -> Result<Report> {
    let r = omega_concentration_check(a.tau, a.n, a.trials, a.lambda, a.seed, a.scale.into())?;
    let mean = a.tau * a.n as f64;
    let rows: Vec<TrialRecord> = r
        .sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| TrialRecord {
            trial_index: i,
            seed: crate::rng::derive_seed(a.seed, i as u64),
            omega_size: size,
            success: (size as f64 - mean).abs() > r.deviation,
            objective: None,
            residual: None,
        })
        .collect();
    write_rows(&a.out, &rows)?;
    let bounds = serde_json::json!({ "tail_bound": r.mc.theoretical_bound, "exact_probability": r.exact_p });
    Report::new("mc-omega", &a, r)?.with_bounds(bounds)
}

#[derive(Serialize)]
struct FailureResults {
    example: crate::lacunary::FailureExample,
    solver_objective: f64,
    solver_recovered: Option<bool>,
}

fn failure_example(a: FailureArgs) -> Result<Report> {
    let cfg = a.solver.config()?;
    let band = SupportSet::interval(a.n, a.band_start, a.band_size)?;
    let z = if a.random_spectrum {
        let mut rng = trial_rng(a.seed);
        let values = (0..a.n)
            .map(|w| {
                if band.contains(w) {
                    Complex64::new(0.0, 0.0)
                } else {
                    random_phase(&mut rng) * (0.5 + 0.5 * rng.random::<f64>())
                }
            })
            .collect();
        Spectrum::new(values)?
    } else {
        single_tone_off_band(&band)?
    };
    let example = construct_failure_example(&band, &z, a.keep)?;
    let solver = MinimalExtensionSolver::new(a.n, cfg)?;
    let rec = solver.recover_planted(&example.x, &band)?;
    let results = FailureResults { solver_objective: rec.objective, solver_recovered: rec.recovered, example };
    Report::new("failure-example", &a, results)
}

fn execute(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Recover(a) => recover(a),
        Command::Certify(a) => certify(a),
        Command::Uncertainty(a) => uncertainty(a),
        Command::Dh(a) => dh(a),
        Command::Lacunary(a) => lacunary(a),
        Command::Band(a) => band(a),
        Command::McIv(a) => mc_iv(a),
        Command::McRecovery(a) => mc_recovery(a),
        Command::McOmega(a) => mc_omega(a),
        Command::FailureExample(a) => failure_example(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli_with(std::iter::once("wiener").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn comb_uncertainty() {
        let (code, out, _) = run(&["uncertainty", "--n", "9", "--comb"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["product"], 9);
        assert_eq!(v["results"]["equality"], true);
    }

    #[test]
    fn bad_flags_exit_two() {
        assert_eq!(run(&["uncertainty", "--bogus"]).0, 2);
        assert_eq!(run(&["nonsense"]).0, 2);
        assert_eq!(run(&["mc-iv", "--n", "10", "--t", "2", "--tau", "0.5", "--omega", "3"]).0, 2);
        assert_eq!(run(&["band", "--n", "10", "--d", "2", "--band-size", "11"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("mc-recovery"));
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "# comment\nn = 16\ncomb = true\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = run(&["--config", p, "uncertainty"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["product"], 16);
        let (code, out, _) = run(&["uncertainty", "--config", p, "--n", "25"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["product"], 25);
    }

    #[test]
    fn operational_error_exits_one() {
        assert_eq!(run(&["--config", "/nonexistent/cfg", "uncertainty"]).0, 1);
    }
}
