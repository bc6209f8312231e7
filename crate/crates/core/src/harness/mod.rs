//! Seeded Monte Carlo experiments, report types and the command-line front
//! end.
//!
//! Every trial derives its own generator from `(master_seed, trial_index)`
//! (see [`crate::rng`]), so results are identical whether trials run on one
//! thread or many. Parallel loops collect in trial order.

pub mod cli;
pub mod report;

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificates::{check_condition_iv, make_kernel, omega_parseval_lower_bound};
use crate::error::{Error, Result};
use crate::rng::{
    bernoulli_subset, derive_seed, planted_sparse_signal, random_prefix_permutation, random_subset, trial_rng,
    SEED_DERIVATION,
};
use crate::solver::{MinimalExtensionSolver, SolverConfig};
use crate::spectral::SupportSet;

pub use cli::run_cli;
pub use report::{Report, TrialRecord, REPORT_VERSION};

/// Exhaustive enumeration of frequency sets is limited to this N.
pub const EXACT_MAX_N: usize = 14;

/// How Ω is drawn in each trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSampling {
    /// Each frequency independently with probability `tau`.
    Bernoulli { tau: f64 },
    /// A uniform subset of exactly `omega_size` frequencies.
    FixedSize { omega_size: usize },
}

impl OmegaSampling {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> SupportSet {
        match *self {
            OmegaSampling::Bernoulli { tau } => bernoulli_subset(rng, n, tau),
            OmegaSampling::FixedSize { omega_size } => random_subset(rng, n, omega_size),
        }
    }

    /// `τN` or the fixed size.
    pub fn expected_size(&self, n: usize) -> f64 {
        match *self {
            OmegaSampling::Bernoulli { tau } => tau * n as f64,
            OmegaSampling::FixedSize { omega_size } => omega_size as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub t_sparsity: usize,
    pub omega: OmegaSampling,
    pub trials: usize,
    pub master_seed: u64,
    /// Target decay exponent `M` in `P(recovery) ≥ 1 − cN^{−M}`.
    pub m_exponent: f64,
    /// Slack `δ` in the sample-size thresholds.
    pub delta: f64,
    /// Number of phase sectors used by the kernel-condition bound.
    pub n_phases: usize,
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    pub fn new(n: usize, t_sparsity: usize, omega: OmegaSampling, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            t_sparsity,
            omega,
            trials,
            master_seed,
            m_exponent: 1.0,
            delta: 0.1,
            n_phases: 8,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 {
            return bad("N must be positive".into());
        }
        if self.t_sparsity == 0 || self.t_sparsity > self.n {
            return bad(format!("sparsity {} must lie in 1..={}", self.t_sparsity, self.n));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.n_phases < 3 {
            return bad(format!("n_phases must be at least 3, got {}", self.n_phases));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.m_exponent >= 0.0 && self.m_exponent.is_finite()) {
            return bad(format!("m_exponent must be nonnegative, got {}", self.m_exponent));
        }
        match self.omega {
            OmegaSampling::Bernoulli { tau } if !(0.0..=1.0).contains(&tau) => bad(format!("tau must lie in [0, 1], got {tau}")),
            OmegaSampling::FixedSize { omega_size } if omega_size > self.n => {
                bad(format!("omega size {omega_size} exceeds N = {}", self.n))
            }
            _ => self.solver.validate(),
        }
    }

    /// `cos(π/ν)` for the configured sector count.
    pub fn phase_cos(&self) -> f64 {
        (PI / self.n_phases as f64).cos()
    }
}

/// Sample-size thresholds, with natural logarithms throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// `4(1+δ)(T²+1)·log N`: the kernel condition holds with high
    /// probability, giving recovery of every T-sparse signal at once.
    pub all_signals: f64,
    /// `22(1+δ)·T·log N`: recovery of one given T-sparse signal.
    pub single_signal: f64,
    /// Same with constant 23.
    pub single_signal_alt: f64,
    /// `23(M+1)·T·log N`.
    pub decay_form: f64,
    pub all_signals_vacuous: bool,
    pub single_signal_vacuous: bool,
    /// Either of the two `δ` thresholds exceeds N.
    pub threshold_vacuous: bool,
}

pub fn thresholds(n: usize, t: usize, delta: f64, m_exponent: f64) -> Thresholds {
    let log_n = (n as f64).ln();
    let t = t as f64;
    let all_signals = 4.0 * (1.0 + delta) * (t * t + 1.0) * log_n;
    let single_signal = 22.0 * (1.0 + delta) * t * log_n;
    let all_signals_vacuous = all_signals > n as f64;
    let single_signal_vacuous = single_signal > n as f64;
    Thresholds {
        all_signals,
        single_signal,
        single_signal_alt: 23.0 * (1.0 + delta) * t * log_n,
        decay_form: 23.0 * (m_exponent + 1.0) * t * log_n,
        all_signals_vacuous,
        single_signal_vacuous,
        threshold_vacuous: all_signals_vacuous || single_signal_vacuous,
    }
}

/// Frequency of an event over seeded trials, against an upper bound on its
/// probability when one is known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    /// What `success_count` counts.
    pub event: &'static str,
    pub success_count: usize,
    pub trials: usize,
    pub empirical_p: f64,
    /// `√(p(1−p)/trials)`.
    pub standard_error: f64,
    pub theoretical_bound: Option<f64>,
    /// `empirical_p ≤ bound + 3·standard_error`.
    pub bound_satisfied: Option<bool>,
    pub seed_derivation: &'static str,
}

impl McReport {
    pub fn new(event: &'static str, success_count: usize, trials: usize, bound: Option<f64>) -> Self {
        let p = success_count as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        McReport {
            event,
            success_count,
            trials,
            empirical_p: p,
            standard_error: se,
            theoretical_bound: bound,
            bound_satisfied: bound.map(|b| p <= b + 3.0 * se),
            seed_derivation: SEED_DERIVATION,
        }
    }
}

/// Draws a Bernoulli(τ) frequency set.
pub fn bernoulli_frequency_sample<R: Rng + ?Sized>(tau: f64, n: usize, rng: &mut R) -> Result<SupportSet> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!("tau must lie in [0, 1], got {tau}")));
    }
    Ok(bernoulli_subset(rng, n, tau))
}

/// Unit of the deviation `λ·scale(N)` in the concentration check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationScale {
    /// `λ·log N`, the deviation for which the Chernoff optimization of the
    /// tail bound goes through (requires `λ log N < 2Nτ`).
    Log,
    /// `λ·√(log N)` with the same bound; not implied by the Chernoff
    /// argument and violated at moderate N.
    SqrtLog,
    /// `λ` with the same bound; the logarithm cannot be dropped.
    None,
}

impl DeviationScale {
    pub fn factor(self, n: usize) -> f64 {
        let log_n = (n as f64).ln();
        match self {
            DeviationScale::Log => log_n,
            DeviationScale::SqrtLog => log_n.sqrt(),
            DeviationScale::None => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub tau: f64,
    pub lambda: f64,
    pub scale: DeviationScale,
    /// Event: `||Ω| − τN| > deviation`.
    pub deviation: f64,
    /// Chernoff parameter `λ log N/(2Nτ)`; the bound is derived for `u < 1`.
    pub chernoff_u: f64,
    pub mc: McReport,
    /// Exact binomial probability of the event.
    pub exact_p: f64,
    pub sizes: Vec<usize>,
}

/// `P(|B(N,τ) − τN| > dev)` summed in log space.
pub fn binomial_two_sided_tail(n: usize, tau: f64, dev: f64) -> f64 {
    let mean = tau * n as f64;
    if tau <= 0.0 || tau >= 1.0 {
        // Degenerate law: the count is exactly τN.
        return 0.0;
    }
    let (lt, lq) = (tau.ln(), (1.0 - tau).ln());
    let mut log_choose = 0.0;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        if (k as f64 - mean).abs() > dev {
            total += (log_choose + k as f64 * lt + (n - k) as f64 * lq).exp();
        }
    }
    total.min(1.0)
}

/// Monte Carlo frequency of `||Ω| − τN| > λ·scale(N)` against
/// `2·exp(−λ² log² N/(4Nτ))`.
pub fn omega_concentration_check(
    tau: f64,
    n: usize,
    trials: usize,
    lambda: f64,
    seed: u64,
    scale: DeviationScale,
) -> Result<ConcentrationReport> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("N and trials must be positive".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")));
    }
    let sizes: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|i| bernoulli_frequency_sample(tau, n, &mut trial_rng(derive_seed(seed, i as u64))).map(|s| s.len()))
        .collect::<Result<_>>()?;
    let mean = tau * n as f64;
    let deviation = lambda * scale.factor(n);
    let exceed = sizes.iter().filter(|&&s| (s as f64 - mean).abs() > deviation).count();
    let log_n = (n as f64).ln();
    let bound = if mean > 0.0 {
        2.0 * (-(lambda * lambda * log_n * log_n) / (4.0 * mean)).exp()
    } else {
        // With τ = 0 the count never deviates; any bound is consistent.
        2.0
    };
    Ok(ConcentrationReport {
        n,
        tau,
        lambda,
        scale,
        deviation,
        chernoff_u: if mean > 0.0 { lambda * log_n / (2.0 * mean) } else { f64::INFINITY },
        mc: McReport::new("omega size deviates beyond the threshold", exceed, trials, Some(bound)),
        exact_p: binomial_two_sided_tail(n, tau, deviation),
        sizes,
    })
}

/// Bounds on `P(kernel condition fails)` for Bernoulli(τ) sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionIvBounds {
    pub phase_cos: f64,
    /// `Nν·exp[−τN(a²/(4T²+2) − 2/T³)]`.
    pub with_cubic_term: f64,
    /// `Nν·exp[−τN·a²/(4T²+2)]`; relies on an unproved sign claim, so it is
    /// reported but never asserted.
    pub without_cubic_term: f64,
}

pub fn condition_iv_bounds(n: usize, t: usize, expected_size: f64, n_phases: usize) -> ConditionIvBounds {
    let a = (PI / n_phases as f64).cos();
    let t = t as f64;
    let lead = a * a / (4.0 * t * t + 2.0);
    let prefactor = n as f64 * n_phases as f64;
    ConditionIvBounds {
        phase_cos: a,
        with_cubic_term: prefactor * (-expected_size * (lead - 2.0 / t.powi(3))).exp(),
        without_cubic_term: prefactor * (-expected_size * lead).exp(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionIvReport {
    pub config: ExperimentConfig,
    /// Event: the kernel condition fails.
    pub mc: McReport,
    pub bounds: ConditionIvBounds,
    /// Whether the empirical rate respects the variant bound (not asserted).
    pub without_cubic_consistent: bool,
    pub thresholds: Thresholds,
    pub parseval_lower_bound: f64,
    /// Sets where the condition held although `|Ω|` is below the
    /// Parseval lower bound; always zero.
    pub parseval_violations: usize,
    pub mean_omega_size: f64,
    pub per_trial: Vec<TrialRecord>,
}

/// Frequency with which the kernel of a random Ω violates
/// `max_{t≠0}|K(t)| < K(0)/(2T)`. An empty Ω counts as a violation.
pub fn mc_condition_iv_probability(cfg: &ExperimentConfig) -> Result<ConditionIvReport> {
    cfg.validate()?;
    let (n, t) = (cfg.n, cfg.t_sparsity);
    let outcomes: Vec<(usize, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(derive_seed(cfg.master_seed, i as u64));
            let omega = cfg.omega.draw(&mut rng, n);
            let holds = !omega.is_empty() && check_condition_iv(&make_kernel(&omega)?, t).holds;
            Ok((omega.len(), holds))
        })
        .collect::<Result<_>>()?;

    let failures = outcomes.iter().filter(|(_, h)| !h).count();
    let bounds = condition_iv_bounds(n, t, cfg.omega.expected_size(n), cfg.n_phases);
    // The bound is derived for Bernoulli sampling only.
    let bound = matches!(cfg.omega, OmegaSampling::Bernoulli { .. }).then_some(bounds.with_cubic_term);
    let mc = McReport::new("kernel condition fails", failures, cfg.trials, bound);
    let parseval = omega_parseval_lower_bound(t, n);
    let per_trial = outcomes
        .iter()
        .enumerate()
        .map(|(i, &(size, holds))| TrialRecord {
            trial_index: i,
            seed: derive_seed(cfg.master_seed, i as u64),
            omega_size: size,
            success: holds,
            objective: None,
            residual: None,
        })
        .collect();
    Ok(ConditionIvReport {
        config: *cfg,
        without_cubic_consistent: mc.empirical_p <= bounds.without_cubic_term + 3.0 * mc.standard_error,
        mc,
        bounds,
        thresholds: thresholds(n, t, cfg.delta, cfg.m_exponent),
        parseval_lower_bound: parseval,
        parseval_violations: outcomes.iter().filter(|&&(s, h)| h && (s as f64) < parseval).count(),
        mean_omega_size: outcomes.iter().map(|(s, _)| *s as f64).sum::<f64>() / cfg.trials as f64,
        per_trial,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryMcReport {
    pub config: ExperimentConfig,
    /// Event: exact recovery.
    pub mc: McReport,
    pub thresholds: Thresholds,
    /// Mean `|Ω|` clears the single-signal threshold.
    pub clears_single_signal: bool,
    pub clears_all_signals: bool,
    /// `(1 − p)·N^M`, the constant that the observed failure rate implies.
    pub fitted_constant: f64,
    pub per_trial: Vec<TrialRecord>,
}

/// Plants a T-sparse signal per trial (uniform support, uniform phases,
/// magnitudes in [1/2, 1]), samples Ω and counts exact recoveries. An empty
/// Ω counts as a failure.
pub fn mc_recovery_probability(cfg: &ExperimentConfig) -> Result<RecoveryMcReport> {
    cfg.validate()?;
    let n = cfg.n;
    let solver = MinimalExtensionSolver::new(n, cfg.solver)?;
    let per_trial: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.master_seed, i as u64);
            let mut rng = trial_rng(seed);
            let omega = cfg.omega.draw(&mut rng, n);
            let x = planted_sparse_signal(&mut rng, n, cfg.t_sparsity);
            let mut record = TrialRecord {
                trial_index: i,
                seed,
                omega_size: omega.len(),
                success: false,
                objective: None,
                residual: None,
            };
            if !omega.is_empty() {
                let rec = solver.recover_planted(&x, &omega)?;
                record.success = rec.recovered == Some(true);
                record.objective = Some(rec.objective);
                record.residual = Some(rec.feasibility_residual);
            }
            Ok(record)
        })
        .collect::<Result<_>>()?;

    let successes = per_trial.iter().filter(|r| r.success).count();
    let mc = McReport::new("exact recovery", successes, cfg.trials, None);
    let th = thresholds(n, cfg.t_sparsity, cfg.delta, cfg.m_exponent);
    let mean_size = cfg.omega.expected_size(n);
    Ok(RecoveryMcReport {
        config: *cfg,
        fitted_constant: (1.0 - mc.empirical_p) * (n as f64).powf(cfg.m_exponent),
        mc,
        clears_single_signal: mean_size >= th.single_signal,
        clears_all_signals: mean_size >= th.all_signals,
        thresholds: th,
        per_trial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub omega_size: usize,
    pub successes: usize,
    pub trials: usize,
    pub empirical_p: f64,
}

/// Recovery rate as a function of `|Ω|` with common random numbers: each
/// trial fixes one signal and one random ordering of the frequencies, and
/// Ω of size k is the first k frequencies of that ordering, so the sets are
/// nested across sizes.
pub fn recovery_sweep(
    n: usize,
    t: usize,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<SweepPoint>> {
    if t == 0 || t > n || trials == 0 {
        return Err(Error::InvalidArgument(format!("need 1 <= T <= N and trials > 0 (T={t}, N={n})")));
    }
    if let Some(&bad) = sizes.iter().find(|&&k| k > n) {
        return Err(Error::InvalidArgument(format!("omega size {bad} exceeds N = {n}")));
    }
    let solver = MinimalExtensionSolver::new(n, *cfg)?;
    let outcomes: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(derive_seed(seed, i as u64));
            let x = planted_sparse_signal(&mut rng, n, t);
            let order = random_prefix_permutation(&mut rng, n, n);
            sizes
                .iter()
                .map(|&k| {
                    if k == 0 {
                        return Ok(false);
                    }
                    let omega = SupportSet::new(n, order[..k].iter().copied())?;
                    Ok(solver.recover_planted(&x, &omega)?.recovered == Some(true))
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;
    Ok(sizes
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let successes = outcomes.iter().filter(|o| o[j]).count();
            SweepPoint { omega_size: k, successes, trials, empirical_p: successes as f64 / trials as f64 }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactRecoveryProbability {
    pub n: usize,
    pub t: usize,
    pub tau: f64,
    /// For each planted signal, `Σ_Ω τ^|Ω|(1−τ)^{N−|Ω|}·1[recovered from Ω]`.
    pub per_signal: Vec<f64>,
    pub mean: f64,
}

/// Recovery probability under Bernoulli(τ) sampling computed by
/// enumerating all `2^N` frequency sets, for a few planted signals.
pub fn exact_recovery_probability(
    n: usize,
    t: usize,
    tau: f64,
    signals: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<ExactRecoveryProbability> {
    if n > EXACT_MAX_N {
        return Err(Error::InstanceTooLarge { n, limit: EXACT_MAX_N });
    }
    if t == 0 || t > n || signals == 0 || !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument("need 1 <= T <= N, signals > 0, tau in [0, 1]".into()));
    }
    let solver = MinimalExtensionSolver::new(n, *cfg)?;
    let per_signal = (0..signals)
        .into_par_iter()
        .map(|i| {
            let x = planted_sparse_signal(&mut trial_rng(derive_seed(seed, i as u64)), n, t);
            let mut p = 0.0;
            for mask in 1u32..(1u32 << n) {
                let k = mask.count_ones() as i32;
                let weight = tau.powi(k) * (1.0 - tau).powi(n as i32 - k);
                if weight == 0.0 {
                    continue;
                }
                let omega = SupportSet::new(n, (0..n).filter(|b| mask >> b & 1 == 1))?;
                if solver.recover_planted(&x, &omega)?.recovered == Some(true) {
                    p += weight;
                }
            }
            Ok(p)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = per_signal.iter().sum::<f64>() / signals as f64;
    Ok(ExactRecoveryProbability { n, t, tau, per_signal, mean })
}

/// Frequency sets on which the kernel condition holds at sparsity `t`,
/// found by drawing uniform subsets with sizes uniform between the
/// Parseval lower bound and N.
#[derive(Debug, Clone, Serialize)]
pub struct HoldingSets {
    pub n: usize,
    pub t: usize,
    pub attempts: usize,
    pub sets: Vec<SupportSet>,
    /// Fewer than the requested number were found within the attempt cap.
    pub exhausted: bool,
}

pub fn find_condition_iv_sets(n: usize, t: usize, wanted: usize, max_attempts: usize, seed: u64) -> Result<HoldingSets> {
    if n == 0 || t == 0 || t > n {
        return Err(Error::InvalidArgument(format!("need 1 <= T <= N (T={t}, N={n})")));
    }
    let lower = (omega_parseval_lower_bound(t, n).ceil() as usize).clamp(1, n);
    let mut sets = Vec::new();
    let mut attempts = 0;
    while sets.len() < wanted && attempts < max_attempts {
        let mut rng = trial_rng(derive_seed(seed, attempts as u64));
        attempts += 1;
        let size = rng.random_range(lower..=n);
        let omega = random_subset(&mut rng, n, size);
        if check_condition_iv(&make_kernel(&omega)?, t).holds {
            sets.push(omega);
        }
    }
    Ok(HoldingSets { n, t, attempts, exhausted: sets.len() < wanted, sets })
}
