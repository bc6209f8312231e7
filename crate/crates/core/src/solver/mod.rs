//! ℓ¹-minimal extension of partial Fourier data, plus the time/frequency
//! mixed decompositions.
//!
//! Both problems are `min ‖u‖₁` over an affine set whose projector is exact
//! and costs two fast transforms, so they share one Douglas–Rachford
//! engine ([`splitting`]). Small instances can be cross-checked against
//! exhaustive enumeration ([`oracle`], [`decompose::dh_decompose_l0`]).

pub mod decompose;
pub mod oracle;
pub mod splitting;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{FourierPlan, Signal, Spectrum, SupportSet};

pub use decompose::{dh_decompose_l0, dh_decompose_l1, L0Decomposition, MixedDecomposition};
pub use oracle::{exhaustive_bp_oracle, OracleResult};
pub use splitting::soft_threshold;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Bound on the ℓ² norm of the constraint residual.
    pub eps_feasibility: f64,
    /// Bound on the fixed-point gap `max|prox − projection|`, relative to
    /// the largest entry of the iterate.
    pub eps_step: f64,
    /// Relaxation of the governing-sequence update, in (0, 2).
    pub relaxation: f64,
    /// Relative ℓ² error under which a recovery counts as exact.
    pub recovery_rel_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iter: 50_000,
            eps_feasibility: 1e-9,
            eps_step: 1e-10,
            relaxation: 1.0,
            recovery_rel_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        positive("eps_feasibility", self.eps_feasibility)?;
        positive("eps_step", self.eps_step)?;
        positive("recovery_rel_tol", self.recovery_rel_tol)?;
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "relaxation must lie in (0, 2), got {}",
                self.relaxation
            )));
        }
        Ok(())
    }
}

/// Spectral values prescribed on a frequency set Ω, aligned with
/// `omega.members()`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySamples {
    omega: SupportSet,
    values: Vec<Complex64>,
}

impl FrequencySamples {
    pub fn new(omega: SupportSet, values: Vec<Complex64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} frequencies but {} sample values",
                omega.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(FrequencySamples { omega, values })
    }

    pub fn from_spectrum(spectrum: &Spectrum, omega: &SupportSet) -> Result<Self> {
        if spectrum.n() != omega.n() {
            return Err(Error::InvalidArgument("spectrum and Ω live on different groups".into()));
        }
        let values = omega.members().iter().map(|&w| spectrum[w]).collect();
        Ok(FrequencySamples { omega: omega.clone(), values })
    }

    /// Samples of `dft(x)` on Ω.
    pub fn of_signal(x: &Signal, omega: &SupportSet, plan: &FourierPlan) -> Result<Self> {
        Self::from_spectrum(&plan.dft(x), omega)
    }

    pub fn n(&self) -> usize {
        self.omega.n()
    }

    pub fn omega(&self) -> &SupportSet {
        &self.omega
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.omega.members().iter().copied().zip(self.values.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub minimizer: Signal,
    /// ℓ¹ norm of `minimizer`.
    pub objective: f64,
    /// ℓ² norm of `ŷ|_Ω − samples`.
    pub feasibility_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set by [`RecoveryReport::assess`] when a ground truth is available.
    pub recovered: Option<bool>,
}

impl RecoveryReport {
    /// Largest sample mismatch `max_ω |ŷ(ω) − samples(ω)|`.
    pub fn max_sample_mismatch(&self, samples: &FrequencySamples, plan: &FourierPlan) -> f64 {
        let spec = plan.dft(&self.minimizer);
        samples.iter().map(|(w, v)| (spec[w] - v).norm()).fold(0.0, f64::max)
    }

    /// Marks the report as recovered iff the relative ℓ² error against
    /// `truth` is at most `rel_tol`.
    pub fn assess(&mut self, truth: &Signal, rel_tol: f64) -> f64 {
        let err = self.minimizer.relative_error(truth);
        self.recovered = Some(err <= rel_tol);
        err
    }
}

/// Reusable solver for `min ‖y‖₁ subject to ŷ|_Ω = samples` on a fixed N.
#[derive(Debug, Clone)]
pub struct MinimalExtensionSolver {
    plan: FourierPlan,
    cfg: SolverConfig,
}

impl MinimalExtensionSolver {
    pub fn new(n: usize, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        Ok(MinimalExtensionSolver { plan: FourierPlan::new(n), cfg })
    }

    pub fn plan(&self) -> &FourierPlan {
        &self.plan
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn recover(&self, samples: &FrequencySamples) -> Result<RecoveryReport> {
        let n = self.plan.n();
        if samples.n() != n {
            return Err(Error::InvalidArgument(format!(
                "samples live on Z_{} but the solver was built for Z_{n}",
                samples.n()
            )));
        }
        if samples.omega().is_empty() {
            return Err(Error::EmptyConstraint);
        }

        // Full spectrum with the samples written in; the projector replaces
        // Ω-coefficients by these values.
        let members = samples.omega().members();
        let project = |y: &mut [Complex64], scratch: &mut Vec<Complex64>| {
            scratch.clear();
            scratch.extend_from_slice(y);
            self.plan.forward_in_place(scratch);
            for (&w, v) in members.iter().zip(samples.values()) {
                scratch[w] = *v;
            }
            self.plan.inverse_in_place(scratch);
            y.copy_from_slice(scratch);
        };

        // Least-ℓ²-norm feasible point.
        let mut start = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = Vec::with_capacity(n);
        project(&mut start, &mut scratch);
        let threshold = splitting::default_threshold(&start, samples.omega().len());

        let outcome = splitting::douglas_rachford(start, project, threshold, &self.cfg);
        let minimizer = Signal::from_vec_unchecked(outcome.point);
        let spec = self.plan.dft(&minimizer);
        let feasibility_residual = samples
            .iter()
            .map(|(w, v)| (spec[w] - v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if feasibility_residual > self.cfg.eps_feasibility {
            return Err(Error::NonConvergence {
                iterations: outcome.iterations,
                residual: feasibility_residual,
                step: outcome.last_gap,
            });
        }
        Ok(RecoveryReport {
            objective: minimizer.l1_norm(),
            minimizer,
            feasibility_residual,
            iterations: outcome.iterations,
            converged: outcome.converged,
            recovered: None,
        })
    }

    /// Samples `x` on Ω, solves, and assesses the result against `x`.
    pub fn recover_planted(&self, x: &Signal, omega: &SupportSet) -> Result<RecoveryReport> {
        let samples = FrequencySamples::of_signal(x, omega, &self.plan)?;
        let mut report = self.recover(&samples)?;
        report.assess(x, self.cfg.recovery_rel_tol);
        Ok(report)
    }
}

/// One-shot form of [`MinimalExtensionSolver::recover`].
pub fn minimal_extension_recover(
    samples: &FrequencySamples,
    n: usize,
    cfg: &SolverConfig,
) -> Result<RecoveryReport> {
    MinimalExtensionSolver::new(n, *cfg)?.recover(samples)
}
