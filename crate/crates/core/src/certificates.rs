//! Idempotent kernels and dual certificates.
//!
//! For a frequency set Ω the kernel is `K(t) = Σ_{ω∈Ω} e(ωt/N)`, with
//! `K(0) = |Ω|`. Given a support `S` and unit-modulus signs `λ`, the
//! certificate
//!
//! ```text
//! P(t) = Σ_{t'∈S} λ_{t'} K(t − t') / K(0)
//! ```
//!
//! has its spectrum inside Ω. If `|P − λ| < 1/2` on `S` and `|P| < 1/2` off
//! `S`, every signal supported on `S` with those phases is the unique
//! ℓ¹-minimal extension of its samples on Ω. The kernel condition
//! `max_{t≠0} |K(t)| < K(0)/(2T)` yields such a certificate for every
//! support of size `T` at once.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, planted_signal, random_subset, trial_rng, SEED_DERIVATION};
use crate::solver::{MinimalExtensionSolver, SolverConfig};
use crate::spectral::{unit_roots, FourierPlan, Signal, SupportSet, ZeroTolerance};

const UNIT_MODULUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentKernel {
    omega: SupportSet,
    values: Vec<Complex64>,
}

/// Kernel of Ω by direct summation.
pub fn make_kernel(omega: &SupportSet) -> Result<IdempotentKernel> {
    if omega.is_empty() {
        return Err(Error::EmptySet("kernel of an empty frequency set"));
    }
    let n = omega.n();
    let roots = unit_roots(n);
    let values = (0..n)
        .map(|t| omega.members().iter().map(|&w| roots[(w * t) % n]).sum())
        .collect();
    Ok(IdempotentKernel { omega: omega.clone(), values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionIv {
    pub holds: bool,
    /// `K(0)/(2T) − max_{t≠0} |K(t)|`; positive iff the condition holds.
    pub margin: f64,
}

impl IdempotentKernel {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn omega(&self) -> &SupportSet {
        &self.omega
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `K(0)`, which equals `|Ω|`.
    pub fn peak(&self) -> f64 {
        self.values[0].re
    }

    pub fn max_off_peak(&self) -> f64 {
        self.values[1..].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ_t |K(t)|²`, equal to `N·|Ω|` by Parseval.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn check_condition_iv(&self, t: usize) -> ConditionIv {
        check_condition_iv(self, t)
    }
}

/// Strict test of `|K(t)| < K(0)/(2T)` for every `t ≠ 0`. A tie counts as
/// failure.
pub fn check_condition_iv(k: &IdempotentKernel, t: usize) -> ConditionIv {
    let t = t.max(1);
    let margin = k.peak() / (2.0 * t as f64) - k.max_off_peak();
    ConditionIv { holds: margin > 0.0, margin }
}

/// Unit-modulus signs on a time support.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPattern {
    support: SupportSet,
    lambdas: Vec<Complex64>,
}

impl SignPattern {
    /// `lambdas` is aligned with `support.members()`.
    pub fn new(support: SupportSet, lambdas: Vec<Complex64>) -> Result<Self> {
        if support.len() != lambdas.len() {
            return Err(Error::InvalidArgument(format!(
                "{} support points but {} signs",
                support.len(),
                lambdas.len()
            )));
        }
        if let Some(bad) = lambdas.iter().find(|l| (l.norm() - 1.0).abs() > UNIT_MODULUS_TOL) {
            return Err(Error::InvalidArgument(format!("sign {bad} is not of unit modulus")));
        }
        Ok(SignPattern { support, lambdas })
    }

    /// Phases `x_t/|x_t|` on the support of `x`.
    pub fn from_signal(x: &Signal, tol: ZeroTolerance) -> Self {
        let support = x.support(tol);
        let lambdas = support.members().iter().map(|&t| x[t] / x[t].norm()).collect();
        SignPattern { support, lambdas }
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.support.members().iter().copied().zip(self.lambdas.iter().copied())
    }

    pub fn translated(&self, shift: usize) -> SignPattern {
        let n = self.support.n();
        let mut pairs: Vec<(usize, Complex64)> = self.iter().map(|(t, l)| ((t + shift) % n, l)).collect();
        pairs.sort_by_key(|p| p.0);
        SignPattern {
            support: self.support.translated(shift),
            lambdas: pairs.into_iter().map(|p| p.1).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    values: Vec<Complex64>,
    pattern: SignPattern,
    omega: SupportSet,
}

impl DualCertificate {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn pattern(&self) -> &SignPattern {
        &self.pattern
    }

    /// Largest spectral coefficient of `P` outside Ω.
    pub fn off_omega_leakage(&self) -> f64 {
        let spec = FourierPlan::new(self.values.len()).dft(&Signal::from_vec_unchecked(self.values.clone()));
        self.omega
            .complement()
            .members()
            .iter()
            .map(|&w| spec[w].norm())
            .fold(0.0, f64::max)
    }
}

/// `P(t) = Σ_{t'∈S} λ_{t'} K(t − t')/K(0)`.
pub fn build_certificate(sp: &SignPattern, k: &IdempotentKernel) -> Result<DualCertificate> {
    let n = k.n();
    if sp.support().n() != n {
        return Err(Error::InvalidArgument("sign pattern and kernel live on different groups".into()));
    }
    let peak = k.peak();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (s, lambda) in sp.iter() {
        let weight = lambda / peak;
        for (t, v) in values.iter_mut().enumerate() {
            *v += weight * k.values[(t + n - s) % n];
        }
    }
    Ok(DualCertificate { values, pattern: sp.clone(), omega: k.omega.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationCheck {
    pub holds: bool,
    /// `max_{t∈S} |P(t) − λ_t|` (0 for empty S).
    pub worst_on_s: f64,
    /// `max_{t∉S} |P(t)|` (0 when S is everything).
    pub worst_off_s: f64,
}

/// Strict interpolation test: `|P − λ| < 1/2` on S and `|P| < 1/2` off S.
pub fn check_condition_2prime(p: &DualCertificate, sp: &SignPattern) -> InterpolationCheck {
    let mask = sp.support().mask();
    let worst_on_s = sp
        .iter()
        .map(|(t, l)| (p.values[t] - l).norm())
        .fold(0.0, f64::max);
    let worst_off_s = p
        .values
        .iter()
        .enumerate()
        .filter(|(t, _)| !mask[*t])
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    InterpolationCheck { holds: worst_on_s < 0.5 && worst_off_s < 0.5, worst_on_s, worst_off_s }
}

/// `4T²N / (N + 4T² − 1)`: the least |Ω| compatible with the kernel
/// condition at sparsity T.
pub fn omega_parseval_lower_bound(t: usize, n: usize) -> f64 {
    let four_t2 = 4.0 * (t as f64).powi(2);
    four_t2 * n as f64 / (n as f64 + four_t2 - 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicationReport {
    pub trials: usize,
    pub sparsity: usize,
    pub omega_size: usize,
    pub condition_iv: ConditionIv,
    /// Trials whose certificate satisfied the interpolation test.
    pub certificate_holds: usize,
    pub recovered: usize,
    /// Indices of trials where the certificate failed or recovery failed.
    pub counterexamples: Vec<usize>,
    pub max_relative_error: f64,
    pub seed_derivation: &'static str,
}

/// Plants `trials` random `T`-sparse signals (uniform support, uniform
/// phases, magnitudes in [1/2, 1]), builds the certificate for each sign
/// pattern and runs the ℓ¹ solver on the samples over Ω.
pub fn verify_implication_iv_to_recovery(
    k: &IdempotentKernel,
    t: usize,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<ImplicationReport> {
    let n = k.n();
    if t == 0 || t > n {
        return Err(Error::InvalidArgument(format!("sparsity {t} must lie in 1..={n}")));
    }
    let solver = MinimalExtensionSolver::new(n, *cfg)?;
    let condition_iv = check_condition_iv(k, t);
    let mut report = ImplicationReport {
        trials,
        sparsity: t,
        omega_size: k.omega().len(),
        condition_iv,
        certificate_holds: 0,
        recovered: 0,
        counterexamples: Vec::new(),
        max_relative_error: 0.0,
        seed_derivation: SEED_DERIVATION,
    };
    for i in 0..trials {
        let mut rng = trial_rng(derive_seed(seed, i as u64));
        let support = random_subset(&mut rng, n, t);
        let x = planted_signal(&mut rng, &support);
        let sp = SignPattern::from_signal(&x, ZeroTolerance::DEFAULT);
        let cert = build_certificate(&sp, k)?;
        let interp = check_condition_2prime(&cert, &sp);
        let rec = solver.recover_planted(&x, k.omega())?;
        let err = rec.minimizer.relative_error(&x);
        report.max_relative_error = report.max_relative_error.max(err);
        if interp.holds {
            report.certificate_holds += 1;
        }
        let ok = rec.recovered == Some(true);
        if ok {
            report.recovered += 1;
        }
        if !interp.holds || !ok {
            report.counterexamples.push(i);
        }
    }
    Ok(report)
}
