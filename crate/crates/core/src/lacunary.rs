//! Recovery from a band of consecutive frequencies when the time support
//! is well separated.
//!
//! The argument multiplies a spectrum vanishing on the band by a periodized
//! Gaussian `θ_a(t) = Σ_m a·exp(−πa²(t − m)²)` and bounds three quantities:
//! the self-interaction `A(s)` of the support, the leakage `B(n)` onto the
//! complement and the tail `2θ_a(r)` of the kernel off the band. This module
//! evaluates those majorants, the resulting sufficient conditions on the
//! step `d` and band radius `r`, and the discrete experiments on ℤ_N.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, planted_signal, random_subset, trial_rng, SEED_DERIVATION};
use crate::solver::{MinimalExtensionSolver, SolverConfig};
use crate::spectral::{cyclic_step, FourierPlan, Signal, Spectrum, SupportSet};

/// Terms of the lattice sums below this size are dropped.
pub const SERIES_CUTOFF: f64 = 1e-18;

/// `exp(−πt²)`.
pub fn gaussian(t: f64) -> f64 {
    (-PI * t * t).exp()
}

/// `Σ_{j≥1} exp(−π(j·step)²)`.
fn lattice_tail(step: f64) -> f64 {
    let mut sum = 0.0;
    for j in 1.. {
        let term = gaussian(j as f64 * step);
        sum += term;
        if term < SERIES_CUTOFF {
            break;
        }
    }
    sum
}

/// Periodized Gaussian by its defining sum over translates.
pub fn theta_spatial(t: f64, a: f64) -> f64 {
    let t0 = t - t.round();
    let mut sum = a * gaussian(a * t0);
    for k in 1..100_000 {
        let k = k as f64;
        let left = a * gaussian(a * (t0 - k));
        let right = a * gaussian(a * (t0 + k));
        sum += left + right;
        let largest = left.max(right);
        if largest == 0.0 || largest < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Periodized Gaussian by its Fourier series `Σ_n exp(−πn²/a²)·e(nt)`.
/// Accurate in absolute terms; tiny values lose relative precision.
pub fn theta_fourier(t: f64, a: f64) -> f64 {
    let mut sum = 1.0;
    for n in 1.. {
        let n = n as f64;
        let weight = gaussian(n / a);
        sum += 2.0 * weight * (2.0 * PI * n * t).cos();
        if weight < SERIES_CUTOFF {
            break;
        }
    }
    sum
}

/// Periodized Gaussian kernel in dimension `nu` at the point `(t, 0, …, 0)`,
/// using the faster of the two series (spatial for `a ≥ 1`).
pub fn theta_kernel(t: f64, a: f64, nu: u32) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("theta kernel needs finite t and a > 0, got t={t}, a={a}")));
    }
    if nu == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let one_dim = |s: f64| if a >= 1.0 { theta_spatial(s, a) } else { theta_fourier(s, a) };
    Ok(one_dim(t) * one_dim(0.0).powi(nu as i32 - 1))
}

/// Dimension, spectral step, band radius and Gaussian scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LacunaryParams {
    pub nu: u32,
    pub d: f64,
    pub r: f64,
    pub a: f64,
}

impl LacunaryParams {
    pub fn new(nu: u32, d: f64, r: f64, a: f64) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {d}")));
        }
        if !(r > 0.0 && r < 0.5) {
            return Err(Error::InvalidArgument(format!("radius must lie in (0, 1/2), got {r}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {a}")));
        }
        Ok(LacunaryParams { nu, d, r, a })
    }

    /// Uses the geometric mean scale `a = √(d/r)`, which lies strictly
    /// between `1/r` and `d` whenever `dr > 1`.
    pub fn with_default_scale(nu: u32, d: f64, r: f64) -> Result<Self> {
        Self::new(nu, d, r, (d / r).sqrt())
    }

    /// `1/r < a < d` and `a ≥ 10`.
    pub fn scale_admissible(&self) -> bool {
        1.0 / self.r < self.a && self.a < self.d && self.a >= 10.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub params: LacunaryParams,
    /// Closed-form majorant of the self-interaction `|A(s)|`.
    pub a_max: f64,
    /// Closed-form majorant of the leakage `|B(n)|`.
    pub b_max: f64,
    /// Closed-form majorant of the kernel tail off the band.
    pub tail: f64,
    /// One-dimensional lattice sum `2Σ_j γ(jd/a)` bounding `|A(s)|` before
    /// the closed form (ν = 1 only).
    pub a_sum: Option<f64>,
    /// `γ(1/a) + γ(d/2a) + 2Σ_j γ(jd/a)` (ν = 1 only).
    pub b_sum: Option<f64>,
    /// `2θ_a(r)` evaluated directly (ν = 1 only).
    pub tail_exact: Option<f64>,
    /// `π/(4a²)`.
    pub a_target: f64,
    /// `1 − 2π/(4a²)`.
    pub b_target: f64,
    /// `π/(8a²)`.
    pub tail_target: f64,
    /// `r > (2/a)√(log a)`.
    pub radius_exceeds_scale: bool,
    /// `d > 2a√(log a)`.
    pub step_exceeds_scale: bool,
    pub chain_holds: bool,
}

impl BoundReport {
    /// All three majorants meet their targets.
    pub fn targets_met(&self) -> bool {
        self.tail <= self.tail_target && self.a_max <= self.a_target && self.b_max <= self.b_target
    }
}

/// Majorants of `|A|`, `|B|` and the kernel tail.
///
/// In dimension one the chain holds when the radius and step conditions
/// both hold (they force the targets). In higher dimension the constants
/// grow (`ν!` in the tail, `2^{ν+1}` in the lattice sums) and the targets
/// are checked directly.
pub fn majorant_chain(p: &LacunaryParams) -> Result<BoundReport> {
    if !p.scale_admissible() {
        return Err(Error::ScaleOutOfRange(format!("a={}, r={}, d={}", p.a, p.r, p.d)));
    }
    let LacunaryParams { nu, d, r, a } = *p;
    let a2 = a * a;
    let spread = (-PI * d * d / (4.0 * a2)).exp();
    let lattice = if nu == 1 { 2.0 } else { 2f64.powi(nu as i32 + 1) };
    let a_max = lattice * spread;
    let b_max = 1.0 - 3.0 * PI / (4.0 * a2) + lattice * spread;
    let decay = (-PI * a2 * r * r).exp();
    let tail = if nu == 1 {
        3.0 * a * decay
    } else {
        let factorial: f64 = (1..=nu).map(f64::from).product();
        factorial * a.powi(nu as i32) * decay
    };

    let (a_sum, b_sum, tail_exact) = if nu == 1 {
        let s = lattice_tail(d / a);
        (
            Some(2.0 * s),
            Some(gaussian(1.0 / a) + gaussian(d / (2.0 * a)) + 2.0 * s),
            Some(2.0 * theta_spatial(r, a)),
        )
    } else {
        (None, None, None)
    };

    let root_log = a.ln().sqrt();
    let radius_exceeds_scale = r > 2.0 / a * root_log;
    let step_exceeds_scale = d > 2.0 * a * root_log;
    let mut report = BoundReport {
        params: *p,
        a_max,
        b_max,
        tail,
        a_sum,
        b_sum,
        tail_exact,
        a_target: PI / (4.0 * a2),
        b_target: 1.0 - 2.0 * PI / (4.0 * a2),
        tail_target: PI / (8.0 * a2),
        radius_exceeds_scale,
        step_exceeds_scale,
        chain_holds: false,
    };
    report.chain_holds = if nu == 1 {
        radius_exceeds_scale && step_exceeds_scale
    } else {
        report.targets_met()
    };
    Ok(report)
}

/// Exact self-interaction and leakage sums for a finite point set.
#[derive(Debug, Clone, Serialize)]
pub struct ExactAb {
    /// `A(s′) = Σ_{s≠s′} ε_s γ((s′ − s)/a)` for each point, in input order.
    pub a_values: Vec<Complex64>,
    /// `(n, B(n))` for lattice points of the window not in the set.
    pub b_values: Vec<(Vec<i64>, Complex64)>,
    pub max_abs_a: f64,
    pub max_abs_b: f64,
}

fn gaussian_nd(p: &[i64], q: &[i64], a: f64) -> f64 {
    let dist2: f64 = p.iter().zip(q).map(|(x, y)| ((x - y) as f64 / a).powi(2)).sum();
    (-PI * dist2).exp()
}

/// Evaluates `A` on the points and `B` on every lattice point of their
/// bounding box widened by `window` in each coordinate.
pub fn exact_ab(points: &[Vec<i64>], a: f64, signs: &[Complex64], window: i64) -> Result<ExactAb> {
    if points.is_empty() {
        return Err(Error::EmptySet("exact A/B sums need at least one point"));
    }
    if signs.len() != points.len() {
        return Err(Error::InvalidArgument(format!("{} signs for {} points", signs.len(), points.len())));
    }
    if a <= 0.0 || a.is_nan() || window < 0 {
        return Err(Error::InvalidArgument("scale must be positive and window nonnegative".into()));
    }
    let nu = points[0].len();
    if nu == 0 || points.iter().any(|p| p.len() != nu) {
        return Err(Error::InvalidArgument("points must share a positive dimension".into()));
    }

    let a_values: Vec<Complex64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .zip(signs)
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, (q, e))| e * gaussian_nd(p, q, a))
                .sum()
        })
        .collect();

    let lo: Vec<i64> = (0..nu).map(|k| points.iter().map(|p| p[k]).min().unwrap() - window).collect();
    let hi: Vec<i64> = (0..nu).map(|k| points.iter().map(|p| p[k]).max().unwrap() + window).collect();
    let mut b_values = Vec::new();
    let mut cursor = lo.clone();
    loop {
        if !points.contains(&cursor) {
            let b: Complex64 = points.iter().zip(signs).map(|(q, e)| e * gaussian_nd(&cursor, q, a)).sum();
            b_values.push((cursor.clone(), b));
        }
        // Odometer step over the box.
        let mut k = 0;
        while k < nu {
            if cursor[k] < hi[k] {
                cursor[k] += 1;
                break;
            }
            cursor[k] = lo[k];
            k += 1;
        }
        if k == nu {
            break;
        }
    }

    let max_abs_a = a_values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_abs_b = b_values.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    Ok(ExactAb { a_values, b_values, max_abs_a, max_abs_b })
}

/// Flags for the sufficient conditions on step and radius. Each flag
/// includes its precondition (`d ≥ 10`, or `d > 10` for the
/// one-dimensional radius form, and `r < 1/10` for the one-dimensional step
/// form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremConditions {
    /// `r > (5/d)·√ν·log(νd)`.
    pub radius_outer_root: bool,
    /// `r > (5/d)·√(ν·log(νd))`.
    pub radius_full_root: bool,
    /// `d > (5/r)·√(log(1/r) + ν − 1)`.
    pub step_general: bool,
    /// `d > (5/r)·log(1/r)`, one-dimensional.
    pub step_one_dim: bool,
    /// `r > (5/d)·log d`, one-dimensional.
    pub radius_one_dim: bool,
    /// At least one applicable condition holds. The two readings of the
    /// radius form count separately only when they agree.
    pub any_sufficient: bool,
}

pub fn check_theorem_conditions(p: &LacunaryParams) -> TheoremConditions {
    let LacunaryParams { nu, d, r, .. } = *p;
    let nu_f = f64::from(nu);
    let big_step = d >= 10.0;
    let log_nd = (nu_f * d).ln();
    let radius_outer_root = big_step && r > 5.0 / d * nu_f.sqrt() * log_nd;
    let radius_full_root = big_step && r > 5.0 / d * (nu_f * log_nd).sqrt();
    let step_general = big_step && d > 5.0 / r * ((1.0 / r).ln() + nu_f - 1.0).sqrt();
    let one = nu == 1;
    let step_one_dim = one && r < 0.1 && d > 5.0 / r * (1.0 / r).ln();
    let radius_one_dim = one && d > 10.0 && r > 5.0 / d * d.ln();
    TheoremConditions {
        radius_outer_root,
        radius_full_root,
        step_general,
        step_one_dim,
        radius_one_dim,
        any_sufficient: (radius_outer_root && radius_full_root) || step_general || step_one_dim || radius_one_dim,
    }
}

/// `10·(N/d)·√(log d)` consecutive frequencies, the band size that
/// suffices for supports with step at least `d`.
pub fn band_threshold(n: usize, d: usize) -> f64 {
    10.0 * n as f64 / d as f64 * (d as f64).ln().sqrt()
}

/// Band of `round(2rN)` frequencies matching a radius `r` on the circle.
pub fn band_size_for_radius(r: f64, n: usize) -> usize {
    (2.0 * r * n as f64).round() as usize
}

/// Random support on ℤ_N with cyclic step at least `d`: the size is
/// uniform in `1..=⌊N/d⌋`, the slack beyond the minimal gaps is split by a
/// uniform composition, and the whole pattern is rotated uniformly.
pub fn random_separated_support<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> SupportSet {
    let d = d.max(1);
    let k = rng.random_range(1..=(n / d).max(1));
    if k == 1 {
        return SupportSet::new(n, [rng.random_range(0..n)]).expect("index below n");
    }
    let slack = n - k * d;
    // Stars and bars: k−1 bars among slack + k − 1 slots.
    let bars = random_subset(rng, slack + k - 1, k - 1);
    let mut gaps = Vec::with_capacity(k);
    let mut prev = 0;
    for (i, &b) in bars.members().iter().enumerate() {
        gaps.push(b - i - prev + d);
        prev = b - i;
    }
    gaps.push(slack - prev + d);
    let offset = rng.random_range(0..n);
    let mut pos = offset;
    let mut members = Vec::with_capacity(k);
    for g in gaps {
        members.push(pos % n);
        pos += g;
    }
    SupportSet::new(n, members).expect("gaps sum to n")
}

#[derive(Debug, Clone, Serialize)]
pub struct BandTrial {
    pub trial_index: usize,
    pub seed: u64,
    pub support_size: usize,
    pub step: usize,
    pub band_start: usize,
    pub objective: f64,
    pub residual: f64,
    pub relative_error: f64,
    pub success: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandReport {
    pub n: usize,
    pub d: usize,
    pub band_size: usize,
    /// Band size that suffices by the separated-support theorem.
    pub threshold: f64,
    pub clears_threshold: bool,
    pub trials: usize,
    pub successes: usize,
    pub per_trial: Vec<BandTrial>,
    pub seed_derivation: &'static str,
}

/// Plants signals with well-separated supports and recovers them from a
/// band of `band_size` consecutive frequencies at a random offset.
pub fn band_recovery_experiment(
    n: usize,
    d: usize,
    band_size: usize,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<BandReport> {
    if band_size == 0 || band_size > n {
        return Err(Error::InvalidArgument(format!("band size {band_size} must lie in 1..={n}")));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let solver = MinimalExtensionSolver::new(n, *cfg)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = derive_seed(seed, i as u64);
            let mut rng = trial_rng(trial_seed);
            let support = random_separated_support(&mut rng, n, d);
            let x = planted_signal(&mut rng, &support);
            let band_start = rng.random_range(0..n);
            let band = SupportSet::interval(n, band_start, band_size)?;
            let rec = solver.recover_planted(&x, &band)?;
            Ok(BandTrial {
                trial_index: i,
                seed: trial_seed,
                support_size: support.len(),
                step: cyclic_step(&support)?,
                band_start,
                objective: rec.objective,
                residual: rec.feasibility_residual,
                relative_error: rec.minimizer.relative_error(&x),
                success: rec.recovered == Some(true),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold = band_threshold(n, d);
    Ok(BandReport {
        n,
        d,
        band_size,
        threshold,
        clears_threshold: band_size as f64 >= threshold,
        trials,
        successes: per_trial.iter().filter(|t| t.success).count(),
        per_trial,
        seed_derivation: SEED_DERIVATION,
    })
}

/// Distribution of `N/d` for `T` uniformly placed points, with the band
/// size `100·T²·√(log T)` suggested for such supports.
#[derive(Debug, Clone, Serialize)]
pub struct StepRatioProbe {
    pub n: usize,
    pub t: usize,
    pub trials: usize,
    pub quantile_05: f64,
    pub median: f64,
    pub quantile_95: f64,
    /// Fraction of draws with `N/d > 10/T²`.
    pub fraction_above_inverse_square: f64,
    pub suggested_band: f64,
}

pub fn step_ratio_probe(n: usize, t: usize, trials: usize, seed: u64) -> Result<StepRatioProbe> {
    if t < 2 || t > n {
        return Err(Error::InvalidArgument(format!("need 2 <= T <= N, got T={t}, N={n}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let mut ratios = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = trial_rng(derive_seed(seed, i as u64));
        let step = cyclic_step(&random_subset(&mut rng, n, t))?;
        ratios.push(n as f64 / step as f64);
    }
    ratios.sort_by(f64::total_cmp);
    let q = |p: f64| ratios[((p * (trials - 1) as f64).round() as usize).min(trials - 1)];
    let cut = 10.0 / (t * t) as f64;
    Ok(StepRatioProbe {
        n,
        t,
        trials,
        quantile_05: q(0.05),
        median: q(0.5),
        quantile_95: q(0.95),
        fraction_above_inverse_square: ratios.iter().filter(|&&v| v > cut).count() as f64 / trials as f64,
        suggested_band: 100.0 * (t * t) as f64 * (t as f64).ln().sqrt(),
    })
}

/// A signal that ℓ¹-minimal extension from the band cannot recover,
/// together with a feasible competitor of smaller ℓ¹ norm.
#[derive(Debug, Clone, Serialize)]
pub struct FailureExample {
    pub x: Signal,
    /// `x − z`: same spectrum as `x` on the band.
    pub competitor: Signal,
    pub keep: usize,
    pub x_l1: f64,
    pub competitor_l1: f64,
    /// `max_{ω ∈ band} |x̂(ω) − ĉ(ω)|`.
    pub band_mismatch: f64,
}

/// Spectrum with a single unit tone at the smallest frequency off the band.
pub fn single_tone_off_band(band: &SupportSet) -> Result<Spectrum> {
    let w = (0..band.n())
        .find(|w| !band.contains(*w))
        .ok_or(Error::InvalidArgument("band covers every frequency".into()))?;
    Ok(Spectrum::delta(band.n(), w, Complex64::new(1.0, 0.0)))
}

/// Truncates `z = idft(z_spectrum)` to its `keep` largest entries (ties to
/// the lower index), growing `keep` until the kept part outweighs the
/// discarded part in ℓ¹. The discarded part, negated, is the competitor.
pub fn construct_failure_example(band: &SupportSet, z_spectrum: &Spectrum, keep: usize) -> Result<FailureExample> {
    let n = band.n();
    if z_spectrum.n() != n {
        return Err(Error::InvalidArgument("band and spectrum live on different groups".into()));
    }
    if keep >= n {
        return Err(Error::InvalidArgument(format!("keep = {keep} must be below N = {n}")));
    }
    if band.is_empty() {
        return Err(Error::EmptySet("failure construction needs a nonempty band"));
    }
    if band.len() == n {
        return Err(Error::InvalidArgument("band must be a proper subset".into()));
    }
    let scale = z_spectrum.max_abs();
    if scale == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let on_band = band.members().iter().map(|&w| z_spectrum[w].norm()).fold(0.0, f64::max);
    if on_band > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidArgument(format!("spectrum does not vanish on the band (max {on_band:e})")));
    }

    let plan = FourierPlan::new(n);
    let z = plan.idft(z_spectrum);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| z[j].norm().total_cmp(&z[i].norm()).then(i.cmp(&j)));
    let total: f64 = z.values().iter().map(|v| v.norm()).sum();

    let mut kept = 0.0;
    for (count, &i) in order.iter().enumerate() {
        kept += z[i].norm();
        let k = count + 1;
        if k < keep.max(1) {
            continue;
        }
        if k >= n {
            break;
        }
        // Strict with room for rounding: equal-modulus z otherwise ties.
        if total - kept < kept * (1.0 - 1e-9) {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            for &j in &order[..k] {
                x[j] = z[j];
            }
            let x = Signal::from_vec_unchecked(x);
            let competitor = x.sub(&z);
            let xs = plan.dft(&x);
            let cs = plan.dft(&competitor);
            let band_mismatch = band.members().iter().map(|&w| (xs[w] - cs[w]).norm()).fold(0.0, f64::max);
            return Ok(FailureExample {
                x_l1: x.l1_norm(),
                competitor_l1: competitor.l1_norm(),
                x,
                competitor,
                keep: k,
                band_mismatch,
            });
        }
    }
    Err(Error::CannotSatisfyMassCondition { n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{FrequencySamples, MinimalExtensionSolver};

    fn chain_params() -> LacunaryParams {
        let a: f64 = 10.0;
        let root = a.ln().sqrt();
        LacunaryParams::new(1, 2.0 * a * root + 1.0, 2.0 * root / a + 0.01, a).unwrap()
    }

    #[test]
    fn theta_at_origin_for_large_scale() {
        assert!((theta_kernel(0.0, 10.0, 1).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn theta_is_periodic_and_even() {
        for &a in &[0.5, 2.0, 10.0] {
            for &t in &[0.0, 0.13, 0.37, 0.5] {
                let v = theta_kernel(t, a, 1).unwrap();
                assert!((theta_kernel(t + 1.0, a, 1).unwrap() - v).abs() < 1e-12);
                assert!((theta_kernel(-t, a, 1).unwrap() - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn both_series_agree() {
        for &a in &[0.5, 2.0, 10.0] {
            for i in 0..=20 {
                let t = i as f64 / 40.0;
                assert!((theta_spatial(t, a) - theta_fourier(t, a)).abs() < 1e-10, "a={a} t={t}");
            }
        }
    }

    #[test]
    fn higher_dimension_is_a_product() {
        let v = theta_kernel(0.2, 3.0, 3).unwrap();
        let expected = theta_spatial(0.2, 3.0) * theta_spatial(0.0, 3.0).powi(2);
        assert!((v - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn chain_holds_at_admissible_parameters() {
        let b = majorant_chain(&chain_params()).unwrap();
        assert!(b.chain_holds);
        assert!(b.targets_met());
        assert!(b.tail <= PI / 800.0);
        assert!(b.a_sum.unwrap() <= b.a_max && b.b_sum.unwrap() <= b.b_max);
        assert!(b.tail_exact.unwrap() <= b.tail);
    }

    #[test]
    fn chain_fails_for_small_radius() {
        let p = LacunaryParams::new(1, 40.0, 0.11, 10.0).unwrap();
        let b = majorant_chain(&p).unwrap();
        assert!(!b.radius_exceeds_scale);
        assert!(!b.chain_holds);
    }

    #[test]
    fn inadmissible_scale_is_rejected() {
        let p = LacunaryParams::new(1, 40.0, 0.3, 5.0).unwrap();
        assert!(matches!(majorant_chain(&p), Err(Error::ScaleOutOfRange(_))));
        let p = LacunaryParams::new(1, 8.0, 0.3, 10.0).unwrap();
        assert!(matches!(majorant_chain(&p), Err(Error::ScaleOutOfRange(_))));
    }

    #[test]
    fn two_dimensional_constants() {
        let p = LacunaryParams::new(2, 60.0, 0.35, 12.0).unwrap();
        let b = majorant_chain(&p).unwrap();
        let decay = (-PI * 144.0 * 0.35f64.powi(2)).exp();
        assert!((b.tail - 2.0 * 144.0 * decay).abs() < 1e-15);
        assert!((b.a_max - 8.0 * (-PI * 3600.0 / (4.0 * 144.0)).exp()).abs() < 1e-15);
        assert!(b.a_sum.is_none());
    }

    #[test]
    fn default_scale_is_geometric_mean() {
        let p = LacunaryParams::with_default_scale(1, 400.0, 0.25).unwrap();
        assert!((p.a - 40.0).abs() < 1e-12);
        assert!(p.scale_admissible());
    }

    #[test]
    fn exact_sums_small_sets() {
        let one = exact_ab(&[vec![0]], 10.0, &[Complex64::new(1.0, 0.0)], 3).unwrap();
        assert_eq!(one.max_abs_a, 0.0);
        let e = [Complex64::new(1.0, 0.0); 2];
        let two = exact_ab(&[vec![0], vec![30]], 10.0, &e, 0).unwrap();
        assert!((two.a_values[0].re - gaussian(3.0)).abs() < 1e-15);
        assert_eq!(two.b_values.len(), 29);
        let plane = exact_ab(&[vec![0, 0]], 10.0, &e[..1], 1).unwrap();
        assert_eq!(plane.b_values.len(), 8);
    }

    #[test]
    fn theorem_condition_arithmetic() {
        let p = LacunaryParams::new(1, 100.0, 0.25, 20.0).unwrap();
        assert!(check_theorem_conditions(&p).radius_one_dim);
        let p = LacunaryParams::new(1, 100.0, 0.2, 20.0).unwrap();
        assert!(!check_theorem_conditions(&p).radius_one_dim);
        let p = LacunaryParams::new(1, 300.0, 0.05, 40.0).unwrap();
        assert!(check_theorem_conditions(&p).step_one_dim);
        let p = LacunaryParams::new(1, 290.0, 0.05, 40.0).unwrap();
        assert!(!check_theorem_conditions(&p).step_one_dim);
    }

    #[test]
    fn radius_readings_coincide_in_one_dimension() {
        let p = LacunaryParams::new(1, 100.0, 0.25, 20.0).unwrap();
        let c = check_theorem_conditions(&p);
        // At ν = 1 the outer-root reading is the one-dimensional radius form.
        assert_eq!(c.radius_outer_root, c.radius_one_dim);
    }

    #[test]
    fn separated_supports_have_the_step() {
        let mut rng = trial_rng(11);
        for _ in 0..200 {
            let s = random_separated_support(&mut rng, 100, 7);
            assert!(cyclic_step(&s).unwrap() >= 7);
            assert!(s.len() <= 14);
        }
    }

    #[test]
    fn band_threshold_value() {
        assert_eq!(band_threshold(1024, 64).ceil() as usize, 327);
        assert_eq!(band_size_for_radius(0.25, 100), 50);
    }

    #[test]
    fn full_band_always_recovers() {
        let r = band_recovery_experiment(32, 4, 32, 5, 9, &SolverConfig::default()).unwrap();
        assert_eq!(r.successes, 5);
    }

    #[test]
    fn four_point_failure() {
        let band = SupportSet::new(4, [0, 1]).unwrap();
        let zs = single_tone_off_band(&band).unwrap();
        assert_eq!(zs.values()[2], Complex64::new(1.0, 0.0));
        let f = construct_failure_example(&band, &zs, 3).unwrap();
        assert_eq!(f.keep, 3);
        assert!((f.x_l1 - 1.5).abs() < 1e-12);
        assert!((f.competitor_l1 - 0.5).abs() < 1e-12);
        assert!(f.band_mismatch < 1e-12);
        let expected = [0.5, -0.5, 0.5, 0.0];
        for (v, e) in f.x.values().iter().zip(expected) {
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-12);
        }

        let solver = MinimalExtensionSolver::new(4, SolverConfig::default()).unwrap();
        let rec = solver.recover_planted(&f.x, &band).unwrap();
        assert!(rec.objective <= f.competitor_l1 + 1e-8);
        assert_eq!(rec.recovered, Some(false));
        let samples = FrequencySamples::of_signal(&f.x, &band, solver.plan()).unwrap();
        assert!(rec.max_sample_mismatch(&samples, solver.plan()) < 1e-9);
    }

    #[test]
    fn failure_rejections() {
        let band = SupportSet::new(4, [0, 1]).unwrap();
        let zs = single_tone_off_band(&band).unwrap();
        assert!(construct_failure_example(&band, &zs, 4).is_err());
        assert!(single_tone_off_band(&SupportSet::full(4)).is_err());
        let on_band = Spectrum::delta(4, 0, Complex64::new(1.0, 0.0));
        assert!(construct_failure_example(&band, &on_band, 1).is_err());
    }

    #[test]
    fn step_ratio_probe_quantiles_are_ordered() {
        let p = step_ratio_probe(200, 5, 300, 4).unwrap();
        assert!(p.quantile_05 <= p.median && p.median <= p.quantile_95);
        assert!(p.quantile_05 >= 5.0);
    }
}
