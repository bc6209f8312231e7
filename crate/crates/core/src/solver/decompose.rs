//! Splitting a signal into a time-sparse part and a frequency-sparse part,
//! `x = y + z`, minimizing either `‖y‖₁ + ‖ẑ‖₁` (convex) or
//! `‖y‖₀ + ‖ẑ‖₀` (exhaustive, small N only).

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::splitting::{default_threshold, douglas_rachford};
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::spectral::{dft, unit_roots, FourierPlan, Signal, Spectrum, ZeroTolerance};

pub const L0_MAX_N: usize = 16;
/// Cap on candidate support pairs examined by [`dh_decompose_l0`].
pub const L0_SEARCH_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct MixedDecomposition {
    /// Time-side part.
    pub y: Signal,
    /// Frequency-side part, `z = idft(z_hat)`.
    pub z: Signal,
    pub z_hat: Spectrum,
    /// `‖y‖₁ + ‖ẑ‖₁`.
    pub objective: f64,
    /// `‖y + z − x‖₂`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Convex decomposition `min ‖y‖₁ + ‖ẑ‖₁` subject to `y + idft(ẑ) = x`.
///
/// The constraint map `(y, ẑ) ↦ y + F*ẑ` satisfies `AA* = 2I`, so the
/// projector is `(y, ẑ) ↦ (y − r/2, ẑ − F r/2)` with `r` the residual.
pub fn dh_decompose_l1(x: &Signal, cfg: &SolverConfig) -> Result<MixedDecomposition> {
    cfg.validate()?;
    let n = x.n();
    let plan = FourierPlan::new(n);
    let target = x.values().to_vec();

    let project = |u: &mut [Complex64], scratch: &mut Vec<Complex64>| {
        let (y, zh) = u.split_at_mut(n);
        scratch.clear();
        scratch.extend_from_slice(zh);
        plan.inverse_in_place(scratch);
        for ((s, yi), xi) in scratch.iter_mut().zip(y.iter()).zip(&target) {
            *s = 0.5 * (*s + yi - xi);
        }
        for (yi, r) in y.iter_mut().zip(scratch.iter()) {
            *yi -= r;
        }
        plan.forward_in_place(scratch);
        for (zi, r) in zh.iter_mut().zip(scratch.iter()) {
            *zi -= r;
        }
    };

    let mut start = vec![Complex64::new(0.0, 0.0); 2 * n];
    let mut scratch = Vec::with_capacity(n);
    project(&mut start, &mut scratch);
    let tol = ZeroTolerance::DEFAULT;
    let spread = x.l0(tol).min(dft(x).l0(tol)).max(1);
    let threshold = default_threshold(&start, spread);

    let outcome = douglas_rachford(start, project, threshold, cfg);
    let (y, zh) = outcome.point.split_at(n);
    let y = Signal::from_vec_unchecked(y.to_vec());
    let z_hat = Spectrum::from_vec_unchecked(zh.to_vec());
    let z = plan.idft(&z_hat);
    let residual = y.add(&z).sub(x).l2_norm();
    if residual > cfg.eps_feasibility {
        return Err(Error::NonConvergence {
            iterations: outcome.iterations,
            residual,
            step: outcome.last_gap,
        });
    }
    Ok(MixedDecomposition {
        objective: y.l1_norm() + z_hat.coefficient_l1(),
        y,
        z,
        z_hat,
        residual,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct L0Decomposition {
    /// Minimal `‖y‖₀ + ‖ẑ‖₀`.
    pub best_total: usize,
    /// Every `(y, z)` attaining it.
    pub decompositions: Vec<(Signal, Signal)>,
}

/// Exhaustive search for `min ‖y‖₀ + ‖ẑ‖₀` subject to `y + z = x`.
///
/// Totals are tried in increasing order. For a time support `S_y` and a
/// frequency support `S_z`, feasibility means `x` restricted to the rows
/// outside `S_y` lies in the span of the characters indexed by `S_z`
/// (restricted to the same rows); `y` then absorbs what is left on `S_y`.
/// `tol` decides both the ℓ⁰ counts bounding the search and the least
/// squares residual that counts as exact (relative to `max(1, ‖x‖₂)`).
pub fn dh_decompose_l0(x: &Signal, tol: ZeroTolerance) -> Result<L0Decomposition> {
    let n = x.n();
    if n > L0_MAX_N {
        return Err(Error::InstanceTooLarge { n, limit: L0_MAX_N });
    }
    let upper = x.l0(tol).min(dft(x).l0(tol));
    if upper == 0 {
        return Ok(L0Decomposition {
            best_total: 0,
            decompositions: vec![(Signal::zeros(n), Signal::zeros(n))],
        });
    }

    // characters[ω][t] = e(ωt/N)/√N, the inverse transform of δ_ω.
    let roots = unit_roots(n);
    let scale = 1.0 / (n as f64).sqrt();
    let character = |w: usize, t: usize| roots[(w * t) % n] * scale;
    let feas = tol.value() * x.l2_norm().max(1.0);

    let mut evaluated = 0usize;
    for total in 1..=upper {
        let mut found = Vec::new();
        for spikes in 0..=total {
            let tones = total - spikes;
            for s_y in (0..n).combinations(spikes) {
                let rows: Vec<usize> = (0..n).filter(|t| !s_y.contains(t)).collect();
                for s_z in (0..n).combinations(tones) {
                    evaluated += 1;
                    if evaluated > L0_SEARCH_BUDGET {
                        return Err(Error::SearchBudgetExceeded { budget: L0_SEARCH_BUDGET });
                    }
                    let z = if tones == 0 {
                        if rows.iter().any(|&t| x[t].norm() > feas) {
                            continue;
                        }
                        vec![Complex64::new(0.0, 0.0); n]
                    } else {
                        let a = DMatrix::from_fn(rows.len(), tones, |i, j| character(s_z[j], rows[i]));
                        let b = DVector::from_iterator(rows.len(), rows.iter().map(|&t| x[t]));
                        let Ok(coef) = a.clone().svd(true, true).solve(&b, 1e-13) else {
                            continue;
                        };
                        if (&a * &coef - &b).norm() > feas {
                            continue;
                        }
                        (0..n)
                            .map(|t| s_z.iter().zip(coef.iter()).map(|(&w, c)| c * character(w, t)).sum())
                            .collect()
                    };
                    let mut y = vec![Complex64::new(0.0, 0.0); n];
                    for &t in &s_y {
                        y[t] = x[t] - z[t];
                    }
                    found.push((Signal::from_vec_unchecked(y), Signal::from_vec_unchecked(z)));
                }
            }
        }
        if !found.is_empty() {
            return Ok(L0Decomposition { best_total: total, decompositions: found });
        }
    }
    unreachable!("x itself (or its spectrum) is a feasible decomposition of total {upper}")
}
