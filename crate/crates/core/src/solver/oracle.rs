//! Brute-force basis pursuit for small real instances.
//!
//! For real unknowns the problem is a linear program, so some minimizer is
//! a vertex with at most `rank` nonzeros, where `rank` is the rank of the
//! real constraint system (the real and imaginary parts of each sampled
//! coefficient). Enumerating every support of that size and solving the
//! restricted system by least squares therefore reaches the optimum.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::FrequencySamples;
use crate::error::{Error, Result};
use crate::spectral::{unit_roots, Signal};

pub const ORACLE_MAX_N: usize = 16;

const FEASIBILITY_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub objective: f64,
    /// All distinct real minimizers found within `1e−9` of `objective`.
    pub minimizers: Vec<Signal>,
    /// Rank of the real constraint system; bounds the vertex support size.
    pub constraint_rank: usize,
}

/// Stacks `Re` and `Im` rows of the unitary partial Fourier map.
fn real_system(samples: &FrequencySamples) -> (DMatrix<f64>, DVector<f64>) {
    let n = samples.n();
    let roots = unit_roots(n);
    let scale = 1.0 / (n as f64).sqrt();
    let m = samples.omega().len();
    let mut a = DMatrix::<f64>::zeros(2 * m, n);
    let mut b = DVector::<f64>::zeros(2 * m);
    for (row, (w, v)) in samples.iter().enumerate() {
        for t in 0..n {
            // e(−ωt/N) = conj(e(ωt/N))
            let e = roots[(w * t) % n].conj() * scale;
            a[(2 * row, t)] = e.re;
            a[(2 * row + 1, t)] = e.im;
        }
        b[2 * row] = v.re;
        b[2 * row + 1] = v.im;
    }
    (a, b)
}

fn numerical_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-10 * top.max(1.0)).count()
}

/// Minimal ℓ¹ value over real `y` with `ŷ|_Ω = samples`, and every
/// minimizer found among the vertex candidates.
pub fn exhaustive_bp_oracle(samples: &FrequencySamples) -> Result<OracleResult> {
    let n = samples.n();
    if n > ORACLE_MAX_N {
        return Err(Error::InstanceTooLarge { n, limit: ORACLE_MAX_N });
    }
    let (a, b) = real_system(samples);
    let rank = numerical_rank(&a);
    let feas = FEASIBILITY_TOL * b.norm().max(1.0);

    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    if b.norm() <= feas {
        candidates.push((0.0, vec![0.0; n]));
    }
    for k in 1..=rank {
        for support in (0..n).combinations(k) {
            let sub = a.select_columns(support.iter());
            let Ok(coef) = sub.clone().svd(true, true).solve(&b, 1e-13) else {
                continue;
            };
            if (&sub * &coef - &b).norm() > feas {
                continue;
            }
            let mut y = vec![0.0; n];
            for (&t, c) in support.iter().zip(coef.iter()) {
                y[t] = *c;
            }
            let obj = y.iter().map(|v| v.abs()).sum();
            candidates.push((obj, y));
        }
    }

    let best = candidates
        .iter()
        .map(|(o, _)| *o)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::NoFeasibleCandidate);
    }
    let mut minimizers: Vec<Vec<f64>> = Vec::new();
    for (obj, y) in candidates {
        if obj > best + TIE_TOL {
            continue;
        }
        let duplicate = minimizers
            .iter()
            .any(|m| m.iter().zip(&y).all(|(p, q)| (p - q).abs() <= TIE_TOL));
        if !duplicate {
            minimizers.push(y);
        }
    }
    Ok(OracleResult {
        objective: best,
        minimizers: minimizers
            .into_iter()
            .map(|y| Signal::from_vec_unchecked(y.into_iter().map(|v| Complex64::new(v, 0.0)).collect()))
            .collect(),
        constraint_rank: rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dft, idft, SupportSet};

    #[test]
    fn full_sampling_has_unique_minimizer() {
        let x = Signal::from_real(&[0.5, -1.0, 0.0, 2.0, 0.25]).unwrap();
        let s = dft(&x);
        let samples = FrequencySamples::from_spectrum(&s, &SupportSet::full(5)).unwrap();
        let res = exhaustive_bp_oracle(&samples).unwrap();
        assert_eq!(res.minimizers.len(), 1);
        assert!(res.minimizers[0].relative_error(&idft(&s)) < 1e-10);
        assert!((res.objective - 3.75).abs() < 1e-10);
    }

    #[test]
    fn comb_instance_has_several_minimizers() {
        let x = Signal::from_real(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        let omega = SupportSet::new(4, [0, 2]).unwrap();
        let samples = FrequencySamples::from_spectrum(&dft(&x), &omega).unwrap();
        let res = exhaustive_bp_oracle(&samples).unwrap();
        assert!((res.objective - 2.0).abs() < 1e-10);
        assert!(res.minimizers.len() >= 2);
        assert_eq!(res.constraint_rank, 2);
    }

    #[test]
    fn objective_never_exceeds_a_feasible_point() {
        let x = Signal::from_real(&[0.0, 1.0, 0.0, -2.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        let omega = SupportSet::new(8, [0, 1, 7, 4]).unwrap();
        let samples = FrequencySamples::from_spectrum(&dft(&x), &omega).unwrap();
        let res = exhaustive_bp_oracle(&samples).unwrap();
        assert!(res.objective <= x.l1_norm() + 1e-12);
    }

    #[test]
    fn rejects_large_instances() {
        let samples =
            FrequencySamples::new(SupportSet::new(17, [0]).unwrap(), vec![Complex64::new(1.0, 0.0)])
                .unwrap();
        assert!(matches!(
            exhaustive_bp_oracle(&samples),
            Err(Error::InstanceTooLarge { n: 17, .. })
        ));
    }
}
