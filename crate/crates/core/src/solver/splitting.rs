//! Douglas–Rachford iteration for `min ‖u‖₁` over an affine set.
//!
//! With governing sequence `z`, threshold `μ` and relaxation `ρ`:
//!
//! ```text
//! y = Π(z)                  exact affine projection
//! w = soft(2y − z, μ)       complex soft threshold
//! z ← z + ρ (w − y)
//! ```
//!
//! The iterate handed back is `y`, which is feasible to rounding. The run
//! stops once `max|w − y|` falls below `eps_step` times the largest entry
//! of `y`.

use num_complex::Complex64;

use super::SolverConfig;

/// Proximal map of `μ|·|` on ℂ: `v ↦ v · max(0, 1 − μ/|v|)`.
#[inline]
pub fn soft_threshold(v: Complex64, mu: f64) -> Complex64 {
    let m = v.norm();
    if m <= mu {
        Complex64::new(0.0, 0.0)
    } else {
        v * (1.0 - mu / m)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SplitOutcome {
    pub point: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    pub last_gap: f64,
}

/// Threshold scaled to the typical entry of a sparse solution carrying the
/// energy of the least-norm point over roughly `m` active coefficients.
pub(crate) fn default_threshold(start: &[Complex64], m: usize) -> f64 {
    let energy = start.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let typical = energy / (m.max(1) as f64).sqrt();
    if typical > 0.0 {
        0.5 * typical
    } else {
        1.0
    }
}

pub(crate) fn douglas_rachford<P>(
    start: Vec<Complex64>,
    mut project: P,
    threshold: f64,
    cfg: &SolverConfig,
) -> SplitOutcome
where
    P: FnMut(&mut [Complex64], &mut Vec<Complex64>),
{
    let len = start.len();
    let mut z = start;
    let mut y = vec![Complex64::new(0.0, 0.0); len];
    let mut scratch = Vec::with_capacity(len);
    let mut last_gap = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        y.copy_from_slice(&z);
        project(&mut y, &mut scratch);

        let mut gap: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (zi, yi) in z.iter_mut().zip(&y) {
            let w = soft_threshold(2.0 * yi - *zi, threshold);
            let d = w - yi;
            gap = gap.max(d.norm());
            scale = scale.max(yi.norm());
            *zi += cfg.relaxation * d;
        }
        last_gap = gap;
        if gap <= cfg.eps_step * scale.max(f64::MIN_POSITIVE) {
            return SplitOutcome { point: y, iterations: iter, converged: true, last_gap };
        }
    }

    // Budget exhausted: hand back the feasible point of the final state.
    y.copy_from_slice(&z);
    project(&mut y, &mut scratch);
    SplitOutcome { point: y, iterations: cfg.max_iter, converged: false, last_gap }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_shrinks_modulus_keeps_phase() {
        let v = Complex64::new(3.0, 4.0);
        let s = soft_threshold(v, 1.0);
        assert!((s.norm() - 4.0).abs() < 1e-15);
        assert!((s.arg() - v.arg()).abs() < 1e-15);
        assert_eq!(soft_threshold(v, 5.0), Complex64::new(0.0, 0.0));
        assert_eq!(soft_threshold(v, 7.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn projection_onto_a_line() {
        // min |u0| + |u1| s.t. u0 + 2 u1 = 2 (real): optimum u = (0, 1).
        let project = |u: &mut [Complex64], _: &mut Vec<Complex64>| {
            let r = u[0] + 2.0 * u[1] - Complex64::new(2.0, 0.0);
            u[0] -= r / 5.0;
            u[1] -= 2.0 * r / 5.0;
        };
        let start = vec![Complex64::new(0.4, 0.0), Complex64::new(0.8, 0.0)];
        let out = douglas_rachford(start, project, 0.3, &SolverConfig::default());
        assert!(out.converged);
        assert!(out.point[0].norm() < 1e-9);
        assert!((out.point[1] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }
}
