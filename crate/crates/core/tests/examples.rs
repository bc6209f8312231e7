use num_complex::Complex64;

use wiener_core::lacunary::{band_recovery_experiment, band_size_for_radius, majorant_chain, LacunaryParams};
use wiener_core::solver::{dh_decompose_l1, MinimalExtensionSolver, SolverConfig};
use wiener_core::spectral::{idft, Signal, Spectrum, SupportSet};

/// Whenever the Gaussian chain holds, the discrete transcription (support
/// step `⌈d⌉`, band of `round(2rN)` frequencies) recovers every trial.
#[test]
fn chain_implies_band_recovery() {
    let cfg = SolverConfig::default();
    for (a, n) in [(10.0f64, 256usize), (12.0, 512), (15.0, 512)] {
        let root = a.ln().sqrt();
        let r = 2.0 * root / a + 0.01;
        let d = 2.0 * a * root + 1.0;
        let chain = majorant_chain(&LacunaryParams::new(1, d, r, a).unwrap()).unwrap();
        assert!(chain.chain_holds, "a={a}");
        let band = band_size_for_radius(r, n);
        let report = band_recovery_experiment(n, d.ceil() as usize, band, 20, 11, &cfg).unwrap();
        assert_eq!(report.successes, 20, "a={a} N={n} band={band}");
    }
}

#[test]
fn single_frequency_cannot_recover_two_spikes() {
    let report = band_recovery_experiment(64, 16, 1, 20, 3, &SolverConfig::default()).unwrap();
    let multi: Vec<_> = report.per_trial.iter().filter(|t| t.support_size >= 2).collect();
    assert!(!multi.is_empty());
    assert!(multi.iter().all(|t| !t.success));
}

#[test]
fn spike_plus_tone_splits_cleanly() {
    let n = 64;
    let spike = Signal::delta(n, 5, Complex64::new(0.8, -0.3));
    let tone = idft(&Spectrum::delta(n, 9, Complex64::new(-0.4, 1.1)));
    let x = spike.add(&tone);
    let split = dh_decompose_l1(&x, &SolverConfig::default()).unwrap();
    assert!(split.y.sub(&spike).l2_norm() <= 1e-6);
    assert!(split.z.sub(&tone).l2_norm() <= 1e-6);
    let planted = spike.l1_norm() + Complex64::new(-0.4, 1.1).norm();
    assert!((split.objective - planted).abs() <= 1e-6);
}

#[test]
fn one_spike_from_four_of_five_frequencies() {
    let x = Signal::delta(5, 2, Complex64::new(1.0, 0.0));
    let omega = SupportSet::new(5, [0, 1, 2, 3]).unwrap();
    let solver = MinimalExtensionSolver::new(5, SolverConfig::default()).unwrap();
    let rec = solver.recover_planted(&x, &omega).unwrap();
    assert!(rec.minimizer.sub(&x).l2_norm() <= 1e-6);
    assert_eq!(rec.recovered, Some(true));
}
