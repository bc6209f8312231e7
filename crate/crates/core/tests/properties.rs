use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use wiener_core::certificates::{build_certificate, make_kernel, SignPattern};
use wiener_core::lacunary::{
    construct_failure_example, exact_ab, majorant_chain, theta_kernel, LacunaryParams,
};
use wiener_core::rng::{derive_seed, planted_signal, trial_rng};
use wiener_core::solver::{
    dh_decompose_l0, dh_decompose_l1, exhaustive_bp_oracle, FrequencySamples, MinimalExtensionSolver, SolverConfig,
};
use wiener_core::spectral::{dft, idft, FourierPlan, Signal, Spectrum, SupportSet, ZeroTolerance};
use wiener_core::uncertainty::{annihilating_pair_exists, max_zero_run, sum_bound, verify_support_product, CombWitness};

const TOL: ZeroTolerance = ZeroTolerance::DEFAULT;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn signal(max_n: usize) -> impl Strategy<Value = Signal> {
    (2..=max_n).prop_flat_map(|n| prop::collection::vec(complex(), n).prop_map(|v| Signal::new(v).unwrap()))
}

/// Nonzero signal with a random support of size `1..=n`.
fn sparse_signal(max_n: usize) -> impl Strategy<Value = Signal> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n), any::<u64>()))
        .prop_map(|(n, support, seed)| {
            let s = SupportSet::new(n, support).unwrap();
            planted_signal(&mut trial_rng(seed), &s)
        })
}

fn subset(n: usize) -> impl Strategy<Value = SupportSet> {
    prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n).prop_map(move |m| SupportSet::new(n, m).unwrap())
}

proptest! {
    #[test]
    fn transform_round_trip_and_parseval(x in signal(64)) {
        let s = dft(&x);
        prop_assert!(idft(&s).relative_error(&x) < 1e-12);
        prop_assert!((s.l2_norm() - x.l2_norm()).abs() < 1e-12 * x.l2_norm().max(1.0));
    }

    #[test]
    fn fast_path_matches_direct_sum(x in signal(96)) {
        let plan = FourierPlan::new(x.n());
        prop_assert!(plan.dft(&x).relative_error(&dft(&x)) < 1e-12);
        let s = dft(&x);
        prop_assert!(plan.idft(&s).relative_error(&idft(&s)) < 1e-12);
    }

    #[test]
    fn translation_keeps_spectral_moduli(x in signal(40), shift in 0usize..40) {
        let a = dft(&x);
        let b = dft(&x.translated(shift));
        for (u, v) in a.values().iter().zip(b.values()) {
            prop_assert!((u.norm() - v.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn support_product_sum_and_zero_runs(x in sparse_signal(64)) {
        let p = verify_support_product(&x, TOL).unwrap();
        prop_assert!(p.holds, "product {} < N = {}", p.product, p.n);
        prop_assert!(sum_bound(&x, TOL).unwrap().holds);
        let run = max_zero_run(&dft(&x.normalized()), TOL);
        prop_assert!(run < p.time_support, "zero run {} with {} nonzeros", run, p.time_support);
    }

    #[test]
    fn small_support_products_never_annihilate(
        (s, sp) in (2usize..=32).prop_flat_map(|n| (subset(n), subset(n)))
            .prop_filter("product below N", |(s, sp)| s.len() * sp.len() < s.n())
    ) {
        prop_assert!(!annihilating_pair_exists(&s, &sp).unwrap());
    }

    #[test]
    fn rank_test_agrees_with_svd((s, sp) in (2usize..=16).prop_flat_map(|n| (subset(n), subset(n)))) {
        let n = s.n();
        let rows = sp.complement();
        let scale = 1.0 / (n as f64).sqrt();
        let m = DMatrix::from_fn(rows.len(), s.len(), |i, j| {
            let phase = -2.0 * std::f64::consts::PI * (rows.members()[i] * s.members()[j]) as f64 / n as f64;
            Complex64::from_polar(scale, phase)
        });
        let rank = if rows.is_empty() { 0 } else { m.svd(false, false).rank(1e-9) };
        prop_assert_eq!(annihilating_pair_exists(&s, &sp).unwrap(), rank < s.len());
    }

    #[test]
    fn kernel_energy_and_certificate_leakage(
        (omega, seed) in (2usize..=48).prop_flat_map(|n| (subset(n), any::<u64>()))
    ) {
        let n = omega.n();
        let k = make_kernel(&omega).unwrap();
        prop_assert!((k.energy() - (n * omega.len()) as f64).abs() <= 1e-8 * n as f64);
        let mut rng = trial_rng(seed);
        let support = wiener_core::rng::random_subset(&mut rng, n, 1 + (seed as usize) % n);
        let x = planted_signal(&mut rng, &support);
        let sp = SignPattern::from_signal(&x, TOL);
        let p = build_certificate(&sp, &k).unwrap();
        prop_assert!(p.off_omega_leakage() <= 1e-9);

        let shift = (seed as usize / 7) % n;
        let moved = build_certificate(&sp.translated(shift), &k).unwrap();
        let expected = Signal::new(p.values().to_vec()).unwrap().translated(shift);
        for (u, v) in moved.values().iter().zip(expected.values()) {
            prop_assert!((u - v).norm() <= 1e-10);
        }
    }

    #[test]
    fn theta_is_even_periodic_and_decreasing(a in 1.0..40.0f64, t in 0.0..0.5f64) {
        let v = theta_kernel(t, a, 1).unwrap();
        prop_assert!((theta_kernel(-t, a, 1).unwrap() - v).abs() <= 1e-12 * v.max(1.0));
        prop_assert!((theta_kernel(t + 1.0, a, 1).unwrap() - v).abs() <= 1e-12 * v.max(1.0));
        let further = theta_kernel((t + 0.01).min(0.5), a, 1).unwrap();
        prop_assert!(further <= v * (1.0 + 1e-12));
    }

    #[test]
    fn chain_forces_targets(a in 10.0..60.0f64, r_frac in 0.0..1.0f64, d_frac in 0.0..1.0f64) {
        let r = 1.0 / a + r_frac * (0.45 - 1.0 / a) + 1e-9;
        let d = a * (1.0 + 1e-9) + d_frac * 10.0 * a;
        let p = LacunaryParams::new(1, d, r, a).unwrap();
        let b = majorant_chain(&p).unwrap();
        if b.chain_holds {
            prop_assert!(b.targets_met());
        }
        prop_assert!(b.a_sum.unwrap() <= b.a_max && b.b_sum.unwrap() <= b.b_max);
        prop_assert!(b.tail_exact.unwrap() <= b.tail * (1.0 + 1e-12));
    }

    #[test]
    fn failure_certificates_hold(
        (n, start, len, seed) in (8usize..=64).prop_flat_map(|n| (Just(n), 0..n, 1..n, any::<u64>()))
    ) {
        let band = SupportSet::interval(n, start, len).unwrap();
        let mut rng = trial_rng(seed);
        let values = (0..n)
            .map(|w| if band.contains(w) { Complex64::new(0.0, 0.0) } else { wiener_core::rng::random_phase(&mut rng) })
            .collect();
        let z = Spectrum::new(values).unwrap();
        let f = construct_failure_example(&band, &z, 1).unwrap();
        prop_assert!(f.competitor_l1 < f.x_l1);
        prop_assert!(f.band_mismatch <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exact_sums_stay_below_majorants(
        a in 10.0..30.0f64,
        d_mult in 1.01..4.0f64,
        k in 1usize..8,
        seed in any::<u64>(),
    ) {
        let d = a * d_mult;
        let r = (2.0 / a).min(0.49);
        let p = LacunaryParams::new(1, d, r, a).unwrap();
        let b = majorant_chain(&p).unwrap();
        let mut rng = trial_rng(seed);
        use rand::Rng;
        let step = d.ceil() as i64;
        let mut pos = 0i64;
        let mut points = Vec::new();
        let mut signs = Vec::new();
        for _ in 0..k {
            points.push(vec![pos]);
            signs.push(wiener_core::rng::random_phase(&mut rng));
            pos += step + rng.random_range(0..=step);
        }
        let e = exact_ab(&points, a, &signs, step).unwrap();
        prop_assert!(e.max_abs_a <= b.a_max, "A {} > {}", e.max_abs_a, b.a_max);
        prop_assert!(e.max_abs_b <= b.b_max, "B {} > {}", e.max_abs_b, b.b_max);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_is_feasible_and_beats_the_truth(
        (n, t, m, seed) in (8usize..=48).prop_flat_map(|n| (Just(n), 1..=3usize, 1..=n, any::<u64>()))
    ) {
        let cfg = SolverConfig::default();
        let solver = MinimalExtensionSolver::new(n, cfg).unwrap();
        let mut rng = trial_rng(seed);
        let omega = wiener_core::rng::random_subset(&mut rng, n, m);
        let x = wiener_core::rng::planted_sparse_signal(&mut rng, n, t.min(n));
        let samples = FrequencySamples::of_signal(&x, &omega, solver.plan()).unwrap();
        let rec = solver.recover(&samples).unwrap();
        if rec.converged {
            prop_assert!(rec.max_sample_mismatch(&samples, solver.plan()) <= 10.0 * cfg.eps_feasibility);
        }
        prop_assert!(rec.objective <= x.l1_norm() + 1e-6);
        prop_assert!((rec.objective - rec.minimizer.l1_norm()).abs() < 1e-12);
    }

    #[test]
    fn solver_matches_oracle_on_small_real_instances(
        (n, seed) in (3usize..=10).prop_flat_map(|n| (Just(n), any::<u64>()))
    ) {
        use rand::Rng;
        let mut rng = trial_rng(seed);
        let x = Signal::from_real(&(0..n).map(|_| if rng.random::<f64>() < 0.4 { rng.random_range(-1.0..1.0) } else { 0.0 }).collect::<Vec<_>>()).unwrap();
        // Symmetric Ω keeps the real and complex problems equivalent.
        let mut members = Vec::new();
        for w in 0..n {
            if rng.random::<f64>() < 0.5 {
                members.push(w);
                members.push((n - w) % n);
            }
        }
        members.sort_unstable();
        members.dedup();
        prop_assume!(!members.is_empty());
        let omega = SupportSet::new(n, members).unwrap();
        let solver = MinimalExtensionSolver::new(n, SolverConfig::default()).unwrap();
        let samples = FrequencySamples::of_signal(&x, &omega, solver.plan()).unwrap();
        let rec = solver.recover(&samples).unwrap();
        let oracle = exhaustive_bp_oracle(&samples).unwrap();
        prop_assert!((rec.objective - oracle.objective).abs() <= 1e-6, "{} vs {}", rec.objective, oracle.objective);
    }

    #[test]
    fn unique_small_splits_are_found_by_the_convex_program(
        (n, pos, tone, amp, seed) in (4usize..=16).prop_flat_map(|n| (Just(n), 0..n, any::<bool>(), 0.2..2.0f64, any::<u64>()))
    ) {
        let phase = wiener_core::rng::random_phase(&mut trial_rng(seed));
        let x = if tone {
            idft(&Spectrum::delta(n, pos, phase * amp))
        } else {
            Signal::delta(n, pos, phase * amp)
        };
        let l0 = dh_decompose_l0(&x, TOL).unwrap();
        prop_assert_eq!(l0.best_total, 1);
        prop_assert!((l0.best_total as f64) < 0.5 * (n as f64).sqrt() || n < 16);
        if l0.decompositions.len() == 1 && (l0.best_total as f64) < 0.5 * (n as f64).sqrt() {
            let (y0, z0) = &l0.decompositions[0];
            let d = dh_decompose_l1(&x, &SolverConfig::default()).unwrap();
            prop_assert!(d.y.sub(y0).l2_norm() <= 1e-6);
            prop_assert!(d.z.sub(z0).l2_norm() <= 1e-6);
        }
    }
}

#[test]
fn exhaustive_binary_patterns_respect_the_product_bound() {
    for n in 2..=8usize {
        for mask in 1u32..(1 << n) {
            let x = Signal::from_real(&(0..n).map(|t| f64::from((mask >> t) & 1)).collect::<Vec<_>>()).unwrap();
            let p = verify_support_product(&x, TOL).unwrap();
            assert!(p.holds, "N={n} mask={mask:b}");
        }
    }
}

#[test]
fn combs_attain_equality() {
    for m in 2..=5 {
        let w = CombWitness::new(m).unwrap();
        let p = verify_support_product(w.signal(), TOL).unwrap();
        assert_eq!(p.product, m * m);
        assert!(p.equality);
    }
}

#[test]
fn seeds_do_not_collide_across_trials() {
    let seeds: std::collections::BTreeSet<u64> = (0..10_000).map(|i| derive_seed(42, i)).collect();
    assert_eq!(seeds.len(), 10_000);
}
