//! Support-size uncertainty on ℤ_N.
//!
//! `‖x‖₀·‖x̂‖₀ ≥ N` for every nonzero x, with equality for indicators of
//! subgroups (and their translates and modulations). The proof goes through
//! a Vandermonde argument whose checkable residue is [`max_zero_run`]: the
//! spectrum of a signal with `s` nonzeros never vanishes on `s` consecutive
//! frequencies.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, random_subset, trial_rng, SEED_DERIVATION};
use crate::spectral::{dft, unit_roots, Signal, Spectrum, SupportSet, ZeroTolerance};

/// Relative pivot threshold for [`complex_rank`].
pub const RANK_PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SupportProduct {
    pub n: usize,
    pub time_support: usize,
    pub frequency_support: usize,
    pub product: usize,
    pub holds: bool,
    pub equality: bool,
}

/// Computes `‖x‖₀` and `‖x̂‖₀` on the unit-ℓ² rescaling of `x`.
pub fn verify_support_product(x: &Signal, tol: ZeroTolerance) -> Result<SupportProduct> {
    let (time_support, frequency_support) = support_sizes(x, tol)?;
    let n = x.n();
    let product = time_support * frequency_support;
    Ok(SupportProduct {
        n,
        time_support,
        frequency_support,
        product,
        holds: product >= n,
        equality: product == n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportSum {
    pub sum: usize,
    /// `2√N`.
    pub bound: f64,
    pub holds: bool,
    pub equality: bool,
}

/// `‖x‖₀ + ‖x̂‖₀ ≥ 2√N`, compared exactly as `sum² ≥ 4N`.
pub fn sum_bound(x: &Signal, tol: ZeroTolerance) -> Result<SupportSum> {
    let (a, b) = support_sizes(x, tol)?;
    let n = x.n();
    let sum = a + b;
    Ok(SupportSum {
        sum,
        bound: 2.0 * (n as f64).sqrt(),
        holds: sum * sum >= 4 * n,
        equality: sum * sum == 4 * n,
    })
}

fn support_sizes(x: &Signal, tol: ZeroTolerance) -> Result<(usize, usize)> {
    let unit = x.normalized();
    let a = unit.l0(tol);
    if a == 0 {
        return Err(Error::ZeroSignal);
    }
    Ok((a, dft(&unit).l0(tol)))
}

/// Longest cyclic run of consecutive (at tolerance) zero coefficients.
/// An all-zero spectrum has run N.
pub fn max_zero_run(s: &Spectrum, tol: ZeroTolerance) -> usize {
    let n = s.n();
    let zero: Vec<bool> = s.values().iter().map(|v| tol.is_zero(*v)).collect();
    let Some(anchor) = zero.iter().position(|z| !z) else {
        return n;
    };
    // Walk once around the circle starting just after a nonzero entry.
    let (mut best, mut run) = (0, 0);
    for k in 1..=n {
        if zero[(anchor + k) % n] {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Indicator of the subgroup of order `m` in ℤ_{m²}; both it and its
/// transform have exactly `m` nonzeros.
#[derive(Debug, Clone)]
pub struct CombWitness {
    m: usize,
    signal: Signal,
}

impl CombWitness {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("comb order must be positive".into()));
        }
        let n = m * m;
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..m {
            values[k * m] = Complex64::new(1.0, 0.0);
        }
        Ok(CombWitness { m, signal: Signal::from_vec_unchecked(values) })
    }

    /// Comb for N when N is a perfect square.
    pub fn for_square(n: usize) -> Result<Self> {
        let m = (n as f64).sqrt().round() as usize;
        if m * m != n {
            return Err(Error::InvalidArgument(format!("{n} is not a perfect square")));
        }
        Self::new(m)
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.m * self.m
    }

    pub fn signal(&self) -> &Signal {
        &self.signal
    }
}

/// Rank of a dense complex matrix by Gaussian elimination with scaled
/// partial pivoting. A column whose best scaled pivot falls below
/// `rel_tol` times the largest entry of the original matrix is treated as
/// dependent.
pub fn complex_rank(rows: &[Vec<Complex64>], rel_tol: f64) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let cols = rows[0].len();
    let mut a: Vec<Vec<Complex64>> = rows.to_vec();
    let largest = a.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    let threshold = rel_tol * largest;
    let scales: Vec<f64> = a
        .iter()
        .map(|r| r.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();
    let mut order: Vec<usize> = (0..m).collect();

    let mut rank = 0;
    for col in 0..cols {
        if rank == m {
            break;
        }
        // Choose the row maximizing |a_ij| / scale_i among the unused rows.
        let mut pick = None;
        let mut best_ratio = 0.0;
        for (pos, &r) in order.iter().enumerate().skip(rank) {
            let mag = a[r][col].norm();
            if mag <= threshold || scales[r] == 0.0 {
                continue;
            }
            let ratio = mag / scales[r];
            if ratio > best_ratio {
                best_ratio = ratio;
                pick = Some(pos);
            }
        }
        let Some(pos) = pick else { continue };
        order.swap(rank, pos);
        let pivot_row = order[rank];
        let pivot_vals = a[pivot_row].clone();
        for &r in order.iter().skip(rank + 1) {
            let factor = a[r][col] / pivot_vals[col];
            if factor.norm() == 0.0 {
                continue;
            }
            for (v, p) in a[r][col..].iter_mut().zip(&pivot_vals[col..]) {
                *v -= factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Whether some nonzero x has `supp x ⊆ S` and `supp x̂ ⊆ S′`: true iff
/// the block of the transform taking coefficients on S to frequencies
/// outside S′ has a nontrivial kernel.
pub fn annihilating_pair_exists(s: &SupportSet, s_prime: &SupportSet) -> Result<bool> {
    if s.is_empty() || s_prime.is_empty() {
        return Err(Error::EmptySet("annihilating pair test needs nonempty S and S′"));
    }
    if s.n() != s_prime.n() {
        return Err(Error::InvalidArgument("S and S′ live on different groups".into()));
    }
    let n = s.n();
    let roots = unit_roots(n);
    let scale = 1.0 / (n as f64).sqrt();
    let block: Vec<Vec<Complex64>> = s_prime
        .complement()
        .members()
        .iter()
        .map(|&w| {
            s.members()
                .iter()
                .map(|&t| roots[(n - (w * t) % n) % n] * scale)
                .collect()
        })
        .collect();
    Ok(complex_rank(&block, RANK_PIVOT_TOL) < s.len())
}

/// How the random pair `(S, S′)` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSampling {
    /// Independent uniform subsets of the given sizes.
    Uniform,
    /// Independent arcs of consecutive residues with uniform offsets.
    Intervals,
    /// With probability 1/2 both sets are uniform random cosets of the
    /// subgroups of the given orders (when the orders divide N); otherwise
    /// uniform.
    CosetMixture,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationEstimate {
    pub n: usize,
    pub size_s: usize,
    pub size_s_prime: usize,
    pub sampling: PairSampling,
    pub trials: usize,
    pub hits: usize,
    pub estimate: f64,
    pub seed_derivation: &'static str,
}

fn random_coset<R: Rng + ?Sized>(rng: &mut R, n: usize, order: usize) -> SupportSet {
    let step = n / order;
    let offset = rng.random_range(0..step);
    SupportSet::new(n, (0..order).map(|k| offset + k * step)).expect("coset members below n")
}

fn draw_set<R: Rng + ?Sized>(rng: &mut R, n: usize, size: usize, sampling: PairSampling, coset: bool) -> SupportSet {
    match sampling {
        PairSampling::Intervals => {
            let start = rng.random_range(0..n);
            SupportSet::interval(n, start, size).expect("size <= n")
        }
        PairSampling::CosetMixture if coset && n.is_multiple_of(size) => random_coset(rng, n, size),
        _ => random_subset(rng, n, size),
    }
}

/// Monte Carlo frequency of annihilating pairs among random `(S, S′)`.
pub fn mc_annihilating_probability(
    n: usize,
    size_s: usize,
    size_s_prime: usize,
    trials: usize,
    seed: u64,
    sampling: PairSampling,
) -> Result<AnnihilationEstimate> {
    if size_s == 0 || size_s_prime == 0 || size_s > n || size_s_prime > n {
        return Err(Error::InvalidArgument(format!(
            "set sizes ({size_s}, {size_s_prime}) must lie in 1..={n}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let mut hits = 0;
    for i in 0..trials {
        let mut rng = trial_rng(derive_seed(seed, i as u64));
        let coset = sampling == PairSampling::CosetMixture && rng.random::<bool>();
        let s = draw_set(&mut rng, n, size_s, sampling, coset);
        let sp = draw_set(&mut rng, n, size_s_prime, sampling, coset);
        if annihilating_pair_exists(&s, &sp)? {
            hits += 1;
        }
    }
    Ok(AnnihilationEstimate {
        n,
        size_s,
        size_s_prime,
        sampling,
        trials,
        hits,
        estimate: hits as f64 / trials as f64,
        seed_derivation: SEED_DERIVATION,
    })
}
