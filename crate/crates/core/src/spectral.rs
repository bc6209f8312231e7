//! Signals and spectra on the cyclic group ℤ_N.
//!
//! The transform is the unitary one, with kernel `e(−ωt/N)` and factor
//! `1/√N`:
//!
//! ```text
//! x̂(ω) = (1/√N) Σ_t x(t) e(−ωt/N),      e(u) = exp(2πiu)
//! ```
//!
//! [`dft`] and [`idft`] sum directly in O(N²) and serve as the reference
//! path. [`FourierPlan`] wraps a fast transform with the same normalization
//! for the iterative solvers.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitude below which a coefficient counts as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTolerance(f64);

impl ZeroTolerance {
    pub const DEFAULT: ZeroTolerance = ZeroTolerance(1e-10);

    pub fn new(eps_zero: f64) -> Result<Self> {
        if eps_zero < 0.0 || !eps_zero.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "zero tolerance must be finite and nonnegative, got {eps_zero}"
            )));
        }
        Ok(ZeroTolerance(eps_zero))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self, z: Complex64) -> bool {
        z.norm() <= self.0
    }
}

impl Default for ZeroTolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

fn check_values(values: &[Complex64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("sequence on Z_N needs N >= 1".into()));
    }
    if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    Ok(())
}

macro_rules! zn_sequence {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            values: Vec<Complex64>,
        }

        impl $name {
            /// Wraps `values`, rejecting empty or non-finite input.
            pub fn new(values: Vec<Complex64>) -> Result<Self> {
                check_values(&values)?;
                Ok(Self { values })
            }

            pub fn from_real(values: &[f64]) -> Result<Self> {
                Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            }

            pub fn zeros(n: usize) -> Self {
                assert!(n > 0, "N must be positive");
                Self { values: vec![Complex64::new(0.0, 0.0); n] }
            }

            /// Indicator-style sequence: `value` at `index`, zero elsewhere.
            pub fn delta(n: usize, index: usize, value: Complex64) -> Self {
                let mut s = Self::zeros(n);
                s.values[index % n] = value;
                s
            }

            pub(crate) fn from_vec_unchecked(values: Vec<Complex64>) -> Self {
                debug_assert!(!values.is_empty());
                Self { values }
            }

            /// Group order N.
            pub fn n(&self) -> usize {
                self.values.len()
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            pub fn l2_norm(&self) -> f64 {
                self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
            }

            pub fn max_abs(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }

            /// Number of entries whose modulus exceeds the tolerance.
            pub fn l0(&self, tol: ZeroTolerance) -> usize {
                self.values.iter().filter(|v| !tol.is_zero(**v)).count()
            }

            pub fn support(&self, tol: ZeroTolerance) -> SupportSet {
                let members = self
                    .values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !tol.is_zero(**v))
                    .map(|(i, _)| i)
                    .collect();
                SupportSet { n: self.n(), members }
            }

            /// Copy rescaled to unit ℓ² norm; the zero sequence is returned unchanged.
            pub fn normalized(&self) -> Self {
                let norm = self.l2_norm();
                if norm == 0.0 {
                    return self.clone();
                }
                Self { values: self.values.iter().map(|v| v / norm).collect() }
            }

            pub fn scaled(&self, factor: Complex64) -> Self {
                Self { values: self.values.iter().map(|v| v * factor).collect() }
            }

            /// Cyclic translate: `out(t) = self(t − shift)`.
            pub fn translated(&self, shift: usize) -> Self {
                let n = self.n();
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (t, v) in self.values.iter().enumerate() {
                    out[(t + shift) % n] = *v;
                }
                Self { values: out }
            }

            pub fn add(&self, other: &Self) -> Self {
                assert_eq!(self.n(), other.n(), "group orders differ");
                Self {
                    values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                assert_eq!(self.n(), other.n(), "group orders differ");
                Self {
                    values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
                }
            }

            /// ℓ² distance divided by the ℓ² norm of `reference` (absolute
            /// distance when the reference vanishes).
            pub fn relative_error(&self, reference: &Self) -> f64 {
                let diff = self.sub(reference).l2_norm();
                let scale = reference.l2_norm();
                if scale == 0.0 {
                    diff
                } else {
                    diff / scale
                }
            }
        }

        /// Serialized as a list of `[re, im]` pairs.
        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeSeq;
                let mut seq = serializer.serialize_seq(Some(self.values.len()))?;
                for v in &self.values {
                    seq.serialize_element(&[v.re, v.im])?;
                }
                seq.end()
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = Complex64;
            fn index(&self, i: usize) -> &Complex64 {
                &self.values[i]
            }
        }
    };
}

zn_sequence!(Signal, "Complex function on the time side of ℤ_N.");
zn_sequence!(Spectrum, "Complex function on the frequency side of ℤ_N.");

impl Signal {
    pub fn l1_norm(&self) -> f64 {
        l1_norm(self)
    }
}

impl Spectrum {
    /// Wiener-algebra norm: the ℓ¹ norm of the inverse transform.
    pub fn a_norm(&self) -> f64 {
        a_norm(self)
    }

    /// Plain ℓ¹ norm of the spectral coefficients themselves.
    pub fn coefficient_l1(&self) -> f64 {
        self.values().iter().map(|v| v.norm()).sum()
    }
}

/// Sorted subset of ℤ_N. Used on both sides: time supports `S` and
/// frequency sets `Ω` or bands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet {
    n: usize,
    members: Vec<usize>,
}

impl SupportSet {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        let mut members: Vec<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= n) {
            return Err(Error::InvalidArgument(format!("index {bad} out of range for N = {n}")));
        }
        members.sort_unstable();
        let before = members.len();
        members.dedup();
        if members.len() != before {
            return Err(Error::InvalidArgument("support members must be distinct".into()));
        }
        Ok(SupportSet { n, members })
    }

    pub fn empty(n: usize) -> Self {
        SupportSet { n, members: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        SupportSet { n, members: (0..n).collect() }
    }

    /// `len` consecutive residues starting at `start`, wrapping around.
    pub fn interval(n: usize, start: usize, len: usize) -> Result<Self> {
        if len > n {
            return Err(Error::InvalidArgument(format!("interval length {len} exceeds N = {n}")));
        }
        Self::new(n, (0..len).map(|k| (start + k) % n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> SupportSet {
        SupportSet { n: self.n, members: (0..self.n).filter(|i| !self.contains(*i)).collect() }
    }

    pub fn translated(&self, shift: usize) -> SupportSet {
        let mut members: Vec<usize> = self.members.iter().map(|m| (m + shift) % self.n).collect();
        members.sort_unstable();
        SupportSet { n: self.n, members }
    }

    /// Image under ω ↦ −ω.
    pub fn negated(&self) -> SupportSet {
        let mut members: Vec<usize> =
            self.members.iter().map(|m| (self.n - m) % self.n).collect();
        members.sort_unstable();
        SupportSet { n: self.n, members }
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &m in &self.members {
            mask[m] = true;
        }
        mask
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}} ⊂ Z_{}", items.join(","), self.n)
    }
}

/// `e(k/N)` for k = 0..N. Indexing by `(ω·t) mod N` keeps the phases exact
/// up to one rounding per table entry.
pub(crate) fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * (k as f64) / (n as f64);
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn direct_transform(values: &[Complex64], sign: i64) -> Vec<Complex64> {
    let n = values.len();
    let roots = unit_roots(n);
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, v) in values.iter().enumerate() {
                let k = (w * t) % n;
                let idx = if sign < 0 { (n - k) % n } else { k };
                acc += v * roots[idx];
            }
            acc * scale
        })
        .collect()
}

/// Unitary DFT by direct summation.
pub fn dft(x: &Signal) -> Spectrum {
    Spectrum::from_vec_unchecked(direct_transform(x.values(), -1))
}

/// Inverse of [`dft`]: kernel `e(+ωt/N)`, factor `1/√N`.
pub fn idft(s: &Spectrum) -> Signal {
    Signal::from_vec_unchecked(direct_transform(s.values(), 1))
}

pub fn l0_norm(x: &Signal, tol: ZeroTolerance) -> usize {
    x.l0(tol)
}

pub fn l1_norm(x: &Signal) -> f64 {
    x.values().iter().map(|v| v.norm()).sum()
}

pub fn a_norm(s: &Spectrum) -> f64 {
    l1_norm(&idft(s))
}

/// Minimal pairwise cyclic distance `min(|i−j|, N−|i−j|)` within `s`.
/// A singleton has step N.
pub fn cyclic_step(s: &SupportSet) -> Result<usize> {
    let m = s.members();
    match m.len() {
        0 => Err(Error::EmptySet("cyclic step of an empty set")),
        1 => Ok(s.n()),
        len => {
            // Members are sorted, so adjacent gaps (plus the wrap gap) suffice.
            let mut best = s.n() - m[len - 1] + m[0];
            for w in m.windows(2) {
                best = best.min(w[1] - w[0]);
            }
            Ok(best)
        }
    }
}

/// Cached fast transform with the same unitary normalization as [`dft`].
#[derive(Clone)]
pub struct FourierPlan {
    n: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierPlan").field("n", &self.n).finish()
    }
}

impl FourierPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "N must be positive");
        let mut planner = FftPlanner::new();
        FourierPlan {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place unitary forward transform.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.forward.process(buf);
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }

    /// In-place unitary inverse transform.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inverse.process(buf);
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }

    pub fn dft(&self, x: &Signal) -> Spectrum {
        let mut buf = x.values().to_vec();
        self.forward_in_place(&mut buf);
        Spectrum::from_vec_unchecked(buf)
    }

    pub fn idft(&self, s: &Spectrum) -> Signal {
        let mut buf = s.values().to_vec();
        self.inverse_in_place(&mut buf);
        Signal::from_vec_unchecked(buf)
    }
}
