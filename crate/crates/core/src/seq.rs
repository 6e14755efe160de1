//! Integer-indexed Fourier coefficient windows, grid evaluation and the
//! discrete Fourier transform used by the frame transforms.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::{sum, ComplexSum};

/// A 1-periodic function given by the coefficients `c_k` of
/// `f(x) = sum_k c_k e^{2 pi i k x}` on the contiguous window
/// `k = kmin ..= kmin + len - 1`. Coefficients outside the window are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeq", into = "RawSeq")]
pub struct FourierSeq {
    kmin: i64,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawSeq {
    kmin: i64,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<RawSeq> for FourierSeq {
    type Error = Error;

    fn try_from(raw: RawSeq) -> Result<Self> {
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        FourierSeq::new(raw.kmin, coeffs)
    }
}

impl From<FourierSeq> for RawSeq {
    fn from(seq: FourierSeq) -> Self {
        RawSeq {
            kmin: seq.kmin,
            coeffs: seq.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl FourierSeq {
    pub fn new(kmin: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(kmin + i as i64));
        }
        Ok(Self { kmin, coeffs })
    }

    pub fn from_real(kmin: i64, coeffs: &[f64]) -> Result<Self> {
        Self::new(kmin, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds the window `kmin ..= kmax` by evaluating `f` at every index.
    pub fn from_fn(kmin: i64, kmax: i64, f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        if kmax < kmin {
            return Err(Error::EmptyWindow);
        }
        Self::new(kmin, (kmin..=kmax).map(f).collect())
    }

    /// The zero function, stored as a single zero coefficient at `k = 0`.
    pub fn zero() -> Self {
        Self {
            kmin: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at index `k`, zero outside the window.
    pub fn get(&self, k: i64) -> Complex64 {
        let i = k - self.kmin;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.kmin + i as i64, c))
    }

    /// `||f||^2 = sum_k |c_k|^2`.
    pub fn norm_sq(&self) -> f64 {
        sum(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    /// `||f'||^2 = 4 pi^2 sum_k k^2 |c_k|^2`.
    pub fn derivative_norm_sq(&self) -> f64 {
        let s = sum(self.iter().map(|(k, c)| {
            let k = k as f64;
            k * k * c.norm_sqr()
        }));
        4.0 * PI * PI * s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            kmin: self.kmin,
            coeffs: self.coeffs.iter().map(|&c| c * alpha).collect(),
        }
    }

    /// The same function stored on the window `kmin ..= kmax`. Coefficients
    /// falling outside the new window are dropped.
    pub fn rewindowed(&self, kmin: i64, kmax: i64) -> Result<Self> {
        Self::from_fn(kmin, kmax, |k| self.get(k))
    }

    /// Pointwise sum on the union of both windows.
    pub fn add(&self, other: &Self) -> Self {
        let lo = self.kmin.min(other.kmin);
        let hi = self.kmax().max(other.kmax());
        Self {
            kmin: lo,
            coeffs: (lo..=hi).map(|k| self.get(k) + other.get(k)).collect(),
        }
    }

    /// `||f - g||^2` over the union of both windows.
    pub fn distance_sq(&self, other: &Self) -> f64 {
        let lo = self.kmin.min(other.kmin);
        let hi = self.kmax().max(other.kmax());
        sum((lo..=hi).map(|k| (self.get(k) - other.get(k)).norm_sqr()))
    }

    /// Samples `f(n / N)` for `n = 0..N`. The coefficients are folded modulo
    /// `N` and transformed once.
    pub fn evaluate_grid(&self, n: usize) -> Result<GridSignal> {
        if n < 1 {
            return Err(Error::InvalidParameter("grid size N must be at least 1".into()));
        }
        let mut folded = vec![ComplexSum::new(); n];
        for (k, c) in self.iter() {
            folded[k.rem_euclid(n as i64) as usize].add(c);
        }
        let folded: Vec<Complex64> = folded.iter().map(|s| s.value()).collect();
        Ok(GridSignal {
            samples: inverse_dft(&folded),
        })
    }
}

/// Samples of a 1-periodic function at `x = n / N`, `n = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSignal {
    pub samples: Vec<Complex64>,
}

impl GridSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Recovers Fourier coefficients on `kmin ..= kmin + width - 1` by a
    /// forward transform divided by `N`. Exact when `width <= N`.
    pub fn to_fourier(&self, kmin: i64, width: usize) -> Result<FourierSeq> {
        let n = self.samples.len();
        if n == 0 {
            return Err(Error::EmptyWindow);
        }
        let spectrum = dft(&self.samples);
        let scale = 1.0 / n as f64;
        FourierSeq::from_fn(kmin, kmin + width as i64 - 1, |k| {
            spectrum[k.rem_euclid(n as i64) as usize] * scale
        })
    }

    /// `sum_n |samples[n]|^2 / N`.
    pub fn mean_energy(&self) -> f64 {
        sum(self.samples.iter().map(|s| s.norm_sqr())) / self.samples.len() as f64
    }

    /// CSV with header `n,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im\n");
        for (i, s) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i, crate::fmt_sig(s.re), crate::fmt_sig(s.im));
        }
        out
    }
}

/// Unnormalized forward transform `X_m = sum_n x_n e^{-2 pi i m n / N}`.
pub fn dft(values: &[Complex64]) -> Vec<Complex64> {
    transform(values, FftDirection::Forward)
}

/// Unnormalized inverse transform `x_n = sum_m X_m e^{2 pi i m n / N}`, so
/// that `inverse_dft(dft(v)) / N == v`.
pub fn inverse_dft(values: &[Complex64]) -> Vec<Complex64> {
    transform(values, FftDirection::Inverse)
}

fn transform(values: &[Complex64], direction: FftDirection) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    if buf.len() > 1 {
        FftPlanner::new().plan_fft(buf.len(), direction).process(&mut buf);
    }
    buf
}
