//! Breitenberger uncertainty constant of periodic functions, the closed
//! Gaussian reference sequences `xi^{a,0}_j`, `eta^{a,0}_j`, and the
//! small-`h` / small-`q` predictors for the moments of `eta^{a,0}_j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{self, FrameParams, Kind};
use crate::seq::FourierSeq;
use crate::sum::{csum, sum};

/// Below this modulus the first trigonometric moment counts as zero.
pub const TAU_ZERO_THRESHOLD: f64 = 1e-300;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// Moments entering the uncertainty constant of one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcReport {
    pub norm_sq: f64,
    pub deriv_norm_sq: f64,
    /// `tau(f) = -2 pi sum_k c_k conj(c_{k+1})`, serialized as `[re, im]`.
    pub tau: Complex64,
    pub var_a: f64,
    pub var_f: f64,
    pub uc: f64,
}

/// A [`UcReport`] tagged with the family member it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcRecord {
    pub a: f64,
    pub j: u32,
    pub kind: Kind,
    #[serde(flatten)]
    pub report: UcReport,
}

/// First trigonometric moment `-2 pi sum_k c_k conj(c_{k+1})`.
pub fn trig_moment(f: &FourierSeq) -> Complex64 {
    -2.0 * PI * lag_one_sum(f)
}

fn lag_one_sum(f: &FourierSeq) -> Complex64 {
    let c = f.coeffs();
    csum(c.windows(2).map(|w| w[0] * w[1].conj()))
}

/// `||f||^4 / |tau|^2 - 1 / (4 pi^2)`.
///
/// Evaluated as `(N - |T|)(N + |T|) / (4 pi^2 |T|^2)` with
/// `N - |T| = 1/2 sum_k |c_k - e^{i arg T} c_{k+1}|^2`, which stays accurate
/// when the ratio is close to one.
pub fn angular_variance(f: &FourierSeq) -> Result<f64> {
    let norm = f.norm_sq();
    if norm == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let t = lag_one_sum(f);
    let tau = 2.0 * PI * t.norm();
    if tau < TAU_ZERO_THRESHOLD {
        return Err(Error::UndefinedUc(tau));
    }
    let rot = Complex64::from_polar(1.0, t.arg());
    let c = f.coeffs();
    let n = c.len();
    // include the boundary pairs (c_{kmin-1} = 0, c_{kmax+1} = 0)
    let gap = 0.5
        * sum((0..=n).map(|i| {
            let cur = if i < n { c[i] } else { Complex64::new(0.0, 0.0) };
            let prev = if i > 0 { c[i - 1] } else { Complex64::new(0.0, 0.0) };
            (prev - rot * cur).norm_sqr()
        }));
    let t_abs = t.norm();
    Ok(gap * (norm + t_abs) / (FOUR_PI_SQ * t_abs * t_abs))
}

/// `4 pi^2 (sum k^2 |c_k|^2 / N - (sum k |c_k|^2 / N)^2)`, evaluated as the
/// centred second moment.
pub fn frequency_variance(f: &FourierSeq) -> Result<f64> {
    let norm = f.norm_sq();
    if norm == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let mean = sum(f.iter().map(|(k, c)| k as f64 * c.norm_sqr())) / norm;
    let spread = sum(f.iter().map(|(k, c)| {
        let d = k as f64 - mean;
        d * d * c.norm_sqr()
    }));
    Ok(FOUR_PI_SQ * spread / norm)
}

/// `UC(f) = sqrt(var_A(f) var_F(f))`.
pub fn breitenberger_uc(f: &FourierSeq) -> Result<UcReport> {
    let var_a = angular_variance(f)?;
    let var_f = frequency_variance(f)?;
    Ok(UcReport {
        norm_sq: f.norm_sq(),
        deriv_norm_sq: f.derivative_norm_sq(),
        tau: trig_moment(f),
        var_a,
        var_f,
        uc: (var_a * var_f).sqrt(),
    })
}

// ---------------------------------------------------------------------------
// closed-form reference sequences

fn require_level(p: &FrameParams) -> Result<()> {
    if p.j == 0 {
        Err(Error::LevelUndefined(0))
    } else {
        Ok(())
    }
}

fn xi0_ln(a: f64, j: u32, k: i64) -> f64 {
    let kf = k as f64;
    -(kf * kf + a * a) / (j as f64 * a)
}

fn eta0_ln_modulus(a: f64, j: u32, k: i64) -> f64 {
    let kf = k as f64;
    let s = kf * kf + a * a;
    let jf = j as f64;
    let y = 2.0 * s / (jf * (jf + 1.0) * a);
    0.5 * (-(-y).exp_m1()).ln() - s / ((jf + 1.0) * a)
}

fn eta0_phase(j: u32, k: i64) -> Complex64 {
    let theta = if j < 62 {
        let period = 1i64 << (j + 1);
        2.0 * PI * k.rem_euclid(period) as f64 / period as f64
    } else {
        2.0 * PI * k as f64 * (-(j as f64 + 1.0)).exp2()
    };
    Complex64::from_polar(1.0, theta)
}

/// `xi^{a,0}_j(k) = exp(-(k^2 + a^2) / (j a))`.
pub fn xi0_hat(p: &FrameParams, k: i64) -> Result<f64> {
    require_level(p)?;
    Ok(xi0_ln(p.a, p.j, k).exp())
}

/// `eta^{a,0}_j(k) = e^{2 pi i 2^{-j-1} k} sqrt(1 - exp(-2(k^2+a^2)/(j(j+1)a)))
/// exp(-(k^2+a^2)/((j+1)a))`.
pub fn eta0_hat(p: &FrameParams, k: i64) -> Result<Complex64> {
    require_level(p)?;
    Ok(eta0_phase(p.j, k) * eta0_ln_modulus(p.a, p.j, k).exp())
}

/// UC of a closed-form reference sequence on the coefficient window of the
/// matching frame sequence, peak-normalized before summation.
pub fn uc_closed_form(p: &FrameParams, kind: Kind) -> Result<UcReport> {
    require_level(p)?;
    let half = frame::coefficient_window(p, kind)?;
    let logs: Vec<f64> = (-half..=half)
        .map(|k| match kind {
            Kind::Scaling => xi0_ln(p.a, p.j, k),
            Kind::Wavelet => eta0_ln_modulus(p.a, p.j, k),
        })
        .collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let coeffs = logs
        .iter()
        .zip(-half..=half)
        .map(|(&l, k)| match kind {
            Kind::Scaling => Complex64::new((l - peak).exp(), 0.0),
            Kind::Wavelet => eta0_phase(p.j, k) * (l - peak).exp(),
        })
        .collect();
    breitenberger_uc(&FourierSeq::new(-half, coeffs)?)
}

/// UC of the level-j scaling function `phi_j^a`.
///
/// Computed on `xi_j^a` scaled to unit peak, so the reported norms and
/// moments belong to that normalized sequence; the UC itself is scale free.
pub fn uc_scaling(p: &FrameParams) -> Result<UcReport> {
    let (seq, _) = frame::build_seq_normalized(p, Kind::Scaling)?;
    breitenberger_uc(&seq)
}

/// UC of the level-j wavelet `psi_j^a`, computed on `eta_j^a = 2^{j/2} psi_j^a`
/// scaled to unit peak (see [`uc_scaling`]).
pub fn uc_wavelet(p: &FrameParams) -> Result<UcReport> {
    let (seq, _) = frame::build_seq_normalized(p, Kind::Wavelet)?;
    breitenberger_uc(&seq)
}

pub fn uc_of(p: &FrameParams, kind: Kind) -> Result<UcReport> {
    match kind {
        Kind::Scaling => uc_scaling(p),
        Kind::Wavelet => uc_wavelet(p),
    }
}

// ---------------------------------------------------------------------------
// asymptotic predictors

/// A positive quantity stored as `mantissa * exp(ln_scale)`, for moments
/// whose common exponential factor underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledReal {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl ScaledReal {
    pub fn new(mantissa: f64, ln_scale: f64) -> Self {
        Self { mantissa, ln_scale }
    }

    pub fn value(&self) -> f64 {
        self.mantissa * self.ln_scale.exp()
    }

    /// `self / other`, exact even when both values underflow.
    pub fn ratio(&self, other: &ScaledReal) -> f64 {
        self.mantissa / other.mantissa * (self.ln_scale - other.ln_scale).exp()
    }
}

/// Asymptotic coordinates `h = 1/(j+1)`, `q = 1/a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymParams {
    pub h: f64,
    pub q: f64,
}

impl AsymParams {
    pub fn new(h: f64, q: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 0.5) {
            return Err(Error::InvalidParameter(format!("h must lie in (0, 1/2], got {h}")));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParameter(format!("q must lie in (0, 1], got {q}")));
        }
        Ok(Self { h, q })
    }

    pub fn from_level(j: u32, a: f64) -> Result<Self> {
        if j == 0 {
            return Err(Error::LevelUndefined(0));
        }
        Self::new(1.0 / (j as f64 + 1.0), 1.0 / a)
    }
}

/// Which parameter tends to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    HToZero,
    QToZero,
}

/// Main terms of `||eta^{a,0}_j||^2`:
/// `e^{-2h/q} sqrt(pi/(2hq)) - e^{-2h/(q(1-h))} sqrt(pi(1-h)/(2hq))`.
pub fn asym_norm_sq(p: &AsymParams) -> ScaledReal {
    let AsymParams { h, q } = *p;
    let lead = (PI / (2.0 * h * q)).sqrt();
    let gap = -(-2.0 * h * h / (q * (1.0 - h)) + 0.5 * (1.0 - h).ln()).exp_m1();
    ScaledReal::new(lead * gap, -2.0 * h / q)
}

/// Main terms of `||(eta^{a,0}_j)'||^2`, including the `4 pi^2`.
pub fn asym_deriv_norm_sq(p: &AsymParams) -> ScaledReal {
    let AsymParams { h, q } = *p;
    let lead = 0.5 * (PI / (2.0 * h * q).powi(3)).sqrt();
    let gap = -(-2.0 * h * h / (q * (1.0 - h)) + 1.5 * (1.0 - h).ln()).exp_m1();
    ScaledReal::new(FOUR_PI_SQ * lead * gap, -2.0 * h / q)
}

/// Leading behaviour of `var_F(eta^{a,0}_j)`: `4 pi^2 3/(4hq)` as `h -> 0`,
/// `4 pi^2 1/(4hq)` as `q -> 0`.
pub fn asym_freq_var(p: &AsymParams, regime: Regime) -> f64 {
    let base = FOUR_PI_SQ / (4.0 * p.h * p.q);
    match regime {
        Regime::HToZero => 3.0 * base,
        Regime::QToZero => base,
    }
}

/// Main term of `|tau(eta^{a,0}_j)| / (2 pi)` in the given regime.
pub fn asym_tau(p: &AsymParams, regime: Regime) -> ScaledReal {
    let AsymParams { h, q } = *p;
    let ln_scale = -2.0 * h / q;
    let mantissa = match regime {
        Regime::HToZero => {
            let correction = ((1.0 - h) * (16.0 - 4.0 * q * q) - 3.0 * q) / (4.0 * q * (1.0 - h));
            (-h * q / 2.0).exp() / (1.0 - h)
                * (PI / (8.0 * q)).sqrt()
                * (h.sqrt() + correction * h.powf(1.5))
        }
        Regime::QToZero => (-h * q / 2.0).exp() * (PI / (2.0 * h * q)).sqrt(),
    };
    ScaledReal::new(mantissa, ln_scale)
}
