//! The Gaussian-type family of periodic scaling and wavelet sequences: masks
//! `nu`, `mu`, `lambda`, Fourier coefficients of `phi_j^a` and `psi_j^a`,
//! coefficient windows, and numerical checks of the unitary extension
//! principle.
//!
//! Every coefficient is available in log-magnitude form. The linear values
//! underflow for large `a` or large `j`; the log forms never do, and the
//! localization code works exclusively with them.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::FourierSeq;

pub const DEFAULT_EPSILON: f64 = 1e-16;

/// Hard cap on the number of coefficients in one window.
pub const MAX_WINDOW: u64 = 1 << 26;

/// Largest level whose full mask period is materialized.
pub const MAX_MASK_LEVEL: u32 = 26;

const WINDOW_MARGIN: i64 = 8;

/// Parameters of one member of the family: the family parameter `a > 1`,
/// the MRA level `j`, and the relative truncation tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub a: f64,
    pub j: u32,
    pub epsilon: f64,
}

impl FrameParams {
    pub fn new(a: f64, j: u32) -> Result<Self> {
        Self::with_epsilon(a, j, DEFAULT_EPSILON)
    }

    pub fn with_epsilon(a: f64, j: u32, epsilon: f64) -> Result<Self> {
        if !(a.is_finite() && a > 1.0) {
            return Err(Error::InvalidParameter(format!("a must be > 1, got {a}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(Self { a, j, epsilon })
    }

    /// Same family member and tolerance at another level.
    pub fn at_level(&self, j: u32) -> Self {
        Self { j, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Scaling,
    Wavelet,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Scaling => "scaling",
            Kind::Wavelet => "wavelet",
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scaling" => Ok(Kind::Scaling),
            "wavelet" => Ok(Kind::Wavelet),
            other => Err(Error::InvalidParameter(format!("unknown kind {other:?}"))),
        }
    }
}

/// Which level-0 scaling function a decomposition uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phi0Mode {
    /// `phi_0 = 2^{-1/2} xi_1`, the member of the scaling sequence that
    /// satisfies the refinement relation at level 1.
    #[default]
    Consistent,
    /// The constant function 1.
    Constant,
}

// ---------------------------------------------------------------------------
// masks

/// `ln(1 - e^{-x})` for `x > 0` without cancellation at either end.
fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x > LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

/// One value of `nu^{j,a}` described by the branch it falls in.
#[derive(Debug, Clone, Copy)]
enum NuBranch {
    /// `exp(-x)`
    Low(f64),
    /// `sqrt(1 - exp(-y))`
    High(f64),
}

impl NuBranch {
    fn ln(self) -> f64 {
        match self {
            NuBranch::Low(x) => -x,
            NuBranch::High(y) => 0.5 * ln_one_minus_exp_neg(y),
        }
    }

    fn value(self) -> f64 {
        match self {
            NuBranch::Low(x) => (-x).exp(),
            NuBranch::High(y) => (-(-y).exp_m1()).sqrt(),
        }
    }
}

/// Branch of `nu^{j,a}_{k + s 2^{j-1}}` with `s = shift_half as i128`, for
/// `j >= 2`. The index is reduced into `-2^{j-2} < k' <= 3 2^{j-2}`.
fn nu_branch(a: f64, j: u32, k: i64, shift_half: bool) -> NuBranch {
    debug_assert!(j >= 2);
    let denom = j as f64 * (j - 1) as f64 * a;
    if j >= 66 {
        // every i64 index lies in the first branch, and its half-period
        // shift in the second with offset k
        let kf = k as f64;
        let x = (kf * kf + a * a) / denom;
        return if shift_half {
            NuBranch::High(2.0 * x)
        } else {
            NuBranch::Low(x)
        };
    }
    let half = 1i128 << (j - 1);
    let quarter = 1i128 << (j - 2);
    let k = k as i128 + if shift_half { half } else { 0 };
    let reduced = (k + quarter - 1).rem_euclid(2 * half) - quarter + 1;
    if reduced <= quarter {
        let r = reduced as f64;
        NuBranch::Low((r * r + a * a) / denom)
    } else {
        let d = (reduced - half) as f64;
        NuBranch::High(2.0 * (d * d + a * a) / denom)
    }
}

fn ln_nu(a: f64, j: u32, k: i64, shift_half: bool) -> f64 {
    if j == 1 {
        -0.5 * LN_2
    } else {
        nu_branch(a, j, k, shift_half).ln()
    }
}

fn nu_value(a: f64, j: u32, k: i64, shift_half: bool) -> f64 {
    if j == 1 {
        FRAC_1_SQRT_2
    } else {
        nu_branch(a, j, k, shift_half).value()
    }
}

/// `e^{2 pi i k / 2^bits}` with the index reduced exactly when possible.
fn dyadic_phase(k: i64, bits: u32) -> Complex64 {
    let theta = if bits <= 62 {
        let period = 1i64 << bits;
        2.0 * PI * (k.rem_euclid(period) as f64) / (period as f64)
    } else {
        2.0 * PI * (k as f64) * (-(bits as f64)).exp2()
    };
    Complex64::from_polar(1.0, theta)
}

/// Mask `nu^{j,a}_k`, 2^j-periodic in `k`, valued in `[0, 1]`.
pub fn mask_nu(p: &FrameParams, k: i64) -> Result<f64> {
    if p.j == 0 {
        return Err(Error::LevelUndefined(0));
    }
    Ok(nu_value(p.a, p.j, k, false))
}

/// Mask `mu^{j,a}_k = sqrt(2) nu^{j,a}_k`.
pub fn mask_mu(p: &FrameParams, k: i64) -> Result<f64> {
    mask_nu(p, k).map(|v| SQRT_2 * v)
}

/// Wavelet mask `lambda^{j,a}_k = e^{2 pi i 2^{-j} k} mu^{j,a}_{k + 2^{j-1}}`.
pub fn mask_lambda(p: &FrameParams, k: i64) -> Result<Complex64> {
    if p.j == 0 {
        return Err(Error::LevelUndefined(0));
    }
    Ok(dyadic_phase(k, p.j) * (SQRT_2 * nu_value(p.a, p.j, k, true)))
}

/// Which mask to tabulate with [`mask_seq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    Nu,
    Mu,
    Lambda,
}

/// One period `k = 0 .. 2^j` of a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSeq {
    pub j: u32,
    pub values: Vec<Complex64>,
}

impl MaskSeq {
    /// Periodic lookup.
    pub fn get(&self, k: i64) -> Complex64 {
        self.values[k.rem_euclid(self.values.len() as i64) as usize]
    }
}

pub fn mask_seq(p: &FrameParams, which: MaskKind) -> Result<MaskSeq> {
    if p.j == 0 {
        return Err(Error::LevelUndefined(0));
    }
    if p.j > MAX_MASK_LEVEL {
        return Err(Error::ResourceLimit {
            what: "mask period",
            requested: 1u64 << p.j.min(63),
            cap: 1 << MAX_MASK_LEVEL,
        });
    }
    let values = (0..1i64 << p.j)
        .map(|k| -> Result<Complex64> {
            Ok(match which {
                MaskKind::Nu => Complex64::new(mask_nu(p, k)?, 0.0),
                MaskKind::Mu => Complex64::new(mask_mu(p, k)?, 0.0),
                MaskKind::Lambda => mask_lambda(p, k)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MaskSeq { j: p.j, values })
}

// ---------------------------------------------------------------------------
// scaling and wavelet coefficients

/// Level `J(k) = floor(log2(|k - 1/2| + 1/2)) + 3` from which on every mask
/// factor of the infinite product lies in its first branch.
pub fn switch_level(k: i64) -> u32 {
    let m: u128 = if k >= 1 {
        k as u128
    } else {
        k.unsigned_abs() as u128 + 1
    };
    127 - m.leading_zeros() + 3
}

/// `ln xi_j^a(k)`, where `xi_j^a(k) = prod_{r > j} nu^{r,a}_k`.
pub fn ln_xi_hat(a: f64, j: u32, k: i64) -> f64 {
    let big_j = switch_level(k);
    let kf = k as f64;
    let q = kf * kf + a * a;
    if j + 2 > big_j {
        -q / (j as f64 * a)
    } else {
        let partial: f64 = (j + 1..big_j).map(|r| ln_nu(a, r, k, false)).sum();
        partial - q / ((big_j - 1) as f64 * a)
    }
}

/// `phi_j^a(k) = 2^{-j/2} xi_j^a(k)`. The level-0 member follows the same
/// product formula.
pub fn scaling_hat(p: &FrameParams, k: i64) -> f64 {
    (ln_xi_hat(p.a, p.j, k) - 0.5 * p.j as f64 * LN_2).exp()
}

/// Level-0 scaling coefficient in the requested mode.
pub fn phi0_hat(a: f64, k: i64, mode: Phi0Mode) -> f64 {
    match mode {
        Phi0Mode::Consistent => ln_xi_hat(a, 0, k).exp(),
        Phi0Mode::Constant => {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Whether `-2^{j-1} < k <= 2^{j-1}`, where the level-j wavelet coincides
/// with its closed Gaussian form.
fn in_closed_range(j: u32, k: i64) -> bool {
    if j == 0 {
        return false;
    }
    if j >= 64 {
        return true;
    }
    let half = 1i128 << (j - 1);
    let k = k as i128;
    k > -half && k <= half
}

/// `ln |eta_j^a(k)|` where `eta_j^a = 2^{j/2} psi_j^a`, i.e.
/// `|eta_j^a(k)| = nu^{j+1,a}_{k + 2^j} xi_{j+1}^a(k)`.
pub fn ln_eta_modulus(a: f64, j: u32, k: i64) -> f64 {
    if in_closed_range(j, k) {
        let kf = k as f64;
        let q = kf * kf + a * a;
        let jf = j as f64;
        0.5 * ln_one_minus_exp_neg(2.0 * q / (jf * (jf + 1.0) * a)) - q / ((jf + 1.0) * a)
    } else {
        ln_nu(a, j + 1, k, true) + ln_xi_hat(a, j + 1, k)
    }
}

/// Phase `e^{2 pi i 2^{-j-1} k}` of the level-j wavelet coefficients.
pub fn wavelet_phase(j: u32, k: i64) -> Complex64 {
    dyadic_phase(k, j + 1)
}

/// `psi_j^a(k) = lambda^{j+1,a}_k phi_{j+1}^a(k)`.
pub fn wavelet_hat(p: &FrameParams, k: i64) -> Complex64 {
    wavelet_phase(p.j, k) * (ln_eta_modulus(p.a, p.j, k) - 0.5 * p.j as f64 * LN_2).exp()
}

// ---------------------------------------------------------------------------
// windows and sequences

/// Half-width `K` of the symmetric window `[-K, K]`: the smallest `K` with
/// `exp(-K^2 / (max(j, 1) a)) < epsilon`, plus a margin of 8 indices.
pub fn truncation_window(p: &FrameParams) -> i64 {
    let width = p.j.max(1) as f64 * p.a;
    let target = (1.0 / p.epsilon).ln() * width;
    target.sqrt().floor() as i64 + 1 + WINDOW_MARGIN
}

fn ln_modulus(a: f64, j: u32, kind: Kind, k: i64) -> f64 {
    match kind {
        Kind::Scaling => ln_xi_hat(a, j, k),
        Kind::Wavelet => ln_eta_modulus(a, j, k),
    }
}

/// Half-width of the window used for the level-j sequence of `kind`.
///
/// Starts from [`truncation_window`] (at level `j + 1` for wavelets) and
/// widens until the envelope `exp(-(k^2 + a^2) / (max(j, J(k) - 1) a))`,
/// which bounds every coefficient beyond the switch range, drops below
/// `epsilon` times the largest retained modulus.
pub fn coefficient_window(p: &FrameParams, kind: Kind) -> Result<i64> {
    let level = match kind {
        Kind::Scaling => p.j,
        Kind::Wavelet => p.j + 1,
    };
    let base = truncation_window(&p.at_level(level));
    check_window(base)?;
    let max_ln = (-base..=base)
        .map(|k| ln_modulus(p.a, p.j, kind, k))
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = (1.0 / p.epsilon).ln() - max_ln;
    let a = p.a;
    let mut last_failing = -1i64;
    for n in 0..62u32 {
        // |k| + 1 in [2^n, 2^{n+1}) shares one envelope denominator
        let lo = (1i64 << n) - 1;
        let hi = (1i64 << (n + 1)) - 2;
        let denom = level.max(n + 2) as f64 * a;
        let need = threshold * denom - a * a;
        let first_ok = if need <= 0.0 { 0.0 } else { need.sqrt().ceil() };
        if first_ok > lo as f64 {
            last_failing = last_failing.max(hi.min(first_ok as i64 - 1));
        }
        if first_ok <= lo as f64 && (lo as f64).powi(2) / ((n + 2) as f64 * a) > threshold {
            break;
        }
    }
    let k = base.max(last_failing + 1);
    check_window(k)?;
    Ok(k)
}

pub fn check_window(half: i64) -> Result<()> {
    let len = 2 * half as u64 + 1;
    if len > MAX_WINDOW {
        return Err(Error::ResourceLimit {
            what: "coefficient window",
            requested: len,
            cap: MAX_WINDOW,
        });
    }
    Ok(())
}

/// Fourier coefficients of `phi_j^a` on its coefficient window.
pub fn build_scaling_seq(p: &FrameParams) -> Result<FourierSeq> {
    let k = coefficient_window(p, Kind::Scaling)?;
    FourierSeq::from_fn(-k, k, |m| Complex64::new(scaling_hat(p, m), 0.0))
}

/// Fourier coefficients of `psi_j^a` on its coefficient window.
pub fn build_wavelet_seq(p: &FrameParams) -> Result<FourierSeq> {
    let k = coefficient_window(p, Kind::Wavelet)?;
    FourierSeq::from_fn(-k, k, |m| wavelet_hat(p, m))
}

pub fn build_seq(p: &FrameParams, kind: Kind) -> Result<FourierSeq> {
    match kind {
        Kind::Scaling => build_scaling_seq(p),
        Kind::Wavelet => build_wavelet_seq(p),
    }
}

/// The level-j sequence scaled by a positive constant so that its largest
/// coefficient has modulus 1. Returns the sequence and the natural log of
/// the constant that was divided out (taken relative to `xi_j` / `eta_j`,
/// i.e. without the `2^{-j/2}` factor).
///
/// This never underflows, which makes it the input of choice for any
/// scale-invariant functional such as the uncertainty constant.
pub fn build_seq_normalized(p: &FrameParams, kind: Kind) -> Result<(FourierSeq, f64)> {
    let k = coefficient_window(p, kind)?;
    let logs: Vec<f64> = (-k..=k).map(|m| ln_modulus(p.a, p.j, kind, m)).collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let coeffs = logs
        .iter()
        .zip(-k..=k)
        .map(|(&l, m)| {
            let modulus = (l - peak).exp();
            match kind {
                Kind::Scaling => Complex64::new(modulus, 0.0),
                Kind::Wavelet => wavelet_phase(p.j, m) * modulus,
            }
        })
        .collect();
    Ok((FourierSeq::new(-k, coeffs)?, peak))
}

/// A frame sequence with its family header, as written to JSON:
/// `{"a", "j", "kind", "kmin", "coeffs"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSeqFile {
    pub a: f64,
    pub j: u32,
    pub kind: Kind,
    #[serde(flatten)]
    pub seq: FourierSeq,
}

// ---------------------------------------------------------------------------
// UEP checks

/// Worst-case defects of the unitary extension conditions at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UepReport {
    pub j: u32,
    /// Worst `|(|mu_k|^2 + |mu_{k+2^{j-1}}|^2) - 2|`, and the same for `lambda`.
    pub max_row_defect: f64,
    /// Worst modulus of an off-diagonal entry of the mask matrix product.
    pub max_cross_defect: f64,
    /// Worst relative error of `phi_{j-1}(k) = mu^j_k phi_j(k)` on the window.
    pub max_refine_defect: f64,
    /// `2^{j/2} phi_j(0)`.
    pub norm_limit_sample: f64,
}

impl UepReport {
    pub fn worst(&self) -> f64 {
        self.max_row_defect
            .max(self.max_cross_defect)
            .max(self.max_refine_defect)
    }
}

pub fn verify_uep(p: &FrameParams) -> Result<UepReport> {
    verify_uep_perturbed(p, 0.0)
}

/// [`verify_uep`] with `mu_offset` added to the mask `mu^j_k` at `k = 0`
/// (mod 2^j). A nonzero offset is a negative control for the checker.
pub fn verify_uep_perturbed(p: &FrameParams, mu_offset: f64) -> Result<UepReport> {
    if p.j == 0 {
        return Err(Error::LevelUndefined(0));
    }
    if p.j > MAX_MASK_LEVEL {
        return Err(Error::ResourceLimit {
            what: "mask period",
            requested: 1u64 << p.j.min(63),
            cap: 1 << MAX_MASK_LEVEL,
        });
    }
    let period = 1i64 << p.j;
    let half = period / 2;
    let mu = |k: i64| -> Result<Complex64> {
        let bump = if k.rem_euclid(period) == 0 { mu_offset } else { 0.0 };
        Ok(Complex64::new(mask_mu(p, k)? + bump, 0.0))
    };
    let mut row = 0.0f64;
    let mut cross = 0.0f64;
    for k in 0..period {
        let (m0, m1) = (mu(k)?, mu(k + half)?);
        let (l0, l1) = (mask_lambda(p, k)?, mask_lambda(p, k + half)?);
        row = row
            .max((m0.norm_sqr() + m1.norm_sqr() - 2.0).abs())
            .max((l0.norm_sqr() + l1.norm_sqr() - 2.0).abs());
        cross = cross
            .max((m0 * l0.conj() + m1 * l1.conj()).norm())
            .max((m0 * m1.conj() + l0 * l1.conj()).norm());
    }

    let window = coefficient_window(p, Kind::Scaling)?;
    let mut refine = 0.0f64;
    for k in -window..=window {
        let lhs = ln_xi_hat(p.a, p.j - 1, k);
        let mu_k = mu(k)?.re;
        // log form of phi_{j-1} = mu phi_j after removing the 2^{-j/2} factors
        let rhs = (mu_k / SQRT_2).ln() + ln_xi_hat(p.a, p.j, k);
        let defect = if mu_k > 0.0 {
            (lhs - rhs).exp_m1().abs()
        } else {
            f64::INFINITY
        };
        refine = refine.max(defect);
    }

    Ok(UepReport {
        j: p.j,
        max_row_defect: row,
        max_cross_defect: cross,
        max_refine_defect: refine,
        norm_limit_sample: ln_xi_hat(p.a, p.j, 0).exp(),
    })
}
