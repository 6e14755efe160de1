//! Frame coefficients of trigonometric polynomials, the two-scale cascade
//! and synthesis from coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{self, FrameParams, Kind, Phi0Mode};
use crate::seq::{dft, inverse_dft, FourierSeq};
use crate::sum::{csum, sum};

/// Highest level whose `2^j` coefficients are materialized.
pub const MAX_TRANSFORM_LEVEL: u32 = 16;

/// Inner products `<f, g_{j,k}>`, `k = 0 .. 2^j`, with `g = phi` or `psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCoeffs {
    pub j: u32,
    pub kind: Kind,
    pub values: Vec<Complex64>,
}

impl LevelCoeffs {
    pub fn energy(&self) -> f64 {
        sum(self.values.iter().map(|v| v.norm_sqr()))
    }
}

/// `<f, phi_0>` together with the wavelet coefficients of levels `0 .. J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDecomposition {
    pub a: f64,
    #[serde(rename = "J")]
    pub top_level: u32,
    pub phi0: Complex64,
    #[serde(default, skip_serializing_if = "is_consistent")]
    pub phi0_mode: Phi0Mode,
    pub levels: Vec<LevelCoeffs>,
}

fn is_consistent(m: &Phi0Mode) -> bool {
    *m == Phi0Mode::Consistent
}

/// Residuals of the telescoped Parseval identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalDefect {
    /// `| ||P_0 f||^2 + sum_{j<J} ||W_j f||^2 - ||P_J f||^2 | / ||f||^2`
    pub telescoping: f64,
    /// `| ||P_J f||^2 - ||f||^2 | / ||f||^2`
    pub completeness: f64,
}

fn check_level(j: u32) -> Result<()> {
    if j > MAX_TRANSFORM_LEVEL {
        return Err(Error::ResourceLimit {
            what: "transform level",
            requested: j as u64,
            cap: MAX_TRANSFORM_LEVEL as u64,
        });
    }
    Ok(())
}

fn generator_hat(p: &FrameParams, kind: Kind, mode: Phi0Mode, m: i64) -> Complex64 {
    match kind {
        Kind::Scaling if p.j == 0 => Complex64::new(frame::phi0_hat(p.a, m, mode), 0.0),
        Kind::Scaling => Complex64::new(frame::scaling_hat(p, m), 0.0),
        Kind::Wavelet => frame::wavelet_hat(p, m),
    }
}

/// `F(r) = sum_{m = r mod 2^j} f(m) conj(g_j(m))`, so that
/// `<f, g_{j,k}> = sum_r F(r) e^{2 pi i r k / 2^j}`.
fn folded(f: &FourierSeq, p: &FrameParams, kind: Kind, mode: Phi0Mode) -> Vec<Complex64> {
    let n = 1i64 << p.j;
    let mut out = vec![Complex64::new(0.0, 0.0); n as usize];
    let mut comp = vec![Complex64::new(0.0, 0.0); n as usize];
    for (m, c) in f.iter() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let r = m.rem_euclid(n) as usize;
        // compensated accumulation per residue class
        let y = c * generator_hat(p, kind, mode, m).conj() - comp[r];
        let t = out[r] + y;
        comp[r] = (t - out[r]) - y;
        out[r] = t;
    }
    out
}

fn analyze_with(f: &FourierSeq, p: &FrameParams, kind: Kind, mode: Phi0Mode) -> Result<LevelCoeffs> {
    check_level(p.j)?;
    let values = inverse_dft(&folded(f, p, kind, mode));
    Ok(LevelCoeffs { j: p.j, kind, values })
}

/// Coefficients `<f, g_{j,k}>` of level `p.j`.
pub fn analyze_level(f: &FourierSeq, p: &FrameParams, kind: Kind) -> Result<LevelCoeffs> {
    analyze_with(f, p, kind, Phi0Mode::Consistent)
}

/// `sum_k |<f, g_{j,k}>|^2`, via `2^j sum_r |F(r)|^2`.
fn level_energy(f: &FourierSeq, p: &FrameParams, kind: Kind, mode: Phi0Mode) -> Result<f64> {
    check_level(p.j)?;
    let n = (1u64 << p.j) as f64;
    Ok(n * sum(folded(f, p, kind, mode).iter().map(|v| v.norm_sqr())))
}

fn check_decomposition_params(a: f64, top_level: u32) -> Result<()> {
    FrameParams::new(a, 0)?;
    if top_level == 0 {
        return Err(Error::InvalidParameter("decomposition needs J >= 1".into()));
    }
    check_level(top_level - 1)
}

/// `<f, phi_0>` and all wavelet levels `0 .. top_level`.
pub fn decompose(f: &FourierSeq, a: f64, top_level: u32) -> Result<FrameDecomposition> {
    decompose_with(f, a, top_level, Phi0Mode::Consistent)
}

pub fn decompose_with(f: &FourierSeq, a: f64, top_level: u32, mode: Phi0Mode) -> Result<FrameDecomposition> {
    check_decomposition_params(a, top_level)?;
    let p0 = FrameParams::new(a, 0)?;
    let phi0 = csum(f.iter().map(|(m, c)| c * frame::phi0_hat(a, m, mode)));
    let levels = (0..top_level)
        .map(|j| analyze_with(f, &p0.at_level(j), Kind::Wavelet, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameDecomposition { a, top_level, phi0, phi0_mode: mode, levels })
}

/// `| ||P_j f||^2 - ||P_{j-1} f||^2 - ||W_{j-1} f||^2 | / ||f||^2`.
pub fn cascade_defect(f: &FourierSeq, p: &FrameParams) -> Result<f64> {
    if p.j == 0 {
        return Err(Error::LevelUndefined(0));
    }
    let norm = f.norm_sq();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mode = Phi0Mode::Consistent;
    let fine = level_energy(f, p, Kind::Scaling, mode)?;
    let coarse = p.at_level(p.j - 1);
    let scaling = level_energy(f, &coarse, Kind::Scaling, mode)?;
    let wavelet = level_energy(f, &coarse, Kind::Wavelet, mode)?;
    Ok((fine - scaling - wavelet).abs() / norm)
}

pub fn parseval_defect(f: &FourierSeq, a: f64, top_level: u32) -> Result<ParsevalDefect> {
    check_decomposition_params(a, top_level)?;
    check_level(top_level)?;
    let norm = f.norm_sq();
    if norm == 0.0 {
        return Ok(ParsevalDefect { telescoping: 0.0, completeness: 0.0 });
    }
    let mode = Phi0Mode::Consistent;
    let p0 = FrameParams::new(a, 0)?;
    let mut parts = vec![level_energy(f, &p0, Kind::Scaling, mode)?];
    for j in 0..top_level {
        parts.push(level_energy(f, &p0.at_level(j), Kind::Wavelet, mode)?);
    }
    let top = level_energy(f, &p0.at_level(top_level), Kind::Scaling, mode)?;
    Ok(ParsevalDefect {
        telescoping: (sum(parts) - top).abs() / norm,
        completeness: (top - norm).abs() / norm,
    })
}

/// Frequency reach of a decomposition: the coefficient windows of `phi_0` and
/// of the finest wavelet level.
fn synthesis_window(d: &FrameDecomposition) -> Result<i64> {
    let p0 = FrameParams::new(d.a, 0)?;
    let mut half = frame::coefficient_window(&p0, Kind::Scaling)?;
    for lc in &d.levels {
        half = half.max(frame::coefficient_window(&p0.at_level(lc.j), Kind::Wavelet)?);
    }
    Ok(half)
}

/// `phi0 phi_0 + sum_j sum_k c_{j,k} psi_{j,k}` as a Fourier window.
pub fn synthesize(d: &FrameDecomposition) -> Result<FourierSeq> {
    let half = synthesis_window(d)?;
    frame::check_window(half)?;
    let p0 = FrameParams::new(d.a, 0)?;
    let spectra = d
        .levels
        .iter()
        .map(|lc| {
            check_level(lc.j)?;
            if lc.values.len() != 1usize << lc.j {
                return Err(Error::InvalidParameter(format!(
                    "level {} carries {} coefficients, expected {}",
                    lc.j,
                    lc.values.len(),
                    1u64 << lc.j
                )));
            }
            Ok((lc, dft(&lc.values)))
        })
        .collect::<Result<Vec<_>>>()?;
    FourierSeq::from_fn(-half, half, |m| {
        let base = d.phi0 * frame::phi0_hat(d.a, m, d.phi0_mode);
        let levels = csum(spectra.iter().map(|(lc, spec)| {
            let p = p0.at_level(lc.j);
            let r = m.rem_euclid(1i64 << lc.j) as usize;
            generator_hat(&p, lc.kind, d.phi0_mode, m) * spec[r]
        }));
        base + levels
    })
}

/// Relative error `||synthesize(decompose(f)) - f|| / ||f||`.
pub fn roundtrip_error(f: &FourierSeq, a: f64, top_level: u32) -> Result<f64> {
    let norm = f.norm_sq();
    if norm == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let rec = synthesize(&decompose(f, a, top_level)?)?;
    Ok((rec.distance_sq(f) / norm).sqrt())
}
