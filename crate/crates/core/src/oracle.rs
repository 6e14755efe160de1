//! Independent reference computations: quadratic-exponent theta sums by
//! direct summation and by Poisson summation, and the moments of
//! `eta^{a,0}_j` summed term by term in the `(h, q)` coordinates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{FrameParams, MAX_WINDOW};
use crate::localization::{AsymParams, ScaledReal};
use crate::sum::KahanSum;

/// Upper bound on `b` for theta sums.
pub const THETA_B_MAX: f64 = 4.0;

/// Highest derivative order of the Poisson representation.
pub const THETA_MAX_ORDER: u32 = 3;

/// `sum_k (alpha k^2 + beta k + gamma)^m exp(-b (alpha k^2 + beta k + gamma))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub b: f64,
    pub m: u32,
}

impl ThetaParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, b: f64, m: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !beta.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParameter("beta and gamma must be finite".into()));
        }
        if !(b > 0.0 && b < THETA_B_MAX) {
            return Err(Error::InvalidParameter(format!("b must lie in (0, {THETA_B_MAX}), got {b}")));
        }
        Ok(Self { alpha, beta, gamma, b, m })
    }

    /// Shift `t = -beta / (2 alpha)` of the completed square.
    pub fn t(&self) -> f64 {
        -self.beta / (2.0 * self.alpha)
    }

    /// Vertex value `c = gamma - beta^2 / (4 alpha)`.
    pub fn c(&self) -> f64 {
        self.gamma - self.beta * self.beta / (4.0 * self.alpha)
    }

    fn quadratic(&self, k: f64) -> f64 {
        (self.alpha * k + self.beta) * k + self.gamma
    }
}

/// Direct summation outward from the vertex until the terms are negligible.
pub fn theta_direct(p: &ThetaParams) -> f64 {
    let m = p.m as i32;
    let term = |k: i64| {
        let q = p.quadratic(k as f64);
        q.powi(m) * (-p.b * q).exp()
    };
    let centre = p.t().round() as i64;
    let mut acc = KahanSum::new();
    acc.add(term(centre));
    for dir in [1i64, -1] {
        let mut k = centre + dir;
        loop {
            let t = term(k);
            acc.add(t);
            let q = p.quadratic(k as f64);
            // past the maximum of q^m e^{-bq} the terms decrease monotonically
            if p.b * q > m as f64 + 1.0 && t.abs() <= 1e-20 * acc.value().abs() {
                break;
            }
            if t == 0.0 && p.b * q > 1.0 {
                break;
            }
            k += dir;
        }
    }
    acc.value()
}

/// `(-1)^m d^m/db^m [b^{-1/2} exp(-c b - s / b)]`.
fn poisson_term(b: f64, c: f64, s: f64, m: u32) -> f64 {
    let f = b.powf(-0.5) * (-c * b - s / b).exp();
    if f == 0.0 {
        return 0.0;
    }
    let l1 = -0.5 / b - c + s / (b * b);
    let l2 = 0.5 / (b * b) - 2.0 * s / (b * b * b);
    let l3 = -1.0 / (b * b * b) + 6.0 * s / (b * b * b * b);
    let d = match m {
        0 => 1.0,
        1 => l1,
        2 => l1 * l1 + l2,
        _ => l1 * l1 * l1 + 3.0 * l1 * l2 + l3,
    };
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * f * d
}

/// Poisson dual of [`theta_direct`]:
/// `sqrt(pi/alpha) sum_k cos(2 pi k t) (-d/db)^m [b^{-1/2} e^{-cb - pi^2 k^2/(alpha b)}]`.
pub fn theta_poisson(p: &ThetaParams) -> Result<f64> {
    if p.m > THETA_MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "Poisson form implemented for m <= {THETA_MAX_ORDER}, got {}",
            p.m
        )));
    }
    let c = p.c();
    let t = p.t();
    let pref = (PI / p.alpha).sqrt();
    let mut acc = KahanSum::new();
    acc.add(poisson_term(p.b, c, 0.0, p.m));
    let mut k = 1i64;
    loop {
        let kf = k as f64;
        let s = PI * PI * kf * kf / p.alpha;
        let phase = (2.0 * PI * (kf * t).rem_euclid(1.0)).cos();
        let term = 2.0 * phase * poisson_term(p.b, c, s, p.m);
        acc.add(term);
        // the k-th term carries exp(-s/b) with s/b > 2 times its maximizer
        if s / p.b > 4.0 * (p.m as f64 + 1.0) && term.abs() <= 1e-20 * acc.value().abs() {
            break;
        }
        k += 1;
    }
    Ok(pref * acc.value())
}

/// The `k = 0` Poisson term alone.
pub fn theta_main_term(p: &ThetaParams) -> Result<f64> {
    if p.m > THETA_MAX_ORDER {
        return Err(Error::Unsupported(format!("m = {} exceeds {THETA_MAX_ORDER}", p.m)));
    }
    Ok((PI / p.alpha).sqrt() * poisson_term(p.b, p.c(), 0.0, p.m))
}

/// Bound `exp(-(pi^2 - slack) / (b alpha))` on `|theta - main| / C`.
pub fn theta_remainder_envelope(p: &ThetaParams, slack: f64) -> f64 {
    (-(PI * PI - slack) / (p.b * p.alpha)).exp()
}

/// `sum_k exp(-c (k - t)^2)`.
pub fn gaussian_shift_direct(c: f64, t: f64) -> f64 {
    let centre = t.round() as i64;
    let term = |k: i64| {
        let d = k as f64 - t;
        (-c * d * d).exp()
    };
    let mut acc = KahanSum::new();
    acc.add(term(centre));
    for dir in [1i64, -1] {
        let mut k = centre + dir;
        loop {
            let v = term(k);
            acc.add(v);
            if v <= 1e-20 * acc.value() {
                break;
            }
            k += dir;
        }
    }
    acc.value()
}

/// `sqrt(pi/c) sum_k cos(2 pi k t) exp(-pi^2 k^2 / c)`.
pub fn gaussian_shift_dual(c: f64, t: f64) -> f64 {
    let mut acc = KahanSum::new();
    acc.add(1.0);
    let mut k = 1i64;
    loop {
        let kf = k as f64;
        let g = (-PI * PI * kf * kf / c).exp();
        acc.add(2.0 * (2.0 * PI * (kf * t).rem_euclid(1.0)).cos() * g);
        if g <= 1e-20 {
            break;
        }
        k += 1;
    }
    (PI / c).sqrt() * acc.value()
}

/// Moment of `eta^{a,0}_j` evaluated by [`eta_moment_direct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Moment {
    /// `sum_k |eta(k)|^2`
    Norm,
    /// `4 pi^2 sum_k k^2 |eta(k)|^2`
    DNorm,
    /// `|sum_k eta(k) conj(eta(k+1))| = |tau| / (2 pi)`
    Tau,
}

/// `ln |eta^{a,0}_j(k)| + h/q` written in `(h, q)`:
/// `1/2 ln(1 - exp(-2h^2 (k^2 q^2 + 1) / ((1-h) q))) - h q k^2`.
fn reduced_ln(p: &AsymParams, k: i64) -> f64 {
    let AsymParams { h, q } = *p;
    let kf = k as f64;
    let y = 2.0 * h * h * (kf * kf * q * q + 1.0) / ((1.0 - h) * q);
    0.5 * (-(-y).exp_m1()).ln() - h * q * kf * kf
}

/// Term-by-term moment of `eta^{a,0}_j`, returned with the common factor
/// `exp(-2h/q)` split off, where `h = 1/(j+1)` and `q = 1/a`.
pub fn eta_moment_direct(p: &FrameParams, moment: Moment) -> Result<ScaledReal> {
    let ap = AsymParams::from_level(p.j, p.a)?;
    let p = &ap;
    let AsymParams { h, q } = ap;
    let reach = ((60.0 / (h * q)).sqrt()).ceil() + 10.0;
    if reach > MAX_WINDOW as f64 {
        return Err(Error::ResourceLimit {
            what: "eta moment window",
            requested: reach as u64,
            cap: MAX_WINDOW,
        });
    }
    let half = reach as i64;
    let mut acc = KahanSum::new();
    match moment {
        Moment::Norm => {
            for k in -half..=half {
                acc.add((2.0 * reduced_ln(p, k)).exp());
            }
        }
        Moment::DNorm => {
            for k in -half..=half {
                let kf = k as f64;
                acc.add(4.0 * PI * PI * kf * kf * (2.0 * reduced_ln(p, k)).exp());
            }
        }
        Moment::Tau => {
            // consecutive phases differ by a constant rotation
            for k in -half..half {
                acc.add((reduced_ln(p, k) + reduced_ln(p, k + 1)).exp());
            }
        }
    }
    Ok(ScaledReal::new(acc.value(), -2.0 * h / q))
}
