//! Python bindings for the `pwframe` library.
//!
//! Sequences cross the boundary as `(kmin, [complex, ...])` pairs.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pwframe::frame::{self, FrameParams, Kind};
use pwframe::localization::{self, UcReport};
use pwframe::oracle::{self, Moment, ThetaParams};
use pwframe::{transform, FourierSeq};

fn py_err(e: pwframe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(name: &str) -> PyResult<Kind> {
    name.parse::<Kind>().map_err(|_| PyValueError::new_err(format!("kind must be 'scaling' or 'wavelet', got {name:?}")))
}

fn params(a: f64, j: u32, epsilon: f64) -> PyResult<FrameParams> {
    FrameParams::with_epsilon(a, j, epsilon).map_err(py_err)
}

fn seq(kmin: i64, coeffs: Vec<Complex64>) -> PyResult<FourierSeq> {
    FourierSeq::new(kmin, coeffs).map_err(py_err)
}

fn report<'py>(py: Python<'py>, r: &UcReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("norm_sq", r.norm_sq)?;
    d.set_item("deriv_norm_sq", r.deriv_norm_sq)?;
    d.set_item("tau", r.tau)?;
    d.set_item("var_a", r.var_a)?;
    d.set_item("var_f", r.var_f)?;
    d.set_item("uc", r.uc)?;
    Ok(d)
}

/// Mask value `nu^{j,a}_k`.
#[pyfunction]
fn mask_nu(a: f64, j: u32, k: i64) -> PyResult<f64> {
    frame::mask_nu(&params(a, j, frame::DEFAULT_EPSILON)?, k).map_err(py_err)
}

/// Wavelet mask value `lambda^{j,a}_k`.
#[pyfunction]
fn mask_lambda(a: f64, j: u32, k: i64) -> PyResult<Complex64> {
    frame::mask_lambda(&params(a, j, frame::DEFAULT_EPSILON)?, k).map_err(py_err)
}

/// Fourier coefficient `phi_j^a(k)`.
#[pyfunction]
fn scaling_hat(a: f64, j: u32, k: i64) -> PyResult<f64> {
    Ok(frame::scaling_hat(&params(a, j, frame::DEFAULT_EPSILON)?, k))
}

/// Fourier coefficient `psi_j^a(k)`.
#[pyfunction]
fn wavelet_hat(a: f64, j: u32, k: i64) -> PyResult<Complex64> {
    Ok(frame::wavelet_hat(&params(a, j, frame::DEFAULT_EPSILON)?, k))
}

/// Coefficients of `phi_j^a` or `psi_j^a` on their truncation window.
#[pyfunction]
#[pyo3(signature = (a, j, kind_name, epsilon = frame::DEFAULT_EPSILON))]
fn build_seq(a: f64, j: u32, kind_name: &str, epsilon: f64) -> PyResult<(i64, Vec<Complex64>)> {
    let s = frame::build_seq(&params(a, j, epsilon)?, kind(kind_name)?).map_err(py_err)?;
    Ok((s.kmin(), s.coeffs().to_vec()))
}

/// Uncertainty constant of `phi_j^a` or `psi_j^a`.
#[pyfunction]
#[pyo3(signature = (a, j, kind_name, epsilon = frame::DEFAULT_EPSILON))]
fn uc<'py>(py: Python<'py>, a: f64, j: u32, kind_name: &str, epsilon: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = localization::uc_of(&params(a, j, epsilon)?, kind(kind_name)?).map_err(py_err)?;
    report(py, &r)
}

/// Uncertainty constant of an arbitrary coefficient sequence.
#[pyfunction]
fn breitenberger_uc<'py>(py: Python<'py>, kmin: i64, coeffs: Vec<Complex64>) -> PyResult<Bound<'py, PyDict>> {
    let r = localization::breitenberger_uc(&seq(kmin, coeffs)?).map_err(py_err)?;
    report(py, &r)
}

/// Worst defects of the UEP identities at one level.
#[pyfunction]
fn verify_uep<'py>(py: Python<'py>, a: f64, j: u32) -> PyResult<Bound<'py, PyDict>> {
    let r = frame::verify_uep(&params(a, j, frame::DEFAULT_EPSILON)?).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("j", r.j)?;
    d.set_item("max_row_defect", r.max_row_defect)?;
    d.set_item("max_cross_defect", r.max_cross_defect)?;
    d.set_item("max_refine_defect", r.max_refine_defect)?;
    d.set_item("norm_limit_sample", r.norm_limit_sample)?;
    Ok(d)
}

/// `(phi0, [level_0, level_1, ...])` frame coefficients of a sequence.
#[pyfunction]
fn decompose(kmin: i64, coeffs: Vec<Complex64>, a: f64, levels: u32) -> PyResult<(Complex64, Vec<Vec<Complex64>>)> {
    let d = transform::decompose(&seq(kmin, coeffs)?, a, levels).map_err(py_err)?;
    Ok((d.phi0, d.levels.into_iter().map(|l| l.values).collect()))
}

/// Relative L2 error of decomposing and resynthesizing a sequence.
#[pyfunction]
fn roundtrip_error(kmin: i64, coeffs: Vec<Complex64>, a: f64, levels: u32) -> PyResult<f64> {
    transform::roundtrip_error(&seq(kmin, coeffs)?, a, levels).map_err(py_err)
}

/// Relative cascade defect at level j.
#[pyfunction]
fn cascade_defect(kmin: i64, coeffs: Vec<Complex64>, a: f64, j: u32) -> PyResult<f64> {
    transform::cascade_defect(&seq(kmin, coeffs)?, &params(a, j, frame::DEFAULT_EPSILON)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, b, m = 0))]
fn theta_direct(alpha: f64, beta: f64, gamma: f64, b: f64, m: u32) -> PyResult<f64> {
    let p = ThetaParams::new(alpha, beta, gamma, b, m).map_err(py_err)?;
    Ok(oracle::theta_direct(&p))
}

#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, b, m = 0))]
fn theta_poisson(alpha: f64, beta: f64, gamma: f64, b: f64, m: u32) -> PyResult<f64> {
    let p = ThetaParams::new(alpha, beta, gamma, b, m).map_err(py_err)?;
    oracle::theta_poisson(&p).map_err(py_err)
}

/// `(mantissa, ln_scale)` of a moment of `eta^{a,0}_j`
/// (`"norm"`, `"dnorm"` or `"tau"`).
#[pyfunction]
fn eta_moment(a: f64, j: u32, moment: &str) -> PyResult<(f64, f64)> {
    let m = match moment {
        "norm" => Moment::Norm,
        "dnorm" => Moment::DNorm,
        "tau" => Moment::Tau,
        _ => return Err(PyValueError::new_err(format!("unknown moment {moment:?}"))),
    };
    let v = oracle::eta_moment_direct(&params(a, j, frame::DEFAULT_EPSILON)?, m).map_err(py_err)?;
    Ok((v.mantissa, v.ln_scale))
}

#[pymodule(name = "pwframe")]
fn pwframe_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_EPSILON", frame::DEFAULT_EPSILON)?;
    m.add_function(wrap_pyfunction!(mask_nu, m)?)?;
    m.add_function(wrap_pyfunction!(mask_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_hat, m)?)?;
    m.add_function(wrap_pyfunction!(wavelet_hat, m)?)?;
    m.add_function(wrap_pyfunction!(build_seq, m)?)?;
    m.add_function(wrap_pyfunction!(uc, m)?)?;
    m.add_function(wrap_pyfunction!(breitenberger_uc, m)?)?;
    m.add_function(wrap_pyfunction!(verify_uep, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip_error, m)?)?;
    m.add_function(wrap_pyfunction!(cascade_defect, m)?)?;
    m.add_function(wrap_pyfunction!(theta_direct, m)?)?;
    m.add_function(wrap_pyfunction!(theta_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(eta_moment, m)?)?;
    Ok(())
}
