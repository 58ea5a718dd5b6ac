//! Python bindings for the `nielsen_zeta` crate.
//!
//! Big integers and rationals cross the boundary as decimal strings
//! (`"-3/4"`) so nothing is rounded; `fractions.Fraction(s)` reads them back.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use nielsen_zeta::asymptotics::{self, AsymptoticExpansion};
use nielsen_zeta::document::{descriptor_to_json, parse_descriptor, RadicalDocument};
use nielsen_zeta::twisted::{self, FreeEndomorphism, GroupWord};
use nielsen_zeta::zeta::{exp_sum_series, verify_closed_form, zeta_with};
use nielsen_zeta::{Error, MapDescriptor, RadicalExpr, ZetaOptions};

create_exception!(nielsen_zeta_py, ZetaError, PyException, "Raised for any error reported by the library.");

fn to_py(e: Error) -> PyErr {
    ZetaError::new_err(e.to_string())
}

/// A homeomorphism description; build one with `Descriptor.from_json`.
#[pyclass(name = "Descriptor", module = "nielsen_zeta_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDescriptor {
    inner: MapDescriptor,
}

#[pymethods]
impl PyDescriptor {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDescriptor {
            inner: parse_descriptor(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        descriptor_to_json(&self.inner)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    #[pyo3(signature = (order = 64))]
    fn validate(&self, order: usize) -> PyResult<()> {
        self.inner.validate(order).map_err(to_py)
    }

    fn nielsen_number(&self, n: u64) -> PyResult<String> {
        Ok(self.inner.nielsen_number(n).map_err(to_py)?.to_string())
    }

    fn nielsen_sequence(&self, n_max: usize) -> PyResult<Vec<String>> {
        let seq = self.inner.nielsen_sequence(n_max).map_err(to_py)?;
        Ok(seq.iter().map(|v| v.to_string()).collect())
    }

    fn iterate(&self, k: u64) -> PyResult<Self> {
        Ok(PyDescriptor {
            inner: self.inner.iterate(k).map_err(to_py)?,
        })
    }

    /// Coefficients of `exp(Σ N(fⁿ)/n zⁿ)` up to `z^order`.
    #[pyo3(signature = (order = 64))]
    fn series(&self, order: usize) -> PyResult<Vec<String>> {
        let s = exp_sum_series(&self.inner, order).map_err(to_py)?;
        Ok(s.coeffs().iter().map(|c| c.to_string()).collect())
    }

    fn __repr__(&self) -> String {
        format!("Descriptor(kind={:?})", self.inner.kind())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Product of integer polynomials raised to rational exponents.
#[pyclass(name = "ClosedForm", module = "nielsen_zeta_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyClosedForm {
    inner: RadicalExpr,
}

#[pymethods]
impl PyClosedForm {
    #[getter]
    fn is_rational(&self) -> bool {
        self.inner.is_rational()
    }

    /// `(coefficients, exponent)` pairs, constant term first.
    fn factors(&self) -> Vec<(Vec<String>, String)> {
        self.inner
            .factors()
            .map(|(p, e)| (p.coeffs().iter().map(|c| c.to_string()).collect(), e.to_string()))
            .collect()
    }

    #[pyo3(signature = (order = 64))]
    fn expand(&self, order: usize) -> PyResult<Vec<String>> {
        let s = self.inner.expand(order).map_err(to_py)?;
        Ok(s.coeffs().iter().map(|c| c.to_string()).collect())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&RadicalDocument::from_expr(&self.inner)).expect("closed forms serialize")
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("ClosedForm({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

fn options(order: usize, max_den_degree: usize) -> ZetaOptions {
    ZetaOptions {
        order,
        max_den_degree,
        ..ZetaOptions::default()
    }
}

/// Closed-form Nielsen zeta function.
#[pyfunction]
#[pyo3(signature = (descriptor, order = 64, max_den_degree = 8))]
fn zeta(descriptor: &PyDescriptor, order: usize, max_den_degree: usize) -> PyResult<PyClosedForm> {
    Ok(PyClosedForm {
        inner: zeta_with(&descriptor.inner, &options(order, max_den_degree)).map_err(to_py)?,
    })
}

/// Index of the first disagreement between closed form and exponential
/// sum up to `z^order`, or `None`.
#[pyfunction]
#[pyo3(signature = (descriptor, order = 64))]
fn verify(descriptor: &PyDescriptor, order: usize) -> PyResult<Option<usize>> {
    let d = &descriptor.inner;
    let closed = zeta_with(d, &options(order.max(nielsen_zeta::DEFAULT_ORDER), 8)).map_err(to_py)?;
    Ok(verify_closed_form(&closed, d, order).map_err(to_py)?.first_mismatch)
}

/// Witness `γ` with `|γ| ≤ bound` and `γ x φ(γ)⁻¹ = y`, or `None`.
#[pyfunction]
fn twisted_witness(phi: &str, x: &str, y: &str, bound: usize) -> PyResult<Option<String>> {
    let phi: FreeEndomorphism = phi.parse().map_err(to_py)?;
    let x: GroupWord = x.parse().map_err(to_py)?;
    let y: GroupWord = y.parse().map_err(to_py)?;
    let found = twisted::are_twisted_conjugate_bounded(&x, &y, &phi, bound).map_err(to_py)?;
    Ok(found.witness().map(|g| g.to_string()))
}

/// `(length, words, cells, unknown_fraction)` rows for lengths `0..=max_len`.
#[pyfunction]
fn class_counts(phi: &str, max_len: usize, bound: usize) -> PyResult<Vec<(usize, usize, usize, f64)>> {
    let phi: FreeEndomorphism = phi.parse().map_err(to_py)?;
    let report = twisted::class_count_lower_bound(&phi, max_len, bound).map_err(to_py)?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.length, r.words, r.cells, r.unknown_fraction))
        .collect())
}

#[pyfunction]
fn asym_eval(h: f64, coeffs: Vec<f64>, x: f64) -> PyResult<f64> {
    AsymptoticExpansion::new(h, coeffs)
        .and_then(|e| e.eval(x))
        .map_err(to_py)
}

/// Least-squares `C_0..C_n`; returns `(coeffs, max_relative_residual)`.
#[pyfunction]
#[pyo3(signature = (xs, counts, h = 2.0, n = 2, odd_zero = false))]
fn asym_fit(xs: Vec<f64>, counts: Vec<f64>, h: f64, n: usize, odd_zero: bool) -> PyResult<(Vec<f64>, f64)> {
    if xs.len() != counts.len() {
        return Err(to_py(Error::InvalidArgument("xs and counts differ in length".into())));
    }
    let samples: Vec<_> = xs
        .into_iter()
        .zip(counts)
        .map(|(x, count)| asymptotics::CountSample { x, count })
        .collect();
    let fit = asymptotics::fit_expansion(&samples, h, n, odd_zero).map_err(to_py)?;
    Ok((fit.expansion.coeffs, fit.max_relative_residual))
}

#[pymodule]
fn nielsen_zeta_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ZetaError", m.py().get_type::<ZetaError>())?;
    m.add_class::<PyDescriptor>()?;
    m.add_class::<PyClosedForm>()?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_witness, m)?)?;
    m.add_function(wrap_pyfunction!(class_counts, m)?)?;
    m.add_function(wrap_pyfunction!(asym_eval, m)?)?;
    m.add_function(wrap_pyfunction!(asym_fit, m)?)?;
    Ok(())
}
