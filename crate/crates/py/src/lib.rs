//! Python bindings: `import bergman_lab`.

use bergman_lab::distance::{self, Precision};
use bergman_lab::operators::{self, Section};
use bergman_lab::series::{self, CoeffSeries};
use bergman_lab::{arith, family, Error, Mode};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

/// Truncated power series, float or exact rational.
#[pyclass(name = "Series", module = "bergman_lab", frozen)]
struct PySeries {
    inner: CoeffSeries,
}

#[pymethods]
impl PySeries {
    /// Float series from complex (or real) coefficients.
    #[staticmethod]
    fn from_complex(coeffs: Vec<Complex64>) -> PyResult<Self> {
        Ok(PySeries { inner: CoeffSeries::from_complex(coeffs).map_err(to_py)? })
    }

    /// Exact series from `(numerator, denominator)` pairs.
    #[staticmethod]
    fn from_ratios(pairs: Vec<(i64, i64)>) -> PyResult<Self> {
        Ok(PySeries { inner: CoeffSeries::from_ratios(&pairs).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, mode = "exact"))]
    fn monomial(n: usize, mode: &str) -> PyResult<Self> {
        Ok(PySeries { inner: CoeffSeries::monomial(n, parse::<Mode>(mode)?) })
    }

    #[staticmethod]
    fn random_exact(order: usize, seed: u64) -> Self {
        PySeries { inner: CoeffSeries::random_exact(order, seed) }
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().name()
    }

    /// Squarefree `r` such that the series is `sqrt(r) * sum a_n z^n`.
    #[getter]
    fn radicand(&self) -> u64 {
        self.inner.radicand()
    }

    /// Coefficients as complex floats, including the radicand factor.
    fn coefficients(&self) -> Vec<Complex64> {
        self.inner.to_complex_vec()
    }

    /// Exact coefficients as `"p/q"` strings (real parts; `+ i` parts appended).
    fn exact_coefficients(&self) -> Option<Vec<String>> {
        self.inner.exact_coeffs().map(|v| {
            v.iter()
                .map(|c| if num_traits::Zero::is_zero(&c.im) { c.re.to_string() } else { format!("{}+{}i", c.re, c.im) })
                .collect()
        })
    }

    fn to_float(&self) -> Self {
        PySeries { inner: self.inner.to_float() }
    }

    fn norm_sq_a21(&self) -> f64 {
        series::norm_sq_a21(&self.inner).to_f64()
    }

    fn norm_sq_h2(&self) -> f64 {
        series::norm_sq_h2(&self.inner).to_f64()
    }

    fn evaluate(&self, z: Complex64) -> PyResult<Complex64> {
        series::evaluate(&self.inner, z).map_err(to_py)
    }

    fn apply_t(&self, k: u64) -> PyResult<Self> {
        check_k(k)?;
        Ok(PySeries { inner: operators::apply_t(k, &self.inner) })
    }

    fn apply_t_star(&self, k: u64) -> PyResult<Self> {
        check_k(k)?;
        Ok(PySeries { inner: operators::apply_t_star(k, &self.inner) })
    }

    /// Largest coefficient gap to `other`; `0.0` in exact mode iff equal.
    fn max_deviation(&self, other: &PySeries) -> PyResult<f64> {
        series::max_deviation(&self.inner, &other.inner).map_err(to_py)
    }

    fn __eq__(&self, other: &PySeries) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("Series(order={}, mode={}, radicand={})", self.inner.order(), self.inner.mode(), self.inner.radicand())
    }
}

fn check_k(k: u64) -> PyResult<()> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be >= 1"));
    }
    Ok(())
}

#[pyfunction]
fn inner_a21(f: &PySeries, g: &PySeries) -> PyResult<Complex64> {
    Ok(series::inner_a21(&f.inner, &g.inner).map_err(to_py)?.to_c64())
}

#[pyfunction]
fn make_beta(order: usize) -> PyResult<PySeries> {
    Ok(PySeries { inner: family::make_beta(order).map_err(to_py)? })
}

#[pyfunction]
fn make_s(k: u64, order: usize) -> PyResult<PySeries> {
    Ok(PySeries { inner: family::make_s(k, order).map_err(to_py)? })
}

#[pyfunction]
fn make_f(k: u64, order: usize) -> PyResult<PySeries> {
    Ok(PySeries { inner: family::make_f(k, order).map_err(to_py)? })
}

#[pyfunction]
fn make_big_f(k: u64, order: usize) -> PyResult<PySeries> {
    Ok(PySeries { inner: family::make_big_f(k, order).map_err(to_py)? })
}

#[pyfunction]
fn moebius(n: u64) -> PyResult<i8> {
    arith::FactorTable::new(n.max(1)).moebius(n).map_err(to_py)
}

#[pyfunction]
fn mertens_ratio(x: u64) -> PyResult<f64> {
    arith::FactorTable::new(x.max(1)).mertens_ratio(x).map_err(to_py)
}

#[pyfunction]
fn verify_semigroup(j: u64, k: u64, trials: usize) -> PyResult<bool> {
    check_k(j)?;
    check_k(k)?;
    Ok(operators::verify_semigroup(j, k, trials))
}

#[pyfunction]
fn verify_lemma13(k: u64, m: u64, order: usize) -> PyResult<bool> {
    operators::verify_lemma13(k, m, order).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (j, k, precision = "digamma"))]
fn gram_entry(j: u64, k: u64, precision: &str) -> PyResult<f64> {
    distance::gram_entry(j, k, parse::<Precision>(precision)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, precision = "digamma"))]
fn rhs_entry(k: u64, precision: &str) -> PyResult<f64> {
    distance::rhs_entry(k, parse::<Precision>(precision)?).map_err(to_py)
}

/// One dict per `N` with `n_max`, `distance_sq`, `coefficients`, `solver`,
/// `error_budget`.
#[pyfunction]
#[pyo3(signature = (n_list, precision = "digamma", cache_dir = None))]
fn distance_curve<'py>(
    py: Python<'py>,
    n_list: Vec<u64>,
    precision: &str,
    cache_dir: Option<std::path::PathBuf>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let precision = parse::<Precision>(precision)?;
    let cache = cache_dir.map(distance::Cache::open).transpose().map_err(to_py)?;
    let reports = py.detach(|| distance::distance_curve(&n_list, precision, cache.as_ref())).map_err(to_py)?;
    reports
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n_max", r.n_max)?;
            d.set_item("distance_sq", r.distance_sq)?;
            d.set_item("coefficients", r.coefficients)?;
            d.set_item("solver", r.solver.to_string())?;
            d.set_item("error_budget", r.error_budget)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (m, k_max, trunc = 100_000))]
fn theorem11_residual<'py>(py: Python<'py>, m: u64, k_max: u64, trunc: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| distance::theorem11_residual(m, k_max, trunc)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("m", r.m)?;
    d.set_item("k_max", r.k_max)?;
    d.set_item("trunc", r.trunc)?;
    d.set_item("mertens", r.mertens)?;
    d.set_item("residual_h2", r.residual_h2)?;
    d.set_item("residual_a21", r.residual_a21)?;
    d.set_item("tail_h2", r.tail_h2)?;
    d.set_item("bound", r.bound)?;
    Ok(d)
}

/// Dense section as a list of rows.
#[pyfunction]
#[pyo3(signature = (k, dim, adjoint = false))]
fn finite_section(k: u64, dim: usize, adjoint: bool) -> PyResult<Vec<Vec<f64>>> {
    check_k(k)?;
    if dim == 0 {
        return Err(PyValueError::new_err("dim must be >= 1"));
    }
    let which = if adjoint { Section::TStar } else { Section::T };
    let s = operators::finite_section(k, dim, which);
    Ok((0..dim).map(|m| s.entries.row(m).iter().copied().collect()).collect())
}

#[pyfunction]
fn commutant_experiment<'py>(py: Python<'py>, dim: usize, k_max: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| operators::commutant_experiment(dim, k_max)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("dim", r.dim)?;
    d.set_item("k_max", r.k_max)?;
    d.set_item("solution_dimension", r.solution_dimension)?;
    d.set_item("rank", r.rank)?;
    d.set_item("tolerance", r.tolerance)?;
    d.set_item("residual", r.residual)?;
    d.set_item("identity_residual", r.identity_residual)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "bergman_lab")]
fn bergman_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(inner_a21, m)?)?;
    m.add_function(wrap_pyfunction!(make_beta, m)?)?;
    m.add_function(wrap_pyfunction!(make_s, m)?)?;
    m.add_function(wrap_pyfunction!(make_f, m)?)?;
    m.add_function(wrap_pyfunction!(make_big_f, m)?)?;
    m.add_function(wrap_pyfunction!(moebius, m)?)?;
    m.add_function(wrap_pyfunction!(mertens_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(verify_semigroup, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma13, m)?)?;
    m.add_function(wrap_pyfunction!(gram_entry, m)?)?;
    m.add_function(wrap_pyfunction!(rhs_entry, m)?)?;
    m.add_function(wrap_pyfunction!(distance_curve, m)?)?;
    m.add_function(wrap_pyfunction!(theorem11_residual, m)?)?;
    m.add_function(wrap_pyfunction!(finite_section, m)?)?;
    m.add_function(wrap_pyfunction!(commutant_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
