//! Python bindings: truncated q-series, the expression language, the
//! identity catalogue, Bailey pairs and the partition statistics.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use qbailey_core::bailey;
use qbailey_core::catalogue::{self, Params};
use qbailey_core::dsl;
use qbailey_core::pairs;
use qbailey_core::partition;
use qbailey_core::series;

create_exception!(qbailey, QBaileyError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    QBaileyError::new_err(e.to_string())
}

fn nonneg(name: &str, v: i64) -> PyResult<u32> {
    u32::try_from(v).map_err(|_| {
        PyValueError::new_err(format!("{name} must be a non-negative integer, got {v}"))
    })
}

/// A Laurent series in q with integer coefficients, known exactly up to and
/// including q^order.
#[pyclass(name = "QSeries", module = "qbailey", frozen)]
struct PyQSeries {
    inner: series::QSeries,
}

impl From<series::QSeries> for PyQSeries {
    fn from(inner: series::QSeries) -> Self {
        PyQSeries { inner }
    }
}

#[pymethods]
impl PyQSeries {
    /// Series from the coefficients of q^min_exp, q^(min_exp+1), ...
    #[new]
    #[pyo3(signature = (coeffs, order, min_exp = 0))]
    fn new(coeffs: Vec<BigInt>, order: i64, min_exp: i64) -> Self {
        series::QSeries::from_coeffs(min_exp, coeffs, order).into()
    }

    #[staticmethod]
    fn monomial(coeff: BigInt, exp: i64, order: i64) -> Self {
        series::QSeries::monomial(coeff, exp, order).into()
    }

    #[staticmethod]
    fn zero(order: i64) -> Self {
        series::QSeries::zero(order).into()
    }

    #[staticmethod]
    fn one(order: i64) -> Self {
        series::QSeries::one(order).into()
    }

    #[getter]
    fn order(&self) -> i64 {
        self.inner.order()
    }

    /// Lowest exponent with a nonzero coefficient, or None for zero.
    fn valuation(&self) -> Option<i64> {
        self.inner.valuation()
    }

    fn coeff(&self, n: i64) -> PyResult<BigInt> {
        self.inner.coeff(n).map_err(err)
    }

    /// Coefficients of q^lo .. q^order with lo = min(0, valuation).
    fn coefficients(&self) -> Vec<BigInt> {
        let lo = self.inner.min_exp().min(0);
        self.inner.dense_range(lo, self.inner.order())
    }

    fn truncate(&self, order: i64) -> Self {
        self.inner.truncate(order).into()
    }

    fn invert(&self) -> PyResult<Self> {
        self.inner.invert().map(Into::into).map_err(err)
    }

    fn __add__(&self, other: PyRef<'_, Self>) -> Self {
        (&self.inner + &other.inner).into()
    }

    fn __sub__(&self, other: PyRef<'_, Self>) -> Self {
        (&self.inner - &other.inner).into()
    }

    fn __mul__(&self, other: PyRef<'_, Self>) -> Self {
        (&self.inner * &other.inner).into()
    }

    fn __neg__(&self) -> Self {
        (-&self.inner).into()
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QSeries({})", self.inner)
    }
}

/// (c q^e; q)_n, or the infinite product when n is None.
#[pyfunction]
#[pyo3(signature = (exp, n, order, coeff = 1))]
fn pochhammer(exp: i64, n: Option<i64>, order: i64, coeff: i64) -> PyResult<PyQSeries> {
    let count = match n {
        Some(n) => series::Count::Finite(nonneg("n", n)? as u64),
        None => series::Count::Infinite,
    };
    series::pochhammer(series::QMonomial::new(coeff, exp), count, order)
        .map(Into::into)
        .map_err(err)
}

/// Evaluate an expression such as "sum(n, 0, inf, q^(n^2)/poch(q, n)^2)".
#[pyfunction]
#[pyo3(signature = (expr, order, params = None))]
fn evaluate(expr: &str, order: i64, params: Option<BTreeMap<String, i64>>) -> PyResult<PyQSeries> {
    let e = dsl::parse_str(expr).map_err(|e| PyValueError::new_err(e.to_string()))?;
    dsl::evaluate(&e, &params.unwrap_or_default(), order)
        .map(Into::into)
        .map_err(err)
}

/// Outcome of one verification.
#[pyclass(name = "Report", module = "qbailey", frozen)]
struct PyReport {
    inner: qbailey_core::VerificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn id(&self) -> &str {
        &self.inner.id
    }

    #[getter]
    fn params(&self) -> BTreeMap<String, i64> {
        self.inner.params.clone()
    }

    #[getter]
    fn order(&self) -> i64 {
        self.inner.order
    }

    /// "pass", "fail" or "truncation-failure".
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.as_str()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// (index, exponent, lhs, rhs) of the first disagreement, or None.
    #[getter]
    fn first_mismatch(&self) -> Option<(Option<i64>, i64, BigInt, BigInt)> {
        self.inner
            .first_mismatch
            .as_ref()
            .map(|m| (m.index, m.exponent, m.lhs.clone(), m.rhs.clone()))
    }

    #[getter]
    fn stabilized_k(&self) -> Option<i64> {
        self.inner.stabilized_k
    }

    #[getter]
    fn detail(&self) -> Option<String> {
        self.inner.detail.clone()
    }

    /// Rows (n, lhs, rhs) of the coefficient comparison.
    #[getter]
    fn table(&self) -> Vec<(i64, BigInt, BigInt)> {
        self.inner
            .table
            .iter()
            .map(|r| (r.n, r.lhs.clone(), r.rhs.clone()))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(id={:?}, params={:?}, order={}, status={:?})",
            self.inner.id,
            self.inner.params,
            self.inner.order,
            self.inner.status.as_str()
        )
    }
}

impl From<qbailey_core::VerificationReport> for PyReport {
    fn from(inner: qbailey_core::VerificationReport) -> Self {
        PyReport { inner }
    }
}

/// Catalogue entries as dicts with id, kind, description and params.
#[pyfunction]
fn catalogue_entries(py: Python<'_>) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
    use pyo3::types::PyDict;
    catalogue::registry()
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("id", e.id)?;
            d.set_item("kind", e.kind.to_string())?;
            d.set_item("description", e.description)?;
            let ps: Vec<(&str, i64, i64, Option<i64>)> = e
                .params
                .iter()
                .map(|p| (p.name, p.min, p.max, p.default))
                .collect();
            d.set_item("params", ps)?;
            Ok(d.unbind())
        })
        .collect()
}

/// Run one catalogue check.
#[pyfunction]
#[pyo3(signature = (id, params = None, order = 40))]
fn verify(py: Python<'_>, id: &str, params: Option<Params>, order: i64) -> PyResult<PyReport> {
    let task = catalogue::build(id, &params.unwrap_or_default(), order)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.detach(|| catalogue::run(&task)).into())
}

/// Both sides of a series-equality catalogue entry.
#[pyfunction]
#[pyo3(signature = (id, params = None, order = 40))]
fn sides(id: &str, params: Option<Params>, order: i64) -> PyResult<(PyQSeries, PyQSeries)> {
    let task = catalogue::build(id, &params.unwrap_or_default(), order)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let (l, r) = task
        .sides()
        .ok_or_else(|| PyValueError::new_err(format!("{id} is not a series equality")))?
        .map_err(err)?;
    Ok((l.into(), r.into()))
}

/// Run every check of a TOML manifest given as text.
#[pyfunction]
#[pyo3(signature = (text, order = None))]
fn verify_manifest(py: Python<'_>, text: &str, order: Option<i64>) -> PyResult<Vec<PyReport>> {
    let manifest = dsl::parse_manifest(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let tasks = manifest.tasks(order);
    Ok(py
        .detach(|| tasks.iter().map(catalogue::run).collect::<Vec<_>>())
        .into_iter()
        .map(Into::into)
        .collect())
}

/// A Bailey pair (alpha_n, beta_n) relative to a = q^m.
#[pyclass(name = "BaileyPair", module = "qbailey", frozen)]
struct PyBaileyPair {
    inner: bailey::BaileyPair,
}

#[pymethods]
impl PyBaileyPair {
    /// alpha_n = (q)_M (-1)^n (1+q^n) q^{n(3n-1)/2}/((q)_{M-n}(q)_{M+n}), beta_n = 1/((q)_n (q)_{n+M}).
    #[staticmethod]
    fn spt_pair(m: i64) -> PyResult<Self> {
        Ok(PyBaileyPair {
            inner: pairs::spt_pair(nonneg("M", m)?),
        })
    }

    /// The pair whose alpha carries q^{kn^2 + n(n-1)/2}; k = 0 is the seed of the chain.
    #[staticmethod]
    fn durfee_pair(k: i64, m: i64) -> PyResult<Self> {
        Ok(PyBaileyPair {
            inner: pairs::durfee_pair(nonneg("k", k)?, nonneg("M", m)?),
        })
    }

    /// alpha_0 = sum n q^n/(1-q^n), built from the divisor-sum series.
    #[staticmethod]
    fn divisor_pair() -> Self {
        PyBaileyPair {
            inner: pairs::divisor_sum_pair(),
        }
    }

    /// The symmetric pair B_n = q^{n^2}/(q)_{2n} with pentagonal A_n.
    #[staticmethod]
    fn pentagonal_symmetric_pair() -> Self {
        PyBaileyPair {
            inner: pairs::pentagonal_symmetric_pair(),
        }
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    fn alpha(&self, n: i64, order: i64) -> PyResult<PyQSeries> {
        self.inner.alpha(n, order).map(Into::into).map_err(err)
    }

    fn beta(&self, n: i64, order: i64) -> PyResult<PyQSeries> {
        self.inner.beta(n, order).map(Into::into).map_err(err)
    }

    /// One step of the Bailey chain with both parameters at infinity.
    fn chain_step(&self) -> Self {
        PyBaileyPair {
            inner: bailey::chain_step(&self.inner),
        }
    }

    /// Check the defining relation for n <= n_max.
    fn verify(&self, py: Python<'_>, n_max: i64, order: i64) -> PyResult<PyReport> {
        let p = &self.inner;
        py.detach(|| {
            if p.is_symmetric() {
                bailey::verify_symmetric_pair(p, n_max, order)
            } else {
                bailey::verify_pair(p, n_max, order)
            }
        })
        .map(Into::into)
        .map_err(err)
    }

    /// (sum q^{n^2} beta_n, (1/(q)_inf) sum q^{n^2} alpha_n) at a = 1.
    fn limit_identity(&self, order: i64) -> PyResult<(PyQSeries, PyQSeries)> {
        let (l, r) = bailey::limit_identity(&self.inner, order).map_err(err)?;
        Ok((l.into(), r.into()))
    }
}

#[pyfunction]
fn partition_count(n: i64) -> PyResult<u64> {
    Ok(partition::partition_count(nonneg("n", n)?))
}

#[pyfunction]
fn spt(n: i64) -> PyResult<u64> {
    Ok(partition::spt(nonneg("n", n)?))
}

#[pyfunction]
fn spt_star(m: i64, n: i64) -> PyResult<u64> {
    Ok(partition::spt_star(nonneg("M", m)?, nonneg("n", n)?))
}

/// Half the second rank moment, (1/2) sum_m m^2 N(m, n).
#[pyfunction]
fn second_moment(n: i64) -> PyResult<u64> {
    Ok(partition::second_moment(nonneg("n", n)?))
}

/// {rank m: N(m, n)}.
#[pyfunction]
fn rank_counts(n: i64) -> PyResult<BTreeMap<i64, u64>> {
    Ok(partition::rank_counts(nonneg("n", n)?).counts)
}

#[pymodule]
fn qbailey(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QBaileyError", m.py().get_type::<QBaileyError>())?;
    m.add_class::<PyQSeries>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyBaileyPair>()?;
    m.add_function(wrap_pyfunction!(pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(catalogue_entries, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sides, m)?)?;
    m.add_function(wrap_pyfunction!(verify_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(partition_count, m)?)?;
    m.add_function(wrap_pyfunction!(spt, m)?)?;
    m.add_function(wrap_pyfunction!(spt_star, m)?)?;
    m.add_function(wrap_pyfunction!(second_moment, m)?)?;
    m.add_function(wrap_pyfunction!(rank_counts, m)?)?;
    Ok(())
}
