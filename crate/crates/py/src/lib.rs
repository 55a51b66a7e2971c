//! Python bindings. Symbolic scalars come back as `RationalFunction`
//! objects, specialized ones (`q=..., z=[...]`) as `fractions.Fraction`.

use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};
use shapoform_core::abrr::{abrr_identity_check, fk_series};
use shapoform_core::linalg::SVec;
use shapoform_core::rmatrix::key_id_check;
use shapoform_core::rootsys::RootSystem;
use shapoform_core::routesum::hasse;
use shapoform_core::scalars::ratfunc::parse_rational;
use shapoform_core::scalars::{Field, NumericField, RatFunc, SymbolicField};
use shapoform_core::shapovalov::pairing_block;
use shapoform_core::singular::{
    denominator_audit, linearly_independent, singular_vector, verify_inverse, FhatMethod, Pipeline, VerifyMethod,
};
use shapoform_core::uqmodules::{dual_verma_truncated, finite_dim_module, verma_truncated, ModuleSpec, WeightModule};
use shapoform_core::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Unsupported(_) | Error::InvalidWeight(_) | Error::InvalidCartan(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::DivisionByZero | Error::PhiPole(_) | Error::Pole(_) | Error::Singular(_) | Error::Inconsistent(_) => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait Core<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> Core<T> for shapoform_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

/// An element of Q(q)(z_1, ..., z_r), `z_i = q^{(λ, α_i)}`.
#[pyclass(name = "RationalFunction", frozen, module = "shapoform", skip_from_py_object)]
#[derive(Clone)]
struct PyRatFunc {
    inner: RatFunc,
    nvars: usize,
}

#[pymethods]
impl PyRatFunc {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RationalFunction({})", self.inner)
    }

    fn __eq__(&self, other: &PyRatFunc) -> bool {
        self.inner == other.inner
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Canonical JSON: numerator and denominator as `[coeff, e_q, e_z1, ...]` rows.
    fn to_json(&self) -> String {
        self.inner.to_json(self.nvars).to_string()
    }

    /// Substitutes rationals (given as strings or ints) for q and the z_i.
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        q: &Bound<'py, PyAny>,
        z: Vec<Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let q0 = rational(q)?;
        let z0: Vec<BigRational> = z.iter().map(rational).collect::<PyResult<_>>()?;
        let x = self.inner.specialize(&q0, &z0).py()?;
        fraction(py, &x)
    }
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    parse_rational(&x.str()?.to_string()).py()
}

fn fraction<'py>(py: Python<'py>, x: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((x.to_string(),))
}

trait ToPy {
    fn to_py<'py>(&self, py: Python<'py>, nvars: usize) -> PyResult<Bound<'py, PyAny>>;
}

impl ToPy for RatFunc {
    fn to_py<'py>(&self, py: Python<'py>, nvars: usize) -> PyResult<Bound<'py, PyAny>> {
        Ok(Bound::new(py, PyRatFunc { inner: self.clone(), nvars })?.into_any())
    }
}

impl ToPy for BigRational {
    fn to_py<'py>(&self, py: Python<'py>, _nvars: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self)
    }
}

fn svec_dict<'py, E: ToPy>(
    py: Python<'py>,
    v: &SVec<E>,
    labels: &[String],
    nvars: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (k, c) in v {
        d.set_item(&labels[*k], c.to_py(py, nvars)?)?;
    }
    Ok(d)
}

fn root_system(name: &str) -> PyResult<Arc<RootSystem>> {
    Ok(Arc::new(RootSystem::parse(name).py()?))
}

fn numeric_point(
    q: Option<&Bound<'_, PyAny>>,
    z: Option<Vec<Bound<'_, PyAny>>>,
    rank: usize,
) -> PyResult<Option<NumericField>> {
    match (q, z) {
        (None, None) => Ok(None),
        (Some(q), Some(z)) => {
            if z.len() != rank {
                return Err(PyValueError::new_err(format!("expected {rank} values for z")));
            }
            let z0 = z.iter().map(rational).collect::<PyResult<_>>()?;
            Ok(Some(NumericField::new(rational(q)?, z0).py()?))
        }
        _ => Err(PyValueError::new_err("q and z must be given together")),
    }
}

/// Runs `$body` over the symbolic field, or the numeric one when `q`/`z`
/// were supplied.
macro_rules! with_field {
    ($q:expr, $z:expr, $rank:expr, |$f:ident| $body:expr) => {
        match numeric_point($q, $z, $rank)? {
            None => {
                let $f = SymbolicField::new($rank);
                $body
            }
            Some($f) => $body,
        }
    };
}

fn build_v<F: Field>(f: &F, rs: &Arc<RootSystem>, module: &str, cutoff: Option<usize>) -> PyResult<WeightModule<F>> {
    let spec = ModuleSpec::from_str(module).py()?;
    match spec {
        ModuleSpec::DualVerma => {
            let c = cutoff.ok_or_else(|| PyValueError::new_err("cutoff is required for verma-dual"))?;
            dual_verma_truncated(f, rs, c).py()
        }
        _ => finite_dim_module(f, rs, &spec.labels(rs).py()?).py(),
    }
}

fn pipeline<F: Field>(f: &F, rs: &Arc<RootSystem>, module: &str, cutoff: Option<usize>) -> PyResult<Pipeline<F>> {
    Pipeline::new(build_v(f, rs, module, cutoff)?, cutoff).py()
}

/// Positive roots (simple-root coordinates), ρ-pairings and the Cartan matrix.
#[pyfunction]
fn roots<'py>(py: Python<'py>, cartan_type: &str) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let d = PyDict::new(py);
    d.set_item("name", &rs.name)?;
    d.set_item("rank", rs.rank)?;
    d.set_item("cartan_matrix", rs.cartan.clone())?;
    d.set_item("positive_roots", rs.positive_roots.clone())?;
    d.set_item("rho_pairings", rs.positive_roots.iter().map(|r| rs.rho_pairing(r)).collect::<Vec<_>>())?;
    d.set_item("norms", rs.positive_roots.iter().map(|r| rs.norm2(r)).collect::<Vec<_>>())?;
    Ok(d)
}

/// `{ν: dim}` for the truncated Verma (or dual Verma) module.
#[pyfunction]
#[pyo3(signature = (cartan_type, cutoff, dual = false))]
fn verma_dims<'py>(py: Python<'py>, cartan_type: &str, cutoff: usize, dual: bool) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let f = SymbolicField::new(rs.rank);
    let v = if dual { dual_verma_truncated(&f, &rs, cutoff) } else { verma_truncated(&f, &rs, cutoff) }.py()?;
    let d = PyDict::new(py);
    for (off, n) in v.dims() {
        let nu: Vec<i64> = off.iter().map(|x| x.abs()).collect();
        d.set_item(PyTuple::new(py, nu)?, n)?;
    }
    Ok(d)
}

/// The Shapovalov pairing block of depth `nu` as `(rows, cols, matrix)`.
#[pyfunction]
#[pyo3(signature = (cartan_type, cutoff, nu, q = None, z = None))]
fn gram<'py>(
    py: Python<'py>,
    cartan_type: &str,
    cutoff: usize,
    nu: Vec<i64>,
    q: Option<Bound<'py, PyAny>>,
    z: Option<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyTuple>> {
    let rs = root_system(cartan_type)?;
    let nvars = rs.rank + 1;
    with_field!(q.as_ref(), z, rs.rank, |f| {
        let verma = verma_truncated(&f, &rs, cutoff).py()?;
        let dual = dual_verma_truncated(&f, &rs, cutoff).py()?;
        let b = pairing_block(&verma, &dual, &nu).py()?;
        let rows = PyList::empty(py);
        for r in &b.entries {
            let row: Vec<Bound<'py, PyAny>> = r.iter().map(|x| x.to_py(py, nvars)).collect::<PyResult<_>>()?;
            rows.append(row)?;
        }
        (b.rows.clone(), b.cols.clone(), rows).into_pyobject(py)
    })
}

/// `{(i, j): {basis word of M_λ: coefficient}}` for the entries `f̂_ij 1_λ`.
#[pyfunction]
#[pyo3(signature = (cartan_type, module, cutoff = None, method = "routes", q = None, z = None))]
fn fhat<'py>(
    py: Python<'py>,
    cartan_type: &str,
    module: &str,
    cutoff: Option<usize>,
    method: &str,
    q: Option<Bound<'py, PyAny>>,
    z: Option<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let method = FhatMethod::from_str(method).py()?;
    let nvars = rs.rank + 1;
    with_field!(q.as_ref(), z, rs.rank, |f| {
        let p = pipeline(&f, &rs, module, cutoff)?;
        let cols: Vec<usize> =
            if module.starts_with("verma") || module.starts_with("dual") { vec![0] } else { (0..p.v.dim()).collect() };
        let fh = p.fhat(&cols, method).py()?;
        let out = PyDict::new(py);
        for (j, col) in &fh.columns {
            for (i, x) in col {
                out.set_item((&p.v.labels[*i], &p.v.labels[*j]), svec_dict(py, x, &p.m.labels, nvars)?)?;
            }
        }
        Ok(out)
    })
}

/// Builds every `u_j`, checks `e_α u_j = 0` and their linear independence.
#[pyfunction]
#[pyo3(signature = (cartan_type, module, method = "routes", q = None, z = None))]
fn singular_vectors<'py>(
    py: Python<'py>,
    cartan_type: &str,
    module: &str,
    method: &str,
    q: Option<Bound<'py, PyAny>>,
    z: Option<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let method = FhatMethod::from_str(method).py()?;
    with_field!(q.as_ref(), z, rs.rank, |f| {
        let p = pipeline(&f, &rs, module, None)?;
        let cols: Vec<usize> = (0..p.v.dim()).collect();
        let fh = p.fhat(&cols, method).py()?;
        let annihilated = PyDict::new(py);
        let mut vectors = Vec::new();
        for &j in &cols {
            let r = singular_vector(&p.v, &p.m, &fh, j).py()?;
            annihilated.set_item(&r.label, r.annihilated())?;
            vectors.push(r.vector);
        }
        let refs: Vec<_> = vectors.iter().collect();
        let out = PyDict::new(py);
        out.set_item("annihilated", annihilated)?;
        out.set_item("independent", linearly_independent(&f, &refs).py()?)?;
        Ok(out)
    })
}

/// Three-way check of the inverse Shapovalov form on the dual Verma module.
#[pyfunction]
#[pyo3(signature = (cartan_type, cutoff, method = "all", q = None, z = None))]
fn verify_inverse_form<'py>(
    py: Python<'py>,
    cartan_type: &str,
    cutoff: usize,
    method: &str,
    q: Option<Bound<'py, PyAny>>,
    z: Option<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let method = VerifyMethod::from_str(method).py()?;
    with_field!(q.as_ref(), z, rs.rank, |f| {
        let r = verify_inverse(&f, &rs, cutoff, method).py()?;
        let out = PyDict::new(py);
        out.set_item("passed", r.passed())?;
        out.set_item("mismatch", r.mismatch.clone())?;
        let blocks = PyList::empty(py);
        for b in &r.blocks {
            let d = PyDict::new(py);
            d.set_item("nu", b.nu.clone())?;
            d.set_item("dim", b.dim)?;
            d.set_item("identity", b.identity)?;
            d.set_item("agree", b.agree)?;
            blocks.append(d)?;
        }
        out.set_item("blocks", blocks)?;
        Ok(out)
    })
}

fn identity_dict<'py>(
    py: Python<'py>,
    checked: usize,
    failures: &[String],
    extra: &[(&str, usize)],
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("passed", failures.is_empty())?;
    d.set_item("checked", checked)?;
    d.set_item("failures", failures.to_vec())?;
    for (k, v) in extra {
        d.set_item(*k, *v)?;
    }
    Ok(d)
}

/// The ABRR identity for the series-built `F̂`, with the series length.
#[pyfunction]
#[pyo3(signature = (cartan_type, module = "verma-dual", cutoff = None))]
fn verify_abrr<'py>(
    py: Python<'py>,
    cartan_type: &str,
    module: &str,
    cutoff: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let f = SymbolicField::new(rs.rank);
    let p = pipeline(&f, &rs, module, cutoff)?;
    let longest = hasse(&p.v).longest_path();
    let cols: Vec<usize> = (0..p.v.dim()).collect();
    let s = fk_series(&p.v, &p.m, &p.ft, &cols, longest + 1).py()?;
    let r = abrr_identity_check(&p.v, &p.m, &p.rhat, &s.fhat).py()?;
    identity_dict(py, r.checked, &r.failures, &[("nonzero_terms", s.nonzero_terms()), ("longest_path", longest)])
}

/// The intertwining identity satisfied by F on V ⊗ M_λ.
#[pyfunction]
#[pyo3(signature = (cartan_type, module = "verma-dual", cutoff = None))]
fn verify_key_identity<'py>(
    py: Python<'py>,
    cartan_type: &str,
    module: &str,
    cutoff: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let f = SymbolicField::new(rs.rank);
    let p = pipeline(&f, &rs, module, cutoff)?;
    let r = key_id_check(&p.v, &p.m, &p.ft).py()?;
    identity_dict(py, r.checked, &r.failures, &[])
}

/// Factors the denominators of the inverse form against the genericity factors.
#[pyfunction]
fn audit_denominators<'py>(py: Python<'py>, cartan_type: &str, cutoff: usize) -> PyResult<Bound<'py, PyDict>> {
    let rs = root_system(cartan_type)?;
    let f = SymbolicField::new(rs.rank);
    let r = verify_inverse(&f, &rs, cutoff, VerifyMethod::Routes).py()?;
    let a = denominator_audit(&rs, r.inverses.values().flatten().flatten(), cutoff as i64);
    let d = PyDict::new(py);
    d.set_item("passed", a.passed() && r.passed())?;
    d.set_item("audited", a.audited)?;
    d.set_item("inventory", a.inventory.clone())?;
    d.set_item("unexplained", a.unexplained.clone())?;
    d.set_item("q_only", a.q_only)?;
    Ok(d)
}

#[pymodule]
fn shapoform(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRatFunc>()?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(verma_dims, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(fhat, m)?)?;
    m.add_function(wrap_pyfunction!(singular_vectors, m)?)?;
    m.add_function(wrap_pyfunction!(verify_inverse_form, m)?)?;
    m.add_function(wrap_pyfunction!(verify_abrr, m)?)?;
    m.add_function(wrap_pyfunction!(verify_key_identity, m)?)?;
    m.add_function(wrap_pyfunction!(audit_denominators, m)?)?;
    Ok(())
}
