//! Python bindings for `quadorder`.

use pyo3::create_exception;
use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use quadorder::abelian::{davenport_with, FiniteAbelianGroup};
use quadorder::classgroup::{class_group_data, class_number_formula as formula, ClassGroupData, StructureCertainty};
use quadorder::elasticity::{elasticity_of_order, ElasticityResult};
use quadorder::factorlab;
use quadorder::order;
use quadorder::report::analyze as analyze_order;
use quadorder::{Budget, Error};

create_exception!(pyquadorder, BudgetExceeded, PyRuntimeError, "A search budget was exhausted.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(m) | Error::Precondition(m) => PyValueError::new_err(m),
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        Error::SearchLimit(m) | Error::Resource(m) => BudgetExceeded::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn fraction(py: Python<'_>, num: u64, den: u64) -> PyResult<Py<PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    Ok(cls.call1((num, den))?.unbind())
}

/// The order `Z + f*O_K` of `Q(sqrt(d))`.
#[pyclass(name = "QuadraticOrder", frozen)]
struct PyOrder {
    inner: order::QuadraticOrder,
    budget: Budget,
}

impl PyOrder {
    fn data(&self) -> PyResult<ClassGroupData> {
        class_group_data(&self.inner, &self.budget).map_err(to_py)
    }

    fn rho(&self) -> PyResult<ElasticityResult> {
        let data = self.data()?;
        elasticity_of_order(&self.inner, &data, &self.budget).map_err(to_py)
    }
}

#[pymethods]
impl PyOrder {
    #[new]
    fn new(d: i64, f: u64) -> PyResult<Self> {
        Ok(PyOrder {
            inner: order::QuadraticOrder::new(d, f).map_err(to_py)?,
            budget: Budget::from_env(),
        })
    }

    #[getter]
    fn d(&self) -> i64 {
        self.inner.field().d()
    }

    #[getter]
    fn f(&self) -> u64 {
        self.inner.conductor_index()
    }

    #[getter]
    fn discriminant(&self) -> i128 {
        self.inner.discriminant()
    }

    #[getter]
    fn conductor_is_prime(&self) -> bool {
        self.inner.conductor_is_prime()
    }

    fn unit_index(&self) -> PyResult<u64> {
        self.inner.unit_index().map_err(to_py)
    }

    fn quotient_unit_counts(&self) -> PyResult<(u64, u64)> {
        self.inner.quotient_unit_counts().map_err(to_py)
    }

    fn class_number(&self) -> PyResult<u64> {
        Ok(self.data()?.class_number)
    }

    /// Invariant factors of `Cl(R)`, or `None` when only its order is known.
    fn class_group(&self) -> PyResult<Option<Vec<u64>>> {
        Ok(self.data()?.cl_r.map(|g| g.invariant_factors().to_vec()))
    }

    fn structure_proven(&self) -> PyResult<bool> {
        Ok(self.data()?.certainty == StructureCertainty::Proven)
    }

    fn kernel_order(&self) -> PyResult<u64> {
        Ok(self.data()?.kernel_order)
    }

    /// `Fraction`, `float('inf')`, or `None` when undetermined.
    fn elasticity(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        use quadorder::elasticity::Elasticity::*;
        match self.rho()?.value {
            Finite(r) => fraction(py, *r.numer(), *r.denom()),
            Infinite => Ok(f64::INFINITY.into_pyobject(py)?.into_any().unbind()),
            Undetermined => Ok(py.None()),
        }
    }

    fn case(&self) -> PyResult<String> {
        Ok(format!("{:?}", self.rho()?.case))
    }

    fn __repr__(&self) -> String {
        format!("QuadraticOrder(d={}, f={})", self.d(), self.f())
    }
}

/// Brute-force factorizations in an imaginary order.
#[pyclass(name = "FactorLab", unsendable)]
struct PyFactorLab {
    inner: factorlab::FactorLab,
}

#[pymethods]
impl PyFactorLab {
    #[new]
    fn new(d: i64, f: u64) -> PyResult<Self> {
        Ok(PyFactorLab {
            inner: factorlab::FactorLab::new(d, f).map_err(to_py)?,
        })
    }

    /// Sorted lengths of the factorizations of `x + y*f*omega`.
    fn length_set(&self, x: i128, y: i128) -> PyResult<Vec<u32>> {
        Ok(self.inner.length_set((x, y)).map_err(to_py)?.lengths.into_iter().collect())
    }

    fn element_elasticity(&self, py: Python<'_>, x: i128, y: i128) -> PyResult<Py<PyAny>> {
        let r = self.inner.element_elasticity((x, y)).map_err(to_py)?;
        fraction(py, *r.numer(), *r.denom())
    }

    fn is_irreducible(&self, x: i128, y: i128) -> PyResult<bool> {
        self.inner.is_irreducible((x, y)).map_err(to_py)
    }
}

/// Davenport constant of the group with the given cyclic factors.
#[pyfunction]
fn davenport(factors: Vec<u64>) -> PyResult<u64> {
    let g = FiniteAbelianGroup::from_factors(&factors).map_err(to_py)?;
    davenport_with(&g, &Budget::from_env()).map_err(to_py)
}

#[pyfunction]
fn class_number_formula(h_bar: u64, u_bar: u64, u_r: u64, unit_index: u64) -> PyResult<u64> {
    formula(h_bar, u_bar, u_r, unit_index).map_err(to_py)
}

/// The full analysis as a JSON string.
#[pyfunction]
fn analyze(d: i64, f: u64) -> PyResult<String> {
    Ok(analyze_order(d, f, &Budget::from_env()).map_err(to_py)?.to_json())
}

#[pymodule]
fn pyquadorder(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrder>()?;
    m.add_class::<PyFactorLab>()?;
    m.add_function(wrap_pyfunction!(davenport, m)?)?;
    m.add_function(wrap_pyfunction!(class_number_formula, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
