//! Python bindings for `tnnflow-core`.

use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tnnflow_core::cells::{self, FigureFormat};
use tnnflow_core::chevalley;
use tnnflow_core::embedding::{self, ChartPoint};
use tnnflow_core::flow::{self, FlowSpec};
use tnnflow_core::folding;
use tnnflow_core::scalar::q_from_f64;
use tnnflow_core::suite::{run_suite, SuiteConfig};
use tnnflow_core::totpos;
use tnnflow_core::{Matrix, Q, Scalar};

fn err(e: tnnflow_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    Ok(Matrix::from_rows(rows))
}

fn rows<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<f64>> {
    m.to_f64().to_rows()
}

fn j_set(j: Option<Vec<usize>>) -> BTreeSet<usize> {
    j.unwrap_or_default().into_iter().collect()
}

/// Chevalley generators of `sl(n)` and the principal element `τ`.
#[pyclass(frozen)]
struct Pinning {
    inner: chevalley::Pinning,
}

#[pymethods]
impl Pinning {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: chevalley::build_pinning(n).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn e(&self, i: usize) -> PyResult<Vec<Vec<f64>>> {
        self.inner.check_index(i).map_err(err)?;
        Ok(rows(self.inner.e(i)))
    }

    fn f(&self, i: usize) -> PyResult<Vec<Vec<f64>>> {
        self.inner.check_index(i).map_err(err)?;
        Ok(rows(self.inner.f(i)))
    }

    fn tau(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.tau())
    }

    fn exp_tau(&self, t: f64) -> Vec<Vec<f64>> {
        rows(&self.inner.exp_tau(t))
    }

    fn __repr__(&self) -> String {
        format!("Pinning(n={})", self.inner.n())
    }
}

/// Classifies a square matrix by its minors: `"TotallyPositive"`,
/// `"TotallyNonnegative"` or `"Neither"`. Entries are converted to exact
/// rationals first.
#[pyfunction]
fn tnn_class(m: Vec<Vec<f64>>) -> PyResult<String> {
    let exact: Vec<Vec<Q>> = matrix(m)?
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(q_from_f64).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    Ok(format!("{:?}", totpos::minor_certificate(&Matrix::from_rows(exact)).class))
}

/// The eigenbasis chart of the representation attached to `(n, J)`, with
/// the flow it carries.
#[pyclass(frozen)]
struct Chart {
    j: BTreeSet<usize>,
    chart: embedding::Chart,
    spec: FlowSpec,
}

#[pymethods]
impl Chart {
    #[new]
    #[pyo3(signature = (n, j = None))]
    fn new(n: usize, j: Option<Vec<usize>>) -> PyResult<Self> {
        let j = j_set(j);
        let rep = embedding::build_rep(&embedding::lambda_for(n, &j).map_err(err)?).map_err(err)?;
        let chart = embedding::eigenchart(&rep).map_err(err)?;
        let spec = FlowSpec::from_chart(&chart).map_err(err)?;
        Ok(Self { j, chart, spec })
    }

    /// dimension of the representation
    #[getter]
    fn rep_dim(&self) -> usize {
        self.chart.rep().dim()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.chart.eigenvalues().to_vec()
    }

    #[getter]
    fn log_c(&self) -> f64 {
        self.spec.log_c()
    }

    fn flow(&self, t: f64, point: Vec<f64>) -> PyResult<Vec<f64>> {
        if point.len() != self.spec.dim() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.spec.dim())));
        }
        Ok(flow::flow(&self.spec, t, &ChartPoint(point)).0)
    }

    /// Returns `(t, point)` where the flow line through `point` meets the
    /// sphere of radius `r`.
    fn sphere_crossing(&self, point: Vec<f64>, r: f64) -> PyResult<(f64, Vec<f64>)> {
        if point.len() != self.spec.dim() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.spec.dim())));
        }
        let c = flow::sphere_crossing(&self.spec, &ChartPoint(point), r).map_err(err)?;
        Ok((c.t, c.point.0))
    }

    /// Chart coordinates of the flag of `g`.
    fn coords(&self, g: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        let line = self.chart.rep().psi_matrix_f64(&matrix(g)?).map_err(err)?;
        Ok(self.chart.chart_coords(&line).map_err(err)?.0)
    }

    /// Largest disagreement between flowing in the chart and acting by
    /// `exp(tτ)` on the flag of `g`.
    fn commutation_defect(&self, g: Vec<Vec<f64>>, t: f64) -> PyResult<f64> {
        Ok(flow::flow_on_flag(&self.chart, &matrix(g)?, &self.j, t).map_err(err)?.discrepancy)
    }

    /// Flows the flag of `g` until its chart norm drops below `tol`. Returns
    /// `(time, analytic_bound, distance_to_fixed_flag)`.
    #[pyo3(signature = (g, tol = 1e-9))]
    fn converge(&self, g: Vec<Vec<f64>>, tol: f64) -> PyResult<(f64, f64, f64)> {
        let c = flow::converge_flag(&self.chart, &matrix(g)?, &self.j, tol).map_err(err)?;
        Ok((c.convergence.time, c.convergence.analytic_bound, c.distance_to_fixed_flag))
    }

    fn __repr__(&self) -> String {
        format!("Chart(n={}, J={:?}, dim={})", self.chart.rep().n(), self.j, self.spec.dim())
    }
}

/// The cell decomposition of the nonnegative complete flags of SL(3).
#[pyclass(frozen)]
struct Census {
    seed: u64,
    census: cells::Census,
    poset: cells::FacePoset,
}

#[pymethods]
impl Census {
    #[new]
    #[pyo3(signature = (seed = 0, samples_per_pattern = 1))]
    fn new(seed: u64, samples_per_pattern: usize) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let census = cells::census(&mut rng, samples_per_pattern).map_err(err)?;
        let poset = cells::face_poset(&census, &mut rng).map_err(err)?;
        Ok(Self { seed, census, poset })
    }

    fn __len__(&self) -> usize {
        self.census.cells.len()
    }

    #[getter]
    fn f_vector(&self) -> Vec<usize> {
        self.census.f_vector().to_vec()
    }

    #[getter]
    fn vertex_labels(&self) -> Vec<String> {
        self.census.vertex_labels().into_iter().collect()
    }

    fn summary(&self) -> String {
        self.census.summary()
    }

    fn euler(&self) -> i64 {
        cells::boundary_check(&self.census, &self.poset).euler
    }

    /// `"json"` or `"svg"`
    #[pyo3(signature = (format = "svg"))]
    fn figure(&self, format: &str) -> PyResult<String> {
        let format: FigureFormat = format.parse().map_err(err)?;
        cells::figure_export(&self.census, &self.poset, format, self.seed).map_err(err)
    }
}

/// Checks that σ-symmetric nonnegative flags of SL(n) stay σ-fixed under
/// the flow. Returns `(symmetric_all_fixed, control_all_fixed)`.
#[pyfunction]
#[pyo3(signature = (n = 4, seed = 0, count = 100, times = vec![0.1, 1.0, 5.0]))]
fn fold_check(n: usize, seed: u64, count: usize, times: Vec<f64>) -> PyResult<(bool, bool)> {
    let f = folding::build_folding(n).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = BTreeSet::new();
    let sym = folding::fixed_locus_flow_check(&f, &j, true, &times, count, &mut rng).map_err(err)?;
    let asym = folding::fixed_locus_flow_check(&f, &j, false, &times, count, &mut rng).map_err(err)?;
    Ok((sym.all_fixed(), asym.all_fixed()))
}

/// Runs the full verification suite. Returns `(pass, report_json)`.
#[pyfunction]
#[pyo3(signature = (seed = 0, count = 100, t = 0.1))]
fn verify(seed: u64, count: usize, t: f64) -> PyResult<(bool, String)> {
    let config = SuiteConfig {
        seed,
        count,
        t,
        ..SuiteConfig::default()
    };
    let report = run_suite(&config).map_err(err)?;
    Ok((report.pass, serde_json::to_string_pretty(&report).map_err(json_err)?))
}

#[pymodule]
fn tnnflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pinning>()?;
    m.add_class::<Chart>()?;
    m.add_class::<Census>()?;
    m.add_function(wrap_pyfunction!(tnn_class, m)?)?;
    m.add_function(wrap_pyfunction!(fold_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
