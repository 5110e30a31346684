//! Python bindings for the `distal_beam` library.

use distal_beam as core;
use distal_beam::oracle;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    distal_beam_py,
    NumericalError,
    PyRuntimeError,
    "The numerics failed (self-intersection, degenerate tip, rank loss or non-convergence)."
);

fn to_py(e: core::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Geometric constants of the beam.
#[pyclass(name = "BeamConfig", frozen, from_py_object)]
#[derive(Clone)]
struct PyBeamConfig(core::BeamConfig);

#[pymethods]
impl PyBeamConfig {
    #[new]
    #[pyo3(signature = (length, a0, modes = 3, grid_n = core::DEFAULT_GRID_N))]
    fn new(length: f64, a0: f64, modes: usize, grid_n: usize) -> PyResult<Self> {
        core::BeamConfig::new(length, a0, modes, grid_n)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    #[getter]
    fn a0(&self) -> f64 {
        self.0.a0()
    }

    #[getter]
    fn modes(&self) -> usize {
        self.0.modes()
    }

    #[getter]
    fn grid_n(&self) -> usize {
        self.0.grid().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "BeamConfig(length={}, a0={}, modes={}, grid_n={})",
            self.0.length(),
            self.0.a0(),
            self.0.modes(),
            self.0.grid().len()
        )
    }
}

/// Curvature as a truncated Fourier series, coefficients `[a_1..a_M, b_1..b_M]`.
#[pyclass(name = "FourierCurvature", frozen, from_py_object)]
#[derive(Clone)]
struct PyCurvature(core::FourierCurvature);

#[pymethods]
impl PyCurvature {
    #[new]
    fn new(coeffs: Vec<f64>, length: f64) -> PyResult<Self> {
        core::FourierCurvature::new(coeffs, length)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.0.coeffs().to_vec()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    #[getter]
    fn modes(&self) -> usize {
        self.0.modes()
    }

    fn eval(&self, s: f64) -> PyResult<f64> {
        self.0.eval(s).map_err(to_py)
    }

    fn tangent_angle(&self, s: f64) -> PyResult<f64> {
        self.0.tangent_angle(s).map_err(to_py)
    }

    fn perturbed(&self, direction: Vec<f64>, alpha: f64) -> PyResult<Self> {
        self.0.perturbed(&direction, alpha).map(Self).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "FourierCurvature(coeffs={:?}, length={})",
            self.0.coeffs(),
            self.0.length()
        )
    }
}

/// Rod lengths, distal posture and cross-check values of one shape.
#[pyclass(name = "InvariantReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyReport {
    alpha: f64,
    l1: f64,
    l2: f64,
    lc: f64,
    theta_tip: f64,
    theta_bar: f64,
    tip_ratio: f64,
    tip: (f64, f64),
    l2_polyline: f64,
    lc_polyline: f64,
    lc_first_order: f64,
    max_strain: f64,
    tip_line_offset: f64,
}

impl From<core::InvariantReport> for PyReport {
    fn from(r: core::InvariantReport) -> Self {
        Self {
            alpha: r.alpha,
            l1: r.l1,
            l2: r.l2,
            lc: r.lc,
            theta_tip: r.theta_tip,
            theta_bar: r.theta_bar,
            tip_ratio: r.tip_ratio,
            tip: (r.tip[0], r.tip[1]),
            l2_polyline: r.l2_polyline,
            lc_polyline: r.lc_polyline,
            lc_first_order: r.lc_first_order,
            max_strain: r.max_strain,
            tip_line_offset: r.tip_line_offset,
        }
    }
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "InvariantReport(alpha={}, l1={}, l2={}, lc={}, theta_tip={}, theta_bar={}, tip_ratio={})",
            self.alpha, self.l1, self.l2, self.lc, self.theta_tip, self.theta_bar, self.tip_ratio
        )
    }
}

type Curve = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn curve_tuple(c: &core::SampledCurve) -> Curve {
    (
        c.s.clone(),
        c.theta.clone(),
        c.points.iter().map(|p| p[0]).collect(),
        c.points.iter().map(|p| p[1]).collect(),
    )
}

/// Invariants of `kappa`, tagged with the sweep amplitude `alpha`.
#[pyfunction]
#[pyo3(signature = (kappa, cfg, alpha = 0.0))]
fn invariant_report(kappa: &PyCurvature, cfg: &PyBeamConfig, alpha: f64) -> PyResult<PyReport> {
    core::invariant_report(&kappa.0, &cfg.0, alpha)
        .map(Into::into)
        .map_err(to_py)
}

/// The three rods as `(s, theta, x, y)` tuples: reference, parallel, convergent.
#[pyfunction]
fn rod_curves(kappa: &PyCurvature, cfg: &PyBeamConfig) -> PyResult<(Curve, Curve, Curve)> {
    let r = core::geometry::integrate_reference_curve(&kappa.0, &cfg.0).map_err(to_py)?;
    let p = core::geometry::offset_parallel(&r, cfg.0.a0());
    let c = core::geometry::offset_convergent(&r, cfg.0.a0(), cfg.0.length());
    Ok((curve_tuple(&r), curve_tuple(&p), curve_tuple(&c)))
}

/// Minimum-norm curvature with the given tip angle and average angle.
#[pyfunction]
fn fit_initial_curvature(
    theta_tip: f64,
    theta_bar: f64,
    cfg: &PyBeamConfig,
) -> PyResult<PyCurvature> {
    core::fit_initial_curvature(theta_tip, theta_bar, &cfg.0)
        .map(PyCurvature)
        .map_err(to_py)
}

/// Curvature with the given tip angle whose tip lands on `tip`; returns `(kappa, iterations, residual)`.
#[pyfunction]
fn fit_tip_position(
    theta_tip: f64,
    tip: (f64, f64),
    cfg: &PyBeamConfig,
) -> PyResult<(PyCurvature, usize, f64)> {
    let fit = core::fit_tip_position(theta_tip, [tip.0, tip.1], &cfg.0).map_err(to_py)?;
    Ok((PyCurvature(fit.curvature), fit.iterations, fit.residual))
}

/// The 2 x 2M length-constraint matrix as a list of rows.
#[pyfunction]
fn constraint_matrix(cfg: &PyBeamConfig) -> Vec<Vec<f64>> {
    let a = core::build_constraint_matrix(&cfg.0);
    vec![a.row(0).to_vec(), a.row(1).to_vec()]
}

/// Orthonormal basis of the length-preserving curvature changes.
#[pyfunction]
fn nullspace(cfg: &PyBeamConfig) -> PyResult<Vec<Vec<f64>>> {
    core::nullspace(&core::build_constraint_matrix(&cfg.0))
        .map(|b| b.vectors().to_vec())
        .map_err(to_py)
}

/// Unit nullspace direction with the largest mid-span curvature change.
#[pyfunction]
fn midspan_direction(cfg: &PyBeamConfig) -> PyResult<Vec<f64>> {
    core::nullspace(&core::build_constraint_matrix(&cfg.0))
        .and_then(|b| b.midspan_direction(cfg.0.length()))
        .map_err(to_py)
}

/// Invariants along `kappa0 + alpha * direction`; failed amplitudes give `None`.
#[pyfunction]
fn sweep(
    kappa0: &PyCurvature,
    direction: Vec<f64>,
    alphas: Vec<f64>,
    cfg: &PyBeamConfig,
) -> PyResult<Vec<Option<PyReport>>> {
    let rows = core::sweep(&kappa0.0, &direction, &alphas, &cfg.0).map_err(to_py)?;
    Ok(rows.into_iter().map(|r| r.ok().map(Into::into)).collect())
}

/// Largest amplitude keeping `max a0 |kappa|` within `bound`.
#[pyfunction]
#[pyo3(signature = (kappa0, direction, cfg, bound = 0.5))]
fn amplitude_limit(
    kappa0: &PyCurvature,
    direction: Vec<f64>,
    cfg: &PyBeamConfig,
    bound: f64,
) -> PyResult<f64> {
    core::amplitude_limit(&kappa0.0, &direction, &cfg.0, bound).map_err(to_py)
}

/// Continuum-vs-disk-chain errors, one dict per disk count.
#[pyfunction]
#[pyo3(signature = (kappa, cfg, n_disks = oracle::REFINEMENT_N_DISKS.to_vec()))]
fn compare_with_continuum(
    py: Python<'_>,
    kappa: &PyCurvature,
    cfg: &PyBeamConfig,
    n_disks: Vec<usize>,
) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
    let (_, rows) = oracle::compare_with_continuum(&kappa.0, &cfg.0, &n_disks).map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("n_disks", r.n_disks)?;
            d.set_item("tip_angle_err", r.tip_angle_err)?;
            d.set_item("tip_ratio_err", r.tip_ratio_err)?;
            d.set_item("theta_bar_err", r.theta_bar_err)?;
            d.set_item("l1_err", r.l1_err)?;
            d.set_item("l2_err", r.l2_err)?;
            d.set_item("lc_err", r.lc_err)?;
            Ok(d.unbind())
        })
        .collect()
}

/// Empirical convergence orders of successive error pairs (`None` at the rounding floor).
#[pyfunction]
fn observed_orders(errors: Vec<f64>) -> Vec<Option<f64>> {
    oracle::observed_orders(&errors)
}

/// Bump a disk chain sampled from `kappa`, project it back onto the rod lengths
/// and return `(before, after, iterations, residual)`.
#[pyfunction]
#[pyo3(signature = (kappa, cfg, n_disks = oracle::DEFAULT_N_DISKS, amplitude = 2.0, center = 0.5, width = 0.15))]
fn projection_experiment(
    kappa: &PyCurvature,
    cfg: &PyBeamConfig,
    n_disks: usize,
    amplitude: f64,
    center: f64,
    width: f64,
) -> PyResult<(PyReport, PyReport, usize, f64)> {
    let chain = oracle::chain_from_curvature(&kappa.0, &cfg.0, n_disks).map_err(to_py)?;
    let before = oracle::discrete_invariant_report(&chain).map_err(to_py)?;
    let bump = oracle::bump_perturbation(&chain, amplitude, center, width);
    let projected = oracle::project_to_constraints(&chain, &oracle::rod_lengths(&chain), &bump)
        .map_err(to_py)?;
    let after = oracle::discrete_invariant_report(&projected.chain).map_err(to_py)?;
    Ok((
        before.into(),
        after.into(),
        projected.iterations,
        projected.residual,
    ))
}

#[pymodule]
fn distal_beam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyBeamConfig>()?;
    m.add_class::<PyCurvature>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(invariant_report, m)?)?;
    m.add_function(wrap_pyfunction!(rod_curves, m)?)?;
    m.add_function(wrap_pyfunction!(fit_initial_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(fit_tip_position, m)?)?;
    m.add_function(wrap_pyfunction!(constraint_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(nullspace, m)?)?;
    m.add_function(wrap_pyfunction!(midspan_direction, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(amplitude_limit, m)?)?;
    m.add_function(wrap_pyfunction!(compare_with_continuum, m)?)?;
    m.add_function(wrap_pyfunction!(observed_orders, m)?)?;
    m.add_function(wrap_pyfunction!(projection_experiment, m)?)?;
    Ok(())
}
