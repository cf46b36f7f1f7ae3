//! Python bindings for `stimclone`.
//!
//! Counts arrive as Python ints and are range-checked here, so a negative
//! argument raises `ValueError` instead of an overflow error.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stimclone::atoms::{self, AtomsSimConfig, PhotonCountDistribution};
use stimclone::hilbert::{self, Level};
use stimclone::metrics::{self, MetricReport};
use stimclone::pdc::{self, PdcBasisState, PdcParameters};
use stimclone::symmetry::{self, DEFAULT_SEED};
use stimclone::verify::{self, VerifyOptions};
use stimclone::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::EmptyComponent { .. } | Error::NoAntiClones { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn count(name: &str, v: i64) -> PyResult<usize> {
    usize::try_from(v)
        .map_err(|_| PyValueError::new_err(format!("{name} must be non-negative, got {v}")))
}

fn fraction<'py>(py: Python<'py>, r: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    let (n, d): (&BigInt, &BigInt) = (r.numer(), r.denom());
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((n.clone(), d.clone()))
}

fn level_name(l: Level) -> &'static str {
    match l {
        Level::G => "g",
        Level::E1 => "e1",
        Level::E2 => "e2",
    }
}

fn distribution_from(p: BTreeMap<(usize, usize), f64>) -> PyResult<PhotonCountDistribution> {
    PhotonCountDistribution::from_entries(p).map_err(to_py)
}

fn report_dict<'py>(py: Python<'py>, r: &MetricReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("f_clones", r.f_clones)?;
    d.set_item("f_opt", r.f_opt)?;
    d.set_item("f_rand", r.f_rand)?;
    d.set_item("n_all", r.n_all)?;
    d.set_item("n_right", r.n_right)?;
    d.set_item("renorm_denominator", r.renorm_denominator)?;
    Ok(d)
}

/// Basis of the `(n1, n2)` sector as `(levels, k, l)` tuples.
#[pyfunction]
fn enumerate_sector(
    n_atoms: i64,
    n1: i64,
    n2: i64,
) -> PyResult<Vec<(Vec<&'static str>, usize, usize)>> {
    let sector = hilbert::enumerate_sector_checked(n_atoms, n1, n2).map_err(to_py)?;
    Ok(sector
        .basis()
        .iter()
        .map(|s| {
            (
                s.atoms.levels().iter().map(|&l| level_name(l)).collect(),
                s.k,
                s.l,
            )
        })
        .collect())
}

/// `{(k, l): p}` for `n_atoms` atoms after interaction time `gamma_t`.
#[pyfunction]
fn photon_distribution(n_atoms: i64, gamma_t: f64) -> PyResult<BTreeMap<(usize, usize), f64>> {
    let n = count("n_atoms", n_atoms)?;
    if !(gamma_t >= 0.0 && gamma_t.is_finite()) {
        return Err(PyValueError::new_err(format!(
            "gamma_t must be finite and non-negative, got {gamma_t}"
        )));
    }
    let ensemble = atoms::initial_ensemble(n).map_err(to_py)?;
    let p = atoms::photon_distribution(&ensemble, gamma_t).map_err(to_py)?;
    Ok(p.iter().collect())
}

type CurveRow = (f64, Option<f64>, Option<f64>, Option<f64>, f64, f64);

/// Rows of `(gamma_t, f_clones, f_opt, f_rand, n_all, n_right)`; undefined
/// fidelities are `None`.
#[pyfunction]
fn simulate_time_series(n_atoms: i64, gamma_t_max: f64, steps: i64) -> PyResult<Vec<CurveRow>> {
    let config = AtomsSimConfig::new(
        count("n_atoms", n_atoms)?,
        gamma_t_max,
        count("steps", steps)?,
    )
    .map_err(to_py)?;
    let curve = atoms::simulate_time_series(&config).map_err(to_py)?;
    Ok(curve
        .rows
        .iter()
        .map(|r| (r.gamma_t, r.f_clones, r.f_opt, r.f_rand, r.n_all, r.n_right))
        .collect())
}

/// Fidelities and mean photon numbers of a `{(k, l): p}` distribution.
#[pyfunction]
#[pyo3(name = "metrics")]
fn fidelity_report<'py>(
    py: Python<'py>,
    distribution: BTreeMap<(usize, usize), f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = distribution_from(distribution)?;
    report_dict(py, &MetricReport::from_distribution(&p))
}

#[pyfunction]
fn optimal_fidelity(py: Python<'_>, n: i64, m: i64) -> PyResult<Bound<'_, PyAny>> {
    let f =
        metrics::optimal_fidelity(count("n", n)? as u64, count("m", m)? as u64).map_err(to_py)?;
    fraction(py, &f)
}

#[pyfunction]
fn clone_fidelity_pdc(py: Python<'_>, n: i64, m: i64) -> PyResult<Bound<'_, PyAny>> {
    let f = pdc::clone_fidelity_pdc(count("n", n)? as u64, count("m", m)? as u64).map_err(to_py)?;
    fraction(py, &f)
}

#[pyfunction]
fn anticlone_fidelity_pdc(py: Python<'_>, n: i64, m: i64) -> PyResult<Bound<'_, PyAny>> {
    let f =
        pdc::anticlone_fidelity_pdc(count("n", n)? as u64, count("m", m)? as u64).map_err(to_py)?;
    fraction(py, &f)
}

/// Truncated four-mode down-conversion output state.
#[pyclass(name = "PdcState", module = "stimclone", frozen)]
struct PyPdcState(pdc::PdcState);

#[pymethods]
impl PyPdcState {
    #[getter]
    fn n_input(&self) -> usize {
        self.0.n_input()
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.0.cutoff()
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn norm_deficit(&self) -> f64 {
        self.0.norm_deficit()
    }

    fn boundary_probability(&self) -> f64 {
        self.0.boundary_probability()
    }

    /// Amplitude of `|v1, h1, v2, h2>`.
    fn amplitude(&self, v1: i64, h1: i64, v2: i64, h2: i64) -> PyResult<Complex64> {
        let s = PdcBasisState::new(
            count("v1", v1)?,
            count("h1", h1)?,
            count("v2", v2)?,
            count("h2", h2)?,
        );
        Ok(self.0.amplitude(&s))
    }

    /// `<self|other>`.
    fn overlap(&self, other: &PyPdcState) -> PyResult<Complex64> {
        self.0.overlap(&other.0).map_err(to_py)
    }

    /// Weight and fidelities of the component with `m` photons in mode 1.
    fn project_fixed_m<'py>(&self, py: Python<'py>, m: i64) -> PyResult<Bound<'py, PyDict>> {
        let c = pdc::project_fixed_m(&self.0, count("m", m)?).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("weight", c.weight())?;
        d.set_item("clone_fidelity", c.clone_fidelity().map_err(to_py)?)?;
        d.set_item("anticlone_fidelity", c.anticlone_fidelity().ok())?;
        Ok(d)
    }

    /// `[(M, weight)]` for `N <= M <= m_max`.
    fn m_weights(&self, m_max: i64) -> PyResult<Vec<(usize, f64)>> {
        pdc::m_weights(&self.0, count("m_max", m_max)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "PdcState(n_input={}, cutoff={})",
            self.0.n_input(),
            self.0.cutoff()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n_input, gamma_t, cutoff = None))]
fn pdc_state_analytic(n_input: i64, gamma_t: f64, cutoff: Option<i64>) -> PyResult<PyPdcState> {
    let n = count("n_input", n_input)?;
    let mut params = PdcParameters::from_gamma_t(n, gamma_t).map_err(to_py)?;
    if let Some(c) = cutoff {
        params = PdcParameters::new(n, params.gamma, count("cutoff", c)?).map_err(to_py)?;
    }
    pdc::pdc_final_state_analytic(&params)
        .map(PyPdcState)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n_input, gamma_t, cutoff = None))]
fn pdc_state_numeric(n_input: i64, gamma_t: f64, cutoff: Option<i64>) -> PyResult<PyPdcState> {
    let n = count("n_input", n_input)?;
    let cutoff = match cutoff {
        Some(c) => count("cutoff", c)?,
        None => {
            PdcParameters::from_gamma_t(n, gamma_t)
                .map_err(to_py)?
                .cutoff
        }
    };
    pdc::pdc_evolve_numeric(n, gamma_t, cutoff)
        .map(PyPdcState)
        .map_err(to_py)
}

/// Polarization rotation `a†1 -> a a†1 + b a†2`.
#[pyclass(name = "Su2Rotation", module = "stimclone", frozen)]
struct PySu2Rotation(symmetry::Su2Rotation);

#[pymethods]
impl PySu2Rotation {
    #[new]
    fn new(a: Complex64, b: Complex64) -> PyResult<Self> {
        symmetry::Su2Rotation::new(a, b).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(symmetry::Su2Rotation::identity())
    }

    /// `count` Haar-random rotations from a fixed seed.
    #[staticmethod]
    #[pyo3(signature = (seed = DEFAULT_SEED, count = 5))]
    fn seeded(seed: u64, count: usize) -> Vec<Self> {
        symmetry::Su2Rotation::seeded(seed, count)
            .into_iter()
            .map(Self)
            .collect()
    }

    #[getter]
    fn a(&self) -> Complex64 {
        self.0.a()
    }

    #[getter]
    fn b(&self) -> Complex64 {
        self.0.b()
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn __repr__(&self) -> String {
        format!("Su2Rotation(a={}, b={})", self.0.a(), self.0.b())
    }
}

/// Deviations between the rotated-input curve and the canonical one.
#[pyfunction]
fn universality_check<'py>(
    py: Python<'py>,
    rotation: &PySu2Rotation,
    n_atoms: i64,
    gamma_t_max: f64,
    steps: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = AtomsSimConfig::new(
        count("n_atoms", n_atoms)?,
        gamma_t_max,
        count("steps", steps)?,
    )
    .map_err(to_py)?;
    let r = symmetry::universality_check(&rotation.0, &config).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("f_clones", r.f_clones)?;
    d.set_item("f_opt", r.f_opt)?;
    d.set_item("f_rand", r.f_rand)?;
    d.set_item("n_all", r.n_all)?;
    d.set_item("n_right", r.n_right)?;
    d.set_item("distribution", r.distribution)?;
    d.set_item("max_deviation", r.max_deviation())?;
    Ok(d)
}

/// Clone and anti-clone fidelity measured in the rotated frame.
#[pyfunction]
fn pdc_rotated_fidelities(
    rotation: &PySu2Rotation,
    n_input: i64,
    m: i64,
    gamma_t: f64,
) -> PyResult<(f64, Option<f64>)> {
    symmetry::pdc_rotated_fidelities(
        &rotation.0,
        count("n_input", n_input)?,
        count("m", m)?,
        gamma_t,
    )
    .map_err(to_py)
}

type CheckRow = (String, bool, f64, f64, String);

/// Run the invariant suite; returns `(name, passed, deviation, tolerance, detail)`.
#[pyfunction]
#[pyo3(signature = (only = None, max_atoms = 6, seed = DEFAULT_SEED))]
fn run_checks(
    py: Python<'_>,
    only: Option<String>,
    max_atoms: i64,
    seed: u64,
) -> PyResult<Vec<CheckRow>> {
    let opts = VerifyOptions {
        only,
        max_atoms: count("max_atoms", max_atoms)?,
        seed,
    };
    let outcomes = py.detach(|| verify::run(&opts)).map_err(to_py)?;
    Ok(outcomes
        .into_iter()
        .map(|o| {
            (
                o.name.to_string(),
                o.passed,
                o.deviation,
                o.tolerance,
                o.detail,
            )
        })
        .collect())
}

#[pymodule]
#[pyo3(name = "stimclone")]
fn stimclone_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPdcState>()?;
    m.add_class::<PySu2Rotation>()?;
    m.add_function(wrap_pyfunction!(enumerate_sector, m)?)?;
    m.add_function(wrap_pyfunction!(photon_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_time_series, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_report, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(clone_fidelity_pdc, m)?)?;
    m.add_function(wrap_pyfunction!(anticlone_fidelity_pdc, m)?)?;
    m.add_function(wrap_pyfunction!(pdc_state_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(pdc_state_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(universality_check, m)?)?;
    m.add_function(wrap_pyfunction!(pdc_rotated_fidelities, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
