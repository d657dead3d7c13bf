//! Python bindings for the cone-ordered descent solver.
//!
//! Exposes a deliberately small surface: load a problem (from the built-in
//! registry or a JSON file), solve it with optional parameter overrides, and
//! inspect the outcome, including the iteration trace in CSV form.

use conegrad::problem::ProblemFile;
use conegrad::registry::{registry_names, registry_problem};
use conegrad::solver::{fejer_check, solve, stationarity_residual, SolverConfig};
use conegrad::trace::render_trace;
use conegrad::validate::sampled_stationarity;
use conegrad::{ConeOrder, FeasibleSet, VectorFunction};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::path::Path;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn runtime_err(err: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(err.to_string())
}

/// A problem instance ready to solve.
#[pyclass]
struct Problem {
    name: String,
    function: VectorFunction,
    cone: ConeOrder,
    set: FeasibleSet,
    x0: Vec<f64>,
    config: SolverConfig,
}

impl Problem {
    fn patched_config(
        &self,
        sigma: Option<f64>,
        beta_hat: Option<f64>,
        eps_stat: Option<f64>,
        max_iter: Option<usize>,
    ) -> SolverConfig {
        let mut config = self.config.clone();
        if let Some(s) = sigma {
            config.sigma = s;
        }
        if let Some(b) = beta_hat {
            config.beta_hat = b;
        }
        if let Some(e) = eps_stat {
            config.eps_stat = e;
        }
        if let Some(k) = max_iter {
            config.max_iter = k;
        }
        config
    }
}

#[pymethods]
impl Problem {
    /// Load one of the built-in problems by name.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let p = registry_problem(name).map_err(value_err)?;
        Ok(Problem {
            name: p.name.to_string(),
            function: p.function,
            cone: p.cone,
            set: p.set,
            x0: p.x0,
            config: SolverConfig::default(),
        })
    }

    /// Load a problem from a JSON file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let file = ProblemFile::read(Path::new(path)).map_err(value_err)?;
        let assembled = file.assemble().map_err(value_err)?;
        Ok(Problem {
            name: assembled.name,
            function: assembled.function,
            cone: assembled.cone,
            set: assembled.set,
            x0: assembled.x0,
            config: assembled.config,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.function.variable_names()
    }

    #[getter]
    fn x0(&self) -> Vec<f64> {
        self.x0.clone()
    }

    /// Objective vector at a point.
    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.function.eval(&x).map_err(value_err)
    }

    /// Run the solver, optionally overriding a few parameters.
    #[pyo3(signature = (x0=None, sigma=None, beta_hat=None, eps_stat=None, max_iter=None))]
    fn solve(
        &self,
        x0: Option<Vec<f64>>,
        sigma: Option<f64>,
        beta_hat: Option<f64>,
        eps_stat: Option<f64>,
        max_iter: Option<usize>,
    ) -> PyResult<SolveOutcome> {
        let config = self.patched_config(sigma, beta_hat, eps_stat, max_iter);
        let start = x0.unwrap_or_else(|| self.x0.clone());
        let result = solve(&self.cone, &self.function, &self.set, &start, &config)
            .map_err(runtime_err)?;
        let trace_csv = render_trace(self.function.n(), self.function.m(), &result.iterations);
        let fejer = fejer_check(&self.cone, &self.function, &result.iterations, &result.x_final)
            .ok()
            .map(|report| (report.pairs, report.max_violation, report.delta_sum));
        Ok(SolveOutcome {
            status: result.status.to_string(),
            x_final: result.x_final,
            f_final: result.f_final,
            stationarity_residual: result.stationarity_residual,
            iteration_count: result.iterations.len(),
            trace_csv,
            fejer,
        })
    }

    /// Exact-mode `|theta(x)|` at a point.
    fn residual_at(&self, x: Vec<f64>) -> PyResult<f64> {
        stationarity_residual(&self.cone, &self.function, &self.set, &x, &self.config)
            .map_err(runtime_err)
    }

    /// Randomized search for a strict descent direction at `x`; `True` means
    /// none was found.
    #[pyo3(signature = (x, samples=200, seed=0, strict_tol=1e-9))]
    fn looks_stationary(
        &self,
        x: Vec<f64>,
        samples: usize,
        seed: u64,
        strict_tol: f64,
    ) -> PyResult<bool> {
        sampled_stationarity(&self.cone, &self.function, &self.set, &x, samples, seed, strict_tol)
            .map_err(runtime_err)
    }
}

/// Result of a solver run.
#[pyclass]
struct SolveOutcome {
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    x_final: Vec<f64>,
    #[pyo3(get)]
    f_final: Vec<f64>,
    #[pyo3(get)]
    stationarity_residual: f64,
    #[pyo3(get)]
    iteration_count: usize,
    #[pyo3(get)]
    trace_csv: String,
    /// `(pairs, max_violation, delta_sum)` of the shrinking-distance audit
    /// against the final iterate, when that audit applies.
    #[pyo3(get)]
    fejer: Option<(usize, f64, f64)>,
}

#[pymethods]
impl SolveOutcome {
    fn __repr__(&self) -> String {
        format!(
            "SolveOutcome(status='{}', iterations={}, residual={:.3e})",
            self.status, self.iteration_count, self.stationarity_residual
        )
    }
}

/// Names of the built-in problems.
#[pyfunction]
fn builtin_names() -> Vec<String> {
    registry_names()
        .iter()
        .map(|(name, _)| name.to_string())
        .collect()
}

#[pymodule]
fn conegrad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Problem>()?;
    m.add_class::<SolveOutcome>()?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    Ok(())
}
