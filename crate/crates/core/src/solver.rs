//! The projected-gradient style outer loop and its convergence diagnostics.
//!
//! Each iteration asks the direction oracle for a certified descent direction,
//! backtracks along it in the cone order, and records the step together with
//! the quantity `2 t beta_hat |<omega, J v>|`. Those increments are the
//! per-step slack in the inequality
//!
//! `||x_{k+1} - x_hat||^2 <= ||x_k - x_hat||^2 + delta_k`
//!
//! valid for every point `x_hat` whose objective value lies below the whole
//! iterate sequence, and their summability is what forces the iterates to
//! settle. [`fejer_check`] audits that inequality pair by pair on a finished
//! run.

use crate::cone::{ConeError, ConeOrder};
use crate::expr::EvalError;
use crate::function::VectorFunction;
use crate::linalg;
use crate::linesearch::{self, LineSearchError};
use crate::oracle::{self, DirectionOutcome, OracleError, OracleParams};
use crate::set::{FeasibleSet, SetError, FEASIBILITY_TOL};
use thiserror::Error;

/// Starting points farther than this from the set are rejected instead of
/// silently projected.
const PROJECTION_SNAP_TOL: f64 = 1e-6;

/// Slack accepted when auditing the shrinking-distance inequality.
const FEJER_CHECK_TOL: f64 = 1e-9;

/// Configuration rejections.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config field {name} out of range: {requirement}")]
    OutOfRange {
        name: &'static str,
        requirement: &'static str,
    },
}

/// All tunables of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Scaling of the linear term in the direction model.
    pub beta_hat: f64,
    /// Armijo sufficient-decrease fraction in (0, 1).
    pub delta: f64,
    /// Backtracking ratio; step lengths are `tau^{-j}`.
    pub tau: f64,
    /// Requested direction inexactness in [0, 1); 0 demands exact directions.
    pub sigma: f64,
    /// Stationarity threshold for the direction bounds.
    pub eps_stat: f64,
    /// Tolerance used by cone-order comparisons in the line search.
    pub order_tol: f64,
    /// Outer iteration cap.
    pub max_iter: usize,
    /// Line search trial cap per iteration.
    pub max_backtracks: u32,
    /// Direction oracle evaluation budget per iteration.
    pub fw_max_iters: usize,
    /// Relative duality gap accepted by the oracle in exact mode.
    pub fw_gap_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            beta_hat: 1.0,
            delta: 0.5,
            tau: 2.0,
            sigma: 0.1,
            eps_stat: 1e-8,
            order_tol: 1e-10,
            max_iter: 1000,
            max_backtracks: 60,
            fw_max_iters: 200,
            fw_gap_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |name, requirement| Err(ConfigError::OutOfRange { name, requirement });
        if !(self.beta_hat.is_finite() && self.beta_hat > 0.0) {
            return bad("beta_hat", "finite and > 0");
        }
        if !(self.delta.is_finite() && 0.0 < self.delta && self.delta < 1.0) {
            return bad("delta", "in (0, 1)");
        }
        if !(self.tau.is_finite() && self.tau > 1.0) {
            return bad("tau", "> 1");
        }
        if !(0.0..1.0).contains(&self.sigma) {
            return bad("sigma", "in [0, 1)");
        }
        if !(self.eps_stat.is_finite() && self.eps_stat >= 0.0) {
            return bad("eps_stat", "finite and >= 0");
        }
        if !(self.order_tol.is_finite() && self.order_tol >= 0.0) {
            return bad("order_tol", "finite and >= 0");
        }
        if self.max_iter == 0 {
            return bad("max_iter", ">= 1");
        }
        if self.fw_max_iters == 0 {
            return bad("fw_max_iters", ">= 1");
        }
        if !(self.fw_gap_tol.is_finite() && self.fw_gap_tol > 0.0) {
            return bad("fw_gap_tol", "finite and > 0");
        }
        Ok(())
    }

    fn oracle_params(&self) -> OracleParams {
        OracleParams {
            beta_hat: self.beta_hat,
            sigma: self.sigma,
            eps_stat: self.eps_stat,
            fw_max_iters: self.fw_max_iters,
            fw_gap_tol: self.fw_gap_tol,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// The direction oracle certified approximate stationarity.
    Stationary,
    /// The outer iteration cap was reached first.
    MaxIterations,
    /// The line search ran out of backtracks.
    LineSearchFailure,
    /// The direction oracle ran out of budget before certifying anything.
    OracleBudgetExceeded,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SolveStatus::Stationary => "Stationary",
            SolveStatus::MaxIterations => "MaxIterations",
            SolveStatus::LineSearchFailure => "LineSearchFailure",
            SolveStatus::OracleBudgetExceeded => "OracleBudgetExceeded",
        };
        out.write_str(name)
    }
}

/// One completed outer iteration, captured before the step was taken.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Iterate the direction was computed at.
    pub x: Vec<f64>,
    /// Objective vector at `x`.
    pub fx: Vec<f64>,
    /// Certified primal value `h(v)` of the accepted direction.
    pub h: f64,
    /// Best dual bound at this iterate.
    pub q: f64,
    /// Inexactness level realized by the certificate.
    pub achieved_sigma: f64,
    /// Accepted backtrack count.
    pub j: u32,
    /// Accepted step length.
    pub t: f64,
    /// `||x_{k+1} - x_k||`.
    pub step_norm: f64,
    /// `2 t beta_hat |<omega, J v>|`, the shrinking-distance slack.
    pub fejer_increment: f64,
    /// Running sum of the increments through this iteration.
    pub fejer_cumsum: f64,
}

/// Outcome of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub x_final: Vec<f64>,
    pub f_final: Vec<f64>,
    /// `|h|` from the last direction solve; near zero only at stationarity.
    pub stationarity_residual: f64,
    pub iterations: Vec<IterationRecord>,
}

/// Failures that abort a run (as opposed to statuses, which end it).
#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("starting point is {distance:.3e} away from the feasible set")]
    InfeasibleStart { distance: f64 },
    #[error("problem pieces disagree: {detail}")]
    ShapeMismatch { detail: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Runs the method from `x0` until a status is reached.
///
/// Starting points inside the set are used as given; points within
/// `1e-6` of it are projected with a warning; anything farther is an error.
pub fn solve(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    config.validate()?;
    check_shapes(cone, f, set, x0)?;
    let mut x = if set.contains(x0, FEASIBILITY_TOL)? {
        x0.to_vec()
    } else {
        let projected = set.project(x0)?;
        let distance = linalg::distance(x0, &projected);
        if distance > PROJECTION_SNAP_TOL {
            return Err(SolveError::InfeasibleStart { distance });
        }
        log::warn!(
            "starting point violates feasibility by {distance:.3e}; projected onto the set"
        );
        projected
    };
    let mut fx = f.eval(&x)?;
    let params = config.oracle_params();
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut fejer_cumsum = 0.0;
    for k in 0..config.max_iter {
        let jac = f.jacobian(&x)?;
        let outcome = oracle::solve_direction_with_jacobian(cone, set, &x, &jac, &params)?;
        let cert = match outcome {
            DirectionOutcome::Stationary { residual } => {
                return Ok(SolveResult {
                    status: SolveStatus::Stationary,
                    x_final: x,
                    f_final: fx,
                    stationarity_residual: residual.abs(),
                    iterations,
                });
            }
            DirectionOutcome::BudgetExceeded(cert) => {
                return Ok(SolveResult {
                    status: SolveStatus::OracleBudgetExceeded,
                    x_final: x,
                    f_final: fx,
                    stationarity_residual: cert.primal.abs(),
                    iterations,
                });
            }
            DirectionOutcome::Descent(cert) => cert,
        };
        let jv = jac.matvec(&cert.v);
        let step = match linesearch::armijo(
            cone,
            f,
            &x,
            &cert.v,
            &jv,
            config.delta,
            config.tau,
            config.max_backtracks,
            config.order_tol,
        ) {
            Ok(step) => step,
            Err(LineSearchError::BacktrackExhausted { .. }) => {
                return Ok(SolveResult {
                    status: SolveStatus::LineSearchFailure,
                    x_final: x,
                    f_final: fx,
                    stationarity_residual: cert.primal.abs(),
                    iterations,
                });
            }
            Err(LineSearchError::Eval(e)) => return Err(SolveError::Eval(e)),
            Err(LineSearchError::Cone(e)) => return Err(SolveError::Cone(e)),
            Err(LineSearchError::BadParameter { name, requirement }) => {
                return Err(SolveError::Config(ConfigError::OutOfRange { name, requirement }));
            }
        };
        let fejer_increment =
            2.0 * step.t * config.beta_hat * linalg::dot(&cert.omega, &jv).abs();
        fejer_cumsum += fejer_increment;
        iterations.push(IterationRecord {
            k,
            x: x.clone(),
            fx: fx.clone(),
            h: cert.primal,
            q: cert.dual,
            achieved_sigma: cert.achieved_sigma,
            j: step.j,
            t: step.t,
            step_norm: linalg::distance(&step.x_next, &x),
            fejer_increment,
            fejer_cumsum,
        });
        x = step.x_next;
        fx = step.f_next;
    }
    let stationarity_residual = iterations
        .last()
        .map(|rec| rec.h.abs())
        .unwrap_or(f64::INFINITY);
    Ok(SolveResult {
        status: SolveStatus::MaxIterations,
        x_final: x,
        f_final: fx,
        stationarity_residual,
        iterations,
    })
}

fn check_shapes(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x0: &[f64],
) -> Result<(), SolveError> {
    if f.m() != cone.dim() {
        return Err(SolveError::ShapeMismatch {
            detail: format!(
                "function has {} objectives but the cone orders dimension {}",
                f.m(),
                cone.dim()
            ),
        });
    }
    if f.n() != set.dim() {
        return Err(SolveError::ShapeMismatch {
            detail: format!(
                "function has {} variables but the set lives in dimension {}",
                f.n(),
                set.dim()
            ),
        });
    }
    if x0.len() != f.n() {
        return Err(SolveError::ShapeMismatch {
            detail: format!("x0 has length {} but the function expects {}", x0.len(), f.n()),
        });
    }
    Ok(())
}

/// Re-measures `|theta(x)|` at a point with the oracle in exact mode, ignoring
/// the configured sigma.
pub fn stationarity_residual(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x: &[f64],
    config: &SolverConfig,
) -> Result<f64, SolveError> {
    let params = OracleParams {
        sigma: 0.0,
        ..config.oracle_params()
    };
    let outcome = oracle::solve_direction(cone, f, set, x, &params)?;
    Ok(match outcome {
        DirectionOutcome::Stationary { residual } => residual.abs(),
        DirectionOutcome::Descent(cert) | DirectionOutcome::BudgetExceeded(cert) => {
            cert.primal.abs()
        }
    })
}

/// Audit report for the shrinking-distance inequality along a run.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerReport {
    /// Consecutive iterate pairs checked.
    pub pairs: usize,
    /// Largest value of `||x_{k+1}-x_hat||^2 - ||x_k-x_hat||^2 - delta_k`;
    /// at most the audit slack when the inequality holds.
    pub max_violation: f64,
    /// Total of the recorded increments.
    pub delta_sum: f64,
}

/// Audit failures.
#[derive(Debug, Error, PartialEq)]
pub enum FejerError {
    /// `x_hat`'s objective value does not sit below the whole recorded
    /// sequence, so the inequality is not expected to hold against it.
    #[error("reference point is not below the run: F(x_hat) does not precede F(x_{k}) in the order")]
    NotInT { k: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Checks `||x_{k+1} - x_hat||^2 <= ||x_k - x_hat||^2 + delta_k` over every
/// consecutive pair of recorded iterates, after verifying that `x_hat`
/// objective-dominates the run.
pub fn fejer_check(
    cone: &ConeOrder,
    f: &VectorFunction,
    trace: &[IterationRecord],
    x_hat: &[f64],
) -> Result<FejerReport, FejerError> {
    let f_hat = f.eval(x_hat)?;
    for rec in trace {
        if !cone.k_leq(&f_hat, &rec.fx, FEJER_CHECK_TOL)? {
            return Err(FejerError::NotInT { k: rec.k });
        }
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut pairs = 0;
    for pair in trace.windows(2) {
        let d_curr = linalg::distance(&pair[0].x, x_hat).powi(2);
        let d_next = linalg::distance(&pair[1].x, x_hat).powi(2);
        let violation = d_next - d_curr - pair[0].fejer_increment;
        if violation > max_violation {
            max_violation = violation;
        }
        pairs += 1;
    }
    if pairs == 0 {
        max_violation = 0.0;
    }
    let delta_sum = trace.iter().map(|rec| rec.fejer_increment).sum();
    Ok(FejerReport {
        pairs,
        max_violation,
        delta_sum,
    })
}

/// Shared audit slack, exposed for tests that want the same tolerance.
pub fn fejer_check_tol() -> f64 {
    FEJER_CHECK_TOL
}
