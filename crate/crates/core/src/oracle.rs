//! Descent direction oracle with verifiable inexactness certificates.
//!
//! At a point `x` the ideal direction minimizes the regularized worst-case
//! linearization `h(v) = beta_hat * phi(J v) + ||v||^2 / 2` over the shifted
//! feasible set `C - x`; its optimal value `theta(x)` is zero exactly at
//! stationary points and negative elsewhere. Instead of solving that model to
//! optimality, the oracle maximizes the concave dual
//!
//! `q(lambda) = <g, v(lambda)> + ||v(lambda)||^2 / 2`,
//! `g = beta_hat * J^T omega(lambda)`, `v(lambda) = P_{C-x}(-g)`,
//!
//! over simplex weights `lambda` on the dual generators by Frank-Wolfe. Every
//! weight vector yields both a feasible candidate `v(lambda)` with primal
//! value `h(v(lambda))` and a lower bound `q(lambda) <= theta(x)`, so the pair
//! of running bests brackets `theta(x)` and certifies either approximate
//! stationarity or a direction with `h <= (1 - sigma) * theta(x)`.

use crate::cone::{ConeError, ConeOrder};
use crate::expr::EvalError;
use crate::function::VectorFunction;
use crate::fw;
use crate::linalg::{self, Matrix};
use crate::set::{FeasibleSet, SetError};
use thiserror::Error;

/// Weight-vector tolerance for `dual_value` inputs.
const WEIGHT_TOL: f64 = 1e-10;

/// Failures of the direction oracle.
#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("direction is infeasible: {0}")]
    InfeasibleDirection(&'static str),
    #[error("weights must lie on the unit simplex ({0})")]
    InvalidWeights(&'static str),
    #[error("parameter {name} out of range: {requirement}")]
    BadParameter {
        name: &'static str,
        requirement: &'static str,
    },
    #[error("brute-force oracle limited to 3 generators and 2 variables, got p={p}, n={n}")]
    ScaleTooLarge { p: usize, n: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Evidence attached to a direction: the dual weights that produced it, the
/// realized dual vector, and the primal/dual value pair bracketing `theta(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCertificate {
    /// Simplex weights over the dual generators.
    pub weights: Vec<f64>,
    /// `omega = sum_i weights_i * w_i`.
    pub omega: Vec<f64>,
    /// The candidate direction `v = P_{C-x}(-beta_hat * J^T omega)`.
    pub v: Vec<f64>,
    /// `h(v)`, an upper bound on `theta(x)`.
    pub primal: f64,
    /// Best dual value seen, a lower bound on `theta(x)`.
    pub dual: f64,
    /// Certified inexactness level `1 - primal/dual` when `dual < 0`, else 0.
    /// The direction is valid for any requested sigma at or above this.
    pub achieved_sigma: f64,
}

/// What the oracle concluded at `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionOutcome {
    /// Both bounds are within `eps_stat` of zero; `residual` is the best
    /// primal value found.
    Stationary { residual: f64 },
    /// A certified descent direction.
    Descent(DirectionCertificate),
    /// The iteration budget ran out before any test passed; carries the best
    /// (uncertified) bounds found.
    BudgetExceeded(DirectionCertificate),
}

/// Tuning for [`solve_direction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    /// Scaling of the linear model term; larger values take bolder steps.
    pub beta_hat: f64,
    /// Requested inexactness in `[0, 1)`; `0` demands the exact direction.
    pub sigma: f64,
    /// Stationarity threshold on `max(|primal|, |dual|)`.
    pub eps_stat: f64,
    /// Frank-Wolfe evaluation budget.
    pub fw_max_iters: usize,
    /// Relative duality gap accepted in exact mode.
    pub fw_gap_tol: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            beta_hat: 1.0,
            sigma: 0.1,
            eps_stat: 1e-8,
            fw_max_iters: 200,
            fw_gap_tol: 1e-10,
        }
    }
}

impl OracleParams {
    fn validate(&self) -> Result<(), OracleError> {
        if !(self.beta_hat.is_finite() && self.beta_hat > 0.0) {
            return Err(OracleError::BadParameter {
                name: "beta_hat",
                requirement: "finite and > 0",
            });
        }
        if !(0.0..1.0).contains(&self.sigma) {
            return Err(OracleError::BadParameter {
                name: "sigma",
                requirement: "in [0, 1)",
            });
        }
        if !(self.eps_stat.is_finite() && self.eps_stat >= 0.0) {
            return Err(OracleError::BadParameter {
                name: "eps_stat",
                requirement: "finite and >= 0",
            });
        }
        if self.fw_max_iters == 0 {
            return Err(OracleError::BadParameter {
                name: "fw_max_iters",
                requirement: ">= 1",
            });
        }
        if !(self.fw_gap_tol.is_finite() && self.fw_gap_tol > 0.0) {
            return Err(OracleError::BadParameter {
                name: "fw_gap_tol",
                requirement: "finite and > 0",
            });
        }
        Ok(())
    }
}

/// `h(v) = beta_hat * phi(J_F(x) v) + ||v||^2 / 2` for a feasible candidate
/// direction (`x` and `x + v` both in the set within tolerance).
pub fn h_value(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x: &[f64],
    v: &[f64],
    beta_hat: f64,
) -> Result<f64, OracleError> {
    if !set.contains(x, crate::set::FEASIBILITY_TOL)? {
        return Err(OracleError::InfeasibleDirection("base point not in the set"));
    }
    let trial = linalg::add_scaled(x, 1.0, v);
    if !set.contains(&trial, crate::set::FEASIBILITY_TOL)? {
        return Err(OracleError::InfeasibleDirection("x + v leaves the set"));
    }
    let j = f.jacobian(x)?;
    let jv = j.matvec(v);
    Ok(beta_hat * cone.phi(&jv)? + 0.5 * linalg::norm_sq(v))
}

fn combine_generators(cone: &ConeOrder, lambda: &[f64]) -> Vec<f64> {
    let mut omega = vec![0.0; cone.dim()];
    for (l, w) in lambda.iter().zip(cone.generators()) {
        for (o, wi) in omega.iter_mut().zip(w) {
            *o += l * wi;
        }
    }
    omega
}

struct DualPoint {
    q: f64,
    omega: Vec<f64>,
    v: Vec<f64>,
    jv: Vec<f64>,
    h: f64,
}

fn eval_dual_point(
    cone: &ConeOrder,
    set: &FeasibleSet,
    x: &[f64],
    j: &Matrix,
    lambda: &[f64],
    beta_hat: f64,
) -> Result<DualPoint, OracleError> {
    let omega = combine_generators(cone, lambda);
    let mut g = j.tvec(&omega);
    for gi in g.iter_mut() {
        *gi *= beta_hat;
    }
    let neg_g: Vec<f64> = g.iter().map(|gi| -gi).collect();
    let v = set.project_shifted(x, &neg_g)?;
    let q = linalg::dot(&g, &v) + 0.5 * linalg::norm_sq(&v);
    let jv = j.matvec(&v);
    let h = beta_hat * cone.phi_unchecked(&jv) + 0.5 * linalg::norm_sq(&v);
    Ok(DualPoint { q, omega, v, jv, h })
}

/// Dual value at explicit simplex weights: returns `(q(lambda), v(lambda))`.
pub fn dual_value(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x: &[f64],
    lambda: &[f64],
    beta_hat: f64,
) -> Result<(f64, Vec<f64>), OracleError> {
    if lambda.len() != cone.generator_count() {
        return Err(OracleError::InvalidWeights("wrong length"));
    }
    if lambda.iter().any(|l| *l < -WEIGHT_TOL) {
        return Err(OracleError::InvalidWeights("negative entry"));
    }
    if (lambda.iter().sum::<f64>() - 1.0).abs() > WEIGHT_TOL {
        return Err(OracleError::InvalidWeights("entries do not sum to 1"));
    }
    let j = f.jacobian(x)?;
    let point = eval_dual_point(cone, set, x, &j, lambda, beta_hat)?;
    Ok((point.q, point.v))
}

/// Runs the dual Frank-Wolfe loop at `x` using a precomputed Jacobian.
///
/// Per weight iterate the oracle updates the best primal (with its weight
/// vector, dual vector, and direction) and the best dual bound, then checks in
/// order: stationarity of both bounds, the sigma certificate
/// `h_best <= (1 - sigma) * q_best` (sound because `q_best <= theta(x) <= 0`),
/// and in exact mode the relative duality gap. Weights step toward the
/// supergradient-best vertex with the open-loop rate `2 / (iter + 2)`.
pub fn solve_direction_with_jacobian(
    cone: &ConeOrder,
    set: &FeasibleSet,
    x: &[f64],
    j: &Matrix,
    params: &OracleParams,
) -> Result<DirectionOutcome, OracleError> {
    params.validate()?;
    let p = cone.generator_count();
    let mut lambda = fw::uniform_weights(p);
    let mut best_primal: Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut best_dual = f64::NEG_INFINITY;
    for iter in 0..params.fw_max_iters {
        let point = eval_dual_point(cone, set, x, j, &lambda, params.beta_hat)?;
        if point.q > best_dual {
            best_dual = point.q;
        }
        let replace = best_primal.as_ref().map_or(true, |(h, ..)| point.h < *h);
        if replace {
            best_primal = Some((point.h, lambda.clone(), point.omega.clone(), point.v.clone()));
        }
        let h_best = best_primal.as_ref().map(|(h, ..)| *h).unwrap();
        if h_best.abs().max(best_dual.abs()) <= params.eps_stat {
            return Ok(DirectionOutcome::Stationary { residual: h_best });
        }
        if params.sigma > 0.0 && h_best <= (1.0 - params.sigma) * best_dual {
            return Ok(DirectionOutcome::Descent(make_certificate(
                &best_primal,
                best_dual,
            )));
        }
        if params.sigma == 0.0
            && h_best - best_dual <= params.fw_gap_tol * f64::max(1.0, best_dual.abs())
        {
            return Ok(DirectionOutcome::Descent(make_certificate(
                &best_primal,
                best_dual,
            )));
        }
        // Supergradient of q in weight space is beta_hat * <w_i, J v(lambda)>.
        let scores: Vec<f64> = cone
            .generators()
            .iter()
            .map(|w| params.beta_hat * linalg::dot(w, &point.jv))
            .collect();
        let idx = fw::best_vertex(&scores);
        let gamma = 2.0 / (iter as f64 + 2.0);
        fw::step_toward_vertex(&mut lambda, idx, gamma);
    }
    Ok(DirectionOutcome::BudgetExceeded(make_certificate(
        &best_primal,
        best_dual,
    )))
}

fn make_certificate(
    best_primal: &Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)>,
    best_dual: f64,
) -> DirectionCertificate {
    let (primal, weights, omega, v) = best_primal
        .as_ref()
        .cloned()
        .expect("at least one dual point evaluated");
    let achieved_sigma = if best_dual < 0.0 {
        (1.0 - primal / best_dual).max(0.0)
    } else {
        0.0
    };
    DirectionCertificate {
        weights,
        omega,
        v,
        primal,
        dual: best_dual,
        achieved_sigma,
    }
}

/// As [`solve_direction_with_jacobian`], evaluating the Jacobian internally.
pub fn solve_direction(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x: &[f64],
    params: &OracleParams,
) -> Result<DirectionOutcome, OracleError> {
    let j = f.jacobian(x)?;
    solve_direction_with_jacobian(cone, set, x, &j, params)
}

/// Grid estimate of `theta(x)`, independent of the dual machinery above.
///
/// Scans a dense tensor grid of feasible directions (always including `v = 0`)
/// for the primal minimum, and a dense weight grid for the dual maximum, then
/// checks the weak-duality bracket `q_max <= h_min` before returning `h_min`.
/// Deliberately brute force, so it only accepts up to 3 generators and 2
/// variables.
pub fn theta_bruteforce(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x: &[f64],
    beta_hat: f64,
    lambda_steps: usize,
    v_steps: usize,
) -> Result<f64, OracleError> {
    let p = cone.generator_count();
    let n = f.n();
    if p > 3 || n > 2 {
        return Err(OracleError::ScaleTooLarge { p, n });
    }
    if lambda_steps < 2 || v_steps < 2 {
        return Err(OracleError::BadParameter {
            name: "grid steps",
            requirement: ">= 2",
        });
    }
    let j = f.jacobian(x)?;
    // Any optimal direction satisfies ||v|| <= beta_hat * max_i ||J^T w_i||,
    // because projections onto sets containing the origin are norm-contractive.
    let radius = cone
        .generators()
        .iter()
        .map(|w| linalg::norm(&j.tvec(w)))
        .fold(0.0, f64::max)
        * beta_hat
        + 1e-6;
    let (lo, hi) = direction_bounds(set, x, radius);
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut axis: Vec<f64> = (0..v_steps)
            .map(|k| lo[i] + (hi[i] - lo[i]) * k as f64 / (v_steps - 1) as f64)
            .collect();
        axis.push(0.0);
        axes.push(axis);
    }
    let mut h_min = f64::INFINITY;
    let mut scan = |v: &[f64]| -> Result<(), OracleError> {
        let trial = linalg::add_scaled(x, 1.0, v);
        if !set.contains(&trial, crate::set::FEASIBILITY_TOL)? {
            return Ok(());
        }
        let jv = j.matvec(v);
        let h = beta_hat * cone.phi_unchecked(&jv) + 0.5 * linalg::norm_sq(v);
        if h < h_min {
            h_min = h;
        }
        Ok(())
    };
    match n {
        1 => {
            for a in &axes[0] {
                scan(&[*a])?;
            }
        }
        2 => {
            for a in &axes[0] {
                for b in &axes[1] {
                    scan(&[*a, *b])?;
                }
            }
        }
        _ => unreachable!("n validated above"),
    }
    let mut q_max = f64::NEG_INFINITY;
    for lambda in weight_grid(p, lambda_steps) {
        let point = eval_dual_point(cone, set, x, &j, &lambda, beta_hat)?;
        if point.q > q_max {
            q_max = point.q;
        }
    }
    assert!(
        q_max <= h_min + 1e-9,
        "weak duality violated by the grids: q_max={q_max}, h_min={h_min}"
    );
    Ok(h_min)
}

fn direction_bounds(set: &FeasibleSet, x: &[f64], radius: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut lo = vec![-radius; n];
    let mut hi = vec![radius; n];
    match set {
        FeasibleSet::WholeSpace { .. } => {}
        FeasibleSet::Box { lower, upper } => {
            for i in 0..n {
                lo[i] = lo[i].max(lower[i] - x[i]);
                hi[i] = hi[i].min(upper[i] - x[i]);
            }
        }
        FeasibleSet::Ball { center, radius: r } => {
            for i in 0..n {
                lo[i] = lo[i].max(center[i] - r - x[i]);
                hi[i] = hi[i].min(center[i] + r - x[i]);
            }
        }
        FeasibleSet::Simplex { scale, .. } => {
            for i in 0..n {
                lo[i] = lo[i].max(-x[i]);
                hi[i] = hi[i].min(scale - x[i]);
            }
        }
    }
    // The shifted set always contains the origin, so the ranges do too.
    for i in 0..n {
        lo[i] = lo[i].min(0.0);
        hi[i] = hi[i].max(0.0);
    }
    (lo, hi)
}

fn weight_grid(p: usize, steps: usize) -> Vec<Vec<f64>> {
    let ticks = |k: usize| k as f64 / (steps - 1) as f64;
    match p {
        1 => vec![vec![1.0]],
        2 => (0..steps).map(|k| vec![ticks(k), 1.0 - ticks(k)]).collect(),
        3 => {
            let mut grid = Vec::new();
            for a in 0..steps {
                for b in 0..steps - a {
                    let (x, y) = (ticks(a), ticks(b));
                    grid.push(vec![x, y, 1.0 - x - y]);
                }
            }
            grid
        }
        _ => unreachable!("p validated by caller"),
    }
}
