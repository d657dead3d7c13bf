//! Backtracking line search in the cone order.
//!
//! A trial step `t = tau^{-j}` is accepted once the objective vector satisfies
//! `F(x + t v) <= F(x) + delta * t * J v` in the cone order, the vector analog
//! of the scalar Armijo inequality. Accepting in the order means every dual
//! generator agrees the decrease is sufficient, so the accepted step shrinks
//! all scalarizations `<w_i, F>` at once.

use crate::cone::{ConeError, ConeOrder};
use crate::expr::EvalError;
use crate::function::VectorFunction;
use crate::linalg;
use thiserror::Error;

/// Failures of the line search.
#[derive(Debug, Error, PartialEq)]
pub enum LineSearchError {
    #[error("no step accepted within {max_backtracks} backtracks")]
    BacktrackExhausted { max_backtracks: u32 },
    #[error("parameter {name} out of range: {requirement}")]
    BadParameter {
        name: &'static str,
        requirement: &'static str,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// An accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmijoResult {
    /// Smallest backtrack count whose step was accepted.
    pub j: u32,
    /// The step length `tau^{-j}`.
    pub t: f64,
    /// Objective evaluations spent (`j + 1`).
    pub trials: u32,
    /// `x + t v`.
    pub x_next: Vec<f64>,
    /// `F(x_next)`, reusable by the caller.
    pub f_next: Vec<f64>,
}

/// Finds the smallest `j >= 0` whose step `tau^{-j}` along `v` satisfies the
/// cone-order Armijo condition. `jv` is the directional derivative vector
/// `J_F(x) v`, supplied by the caller who already has the Jacobian.
pub fn armijo(
    cone: &ConeOrder,
    f: &VectorFunction,
    x: &[f64],
    v: &[f64],
    jv: &[f64],
    delta: f64,
    tau: f64,
    max_backtracks: u32,
    order_tol: f64,
) -> Result<ArmijoResult, LineSearchError> {
    if !(delta.is_finite() && 0.0 < delta && delta < 1.0) {
        return Err(LineSearchError::BadParameter {
            name: "delta",
            requirement: "in (0, 1)",
        });
    }
    if !(tau.is_finite() && tau > 1.0) {
        return Err(LineSearchError::BadParameter {
            name: "tau",
            requirement: "> 1",
        });
    }
    let fx = f.eval(x)?;
    for j in 0..=max_backtracks {
        let t = tau.powi(-(j as i32));
        let x_trial = linalg::add_scaled(x, t, v);
        let f_trial = f.eval(&x_trial)?;
        let bound = linalg::add_scaled(&fx, delta * t, jv);
        if cone.k_leq(&f_trial, &bound, order_tol)? {
            return Ok(ArmijoResult {
                j,
                t,
                trials: j + 1,
                x_next: x_trial,
                f_next: f_trial,
            });
        }
    }
    Err(LineSearchError::BacktrackExhausted { max_backtracks })
}
