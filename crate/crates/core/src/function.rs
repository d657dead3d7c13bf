//! Vector-valued objective functions with exact Jacobians.
//!
//! A [`VectorFunction`] maps `R^n` to `R^m`. The usual construction parses one
//! expression per objective and differentiates it symbolically, caching the
//! `m x n` derivative trees. A native variant accepts closures for callers
//! that already have code for `F` and its Jacobian.

use crate::expr::{parse_expr, EvalError, Expr, ParseError};
use crate::linalg::Matrix;
use std::fmt;
use thiserror::Error;

/// Construction failures for [`VectorFunction`].
#[derive(Debug, Error, PartialEq)]
pub enum FunctionError {
    #[error("objective {index}: {source}")]
    Parse {
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("variable list is empty")]
    NoVariables,
    #[error("objective list is empty")]
    NoObjectives,
    #[error("duplicate variable name '{name}'")]
    DuplicateVariable { name: String },
    #[error("variable name '{name}' is not a valid identifier")]
    BadVariableName { name: String },
}

type NativeEval = dyn Fn(&[f64]) -> Result<Vec<f64>, EvalError> + Send + Sync;
type NativeJac = dyn Fn(&[f64]) -> Result<Matrix, EvalError> + Send + Sync;

enum Repr {
    Ast {
        variables: Vec<String>,
        components: Vec<Expr>,
        // Row i holds the n partial derivative trees of objective i.
        jacobian: Vec<Vec<Expr>>,
    },
    Native {
        eval: Box<NativeEval>,
        jac: Box<NativeJac>,
    },
}

/// Smooth map from `R^n` to `R^m` with an exact Jacobian.
pub struct VectorFunction {
    n: usize,
    m: usize,
    repr: Repr,
}

impl fmt::Debug for VectorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.repr {
            Repr::Ast { .. } => "ast",
            Repr::Native { .. } => "native",
        };
        write!(f, "VectorFunction({} -> {}, {kind})", self.n, self.m)
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VectorFunction {
    /// Parses one expression per objective over the named variables and
    /// differentiates each with respect to each variable.
    pub fn from_expressions(
        variables: &[String],
        objectives: &[String],
    ) -> Result<Self, FunctionError> {
        if variables.is_empty() {
            return Err(FunctionError::NoVariables);
        }
        if objectives.is_empty() {
            return Err(FunctionError::NoObjectives);
        }
        for (i, name) in variables.iter().enumerate() {
            if !is_identifier(name) {
                return Err(FunctionError::BadVariableName { name: name.clone() });
            }
            if variables[..i].contains(name) {
                return Err(FunctionError::DuplicateVariable { name: name.clone() });
            }
        }
        let mut components = Vec::with_capacity(objectives.len());
        for (index, text) in objectives.iter().enumerate() {
            let ast = parse_expr(text, variables)
                .map_err(|source| FunctionError::Parse { index, source })?;
            components.push(ast);
        }
        let jacobian = components
            .iter()
            .map(|c| (0..variables.len()).map(|v| c.differentiate(v)).collect())
            .collect();
        Ok(VectorFunction {
            n: variables.len(),
            m: objectives.len(),
            repr: Repr::Ast {
                variables: variables.to_vec(),
                components,
                jacobian,
            },
        })
    }

    /// Wraps native `F` and Jacobian callbacks. The callbacks must be pure;
    /// results are checked for finiteness and shape on every call.
    pub fn native<E, J>(n: usize, m: usize, eval: E, jac: J) -> Self
    where
        E: Fn(&[f64]) -> Result<Vec<f64>, EvalError> + Send + Sync + 'static,
        J: Fn(&[f64]) -> Result<Matrix, EvalError> + Send + Sync + 'static,
    {
        VectorFunction {
            n,
            m,
            repr: Repr::Native {
                eval: Box::new(eval),
                jac: Box::new(jac),
            },
        }
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of objectives.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Variable names for parsed functions (`x0..` placeholders otherwise).
    pub fn variable_names(&self) -> Vec<String> {
        match &self.repr {
            Repr::Ast { variables, .. } => variables.clone(),
            Repr::Native { .. } => (0..self.n).map(|i| format!("x{i}")).collect(),
        }
    }

    /// Objective expressions rendered back to text, when available.
    pub fn objective_texts(&self) -> Option<Vec<String>> {
        match &self.repr {
            Repr::Ast {
                variables,
                components,
                ..
            } => Some(components.iter().map(|c| c.pretty(variables)).collect()),
            Repr::Native { .. } => None,
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<(), EvalError> {
        if x.len() != self.n {
            return Err(EvalError::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates `F(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.check_arity(x)?;
        let out = match &self.repr {
            Repr::Ast { components, .. } => components
                .iter()
                .map(|c| c.eval(x))
                .collect::<Result<Vec<f64>, EvalError>>()?,
            Repr::Native { eval, .. } => {
                let v = eval(x)?;
                assert_eq!(v.len(), self.m, "native eval returned wrong length");
                v
            }
        };
        if out.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::NonFinite);
        }
        Ok(out)
    }

    /// Evaluates the `m x n` Jacobian at `x`.
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix, EvalError> {
        self.check_arity(x)?;
        let out = match &self.repr {
            Repr::Ast { jacobian, .. } => {
                let mut j = Matrix::zeros(self.m, self.n);
                for (r, row) in jacobian.iter().enumerate() {
                    for (c, d) in row.iter().enumerate() {
                        j.set(r, c, d.eval(x)?);
                    }
                }
                j
            }
            Repr::Native { jac, .. } => {
                let j = jac(x)?;
                assert_eq!(
                    (j.rows(), j.cols()),
                    (self.m, self.n),
                    "native jacobian returned wrong shape"
                );
                j
            }
        };
        if !out.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(out)
    }
}
