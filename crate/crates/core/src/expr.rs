//! Scalar expression trees: evaluation, symbolic differentiation, printing.
//!
//! Objectives are given as closed-form expressions over named variables. They
//! are parsed once into [`Expr`] trees; derivatives are taken symbolically at
//! construction time so the solver evaluates exact Jacobians, not finite
//! differences.

mod parse;

pub use parse::{parse_expr, ParseError};

use thiserror::Error;

/// Evaluation failures. Domain violations are reported where they happen;
/// anything that silently produced an infinity or NaN is caught at the root.
#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("evaluation produced a non-finite value")]
    NonFinite,
    #[error("variable index {index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("expected {expected} variables, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Exponent of a power node. Integer exponents are valid for any base;
/// non-integer exponents require a positive base at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i32),
    Real(f64),
}

/// Built-in single-argument functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree over variables addressed by index.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates at `x`, checking domains and final finiteness.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let v = self.eval_inner(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_inner(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Constant(c) => *c,
            Expr::Variable(i) => {
                *x.get(*i).ok_or(EvalError::VariableOutOfRange {
                    index: *i,
                    arity: x.len(),
                })?
            }
            Expr::Add(a, b) => a.eval_inner(x)? + b.eval_inner(x)?,
            Expr::Sub(a, b) => a.eval_inner(x)? - b.eval_inner(x)?,
            Expr::Mul(a, b) => a.eval_inner(x)? * b.eval_inner(x)?,
            Expr::Div(a, b) => {
                let den = b.eval_inner(x)?;
                if den == 0.0 {
                    return Err(EvalError::Domain("division by zero"));
                }
                a.eval_inner(x)? / den
            }
            Expr::Neg(a) => -a.eval_inner(x)?,
            Expr::Pow(base, exp) => {
                let b = base.eval_inner(x)?;
                match exp {
                    Exponent::Int(k) => {
                        if b == 0.0 && *k < 0 {
                            return Err(EvalError::Domain("zero base with negative exponent"));
                        }
                        b.powi(*k)
                    }
                    Exponent::Real(a) => {
                        if b <= 0.0 {
                            return Err(EvalError::Domain(
                                "non-integer power needs a positive base",
                            ));
                        }
                        b.powf(*a)
                    }
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval_inner(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(EvalError::Domain("log of a non-positive value"));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::Domain("sqrt of a negative value"));
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }

    /// Partial derivative with respect to variable `var`, as a new tree.
    /// Simplifications are local (zero/one elimination, constant folding), so
    /// derivatives stay compact without rewriting the whole tree.
    pub fn differentiate(&self, var: usize) -> Expr {
        match self {
            Expr::Constant(_) => Expr::Constant(0.0),
            Expr::Variable(i) => Expr::Constant(if *i == var { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => add(a.differentiate(var), b.differentiate(var)),
            Expr::Sub(a, b) => sub(a.differentiate(var), b.differentiate(var)),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(var), (**b).clone()),
                mul((**a).clone(), b.differentiate(var)),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = (a'b - ab') / b^2
                let num = sub(
                    mul(a.differentiate(var), (**b).clone()),
                    mul((**a).clone(), b.differentiate(var)),
                );
                div(num, pow((**b).clone(), Exponent::Int(2)))
            }
            Expr::Neg(a) => neg(a.differentiate(var)),
            Expr::Pow(base, exp) => {
                let db = base.differentiate(var);
                match exp {
                    Exponent::Int(0) => Expr::Constant(0.0),
                    Exponent::Int(k) => mul(
                        mul(Expr::Constant(*k as f64), pow((**base).clone(), Exponent::Int(k - 1))),
                        db,
                    ),
                    Exponent::Real(a) => mul(
                        mul(
                            Expr::Constant(*a),
                            pow((**base).clone(), Exponent::Real(a - 1.0)),
                        ),
                        db,
                    ),
                }
            }
            Expr::Call(f, a) => {
                let da = a.differentiate(var);
                let outer = match f {
                    Func::Sin => Expr::Call(Func::Cos, a.clone()),
                    Func::Cos => neg(Expr::Call(Func::Sin, a.clone())),
                    Func::Exp => Expr::Call(Func::Exp, a.clone()),
                    Func::Log => {
                        return div(da, (**a).clone());
                    }
                    Func::Sqrt => {
                        return div(
                            da,
                            mul(Expr::Constant(2.0), Expr::Call(Func::Sqrt, a.clone())),
                        );
                    }
                };
                mul(outer, da)
            }
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        match self {
            Expr::Constant(_) => None,
            Expr::Variable(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_variable(), b.max_variable()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_variable(),
        }
    }

    /// Renders the tree with the given variable names, parenthesized so the
    /// output reparses to an equivalent expression.
    pub fn pretty(&self, variables: &[String]) -> String {
        self.pretty_prec(variables, 0)
    }

    // Precedence levels: 1 additive, 2 multiplicative, 3 unary minus, 4 power.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Constant(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }

    fn pretty_prec(&self, vars: &[String], parent: u8) -> String {
        let own = self.precedence();
        let body = match self {
            Expr::Constant(c) => format!("{c}"),
            Expr::Variable(i) => vars
                .get(*i)
                .cloned()
                .unwrap_or_else(|| format!("x{i}")),
            Expr::Add(a, b) => format!(
                "{} + {}",
                a.pretty_prec(vars, 1),
                b.pretty_prec(vars, 2)
            ),
            Expr::Sub(a, b) => format!(
                "{} - {}",
                a.pretty_prec(vars, 1),
                b.pretty_prec(vars, 2)
            ),
            Expr::Mul(a, b) => format!(
                "{} * {}",
                a.pretty_prec(vars, 2),
                b.pretty_prec(vars, 3)
            ),
            Expr::Div(a, b) => format!(
                "{} / {}",
                a.pretty_prec(vars, 2),
                b.pretty_prec(vars, 3)
            ),
            Expr::Neg(a) => format!("-{}", a.pretty_prec(vars, 3)),
            Expr::Pow(base, exp) => {
                // Bases are parenthesized down to atoms so the caret always
                // reads as applying to the printed base alone.
                let b = base.pretty_prec(vars, 5);
                match exp {
                    Exponent::Int(k) if *k < 0 => format!("{b}^({k})"),
                    Exponent::Int(k) => format!("{b}^{k}"),
                    Exponent::Real(a) if *a < 0.0 => format!("{b}^({a})"),
                    Exponent::Real(a) => format!("{b}^{a}"),
                }
            }
            Expr::Call(f, a) => format!("{}({})", f.name(), a.pretty_prec(vars, 0)),
        };
        if own < parent {
            format!("({body})")
        } else {
            body
        }
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Constant(c) if *c == v)
}

fn const_of(e: &Expr) -> Option<f64> {
    match e {
        Expr::Constant(c) => Some(*c),
        _ => None,
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if let (Some(x), Some(y)) = (const_of(&a), const_of(&b)) {
        return Expr::Constant(x + y);
    }
    Expr::Add(Box::new(a), Box::new(b))
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return neg(b);
    }
    if let (Some(x), Some(y)) = (const_of(&a), const_of(&b)) {
        return Expr::Constant(x - y);
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Expr::Constant(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    if let (Some(x), Some(y)) = (const_of(&a), const_of(&b)) {
        return Expr::Constant(x * y);
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) && !is_const(&b, 0.0) {
        return Expr::Constant(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn neg(a: Expr) -> Expr {
    if let Some(x) = const_of(&a) {
        return Expr::Constant(-x);
    }
    if let Expr::Neg(inner) = a {
        return *inner;
    }
    Expr::Neg(Box::new(a))
}

fn pow(base: Expr, exp: Exponent) -> Expr {
    match exp {
        Exponent::Int(0) => Expr::Constant(1.0),
        Exponent::Int(1) => base,
        Exponent::Real(a) if a == 1.0 => base,
        _ => {
            if let Some(b) = const_of(&base) {
                if let Exponent::Int(k) = exp {
                    return Expr::Constant(b.powi(k));
                }
            }
            Expr::Pow(Box::new(base), exp)
        }
    }
}
