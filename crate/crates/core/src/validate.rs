//! Independent checks that do not share machinery with the solver.
//!
//! These deliberately use sampling and finite differences rather than the
//! oracle or the symbolic Jacobian, so a bug in the main path cannot hide
//! behind itself.

use crate::cone::{ConeError, ConeOrder};
use crate::expr::EvalError;
use crate::function::VectorFunction;
use crate::linalg::{self, Matrix};
use crate::set::{FeasibleSet, SetError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use thiserror::Error;

/// Failures of the validation helpers.
#[derive(Debug, Error, PartialEq)]
pub enum ValidateError {
    #[error("grid check supports 1 or 2 variables, got {n}")]
    UnsupportedDimension { n: usize },
    #[error("grid specification invalid: {0}")]
    BadGrid(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Draws a point of the set. Unbounded coordinates use a zero-centered
/// Gaussian with standard deviation 10.
pub fn sample_feasible(set: &FeasibleSet, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let wide = |rng: &mut ChaCha8Rng| 10.0 * rng.sample::<f64, _>(StandardNormal);
    match set {
        FeasibleSet::WholeSpace { dim } => (0..*dim).map(|_| wide(rng)).collect(),
        FeasibleSet::Box { lower, upper } => lower
            .iter()
            .zip(upper)
            .map(|(&lo, &hi)| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => {
                    if lo == hi {
                        lo
                    } else {
                        rng.gen_range(lo..hi)
                    }
                }
                (true, false) => lo + wide(rng).abs(),
                (false, true) => hi - wide(rng).abs(),
                (false, false) => wide(rng),
            })
            .collect(),
        FeasibleSet::Ball { center, radius } => {
            let n = center.len();
            let mut dir: Vec<f64>;
            loop {
                dir = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let len = linalg::norm(&dir);
                if len > 1e-12 {
                    for d in dir.iter_mut() {
                        *d /= len;
                    }
                    break;
                }
            }
            let r = radius * rng.gen::<f64>().powf(1.0 / n as f64);
            center
                .iter()
                .zip(&dir)
                .map(|(c, d)| c + r * d)
                .collect()
        }
        FeasibleSet::Simplex { dim, scale } => {
            // Normalized unit-rate exponentials are uniform on the simplex
            // face; this samples the face where the constraint is active.
            let raw: Vec<f64> = (0..*dim)
                .map(|_| rng.sample::<f64, _>(Exp1).max(1e-300))
                .collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|e| scale * e / total).collect()
        }
    }
}

/// Looks for a feasible direction of strict simultaneous descent by sampling.
///
/// Returns `false` as soon as some sampled point `c` gives
/// `J_F(x) (c - x)` interior to the negative of the cone at margin
/// `strict_tol`, and `true` if no sample does. A `true` answer is evidence of
/// stationarity, not proof.
pub fn sampled_stationarity(
    cone: &ConeOrder,
    f: &VectorFunction,
    set: &FeasibleSet,
    x: &[f64],
    samples: usize,
    seed: u64,
    strict_tol: f64,
) -> Result<bool, ValidateError> {
    let jac = f.jacobian(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let c = sample_feasible(set, &mut rng);
        let v = linalg::sub(&c, x);
        let jv = jac.matvec(&v);
        if cone.in_minus_int_k(&jv, strict_tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A rectangular evaluation grid for [`quasiconvexity_grid_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub steps: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, steps: Vec<usize>) -> Result<Self, ValidateError> {
        if lo.len() != hi.len() || lo.len() != steps.len() {
            return Err(ValidateError::BadGrid("axis count mismatch"));
        }
        if lo.is_empty() {
            return Err(ValidateError::BadGrid("empty grid"));
        }
        if steps.iter().any(|s| *s < 3) {
            return Err(ValidateError::BadGrid("each axis needs at least 3 steps"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(ValidateError::BadGrid("bounds must be finite with lo < hi"));
        }
        Ok(Grid { lo, hi, steps })
    }

    fn axis(&self, i: usize) -> Vec<f64> {
        let n = self.steps[i];
        (0..n)
            .map(|k| self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Tests the scalarization `x -> <d, F(x)>` for quasiconvexity on a grid.
///
/// A function of one variable is quasiconvex exactly when no point sits
/// strictly above values found on both its sides; in two variables the same
/// test runs along every row, column, and diagonal of the grid, which checks
/// restriction to those lines (a necessary condition).
pub fn quasiconvexity_grid_check(
    f: &VectorFunction,
    d: &[f64],
    grid: &Grid,
    tol: f64,
) -> Result<bool, ValidateError> {
    let n = f.n();
    if grid.lo.len() != n {
        return Err(ValidateError::BadGrid("grid dimension differs from the function"));
    }
    let scalar = |x: &[f64]| -> Result<f64, ValidateError> {
        let fx = f.eval(x)?;
        Ok(linalg::dot(d, &fx))
    };
    match n {
        1 => {
            let vals = grid
                .axis(0)
                .iter()
                .map(|&t| scalar(&[t]))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(line_is_quasiconvex(&vals, tol))
        }
        2 => {
            let xs = grid.axis(0);
            let ys = grid.axis(1);
            let mut table = vec![vec![0.0; ys.len()]; xs.len()];
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    table[i][j] = scalar(&[x, y])?;
                }
            }
            for row in &table {
                if !line_is_quasiconvex(row, tol) {
                    return Ok(false);
                }
            }
            for j in 0..ys.len() {
                let col: Vec<f64> = (0..xs.len()).map(|i| table[i][j]).collect();
                if !line_is_quasiconvex(&col, tol) {
                    return Ok(false);
                }
            }
            for line in diagonals(&table) {
                if !line_is_quasiconvex(&line, tol) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        n => Err(ValidateError::UnsupportedDimension { n }),
    }
}

/// No interior point may rise above the running minima approaching from both
/// ends.
fn line_is_quasiconvex(vals: &[f64], tol: f64) -> bool {
    let len = vals.len();
    if len < 3 {
        return true;
    }
    let mut prefix_min = vec![f64::INFINITY; len];
    let mut acc = f64::INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        prefix_min[i] = acc;
        acc = acc.min(v);
    }
    let mut suffix_min = vec![f64::INFINITY; len];
    acc = f64::INFINITY;
    for (i, &v) in vals.iter().enumerate().rev() {
        suffix_min[i] = acc;
        acc = acc.min(v);
    }
    for i in 1..len - 1 {
        if vals[i] > prefix_min[i].max(suffix_min[i]) + tol {
            return false;
        }
    }
    true
}

fn diagonals(table: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = table.len();
    let cols = table[0].len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    // Down-right diagonals, indexed by their starting offset.
    for start in 0..rows {
        out.push((0..).map_while(|k| table.get(start + k).and_then(|r| r.get(k)).copied()).collect());
    }
    for start in 1..cols {
        out.push((0..).map_while(|k| table.get(k).and_then(|r| r.get(start + k)).copied()).collect());
    }
    // Down-left diagonals.
    for start in 0..cols {
        out.push(
            (0..)
                .map_while(|k| {
                    start
                        .checked_sub(k)
                        .and_then(|c| table.get(k).and_then(|r| r.get(c)))
                        .copied()
                })
                .collect(),
        );
    }
    for start in 1..rows {
        out.push(
            (0..)
                .map_while(|k| {
                    (cols - 1)
                        .checked_sub(k)
                        .and_then(|c| table.get(start + k).and_then(|r| r.get(c)))
                        .copied()
                })
                .collect(),
        );
    }
    out.retain(|line| line.len() >= 3);
    out
}

/// Central-difference Jacobian estimate with step `h` per coordinate.
pub fn fd_jacobian(f: &VectorFunction, x: &[f64], h: f64) -> Result<Matrix, EvalError> {
    let n = f.n();
    let m = f.m();
    let mut out = Matrix::zeros(m, n);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for c in 0..n {
        xp[c] = x[c] + h;
        xm[c] = x[c] - h;
        let fp = f.eval(&xp)?;
        let fm = f.eval(&xm)?;
        for r in 0..m {
            out.set(r, c, (fp[r] - fm[r]) / (2.0 * h));
        }
        xp[c] = x[c];
        xm[c] = x[c];
    }
    Ok(out)
}
