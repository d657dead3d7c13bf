//! Finitely generated ordering cones described through their dual generators.
//!
//! A cone `K` in objective space is stored as a finite list of unit vectors
//! `w_1..w_p` generating its dual: `K = { y : <w_i, y> >= 0 for all i }`.
//! The scalarization `phi(y) = max_i <w_i, y>` then characterizes membership:
//! `-K = { phi <= 0 }` and `-int K = { phi < 0 }`, which is all the solver
//! needs to compare objective vectors and to certify descent.

use crate::fw;
use crate::linalg;
use thiserror::Error;

/// Unit-norm tolerance for stored generators.
pub const GENERATOR_NORM_TOL: f64 = 1e-12;
/// Pivot threshold for the span check on the generator list.
pub const RANK_PIVOT_TOL: f64 = 1e-10;
/// Minimum distance from the origin to the generator hull for the cone to
/// count as solid (interior nonempty).
pub const POINTEDNESS_TOL: f64 = 1e-8;

/// Construction and query failures for [`ConeOrder`].
#[derive(Debug, Error, PartialEq)]
pub enum ConeError {
    #[error("generator list is empty")]
    EmptyGeneratorList,
    #[error("generator {index} has zero norm")]
    ZeroGenerator { index: usize },
    #[error("expected vectors of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dual generators do not span the objective space, so the cone is not pointed")]
    NotFullDimensionalDual,
    #[error(
        "origin lies in the generator hull (distance {distance:.3e}), so the cone has empty interior"
    )]
    DualNotPointed { distance: f64 },
}

/// Ordering cone with a finite, unit-normalized dual generator list.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeOrder {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl ConeOrder {
    /// Builds a cone from raw dual generators, normalizing each to unit length
    /// and validating that the described cone is closed, convex, pointed, and
    /// has nonempty interior.
    pub fn new(dim: usize, raw_generators: &[Vec<f64>]) -> Result<Self, ConeError> {
        if raw_generators.is_empty() {
            return Err(ConeError::EmptyGeneratorList);
        }
        let mut generators = Vec::with_capacity(raw_generators.len());
        for (index, g) in raw_generators.iter().enumerate() {
            if g.len() != dim {
                return Err(ConeError::DimensionMismatch {
                    expected: dim,
                    got: g.len(),
                });
            }
            let n = linalg::norm(g);
            if !n.is_finite() || n <= GENERATOR_NORM_TOL {
                return Err(ConeError::ZeroGenerator { index });
            }
            generators.push(g.iter().map(|x| x / n).collect::<Vec<f64>>());
        }
        // Interior nonempty: the origin must stay clear of the generator hull.
        let (distance, _) = min_norm_in_hull(&generators, 2000, 1e-14);
        if distance <= POINTEDNESS_TOL {
            return Err(ConeError::DualNotPointed { distance });
        }
        // Pointedness of the cone itself: the generators must span the space.
        if linalg::rank(&generators, RANK_PIVOT_TOL) < dim {
            return Err(ConeError::NotFullDimensionalDual);
        }
        Ok(ConeOrder { dim, generators })
    }

    /// Objective-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of dual generators.
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// The stored unit generators.
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    fn check_dim(&self, y: &[f64]) -> Result<(), ConeError> {
        if y.len() != self.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(())
    }

    /// `phi(y) = max_i <w_i, y>`, the dual-generator scalarization.
    pub fn phi(&self, y: &[f64]) -> Result<f64, ConeError> {
        self.check_dim(y)?;
        Ok(self.phi_unchecked(y))
    }

    pub(crate) fn phi_unchecked(&self, y: &[f64]) -> f64 {
        self.generators
            .iter()
            .map(|w| linalg::dot(w, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `phi(y)` together with the smallest generator index attaining the max.
    pub fn phi_argmax(&self, y: &[f64]) -> Result<(f64, usize), ConeError> {
        self.check_dim(y)?;
        let mut best = (linalg::dot(&self.generators[0], y), 0usize);
        for (i, w) in self.generators.iter().enumerate().skip(1) {
            let v = linalg::dot(w, y);
            if v > best.0 {
                best = (v, i);
            }
        }
        Ok(best)
    }

    /// Cone order test `u <= v`, meaning `v - u` lies in `K` within `tol`:
    /// `min_i <w_i, v - u> >= -tol`.
    pub fn k_leq(&self, u: &[f64], v: &[f64], tol: f64) -> Result<bool, ConeError> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let d = linalg::sub(v, u);
        Ok(self
            .generators
            .iter()
            .all(|w| linalg::dot(w, &d) >= -tol))
    }

    /// Strict interior test for `-K`: true when `phi(y) < -tol`.
    pub fn in_minus_int_k(&self, y: &[f64], tol: f64) -> Result<bool, ConeError> {
        Ok(self.phi(y)? < -tol)
    }
}

/// Minimum-norm point of the convex hull of `points`, by Wolfe's method.
///
/// Keeps a corral of affinely independent points and alternates between
/// adding the vertex most aligned against the current point and re-solving
/// the affine minimization over the corral, dropping vertices whose weight
/// would turn negative. Terminates once no vertex improves the optimality
/// margin by more than `gap_tol` (relatively), or after `max_iters` cycles.
///
/// Returns the distance `min || sum_i lambda_i p_i ||` and hull weights
/// attaining it.
pub fn min_norm_in_hull(
    points: &[Vec<f64>],
    max_iters: usize,
    gap_tol: f64,
) -> (f64, Vec<f64>) {
    assert!(!points.is_empty(), "min_norm_in_hull needs at least one point");
    let p = points.len();
    let mut corral: Vec<usize> = vec![0];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut z = points[0].clone();
    for _ in 0..max_iters {
        // Vertex most opposed to the current point; ties keep order stable.
        let scores: Vec<f64> = points.iter().map(|pt| -linalg::dot(pt, &z)).collect();
        let idx = fw::best_vertex(&scores);
        let zz = linalg::norm_sq(&z);
        if -scores[idx] >= zz - gap_tol * f64::max(1.0, zz) {
            break;
        }
        if corral.contains(&idx) {
            // Numerical stall: the best vertex cannot be added twice.
            break;
        }
        corral.push(idx);
        lambda.push(0.0);
        // Minor cycles: each pass either accepts the affine minimizer or
        // drops at least one corral vertex, so this loop is finite.
        loop {
            let alpha = match affine_minimizer(points, &corral) {
                Some(alpha) => alpha,
                None => {
                    // Degenerate corral; drop the newest vertex and give up
                    // on this major cycle.
                    corral.pop();
                    lambda.pop();
                    let total: f64 = lambda.iter().sum();
                    if total > 0.0 {
                        for l in lambda.iter_mut() {
                            *l /= total;
                        }
                    }
                    break;
                }
            };
            if alpha.iter().all(|a| *a > 1e-12) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= 1e-12 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let keep: Vec<bool> = lambda.iter().map(|l| *l > 1e-12).collect();
            if keep.iter().all(|k| !k) {
                // Keep the heaviest entry to stay on the hull.
                break;
            }
            let mut it = keep.iter();
            corral.retain(|_| *it.next().unwrap());
            let mut it = keep.iter();
            lambda.retain(|_| *it.next().unwrap());
            let total: f64 = lambda.iter().sum();
            for l in lambda.iter_mut() {
                *l /= total;
            }
        }
        z = vec![0.0; z.len()];
        for (l, ci) in lambda.iter().zip(&corral) {
            for (zi, xi) in z.iter_mut().zip(&points[*ci]) {
                *zi += l * xi;
            }
        }
    }
    let mut weights = vec![0.0; p];
    for (l, ci) in lambda.iter().zip(&corral) {
        weights[*ci] = *l;
    }
    (linalg::norm(&z), weights)
}

/// Weights of the minimum-norm point of the affine hull of the chosen points:
/// minimize `|| sum alpha_i p_i ||` subject to `sum alpha_i = 1`, alpha free.
fn affine_minimizer(points: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let s = corral.len();
    let mut a = linalg::Matrix::zeros(s + 1, s + 1);
    let mut b = vec![0.0; s + 1];
    b[0] = 1.0;
    for j in 0..s {
        a.set(0, j + 1, 1.0);
        a.set(j + 1, 0, 1.0);
    }
    for i in 0..s {
        for j in 0..s {
            a.set(i + 1, j + 1, linalg::dot(&points[corral[i]], &points[corral[j]]));
        }
    }
    let sol = linalg::solve_dense(&a, &b)?;
    Some(sol[1..].to_vec())
}
