//! Feasible sets with exact Euclidean projections.
//!
//! Every variant is closed and convex and projects in closed form: boxes
//! clamp, balls rescale radially, the simplex uses the sorted water-filling
//! rule. The solver only ever touches feasible points through these
//! projections, so exactness here is what keeps iterates feasible.

use crate::linalg;
use thiserror::Error;

/// Feasibility tolerance used by shifted projections and the solver.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Construction and usage failures for [`FeasibleSet`].
#[derive(Debug, Error, PartialEq)]
pub enum SetError {
    #[error("expected vectors of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("box bounds invalid at index {index} (need lower <= upper, no NaN)")]
    InvalidBounds { index: usize },
    #[error("ball radius must be positive and finite")]
    NonPositiveRadius,
    #[error("simplex scale must be positive and finite")]
    NonPositiveScale,
    #[error("simplex dimension must be at least 1")]
    EmptySimplex,
    #[error("base point is infeasible (distance {distance:.3e} from the set)")]
    InfeasibleBasePoint { distance: f64 },
}

/// Closed convex feasible set with an exact projection.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    /// All of `R^n`.
    WholeSpace { dim: usize },
    /// `{ x : lower <= x <= upper }` componentwise; infinite bounds allowed.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{ x : ||x - center|| <= radius }`.
    Ball { center: Vec<f64>, radius: f64 },
    /// `{ x : x >= 0, sum x_i = scale }`.
    Simplex { dim: usize, scale: f64 },
}

impl FeasibleSet {
    pub fn whole_space(dim: usize) -> Self {
        FeasibleSet::WholeSpace { dim }
    }

    /// Box with the given bounds; entries may be `-inf`/`+inf`.
    pub fn bounded_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SetError> {
        if lower.len() != upper.len() {
            return Err(SetError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (index, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(SetError::InvalidBounds { index });
            }
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, SetError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SetError::NonPositiveRadius);
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self, SetError> {
        if dim == 0 {
            return Err(SetError::EmptySimplex);
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(SetError::NonPositiveScale);
        }
        Ok(FeasibleSet::Simplex { dim, scale })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::WholeSpace { dim } => *dim,
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Simplex { dim, .. } => *dim,
        }
    }

    fn check_dim(&self, z: &[f64]) -> Result<(), SetError> {
        if z.len() != self.dim() {
            return Err(SetError::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    /// Euclidean projection of `z` onto the set.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>, SetError> {
        self.check_dim(z)?;
        Ok(match self {
            FeasibleSet::WholeSpace { .. } => z.to_vec(),
            FeasibleSet::Box { lower, upper } => z
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
                .collect(),
            FeasibleSet::Ball { center, radius } => {
                let d = linalg::sub(z, center);
                let n = linalg::norm(&d);
                if n <= *radius {
                    z.to_vec()
                } else {
                    linalg::add_scaled(center, radius / n, &d)
                }
            }
            FeasibleSet::Simplex { scale, .. } => project_simplex(z, *scale),
        })
    }

    /// Projection onto the shifted set `C - x`, i.e. `P_C(x + g) - x`.
    /// The base point `x` must already lie in the set within [`FEASIBILITY_TOL`].
    pub fn project_shifted(&self, x: &[f64], g: &[f64]) -> Result<Vec<f64>, SetError> {
        self.check_dim(x)?;
        self.check_dim(g)?;
        if !self.contains(x, FEASIBILITY_TOL)? {
            let px = self.project(x)?;
            return Err(SetError::InfeasibleBasePoint {
                distance: linalg::distance(x, &px),
            });
        }
        let shifted = linalg::add_scaled(x, 1.0, g);
        let projected = self.project(&shifted)?;
        Ok(linalg::sub(&projected, x))
    }

    /// Membership test within `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool, SetError> {
        self.check_dim(x)?;
        Ok(match self {
            FeasibleSet::WholeSpace { .. } => true,
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol),
            FeasibleSet::Ball { center, radius } => {
                linalg::distance(x, center) <= radius + tol
            }
            FeasibleSet::Simplex { scale, .. } => {
                x.iter().all(|v| *v >= -tol)
                    && (x.iter().sum::<f64>() - scale).abs() <= tol
            }
        })
    }
}

/// Water-filling projection onto `{ x >= 0, sum x_i = s }` in O(n log n).
fn project_simplex(z: &[f64], s: f64) -> Vec<f64> {
    let mut u = z.to_vec();
    u.sort_unstable_by(|a, b| b.partial_cmp(a).expect("no NaN in projection input"));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - s) / (k + 1) as f64;
        if uk - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    z.iter().map(|v| (v - tau).max(0.0)).collect()
}
