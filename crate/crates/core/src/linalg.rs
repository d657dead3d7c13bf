//! Small dense linear algebra helpers used throughout the crate.
//!
//! Problems here are desk scale (a handful of variables and objectives), so
//! everything works on plain slices and a row-major matrix, no BLAS.

/// Dot product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Componentwise `a - b` as a new vector.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Componentwise `a + s * b` as a new vector.
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Euclidean distance between two points.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense row-major matrix. Used for Jacobians (`rows` = objectives,
/// `cols` = variables).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data; `data.len()` must be `rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Matrix { rows, cols, data }
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `A * v` for `v` of length `cols`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// `A^T * w` for `w` of length `rows`.
    pub fn tvec(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, wr) in w.iter().enumerate() {
            for (c, o) in out.iter_mut().enumerate() {
                *o += wr * self.get(r, c);
            }
        }
        out
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot degenerates (singular system).
pub fn solve_dense(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "solve_dense needs a square matrix");
    assert_eq!(n, b.len());
    let scale = a.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (best_row, best_abs) = (col..n)
            .map(|r| (r, m.get(r, col).abs()))
            .fold((col, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if best_abs <= 1e-13 * scale {
            return None;
        }
        if best_row != col {
            for c in 0..n {
                let tmp = m.get(col, c);
                m.set(col, c, m.get(best_row, c));
                m.set(best_row, c, tmp);
            }
            rhs.swap(col, best_row);
        }
        for r in col + 1..n {
            let factor = m.get(r, col) / m.get(col, col);
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                m.set(r, c, m.get(r, c) - factor * m.get(col, c));
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in row + 1..n {
            acc -= m.get(row, c) * x[c];
        }
        x[row] = acc / m.get(row, row);
    }
    Some(x)
}

/// Rank of the matrix whose rows are `rows_in`, by Gaussian elimination with
/// partial pivoting; pivots with magnitude at or below `pivot_tol` count as zero.
pub fn rank(rows_in: &[Vec<f64>], pivot_tol: f64) -> usize {
    if rows_in.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows_in.to_vec();
    let nrows = m.len();
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        // Largest remaining pivot in this column.
        let (best_row, best_abs) = (rank..nrows)
            .map(|r| (r, m[r][col].abs()))
            .fold((rank, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if best_abs <= pivot_tol {
            continue;
        }
        m.swap(rank, best_row);
        for r in rank + 1..nrows {
            let factor = m[r][col] / m[rank][col];
            for c in col..ncols {
                m[r][c] -= factor * m[rank][c];
            }
        }
        rank += 1;
    }
    rank
}
