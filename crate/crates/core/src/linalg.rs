//! Dense matrices, Cholesky factorization, and positive-definite solves.
//!
//! The dimensions in this crate are small (tens to low hundreds), so a plain
//! row-major layout with textbook algorithms is both fast enough and easy to
//! audit. Factorizations verify their own backward error in debug builds.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::real::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Build from a closure over (row, column).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from nested rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch(
                "rows of a matrix must all have the same length".into(),
            ));
        }
        Ok(Mat {
            rows: nrows,
            cols: ncols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Immutable view of one row.
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Mutable view of one row.
    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of one column.
    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Matrix transpose.
    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Mat<T>) -> Result<Mat<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mat_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), v)).collect())
    }

    /// Largest absolute entry (zero for an empty matrix).
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|x| x.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Symmetric matrix, validated at construction.
///
/// Wraps a dense square matrix and guarantees `S[i][j] == S[j][i]` up to a
/// small relative tolerance; downstream factorizations rely on that.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    mat: Mat<T>,
}

impl<T: Real> SymMatrix<T> {
    /// Validate and wrap a square matrix. Off-diagonal pairs may differ by at
    /// most `1e-12` relative to the largest entry; the stored matrix is
    /// symmetrized exactly so factorizations see no residual asymmetry.
    pub fn new(mat: Mat<T>) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let scale = mat.max_abs().max(T::one());
        let tol = scale * T::from64(1e-12).max(T::epsilon() * T::from64(16.0));
        let mut sym = mat;
        let n = sym.rows();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = sym[(i, j)];
                let b = sym[(j, i)];
                if (a - b).abs() > tol {
                    return Err(Error::InvalidParameter {
                        name: "matrix",
                        message: format!(
                            "entries ({i},{j}) and ({j},{i}) differ by {:e}, beyond the symmetry tolerance",
                            (a - b).abs()
                        ),
                    });
                }
                let half = T::from64(0.5);
                let avg = (a + b) * half;
                sym[(i, j)] = avg;
                sym[(j, i)] = avg;
            }
        }
        Ok(SymMatrix { mat: sym })
    }

    /// Build from a closure evaluated on the lower triangle and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut mat = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                mat[(i, j)] = v;
                mat[(j, i)] = v;
            }
        }
        SymMatrix { mat }
    }

    /// Identity of dimension `n`.
    pub fn identity(n: usize) -> Self {
        SymMatrix {
            mat: Mat::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn trace(&self) -> T {
        self.mat.trace()
    }

    /// Borrow the underlying dense matrix.
    pub fn mat(&self) -> &Mat<T> {
        &self.mat
    }

    /// Consume into the underlying dense matrix.
    pub fn into_mat(self) -> Mat<T> {
        self.mat
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.mat[(i, j)]
    }
}

/// Dot product of two equal-length slices.
#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Quadratic form `w' S w`.
pub fn quad_form<T: Real>(s: &SymMatrix<T>, w: &[T]) -> Result<T> {
    let sw = s.mat().mat_vec(w)?;
    Ok(dot(w, &sw))
}

/// Lower-triangular Cholesky factor `L` with `L L' = S`.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot falls to or below
/// `1e-12` times the mean absolute diagonal of `S`.
pub fn cholesky_lower<T: Real>(s: &SymMatrix<T>) -> Result<Mat<T>> {
    let (l, rank) = cholesky_lower_partial(s);
    let n = s.dim();
    if rank < n {
        let tol = pivot_tolerance(s);
        let pivot = residual_pivot(s, &l, rank);
        return Err(Error::NotPositiveDefinite {
            index: rank,
            pivot: pivot.to64(),
            tolerance: tol.to64(),
        });
    }
    #[cfg(debug_assertions)]
    {
        let back = l.matmul(&l.transpose()).expect("square product");
        let mut err = T::zero();
        for i in 0..n {
            for j in 0..n {
                let d = (back[(i, j)] - s.get(i, j)).abs();
                if d > err {
                    err = d;
                }
            }
        }
        let scale = s.mat().max_abs().max(T::epsilon());
        debug_assert!(
            err <= T::from64(1e-10).max(T::epsilon() * T::from64(256.0)) * scale,
            "cholesky backward error {err:e} exceeds tolerance at scale {scale:e}"
        );
    }
    Ok(l)
}

/// Cholesky factorization of the largest leading block that is positive
/// definite. Returns the factor (zero beyond the block) and the block size.
///
/// The leading `k`-by-`k` block of `L` is exactly the Cholesky factor of the
/// leading `k`-by-`k` block of `S` for every `k` up to the returned rank,
/// which lets callers factor all leading submatrices in one pass.
pub fn cholesky_lower_partial<T: Real>(s: &SymMatrix<T>) -> (Mat<T>, usize) {
    let n = s.dim();
    let tol = pivot_tolerance(s);
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = s.get(j, j);
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            // Zero out the partially-filled column and stop.
            for i in 0..n {
                l[(i, j)] = T::zero();
            }
            return (l, j);
        }
        let lj = d.sqrt();
        l[(j, j)] = lj;
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / lj;
        }
    }
    (l, n)
}

fn pivot_tolerance<T: Real>(s: &SymMatrix<T>) -> T {
    let n = s.dim().max(1);
    let avg_diag = (0..s.dim())
        .map(|i| s.get(i, i).abs())
        .sum::<T>()
        / T::from64(n as f64);
    avg_diag * T::from64(1e-12)
}

fn residual_pivot<T: Real>(s: &SymMatrix<T>, l: &Mat<T>, j: usize) -> T {
    let mut d = s.get(j, j);
    for k in 0..j {
        d -= l[(j, k)] * l[(j, k)];
    }
    d
}

/// Solve `L y = b` for lower-triangular `L`.
pub fn forward_sub<T: Real>(l: &Mat<T>, b: &[T]) -> Vec<T> {
    let n = b.len();
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * y[k];
        }
        y[i] = v / l[(i, i)];
    }
    y
}

/// Solve `L' x = y` for lower-triangular `L`.
pub fn back_sub_transposed<T: Real>(l: &Mat<T>, y: &[T]) -> Vec<T> {
    let n = y.len();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    x
}

/// Solve `S x = b` for symmetric positive-definite `S`.
pub fn solve_psd<T: Real>(s: &SymMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if s.dim() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but right-hand side has length {}",
            s.dim(),
            s.dim(),
            b.len()
        )));
    }
    let l = cholesky_lower(s)?;
    let x = back_sub_transposed(&l, &forward_sub(&l, b));
    #[cfg(debug_assertions)]
    {
        let sx = s.mat().mat_vec(&x).expect("dimensions checked");
        let res = sx
            .iter()
            .zip(b)
            .map(|(&u, &v)| (u - v).abs())
            .fold(T::zero(), |a, c| if c > a { c } else { a });
        let bnorm = b
            .iter()
            .map(|x| x.abs())
            .fold(T::epsilon(), |a, c| if c > a { c } else { a });
        debug_assert!(
            res <= T::from64(1e-8).max(T::epsilon().sqrt()) * bnorm,
            "solve residual {res:e} exceeds tolerance for |b| {bnorm:e}"
        );
    }
    Ok(x)
}

/// Solve `S X = B` column by column for symmetric positive-definite `S`.
pub fn solve_psd_mat<T: Real>(s: &SymMatrix<T>, b: &Mat<T>) -> Result<Mat<T>> {
    if s.dim() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but right-hand side is {}x{}",
            s.dim(),
            s.dim(),
            b.rows(),
            b.cols()
        )));
    }
    let l = cholesky_lower(s)?;
    let mut x = Mat::zeros(b.rows(), b.cols());
    for c in 0..b.cols() {
        let col = b.col(c);
        let sol = back_sub_transposed(&l, &forward_sub(&l, &col));
        for (r, v) in sol.into_iter().enumerate() {
            x[(r, c)] = v;
        }
    }
    Ok(x)
}
