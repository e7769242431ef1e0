//! Reproducible random number streams and matrix-variate draws.
//!
//! Experiments key every replicate to a `(seed, stream_id)` pair so results
//! are bitwise identical no matter how work is scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Mat, SymMatrix};
use crate::real::Real;

/// Counter-based random stream: a ChaCha8 generator addressed by a seed and
/// a stream id. Streams with the same seed but different ids are independent,
/// and every `(seed, stream_id)` pair yields the same sequence on every
/// platform and thread schedule.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Open the stream `(seed, stream_id)` at its beginning.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream with the same seed and a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        RngStream::new(self.seed, stream_id)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// Draw `x = mean + L z` with `z` standard normal, for `L` the Cholesky
/// factor of the target covariance.
pub fn mvn_draw<T: Real, R: Rng + ?Sized>(mean: &[T], chol: &Mat<T>, rng: &mut R) -> Result<Vec<T>> {
    let p = mean.len();
    if chol.rows() != p || chol.cols() != p {
        return Err(Error::DimensionMismatch(format!(
            "mean has length {p} but Cholesky factor is {}x{}",
            chol.rows(),
            chol.cols()
        )));
    }
    let z: Vec<T> = (0..p).map(|_| T::standard_normal(rng)).collect();
    let mut x = mean.to_vec();
    for i in 0..p {
        // L is lower triangular; only the first i+1 entries contribute.
        let mut acc = T::zero();
        for k in 0..=i {
            acc += chol[(i, k)] * z[k];
        }
        x[i] += acc;
    }
    Ok(x)
}

/// One Wishart draw with expectation `df * L L'`, where `L` is the Cholesky
/// factor of the scale matrix.
///
/// Uses the Bartlett decomposition: `W = (L A)(L A)'` with `A` lower
/// triangular, `A[i][i]^2` chi-squared with `df - i` degrees of freedom and
/// standard-normal entries below the diagonal. Requires `df >= dim` so the
/// draw is almost surely positive definite.
pub fn wishart_draw<T: Real, R: Rng + ?Sized>(
    df: usize,
    scale_chol: &Mat<T>,
    rng: &mut R,
) -> Result<SymMatrix<T>> {
    let dim = scale_chol.rows();
    if scale_chol.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "scale Cholesky factor must be square, got {}x{}",
            scale_chol.rows(),
            scale_chol.cols()
        )));
    }
    if df < dim {
        return Err(Error::DegenerateWishart { df, dim });
    }
    let mut a = Mat::zeros(dim, dim);
    for i in 0..dim {
        a[(i, i)] = T::chi_squared(T::from64((df - i) as f64), rng).sqrt();
        for j in 0..i {
            a[(i, j)] = T::standard_normal(rng);
        }
    }
    let m = scale_chol.matmul(&a).expect("square dimensions agree");
    let w = SymMatrix::from_fn(dim, |i, j| {
        let mut acc = T::zero();
        for k in 0..=j.min(i) {
            acc += m[(i, k)] * m[(j, k)];
        }
        acc
    });
    Ok(w)
}

/// Random orthonormal matrix: Gram-Schmidt applied to a Gaussian matrix.
pub fn random_orthonormal<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Mat<T> {
    let mut q = Mat::from_fn(dim, dim, |_, _| T::standard_normal(rng));
    for i in 0..dim {
        for prev in 0..i {
            let proj = crate::linalg::dot(q.row(i), q.row(prev));
            let prev_row = q.row(prev).to_vec();
            for (x, &p) in q.row_mut(i).iter_mut().zip(&prev_row) {
                *x -= proj * p;
            }
        }
        let norm = crate::linalg::dot(q.row(i), q.row(i)).sqrt();
        for x in q.row_mut(i) {
            *x /= norm;
        }
    }
    q
}

/// Fisher-Yates shuffle driven by the stream, used for permutation studies.
pub fn shuffle_in_place<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
