//! Market models, portfolio quality, and portfolio estimators.
//!
//! The central quantity is the quality of a portfolio `w` under a market
//! model with mean `mu` and covariance `Sigma`: `q(w) = w'mu / sqrt(w'Sigma w)`,
//! the population analogue of the Sharpe ratio. Its maximum over all
//! portfolios is the signal-noise ratio `zeta = sqrt(mu' Sigma^-1 mu)`,
//! attained by the Markowitz portfolio `Sigma^-1 mu`.
//!
//! Feature-conditional variants replace `mu` with a loadings matrix `B` and a
//! feature second-moment matrix `Sigma_f`; an unconditional model is the
//! special case of a single constant feature.

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky_lower, dot, quad_form, solve_psd, solve_psd_mat, Mat, SymMatrix,
};
use crate::real::Real;

/// Population market model: asset covariance plus either a mean vector or
/// feature loadings with a feature second-moment matrix.
///
/// Internally everything is stored in the conditional form; an unconditional
/// model is a single constant feature with unit second moment.
#[derive(Debug, Clone)]
pub struct MarketModel<T> {
    /// `p x f` loadings; column `j` is the mean response to feature `j`.
    loadings: Mat<T>,
    /// `f x f` feature second-moment matrix.
    feature_cov: SymMatrix<T>,
    /// `p x p` asset covariance (conditional on features, where relevant).
    sigma: SymMatrix<T>,
}

impl<T: Real> MarketModel<T> {
    /// Model with a fixed mean vector.
    pub fn unconditional(mu: Vec<T>, sigma: SymMatrix<T>) -> Result<Self> {
        let p = mu.len();
        let loadings = Mat::from_fn(p, 1, |r, _| mu[r]);
        Self::conditional(loadings, SymMatrix::identity(1), sigma)
    }

    /// Model with feature loadings `B` (p x f) and feature second moments.
    pub fn conditional(
        loadings: Mat<T>,
        feature_cov: SymMatrix<T>,
        sigma: SymMatrix<T>,
    ) -> Result<Self> {
        let p = loadings.rows();
        let f = loadings.cols();
        if p == 0 || f == 0 {
            return Err(Error::InvalidParameter {
                name: "loadings",
                message: "model needs at least one asset and one feature".into(),
            });
        }
        if sigma.dim() != p {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {}x{} but loadings have {} assets",
                sigma.dim(),
                sigma.dim(),
                p
            )));
        }
        if feature_cov.dim() != f {
            return Err(Error::DimensionMismatch(format!(
                "feature covariance is {}x{} but loadings have {} features",
                feature_cov.dim(),
                feature_cov.dim(),
                f
            )));
        }
        cholesky_lower(&sigma)?;
        cholesky_lower(&feature_cov)?;
        Ok(MarketModel {
            loadings,
            feature_cov,
            sigma,
        })
    }

    /// Number of assets.
    pub fn p(&self) -> usize {
        self.loadings.rows()
    }

    /// Number of features (1 for unconditional models).
    pub fn n_features(&self) -> usize {
        self.loadings.cols()
    }

    pub fn sigma(&self) -> &SymMatrix<T> {
        &self.sigma
    }

    pub fn loadings(&self) -> &Mat<T> {
        &self.loadings
    }

    pub fn feature_cov(&self) -> &SymMatrix<T> {
        &self.feature_cov
    }

    /// Mean vector, available when the model has a single feature.
    pub fn mu(&self) -> Option<Vec<T>> {
        if self.n_features() == 1 && self.feature_cov.get(0, 0) == T::one() {
            Some(self.loadings.col(0))
        } else {
            None
        }
    }
}

/// A portfolio: fixed weights, or a weight matrix mapping features to
/// weights for feature-linear strategies.
#[derive(Debug, Clone, PartialEq)]
pub enum Portfolio<T> {
    /// Plain weight vector.
    Vector(Vec<T>),
    /// `p x f` weight matrix; the held portfolio at time `t` is `W x_t`.
    Matrix(Mat<T>),
}

impl<T: Real> Portfolio<T> {
    fn check_nonzero(&self) -> Result<()> {
        let zero = match self {
            Portfolio::Vector(w) => w.iter().all(|&x| x == T::zero()),
            Portfolio::Matrix(w) => w.max_abs() == T::zero(),
        };
        if zero {
            Err(Error::ZeroPortfolio)
        } else {
            Ok(())
        }
    }
}

/// Observed returns, optionally with the features that were visible when
/// each position was formed.
#[derive(Debug, Clone)]
pub struct ReturnsSample<T> {
    returns: Mat<T>,
    features: Option<Mat<T>>,
}

impl<T: Real> ReturnsSample<T> {
    /// Sample of plain returns, one row per period.
    pub fn new(returns: Mat<T>) -> Result<Self> {
        if returns.rows() == 0 || returns.cols() == 0 {
            return Err(Error::InvalidParameter {
                name: "returns",
                message: "returns matrix must be non-empty".into(),
            });
        }
        Ok(ReturnsSample {
            returns,
            features: None,
        })
    }

    /// Sample of returns with aligned features. The first feature column
    /// must be identically one (the intercept).
    pub fn with_features(returns: Mat<T>, features: Mat<T>) -> Result<Self> {
        let base = Self::new(returns)?;
        if features.rows() != base.returns.rows() {
            return Err(Error::DimensionMismatch(format!(
                "returns have {} rows but features have {}",
                base.returns.rows(),
                features.rows()
            )));
        }
        if features.cols() == 0 {
            return Err(Error::InvalidParameter {
                name: "features",
                message: "feature matrix must have at least the constant column".into(),
            });
        }
        for r in 0..features.rows() {
            if features[(r, 0)] != T::one() {
                return Err(Error::InvalidParameter {
                    name: "features",
                    message: format!("first feature column must be all ones, row {r} is not"),
                });
            }
        }
        Ok(ReturnsSample {
            returns: base.returns,
            features: Some(features),
        })
    }

    pub fn n_obs(&self) -> usize {
        self.returns.rows()
    }

    pub fn p(&self) -> usize {
        self.returns.cols()
    }

    pub fn returns(&self) -> &Mat<T> {
        &self.returns
    }

    pub fn features(&self) -> Option<&Mat<T>> {
        self.features.as_ref()
    }
}

/// Column means and the (n-1)-denominator sample covariance.
pub fn sample_moments<T: Real>(sample: &ReturnsSample<T>) -> Result<(Vec<T>, SymMatrix<T>)> {
    let r = sample.returns();
    let n = r.rows();
    let p = r.cols();
    if n < 2 {
        return Err(Error::InsufficientObservations { needed: 2, got: n });
    }
    let inv_n = T::one() / T::from64(n as f64);
    let mut mean = vec![T::zero(); p];
    for t in 0..n {
        for (m, &x) in mean.iter_mut().zip(r.row(t)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m *= inv_n;
    }
    let denom = T::one() / T::from64((n - 1) as f64);
    let mut cov: Mat<T> = Mat::zeros(p, p);
    let mut centered = vec![T::zero(); p];
    for t in 0..n {
        for (c, (&x, &m)) in centered.iter_mut().zip(r.row(t).iter().zip(&mean)) {
            *c = x - m;
        }
        for i in 0..p {
            let ci = centered[i];
            for j in 0..=i {
                cov[(i, j)] += ci * centered[j];
            }
        }
    }
    let cov = SymMatrix::from_fn(p, |i, j| cov[(i, j)] * denom);
    Ok((mean, cov))
}

/// Quality of a portfolio under a model: expected return over risk.
pub fn qual<T: Real>(port: &Portfolio<T>, model: &MarketModel<T>) -> Result<T> {
    port.check_nonzero()?;
    match port {
        Portfolio::Vector(w) => {
            if model.n_features() != 1 {
                return Err(Error::DimensionMismatch(
                    "vector portfolio requires a single-feature model; use a weight matrix"
                        .into(),
                ));
            }
            if w.len() != model.p() {
                return Err(Error::DimensionMismatch(format!(
                    "portfolio has {} assets but model has {}",
                    w.len(),
                    model.p()
                )));
            }
            // With one feature the conditional form collapses to
            // (w'b) sf / sqrt(w'Sigma w * sf), and sf = 1 for models built
            // unconditionally.
            let b = model.loadings().col(0);
            let sf = model.feature_cov().get(0, 0);
            let num = dot(w, &b) * sf;
            let den = (quad_form(model.sigma(), w)? * sf).sqrt();
            Ok(num / den)
        }
        Portfolio::Matrix(w) => conditional_qual(w, model),
    }
}

/// Quality of a feature-linear strategy `W` (p x f):
/// `trace(W'B Sigma_f) / sqrt(trace(W'Sigma W Sigma_f))`.
pub fn conditional_qual<T: Real>(w: &Mat<T>, model: &MarketModel<T>) -> Result<T> {
    Portfolio::Matrix(w.clone()).check_nonzero()?;
    if w.rows() != model.p() || w.cols() != model.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "weight matrix is {}x{} but model is {} assets by {} features",
            w.rows(),
            w.cols(),
            model.p(),
            model.n_features()
        )));
    }
    let wt_b = w.transpose().matmul(model.loadings())?;
    let num = trace_product(&wt_b, model.feature_cov());
    let sigma_w = model.sigma().mat().matmul(w)?;
    let wt_sigma_w = w.transpose().matmul(&sigma_w)?;
    let den = trace_product(&wt_sigma_w, model.feature_cov()).sqrt();
    Ok(num / den)
}

/// trace(A * S) for square `A` and symmetric `S` of matching dimension.
pub(crate) fn trace_product<T: Real>(a: &Mat<T>, s: &SymMatrix<T>) -> T {
    let mut acc = T::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a[(i, j)] * s.get(j, i);
        }
    }
    acc
}

/// Maximal achievable quality of a model: `sqrt(mu' Sigma^-1 mu)`, or
/// `sqrt(trace(B' Sigma^-1 B Sigma_f))` with features.
pub fn max_snr<T: Real>(model: &MarketModel<T>) -> Result<T> {
    let x = solve_psd_mat(model.sigma(), model.loadings())
        .map_err(|e| Error::SingularCovariance(e.to_string()))?;
    let bt_x = model.loadings().transpose().matmul(&x)?;
    Ok(trace_product(&bt_x, model.feature_cov()).max(T::zero()).sqrt())
}

/// Cosine of the angle between a portfolio and the Markowitz portfolio in
/// the covariance geometry: `qual / max_snr`.
pub fn cos_angle<T: Real>(port: &Portfolio<T>, model: &MarketModel<T>) -> Result<T> {
    let zeta = max_snr(model)?;
    if zeta <= T::zero() {
        return Err(Error::DegenerateModel);
    }
    Ok(qual(port, model)? / zeta)
}

/// Sample Markowitz portfolio `Sigma_hat^-1 mu_hat`.
pub fn markowitz<T: Real>(sample: &ReturnsSample<T>) -> Result<Portfolio<T>> {
    let n = sample.n_obs();
    let p = sample.p();
    if n < p + 2 {
        return Err(Error::InsufficientObservations { needed: p + 2, got: n });
    }
    let (mean, cov) = sample_moments(sample)?;
    let w = solve_psd(&cov, &mean).map_err(|e| Error::SingularCovariance(e.to_string()))?;
    Ok(Portfolio::Vector(w))
}

/// Feature-conditional Markowitz estimator.
///
/// Regresses returns on features (`B_hat = R'F (F'F)^-1`), forms the
/// residual covariance with denominator `n - f`, and returns
/// `W = Sigma_hat^-1 B_hat`.
pub fn conditional_markowitz<T: Real>(sample: &ReturnsSample<T>) -> Result<Portfolio<T>> {
    let feats = sample.features().ok_or_else(|| Error::InvalidParameter {
        name: "sample",
        message: "conditional estimator requires a sample with features".into(),
    })?;
    let r = sample.returns();
    let n = sample.n_obs();
    let p = sample.p();
    let f = feats.cols();
    if n < p + f + 1 {
        return Err(Error::InsufficientObservations {
            needed: p + f + 1,
            got: n,
        });
    }
    let ftf = SymMatrix::new(feats.transpose().matmul(feats)?)
        .map_err(|e| Error::SingularFeatures(e.to_string()))?;
    let ftr = feats.transpose().matmul(r)?;
    // b_t has shape f x p: (F'F)^-1 F'R.
    let b_t = solve_psd_mat(&ftf, &ftr).map_err(|e| Error::SingularFeatures(e.to_string()))?;
    let fitted = feats.matmul(&b_t)?;
    let denom = T::one() / T::from64((n - f) as f64);
    let mut resid_cov: Mat<T> = Mat::zeros(p, p);
    let mut resid_row = vec![T::zero(); p];
    for t in 0..n {
        for (e, (&obs, &fit)) in resid_row.iter_mut().zip(r.row(t).iter().zip(fitted.row(t))) {
            *e = obs - fit;
        }
        for i in 0..p {
            let ei = resid_row[i];
            for j in 0..=i {
                resid_cov[(i, j)] += ei * resid_row[j];
            }
        }
    }
    let resid_cov = SymMatrix::from_fn(p, |i, j| resid_cov[(i, j)] * denom);
    let w = solve_psd_mat(&resid_cov, &b_t.transpose())
        .map_err(|e| Error::SingularCovariance(e.to_string()))?;
    Ok(Portfolio::Matrix(w))
}

/// Projection kernel `P = G'(G Sigma G')^-1 G` for a full-row-rank `G`.
///
/// `P` is idempotent in the covariance geometry: `P Sigma P = P`.
pub fn risk_projection<T: Real>(sigma: &SymMatrix<T>, g: &Mat<T>) -> Result<Mat<T>> {
    let k = g.rows();
    let p = g.cols();
    if k == 0 || k > p {
        return Err(Error::RankDeficient(format!(
            "constraint matrix must have between 1 and {p} rows, got {k}"
        )));
    }
    if sigma.dim() != p {
        return Err(Error::DimensionMismatch(format!(
            "constraints have {} columns but covariance is {}x{}",
            p,
            sigma.dim(),
            sigma.dim()
        )));
    }
    let g_sigma = g.matmul(sigma.mat())?;
    let gram = g_sigma.matmul(&g.transpose())?;
    let gram = SymMatrix::new(gram).map_err(|e| Error::RankDeficient(e.to_string()))?;
    // (G Sigma G')^-1 G, then lift back with G'.
    let inv_g = solve_psd_mat(&gram, g).map_err(|e| Error::RankDeficient(e.to_string()))?;
    g.transpose().matmul(&inv_g)
}

/// Remove from `w` all exposure to the rows of `G`: the hedged portfolio
/// `w_h = w - P Sigma w` satisfies `G Sigma w_h = 0`.
pub fn hedge_transform<T: Real>(w: &[T], sigma: &SymMatrix<T>, g: &Mat<T>) -> Result<Vec<T>> {
    let proj = risk_projection(sigma, g)?;
    let sigma_w = sigma.mat().mat_vec(w)?;
    let correction = proj.mat_vec(&sigma_w)?;
    Ok(w.iter().zip(&correction).map(|(&a, &c)| a - c).collect())
}

/// Estimator of the squared maximal quality from data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrMethod {
    /// `(1 - p/n) z2 - p/n` where `z2 = mu_hat' Sigma_hat^-1 mu_hat`;
    /// unbiased under Gaussian returns but may be negative.
    Unbiased,
    /// The unbiased estimate clipped at zero.
    Truncated,
}

impl SnrMethod {
    pub fn name(self) -> &'static str {
        match self {
            SnrMethod::Unbiased => "unbiased",
            SnrMethod::Truncated => "truncated",
        }
    }
}

/// Finite-sample adjustment turning the raw squared-SNR statistic
/// `z_sq = mu_hat' Sigma_hat^-1 mu_hat` (from `n` observations of `p`
/// assets) into the chosen estimate of the population squared SNR.
pub(crate) fn snr_adjust<T: Real>(z_sq: T, n: usize, p: usize, method: SnrMethod) -> T {
    let ratio = T::from64(p as f64 / n as f64);
    let unbiased = (T::one() - ratio) * z_sq - ratio;
    match method {
        SnrMethod::Unbiased => unbiased,
        SnrMethod::Truncated => unbiased.max(T::zero()),
    }
}

/// Estimate the squared signal-noise ratio from a returns sample.
pub fn snr_estimate<T: Real>(sample: &ReturnsSample<T>, method: SnrMethod) -> Result<T> {
    let n = sample.n_obs();
    let p = sample.p();
    if n <= p {
        return Err(Error::InsufficientObservations { needed: p + 1, got: n });
    }
    let (mean, cov) = sample_moments(sample)?;
    let x = solve_psd(&cov, &mean).map_err(|e| Error::SingularCovariance(e.to_string()))?;
    let z2 = dot(&mean, &x);
    Ok(snr_adjust(z2, n, p, method))
}
