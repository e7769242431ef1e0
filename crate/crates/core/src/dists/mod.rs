//! The approximate distribution of estimated-portfolio quality.
//!
//! For a market with `p` assets, maximal quality `zeta`, and `n` observed
//! periods, the quality of the sample Markowitz portfolio is approximately
//! `zeta * T / sqrt(nu + T^2)` where `T` is noncentral t with `nu = p - 1`
//! degrees of freedom and noncentrality `delta = sqrt(n) * zeta`. This
//! module exposes that law's CDF, quantiles, sampler, and second moment,
//! plus the special functions they are built on.

mod nct;
mod special;

pub use nct::{nct_cdf, nct_quantile};
pub use special::{betainc_reg, hyp2f2, lgamma, ln_beta, norm_cdf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::real::Real;

/// Parameters of the quality approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualApproxParams<T> {
    n_eff: T,
    p_assets: usize,
    zeta: T,
}

impl<T: Real> QualApproxParams<T> {
    /// `n_eff`: number of observations (in the same time-unit as `zeta`);
    /// `p_assets >= 2`; `zeta >= 0` the population signal-noise ratio.
    pub fn new(n_eff: T, p_assets: usize, zeta: T) -> Result<Self> {
        if !(n_eff > T::zero()) || !n_eff.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n_eff",
                message: format!("effective sample size must be positive and finite, got {n_eff}"),
            });
        }
        if p_assets < 2 {
            return Err(Error::DegenerateParams(format!(
                "approximation requires at least 2 assets (got {p_assets})"
            )));
        }
        if !(zeta >= T::zero()) || !zeta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "zeta",
                message: format!("signal-noise ratio must be finite and >= 0, got {zeta}"),
            });
        }
        Ok(QualApproxParams {
            n_eff,
            p_assets,
            zeta,
        })
    }

    pub fn n_eff(&self) -> T {
        self.n_eff
    }

    pub fn p_assets(&self) -> usize {
        self.p_assets
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    /// Noncentrality `sqrt(n) * zeta` of the underlying t variable.
    pub fn delta(&self) -> T {
        self.n_eff.sqrt() * self.zeta
    }

    /// Degrees of freedom `p - 1` of the underlying t variable.
    pub fn nu(&self) -> T {
        T::from64((self.p_assets - 1) as f64)
    }

    fn require_positive_snr(&self) -> Result<()> {
        if self.zeta > T::zero() {
            Ok(())
        } else {
            Err(Error::DegenerateParams(
                "zero signal-noise ratio collapses the quality distribution to a point mass"
                    .into(),
            ))
        }
    }
}

/// CDF of the approximate quality law at `q` (same units as `zeta`).
pub fn qual_approx_cdf<T: Real>(q: T, params: &QualApproxParams<T>) -> Result<T> {
    params.require_positive_snr()?;
    let zeta = params.zeta();
    if q <= -zeta {
        return Ok(T::zero());
    }
    if q >= zeta {
        return Ok(T::one());
    }
    // Invert q = zeta * t / sqrt(nu + t^2): t = r sqrt(nu) / sqrt(1 - r^2).
    let r = q / zeta;
    let x = r / (T::one() - r * r).sqrt() * params.nu().sqrt();
    nct_cdf(x, params.delta(), params.nu())
}

/// Quantile of the approximate quality law at level `u` in (0, 1).
pub fn qual_approx_quantile<T: Real>(u: T, params: &QualApproxParams<T>) -> Result<T> {
    params.require_positive_snr()?;
    let t = nct_quantile(u, params.delta(), params.nu())?;
    Ok(params.zeta() * t / (params.nu() + t * t).sqrt())
}

/// One draw from the approximate quality law, by direct construction:
/// `T = (delta + Z) / sqrt(Chi2_nu / nu)`, then `q = zeta T / sqrt(nu + T^2)`.
/// Draws satisfy `|q| < zeta` by construction.
pub fn qual_approx_sample<T: Real, R: Rng + ?Sized>(
    params: &QualApproxParams<T>,
    rng: &mut R,
) -> Result<T> {
    params.require_positive_snr()?;
    let nu = params.nu();
    let z = T::standard_normal(rng);
    let c = T::chi_squared(nu, rng);
    let t = (params.delta() + z) / (c / nu).sqrt();
    Ok(params.zeta() * t / (nu + t * t).sqrt())
}

/// Mean of the squared quality under the approximation:
///
/// `E[q^2] = zeta^2 e^{-n zeta^2 / 2} * [G(3/2) G(p/2) / (G(1/2) G(p/2+1))]
///          * 2F2(p/2, 3/2; 1/2, p/2 + 1; n zeta^2 / 2)`
///
/// where `G` is the gamma function. The squared quality is a scaled
/// noncentral-Beta variable; only its mean is needed, and this closed form
/// evaluates it without quadrature.
pub fn ncbeta_sq_mean<T: Real>(params: &QualApproxParams<T>) -> Result<T> {
    let zeta = params.zeta();
    if zeta == T::zero() {
        return Ok(T::zero());
    }
    let half = T::from64(0.5);
    let p_half = T::from64(params.p_assets() as f64) * half;
    let arg = params.n_eff() * zeta * zeta * half;
    let three_halves = T::from64(1.5);
    // Gamma-ratio prefactor in log space to stay stable for large p.
    let ln_prefactor =
        lgamma(three_halves) - lgamma(half) + lgamma(p_half) - lgamma(p_half + T::one());
    let series = hyp2f2(p_half, three_halves, half, p_half + T::one(), arg)?;
    Ok(zeta * zeta * (ln_prefactor - arg).exp() * series)
}

/// Two-sided Kolmogorov-Smirnov statistic of an ascending-sorted sample
/// against a model CDF.
pub fn ks_statistic<T: Real>(
    sorted_samples: &[T],
    cdf: impl Fn(T) -> Result<T>,
) -> Result<T> {
    let n = sorted_samples.len();
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            message: "KS statistic needs a non-empty sample".into(),
        });
    }
    debug_assert!(
        sorted_samples.windows(2).all(|w| w[0] <= w[1]),
        "samples must be sorted ascending"
    );
    let n_t = T::from64(n as f64);
    let mut d = T::zero();
    for (i, &x) in sorted_samples.iter().enumerate() {
        let f = cdf(x)?;
        let lo = T::from64(i as f64) / n_t;
        let hi = T::from64((i + 1) as f64) / n_t;
        d = d.max(f - lo).max(hi - f);
    }
    Ok(d)
}
