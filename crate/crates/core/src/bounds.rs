//! Closed-form upper bounds on expected portfolio quality, and the
//! supporting formulas for subspace and hedged variants, diversification
//! growth conditions, scaling-law curves, and a single-factor SNR identity.
//!
//! The central quantity is `qual_bound`: with `n` observations, an
//! estimated portfolio over `dof` effective parameters, and a squared
//! population signal-noise ratio `effect`, the expected out-of-sample
//! quality is at most `sqrt(n) * effect / sqrt(dof - 1 + n * effect)`.
//! `n` and `effect` must use matching time-units (the product `n * effect`
//! is unitless), so passing years together with an annualized SNR yields
//! an annualized bound directly.

use crate::dists::{ncbeta_sq_mean, QualApproxParams};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::quality::{risk_projection, trace_product, MarketModel};
use crate::real::Real;

/// Validated inputs to the quality bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs<T> {
    n_eff: T,
    dof: usize,
    effect: T,
}

impl<T: Real> BoundInputs<T> {
    /// `n_eff > 0`: observation count, in the time-unit matching `effect`;
    /// `dof >= 1`: effective parameter count of the estimator;
    /// `effect >= 0`: squared signal-noise ratio (or squared gap).
    pub fn new(n_eff: T, dof: usize, effect: T) -> Result<Self> {
        if !(n_eff > T::zero()) || !n_eff.is_finite() {
            return Err(Error::InvalidParameter {
                name: "n_eff",
                message: format!("observation count must be positive and finite, got {n_eff}"),
            });
        }
        if dof < 1 {
            return Err(Error::InvalidParameter {
                name: "dof",
                message: "degrees of freedom must be at least 1".into(),
            });
        }
        if !(effect >= T::zero()) || !effect.is_finite() {
            return Err(Error::InvalidParameter {
                name: "effect",
                message: format!("squared SNR must be finite and >= 0, got {effect}"),
            });
        }
        Ok(BoundInputs { n_eff, dof, effect })
    }

    pub fn n_eff(&self) -> T {
        self.n_eff
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn effect(&self) -> T {
        self.effect
    }
}

/// Upper bound on expected quality:
/// `sqrt(n) * effect / sqrt(dof - 1 + n * effect)`.
///
/// Equals `sqrt(effect)` when `dof = 1` (a single estimated parameter
/// costs nothing in expectation), and `0` when `effect = 0`.
pub fn qual_bound<T: Real>(inputs: &BoundInputs<T>) -> T {
    if inputs.effect == T::zero() {
        return T::zero();
    }
    let nu = T::from64((inputs.dof - 1) as f64);
    let n_effect = inputs.n_eff * inputs.effect;
    inputs.n_eff.sqrt() * inputs.effect / (nu + n_effect).sqrt()
}

/// Bound for a conditional (feature-driven) estimator: each of the `f`
/// features multiplies the parameter count, so `dof = f * p`.
pub fn qual_bound_conditional<T: Real>(
    n_eff: T,
    p_assets: usize,
    n_features: usize,
    zeta: T,
) -> Result<T> {
    if n_features < 1 {
        return Err(Error::InvalidParameter {
            name: "n_features",
            message: "at least one feature is required".into(),
        });
    }
    let inputs = BoundInputs::new(n_eff, n_features * p_assets, zeta * zeta)?;
    Ok(qual_bound(&inputs))
}

/// Squared signal-noise ratio attainable by portfolios confined to the row
/// space of `J` (a `p0 x p` full-row-rank matrix):
/// `zeta_J^2 = trace(B' J' (J Sigma J')^-1 J B Sigma_f)`.
///
/// Always in `[0, max_snr^2]`, with equality at `p0 = p`.
pub fn subspace_snr<T: Real>(model: &MarketModel<T>, j: &Mat<T>) -> Result<T> {
    projected_snr_sq(model, j)
}

/// Squared quality gap left after hedging out the rows of `G`:
/// `delta_zeta^2 = trace(B' Sigma^-1 B Sigma_f) - trace(B' G'(G Sigma G')^-1 G B Sigma_f)`.
///
/// Lies in `[0, max_snr^2]`; zero when the rows of `G` capture the whole
/// Markowitz direction, and the full `max_snr^2` when they capture none
/// of it.
pub fn hedged_snr_gap<T: Real>(model: &MarketModel<T>, g: &Mat<T>) -> Result<T> {
    let total = projected_snr_sq(model, &Mat::identity(model.p()))?;
    let captured = projected_snr_sq(model, g)?;
    // Clamp away the negative dust the subtraction can leave behind.
    Ok((total - captured).max(T::zero()))
}

fn projected_snr_sq<T: Real>(model: &MarketModel<T>, j: &Mat<T>) -> Result<T> {
    let proj = risk_projection(model.sigma(), j)?;
    let pb = proj.matmul(model.loadings())?;
    let bt_pb = model.loadings().transpose().matmul(&pb)?;
    Ok(trace_product(&bt_pb, model.feature_cov()).max(T::zero()))
}

/// Bound for an estimator hedged against `k` constraint rows: the
/// constraints remove `k` effective parameters per feature, so
/// `dof = f * (p - k)`, and the relevant effect is the squared gap
/// `delta_zeta_sq` (see [`hedged_snr_gap`]).
pub fn qual_bound_hedged<T: Real>(
    n_eff: T,
    p_assets: usize,
    hedge_k: usize,
    n_features: usize,
    delta_zeta_sq: T,
) -> Result<T> {
    if hedge_k >= p_assets {
        return Err(Error::InvalidParameter {
            name: "hedge_k",
            message: format!(
                "hedge rank must be below the asset count ({hedge_k} >= {p_assets})"
            ),
        });
    }
    if n_features < 1 {
        return Err(Error::InvalidParameter {
            name: "n_features",
            message: "at least one feature is required".into(),
        });
    }
    let inputs = BoundInputs::new(n_eff, n_features * (p_assets - hedge_k), delta_zeta_sq)?;
    Ok(qual_bound(&inputs))
}

/// Approximate median of the quality distribution.
///
/// Numerically this is the same expression as [`qual_bound`]: plugging the
/// mode of the underlying noncentral t into the quality map lands exactly
/// on the bound formula. It is exposed separately because the two are
/// conceptually different objects that merely coincide; the exact median
/// (via `qual_approx_quantile(0.5)`) can differ by a few percent — at
/// `n = 4, p = 6, zeta = 1.25` the exact median is 0.9550 while this
/// approximation gives 0.9317.
pub fn approx_median<T: Real>(inputs: &BoundInputs<T>) -> T {
    qual_bound(inputs)
}

/// Mean squared quality under the approximate law (see
/// [`ncbeta_sq_mean`]); re-exported here because it pairs with
/// [`qual_bound`] in variance sandwiches: mean-square minus squared bound
/// is a lower bound on the variance of quality.
pub fn expected_sq_quality<T: Real>(params: &QualApproxParams<T>) -> Result<T> {
    ncbeta_sq_mean(params)
}

/// Squared signal-noise ratio of a single-factor market with idiosyncratic
/// alpha: excess means `alpha`, factor loadings `beta`, idiosyncratic
/// volatility `sigma`, factor volatility `sigma_m`, i.e.
/// `Sigma = sigma^2 I + sigma_m^2 beta beta'` and `mu = alpha`:
///
/// `zeta^2 = [|a|^2 + (sm/s)^2 (|b|^2 |a|^2 - (a'b)^2)] / (s^2 + sm^2 |b|^2)`
///
/// When `alpha` and `beta` are parallel the cross term vanishes and
/// diversification saturates at `|a|^2 / (sm^2 |b|^2)`-scale; when they
/// are orthogonal the factor is hedged away for free and
/// `zeta^2 = |a|^2 / s^2`.
pub fn capm_snr<T: Real>(alpha: &[T], beta: &[T], sigma: T, sigma_m: T) -> Result<T> {
    if alpha.is_empty() || alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch(format!(
            "alpha has {} entries, beta has {}",
            alpha.len(),
            beta.len()
        )));
    }
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma",
            message: format!("idiosyncratic volatility must be positive, got {sigma}"),
        });
    }
    if !(sigma_m >= T::zero()) || !sigma_m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma_m",
            message: format!("factor volatility must be >= 0, got {sigma_m}"),
        });
    }
    let a_sq = alpha.iter().map(|&x| x * x).sum::<T>();
    let b_sq = beta.iter().map(|&x| x * x).sum::<T>();
    let ab = alpha
        .iter()
        .zip(beta)
        .map(|(&a, &b)| a * b)
        .sum::<T>();
    let ratio = sigma_m / sigma;
    // a'b is Cauchy-Schwarz-bounded by |a||b|, so the cross term is >= 0
    // up to roundoff; clamp so parallel alpha/beta cannot go negative.
    let cross = (b_sq * a_sq - ab * ab).max(T::zero());
    Ok((a_sq + ratio * ratio * cross) / (sigma * sigma + sigma_m * sigma_m * b_sq))
}

/// Is the quality bound nondecreasing in the asset count at `(n, p)`,
/// given the local growth rate `dzeta_dp` of the attainable SNR?
///
/// Differentiating the bound in `p` shows it rises exactly when
/// `dzeta_dp >= zeta / (2 n zeta^2 + 4 (p - 1))`. Callers supply the
/// derivative analytically (for a power law `zeta ~ p^gamma` it is
/// `gamma * zeta / p`) or by finite differences. Requires `zeta > 0`;
/// `p` may be any real value >= 1.
pub fn growth_condition<T: Real>(n_eff: T, p_assets: T, zeta: T, dzeta_dp: T) -> bool {
    debug_assert!(n_eff > T::zero() && p_assets >= T::one() && zeta > T::zero());
    let two = T::from64(2.0);
    let four = T::from64(4.0);
    let threshold = zeta / (two * n_eff * zeta * zeta + four * (p_assets - T::one()));
    dzeta_dp >= threshold
}

/// Quality-bound profile along a power-law diversification curve.
///
/// The attainable SNR is modeled as `zeta(p) = anchor_zeta * (p /
/// anchor_p)^gamma`; for each `p` in `p_min..=p_max` the result holds
/// `(p, zeta(p), qual_bound(n, p, zeta(p)^2))`. Whether the profile keeps
/// rising or turns over is governed by [`growth_condition`]: fast growth
/// (`gamma >= 1/4`) never turns over, slow growth eventually does.
pub fn scaling_curve<T: Real>(
    gamma: T,
    anchor_p: usize,
    anchor_zeta: T,
    n_eff: T,
    p_min: usize,
    p_max: usize,
) -> Result<Vec<(usize, T, T)>> {
    if anchor_p < 1 || !(anchor_zeta > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "anchor",
            message: "anchor requires p >= 1 and zeta > 0".into(),
        });
    }
    if p_min < 1 || p_min > p_max {
        return Err(Error::InvalidParameter {
            name: "p_range",
            message: format!("need 1 <= p_min <= p_max, got [{p_min}, {p_max}]"),
        });
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "gamma",
            message: "growth exponent must be finite".into(),
        });
    }
    let anchor = T::from64(anchor_p as f64);
    let mut out = Vec::with_capacity(p_max - p_min + 1);
    for p in p_min..=p_max {
        let zeta_p = anchor_zeta * (T::from64(p as f64) / anchor).powf(gamma);
        let bound = qual_bound(&BoundInputs::new(n_eff, p, zeta_p * zeta_p)?);
        out.push((p, zeta_p, bound));
    }
    Ok(out)
}
