//! Upper bounds and approximate distributions for the out-of-sample
//! quality of estimated portfolios.
//!
//! The quality of a portfolio `w` against a market with mean `mu` and
//! covariance `Sigma` is its population signal-noise ratio
//! `q(w) = w'mu / sqrt(w'Sigma w)`; the best attainable value is
//! `zeta = sqrt(mu'Sigma^-1 mu)`, reached by the Markowitz portfolio.
//! When the portfolio must be *estimated* from `n` observations, its
//! expected quality falls short of `zeta` in a way that depends only on
//! `n`, the number of estimated parameters, and `zeta` itself. This crate
//! provides:
//!
//! - closed-form upper bounds on that expected quality, including
//!   feature-conditional, subspace-constrained, and hedged variants
//!   ([`bounds`]);
//! - the approximate distribution of the estimated portfolio's quality —
//!   a transformed noncentral t — with CDF, quantiles, sampling, and mean
//!   square ([`dists`]);
//! - quality evaluation, Markowitz-type estimators, risk projections, and
//!   SNR estimation over return samples ([`quality`]);
//! - replicated Monte Carlo experiments, parameter sweeps, and
//!   permutation curves for empirical return data ([`montecarlo`]),
//!   driven by standardized non-Gaussian innovation families
//!   ([`marginals`]) and reproducible streamed RNG ([`rng`]).
//!
//! Everything is generic over the scalar type via [`Real`] (implemented
//! for `f32` and `f64`); the `*64` aliases at the crate root pin the
//! common double-precision instantiations.
//!
//! Units: bounds and distribution parameters take `n` and `zeta` in
//! matching units (the product `n * zeta^2` is unitless), so passing
//! years alongside an annualized SNR yields annualized results.
//!
//! ```
//! use qualbound::{bounds, dists};
//!
//! // Four years of daily data, six assets, attainable SNR 1.25 per
//! // square-root year.
//! let inputs = qualbound::BoundInputs64::new(4.0, 6, 1.25f64.powi(2)).unwrap();
//! let bound = bounds::qual_bound(&inputs);
//! assert!((bound - 0.9317).abs() < 5e-4);
//!
//! // Median of the approximate quality distribution at the same point.
//! let params = qualbound::QualApproxParams64::new(4.0, 6, 1.25).unwrap();
//! let median = dists::qual_approx_quantile(0.5, &params).unwrap();
//! assert!((median - 0.9550).abs() < 5e-4);
//! ```

pub mod bounds;
pub mod dists;
pub mod error;
pub mod linalg;
pub mod marginals;
pub mod montecarlo;
pub mod quality;
pub mod real;
pub mod rng;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision matrix.
pub type Mat64 = linalg::Mat<f64>;
/// Double-precision symmetric matrix.
pub type SymMatrix64 = linalg::SymMatrix<f64>;
/// Double-precision market model.
pub type MarketModel64 = quality::MarketModel<f64>;
/// Double-precision portfolio.
pub type Portfolio64 = quality::Portfolio<f64>;
/// Double-precision returns sample.
pub type ReturnsSample64 = quality::ReturnsSample<f64>;
/// Double-precision bound inputs.
pub type BoundInputs64 = bounds::BoundInputs<f64>;
/// Double-precision quality-approximation parameters.
pub type QualApproxParams64 = dists::QualApproxParams<f64>;
/// Double-precision innovation family.
pub type MarginalKind64 = marginals::MarginalKind<f64>;
/// Double-precision market generator configuration.
pub type GeneratorConfig64 = marginals::GeneratorConfig<f64>;
/// Double-precision estimator choice.
pub type Estimator64 = montecarlo::Estimator<f64>;
/// Double-precision experiment configuration.
pub type ExperimentConfig64 = montecarlo::ExperimentConfig<f64>;
/// Double-precision experiment result.
pub type ExperimentResult64 = montecarlo::ExperimentResult<f64>;
/// Double-precision sweep configuration.
pub type SweepConfig64 = montecarlo::SweepConfig<f64>;
