//! Replicated portfolio-construction experiments.
//!
//! Each replicate builds a market, samples returns from it, estimates a
//! portfolio from the sample alone, and scores that portfolio's quality
//! against the population model. Aggregated quantiles, moments, and
//! Kolmogorov-Smirnov distances to the closed-form approximation are
//! collected over many replicates; grids of such experiments and
//! permutation curves over real return data build on the same machinery.
//!
//! Replicates are keyed by index to dedicated RNG streams, so results are
//! bitwise reproducible for a fixed `(seed, replicates)` pair no matter
//! how many worker threads participate.

use std::time::Instant;

use rayon::prelude::*;

use crate::bounds::{qual_bound, BoundInputs};
use crate::dists::{ks_statistic, qual_approx_cdf, QualApproxParams};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower_partial, solve_psd, Mat, SymMatrix};
use crate::marginals::{
    build_market, sample_returns, GeneratorConfig, MarginalKind, MuDirection, SigmaMode,
};
use crate::quality::{
    conditional_markowitz, conditional_qual, hedge_transform, qual, risk_projection,
    sample_moments, snr_adjust, MarketModel, Portfolio, ReturnsSample, SnrMethod,
};
use crate::real::Real;
use crate::rng::{shuffle_in_place, RngStream};
use rand::Rng;

/// Quantile levels reported by every experiment.
pub const DEFAULT_QUANTILE_LEVELS: [f64; 8] =
    [0.005, 0.01, 0.025, 0.05, 0.25, 0.5, 0.75, 0.9];

/// Largest number of raw quality draws retained for KS evaluation; beyond
/// this a stratified subsample of evenly spaced order statistics is kept.
const RETAIN_MAX: usize = 10_000_000;
const SUBSAMPLE_SIZE: usize = 1_000_000;

/// Fraction of replicates allowed to fail before the experiment errors.
const FAILURE_LIMIT: f64 = 0.001;

/// Stream id reserved for the market draw when the experiment fixes one
/// market across replicates; replicate streams count up from zero and can
/// never collide with it.
const FIXED_MARKET_STREAM: u64 = u64::MAX;

/// Portfolio-construction rule applied to each replicate's sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimator<T> {
    /// Sample Markowitz weights `Sigma_hat^-1 mu_hat`.
    Markowitz,
    /// Feature-conditional Markowitz with `n_features` features: a leading
    /// intercept column plus `n_features - 1` standard-normal features
    /// drawn fresh per replicate (carrying no true signal).
    Conditional { n_features: usize },
    /// Sample Markowitz weights hedged against the rows of `g` using the
    /// sample covariance.
    Hedged { g: Mat<T> },
    /// Markowitz restricted to the row space of `j`:
    /// `J'(J Sigma_hat J')^-1 J mu_hat`.
    Subspace { j: Mat<T> },
}

impl<T> Estimator<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Markowitz => "markowitz",
            Estimator::Conditional { .. } => "conditional",
            Estimator::Hedged { .. } => "hedged",
            Estimator::Subspace { .. } => "subspace",
        }
    }
}

/// Full description of one replicated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    pub generator: GeneratorConfig<T>,
    pub estimator: Estimator<T>,
    pub replicates: usize,
    pub seed: u64,
    /// Worker threads; `None` runs on the global thread pool.
    pub workers: Option<usize>,
    /// Draw the market once per experiment instead of once per replicate.
    pub fix_sigma: bool,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidParameter {
                name: "replicates",
                message: "at least one replicate is required".into(),
            });
        }
        self.generator.validate()?;
        let p = self.generator.p_assets;
        match &self.estimator {
            Estimator::Markowitz => {}
            Estimator::Conditional { n_features } => {
                if *n_features < 1 {
                    return Err(Error::InvalidParameter {
                        name: "n_features",
                        message: "conditional estimator needs at least the intercept".into(),
                    });
                }
            }
            Estimator::Hedged { g } => {
                if g.cols() != p || g.rows() == 0 || g.rows() > p {
                    return Err(Error::DimensionMismatch(format!(
                        "hedge matrix is {}x{} against {} assets",
                        g.rows(),
                        g.cols(),
                        p
                    )));
                }
            }
            Estimator::Subspace { j } => {
                if j.cols() != p || j.rows() == 0 || j.rows() > p {
                    return Err(Error::DimensionMismatch(format!(
                        "subspace matrix is {}x{} against {} assets",
                        j.rows(),
                        j.cols(),
                        p
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Aggregates of one replicated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentResult<T> {
    /// `(level, value)` pairs at [`DEFAULT_QUANTILE_LEVELS`], values
    /// nondecreasing in level.
    pub quantiles: Vec<(T, T)>,
    pub mean_q: T,
    pub mean_q_sq: T,
    /// KS distance to the closed-form approximation, when the generator
    /// parameters admit one (`p >= 2`, positive SNR).
    pub ks_vs_approx: Option<T>,
    pub replicates_used: usize,
    pub replicates_failed: usize,
    /// Echo of the configuration that produced this result.
    pub config: ExperimentConfig<T>,
    pub wall_secs: f64,
    sorted_sample: Vec<T>,
}

impl<T: Real> ExperimentResult<T> {
    /// Retained quality draws, ascending. The full set when at most ten
    /// million replicates ran, a stratified million-point subsample of
    /// order statistics otherwise.
    pub fn sorted_sample(&self) -> &[T] {
        &self.sorted_sample
    }
}

/// Run one replicated experiment. Failed replicates (singular sample
/// covariance and the like) are excluded rather than resampled to keep
/// stream determinism, but at most 0.1% of them may fail.
pub fn run_experiment<T: Real>(config: &ExperimentConfig<T>) -> Result<ExperimentResult<T>> {
    config.validate()?;
    let start = Instant::now();

    let fixed_model = if config.fix_sigma {
        let mut rng = RngStream::new(config.seed, FIXED_MARKET_STREAM);
        Some(build_market(&config.generator, &mut rng)?)
    } else {
        None
    };

    let run = || -> Vec<std::result::Result<T, Error>> {
        (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| run_replicate(config, fixed_model.as_ref(), r))
            .collect()
    };
    let outcomes = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "workers",
                message: e.to_string(),
            })?
            .install(run),
        None => run(),
    };

    // Sequential aggregation in replicate order: worker-count independent.
    let total = outcomes.len();
    let mut qs = Vec::with_capacity(total);
    let mut failed = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(q) => qs.push(q),
            Err(_) => failed += 1,
        }
    }
    if failed as f64 > FAILURE_LIMIT * total as f64 {
        return Err(Error::TooManyFailures {
            failed,
            total,
            percent_limit: FAILURE_LIMIT * 100.0,
        });
    }

    let used = qs.len();
    let n_t = T::from64(used as f64);
    let mean_q = qs.iter().copied().sum::<T>() / n_t;
    let mean_q_sq = qs.iter().map(|&q| q * q).sum::<T>() / n_t;

    let mut sorted = qs;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("replicate qualities are finite"));
    let quantiles = DEFAULT_QUANTILE_LEVELS
        .iter()
        .map(|&u| {
            let level = T::from64(u);
            (level, quantile_sorted(&sorted, level))
        })
        .collect();
    let sorted_sample = stratified_subsample(sorted, RETAIN_MAX, SUBSAMPLE_SIZE);

    let gen = &config.generator;
    let ks_vs_approx = if gen.p_assets >= 2 && gen.target_snr > T::zero() {
        let params = QualApproxParams::new(
            T::from64(gen.n_obs as f64),
            gen.p_assets,
            gen.target_snr,
        )?;
        Some(ks_statistic(&sorted_sample, |q| qual_approx_cdf(q, &params))?)
    } else {
        None
    };

    Ok(ExperimentResult {
        quantiles,
        mean_q,
        mean_q_sq,
        ks_vs_approx,
        replicates_used: used,
        replicates_failed: failed,
        config: config.clone(),
        wall_secs: start.elapsed().as_secs_f64(),
        sorted_sample,
    })
}

fn run_replicate<T: Real>(
    config: &ExperimentConfig<T>,
    fixed_model: Option<&MarketModel<T>>,
    replicate: u64,
) -> std::result::Result<T, Error> {
    let mut rng = RngStream::new(config.seed, replicate);
    let model = match fixed_model {
        Some(m) => m.clone(),
        None => build_market(&config.generator, &mut rng)?,
    };
    let sample = sample_returns(&model, config.generator.n_obs, &config.generator.marginal, &mut rng)?;
    let q = match &config.estimator {
        Estimator::Markowitz => {
            let port = crate::quality::markowitz(&sample)?;
            qual(&port, &model)?
        }
        Estimator::Conditional { n_features } => {
            let f = *n_features;
            let n = sample.n_obs();
            // Features are drawn after the returns from the same stream:
            // an intercept plus exogenous noise carrying no signal.
            let features = Mat::from_fn(n, f, |_, j| {
                if j == 0 {
                    T::one()
                } else {
                    T::standard_normal(&mut rng)
                }
            });
            let with_features = ReturnsSample::with_features(sample.returns().clone(), features)?;
            let est = conditional_markowitz(&with_features)?;
            // The implied population structure: the intercept carries the
            // whole mean, the noise features carry nothing, and the
            // feature second-moment matrix is the identity.
            let mu = model.mu().expect("generators build unconditional models");
            let b = Mat::from_fn(model.p(), f, |i, j| if j == 0 { mu[i] } else { T::zero() });
            let cond_model =
                MarketModel::conditional(b, SymMatrix::identity(f), model.sigma().clone())?;
            match est {
                Portfolio::Matrix(w) => conditional_qual(&w, &cond_model)?,
                Portfolio::Vector(_) => unreachable!("conditional estimator yields a matrix"),
            }
        }
        Estimator::Hedged { g } => {
            let (mean, cov) = estimate_moments_checked(&sample)?;
            let w = solve_psd(&cov, &mean)
                .map_err(|e| Error::SingularCovariance(e.to_string()))?;
            let w_h = hedge_transform(&w, &cov, g)?;
            qual(&Portfolio::Vector(w_h), &model)?
        }
        Estimator::Subspace { j } => {
            let (mean, cov) = estimate_moments_checked(&sample)?;
            let proj = risk_projection(&cov, j)?;
            let w = proj.mat_vec(&mean)?;
            qual(&Portfolio::Vector(w), &model)?
        }
    };
    if !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "quality",
            message: "replicate produced a non-finite quality".into(),
        });
    }
    Ok(q)
}

fn estimate_moments_checked<T: Real>(
    sample: &ReturnsSample<T>,
) -> Result<(Vec<T>, SymMatrix<T>)> {
    let (n, p) = (sample.n_obs(), sample.p());
    if n < p + 2 {
        return Err(Error::InsufficientObservations { needed: p + 2, got: n });
    }
    sample_moments(sample)
}

/// Type-7 (linear interpolation) quantile of an ascending-sorted sample.
fn quantile_sorted<T: Real>(sorted: &[T], level: T) -> T {
    let n = sorted.len();
    debug_assert!(n > 0 && level >= T::zero() && level <= T::one());
    if n == 1 {
        return sorted[0];
    }
    let h = T::from64((n - 1) as f64) * level;
    let lo = (h.floor().to64() as usize).min(n - 2);
    let frac = h - T::from64(lo as f64);
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Keep the whole sorted sample up to `retain_max` entries; above that,
/// keep `target` evenly spaced order statistics.
fn stratified_subsample<T: Copy>(sorted: Vec<T>, retain_max: usize, target: usize) -> Vec<T> {
    let n = sorted.len();
    if n <= retain_max {
        return sorted;
    }
    (0..target)
        .map(|k| sorted[(2 * k + 1) * n / (2 * target)])
        .collect()
}

/// KS distance between an experiment's retained quality draws and the
/// closed-form approximation with the given parameters.
pub fn ks_vs_approximation<T: Real>(
    result: &ExperimentResult<T>,
    params: &QualApproxParams<T>,
) -> Result<T> {
    ks_statistic(result.sorted_sample(), |q| qual_approx_cdf(q, params))
}

/// Grid of Markowitz experiments over sample sizes, asset counts, and
/// signal-noise ratios.
#[derive(Debug, Clone)]
pub struct SweepConfig<T> {
    pub n_obs_list: Vec<usize>,
    pub p_list: Vec<usize>,
    pub snr_list: Vec<T>,
    pub marginal: MarginalKind<T>,
    pub sigma_mode: SigmaMode,
    pub replicates: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

/// One cell of a sweep. `bound` is the closed-form quality bound at the
/// cell parameters (same time-units as the inputs); `outcome` carries the
/// simulation aggregates, or the error if the cell failed.
#[derive(Debug, Clone)]
pub struct SweepCell<T> {
    pub n_obs: usize,
    pub p_assets: usize,
    pub target_snr: T,
    pub bound: T,
    pub outcome: std::result::Result<SweepStats<T>, Error>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepStats<T> {
    pub ks: T,
    pub mean_q: T,
    pub mean_q_sq: T,
    pub replicates_used: usize,
}

/// Run a full grid, one Markowitz experiment per `(n, p, zeta)` cell,
/// in ascending lexicographic cell order. Cell failures are recorded in
/// the cell rather than aborting the sweep.
pub fn sweep<T: Real>(config: &SweepConfig<T>) -> Result<Vec<SweepCell<T>>> {
    if config.n_obs_list.is_empty() || config.p_list.is_empty() || config.snr_list.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            message: "sweep needs nonempty n, p, and SNR lists".into(),
        });
    }
    if config.p_list.iter().any(|&p| p < 2) {
        return Err(Error::InvalidParameter {
            name: "p_list",
            message: "sweep cells need at least 2 assets".into(),
        });
    }
    if config.snr_list.iter().any(|z| !(*z > T::zero()) || !z.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "snr_list",
            message: "sweep SNR values must be positive and finite".into(),
        });
    }
    let mut n_list = config.n_obs_list.clone();
    n_list.sort_unstable();
    n_list.dedup();
    let mut p_list = config.p_list.clone();
    p_list.sort_unstable();
    p_list.dedup();
    let mut z_list = config.snr_list.clone();
    z_list.sort_by(|a, b| a.partial_cmp(b).expect("finite SNR values"));
    z_list.dedup();

    let mut out = Vec::with_capacity(n_list.len() * p_list.len() * z_list.len());
    let mut cell_index = 0u64;
    for &n_obs in &n_list {
        for &p_assets in &p_list {
            for &target_snr in &z_list {
                let cell_seed = mix_seed(config.seed, cell_index);
                cell_index += 1;
                let generator = GeneratorConfig {
                    n_obs,
                    p_assets,
                    target_snr,
                    marginal: config.marginal,
                    sigma_mode: config.sigma_mode,
                    mu_direction: MuDirection::FirstAxis,
                };
                let experiment = ExperimentConfig {
                    generator,
                    estimator: Estimator::Markowitz,
                    replicates: config.replicates,
                    seed: cell_seed,
                    workers: config.workers,
                    fix_sigma: false,
                };
                let bound = qual_bound(&BoundInputs::new(
                    T::from64(n_obs as f64),
                    p_assets,
                    target_snr * target_snr,
                )?);
                let outcome = run_experiment(&experiment).map(|r| SweepStats {
                    ks: r
                        .ks_vs_approx
                        .expect("sweep cells have p >= 2 and positive SNR"),
                    mean_q: r.mean_q,
                    mean_q_sq: r.mean_q_sq,
                    replicates_used: r.replicates_used,
                });
                out.push(SweepCell {
                    n_obs,
                    p_assets,
                    target_snr,
                    bound,
                    outcome,
                });
            }
        }
    }
    Ok(out)
}

/// splitmix64 output stream: decorrelates per-cell seeds so no two cells
/// share replicate RNG streams.
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Quartiles of the estimated SNR over asset-order permutations, per
/// universe-prefix size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixQuantiles<T> {
    /// Number of assets in the prefix.
    pub k: usize,
    pub q25: T,
    pub q50: T,
    pub q75: T,
    /// Permutations that contributed a value at this prefix size.
    pub used: usize,
    /// Permutations skipped because the prefix covariance was singular.
    pub skipped: usize,
}

/// Estimated-SNR growth curve over random asset orderings.
///
/// For each of `n_perm` random permutations of the asset order and each
/// prefix size `k`, estimates the squared SNR attainable with the first
/// `k` assets and records `sqrt(max(0, estimate))`; returns per-`k`
/// quartiles across permutations.
///
/// Sample moments are computed once; each permutation reindexes them and
/// factors the permuted covariance a single time, which prices all `p`
/// prefixes together: the forward-substitution solution of `L y = mu`
/// is causal, so the prefix statistic is a running sum of `y_i^2`.
/// Prefixes whose covariance is numerically singular are skipped and
/// counted in [`PrefixQuantiles::skipped`]; a prefix no permutation could
/// price carries NaN quartiles with `used = 0`.
pub fn permutation_snr_curve<T: Real, R: Rng + ?Sized>(
    returns: &Mat<T>,
    n_perm: usize,
    method: SnrMethod,
    rng: &mut R,
) -> Result<Vec<PrefixQuantiles<T>>> {
    let n = returns.rows();
    let p = returns.cols();
    if n_perm < 1 {
        return Err(Error::InvalidParameter {
            name: "n_perm",
            message: "at least one permutation is required".into(),
        });
    }
    if n <= p {
        return Err(Error::InsufficientObservations { needed: p + 1, got: n });
    }
    let sample = ReturnsSample::new(returns.clone())?;
    let (mean, cov) = sample_moments(&sample)?;

    let mut order: Vec<usize> = (0..p).collect();
    let mut per_k: Vec<Vec<T>> = vec![Vec::with_capacity(n_perm); p];
    for _ in 0..n_perm {
        shuffle_in_place(&mut order, rng);
        let cov_perm = SymMatrix::from_fn(p, |i, j| cov.get(order[i], order[j]));
        let (l, rank) = cholesky_lower_partial(&cov_perm);
        let mut y = vec![T::zero(); rank];
        for i in 0..rank {
            let mut acc = mean[order[i]];
            for j in 0..i {
                acc -= l[(i, j)] * y[j];
            }
            y[i] = acc / l[(i, i)];
        }
        let mut z_sq = T::zero();
        for (k, &yi) in y.iter().enumerate() {
            z_sq += yi * yi;
            let est = snr_adjust(z_sq, n, k + 1, method);
            per_k[k].push(est.max(T::zero()).sqrt());
        }
    }

    Ok(per_k
        .into_iter()
        .enumerate()
        .map(|(i, mut vals)| {
            let used = vals.len();
            let skipped = n_perm - used;
            if used == 0 {
                PrefixQuantiles {
                    k: i + 1,
                    q25: T::nan(),
                    q50: T::nan(),
                    q75: T::nan(),
                    used,
                    skipped,
                }
            } else {
                vals.sort_by(|a, b| a.partial_cmp(b).expect("finite SNR estimates"));
                PrefixQuantiles {
                    k: i + 1,
                    q25: quantile_sorted(&vals, T::from64(0.25)),
                    q50: quantile_sorted(&vals, T::from64(0.5)),
                    q75: quantile_sorted(&vals, T::from64(0.75)),
                    used,
                    skipped,
                }
            }
        })
        .collect())
}
