//! The six subcommands: closed-form bounds, approximation queries,
//! Monte Carlo runs, grid sweeps, diversification curves, and permutation
//! studies on real returns.
//!
//! Unit policy: flags take years and annualized signal-noise ratios;
//! simulation machinery runs per-period internally and the outputs are
//! annualized again on the way out (quality scales with the square root of
//! the period count, its square with the count itself). The closed-form
//! bound and approximation commands are unit-covariant, so annual inputs
//! produce annual outputs directly.

use std::collections::HashMap;
use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use serde_json::{json, Value};

use qualbound::bounds::{
    capm_snr, expected_sq_quality, qual_bound, qual_bound_conditional, qual_bound_hedged,
    scaling_curve, BoundInputs,
};
use qualbound::dists::{qual_approx_cdf, qual_approx_quantile, QualApproxParams};
use qualbound::linalg::Mat;
use qualbound::marginals::{GeneratorConfig, MarginalKind, MuDirection, SigmaMode};
use qualbound::montecarlo::{
    permutation_snr_curve, run_experiment, sweep, Estimator, ExperimentConfig, SweepConfig,
};
use qualbound::quality::SnrMethod;
use qualbound::rng::RngStream;

use crate::support::{
    check_periods_per_year, ensure_dir, path_string, per_period_snr, render_json, resolve_seed,
    write_text, Failure, RunContext,
};

// ---------------------------------------------------------------------------
// shared flag enums

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginalArg {
    Gaussian,
    Uniform,
    T,
    Tukey,
    Lambertw,
}

impl MarginalArg {
    fn name(self) -> &'static str {
        match self {
            MarginalArg::Gaussian => "gaussian",
            MarginalArg::Uniform => "uniform",
            MarginalArg::T => "t",
            MarginalArg::Tukey => "tukey",
            MarginalArg::Lambertw => "lambertw",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaModeArg {
    Identity,
    Wishart,
}

impl SigmaModeArg {
    fn name(self) -> &'static str {
        match self {
            SigmaModeArg::Identity => "identity",
            SigmaModeArg::Wishart => "wishart",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Unbiased,
    Truncated,
}

impl MethodArg {
    fn to_method(self) -> SnrMethod {
        match self {
            MethodArg::Unbiased => SnrMethod::Unbiased,
            MethodArg::Truncated => SnrMethod::Truncated,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Unbiased => "unbiased",
            MethodArg::Truncated => "truncated",
        }
    }
}

/// Innovation-family flags shared by `simulate` and `sweep`.
#[derive(Args, Debug)]
pub struct MarginalFlags {
    /// Innovation family for the synthetic returns.
    #[arg(long, value_enum, default_value_t = MarginalArg::Gaussian)]
    pub marginal: MarginalArg,
    /// Degrees of freedom when --marginal t (must exceed 2).
    #[arg(long, default_value_t = 4.0)]
    pub t_df: f64,
    /// Tail parameter when --marginal tukey (0 <= h < 0.5).
    #[arg(long, default_value_t = 0.15)]
    pub tukey_h: f64,
    /// Skew parameter when --marginal lambertw.
    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    pub lambert_gamma: f64,
}

impl MarginalFlags {
    fn kind(&self) -> MarginalKind<f64> {
        match self.marginal {
            MarginalArg::Gaussian => MarginalKind::Gaussian,
            MarginalArg::Uniform => MarginalKind::Uniform,
            MarginalArg::T => MarginalKind::StudentT { df: self.t_df },
            MarginalArg::Tukey => MarginalKind::TukeyH { h: self.tukey_h },
            MarginalArg::Lambertw => MarginalKind::LambertW {
                gamma: self.lambert_gamma,
            },
        }
    }

    fn echo(&self) -> Value {
        json!({
            "marginal": self.marginal.name(),
            "t_df": self.t_df,
            "tukey_h": self.tukey_h,
            "lambert_gamma": self.lambert_gamma,
        })
    }
}

fn sigma_mode(arg: SigmaModeArg, wishart_df: Option<usize>) -> SigmaMode {
    match arg {
        SigmaModeArg::Identity => SigmaMode::Identity,
        SigmaModeArg::Wishart => SigmaMode::Wishart { df: wishart_df },
    }
}

// ---------------------------------------------------------------------------
// bound

/// Closed-form ceiling on the expected quality of an estimated portfolio.
#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Sample length in years of observations.
    #[arg(long)]
    pub n_years: f64,
    /// Number of assets in the universe.
    #[arg(long)]
    pub p: usize,
    /// Signal-noise ratio of the universe, annualized (units 1/sqrt(yr)).
    #[arg(long, allow_negative_numbers = true)]
    pub zeta_annual: f64,
    /// Features per asset for a conditional (signal-driven) estimator.
    #[arg(long)]
    pub f: Option<usize>,
    /// Dimension of the subspace the estimator is confined to.
    #[arg(long, conflicts_with = "hedge_k")]
    pub subspace_p0: Option<usize>,
    /// Number of hedged-out constraint rows.
    #[arg(long, requires = "delta_zeta_sq")]
    pub hedge_k: Option<usize>,
    /// Squared signal-noise gap left after hedging (annual units).
    #[arg(long, requires = "hedge_k", allow_negative_numbers = true)]
    pub delta_zeta_sq: Option<f64>,
    /// Directory for bound.json plus a run manifest (stdout only if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn bound(args: &BoundArgs) -> Result<(), Failure> {
    let ctx = RunContext::start();
    let f = args.f.unwrap_or(1);
    let (variant, dof, effect, value) = if let Some(k) = args.hedge_k {
        let gap = args.delta_zeta_sq.expect("clap pairs the hedge flags");
        let b = qual_bound_hedged(args.n_years, args.p, k, f, gap)?;
        ("hedged", f * (args.p - k), gap, b)
    } else if let Some(p0) = args.subspace_p0 {
        if p0 < 1 || p0 > args.p {
            return Err(Failure::Usage(format!(
                "--subspace-p0 must lie in 1..={} (the asset count), got {p0}",
                args.p
            )));
        }
        let b = qual_bound_conditional(args.n_years, p0, f, args.zeta_annual)?;
        ("subspace", f * p0, args.zeta_annual * args.zeta_annual, b)
    } else if args.f.is_some() {
        let b = qual_bound_conditional(args.n_years, args.p, f, args.zeta_annual)?;
        (
            "conditional",
            f * args.p,
            args.zeta_annual * args.zeta_annual,
            b,
        )
    } else {
        let inputs = BoundInputs::new(args.n_years, args.p, args.zeta_annual * args.zeta_annual)?;
        (
            "markowitz",
            args.p,
            args.zeta_annual * args.zeta_annual,
            qual_bound(&inputs),
        )
    };

    let report = json!({
        "theorem": variant,
        "n_years": args.n_years,
        "p": args.p,
        "zeta_annual": args.zeta_annual,
        "n_features": f,
        "subspace_p0": args.subspace_p0,
        "hedge_k": args.hedge_k,
        "delta_zeta_sq": args.delta_zeta_sq,
        "dof": dof,
        "effect": effect,
        "bound_annual": value,
    });
    print!("{}", render_json(&report));

    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        write_text(&dir.join("bound.json"), &render_json(&report))?;
        let params = json!({
            "n_years": args.n_years,
            "p": args.p,
            "zeta_annual": args.zeta_annual,
            "f": args.f,
            "subspace_p0": args.subspace_p0,
            "hedge_k": args.hedge_k,
            "delta_zeta_sq": args.delta_zeta_sq,
        });
        ctx.write_manifest(dir, "bound", params, None, &["bound.json"])?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// approx

/// Quantiles, cdf values, and the second moment of the quality
/// approximation.
#[derive(Args, Debug)]
#[command(group(ArgGroup::new("query").required(true).multiple(false)))]
pub struct ApproxArgs {
    /// Sample length in years of observations.
    #[arg(long)]
    pub n_years: f64,
    /// Number of assets (at least 2).
    #[arg(long)]
    pub p: usize,
    /// Signal-noise ratio, annualized.
    #[arg(long)]
    pub zeta_annual: f64,
    /// Comma-separated probability levels; emits CSV `level,value`.
    #[arg(long, value_delimiter = ',', group = "query")]
    pub quantiles: Option<Vec<f64>>,
    /// Evaluate the cdf at this annualized quality.
    #[arg(long, group = "query", allow_negative_numbers = true)]
    pub cdf_at: Option<f64>,
    /// Emit the expected squared quality (annual units).
    #[arg(long, group = "query")]
    pub mean_sq: bool,
    /// Directory for the output file plus a run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn approx(args: &ApproxArgs) -> Result<(), Failure> {
    let ctx = RunContext::start();
    let params = QualApproxParams::new(args.n_years, args.p, args.zeta_annual)?;
    let echo = json!({
        "n_years": args.n_years,
        "p": args.p,
        "zeta_annual": args.zeta_annual,
        "quantiles": args.quantiles,
        "cdf_at": args.cdf_at,
        "mean_sq": args.mean_sq,
    });

    if let Some(levels) = &args.quantiles {
        for &u in levels {
            if !(u > 0.0 && u < 1.0) {
                return Err(Failure::Usage(format!(
                    "quantile levels must lie strictly between 0 and 1, got {u}"
                )));
            }
        }
        let mut csv_text = String::from("level,value\n");
        for &u in levels {
            let q = qual_approx_quantile(u, &params)?;
            csv_text.push_str(&format!("{u},{q}\n"));
        }
        print!("{csv_text}");
        if let Some(dir) = &args.out {
            ensure_dir(dir)?;
            write_text(&dir.join("approx.csv"), &csv_text)?;
            ctx.write_manifest(dir, "approx", echo, None, &["approx.csv"])?;
        }
        return Ok(());
    }

    let report = if let Some(q) = args.cdf_at {
        let c = qual_approx_cdf(q, &params)?;
        json!({
            "n_years": args.n_years,
            "p": args.p,
            "zeta_annual": args.zeta_annual,
            "cdf_at": q,
            "cdf": c,
        })
    } else {
        let m = expected_sq_quality(&params)?;
        json!({
            "n_years": args.n_years,
            "p": args.p,
            "zeta_annual": args.zeta_annual,
            "mean_sq": m,
        })
    };
    print!("{}", render_json(&report));
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        write_text(&dir.join("approx.json"), &render_json(&report))?;
        ctx.write_manifest(dir, "approx", echo, None, &["approx.json"])?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate

/// Monte Carlo study: estimate a portfolio per replicate and score its
/// population quality.
#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Number of per-period observations in each replicate.
    #[arg(long)]
    pub n_days: usize,
    /// Trading periods per year, for unit conversion.
    #[arg(long, default_value_t = 253.0)]
    pub periods_per_year: f64,
    /// Number of assets.
    #[arg(long)]
    pub p: usize,
    /// Signal-noise ratio of the synthetic market, annualized.
    #[arg(long)]
    pub zeta_annual: f64,
    #[command(flatten)]
    pub marginal: MarginalFlags,
    /// Number of replicates.
    #[arg(long)]
    pub reps: usize,
    /// RNG seed (default: QUALBOUND_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Covariance scheme for the synthetic market.
    #[arg(long, value_enum, default_value_t = SigmaModeArg::Identity)]
    pub sigma_mode: SigmaModeArg,
    /// Wishart degrees of freedom (default 2p).
    #[arg(long)]
    pub wishart_df: Option<usize>,
    /// Draw the covariance once and reuse it across replicates.
    #[arg(long)]
    pub fix_sigma: bool,
    /// Worker threads for the replicate pool (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory for result.json, quantiles.csv, manifest.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let ctx = RunContext::start();
    check_periods_per_year(args.periods_per_year)?;
    let seed = resolve_seed(args.seed)?;
    let ppy = args.periods_per_year;

    let config = ExperimentConfig {
        generator: GeneratorConfig {
            n_obs: args.n_days,
            p_assets: args.p,
            target_snr: per_period_snr(args.zeta_annual, ppy),
            marginal: args.marginal.kind(),
            sigma_mode: sigma_mode(args.sigma_mode, args.wishart_df),
            mu_direction: MuDirection::FirstAxis,
        },
        estimator: Estimator::Markowitz,
        replicates: args.reps,
        seed,
        workers: args.workers,
        fix_sigma: args.fix_sigma,
    };
    let result = run_experiment(&config)?;

    let scale = ppy.sqrt();
    let n_years = args.n_days as f64 / ppy;
    let bound_annual = qual_bound(&BoundInputs::new(
        n_years,
        args.p,
        args.zeta_annual * args.zeta_annual,
    )?);
    let mean_annual = result.mean_q * scale;
    let mean_sq_annual = result.mean_q_sq * ppy;
    let quantiles: Vec<Value> = result
        .quantiles
        .iter()
        .map(|&(level, value)| json!({"level": level, "value": value * scale}))
        .collect();

    match result.ks_vs_approx {
        Some(d) => println!(
            "mean_q={mean_annual:.4} ks={d:.4} bound={bound_annual:.4} reps={}",
            result.replicates_used
        ),
        None => println!(
            "mean_q={mean_annual:.4} ks=na bound={bound_annual:.4} reps={}",
            result.replicates_used
        ),
    }

    let report = json!({
        "n_days": args.n_days,
        "periods_per_year": ppy,
        "n_years": n_years,
        "p": args.p,
        "zeta_annual": args.zeta_annual,
        "marginal": args.marginal.echo(),
        "sigma_mode": args.sigma_mode.name(),
        "wishart_df": args.wishart_df,
        "fix_sigma": args.fix_sigma,
        "reps": args.reps,
        "seed": seed,
        "replicates_used": result.replicates_used,
        "replicates_failed": result.replicates_failed,
        "mean_q_annual": mean_annual,
        "mean_q_sq_annual": mean_sq_annual,
        "ks": result.ks_vs_approx,
        "bound_annual": bound_annual,
        "quantiles_annual": quantiles,
    });
    let mut csv_text = String::from("level,value\n");
    for &(level, value) in &result.quantiles {
        csv_text.push_str(&format!("{level},{}\n", value * scale));
    }

    ensure_dir(&args.out)?;
    write_text(&args.out.join("result.json"), &render_json(&report))?;
    write_text(&args.out.join("quantiles.csv"), &csv_text)?;
    let params = json!({
        "n_days": args.n_days,
        "periods_per_year": ppy,
        "p": args.p,
        "zeta_annual": args.zeta_annual,
        "marginal": args.marginal.echo(),
        "sigma_mode": args.sigma_mode.name(),
        "wishart_df": args.wishart_df,
        "fix_sigma": args.fix_sigma,
        "reps": args.reps,
        "workers": args.workers,
    });
    ctx.write_manifest(
        &args.out,
        "simulate",
        params,
        Some(seed),
        &["result.json", "quantiles.csv"],
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

/// Grid of simulation experiments over sample length, universe size, and
/// signal-noise ratio.
#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Comma-separated sample lengths in years.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_years_list: Vec<f64>,
    /// Comma-separated asset counts (each at least 2).
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_list: Vec<usize>,
    /// Comma-separated annualized signal-noise ratios.
    #[arg(long, value_delimiter = ',', required = true)]
    pub zeta_list: Vec<f64>,
    /// Trading periods per year, for unit conversion.
    #[arg(long, default_value_t = 253.0)]
    pub periods_per_year: f64,
    #[command(flatten)]
    pub marginal: MarginalFlags,
    /// Covariance scheme for the synthetic markets.
    #[arg(long, value_enum, default_value_t = SigmaModeArg::Identity)]
    pub sigma_mode: SigmaModeArg,
    /// Wishart degrees of freedom (default 2p).
    #[arg(long)]
    pub wishart_df: Option<usize>,
    /// Replicates per grid cell.
    #[arg(long)]
    pub reps: usize,
    /// RNG seed (default: QUALBOUND_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for the replicate pool.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory for sweep.csv and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<(), Failure> {
    let ctx = RunContext::start();
    check_periods_per_year(args.periods_per_year)?;
    let seed = resolve_seed(args.seed)?;
    let ppy = args.periods_per_year;
    let scale = ppy.sqrt();

    // Convert user units to internal per-period ones, remembering the
    // original values so the CSV echoes exactly what was asked for.
    let mut years_of = HashMap::new();
    let mut n_obs_list = Vec::new();
    for &y in &args.n_years_list {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Failure::Usage(format!(
                "--n-years-list entries must be positive and finite, got {y}"
            )));
        }
        let days = (y * ppy).round() as usize;
        if days < 2 {
            return Err(Failure::Usage(format!(
                "{y} years at {ppy} periods/year gives {days} observations; need at least 2"
            )));
        }
        years_of.entry(days).or_insert(y);
        n_obs_list.push(days);
    }
    let mut annual_of = HashMap::new();
    let mut snr_list = Vec::new();
    for &z in &args.zeta_list {
        let zp = per_period_snr(z, ppy);
        annual_of.entry(zp.to_bits()).or_insert(z);
        snr_list.push(zp);
    }

    let config = SweepConfig {
        n_obs_list,
        p_list: args.p_list.clone(),
        snr_list,
        marginal: args.marginal.kind(),
        sigma_mode: sigma_mode(args.sigma_mode, args.wishart_df),
        replicates: args.reps,
        seed,
        workers: args.workers,
    };
    let cells = sweep(&config)?;

    let mut csv_text = String::from("n,p,zeta,ks,mean_q,bound\n");
    let mut failed = 0usize;
    for cell in &cells {
        let n_years = years_of
            .get(&cell.n_obs)
            .copied()
            .unwrap_or(cell.n_obs as f64 / ppy);
        let zeta_annual = annual_of
            .get(&cell.target_snr.to_bits())
            .copied()
            .unwrap_or(cell.target_snr * scale);
        let bound_annual = cell.bound * scale;
        match &cell.outcome {
            Ok(stats) => {
                csv_text.push_str(&format!(
                    "{n_years},{},{zeta_annual},{},{},{bound_annual}\n",
                    cell.p_assets,
                    stats.ks,
                    stats.mean_q * scale,
                ));
            }
            Err(e) => {
                failed += 1;
                eprintln!(
                    "warning: cell (n={n_years}, p={}, zeta={zeta_annual}) failed: {e}",
                    cell.p_assets
                );
                csv_text.push_str(&format!(
                    "{n_years},{},{zeta_annual},,,{bound_annual}\n",
                    cell.p_assets
                ));
            }
        }
    }

    ensure_dir(&args.out)?;
    write_text(&args.out.join("sweep.csv"), &csv_text)?;
    let params = json!({
        "n_years_list": args.n_years_list,
        "p_list": args.p_list,
        "zeta_list": args.zeta_list,
        "periods_per_year": ppy,
        "marginal": args.marginal.echo(),
        "sigma_mode": args.sigma_mode.name(),
        "wishart_df": args.wishart_df,
        "reps": args.reps,
        "workers": args.workers,
    });
    ctx.write_manifest(&args.out, "sweep", params, Some(seed), &["sweep.csv"])?;
    println!("cells={} failed={failed} out={}", cells.len(), args.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// diversify

/// Bound-versus-universe-size curves under a power-law signal growth or a
/// one-factor market.
#[derive(Args, Debug)]
pub struct DiversifyArgs {
    /// Comma-separated growth exponents gamma; signal grows as
    /// zeta(p) = anchor_zeta * (p / anchor_p)^gamma.
    #[arg(long, value_delimiter = ',', required_unless_present = "capm", allow_negative_numbers = true)]
    pub gamma_list: Option<Vec<f64>>,
    /// Universe size the growth law is anchored at.
    #[arg(long)]
    pub anchor_p: Option<usize>,
    /// Annualized signal-noise ratio at the anchor size.
    #[arg(long)]
    pub anchor_zeta: Option<f64>,
    /// Sample length in years.
    #[arg(long)]
    pub n_years: f64,
    /// Smallest universe size on the curve.
    #[arg(long, default_value_t = 1)]
    pub p_min: usize,
    /// Largest universe size on the curve.
    #[arg(long)]
    pub p_max: usize,
    /// alpha,beta,sigma,sigma_m of an equal-alpha, equal-beta one-factor
    /// market; adds a curve where the signal comes from the factor model.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub capm: Option<Vec<f64>>,
    /// Directory for diversify.csv plus a run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn diversify(args: &DiversifyArgs) -> Result<(), Failure> {
    let ctx = RunContext::start();
    let mut csv_text = String::from("curve,p,zeta,bound\n");

    if let Some(gammas) = &args.gamma_list {
        let (anchor_p, anchor_zeta) = match (args.anchor_p, args.anchor_zeta) {
            (Some(p), Some(z)) => (p, z),
            _ => {
                return Err(Failure::Usage(
                    "--gamma-list requires --anchor-p and --anchor-zeta".into(),
                ))
            }
        };
        for &gamma in gammas {
            let curve = scaling_curve(
                gamma,
                anchor_p,
                anchor_zeta,
                args.n_years,
                args.p_min,
                args.p_max,
            )?;
            for (p, zeta, bound) in curve {
                csv_text.push_str(&format!("gamma={gamma},{p},{zeta},{bound}\n"));
            }
        }
    }

    if let Some(capm) = &args.capm {
        let [alpha, beta, sigma, sigma_m] = match capm.as_slice() {
            &[a, b, s, sm] => [a, b, s, sm],
            other => {
                return Err(Failure::Usage(format!(
                    "--capm takes exactly alpha,beta,sigma,sigma_m (got {} values)",
                    other.len()
                )))
            }
        };
        for p in args.p_min..=args.p_max {
            let snr_sq = capm_snr(&vec![alpha; p], &vec![beta; p], sigma, sigma_m)?;
            let bound = qual_bound(&BoundInputs::new(args.n_years, p, snr_sq)?);
            csv_text.push_str(&format!("capm,{p},{},{bound}\n", snr_sq.sqrt()));
        }
    }

    print!("{csv_text}");
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        write_text(&dir.join("diversify.csv"), &csv_text)?;
        let params = json!({
            "gamma_list": args.gamma_list,
            "anchor_p": args.anchor_p,
            "anchor_zeta": args.anchor_zeta,
            "n_years": args.n_years,
            "p_min": args.p_min,
            "p_max": args.p_max,
            "capm": args.capm,
        });
        ctx.write_manifest(dir, "diversify", params, None, &["diversify.csv"])?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// empirical

/// Permutation study of the estimated signal-noise ratio on a real returns
/// panel: quartiles of the estimate over random asset orderings, per
/// universe-prefix size.
#[derive(Args, Debug)]
pub struct EmpiricalArgs {
    /// CSV of simple returns: header row of asset identifiers, one row per
    /// period, decimal returns.
    #[arg(long)]
    pub returns_csv: PathBuf,
    /// Trading periods per year, for annualizing the estimates.
    #[arg(long, default_value_t = 253.0)]
    pub periods_per_year: f64,
    /// Number of random asset-order permutations.
    #[arg(long, default_value_t = 1000)]
    pub n_perm: usize,
    /// Adjustment applied to the raw squared-SNR estimate.
    #[arg(long, value_enum, default_value_t = MethodArg::Truncated)]
    pub method: MethodArg,
    /// RNG seed (default: QUALBOUND_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for empirical.csv and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parse the returns panel, dropping assets with missing or unparseable
/// values (with a warning) and rejecting ragged rows.
fn read_returns(path: &PathBuf) -> Result<(Vec<String>, Mat<f64>), Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let ids: Vec<String> = reader
        .headers()
        .map_err(|e| Failure::Usage(format!("bad CSV header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let width = ids.len();
    if width == 0 {
        return Err(Failure::Usage("returns CSV has an empty header".into()));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    // First line at which each asset went bad, if any.
    let mut bad_line: Vec<Option<u64>> = vec![None; width];
    for record in reader.records() {
        let record = record.map_err(|e| Failure::Usage(format!("CSV parse error: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != width {
            return Err(Failure::Usage(format!(
                "ragged returns CSV: line {line} has {} fields, expected {width}",
                record.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => columns[j].push(v),
                _ => {
                    bad_line[j].get_or_insert(line);
                    columns[j].push(f64::NAN);
                }
            }
        }
    }

    let mut kept_ids = Vec::new();
    let mut kept_cols = Vec::new();
    for (j, id) in ids.iter().enumerate() {
        if let Some(line) = bad_line[j] {
            eprintln!(
                "warning: dropping asset {id}: missing or unparseable value at line {line}"
            );
        } else {
            kept_ids.push(id.clone());
            kept_cols.push(std::mem::take(&mut columns[j]));
        }
    }
    if kept_ids.is_empty() {
        return Err(Failure::Usage(
            "no assets with complete histories in the returns CSV".into(),
        ));
    }
    let n = kept_cols[0].len();
    if n == 0 {
        return Err(Failure::Usage("returns CSV has no data rows".into()));
    }
    let mat = Mat::from_fn(n, kept_ids.len(), |i, j| kept_cols[j][i]);
    Ok((kept_ids, mat))
}

pub fn empirical(args: &EmpiricalArgs) -> Result<(), Failure> {
    let ctx = RunContext::start();
    check_periods_per_year(args.periods_per_year)?;
    let seed = resolve_seed(args.seed)?;
    let (ids, returns) = read_returns(&args.returns_csv)?;

    // A constant asset makes the full-universe covariance exactly singular,
    // so no permutation can price the largest prefix. Catch it up front with
    // an exact check; rounding can otherwise leave a dust variance that
    // slips past relative pivot tolerances. (Too-short panels are left to
    // the estimator's own precondition error below.)
    if returns.rows() > returns.cols() {
        for (j, id) in ids.iter().enumerate() {
            let col = returns.col(j);
            if col.iter().all(|&v| v == col[0]) {
                return Err(Failure::Runtime(format!(
                    "asset {id} is constant: the sample covariance is singular"
                )));
            }
        }
    }

    let mut rng = RngStream::new(seed, 0);
    let curve = permutation_snr_curve(&returns, args.n_perm, args.method.to_method(), &mut rng)?;
    if curve.iter().all(|row| row.used == 0) {
        return Err(Failure::Runtime(
            "sample covariance is singular for every permutation and prefix size".into(),
        ));
    }

    let scale = args.periods_per_year.sqrt();
    let mut csv_text = String::from("p,q25,q50,q75\n");
    for row in &curve {
        if row.used == 0 {
            eprintln!(
                "warning: prefix size {} was singular in all {} permutations",
                row.k, args.n_perm
            );
        }
        csv_text.push_str(&format!(
            "{},{},{},{}\n",
            row.k,
            row.q25 * scale,
            row.q50 * scale,
            row.q75 * scale,
        ));
    }

    ensure_dir(&args.out)?;
    write_text(&args.out.join("empirical.csv"), &csv_text)?;
    let params = json!({
        "returns_csv": path_string(&args.returns_csv),
        "periods_per_year": args.periods_per_year,
        "n_perm": args.n_perm,
        "method": args.method.name(),
        "assets_used": ids,
    });
    ctx.write_manifest(
        &args.out,
        "empirical",
        params,
        Some(seed),
        &["empirical.csv"],
    )?;
    println!(
        "assets={} periods={} out={}",
        ids.len(),
        returns.rows(),
        args.out.display()
    );
    Ok(())
}
