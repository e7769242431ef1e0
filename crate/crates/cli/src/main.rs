//! `qualbound` — ceilings and distributions for the out-of-sample quality
//! of estimated portfolios, plus the Monte Carlo machinery to check them.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags or malformed
//! inputs), 3 for runtime or numerical failures.

mod commands;
mod support;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qualbound",
    version,
    about = "Upper bounds, approximate distributions, and Monte Carlo studies \
             of estimated-portfolio quality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form upper bound on expected portfolio quality (JSON).
    Bound(commands::BoundArgs),
    /// Quantiles, cdf values, or second moment of the quality approximation.
    Approx(commands::ApproxArgs),
    /// Monte Carlo replication study of an estimated portfolio.
    Simulate(commands::SimulateArgs),
    /// Grid of simulation experiments over (n, p, zeta).
    Sweep(commands::SweepArgs),
    /// Bound-versus-universe-size curves under a signal growth law.
    Diversify(commands::DiversifyArgs),
    /// Permutation study of estimated signal-noise ratio on real returns.
    Empirical(commands::EmpiricalArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bound(args) => commands::bound(args),
        Command::Approx(args) => commands::approx(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Sweep(args) => commands::sweep_cmd(args),
        Command::Diversify(args) => commands::diversify(args),
        Command::Empirical(args) => commands::empirical(args),
    };
    if let Err(failure) = outcome {
        eprintln!("error: {failure}");
        std::process::exit(failure.exit_code());
    }
}
