use anyhow::Context;
use clap::Parser;
use std::process::ExitCode;
use riskfield_cli::args::{Cli, Command};
use riskfield_cli::{analyze, simulate};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }

    match &cli.command {
        Command::Simulate(args) => {
            let summary = simulate::run(args).context("simulate failed")?;
            println!(
                "wrote {} files to {} ({} of {} covariance entries within 3 standard errors)",
                summary.files.len() + 1,
                args.out.display(),
                summary.moments.within_3se,
                summary.moments.entries
            );
        }
        Command::Analyze(args) => {
            let report = analyze::run(args).context("analyze failed")?;
            println!(
                "mantel z = {:.6}, p = {:.6} ({} assets); report written to {}",
                report.mantel.z,
                report.mantel.p_value,
                report.assets.used.len(),
                args.out.join("report.json").display()
            );
        }
    }
    Ok(())
}
