use crate::args::{KernelArg, SimulateArgs};
use crate::output::{FileEntry, OutputDir};
use crate::{CliError, Result};
use chrono::{Days, NaiveDate};
use riskfield::ingest::{profiles_to_csv, returns_to_csv};
use riskfield::simulator::{
    analytic_covariance_matrix, covariance_standard_errors, sample_covariance, sample_premium_paths, simulate_returns,
};
use riskfield::synthetic::{sector_profiles, SectorWorld};
use riskfield::{build_grid, KernelSpec};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Serialize)]
pub struct SimulationConfig {
    pub assets: usize,
    pub sectors: usize,
    pub grid_points: usize,
    pub lower: f64,
    pub upper: f64,
    pub kernel: KernelSpec,
    pub premium_mean: f64,
    pub horizon: usize,
    pub idio_sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct MomentCheck {
    pub entries: usize,
    /// Entries whose sample covariance is within 3 standard errors of the model.
    pub within_3se: usize,
    pub max_abs_z: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub config: SimulationConfig,
    pub moments: MomentCheck,
    pub files: Vec<FileEntry>,
}

fn kernel_from(args: &SimulateArgs) -> Result<KernelSpec> {
    Ok(match args.kernel {
        KernelArg::Dirac => KernelSpec::dirac(args.sigma2)?,
        KernelArg::Constant => KernelSpec::constant(args.sigma2)?,
        KernelArg::Se => KernelSpec::squared_exponential(args.sigma2, args.length_scale)?,
    })
}

fn daily_dates(periods: usize) -> Vec<String> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid start date");
    (0..periods)
        .map(|t| {
            start
                .checked_add_days(Days::new(t as u64))
                .expect("date within range")
                .format("%Y-%m-%d")
                .to_string()
        })
        .collect()
}

/// Writes `profiles.csv`, `sectors.csv`, `returns.csv`,
/// `premium_summary.csv`, `moments.csv` and `simulation.json`.
pub fn run(args: &SimulateArgs) -> Result<SimulationSummary> {
    if args.horizon < 2 {
        return Err(CliError::Usage("--horizon must be at least 2".into()));
    }
    if !(args.premium_mean.is_finite()) {
        return Err(CliError::Usage("--premium-mean must be finite".into()));
    }
    let grid = build_grid(args.lower, args.upper, args.grid)?;
    let kernel = kernel_from(args)?;
    let world: SectorWorld = sector_profiles(grid, args.sectors, args.assets, args.seed)?;

    let mean_fn = vec![args.premium_mean; grid.points()];
    let paths = sample_premium_paths(grid, &kernel, &mean_fn, args.horizon, args.seed)?;
    let panel = simulate_returns(&world.labels, &world.profiles, &paths, args.idio, args.seed)?
        .with_dates(daily_dates(args.horizon))?;

    let analytic = analytic_covariance_matrix(&world.profiles, &kernel)?;
    let (model, se) = covariance_standard_errors(&analytic, args.idio, args.horizon);
    let (_, sample) = sample_covariance(&panel)?;

    let n = world.labels.len();
    let mut moments = String::from("asset_i,asset_j,analytic,empirical,std_error,z\n");
    let mut within = 0;
    let mut max_abs_z: f64 = 0.0;
    let mut entries = 0;
    for i in 0..n {
        for j in i..n {
            let z = if se[(i, j)] > 0.0 {
                (sample[(i, j)] - model[(i, j)]) / se[(i, j)]
            } else {
                0.0
            };
            entries += 1;
            if z.abs() <= 3.0 {
                within += 1;
            }
            max_abs_z = max_abs_z.max(z.abs());
            let _ = writeln!(
                moments,
                "{},{},{},{},{},{}",
                world.labels[i],
                world.labels[j],
                model[(i, j)],
                sample[(i, j)],
                se[(i, j)],
                z
            );
        }
    }

    let (node_mean, node_var) = paths.node_summary();
    let kernel_diag = kernel.matrix(&grid).diagonal();
    let mut premium = String::from("omega,mean_fn,sample_mean,sample_variance,model_variance\n");
    for k in 0..grid.points() {
        let _ = writeln!(
            premium,
            "{},{},{},{},{}",
            grid.node(k),
            mean_fn[k],
            node_mean[k],
            node_var[k],
            kernel_diag[k]
        );
    }

    let mut sectors = String::from("asset,label\n");
    for (l, s) in world.labels.iter().zip(&world.sectors) {
        let _ = writeln!(sectors, "{l},{}", SectorWorld::sector_name(*s));
    }

    let mut out = OutputDir::create(&args.out)?;
    out.write("profiles.csv", profiles_to_csv(&world.labels, &world.profiles).as_bytes())?;
    out.write("sectors.csv", sectors.as_bytes())?;
    out.write("returns.csv", returns_to_csv(&panel).as_bytes())?;
    out.write("premium_summary.csv", premium.as_bytes())?;
    out.write("moments.csv", moments.as_bytes())?;

    let summary = SimulationSummary {
        config: SimulationConfig {
            assets: n,
            sectors: args.sectors,
            grid_points: grid.points(),
            lower: grid.lower(),
            upper: grid.upper(),
            kernel,
            premium_mean: args.premium_mean,
            horizon: args.horizon,
            idio_sigma: args.idio,
            seed: args.seed,
        },
        moments: MomentCheck {
            entries,
            within_3se: within,
            max_abs_z,
        },
        files: out.manifest().to_vec(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    out.write_unlisted("simulation.json", format!("{json}\n").as_bytes())?;
    Ok(summary)
}
