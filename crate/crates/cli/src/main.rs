mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{RunConfig, Spacing};

#[derive(Parser, Debug)]
#[command(name = "nanolin", version, about = "Phonon-counting tests of quantum linearity: scenarios, noise budgets, exclusion curves")]
struct Cli {
    /// JSON configuration (frequencies in Hz); missing sections take reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "NANOLIN_OUT")]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Use the quoted intermediate values instead of live simulation.
    #[arg(long, global = true)]
    paper_values: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Noise budget table: channel, rate_per_s, lambda_min_per_s.
    Budget,
    /// Run one scenario and write its time series.
    Simulate {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
    },
    /// Evaluate a scenario across a parameter grid.
    Sweep {
        /// g0_over_kappa_p, kappa_s_ex_over_kappa_p, g0_hz, kappa_s_ex_hz, kappa_p_ex_hz, omega_hz
        #[arg(long)]
        param: Option<String>,
        /// start:stop:count
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum)]
        spacing: Option<Spacing>,
        #[arg(long, value_enum, default_value = "eta-om")]
        scenario: SweepScenarioArg,
    },
    /// Minimum detectable collapse rate against correlation length.
    Exclude {
        /// start:stop:count in m, log-spaced
        #[arg(long)]
        rc_grid: Option<String>,
    },
    /// Thermal and collapse heating of silica spheres against diameter.
    Heatmap,
    /// Diósi-Penrose cutoff matching the noise floor.
    Dp,
    /// Quadratic-coupling feasibility report.
    Quadratic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ScenarioArg {
    EtaOm,
    EtaStokes,
    EtaOm2,
    Counterrot,
    POm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SweepScenarioArg {
    EtaOm,
    EtaStokes,
    EtaOm2,
}

fn run(cli: Cli) -> nanolin::Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.paper_values {
        cfg.paper_values = true;
    }
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(nanolin::Error::InvalidParameter {
                name: "jobs".into(),
                reason: "must be >= 1".into(),
            });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| nanolin::Error::Config(e.to_string()))?;
    }
    let out = cli
        .out
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("nanolin-out"));
    let mut w = output::Writer::new(&out, &cfg)?;
    match cli.command {
        Command::Budget => commands::budget(&cfg, &mut w),
        Command::Simulate { scenario } => commands::simulate(&cfg, scenario, &mut w),
        Command::Sweep {
            param,
            grid,
            spacing,
            scenario,
        } => commands::sweep(&cfg, param, grid, spacing, scenario, &mut w),
        Command::Exclude { rc_grid } => commands::exclude(&cfg, rc_grid, &mut w),
        Command::Heatmap => commands::heatmap(&cfg, &mut w),
        Command::Dp => commands::dp(&cfg, &mut w),
        Command::Quadratic => commands::quadratic(&cfg, &mut w),
    }?;
    for p in w.written() {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            eprintln!("{}", output::usage_json(&e.to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", output::error_json(&e));
            ExitCode::FAILURE
        }
    }
}
