use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hcm_cli::{emit, CliError, Format, ParamsFile, Report, RunConfig};
use hcm_core::Corrector;

#[derive(Parser)]
#[command(name = "hcm", version, about = "Newton and Ostrowski homotopy continuation for 3-UPU kinematics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON file with e, dr, betas (radians), lengths and pose.
    #[arg(long, global = true)]
    params: Option<PathBuf>,

    /// Corrector for single-method commands.
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,

    /// Residual tolerance required at t = 1.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of uniform increments of t, overriding the registered budgets.
    #[arg(long = "t-steps", global = true)]
    t_steps: Option<usize>,

    /// Iterate to this residual at every t instead of one step per increment.
    #[arg(long = "step-tol", global = true)]
    step_tol: Option<f64>,

    /// Timed repeats per method; the median is reported. Must be odd.
    #[arg(long, global = true, default_value_t = 11)]
    repeats: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    format: Format,

    /// Record the path at every increment (JSON output only).
    #[arg(long, global = true)]
    trace: bool,

    /// Use the published iteration counts as increment budgets.
    #[arg(long = "paper-budgets", global = true)]
    paper_budgets: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Newton,
    Ostrowski,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce result table 1, 2, 3 or 4.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
    },
    /// Solve the forward kinematics with every auxiliary preset.
    Forward,
    /// Solve each limb's inverse kinematics for the pose.
    Inverse,
    /// Compare both methods on one registered case or all of them.
    Bench {
        /// Case id such as inverse-1 or forward-8.
        #[arg(long)]
        case: Option<String>,
    },
    /// Check the registered cases against the published roots.
    Verify,
}

fn run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig {
        method: cli.method.map(|m| match m {
            Method::Newton => Corrector::Newton,
            Method::Ostrowski => Corrector::Ostrowski,
        }),
        final_tol: cli.tol,
        t_steps: cli.t_steps,
        step_tol: cli.step_tol,
        repeats: cli.repeats,
        format: cli.format,
        trace: cli.trace,
        paper_budgets: cli.paper_budgets,
        ..RunConfig::default()
    };
    if let Some(path) = &cli.params {
        let file = ParamsFile::load(path)?;
        config.params = file.params();
        if let Some(pose) = file.pose {
            config.pose = pose;
        }
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let config = run_config(cli)?;
    match &cli.command {
        Command::Table { id } => hcm_cli::run_table(*id, &config),
        Command::Forward => hcm_cli::forward(&config),
        Command::Inverse => hcm_cli::inverse(&config),
        Command::Bench { case } => hcm_cli::bench(case.as_deref(), &config),
        Command::Verify => hcm_cli::verify(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|report| Ok((emit(&report, cli.format)?, report)));
    match result {
        Ok((text, report)) => {
            print!("{text}");
            for failure in &report.failures {
                eprintln!("error: {failure}");
            }
            ExitCode::from(if report.ok() { 0 } else { 1 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
