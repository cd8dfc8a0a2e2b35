//! `manifold-rkhs`: evaluate kernels, emit profiles and convergence tables,
//! and run the verification suites.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error,
//! 3 numeric failure.

mod commands;
mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::{Convention, ConvergeArgs, Outcome, Sweep};
use config::{Layer, Settings};
use error::CliError;
use output::Document;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "manifold-rkhs",
    version,
    about = "Reproducing kernels on the circle, spheres and R^n"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command. Flags win over the config file, which
/// wins over the defaults.
#[derive(Debug, Args)]
struct Common {
    /// TOML file with any of the settings below (keys as the long flag names).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// circle | sphere:d | euclidean:n  [default: circle]
    #[arg(long, global = true)]
    manifold: Option<String>,
    /// sobolev:s | heat:t | power:s,r  [default: sobolev:1]
    #[arg(long, global = true)]
    kernel: Option<String>,
    /// bessel | inverse-power | riesz | fourier  [default: bessel]
    #[arg(long, global = true)]
    weighting: Option<String>,
    /// levels:N | tail:EPS  [default: tail:1e-8]
    #[arg(long, global = true)]
    trunc: Option<String>,
    /// Use Abel summation below the RKHS threshold.
    #[arg(long, global = true)]
    abel: bool,
    /// grid:N | random:N[,seed] | PATH  [default: grid:8]
    #[arg(long, global = true)]
    points: Option<String>,
    /// Seed for random:N without an explicit seed  [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// csv | json  [default: csv]
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run the batch loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

impl Common {
    fn layer(&self) -> Layer {
        Layer {
            manifold: self.manifold.clone(),
            kernel: self.kernel.clone(),
            weighting: self.weighting.clone(),
            trunc: self.trunc.clone(),
            abel: self.abel.then_some(true),
            points: self.points.clone(),
            seed: self.seed,
            format: self.format.clone(),
            out: self.out.clone(),
            sequential: self.sequential.then_some(true),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel between the base point and every point of the point set.
    Eval {
        /// Add the plain spectral value next to the dispatched one.
        #[arg(long)]
        check: bool,
    },
    /// Kernel against log-spaced separations from the base point.
    Profile {
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        min_sep: f64,
        /// Defaults to π on compact manifolds and 4 on R^n.
        #[arg(long)]
        max_sep: Option<f64>,
    },
    /// Gram matrix of the point set with its PSD certificate.
    Gram,
    /// Kernel interpolation of a target on the point set.
    Interp {
        /// mode:L,K (an eigenfunction) or a CSV file with one value per point.
        #[arg(long, default_value = "mode:1,1")]
        target: String,
        #[arg(long, default_value_t = 0.0)]
        ridge: f64,
    },
    /// Run verification suites; exit 1 if any check fails.
    Verify {
        /// Suite names (comma separated or repeated), or all.
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
    },
    /// Convergence tables: truncation level, Abel means or near-diagonal slope.
    Converge {
        #[arg(long, value_enum, default_value_t = Sweep::Levels)]
        sweep: Sweep,
        /// Separation of the pair (levels: 0, abel: 0.5).
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256,512,1024")]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 5e-3)]
        min_sep: f64,
        #[arg(long, default_value_t = 5e-2)]
        max_sep: f64,
    },
    /// Heat kernel at several times between the base point and the point set.
    Heat {
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.3,1,5")]
        times: Vec<f64>,
    },
    /// Arc-length parametrization of a closed curve and its pulled-back kernel.
    Curve {
        /// ellipse:a,b | circle:r | CSV file of θ, x_1, …, x_d samples.
        #[arg(long, default_value = "ellipse:2,1")]
        curve: String,
        #[arg(long, value_enum, default_value_t = Convention::Explicit)]
        convention: Convention,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Profile { .. } => "profile",
            Command::Gram => "gram",
            Command::Interp { .. } => "interp",
            Command::Verify { .. } => "verify",
            Command::Converge { .. } => "converge",
            Command::Heat { .. } => "heat",
            Command::Curve { .. } => "curve",
        }
    }

    fn run(&self, settings: &Settings) -> Result<Outcome, CliError> {
        match self {
            Command::Eval { check } => commands::eval(settings, *check),
            Command::Profile {
                samples,
                min_sep,
                max_sep,
            } => commands::profile(settings, *samples, *min_sep, *max_sep),
            Command::Gram => commands::gram(settings),
            Command::Interp { target, ridge } => commands::interp(settings, target, *ridge),
            Command::Verify { suite } => commands::verify(settings, suite),
            Command::Converge {
                sweep,
                separation,
                levels,
                samples,
                min_sep,
                max_sep,
            } => commands::converge(
                settings,
                &ConvergeArgs {
                    sweep: *sweep,
                    separation: *separation,
                    levels,
                    samples: *samples,
                    min_sep: *min_sep,
                    max_sep: *max_sep,
                },
            ),
            Command::Heat { times } => commands::heat(settings, times),
            Command::Curve { curve, convention } => commands::curve(settings, curve, *convention),
        }
    }
}

fn emit(document: &Document, settings: &Settings) -> Result<(), CliError> {
    let bytes = document.render(settings)?;
    match &settings.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let file = cli.common.config.as_deref().map(Layer::from_file).transpose()?;
    let settings = Settings::resolve(&cli.common.layer(), file.as_ref())?;
    match cli.command.run(&settings) {
        Ok(outcome) => {
            emit(&outcome.document, &settings)?;
            Ok(outcome.code)
        }
        Err(e) => {
            let mut diagnostic = Document::new(cli.command.name(), &["error", "message"]);
            diagnostic.push(vec![e.kind().into(), e.to_string().into()]);
            // the error itself is what gets reported; a failed write adds nothing
            let _ = emit(&diagnostic, &settings);
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
