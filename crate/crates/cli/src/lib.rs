//! Command-line front end: asymptotic coin states, figure data, self-checks
//! and brute-force simulation.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwalk::states::InitialState;
use qwalk::text::parse_angle;
use qwalk::walk::{line_walk, U2Params, WalkSpec};

pub mod fig;
pub mod output;
pub mod rho;
pub mod simulate;
pub mod verify;

#[derive(Parser, Debug)]
#[command(
    name = "qwalk",
    version,
    about = "Long-time coin states of coined quantum walks"
)]
pub struct Cli {
    /// Worker threads for quadrature (defaults to one per core)
    #[arg(long, env = "QWALK_THREADS", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Asymptotic reduced coin state, its spectrum and entropy
    Rho(rho::RhoArgs),
    /// Figure data as CSV
    Fig(fig::FigArgs),
    /// Closed-form vs numerical checks with pass/fail budgets
    Verify(verify::VerifyArgs),
    /// Position-space evolution and time-averaged coin state
    Simulate(simulate::SimulateArgs),
}

/// The walk: U(2) angles on the line, or a walk file.
#[derive(Args, Debug, Clone)]
pub struct WalkArgs {
    /// Coin angle θ in radians; literals like `pi/4` are accepted
    #[arg(long, value_parser = angle_arg, default_value = "pi/4", allow_hyphen_values = true)]
    pub theta: f64,
    /// Coin phase α in radians
    #[arg(long, value_parser = angle_arg, default_value = "pi/2", allow_hyphen_values = true)]
    pub alpha: f64,
    /// Coin phase β in radians
    #[arg(long, value_parser = angle_arg, default_value = "pi/2", allow_hyphen_values = true)]
    pub beta: f64,
    /// Walk description file (dim, coin rows, shifts); replaces the angles
    #[arg(long, conflicts_with_all = ["theta", "alpha", "beta"])]
    pub walk: Option<PathBuf>,
}

pub fn angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

pub fn state_arg(s: &str) -> Result<InitialState, String> {
    s.parse::<InitialState>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone)]
pub enum Walk {
    U2(U2Params),
    File { path: PathBuf, spec: WalkSpec },
}

impl Walk {
    pub fn spec(&self) -> WalkSpec {
        match self {
            Walk::U2(p) => line_walk(*p),
            Walk::File { spec, .. } => spec.clone(),
        }
    }

    pub fn u2(&self) -> Option<U2Params> {
        match self {
            Walk::U2(p) => Some(*p),
            Walk::File { .. } => None,
        }
    }

    /// Fails for Pauli-type U(2) coins, where the walk does not disperse.
    pub fn ensure_dispersive(&self) -> Result<(), CliError> {
        match self {
            Walk::U2(p) if p.is_degenerate() => Err(CliError::Core(qwalk::Error::DegenerateCoin(format!(
                "theta = {} makes sin(theta) or cos(theta) vanish; the coin is Pauli-type and the walk does not disperse",
                p.theta
            )))),
            _ => Ok(()),
        }
    }

    pub fn config_fields(&self) -> output::Config {
        match self {
            Walk::U2(p) => vec![
                ("theta", p.theta.into()),
                ("alpha", p.alpha.into()),
                ("beta", p.beta.into()),
            ],
            Walk::File { path, .. } => vec![("walk", path.display().to_string().into())],
        }
    }
}

impl WalkArgs {
    pub fn resolve(&self) -> Result<Walk, CliError> {
        match &self.walk {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read walk file {}: {e}", path.display()))
                })?;
                Ok(Walk::File {
                    path: path.clone(),
                    spec: text.parse()?,
                })
            }
            None => Ok(Walk::U2(U2Params::new(self.theta, self.alpha, self.beta))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Core(qwalk::Error),
    Usage(String),
    Io(std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for a degenerate coin, 4 for numerical or I/O failure.
    pub fn exit_code(&self) -> i32 {
        use qwalk::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                E::DegenerateCoin(_) => 3,
                E::Parse(_)
                | E::InvalidState(_)
                | E::InvalidWalk(_)
                | E::InvalidArgument(_)
                | E::NonUnitaryInput { .. }
                | E::DimensionMismatch { .. } => 2,
                _ => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qwalk::Error> for CliError {
    fn from(e: qwalk::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    match cli.command {
        Command::Rho(args) => rho::run(&args).map(|()| 0),
        Command::Fig(args) => fig::run(&args).map(|()| 0),
        Command::Verify(args) => verify::run(&args),
        Command::Simulate(args) => simulate::run(&args).map(|()| 0),
    }
}
