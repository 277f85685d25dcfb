use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qwalk::asymptotics::{
    eigenvalues_distributed_example, eigenvalues_entangled_example, eigenvalues_local_general,
};
use qwalk::linalg::entropy_from_eigenvalues;
use qwalk::states::BlochCoin;
use qwalk::text::fmt_g17;
use qwalk::walk::U2Params;
use serde_json::json;

use crate::output::{emit, Csv};
use crate::{angle_arg, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Local |0⟩ against the split state at α = 0, π/4, π/2
    CpeCompare,
    /// Split state over a (θ, α) lattice
    #[value(name = "cpe-3d")]
    Cpe3d,
    /// Entangled two-site state
    CpeEntangled,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::CpeCompare => "cpe-compare",
            Figure::Cpe3d => "cpe-3d",
            Figure::CpeEntangled => "cpe-entangled",
        }
    }
}

#[derive(Args, Debug)]
pub struct FigArgs {
    #[arg(value_enum)]
    pub which: Figure,
    /// Number of θ samples, endpoints included
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    #[arg(long, value_parser = angle_arg, default_value = "0", allow_hyphen_values = true)]
    pub theta_min: f64,
    #[arg(long, value_parser = angle_arg, default_value = "pi", allow_hyphen_values = true)]
    pub theta_max: f64,
    /// Number of α samples on [0, π] for cpe-3d
    #[arg(long, default_value_t = 65)]
    pub alpha_points: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn entropy(pair: (f64, f64)) -> f64 {
    entropy_from_eigenvalues(&[pair.0, pair.1])
}

pub fn cpe_local_zero(theta: f64) -> f64 {
    entropy(eigenvalues_local_general(
        U2Params::new(theta, 0.0, 0.0),
        BlochCoin::new(0.0, 0.0),
    ))
}

pub fn cpe_distributed(theta: f64, alpha: f64) -> f64 {
    entropy(eigenvalues_distributed_example(U2Params::new(
        theta, alpha, 0.0,
    )))
}

pub fn cpe_entangled(theta: f64) -> f64 {
    entropy(eigenvalues_entangled_example(U2Params::new(
        theta, 0.0, 0.0,
    )))
}

pub fn render(args: &FigArgs) -> Result<String, CliError> {
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    if args.theta_min.partial_cmp(&args.theta_max) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::Usage(
            "--theta-min must be below --theta-max".into(),
        ));
    }
    let thetas = linspace(args.theta_min, args.theta_max, args.points);
    let mut fields = vec![
        ("theta_min", json!(args.theta_min)),
        ("theta_max", json!(args.theta_max)),
        ("points", json!(args.points)),
    ];
    let header: Vec<String> = match args.which {
        Figure::CpeCompare => [
            "theta",
            "cpe_local",
            "cpe_dist_alpha0",
            "cpe_dist_alphaPi4",
            "cpe_dist_alphaPi2",
        ]
        .map(String::from)
        .to_vec(),
        Figure::Cpe3d => {
            if args.alpha_points < 2 {
                return Err(CliError::Usage("--alpha-points must be at least 2".into()));
            }
            fields.push(("alpha_points", json!(args.alpha_points)));
            ["theta", "alpha", "cpe"].map(String::from).to_vec()
        }
        Figure::CpeEntangled => ["theta", "cpe"].map(String::from).to_vec(),
    };
    let mut csv = Csv::new(&format!("fig {}", args.which.name()), &fields, &header);
    for &t in &thetas {
        match args.which {
            Figure::CpeCompare => csv.row(&[
                fmt_g17(t),
                fmt_g17(cpe_local_zero(t)),
                fmt_g17(cpe_distributed(t, 0.0)),
                fmt_g17(cpe_distributed(t, FRAC_PI_4)),
                fmt_g17(cpe_distributed(t, FRAC_PI_2)),
            ]),
            Figure::Cpe3d => {
                for a in linspace(0.0, PI, args.alpha_points) {
                    csv.row(&[fmt_g17(t), fmt_g17(a), fmt_g17(cpe_distributed(t, a))]);
                }
            }
            Figure::CpeEntangled => csv.row(&[fmt_g17(t), fmt_g17(cpe_entangled(t))]),
        }
    }
    Ok(csv.into_string())
}

pub fn run(args: &FigArgs) -> Result<(), CliError> {
    emit(args.output.as_deref(), &render(args)?)
}
