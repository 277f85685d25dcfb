use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qwalk::asymptotics::{
    eigenvalues_distributed_example, eigenvalues_entangled_example, rho_asymptotic,
    rho_local_closed,
};
use qwalk::characteristic::{
    assemble_u2, c_local, c_local_u2, characteristic_at_k, u2_lgf, QuadratureGrid,
};
use qwalk::linalg::DEFAULT_DEGENERACY_TOL;
use qwalk::sampling::random_k;
use qwalk::simulator::{cesaro_rho, default_burn_in};
use qwalk::states::{basis_coin, InitialState};
use qwalk::text::fmt_g17;
use qwalk::walk::{line_walk, U2Params};
use qwalk::{CMatrix, Subsystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::output::{emit, to_json};
use crate::{angle_arg, CliError, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = angle_arg, default_value = "pi/4", allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, value_parser = angle_arg, default_value = "pi/2", allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_parser = angle_arg, default_value = "pi/2", allow_hyphen_values = true)]
    pub beta: f64,
    /// Quadrature points
    #[arg(long, default_value_t = qwalk::characteristic::DEFAULT_POINTS_1D)]
    pub grid: usize,
    /// Random momenta per pointwise check
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulation length for the time-average check
    #[arg(long, default_value_t = 2000)]
    pub t_max: usize,
    /// Steps excluded from the time average (5% of --t-max if omitted)
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Flip the sign of F in the closed form (negative control)
    #[arg(long, hide = true)]
    pub inject_f_sign_error: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub budget: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.budget
    }
}

fn identity_defect(c: &CMatrix, n: usize) -> qwalk::Result<f64> {
    let id = CMatrix::identity(n);
    Ok(c.partial_trace(Subsystem::First)?
        .max_abs_diff(&id)
        .max(c.partial_trace(Subsystem::Second)?.max_abs_diff(&id)))
}

fn pair_gap(values: &[f64], pair: (f64, f64)) -> f64 {
    (values[0] - pair.0).abs().max((values[1] - pair.1).abs())
}

pub fn checks(p: U2Params, args: &VerifyArgs) -> Result<Vec<Check>, CliError> {
    Walk::U2(p).ensure_dispersive()?;
    let spec = line_walk(p);
    let grid = QuadratureGrid::new(args.grid, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    let mut closed_gap = 0.0f64;
    let mut structure = 0.0f64;
    for _ in 0..args.draws {
        let k = random_k(&mut rng, 1);
        let numeric = characteristic_at_k(&spec, &k, DEFAULT_DEGENERACY_TOL)?;
        let m = numeric.matrix();
        structure = structure
            .max(m.hermiticity_defect())
            .max(numeric.swap_defect())
            .max(identity_defect(m, 2)?);
        let (l, g, f) = u2_lgf(p, k.components()[0])?;
        let f = if args.inject_f_sign_error { -f } else { f };
        closed_gap = closed_gap.max(assemble_u2(l, g, f).max_abs_diff(m));
    }

    let cl_gap = c_local(&spec, &grid)?
        .matrix()
        .max_abs_diff(c_local_u2(p).matrix());

    let zero = InitialState::local(vec![0], basis_coin(2, 0))?;
    let closed = rho_local_closed(p, &basis_coin(2, 0))?;
    let local = rho_asymptotic(&spec, &zero, &grid)?;
    let rho_gap = local.rho.matrix().max_abs_diff(closed.rho.matrix());

    let entangled = rho_asymptotic(&spec, &InitialState::entangled_pair(), &grid)?;
    let split = rho_asymptotic(&spec, &InitialState::split_pair(), &grid)?;
    let formula_gap = pair_gap(&entangled.eigenvalues, eigenvalues_entangled_example(p)).max(
        pair_gap(&split.eigenvalues, eigenvalues_distributed_example(p)),
    );
    let form_residual = [&local, &entangled, &split]
        .iter()
        .map(|r| r.diagnostics.form_residual)
        .fold(0.0, f64::max);

    let burn_in = args.burn_in.unwrap_or_else(|| default_burn_in(args.t_max));
    let oracle = cesaro_rho(&spec, &zero, args.t_max, burn_in)?;
    let oracle_gap = oracle.matrix().max_abs_diff(closed.rho.matrix());

    Ok(vec![
        Check {
            name: "c_of_k_closed_form",
            measured: closed_gap,
            budget: 1e-10,
        },
        Check {
            name: "c_of_k_structure",
            measured: structure,
            budget: 1e-10,
        },
        Check {
            name: "trace_form_equivalence",
            measured: form_residual,
            budget: 1e-10,
        },
        Check {
            name: "c_local_quadrature",
            measured: cl_gap,
            budget: 1e-8,
        },
        Check {
            name: "rho_local_closed_form",
            measured: rho_gap,
            budget: 1e-8,
        },
        Check {
            name: "eigenvalue_formulas",
            measured: formula_gap,
            budget: 1e-8,
        },
        Check {
            name: "time_average_oracle",
            measured: oracle_gap,
            budget: 0.02,
        },
    ])
}

pub fn report(checks: &[Check], format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => {
            let mut out = format!(
                "{:<24} {:>24} {:>8}  status\n",
                "check", "measured", "budget"
            );
            for c in checks {
                out.push_str(&format!(
                    "{:<24} {:>24} {:>8}  {}\n",
                    c.name,
                    fmt_g17(c.measured),
                    fmt_g17(c.budget),
                    if c.passed() { "PASS" } else { "FAIL" }
                ));
            }
            out
        }
        ReportFormat::Json => {
            let rows: Vec<_> = checks
                .iter()
                .map(|c| json!({"check": c.name, "measured": c.measured, "budget": c.budget, "pass": c.passed()}))
                .collect();
            to_json(
                &json!({ "command": "verify", "checks": rows, "pass": checks.iter().all(Check::passed) }),
            )
        }
    }
}

/// Exit code 0 when every check is within budget, 1 otherwise.
pub fn run(args: &VerifyArgs) -> Result<i32, CliError> {
    let p = U2Params::new(args.theta, args.alpha, args.beta);
    let checks = checks(p, args)?;
    emit(args.output.as_deref(), &report(&checks, args.format))?;
    Ok(if checks.iter().all(Check::passed) {
        0
    } else {
        1
    })
}
