use std::path::PathBuf;

use clap::Args;
use qwalk::asymptotics::{rho_asymptotic, rho_asymptotic_with, rho_local_closed, AsymptoticResult};
use qwalk::characteristic::{PointwiseSource, QuadratureGrid};
use qwalk::states::InitialState;
use qwalk::text::fmt_g17;
use serde_json::json;

use crate::output::{config_json, emit, matrix_cells, matrix_columns, matrix_json, to_json, Csv};
use crate::{state_arg, CliError, Format, Walk, WalkArgs};

#[derive(Args, Debug)]
pub struct RhoArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Initial state, e.g. `local v=0 chi=(1,0)`
    #[arg(long, value_parser = state_arg, default_value = "local v=0 chi=(1,0)")]
    pub state: InitialState,
    /// Quadrature points per axis (4096 on the line, 256 otherwise)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Use the U(2) closed-form characteristic matrix
    #[arg(long)]
    pub closed_form: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (standard output if omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn compute(
    walk: &Walk,
    state: &InitialState,
    grid: &QuadratureGrid,
    closed_form: bool,
) -> Result<AsymptoticResult, CliError> {
    walk.ensure_dispersive()?;
    if !closed_form {
        return Ok(rho_asymptotic(&walk.spec(), state, grid)?);
    }
    let p = walk
        .u2()
        .ok_or_else(|| CliError::Usage("--closed-form needs the U(2) angles, not --walk".into()))?;
    Ok(match state {
        InitialState::Local { chi, .. } => rho_local_closed(p, chi)?,
        _ => rho_asymptotic_with(PointwiseSource::ClosedFormU2(p), state, grid)?,
    })
}

pub fn grid_for(walk: &Walk, points: Option<usize>) -> Result<QuadratureGrid, CliError> {
    let d = walk.spec().lattice_dim();
    Ok(match points {
        Some(n) => QuadratureGrid::new(n, d)?,
        None => QuadratureGrid::default_for(d)?,
    })
}

pub fn run(args: &RhoArgs) -> Result<(), CliError> {
    let walk = args.walk.resolve()?;
    let grid = grid_for(&walk, args.grid)?;
    let result = compute(&walk, &args.state, &grid, args.closed_form)?;

    let mut fields = walk.config_fields();
    fields.push(("state", json!(args.state.to_string())));
    fields.push(("grid", json!(grid.points_per_axis())));
    fields.push(("closed_form", json!(args.closed_form)));

    let text = match args.format {
        Format::Json => to_json(&json!({
            "command": "rho",
            "config": config_json(&fields),
            "method": result.method.label(),
            "rho": matrix_json(result.rho.matrix()),
            "eigenvalues": result.eigenvalues,
            "cpe": result.cpe,
            "diagnostics": {
                "form_residual": result.diagnostics.form_residual,
                "asymmetry": result.diagnostics.asymmetry,
            },
        })),
        Format::Csv => {
            let n = result.rho.dim();
            let mut header = vec!["method".to_string(), "cpe".to_string()];
            header.extend((0..n).map(|i| format!("lambda_{i}")));
            header.extend(matrix_columns("rho", n));
            let mut csv = Csv::new("rho", &fields, &header);
            let mut row = vec![result.method.label().to_string(), fmt_g17(result.cpe)];
            row.extend(result.eigenvalues.iter().map(|&l| fmt_g17(l)));
            row.extend(matrix_cells(result.rho.matrix()));
            csv.row(&row);
            csv.into_string()
        }
    };
    emit(args.output.as_deref(), &text)
}
