use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qwalk::linalg::von_neumann_entropy;
use qwalk::simulator::{cesaro_rho, default_burn_in, rho_series};
use qwalk::states::InitialState;
use serde_json::json;

use crate::output::{config_json, emit, matrix_cells, matrix_columns, matrix_json, to_json, Csv};
use crate::{state_arg, CliError, WalkArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimFormat {
    /// ρ_c(t) time series
    Csv,
    /// Time-averaged ρ_c with its spectrum
    Json,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, value_parser = state_arg, default_value = "local v=0 chi=(1,0)")]
    pub state: InitialState,
    #[arg(long, default_value_t = 2000)]
    pub t_max: usize,
    /// Steps excluded from the time average (5% of --t-max if omitted)
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Sampling interval of the time series
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[arg(long, value_enum, default_value_t = SimFormat::Csv)]
    pub format: SimFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let walk = args.walk.resolve()?;
    let spec = walk.spec();
    let burn_in = args.burn_in.unwrap_or_else(|| default_burn_in(args.t_max));
    let mut fields = walk.config_fields();
    fields.push(("state", json!(args.state.to_string())));
    fields.push(("t_max", json!(args.t_max)));

    let text = match args.format {
        SimFormat::Csv => {
            fields.push(("every", json!(args.every)));
            let series = rho_series(&spec, &args.state, args.t_max, args.every)?;
            let mut header = vec!["t".to_string()];
            header.extend(matrix_columns("rho", spec.coin_dim()));
            let mut csv = Csv::new("simulate", &fields, &header);
            for (t, rho) in &series {
                let mut row = vec![t.to_string()];
                row.extend(matrix_cells(rho));
                csv.row(&row);
            }
            csv.into_string()
        }
        SimFormat::Json => {
            fields.push(("burn_in", json!(burn_in)));
            let avg = cesaro_rho(&spec, &args.state, args.t_max, burn_in)?;
            to_json(&json!({
                "command": "simulate",
                "config": config_json(&fields),
                "rho_time_average": matrix_json(avg.matrix()),
                "eigenvalues": avg.eigenvalues(),
                "cpe": von_neumann_entropy(&avg),
            }))
        }
    };
    emit(args.output.as_deref(), &text)
}
