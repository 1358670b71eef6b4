use std::path::PathBuf;

use heavyls::solvers::{fit_class_with, SolverOptions, Status};
use heavyls::{Evaluable, Sample};
use serde_json::json;

use super::{ClassArgs, Output};
use crate::csvio::{read_xy, real, Table};
use crate::error::CliResult;

#[derive(Debug, clap::Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    /// Two-column (x, y) CSV, sorted or not.
    #[arg(long = "in")]
    pub input: PathBuf,
}

pub fn run(a: &FitArgs) -> CliResult<Output> {
    let class = a.class.class()?;
    let (x, y) = read_xy(&a.input)?;
    let sample = Sample::new(x.clone(), y.clone())?;
    let (fit, report) = fit_class_with(&sample, &class, &SolverOptions::default())?;
    let mut t = Table::new(&["x", "y", "fitted"]);
    for (&xi, &yi) in x.iter().zip(&y) {
        t.push(vec![real(xi), real(yi), real(fit.eval(xi))]);
    }
    let csv = t.to_csv()?;
    let mut out = Output::new("fit", csv.clone()).file("fit.csv", csv);
    out.config = json!({ "class": class, "input": a.input, "kkt_residual": report.kkt_residual, "iterations": report.iterations });
    if report.status != Status::Converged {
        out.degraded = true;
        out.warnings.push(format!("solver stopped with status {:?}, KKT residual {}", report.status, report.kkt_residual));
    }
    Ok(out)
}
