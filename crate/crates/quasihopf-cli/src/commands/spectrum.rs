//! Spectral classification over a list of shifts: extremal exponents
//! and the four-way case label per shift, as a table on stdout and CSV.

use crate::commands::{case_label, load_family, parse_list, parse_phases};
use crate::emit::{meta_line, OutDir};
use crate::fail::CmdResult;
use quasihopf::report::{cell, fmt_sig, CsvTable};
use quasihopf::spectrum::{classify_case, ClassifyParams};
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// System description file
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Shifts to classify, comma-separated
    #[arg(long, value_name = "E1,E2,...", allow_hyphen_values = true)]
    pub epsilon: String,
    /// Starting base phases, comma-separated (default: all zero)
    #[arg(long, value_name = "P1,P2,...", allow_hyphen_values = true)]
    pub phases: Option<String>,
    /// Exponent estimation horizon
    #[arg(long, default_value_t = 5000.0)]
    pub horizon: f64,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn run(args: &Args) -> CmdResult {
    let loaded = load_family(&args.config, None)?;
    let shifts = parse_list(&args.epsilon, "epsilon")?;
    let p0 = parse_phases(args.phases.as_deref(), loaded.fam.dim())?;
    let params = ClassifyParams { horizon: args.horizon, ..ClassifyParams::default() };
    let out = OutDir::create(&args.out_dir)?;

    let meta = meta_line(
        &loaded.name,
        loaded.hash,
        params.ctl,
        &[
            ("horizon", cell(args.horizon)),
            ("zero_tol", cell(params.zero_tol)),
            ("n_windows", params.n_windows.to_string()),
        ],
    );
    let mut table =
        CsvTable::new(meta, &["epsilon", "lambda_minus", "lambda_plus", "error_bar", "label"]);

    for &eps in &shifts {
        let fam = loaded.fam.with_epsilon(eps);
        let report = classify_case(&fam, &p0, &params)?;
        let label = case_label(report.verdict);
        println!(
            "eps={} lambda_minus={} lambda_plus={} label={label}",
            fmt_sig(eps, 6),
            fmt_sig(report.lambda_min, 6),
            fmt_sig(report.lambda_max.value, 6),
        );
        table.push(vec![
            cell(eps),
            cell(report.lambda_min),
            cell(report.lambda_max.value),
            cell(report.lambda_max.error_bar),
            label.to_string(),
        ]);
    }
    out.write_csv("spectrum.csv", &table)?;
    Ok(())
}
