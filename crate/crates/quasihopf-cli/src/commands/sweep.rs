//! Shift sweep: attractor envelope and spectral label per shift value,
//! the data behind a bifurcation diagram.

use crate::commands::{case_label, load_family, parse_grid, parse_range};
use crate::emit::{meta_line, OutDir};
use crate::fail::CmdResult;
use quasihopf::attractor::{BetaGrid, DEFAULT_SCHEDULE};
use quasihopf::driving::TorusPoint;
use quasihopf::nonlinear::compute_r_rho;
use quasihopf::ode::StepControl;
use quasihopf::report::{cell, fmt_sig, CsvTable, SvgPlot};
use quasihopf::spectrum::{classify_case, ClassifyParams};
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// System description file
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Shift range lo:hi:step
    #[arg(long, value_name = "LO:HI:STEP", allow_hyphen_values = true)]
    pub epsilon: String,
    /// Phase counts then angle count for the per-shift grid
    #[arg(long, default_value = "2x2x4")]
    pub grid: String,
    /// Horizon for the per-shift spectral label
    #[arg(long, default_value_t = 2000.0)]
    pub horizon: f64,
    /// Also write the bifurcation diagram
    #[arg(long)]
    pub svg: bool,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn run(args: &Args) -> CmdResult {
    let loaded = load_family(&args.config, None)?;
    let shifts = parse_range(&args.epsilon)?;
    let (phase_counts, n_angles) = parse_grid(&args.grid, loaded.fam.dim())?;
    let ctl = StepControl::default();
    let params = ClassifyParams { horizon: args.horizon, ..ClassifyParams::default() };
    let p0 = TorusPoint::origin(loaded.fam.dim());
    let out = OutDir::create(&args.out_dir)?;

    let meta = meta_line(
        &loaded.name,
        loaded.hash,
        ctl,
        &[
            ("range", args.epsilon.clone()),
            ("grid", args.grid.clone()),
            ("label_horizon", cell(args.horizon)),
            ("max_pullback_horizon", cell(DEFAULT_SCHEDULE.last().copied().unwrap_or(0.0))),
        ],
    );
    let mut table = CsvTable::new(meta, &["epsilon", "beta_min", "beta_max", "label"]);
    let mut lo_curve = Vec::with_capacity(shifts.len());
    let mut hi_curve = Vec::with_capacity(shifts.len());

    for &eps in &shifts {
        let fam = loaded.fam.with_epsilon(eps);
        let radius = compute_r_rho(&fam, loaded.delta)?;
        let grid =
            BetaGrid::compute(&fam, &phase_counts, n_angles, radius.r_rho, &DEFAULT_SCHEDULE, ctl)?;
        let beta_min = grid.values.iter().copied().fold(f64::INFINITY, f64::min);
        let beta_max = grid.max_value();
        let label = case_label(classify_case(&fam, &p0, &params)?.verdict);
        println!(
            "eps={} beta_min={} beta_max={} label={label}",
            fmt_sig(eps, 6),
            fmt_sig(beta_min, 6),
            fmt_sig(beta_max, 6)
        );
        table.push(vec![cell(eps), cell(beta_min), cell(beta_max), label.to_string()]);
        lo_curve.push((eps, beta_min));
        hi_curve.push((eps, beta_max));
    }

    out.write_csv("bifurcation.csv", &table)?;
    if args.svg {
        let mut plot = SvgPlot::new(format!("attractor envelope ({})", loaded.name), 640, 420);
        plot.axis_labels("epsilon", "beta");
        plot.add_line("max", hi_curve);
        plot.add_line("min", lo_curve);
        out.write_svg("bifurcation.svg", &plot)?;
    }
    Ok(())
}
