//! Window-averaged angular density over a product grid, with the grid
//! mean as the normalization diagnostic.

use crate::commands::{load_family, parse_grid};
use crate::emit::{meta_line, OutDir};
use crate::fail::{CmdResult, Failure};
use quasihopf::chaos::DensityGrid;
use quasihopf::ode::StepControl;
use quasihopf::report::{cell, fmt_sig, CsvTable, SvgPlot};
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// System description file
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Override the shift from the file
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Phase counts then angle count, e.g. 16x16x16 on a 2-torus
    #[arg(long, default_value = "16x16x16")]
    pub grid: String,
    /// Averaging window length
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    /// Also write the per-angle mean profile
    #[arg(long)]
    pub svg: bool,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn run(args: &Args) -> CmdResult {
    let loaded = load_family(&args.config, args.epsilon)?;
    let fam = &loaded.fam;
    let (phase_counts, n_angles) = parse_grid(&args.grid, fam.dim())?;
    if !(args.horizon > 0.0) {
        return Err(Failure::usage("horizon must be positive"));
    }
    let ctl = StepControl::default();
    let grid = DensityGrid::compute(fam, &phase_counts, n_angles, args.horizon, ctl)?;
    let out = OutDir::create(&args.out_dir)?;

    let meta = meta_line(
        &loaded.name,
        loaded.hash,
        ctl,
        &[
            ("window", cell(args.horizon)),
            ("grid", args.grid.clone()),
            ("mass", cell(grid.mass())),
        ],
    );
    let mut header: Vec<String> = (1..=fam.dim()).map(|i| format!("phase{i}")).collect();
    header.extend(["theta", "p"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = CsvTable::new(meta, &header_refs);

    for (flat, &value) in grid.values.iter().enumerate() {
        let (p, theta) = grid.site(flat);
        let mut row: Vec<String> = p.phases().iter().map(|&v| cell(v)).collect();
        row.push(cell(theta));
        row.push(cell(value));
        table.push(row);
    }
    out.write_csv("density.csv", &table)?;

    if args.svg {
        let phase_sites = grid.values.len() / n_angles;
        let mut profile = vec![0.0; n_angles];
        for (flat, &value) in grid.values.iter().enumerate() {
            profile[flat % n_angles] += value / phase_sites as f64;
        }
        let angle = |i: usize| quasihopf::driving::TAU * i as f64 / n_angles as f64;
        let mut plot = SvgPlot::new(format!("angular density ({})", loaded.name), 640, 420);
        plot.axis_labels("theta", "p");
        plot.add_line(
            format!("window {}", args.horizon),
            (0..n_angles).map(|i| (angle(i), profile[i])).collect(),
        );
        out.write_svg("density.svg", &plot)?;
    }

    println!("grid mass {}", fmt_sig(grid.mass(), 6));
    Ok(())
}
