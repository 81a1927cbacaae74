//! Pullback boundary values over a product grid of base phases and
//! section angles, exported row per grid point.

use crate::commands::{load_family, parse_grid};
use crate::emit::{meta_line, OutDir};
use crate::fail::CmdResult;
use quasihopf::attractor::{BetaGrid, ANGLE_DEFECT_TOL, DEFAULT_SCHEDULE};
use quasihopf::nonlinear::compute_r_rho;
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
    /// Phase counts then angle count, e.g. 8x8x16 on a 2-torus
    #[arg(long, default_value = "8x8x16")]
    pub grid: String,
    /// Also write a per-angle envelope plot
    #[arg(long)]
    pub svg: bool,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn run(args: &Args) -> CmdResult {
    let loaded = load_family(&args.config, args.epsilon)?;
    let fam = &loaded.fam;
    let (phase_counts, n_angles) = parse_grid(&args.grid, fam.dim())?;
    let ctl = StepControl::default();
    let radius = compute_r_rho(fam, loaded.delta)?;
    let grid =
        BetaGrid::compute(fam, &phase_counts, n_angles, radius.r_rho, &DEFAULT_SCHEDULE, ctl)?;
    let out = OutDir::create(&args.out_dir)?;

    let schedule_max = DEFAULT_SCHEDULE.last().copied().unwrap_or(0.0);
    let meta = meta_line(
        &loaded.name,
        loaded.hash,
        ctl,
        &[
            ("r_start", cell(radius.r_rho)),
            ("max_horizon", cell(schedule_max)),
            ("grid", args.grid.clone()),
        ],
    );
    let mut header: Vec<String> =
        (1..=fam.dim()).map(|i| format!("phase{i}")).collect();
    header.extend(["theta", "beta", "residual", "horizon", "flags"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = CsvTable::new(meta, &header_refs);

    for flat in 0..grid.len() {
        let (p, theta) = grid.site(flat);
        let mut row: Vec<String> = p.phases().iter().map(|&v| cell(v)).collect();
        row.push(cell(theta));
        row.push(cell(grid.values[flat]));
        row.push(cell(grid.residuals[flat]));
        row.push(cell(grid.horizons[flat]));
        // Bitmask: 1 = horizon sequence not monotone, 2 = angle did not
        // return within tolerance (value kept either way).
        let mut flags = 0;
        if !grid.monotone[flat] {
            flags |= 1;
        }
        if grid.angle_defects[flat] > ANGLE_DEFECT_TOL {
            flags |= 2;
        }
        row.push(flags.to_string());
        table.push(row);
    }
    out.write_csv("beta_grid.csv", &table)?;

    if args.svg {
        // Envelope over the phase grid per angle: where the attractor
        // tube is round these two curves coincide.
        let mut lo = vec![f64::INFINITY; n_angles];
        let mut hi = vec![f64::NEG_INFINITY; n_angles];
        for flat in 0..grid.len() {
            let a = flat % n_angles;
            lo[a] = lo[a].min(grid.values[flat]);
            hi[a] = hi[a].max(grid.values[flat]);
        }
        let angle = |i: usize| {
            quasihopf::driving::TAU * i as f64 / n_angles as f64
        };
        let mut plot = SvgPlot::new(format!("boundary radii ({})", loaded.name), 640, 420);
        plot.axis_labels("theta", "beta");
        plot.add_line("max over phases", (0..n_angles).map(|i| (angle(i), hi[i])).collect());
        plot.add_line("min over phases", (0..n_angles).map(|i| (angle(i), lo[i])).collect());
        out.write_svg("beta_map.svg", &plot)?;
    }

    let defects = grid.angle_defects.iter().filter(|&&d| d > ANGLE_DEFECT_TOL).count();
    println!(
        "beta in [{}, {}], max residual {}, flagged {} non-monotone, {} angle defects",
        fmt_sig(grid.values.iter().copied().fold(f64::INFINITY, f64::min), 6),
        fmt_sig(grid.max_value(), 6),
        fmt_sig(grid.max_residual(), 3),
        grid.flagged,
        defects
    );
    Ok(())
}
