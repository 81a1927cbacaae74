//! One trajectory of the full nonlinear system, sampled on a uniform
//! time mesh. On integration failure the rows collected so far are
//! still written before the nonzero exit.

use crate::commands::{load_family, parse_list, parse_phases};
use crate::emit::{meta_line, OutDir};
use crate::fail::{CmdResult, Failure};
use quasihopf::cocycle::PolarState;
use quasihopf::driving::reduce_phase;
use quasihopf::nonlinear::integrate_radial_nonlinear;
use quasihopf::ode::StepControl;
use quasihopf::report::{cell, CsvTable, SvgPlot};
use std::path::PathBuf;

#[derive(clap::Args)]
pub struct Args {
    /// System description file
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Override the shift from the file
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Starting base phases, comma-separated (default: all zero)
    #[arg(long, value_name = "P1,P2,...", allow_hyphen_values = true)]
    pub phases: Option<String>,
    /// Starting point in the plane
    #[arg(long, value_name = "Y1,Y2", default_value = "0,2", allow_hyphen_values = true)]
    pub y0: String,
    /// Final time
    #[arg(long, default_value_t = 50.0)]
    pub t_end: f64,
    /// Number of mesh intervals
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Also write a planar plot
    #[arg(long)]
    pub svg: bool,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn run(args: &Args) -> CmdResult {
    let loaded = load_family(&args.config, args.epsilon)?;
    let fam = &loaded.fam;
    let y0 = parse_list(&args.y0, "y0")?;
    if y0.len() != 2 {
        return Err(Failure::usage("y0 must be two numbers"));
    }
    if !(args.t_end > 0.0) {
        return Err(Failure::usage("t-end must be positive"));
    }
    if args.samples == 0 {
        return Err(Failure::usage("samples must be positive"));
    }
    let p0 = parse_phases(args.phases.as_deref(), fam.dim())?;
    let ctl = StepControl::default();
    let out = OutDir::create(&args.out_dir)?;

    let meta = meta_line(
        &loaded.name,
        loaded.hash,
        ctl,
        &[("t_end", cell(args.t_end)), ("samples", args.samples.to_string())],
    );
    let mut table = CsvTable::new(meta, &["t", "y1", "y2", "r", "theta"]);
    let mut plane: Vec<(f64, f64)> = Vec::new();

    let start = PolarState::from_cartesian([y0[0], y0[1]]);
    let mut lift = start.lift;
    let mut r = start.radius();
    let dt = args.t_end / args.samples as f64;
    let mut record = |table: &mut CsvTable, t: f64, lift: f64, r: f64| {
        let (y1, y2) =
            if r == 0.0 { (0.0, 0.0) } else { planar(lift, r) };
        plane.push((y1, y2));
        table.push(vec![cell(t), cell(y1), cell(y2), cell(r), cell(reduce_phase(lift))]);
    };
    record(&mut table, 0.0, lift, r);

    let mut last_t = 0.0;
    let mut trouble: Option<Failure> = None;
    for i in 0..args.samples {
        let t = dt * i as f64;
        let p = p0.advance(&fam.freqs, t);
        match integrate_radial_nonlinear(fam, &p, lift, r, dt, ctl) {
            Ok(step) => {
                lift = step.state.lift;
                r = step.state.radius();
                last_t = t + dt;
                record(&mut table, last_t, lift, r);
                if let Some(at) = step.escaped {
                    trouble =
                        Some(Failure::runtime(format!("trajectory escaped near t = {}", t + at)));
                    break;
                }
            }
            Err(e) => {
                trouble = Some(Failure::runtime(format!("integration failed: {e}")));
                break;
            }
        }
    }

    out.write_csv("trajectory.csv", &table)?;
    if args.svg {
        let mut plot = SvgPlot::new(format!("planar trajectory ({})", loaded.name), 640, 640);
        plot.axis_labels("y1", "y2");
        plot.add_line(format!("eps={}", fam.epsilon), plane);
        out.write_svg("trajectory.svg", &plot)?;
    }
    println!("final t={last_t} r={r} theta={}", reduce_phase(lift));
    match trouble {
        None => Ok(()),
        Some(f) => Err(f),
    }
}

fn planar(lift: f64, r: f64) -> (f64, f64) {
    (r * lift.sin(), r * lift.cos())
}
