//! The bundled figure set: four CSV/SVG pairs covering the three
//! driven presets. Every output is a pure function of the presets and
//! the recorded settings, so reruns are byte-identical.

use crate::emit::{meta_line, OutDir};
use crate::fail::{CmdResult, Failure};
use quasihopf::attractor::{attractor_section, BetaGrid, DEFAULT_SCHEDULE};
use quasihopf::cocycle::PolarState;
use quasihopf::config::ConfigFile;
use quasihopf::driving::{SystemFamily, TorusPoint};
use quasihopf::nonlinear::{compute_r_rho, integrate_radial_nonlinear, DEFAULT_DELTA};
use quasihopf::ode::StepControl;
use quasihopf::presets;
use quasihopf::report::{cell, CsvTable, SvgPlot};
use std::path::PathBuf;

const SHIFTS: [f64; 3] = [-0.15, 0.0, 0.5];

#[derive(clap::Args)]
pub struct Args {
    /// PRNG seed, echoed in the metadata
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

pub fn run(args: &Args) -> CmdResult {
    let out = OutDir::create(&args.out_dir)?;
    let ctl = StepControl::default();
    autonomous_planar(&out, args.seed, ctl)?;
    quasiperiodic_radius(&out, args.seed, ctl)?;
    rotational_section(&out, args.seed, ctl)?;
    quasiperiodic_bifurcation(&out, args.seed, ctl)?;
    Ok(())
}

fn hash_of(name: &str, fam: &SystemFamily) -> u64 {
    ConfigFile::from_family(name, fam, DEFAULT_DELTA).content_hash()
}

/// Planar spirals of the constant-coefficient system across the
/// transition: decay, neutral rotation, and the limit circle.
fn autonomous_planar(out: &OutDir, seed: u64, ctl: StepControl) -> CmdResult {
    let fam0 = presets::autonomous(0.0);
    let meta = meta_line(
        "autonomous",
        hash_of("autonomous", &fam0),
        ctl,
        &[("t_end", cell(60.0)), ("seed", seed.to_string())],
    );
    let mut table = CsvTable::new(meta, &["epsilon", "t", "y1", "y2", "r"]);
    let mut plot = SvgPlot::new("planar trajectories, constant coefficients", 640, 640);
    plot.axis_labels("y1", "y2");
    for eps in SHIFTS {
        let fam = fam0.with_epsilon(eps);
        let track = sample_trajectory(&fam, [0.0, 2.0], 60.0, 600, ctl)?;
        for &(t, y1, y2, r) in &track {
            table.push(vec![cell(eps), cell(t), cell(y1), cell(y2), cell(r)]);
        }
        plot.add_line(format!("eps={eps}"), track.iter().map(|&(_, y1, y2, _)| (y1, y2)).collect());
    }
    out.write_csv("autonomous_planar.csv", &table)?;
    out.write_svg("autonomous_planar.svg", &plot)?;
    Ok(())
}

/// Radius histories of the quasiperiodic system for the same shifts.
fn quasiperiodic_radius(out: &OutDir, seed: u64, ctl: StepControl) -> CmdResult {
    let fam0 = presets::quasiperiodic(0.0);
    let meta = meta_line(
        "quasiperiodic",
        hash_of("quasiperiodic", &fam0),
        ctl,
        &[("t_end", cell(60.0)), ("seed", seed.to_string())],
    );
    let mut table = CsvTable::new(meta, &["epsilon", "t", "r"]);
    let mut plot = SvgPlot::new("radius histories, quasiperiodic driving", 640, 420);
    plot.axis_labels("t", "r");
    for eps in SHIFTS {
        let fam = fam0.with_epsilon(eps);
        let track = sample_trajectory(&fam, [0.0, 2.0], 60.0, 600, ctl)?;
        for &(t, _, _, r) in &track {
            table.push(vec![cell(eps), cell(t), cell(r)]);
        }
        plot.add_line(format!("eps={eps}"), track.iter().map(|&(t, _, _, r)| (t, r)).collect());
    }
    out.write_csv("quasiperiodic_radius.csv", &table)?;
    out.write_svg("quasiperiodic_radius.svg", &plot)?;
    Ok(())
}

/// Attractor section of the rotational variant past the transition:
/// the boundary curve in the plane over one base point.
fn rotational_section(out: &OutDir, seed: u64, ctl: StepControl) -> CmdResult {
    let fam = presets::rotational(0.5);
    let radius = compute_r_rho(&fam, DEFAULT_DELTA)?;
    let p = TorusPoint::origin(fam.dim());
    let section = attractor_section(&fam, &p, 64, radius.r_rho, &DEFAULT_SCHEDULE, ctl)?;
    let meta = meta_line(
        "rotational",
        hash_of("rotational", &fam),
        ctl,
        &[
            ("max_horizon", cell(DEFAULT_SCHEDULE.last().copied().unwrap_or(0.0))),
            ("seed", seed.to_string()),
        ],
    );
    let mut table = CsvTable::new(meta, &["theta", "beta"]);
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(section.angles.len() + 1);
    for (&theta, &beta) in section.angles.iter().zip(&section.radii) {
        table.push(vec![cell(theta), cell(beta)]);
        curve.push((beta * theta.sin(), beta * theta.cos()));
    }
    if let Some(&first) = curve.first() {
        curve.push(first);
    }
    let mut plot = SvgPlot::new("boundary section, rotational driving", 640, 640);
    plot.axis_labels("y1", "y2");
    plot.add_line("eps=0.5", curve);
    out.write_csv("rotational_section.csv", &table)?;
    out.write_svg("rotational_section.svg", &plot)?;
    Ok(())
}

/// Attractor envelope against the shift for the quasiperiodic system:
/// the bifurcation diagram with the jump at zero.
fn quasiperiodic_bifurcation(out: &OutDir, seed: u64, ctl: StepControl) -> CmdResult {
    let fam0 = presets::quasiperiodic(0.0);
    let meta = meta_line(
        "quasiperiodic",
        hash_of("quasiperiodic", &fam0),
        ctl,
        &[
            ("range", "-0.3:0.8:0.05".to_string()),
            ("grid", "2x2x4".to_string()),
            ("seed", seed.to_string()),
        ],
    );
    let mut table = CsvTable::new(meta, &["epsilon", "beta_min", "beta_max"]);
    let mut lo_curve = Vec::new();
    let mut hi_curve = Vec::new();
    for i in 0..=22 {
        let eps = -0.3 + 0.05 * i as f64;
        let fam = fam0.with_epsilon(eps);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA)?;
        let grid = BetaGrid::compute(&fam, &[2, 2], 4, radius.r_rho, &DEFAULT_SCHEDULE, ctl)?;
        let beta_min = grid.values.iter().copied().fold(f64::INFINITY, f64::min);
        let beta_max = grid.max_value();
        table.push(vec![cell(eps), cell(beta_min), cell(beta_max)]);
        lo_curve.push((eps, beta_min));
        hi_curve.push((eps, beta_max));
    }
    let mut plot = SvgPlot::new("attractor envelope, quasiperiodic driving", 640, 420);
    plot.axis_labels("epsilon", "beta");
    plot.add_line("max", hi_curve);
    plot.add_line("min", lo_curve);
    out.write_csv("quasiperiodic_bifurcation.csv", &table)?;
    out.write_svg("quasiperiodic_bifurcation.svg", &plot)?;
    Ok(())
}

/// Uniform-mesh samples of one nonlinear trajectory: (t, y1, y2, r).
fn sample_trajectory(
    fam: &SystemFamily,
    y0: [f64; 2],
    t_end: f64,
    samples: usize,
    ctl: StepControl,
) -> Result<Vec<(f64, f64, f64, f64)>, Failure> {
    let p0 = TorusPoint::origin(fam.dim());
    let start = PolarState::from_cartesian(y0);
    let mut lift = start.lift;
    let mut r = start.radius();
    let dt = t_end / samples as f64;
    let mut rows = Vec::with_capacity(samples + 1);
    let record = |rows: &mut Vec<(f64, f64, f64, f64)>, t: f64, lift: f64, r: f64| {
        let (y1, y2) = if r == 0.0 { (0.0, 0.0) } else { (r * lift.sin(), r * lift.cos()) };
        rows.push((t, y1, y2, r));
    };
    record(&mut rows, 0.0, lift, r);
    for i in 0..samples {
        let t = dt * i as f64;
        let p = p0.advance(&fam.freqs, t);
        let step = integrate_radial_nonlinear(fam, &p, lift, r, dt, ctl)?;
        if let Some(at) = step.escaped {
            return Err(Failure::runtime(format!("figure trajectory escaped near t = {}", t + at)));
        }
        lift = step.state.lift;
        r = step.state.radius();
        record(&mut rows, t + dt, lift, r);
    }
    Ok(rows)
}
