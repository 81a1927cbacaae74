//! Browser bindings for the demo page in www/.
//!
//! Every export is pure compute with JSON strings at the boundary: no
//! DOM access, no shared state. The same entry points are unit-tested
//! natively; `wasm-pack build --target web` produces the module the
//! page imports.
//!
//! Depths (horizons, schedules) are trimmed for interactive latency;
//! the CLI is the place for full-depth runs.

use quasihopf::attractor::attractor_section;
use quasihopf::driving::{SystemFamily, TorusPoint};
use quasihopf::nonlinear::{compute_r_rho, integrate_radial_nonlinear, DEFAULT_DELTA};
use quasihopf::ode::StepControl;
use quasihopf::presets;
use quasihopf::spectrum::{classify_case, ClassifyParams, SpectralCase};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Pullback horizons for interactive sections.
const DEMO_SCHEDULE: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
/// Exponent horizon for interactive labels.
const DEMO_HORIZON: f64 = 600.0;

fn family(preset: &str, epsilon: f64) -> Result<SystemFamily, String> {
    match preset {
        "autonomous" => Ok(presets::autonomous(epsilon)),
        "quasiperiodic" => Ok(presets::quasiperiodic(epsilon)),
        "rotational" => Ok(presets::rotational(epsilon)),
        "chaotic" => Ok(presets::chaotic(5, 2.0, epsilon)),
        other => Err(format!("unknown preset '{other}'")),
    }
}

fn case_name(case: SpectralCase) -> &'static str {
    match case {
        SpectralCase::Negative => "NEGATIVE",
        SpectralCase::Zero => "ZERO",
        SpectralCase::Positive => "POSITIVE",
        SpectralCase::Unresolved => "UNRESOLVED",
    }
}

fn trajectory_json(
    preset: &str,
    epsilon: f64,
    y1: f64,
    y2: f64,
    t_end: f64,
    samples: usize,
) -> Result<String, String> {
    if !(t_end > 0.0) || samples < 2 {
        return Err("need t_end > 0 and at least two samples".into());
    }
    let fam = family(preset, epsilon)?;
    let ctl = StepControl::default();
    let mut p = TorusPoint::origin(fam.dim());
    let mut lift = y1.atan2(y2);
    let mut r = y1.hypot(y2);
    let dt = t_end / (samples - 1) as f64;
    let mut points = Vec::with_capacity(samples);
    points.push(json!([0.0, y1, y2]));
    for i in 1..samples {
        let out = integrate_radial_nonlinear(&fam, &p, lift, r, dt, ctl)
            .map_err(|e| e.to_string())?;
        if out.escaped.is_some() {
            return Err("trajectory escaped the integration window".into());
        }
        lift = out.state.lift;
        r = out.state.radius();
        p = p.advance(&fam.freqs, dt);
        let t = i as f64 * dt;
        points.push(json!([t, r * lift.sin(), r * lift.cos()]));
    }
    Ok(json!({ "rho": fam.rho, "points": points }).to_string())
}

fn section_json(preset: &str, epsilon: f64, n_angles: usize) -> Result<String, String> {
    let fam = family(preset, epsilon)?;
    let radius = compute_r_rho(&fam, DEFAULT_DELTA).map_err(|e| e.to_string())?;
    let p = TorusPoint::origin(fam.dim());
    let section = attractor_section(
        &fam,
        &p,
        n_angles.max(4),
        radius.r_rho,
        &DEMO_SCHEDULE,
        StepControl::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "rho": fam.rho,
        "r_rho": radius.r_rho,
        "angles": section.angles,
        "radii": section.radii,
        "flagged": section.flagged,
        "max_residual": section.max_residual,
        "max_angle_defect": section.max_angle_defect,
    })
    .to_string())
}

fn sweep_json(preset: &str, lo: f64, hi: f64, count: usize) -> Result<String, String> {
    if !(hi > lo) || count < 2 {
        return Err("need hi > lo and at least two sweep points".into());
    }
    let params = ClassifyParams { horizon: DEMO_HORIZON, ..ClassifyParams::default() };
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let eps = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let fam = family(preset, eps)?;
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).map_err(|e| e.to_string())?;
        let p = TorusPoint::origin(fam.dim());
        let section =
            attractor_section(&fam, &p, 8, radius.r_rho, &DEMO_SCHEDULE, StepControl::default())
                .map_err(|e| e.to_string())?;
        let lo_r = section.radii.iter().copied().fold(f64::INFINITY, f64::min);
        let hi_r = section.radii.iter().copied().fold(0.0f64, f64::max);
        let report = classify_case(&fam, &p, &params).map_err(|e| e.to_string())?;
        rows.push(json!({
            "epsilon": eps,
            "beta_min": lo_r,
            "beta_max": hi_r,
            "label": case_name(report.verdict),
        }));
    }
    Ok(json!({ "rows": rows }).to_string())
}

/// Planar trajectory of the dissipative system from (y1, y2); returns
/// `{rho, points: [[t, y1, y2], ...]}`.
#[wasm_bindgen]
pub fn trajectory(
    preset: &str,
    epsilon: f64,
    y1: f64,
    y2: f64,
    t_end: f64,
    samples: usize,
) -> Result<String, JsError> {
    trajectory_json(preset, epsilon, y1, y2, t_end, samples).map_err(|e| JsError::new(&e))
}

/// Attractor boundary over an angle sweep at the torus origin; returns
/// `{rho, r_rho, angles, radii, flagged, max_residual, max_angle_defect}`.
#[wasm_bindgen]
pub fn section(preset: &str, epsilon: f64, n_angles: usize) -> Result<String, JsError> {
    section_json(preset, epsilon, n_angles).map_err(|e| JsError::new(&e))
}

/// Boundary envelope and spectral label across a shift range; returns
/// `{rows: [{epsilon, beta_min, beta_max, label}, ...]}`.
#[wasm_bindgen]
pub fn sweep(preset: &str, lo: f64, hi: f64, count: usize) -> Result<String, JsError> {
    sweep_json(preset, lo, hi, count).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).expect("valid JSON")
    }

    #[test]
    fn autonomous_trajectory_lands_on_the_circle() {
        let v = parse(&trajectory_json("autonomous", 0.5, 0.0, 2.0, 50.0, 200).unwrap());
        let points = v["points"].as_array().unwrap();
        assert_eq!(points.len(), 200);
        let last = points.last().unwrap().as_array().unwrap();
        assert!((last[0].as_f64().unwrap() - 50.0).abs() < 1e-9);
        let r = last[1].as_f64().unwrap().hypot(last[2].as_f64().unwrap());
        assert!((r - (0.5 + 0.5f64.sqrt())).abs() < 1e-6, "final radius {r}");
    }

    #[test]
    fn section_is_round_for_the_autonomous_family() {
        let v = parse(&section_json("autonomous", 0.5, 16).unwrap());
        let radii = v["radii"].as_array().unwrap();
        assert_eq!(radii.len(), 16);
        let want = 0.5 + 0.5f64.sqrt();
        for r in radii {
            assert!((r.as_f64().unwrap() - want).abs() < 1e-6);
        }
        assert_eq!(v["flagged"].as_u64().unwrap(), 0);
    }

    #[test]
    fn sweep_brackets_the_bifurcation() {
        let v = parse(&sweep_json("quasiperiodic", -0.2, 0.5, 3).unwrap());
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0]["label"], "NEGATIVE");
        assert_eq!(rows[2]["label"], "POSITIVE");
        let b0 = rows[0]["beta_max"].as_f64().unwrap();
        let b2 = rows[2]["beta_max"].as_f64().unwrap();
        assert!(b0 < 1e-3, "subcritical boundary {b0}");
        assert!((b2 - (0.5 + 0.5f64.sqrt())).abs() < 1e-2, "supercritical boundary {b2}");
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(trajectory_json("nope", 0.0, 0.0, 1.0, 5.0, 10).is_err());
        assert!(section_json("nope", 0.0, 8).is_err());
        assert!(sweep_json("quasiperiodic", 0.5, -0.5, 3).is_err());
    }
}
