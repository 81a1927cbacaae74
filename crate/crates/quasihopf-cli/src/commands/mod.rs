pub mod beta_map;
pub mod density;
pub mod figures;
pub mod liyorke;
pub mod simulate;
pub mod spectrum;
pub mod sweep;

use crate::fail::{CmdResult, Failure};
use clap::Subcommand;
use quasihopf::config::ConfigFile;
use quasihopf::driving::{SystemFamily, TorusPoint};
use quasihopf::spectrum::SpectralCase;
use std::path::Path;

#[derive(Subcommand)]
pub enum Command {
    /// Integrate one trajectory of the nonlinear system to CSV/SVG
    Simulate(simulate::Args),
    /// Estimate the dynamical spectrum for a list of shifts
    Spectrum(spectrum::Args),
    /// Pullback boundary values on a phase/angle grid
    BetaMap(beta_map::Args),
    /// Sweep the shift and record the attractor envelope
    BifurcationSweep(sweep::Args),
    /// Sample point pairs on the attractor and classify separations
    Liyorke(liyorke::Args),
    /// Window-averaged angular density on a phase/angle grid
    Density(density::Args),
    /// Regenerate the bundled figure set deterministically
    ReproduceFigures(figures::Args),
}

impl Command {
    pub fn run(&self) -> CmdResult {
        match self {
            Command::Simulate(a) => simulate::run(a),
            Command::Spectrum(a) => spectrum::run(a),
            Command::BetaMap(a) => beta_map::run(a),
            Command::BifurcationSweep(a) => sweep::run(a),
            Command::Liyorke(a) => liyorke::run(a),
            Command::Density(a) => density::run(a),
            Command::ReproduceFigures(a) => figures::run(a),
        }
    }
}

/// A config loaded from disk with any command-line shift override
/// already applied; `hash` identifies the effective system.
pub struct Loaded {
    pub name: String,
    pub fam: SystemFamily,
    pub delta: f64,
    pub hash: u64,
}

pub fn load_family(path: &Path, epsilon: Option<f64>) -> Result<Loaded, Failure> {
    let cfg = ConfigFile::load(path)?;
    let mut fam = cfg.to_family()?;
    if let Some(eps) = epsilon {
        if !eps.is_finite() {
            return Err(Failure::usage("epsilon override must be finite"));
        }
        fam = fam.with_epsilon(eps);
    }
    let effective = ConfigFile::from_family(&cfg.name, &fam, cfg.delta);
    Ok(Loaded { name: cfg.name, fam, delta: cfg.delta, hash: effective.content_hash() })
}

/// Comma-separated floats; rejects empty lists.
pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Failure::usage(format!("{what}: need at least one value")));
    }
    items
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::usage(format!("{what}: '{s}' is not a number")))
        })
        .collect()
}

/// Grid syntax "N1x...xNdxK": one count per torus dimension, then the
/// angle count.
pub fn parse_grid(text: &str, dim: usize) -> Result<(Vec<usize>, usize), Failure> {
    let counts: Vec<usize> = text
        .split(['x', 'X'])
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::usage(format!("grid: '{s}' is not a count")))
        })
        .collect::<Result<_, _>>()?;
    if counts.len() != dim + 1 {
        return Err(Failure::usage(format!(
            "grid '{text}' has {} components; need {} phase counts plus an angle count",
            counts.len(),
            dim
        )));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Failure::usage("grid counts must be positive"));
    }
    let (phases, angles) = counts.split_at(dim);
    Ok((phases.to_vec(), angles[0]))
}

/// Range syntax "lo:hi:step" with step > 0 and hi >= lo; inclusive of
/// both ends up to rounding.
pub fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("range '{text}' must be lo:hi:step")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("range: '{s}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) {
        return Err(Failure::usage(format!("range step must be positive, got {step}")));
    }
    if hi < lo {
        return Err(Failure::usage(format!("empty range: {hi} < {lo}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Phases for the starting base point: comma list or all zeros.
pub fn parse_phases(text: Option<&str>, dim: usize) -> Result<TorusPoint, Failure> {
    let phases = match text {
        None => vec![0.0; dim],
        Some(t) => {
            let v = parse_list(t, "phases")?;
            if v.len() != dim {
                return Err(Failure::usage(format!(
                    "phases: got {} values for a {dim}-dimensional torus",
                    v.len()
                )));
            }
            v
        }
    };
    TorusPoint::new(phases).map_err(Failure::from)
}

pub fn case_label(case: SpectralCase) -> &'static str {
    match case {
        SpectralCase::Negative => "NEGATIVE",
        SpectralCase::Zero => "ZERO",
        SpectralCase::Positive => "POSITIVE",
        SpectralCase::Unresolved => "UNRESOLVED",
    }
}
