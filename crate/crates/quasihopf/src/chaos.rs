//! Chaos diagnostics: scrambled-pair statistics, the fiberwise invariant
//! density, and the oscillation of the trace primitive.
//!
//! A pair of orbits is a Li-Yorke candidate when it is both proximal
//! (distance dips below a small threshold) and separated (distance also
//! exceeds a larger one) within the observation window. The verdicts
//! are candidates, not proofs: finite horizons cannot certify the
//! liminf/limsup behavior, only exhibit it. Thresholds are fixed
//! fractions of the absorbing radius so configurations of different
//! scale are judged alike.
//!
//! The density estimator integrates the inverse square of the traceless
//! radial factor backward in time; its average over a base-angle grid
//! estimates the mass of the corresponding invariant measure. For
//! families whose angular speed has no angle dependence the factor is
//! identically one and the density is exactly flat, a useful oracle.

use crate::attractor::{attractor_section, Section};
use crate::cocycle::PolarState;
use crate::driving::{SystemFamily, TorusPoint, TAU};
use crate::nonlinear::k_cut;
use crate::ode::{Control, Solver, StepControl};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Proximality threshold as a fraction of the absorbing radius.
pub const DELTA_LOW_FACTOR: f64 = 1e-3;
/// Separation threshold as a fraction of the absorbing radius.
pub const DELTA_HIGH_FACTOR: f64 = 5e-2;
/// Angles in the attractor section backing the scrambled sampler.
pub const SECTION_ANGLES: usize = 16;
/// A section whose largest radius is below this is treated as the
/// degenerate attractor {0}.
pub const DEGENERATE_RADIUS: f64 = 1e-6;

/// Verdict for one orbit pair over the observation window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairVerdict {
    /// Proximal and separated within the window.
    LiYorkeCandidate,
    /// Distance stayed below the proximality threshold at its largest:
    /// the pair looks forward-asymptotic.
    Asymptotic,
    /// Distance never came near zero: the pair looks distal.
    Distal,
    /// None of the patterns resolved within the window.
    Unresolved,
}

impl PairVerdict {
    pub fn label(self) -> &'static str {
        match self {
            PairVerdict::LiYorkeCandidate => "LI_YORKE_CANDIDATE",
            PairVerdict::Asymptotic => "ASYMPTOTIC",
            PairVerdict::Distal => "DISTAL",
            PairVerdict::Unresolved => "UNRESOLVED",
        }
    }
}

/// Distance extrema of one pair over the window [horizon/2, horizon].
#[derive(Clone, Copy, Debug)]
pub struct PairTrack {
    pub d_min: f64,
    pub t_min: f64,
    pub d_max: f64,
    pub t_max: f64,
    pub verdict: PairVerdict,
    pub delta_low: f64,
    pub delta_high: f64,
    pub horizon: f64,
}

#[inline]
fn planar_distance(lift1: f64, r1: f64, lift2: f64, r2: f64) -> f64 {
    (r1 * lift1.sin() - r2 * lift2.sin()).hypot(r1 * lift1.cos() - r2 * lift2.cos())
}

/// Run two orbits of the dissipative system jointly and track their
/// planar distance over the second half of the horizon. Thresholds are
/// the fixed fractions of `r_rho`.
pub fn pair_distance_track(
    fam: &SystemFamily,
    p: &TorusPoint,
    first: PolarState,
    second: PolarState,
    horizon: f64,
    r_rho: f64,
    ctl: StepControl,
) -> Result<PairTrack> {
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    if !(r_rho > 0.0) {
        return Err(Error::invalid("r_rho must be positive"));
    }
    let orbit = fam.along_orbit(p);
    let rho = fam.rho;
    let rhs = move |t: f64, y: &[f64; 4]| {
        let (a, b, c, d) = orbit.entries(t);
        let mut out = [0.0; 4];
        for i in [0, 2] {
            let (s, co) = y[i].sin_cos();
            let f = -c * s * s + b * co * co + (a - d) * s * co;
            let g = a * s * s + d * co * co + (b + c) * s * co;
            out[i] = f;
            out[i + 1] = y[i + 1] * (g - k_cut(rho, y[i + 1]));
        }
        out
    };
    let y0 = [first.lift, first.radius(), second.lift, second.radius()];
    let mut solver = Solver::new(rhs, 0.0, y0, ctl);
    let window_start = 0.5 * horizon;
    let (mut d_min, mut t_min) = (f64::INFINITY, window_start);
    let (mut d_max, mut t_max) = (f64::NEG_INFINITY, window_start);
    solver.run_to_hooked(horizon, |t, y| {
        y[1] = y[1].max(0.0);
        y[3] = y[3].max(0.0);
        if t >= window_start {
            let d = planar_distance(y[0], y[1], y[2], y[3]);
            if d < d_min {
                d_min = d;
                t_min = t;
            }
            if d > d_max {
                d_max = d;
                t_max = t;
            }
        }
        Control::Continue
    })?;
    let delta_low = DELTA_LOW_FACTOR * r_rho;
    let delta_high = DELTA_HIGH_FACTOR * r_rho;
    let verdict = if d_min < delta_low && d_max > delta_high {
        PairVerdict::LiYorkeCandidate
    } else if d_max <= delta_low {
        PairVerdict::Asymptotic
    } else if d_min >= delta_low {
        PairVerdict::Distal
    } else {
        PairVerdict::Unresolved
    };
    Ok(PairTrack { d_min, t_min, d_max, t_max, verdict, delta_low, delta_high, horizon })
}

/// One sampled pair with its track.
#[derive(Clone, Copy, Debug)]
pub struct PairSample {
    pub theta1: f64,
    pub r1: f64,
    pub theta2: f64,
    pub r2: f64,
    pub track: PairTrack,
}

/// Verdict tallies of a scrambled-pair experiment.
#[derive(Clone, Debug)]
pub struct ScrambledReport {
    pub seed: u64,
    pub horizon: f64,
    pub delta_low: f64,
    pub delta_high: f64,
    pub li_yorke: usize,
    pub asymptotic: usize,
    pub distal: usize,
    pub unresolved: usize,
    pub li_yorke_fraction: f64,
    /// Largest section radius; the run is degenerate when it is below
    /// [`DEGENERATE_RADIUS`] and no pairs are integrated.
    pub section_max: f64,
    pub degenerate: bool,
    pub pairs: Vec<PairSample>,
}

/// Sample `n_pairs` random pairs inside the attractor section above one
/// base point and classify each with [`pair_distance_track`].
///
/// Points are drawn as (theta uniform on the circle, radius uniform on
/// [0, beta(theta_bin)]) with the section radius looked up at the
/// nearest of [`SECTION_ANGLES`] bins, no interpolation. The PRNG is
/// seeded explicitly and the seed is echoed in the report.
#[allow(clippy::too_many_arguments)]
pub fn scrambled_sample(
    fam: &SystemFamily,
    p: &TorusPoint,
    r_rho: f64,
    n_pairs: usize,
    horizon: f64,
    seed: u64,
    schedule: &[f64],
    ctl: StepControl,
) -> Result<ScrambledReport> {
    let section = attractor_section(fam, p, SECTION_ANGLES, r_rho, schedule, ctl)?;
    let section_max = section.radii.iter().copied().fold(0.0, f64::max);
    let delta_low = DELTA_LOW_FACTOR * r_rho;
    let delta_high = DELTA_HIGH_FACTOR * r_rho;
    if section_max < DEGENERATE_RADIUS {
        return Ok(ScrambledReport {
            seed,
            horizon,
            delta_low,
            delta_high,
            li_yorke: 0,
            asymptotic: 0,
            distal: 0,
            unresolved: 0,
            li_yorke_fraction: 0.0,
            section_max,
            degenerate: true,
            pairs: Vec::new(),
        });
    }
    // Draw every coordinate up front so parallelism cannot perturb the
    // stream order.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let theta1 = TAU * rng.gen::<f64>();
        let u1 = rng.gen::<f64>();
        let theta2 = TAU * rng.gen::<f64>();
        let u2 = rng.gen::<f64>();
        draws.push((theta1, u1, theta2, u2));
    }
    let radius_at = |theta: f64, u: f64, s: &Section| {
        let bin = ((theta / TAU * SECTION_ANGLES as f64).round() as usize) % SECTION_ANGLES;
        u * s.radii[bin]
    };
    let pairs: Vec<PairSample> = draws
        .into_par_iter()
        .map(|(theta1, u1, theta2, u2)| {
            let r1 = radius_at(theta1, u1, &section);
            let r2 = radius_at(theta2, u2, &section);
            let track = pair_distance_track(
                fam,
                p,
                PolarState::new(theta1, r1.max(f64::MIN_POSITIVE).ln()),
                PolarState::new(theta2, r2.max(f64::MIN_POSITIVE).ln()),
                horizon,
                r_rho,
                ctl,
            )?;
            Ok(PairSample { theta1, r1, theta2, r2, track })
        })
        .collect::<Result<_>>()?;
    let count = |v: PairVerdict| pairs.iter().filter(|s| s.track.verdict == v).count();
    let li_yorke = count(PairVerdict::LiYorkeCandidate);
    Ok(ScrambledReport {
        seed,
        horizon,
        delta_low,
        delta_high,
        li_yorke,
        asymptotic: count(PairVerdict::Asymptotic),
        distal: count(PairVerdict::Distal),
        unresolved: count(PairVerdict::Unresolved),
        li_yorke_fraction: li_yorke as f64 / n_pairs.max(1) as f64,
        section_max,
        degenerate: false,
        pairs,
    })
}

/// Density of the fiberwise invariant measure estimated over a backward
/// window of length `t`: the time average of the inverse squared
/// traceless radial factor along the backward orbit through (p, theta).
pub fn density_at(
    fam: &SystemFamily,
    p: &TorusPoint,
    theta: f64,
    t: f64,
    ctl: StepControl,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("window length must be positive"));
    }
    let orbit = fam.along_orbit(p);
    // State: angle lift, log of the traceless radial factor, quadrature
    // accumulator for the inverse square.
    let rhs = move |s: f64, y: &[f64; 3]| {
        let (a, b, c, d) = orbit.entries(s);
        let (sn, co) = y[0].sin_cos();
        let f = -c * sn * sn + b * co * co + (a - d) * sn * co;
        let (s2, c2) = (2.0 * y[0]).sin_cos();
        let df = -(b + c) * s2 + (a - d) * c2;
        [f, -0.5 * df, -(-2.0 * y[1]).exp()]
    };
    let y = crate::ode::integrate_final(rhs, 0.0, [theta, 0.0, 0.0], -t, ctl)?;
    Ok(y[2] / t)
}

/// Density sampled on a product grid, angle index innermost.
#[derive(Clone, Debug)]
pub struct DensityGrid {
    pub phase_counts: Vec<usize>,
    pub n_angles: usize,
    pub window: f64,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn compute(
        fam: &SystemFamily,
        phase_counts: &[usize],
        n_angles: usize,
        window: f64,
        ctl: StepControl,
    ) -> Result<DensityGrid> {
        if phase_counts.len() != fam.dim() {
            return Err(Error::invalid(format!(
                "grid has {} phase dimensions but the torus has {}",
                phase_counts.len(),
                fam.dim()
            )));
        }
        if n_angles == 0 || phase_counts.iter().any(|&c| c == 0) {
            return Err(Error::invalid("grid counts must be positive"));
        }
        let total: usize = phase_counts.iter().product::<usize>() * n_angles;
        let values: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let (p, theta) = site(phase_counts, n_angles, flat);
                density_at(fam, &p, theta, window, ctl)
            })
            .collect::<Result<_>>()?;
        Ok(DensityGrid {
            phase_counts: phase_counts.to_vec(),
            n_angles,
            window,
            values,
        })
    }

    /// Grid point for a flat index, in the same order as `values`.
    pub fn site(&self, flat: usize) -> (TorusPoint, f64) {
        site(&self.phase_counts, self.n_angles, flat)
    }

    /// Grid mean: total mass of the estimated measure relative to the
    /// normalized product measure. Near 1 when the window has converged.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn site(phase_counts: &[usize], n_angles: usize, flat: usize) -> (TorusPoint, f64) {
    let angle_idx = flat % n_angles;
    let mut rest = flat / n_angles;
    let mut phases = vec![0.0; phase_counts.len()];
    for (phi, &count) in phases.iter_mut().zip(phase_counts).rev() {
        let idx = rest % count;
        rest /= count;
        *phi = TAU * idx as f64 / count as f64;
    }
    (TorusPoint::new(phases).expect("finite phases"), TAU * angle_idx as f64 / n_angles as f64)
}

/// Extrema and mean of the half-trace primitive H(t) = integral of e
/// over [-horizon, horizon], H(0) = 0.
#[derive(Clone, Copy, Debug)]
pub struct OscillationReport {
    pub sup: f64,
    pub t_sup: f64,
    pub inf: f64,
    pub t_inf: f64,
    /// (H(horizon) - H(-horizon)) / (2 horizon): the orbit average of e.
    pub mean: f64,
    pub horizon: f64,
}

pub fn primitive_oscillation(
    fam: &SystemFamily,
    p: &TorusPoint,
    horizon: f64,
    ctl: StepControl,
) -> Result<OscillationReport> {
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let orbit = fam.along_orbit(p);
    let rhs = |t: f64, _y: &[f64; 1]| [orbit.e(t)];
    let mut report = OscillationReport {
        sup: 0.0,
        t_sup: 0.0,
        inf: 0.0,
        t_inf: 0.0,
        mean: 0.0,
        horizon,
    };
    let mut ends = [0.0; 2];
    for (i, dir) in [horizon, -horizon].into_iter().enumerate() {
        let mut solver = Solver::new(&rhs, 0.0, [0.0], ctl);
        solver.run_to_hooked(dir, |t, y| {
            if y[0] > report.sup {
                report.sup = y[0];
                report.t_sup = t;
            }
            if y[0] < report.inf {
                report.inf = y[0];
                report.t_inf = t;
            }
            Control::Continue
        })?;
        ends[i] = solver.y[0];
    }
    report.mean = (ends[0] - ends[1]) / (2.0 * horizon);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::DEFAULT_SCHEDULE;
    use crate::nonlinear::{compute_r_rho, DEFAULT_DELTA};
    use crate::presets;
    use std::f64::consts::FRAC_PI_2;

    fn ctl() -> StepControl {
        StepControl::default()
    }

    #[test]
    fn same_ray_pair_is_asymptotic() {
        // Same angle, different radii: both settle on the invariant
        // circle and the distance dies.
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let track = pair_distance_track(
            &fam,
            &p,
            PolarState::new(0.4, 1.0f64.ln()),
            PolarState::new(0.4, 1.2f64.ln()),
            40.0,
            radius.r_rho,
            ctl(),
        )
        .unwrap();
        assert_eq!(track.verdict, PairVerdict::Asymptotic);
        assert!(track.d_max < track.delta_low);
    }

    #[test]
    fn separated_angles_stay_distal_under_rigid_rotation() {
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let r_star = 0.5 + 0.5f64.sqrt();
        let track = pair_distance_track(
            &fam,
            &p,
            PolarState::new(0.0, r_star.ln()),
            PolarState::new(FRAC_PI_2, r_star.ln()),
            40.0,
            radius.r_rho,
            ctl(),
        )
        .unwrap();
        assert_eq!(track.verdict, PairVerdict::Distal);
        // Angle gap is rigid: the distance is the chord at pi/2.
        let chord = r_star * 2.0 * (0.25 * std::f64::consts::PI).sin();
        assert!((track.d_min - chord).abs() < 1e-6);
        assert!((track.d_max - chord).abs() < 1e-6);
    }

    #[test]
    fn scrambled_runs_are_seeded_and_reproducible() {
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let run = || {
            scrambled_sample(&fam, &p, radius.r_rho, 6, 30.0, 17, &DEFAULT_SCHEDULE, ctl())
                .unwrap()
        };
        let a = run();
        let b = run();
        assert!(!a.degenerate);
        assert_eq!(a.li_yorke, 0, "rigid rotation cannot scramble");
        assert_eq!(a.li_yorke + a.asymptotic + a.distal + a.unresolved, 6);
        assert_eq!(a.li_yorke_fraction, 0.0);
        for (x, y) in a.pairs.iter().zip(&b.pairs) {
            assert_eq!(x.theta1, y.theta1);
            assert_eq!(x.r1, y.r1);
            assert_eq!(x.track.d_min, y.track.d_min);
            assert_eq!(x.track.verdict, y.track.verdict);
        }
        // A different seed draws different points.
        let c = scrambled_sample(&fam, &p, radius.r_rho, 6, 30.0, 18, &DEFAULT_SCHEDULE, ctl())
            .unwrap();
        assert!(c.pairs[0].theta1 != a.pairs[0].theta1);
    }

    #[test]
    fn degenerate_attractor_is_reported_not_sampled() {
        let fam = presets::autonomous(-0.15);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let report =
            scrambled_sample(&fam, &p, radius.r_rho, 4, 30.0, 1, &DEFAULT_SCHEDULE, ctl())
                .unwrap();
        assert!(report.degenerate);
        assert!(report.section_max < DEGENERATE_RADIUS);
        assert!(report.pairs.is_empty());
    }

    #[test]
    fn density_is_flat_for_angle_free_rotation() {
        // Angular speed has no angle dependence, so the traceless
        // radial factor is identically 1 and the window average is
        // exactly 1, for every window length.
        let fam = presets::quasiperiodic(0.0);
        let p = TorusPoint::new(vec![1.9, 0.3]).unwrap();
        for t in [5.0, 40.0] {
            let d = density_at(&fam, &p, 1.2, t, ctl()).unwrap();
            assert!((d - 1.0).abs() < 1e-9, "window {t}: density {d}");
        }
        let grid = DensityGrid::compute(&fam, &[3, 3], 4, 10.0, ctl()).unwrap();
        assert_eq!(grid.values.len(), 36);
        assert!((grid.mass() - 1.0).abs() < 1e-9);
        for v in &grid.values {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn density_positive_and_half_turn_symmetric() {
        // Angle-dependent family: the density varies over the section
        // but stays positive, and theta and theta + pi see the same
        // backward radial factor, so their values coincide.
        let fam = presets::chaotic(2, 0.8, 0.0);
        let grid = DensityGrid::compute(&fam, &[4, 4], 8, 30.0, ctl()).unwrap();
        for v in &grid.values {
            assert!(*v > 0.0);
        }
        for site in 0..grid.values.len() / 8 {
            for j in 0..4 {
                let a = grid.values[site * 8 + j];
                let b = grid.values[site * 8 + j + 4];
                assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn primitive_oscillation_of_constant_trace() {
        let fam = presets::autonomous(0.3);
        let p = TorusPoint::origin(1);
        let rep = primitive_oscillation(&fam, &p, 50.0, ctl()).unwrap();
        assert!((rep.mean - 0.3).abs() < 1e-10);
        assert!((rep.sup - 15.0).abs() < 1e-8);
        assert!((rep.inf + 15.0).abs() < 1e-8);
        assert!((rep.t_sup - 50.0).abs() < 1e-9);
        assert!((rep.t_inf + 50.0).abs() < 1e-9);
    }

    #[test]
    fn primitive_oscillation_matches_closed_form() {
        let fam = presets::chaotic(3, 1.0, 0.0);
        let p = TorusPoint::origin(3);
        let h = presets::chaotic_primitive(3, 1.0);
        let rep = primitive_oscillation(&fam, &p, 200.0, ctl()).unwrap();
        // Mean from the closed form; H is odd so the average is
        // H(T)/T up to sign bookkeeping.
        let want_mean = (h(200.0) - h(-200.0)) / 400.0;
        assert!((rep.mean - want_mean).abs() < 1e-9);
        // Extrema agree with a dense sample of the closed form.
        let mut sup: f64 = 0.0;
        let mut inf: f64 = 0.0;
        let mut t = -200.0;
        while t <= 200.0 {
            let v = h(t);
            sup = sup.max(v);
            inf = inf.min(v);
            t += 0.05;
        }
        assert!((rep.sup - sup).abs() < 1e-3, "sup {} vs {sup}", rep.sup);
        assert!((rep.inf - inf).abs() < 1e-3, "inf {} vs {inf}", rep.inf);
    }
}
