//! Pullback attractor of the dissipative system.
//!
//! The attractor is fibered over the base torus: above each base point
//! it is a star-shaped region whose boundary radius beta(omega, theta)
//! is the pullback limit of the radial flow started on the absorbing
//! radius in the remote past. The estimator exploits that the angular
//! equation ignores the radius: to evaluate the boundary at (omega,
//! theta), pull the angle back for a horizon t, then run the nonlinear
//! system forward from the absorbing radius; the angle returns to theta
//! and the radius lands on the horizon-t pullback value.
//!
//! Pullback values are monotone nonincreasing in the horizon (the
//! radial flow preserves order and the start radius dominates), so the
//! last decrement is an honest convergence residual. Monotonicity is
//! checked, not assumed: a violation is flagged and the value kept.
//!
//! The angle's return to its target is exact in theory but not in
//! floating point: when the driven exponents swing far from zero the
//! backward angle is pinched exponentially close to a separatrix and
//! the forward leg re-expands integration error to order one. The
//! estimator records the observed return mismatch per point instead of
//! trusting it; a large defect means the value is a boundary sample at
//! a nearby angle rather than at the requested one.

use crate::cocycle::{angular_final, polar_linear_watch};
use crate::driving::{reduce_phase, SystemFamily, TorusPoint, TAU};
use crate::nonlinear::integrate_radial_nonlinear;
use crate::ode::StepControl;
use crate::{Error, Result};
use rayon::prelude::*;

/// Pullback horizons used when no schedule is given.
pub const DEFAULT_SCHEDULE: [f64; 5] = [50.0, 100.0, 200.0, 400.0, 800.0];
/// The schedule stops early once a decrement falls below this.
pub const CONVERGENCE_DECREMENT: f64 = 1e-4;
/// Reported residuals never drop below this floor; exponential cases
/// converge to machine noise and a zero residual would make any
/// residual-relative acceptance check vacuous.
pub const RESIDUAL_FLOOR: f64 = 1e-9;
/// Slack allowed before a positive increment counts as a monotonicity
/// violation.
const MONOTONE_SLACK: f64 = 1e-8;
/// An angle-return mismatch beyond this marks the point as
/// ill-conditioned.
pub const ANGLE_DEFECT_TOL: f64 = 1e-3;

/// Pullback boundary estimate at one (base point, angle) pair.
#[derive(Clone, Copy, Debug)]
pub struct PullbackPoint {
    /// Radius at the last horizon used.
    pub value: f64,
    /// max(|last decrement|, floor).
    pub residual: f64,
    pub horizons_used: usize,
    /// False if some horizon increased the value beyond slack.
    pub monotone: bool,
    /// Largest wrapped mismatch between the requested angle and the
    /// angle actually reached after the back-and-forth, over all
    /// horizons used.
    pub angle_defect: f64,
}

/// Estimate beta(omega, theta) by pullback from `r_start` (normally the
/// absorbing radius) over the given horizon schedule.
pub fn pullback_beta(
    fam: &SystemFamily,
    p: &TorusPoint,
    theta: f64,
    r_start: f64,
    schedule: &[f64],
    ctl: StepControl,
) -> Result<PullbackPoint> {
    if schedule.is_empty() {
        return Err(Error::invalid("pullback schedule must be nonempty"));
    }
    if !(r_start > 0.0) {
        return Err(Error::invalid(format!("start radius must be positive, got {r_start}")));
    }
    let mut value = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut monotone = true;
    let mut used = 0;
    let mut angle_defect = 0.0f64;
    for (i, &t_k) in schedule.iter().enumerate() {
        if !(t_k > 0.0) {
            return Err(Error::invalid("pullback horizons must be positive"));
        }
        let theta_back = angular_final(fam, p, theta, -t_k, ctl)?;
        let p_back = p.advance(&fam.freqs, -t_k);
        let out = integrate_radial_nonlinear(fam, &p_back, theta_back, r_start, t_k, ctl)?;
        if out.escaped.is_some() {
            return Err(Error::invalid("pullback trajectory escaped; configuration is broken"));
        }
        let d = (out.state.lift - theta).rem_euclid(TAU);
        angle_defect = angle_defect.max(d.min(TAU - d));
        let r = out.state.radius();
        used = i + 1;
        if i > 0 {
            let decrement = value - r;
            if decrement < -MONOTONE_SLACK {
                monotone = false;
            }
            residual = decrement.abs();
            value = r;
            if residual < CONVERGENCE_DECREMENT {
                break;
            }
        } else {
            value = r;
        }
    }
    Ok(PullbackPoint {
        value,
        residual: residual.max(RESIDUAL_FLOOR),
        horizons_used: used,
        monotone,
        angle_defect,
    })
}

/// Pullback boundary sampled on a product grid: equispaced phases per
/// torus dimension times equispaced angles. Values are stored with the
/// angle index innermost.
#[derive(Clone, Debug)]
pub struct BetaGrid {
    pub phase_counts: Vec<usize>,
    pub n_angles: usize,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Largest pullback horizon actually integrated per grid point.
    pub horizons: Vec<f64>,
    /// Per-point monotonicity of the horizon sequence.
    pub monotone: Vec<bool>,
    /// Per-point angle-return mismatch.
    pub angle_defects: Vec<f64>,
    /// Number of grid points whose horizon sequence was not monotone.
    pub flagged: usize,
    pub r_start: f64,
}

impl BetaGrid {
    pub fn compute(
        fam: &SystemFamily,
        phase_counts: &[usize],
        n_angles: usize,
        r_start: f64,
        schedule: &[f64],
        ctl: StepControl,
    ) -> Result<BetaGrid> {
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
        let points: Vec<PullbackPoint> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let (p, theta) = Self::unflatten(phase_counts, n_angles, flat);
                pullback_beta(fam, &p, theta, r_start, schedule, ctl)
            })
            .collect::<Result<_>>()?;
        let flagged = points.iter().filter(|p| !p.monotone).count();
        Ok(BetaGrid {
            phase_counts: phase_counts.to_vec(),
            n_angles,
            values: points.iter().map(|p| p.value).collect(),
            residuals: points.iter().map(|p| p.residual).collect(),
            horizons: points.iter().map(|p| schedule[p.horizons_used - 1]).collect(),
            monotone: points.iter().map(|p| p.monotone).collect(),
            angle_defects: points.iter().map(|p| p.angle_defect).collect(),
            flagged,
            r_start,
        })
    }

    fn unflatten(phase_counts: &[usize], n_angles: usize, flat: usize) -> (TorusPoint, f64) {
        let angle_idx = flat % n_angles;
        let mut rest = flat / n_angles;
        let mut phases = vec![0.0; phase_counts.len()];
        for (phi, &count) in phases.iter_mut().zip(phase_counts).rev() {
            let idx = rest % count;
            rest /= count;
            *phi = TAU * idx as f64 / count as f64;
        }
        let theta = TAU * angle_idx as f64 / n_angles as f64;
        (TorusPoint::new(phases).expect("finite phases"), theta)
    }

    /// Grid point for a flat index, in the same order as `values`.
    pub fn site(&self, flat: usize) -> (TorusPoint, f64) {
        Self::unflatten(&self.phase_counts, self.n_angles, flat)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_value(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_angle_defect(&self) -> f64 {
        self.angle_defects.iter().copied().fold(0.0, f64::max)
    }
}

/// Check that a pullback value behaves as an equilibrium of the process:
/// push it forward for `t_check`, then compare against a fresh pullback
/// at the advanced base point and angle. Returns the discrepancy.
pub fn equilibrium_residual(
    fam: &SystemFamily,
    p: &TorusPoint,
    theta: f64,
    beta_value: f64,
    r_start: f64,
    t_check: f64,
    schedule: &[f64],
    ctl: StepControl,
) -> Result<f64> {
    if !(t_check > 0.0) {
        return Err(Error::invalid("t_check must be positive"));
    }
    let out = integrate_radial_nonlinear(fam, p, theta, beta_value, t_check, ctl)?;
    if out.escaped.is_some() {
        return Err(Error::invalid("equilibrium check escaped; configuration is broken"));
    }
    let p_fwd = p.advance(&fam.freqs, t_check);
    let fresh =
        pullback_beta(fam, &p_fwd, reduce_phase(out.state.lift), r_start, schedule, ctl)?;
    Ok((out.state.radius() - fresh.value).abs())
}

/// Outcome of the bounded-past probe for the linear flow.
#[derive(Clone, Copy, Debug)]
pub struct BoundedPast {
    /// True if log r stayed at or below the bound over the whole
    /// backward horizon.
    pub bounded: bool,
    pub sup_log_r: f64,
    pub t_sup: f64,
}

/// Does the linear solution through (theta, r = 1) stay bounded in the
/// past? Probes backward for `horizon` with an early stop once log r
/// exceeds `log_bound`.
pub fn bounded_past_test(
    fam: &SystemFamily,
    p: &TorusPoint,
    theta: f64,
    horizon: f64,
    log_bound: f64,
    ctl: StepControl,
) -> Result<BoundedPast> {
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let w = polar_linear_watch(fam, p, theta, 0.0, -horizon, ctl, Some(log_bound))?;
    Ok(BoundedPast {
        bounded: w.stopped_at.is_none() && w.sup_log_r <= log_bound,
        sup_log_r: w.sup_log_r,
        t_sup: w.t_sup,
    })
}

/// Envelope radius of the linear flow: sup of r over [-horizon, horizon]
/// for the solution with r(0) = 1. In the bounded zero-exponent regime
/// the attractor boundary satisfies beta = rho / alpha.
pub fn alpha_sup(
    fam: &SystemFamily,
    p: &TorusPoint,
    theta: f64,
    horizon: f64,
    ctl: StepControl,
) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let fwd = polar_linear_watch(fam, p, theta, 0.0, horizon, ctl, None)?;
    let bwd = polar_linear_watch(fam, p, theta, 0.0, -horizon, ctl, None)?;
    Ok(fwd.sup_log_r.max(bwd.sup_log_r).max(0.0).exp())
}

/// Attractor boundary over an angle sweep at one base point: the radial
/// section used for plots.
#[derive(Clone, Debug)]
pub struct Section {
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
    pub max_residual: f64,
    pub flagged: usize,
    pub max_angle_defect: f64,
}

pub fn attractor_section(
    fam: &SystemFamily,
    p: &TorusPoint,
    n_angles: usize,
    r_start: f64,
    schedule: &[f64],
    ctl: StepControl,
) -> Result<Section> {
    if n_angles == 0 {
        return Err(Error::invalid("need at least one angle"));
    }
    let angles: Vec<f64> = (0..n_angles).map(|j| TAU * j as f64 / n_angles as f64).collect();
    let points: Vec<PullbackPoint> = angles
        .par_iter()
        .map(|&theta| pullback_beta(fam, p, theta, r_start, schedule, ctl))
        .collect::<Result<_>>()?;
    Ok(Section {
        angles,
        radii: points.iter().map(|p| p.value).collect(),
        max_residual: points.iter().map(|p| p.residual).fold(0.0, f64::max),
        flagged: points.iter().filter(|p| !p.monotone).count(),
        max_angle_defect: points.iter().map(|p| p.angle_defect).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::{compute_r_rho, DEFAULT_DELTA};
    use crate::presets;

    fn ctl() -> StepControl {
        StepControl::default()
    }

    #[test]
    fn expanding_rotation_pulls_back_to_the_circle() {
        // Radial equation r' = r (eps - k(r)): stable circle at
        // rho + sqrt(eps), reached to machine precision within the
        // first two horizons.
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let want = 0.5 + 0.5f64.sqrt();
        let pb =
            pullback_beta(&fam, &p, 1.3, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        assert!((pb.value - want).abs() < 1e-8, "beta = {}", pb.value);
        assert_eq!(pb.horizons_used, 2);
        assert!(pb.monotone);
        assert_eq!(pb.residual, RESIDUAL_FLOOR);
    }

    #[test]
    fn contracting_rotation_pulls_back_to_the_origin() {
        let fam = presets::autonomous(-0.15);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let pb =
            pullback_beta(&fam, &p, 0.0, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        assert!(pb.value < 1e-6, "beta = {}", pb.value);
        assert!(pb.monotone);
        assert!(pb.horizons_used <= 3);
    }

    #[test]
    fn zero_case_converges_algebraically() {
        // Quasiperiodic eps = 0: g vanishes identically, the radial
        // equation is pure decay r' = -r k(r) and the pullback value
        // approaches rho like rho + 2/t. No early exit on the default
        // schedule; the residual reflects the slow tail.
        let fam = presets::quasiperiodic(0.0);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::new(vec![0.9, 2.4]).unwrap();
        let pb =
            pullback_beta(&fam, &p, 0.7, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        assert_eq!(pb.horizons_used, DEFAULT_SCHEDULE.len());
        assert!(pb.monotone);
        assert!(pb.value > 0.5 && pb.value < 0.51, "beta = {}", pb.value);
        assert!((pb.value - (0.5 + 2.0 / 800.0)).abs() < 5e-4, "beta = {}", pb.value);
        assert!(pb.residual > 1e-3 && pb.residual < 1e-2);
    }

    #[test]
    fn beta_grid_is_constant_for_the_autonomous_family() {
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let grid =
            BetaGrid::compute(&fam, &[4], 8, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        assert_eq!(grid.len(), 32);
        assert_eq!(grid.flagged, 0);
        let want = 0.5 + 0.5f64.sqrt();
        for v in &grid.values {
            assert!((v - want).abs() < 1e-8);
        }
        assert!((grid.mean_value() - want).abs() < 1e-8);
        assert!((grid.max_value() - want).abs() < 1e-8);
        // Site enumeration covers the full product grid.
        let (p_last, theta_last) = grid.site(31);
        assert!((p_last.phases()[0] - TAU * 3.0 / 4.0).abs() < 1e-12);
        assert!((theta_last - TAU * 7.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn pullback_value_is_an_equilibrium() {
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let pb =
            pullback_beta(&fam, &p, 0.4, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        let res = equilibrium_residual(
            &fam,
            &p,
            0.4,
            pb.value,
            radius.r_rho,
            50.0,
            &DEFAULT_SCHEDULE,
            ctl(),
        )
        .unwrap();
        assert!(res <= 5.0 * pb.residual, "residual {res} vs pullback {}", pb.residual);
    }

    #[test]
    fn bounded_past_separates_the_signs() {
        let p1 = TorusPoint::origin(1);
        let bound = 1e6f64.ln();
        // Contracting family: backward radius grows without bound.
        let contracting = presets::autonomous(-0.15);
        let b = bounded_past_test(&contracting, &p1, 0.2, 200.0, bound, ctl()).unwrap();
        assert!(!b.bounded);
        // Expanding family: backward radius decays, past is bounded.
        let expanding = presets::autonomous(0.3);
        let b = bounded_past_test(&expanding, &p1, 0.2, 200.0, bound, ctl()).unwrap();
        assert!(b.bounded);
        assert!(b.sup_log_r.abs() < 1e-9);
        // Rigid rotation at eps 0: identically bounded.
        let p2 = TorusPoint::origin(2);
        let b =
            bounded_past_test(&presets::quasiperiodic(0.0), &p2, 0.2, 200.0, bound, ctl()).unwrap();
        assert!(b.bounded);
    }

    #[test]
    fn alpha_is_one_for_norm_preserving_flows() {
        let p2 = TorusPoint::origin(2);
        for fam in [presets::quasiperiodic(0.0), presets::rotational(0.0)] {
            let a = alpha_sup(&fam, &p2, 1.1, 300.0, ctl()).unwrap();
            assert!((a - 1.0).abs() < 1e-8, "alpha = {a}");
        }
    }

    #[test]
    fn section_of_the_autonomous_attractor_is_round() {
        let fam = presets::autonomous(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(1);
        let s =
            attractor_section(&fam, &p, 16, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        assert_eq!(s.flagged, 0);
        assert!(s.max_angle_defect < ANGLE_DEFECT_TOL);
        let want = 0.5 + 0.5f64.sqrt();
        for r in &s.radii {
            assert!((r - want).abs() < 1e-8);
        }
    }

    #[test]
    fn angle_return_is_sharp_when_the_angular_flow_is_rigid() {
        // Rotation-dominated families keep the back-and-forth angle
        // honest to integrator accuracy.
        let fam = presets::quasiperiodic(0.5);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::new(vec![0.3, 1.8]).unwrap();
        let pb =
            pullback_beta(&fam, &p, 2.1, radius.r_rho, &DEFAULT_SCHEDULE, ctl()).unwrap();
        assert!(pb.angle_defect < 1e-7, "defect = {}", pb.angle_defect);
    }

    #[test]
    fn pinched_angles_are_kept_and_marked_not_fatal() {
        // Strong diagonal driving pins the backward angle exponentially
        // close to a separatrix; the forward leg then re-expands the
        // integration error to order one. The estimate must survive
        // with the mismatch on record instead of dying on an assertion.
        let fam = presets::chaotic(5, 2.0, 0.0);
        let radius = compute_r_rho(&fam, DEFAULT_DELTA).unwrap();
        let p = TorusPoint::origin(5);
        let s = attractor_section(
            &fam,
            &p,
            8,
            radius.r_rho,
            &[200.0, 400.0],
            ctl(),
        )
        .unwrap();
        assert!(s.radii.iter().all(|r| r.is_finite() && *r >= 0.0));
        assert!(s.max_angle_defect.is_finite());
    }
}
