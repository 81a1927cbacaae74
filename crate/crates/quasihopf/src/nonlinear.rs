//! Dissipative nonlinearity and the absorbing radius.
//!
//! The full system is y' = (A + eps I)(omega . t) y - k_rho(|y|) y with
//! the radial cutoff k_rho(r) = 0 for r <= rho and (r - rho)^2 beyond.
//! The cutoff acts along the ray through y, so the angular equation of
//! the polar split is untouched and only the radius feels it:
//!
//! ```text
//! theta' = f(omega . t, theta)
//! r'     = r (g(omega . t, theta) - k_rho(r))
//! ```
//!
//! Outside the absorbing radius r_rho = rho + sqrt(max_g + delta) the
//! radial derivative is strictly negative whatever the base point and
//! angle, so [0, r_rho] absorbs every forward orbit. max_g is the
//! supremum of g over base x angle; the angle maximum has a closed form
//! at fixed coefficients, the base supremum is taken on a grid for low
//! torus dimension and bounded by harmonic amplitude sums otherwise.

use crate::cocycle::PolarState;
use crate::driving::{SystemFamily, TorusPoint, TrigPoly, TAU};
use crate::ode::{Control, Solver, StepControl};
use crate::{Error, Result};

/// Default safety margin delta added under the square root of r_rho.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Radius past which a trajectory is reported as escaped. Escape is a
/// result, not an error: dissipativity makes it unreachable, so seeing
/// it means the configuration or the integration is broken.
pub const ESCAPE_RADIUS: f64 = 1e12;

/// Absorption is declared the first time r drops below r_rho + this.
pub const ABSORB_MARGIN: f64 = 0.01;

/// Quadratic radial cutoff: 0 on [0, rho], (r - rho)^2 beyond.
/// Negative radii are outside the domain.
pub fn k_rho(rho: f64, r: f64) -> Result<f64> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::invalid(format!("radius must be finite and nonnegative, got {r}")));
    }
    Ok(k_cut(rho, r))
}

#[inline]
pub(crate) fn k_cut(rho: f64, r: f64) -> f64 {
    let excess = r - rho;
    if excess > 0.0 {
        excess * excess
    } else {
        0.0
    }
}

/// How the supremum of g was obtained.
#[derive(Clone, Copy, Debug)]
pub enum MaxGEstimate {
    /// Exact angle maximization on a base grid, with a refined pass.
    /// `refined >= coarse` always; a large gap flags an inadequate grid.
    Grid { per_dim: usize, coarse: f64, refined: f64 },
    /// Amplitude-sum upper bound, used when the torus dimension makes a
    /// grid infeasible. Conservative: r_rho comes out larger than
    /// necessary, which is harmless for absorption.
    SeriesBound,
}

/// Absorbing radius and the ingredients that produced it.
#[derive(Clone, Debug)]
pub struct AbsorbingRadius {
    pub r_rho: f64,
    /// Supremum (or upper bound) of g over base x angle.
    pub max_g: f64,
    pub delta: f64,
    pub estimate: MaxGEstimate,
}

/// Largest torus dimension the grid search is willing to sweep.
const GRID_MAX_DIM: usize = 3;
const GRID_PER_DIM: usize = 64;

/// Compute r_rho = rho + sqrt(max_g + delta), clamped to rho when
/// max_g + delta <= 0 (the dissipation then bites at the cutoff knee
/// itself and [0, rho] already absorbs).
pub fn compute_r_rho(fam: &SystemFamily, delta: f64) -> Result<AbsorbingRadius> {
    if !(delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let (max_g, estimate) = if fam.dim() <= GRID_MAX_DIM {
        let coarse = max_g_on_grid(fam, GRID_PER_DIM);
        let refined = max_g_on_grid(fam, GRID_PER_DIM * 4);
        (refined.max(coarse), MaxGEstimate::Grid { per_dim: GRID_PER_DIM, coarse, refined })
    } else {
        (max_g_series_bound(fam), MaxGEstimate::SeriesBound)
    };
    let shifted = max_g + delta;
    let r_rho = if shifted > 0.0 { fam.rho + shifted.sqrt() } else { fam.rho };
    Ok(AbsorbingRadius { r_rho, max_g, delta, estimate })
}

/// max over theta of g at fixed coefficients:
/// (a + d)/2 + sqrt(((a - d)/2)^2 + ((b + c)/2)^2).
#[inline]
fn max_g_over_angle(a: f64, b: f64, c: f64, d: f64) -> f64 {
    0.5 * (a + d) + (0.5 * (a - d)).hypot(0.5 * (b + c))
}

fn max_g_on_grid(fam: &SystemFamily, per_dim: usize) -> f64 {
    let dim = fam.dim();
    let eval = |poly: &TrigPoly, phases: &[f64]| -> f64 {
        let mut acc = poly.constant;
        for term in &poly.terms {
            let angle: f64 =
                term.k.iter().zip(phases).map(|(k, phi)| *k as f64 * phi).sum();
            acc += term.cos_coeff * angle.cos() + term.sin_coeff * angle.sin();
        }
        acc
    };
    let step = TAU / per_dim as f64;
    let mut idx = vec![0usize; dim];
    let mut phases = vec![0.0f64; dim];
    let mut best = f64::NEG_INFINITY;
    loop {
        for (phi, i) in phases.iter_mut().zip(&idx) {
            *phi = step * *i as f64;
        }
        let a = eval(&fam.matrix.a, &phases) + fam.epsilon;
        let b = eval(&fam.matrix.b, &phases);
        let c = eval(&fam.matrix.c, &phases);
        let d = eval(&fam.matrix.d, &phases) + fam.epsilon;
        best = best.max(max_g_over_angle(a, b, c, d));
        // Odometer increment over the grid.
        let mut carry = true;
        for i in idx.iter_mut() {
            *i += 1;
            if *i < per_dim {
                carry = false;
                break;
            }
            *i = 0;
        }
        if carry {
            return best;
        }
    }
}

/// Upper bound via harmonic amplitude sums: bound each coefficient
/// combination uniformly over the torus, then maximize the angle form.
fn max_g_series_bound(fam: &SystemFamily) -> f64 {
    let half = |p: &TrigPoly| scaled(p, 0.5);
    let sum_ad = half(&fam.matrix.a).add(&half(&fam.matrix.d));
    let dif_ad = half(&fam.matrix.a).add(&scaled(&fam.matrix.d, -0.5));
    let sum_bc = half(&fam.matrix.b).add(&half(&fam.matrix.c));
    sum_ad.sup_bound() + fam.epsilon + dif_ad.abs_bound().hypot(sum_bc.abs_bound())
}

fn scaled(p: &TrigPoly, k: f64) -> TrigPoly {
    let mut out = p.clone();
    out.constant *= k;
    for t in out.terms.iter_mut() {
        t.cos_coeff *= k;
        t.sin_coeff *= k;
    }
    out
}

/// End state of a dissipative radial integration.
#[derive(Clone, Copy, Debug)]
pub struct RadialOutcome {
    pub state: PolarState,
    /// Time at which the radius first exceeded [`ESCAPE_RADIUS`], if it
    /// did; the state then holds the values at that moment.
    pub escaped: Option<f64>,
}

fn radial_rhs<'a>(
    orbit: &'a crate::driving::OrbitEval,
) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + 'a {
    let rho = orbit.rho;
    move |t, y| {
        let (a, b, c, d) = orbit.entries(t);
        let (s, co) = y[0].sin_cos();
        let f = -c * s * s + b * co * co + (a - d) * s * co;
        let g = a * s * s + d * co * co + (b + c) * s * co;
        [f, y[1] * (g - k_cut(rho, y[1]))]
    }
}

/// Integrate the dissipative system in polar form (lift, radius) up to
/// `t_end`, stopping early on escape. The radius is clamped at zero:
/// r = 0 is invariant for the exact flow, so a negative excursion is
/// pure integration overshoot.
pub fn integrate_radial_nonlinear(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    r0: f64,
    t_end: f64,
    ctl: StepControl,
) -> Result<RadialOutcome> {
    if r0 < 0.0 || !r0.is_finite() {
        return Err(Error::invalid(format!("initial radius must be finite and nonnegative, got {r0}")));
    }
    if r0 >= ESCAPE_RADIUS {
        return Ok(RadialOutcome {
            state: PolarState { theta: crate::driving::reduce_phase(theta0), log_r: r0.ln(), lift: theta0 },
            escaped: Some(0.0),
        });
    }
    let orbit = fam.along_orbit(p0);
    let rhs = radial_rhs(&orbit);
    let mut solver = Solver::new(rhs, 0.0, [theta0, r0], ctl);
    let mut escaped = None;
    solver.run_to_hooked(t_end, |t, y| {
        if y[1] < 0.0 {
            y[1] = 0.0;
        }
        if y[1] >= ESCAPE_RADIUS {
            escaped = Some(t);
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    Ok(RadialOutcome { state: PolarState::new(solver.y[0], solver.y[1].ln()), escaped })
}

/// Sampled dissipative polar trajectory: (t, lift, r) at each requested
/// time. No escape guard; meant for plotting bounded runs.
pub fn integrate_radial_sampled(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    r0: f64,
    times: &[f64],
    ctl: StepControl,
) -> Result<Vec<(f64, f64, f64)>> {
    let orbit = fam.along_orbit(p0);
    let mut out = Vec::with_capacity(times.len());
    crate::ode::integrate_sampled(
        radial_rhs(&orbit),
        0.0,
        [theta0, r0],
        times,
        ctl,
        |t, y| out.push((t, y[0], y[1].max(0.0))),
    )?;
    Ok(out)
}

/// Integrate the dissipative system in Cartesian coordinates.
pub fn integrate_full(
    fam: &SystemFamily,
    p0: &TorusPoint,
    y0: [f64; 2],
    t_end: f64,
    ctl: StepControl,
) -> Result<[f64; 2]> {
    let orbit = fam.along_orbit(p0);
    let rho = fam.rho;
    crate::ode::integrate_final(
        move |t, y: &[f64; 2]| {
            let m = orbit.matrix(t);
            let lin = m.mul_vec(*y);
            let k = k_cut(rho, y[0].hypot(y[1]));
            [lin[0] - k * y[0], lin[1] - k * y[1]]
        },
        0.0,
        y0,
        t_end,
        ctl,
    )
    .map_err(Into::into)
}

/// First time the radius enters the absorbing annulus guard band
/// r <= r_rho + [`ABSORB_MARGIN`], or None if it stays outside through
/// `t_max`. Starting inside reports 0.
pub fn absorption_time(
    fam: &SystemFamily,
    radius: &AbsorbingRadius,
    p0: &TorusPoint,
    theta0: f64,
    r0: f64,
    t_max: f64,
    ctl: StepControl,
) -> Result<Option<f64>> {
    let threshold = radius.r_rho + ABSORB_MARGIN;
    if r0 <= threshold {
        return Ok(Some(0.0));
    }
    let orbit = fam.along_orbit(p0);
    let rhs = radial_rhs(&orbit);
    let mut solver = Solver::new(rhs, 0.0, [theta0, r0], ctl);
    let mut hit = None;
    solver.run_to_hooked(t_max, |t, y| {
        if y[1] <= threshold {
            hit = Some(t);
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    Ok(hit)
}
