//! The linear cocycle y' = (A + eps I)(omega . t) y and its polar form.
//!
//! Writing y = r (sin theta, cos theta) splits the linear flow into an
//! angular equation theta' = f(omega . t, theta) that is independent of
//! the radius, and a radial equation (log r)' = g(omega . t, theta)
//! driven by the angle. With A = [[a, b], [c, d]]:
//!
//! ```text
//! f(omega, theta) = -c sin^2 + b cos^2 + (a - d) sin cos
//! g(omega, theta) =  a sin^2 + d cos^2 + (b + c) sin cos
//! ```
//!
//! Both are pi-periodic in theta, so the angle is integrated as an
//! unreduced lift (rotation numbers and crossing counts need it) and
//! reduced mod 2pi only for reporting. The radius is handled in log
//! scale throughout: in the interesting regimes it spans many orders of
//! magnitude in both time directions.
//!
//! The fundamental matrix is integrated with multiplicative
//! renormalization: whenever the largest column norm leaves [1/2, 2]
//! the matrix is rescaled and the log of the factor accumulated, so
//! U(t) = exp(log_scale) * matrix never overflows.

use crate::driving::{reduce_phase, OrbitEval, SystemFamily, TorusPoint};
use crate::mat::Mat2;
use crate::ode::{Control, Solver, StepControl};
use crate::Result;

/// Renormalization window for the cocycle matrix column norms.
const RENORM_HIGH: f64 = 2.0;
const RENORM_LOW: f64 = 0.5;

/// Polar state of the linear flow: reduced angle, log radius, and the
/// unreduced angular lift.
#[derive(Clone, Copy, Debug)]
pub struct PolarState {
    /// Angle reduced to [0, 2pi).
    pub theta: f64,
    /// Natural log of the radius (the radius itself never vanishes
    /// under the linear flow).
    pub log_r: f64,
    /// Unreduced angle accumulator; theta == lift mod 2pi.
    pub lift: f64,
}

impl PolarState {
    pub fn new(lift: f64, log_r: f64) -> Self {
        Self { theta: reduce_phase(lift), log_r, lift }
    }

    /// y = (r sin theta, r cos theta).
    pub fn from_cartesian(y: [f64; 2]) -> Self {
        let r = y[0].hypot(y[1]);
        Self::new(y[0].atan2(y[1]), r.ln())
    }

    pub fn to_cartesian(&self) -> [f64; 2] {
        let r = self.log_r.exp();
        [r * self.lift.sin(), r * self.lift.cos()]
    }

    pub fn radius(&self) -> f64 {
        self.log_r.exp()
    }
}

#[inline]
fn f_of(a: f64, b: f64, c: f64, d: f64, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    -c * s * s + b * co * co + (a - d) * s * co
}

#[inline]
fn g_of(a: f64, b: f64, c: f64, d: f64, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    a * s * s + d * co * co + (b + c) * s * co
}

#[inline]
fn df_of(a: f64, b: f64, c: f64, d: f64, theta: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    -(b + c) * s2 + (a - d) * c2
}

/// Angular velocity f(omega, theta) of the projective flow.
pub fn f_angular(fam: &SystemFamily, p: &TorusPoint, theta: f64) -> f64 {
    let m = fam.eval_matrix(p);
    f_of(m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1], theta)
}

/// Radial log-derivative g(omega, theta) of the linear flow.
pub fn g_radial(fam: &SystemFamily, p: &TorusPoint, theta: f64) -> f64 {
    let m = fam.eval_matrix(p);
    g_of(m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1], theta)
}

/// Analytic derivative of `f_angular` in theta:
/// -(b + c) sin 2theta + (a - d) cos 2theta.
/// Satisfies g - e = -(1/2) df/dtheta pointwise.
pub fn df_dtheta(fam: &SystemFamily, p: &TorusPoint, theta: f64) -> f64 {
    let m = fam.eval_matrix(p);
    df_of(m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1], theta)
}

/// Which radial log-derivative drives the polar integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialDrive {
    /// g of the full family.
    Full,
    /// -(1/2) df/dtheta: the traceless part's radial derivative, equal
    /// to g - e pointwise.
    Traceless,
}

fn polar_rhs(orbit: &OrbitEval, drive: RadialDrive) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |t, y| {
        let (a, b, c, d) = orbit.entries(t);
        let radial = match drive {
            RadialDrive::Full => g_of(a, b, c, d, y[0]),
            RadialDrive::Traceless => -0.5 * df_of(a, b, c, d, y[0]),
        };
        [f_of(a, b, c, d, y[0]), radial]
    }
}

/// Integrate the polar linear flow to `t_end` and return the final state.
pub fn polar_linear_final(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    log_r0: f64,
    t_end: f64,
    ctl: StepControl,
) -> Result<PolarState> {
    polar_drive_final(fam, p0, theta0, log_r0, t_end, ctl, RadialDrive::Full)
}

/// Same as [`polar_linear_final`] with a selectable radial drive.
pub fn polar_drive_final(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    log_r0: f64,
    t_end: f64,
    ctl: StepControl,
    drive: RadialDrive,
) -> Result<PolarState> {
    let orbit = fam.along_orbit(p0);
    let y = crate::ode::integrate_final(polar_rhs(&orbit, drive), 0.0, [theta0, log_r0], t_end, ctl)?;
    Ok(PolarState::new(y[0], y[1]))
}

/// Integrate the polar linear flow through `times` (monotone, either
/// direction), returning the state at each.
pub fn polar_linear_sampled(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    log_r0: f64,
    times: &[f64],
    ctl: StepControl,
) -> Result<Vec<(f64, PolarState)>> {
    let orbit = fam.along_orbit(p0);
    let mut out = Vec::with_capacity(times.len());
    crate::ode::integrate_sampled(
        polar_rhs(&orbit, RadialDrive::Full),
        0.0,
        [theta0, log_r0],
        times,
        ctl,
        |t, y| out.push((t, PolarState::new(y[0], y[1]))),
    )?;
    Ok(out)
}

/// Angular equation alone (1-D): final lift after time `t_end`.
pub fn angular_final(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    t_end: f64,
    ctl: StepControl,
) -> Result<f64> {
    let orbit = fam.along_orbit(p0);
    let y = crate::ode::integrate_final(
        |t, y: &[f64; 1]| {
            let (a, b, c, d) = orbit.entries(t);
            [f_of(a, b, c, d, y[0])]
        },
        0.0,
        [theta0],
        t_end,
        ctl,
    )?;
    Ok(y[0])
}

/// Polar run with running log-radius extrema and an optional stop bound.
#[derive(Clone, Copy, Debug)]
pub struct PolarWatch {
    pub state: PolarState,
    pub sup_log_r: f64,
    pub t_sup: f64,
    pub inf_log_r: f64,
    pub t_inf: f64,
    /// Time at which log_r first exceeded the stop bound, if it did.
    pub stopped_at: Option<f64>,
}

/// Integrate toward `t_end` tracking extrema of log r at accepted steps;
/// stops early if `stop_above` is given and log r exceeds it.
pub fn polar_linear_watch(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta0: f64,
    log_r0: f64,
    t_end: f64,
    ctl: StepControl,
    stop_above: Option<f64>,
) -> Result<PolarWatch> {
    let orbit = fam.along_orbit(p0);
    let rhs = polar_rhs(&orbit, RadialDrive::Full);
    let mut solver = Solver::new(rhs, 0.0, [theta0, log_r0], ctl);
    let mut watch = PolarWatch {
        state: PolarState::new(theta0, log_r0),
        sup_log_r: log_r0,
        t_sup: 0.0,
        inf_log_r: log_r0,
        t_inf: 0.0,
        stopped_at: None,
    };
    let mut stopped = None;
    solver.run_to_hooked(t_end, |t, y| {
        if y[1] > watch.sup_log_r {
            watch.sup_log_r = y[1];
            watch.t_sup = t;
        }
        if y[1] < watch.inf_log_r {
            watch.inf_log_r = y[1];
            watch.t_inf = t;
        }
        match stop_above {
            Some(bound) if y[1] > bound => {
                stopped = Some(t);
                Control::Stop
            }
            _ => Control::Continue,
        }
    })?;
    watch.state = PolarState::new(solver.y[0], solver.y[1]);
    watch.stopped_at = stopped;
    Ok(watch)
}

/// Renormalized fundamental matrix: U(t) = exp(log_scale) * matrix.
#[derive(Clone, Copy, Debug)]
pub struct CocycleState {
    /// Matrix with largest column norm kept in [1/2, 2].
    pub matrix: Mat2,
    /// Accumulated log of the renormalization factors.
    pub log_scale: f64,
}

impl CocycleState {
    pub const IDENTITY: CocycleState = CocycleState { matrix: Mat2::IDENTITY, log_scale: 0.0 };

    /// log det U = 2 log_scale + log det matrix. The determinant of the
    /// fundamental matrix stays positive, so the log is well defined.
    pub fn log_det(&self) -> f64 {
        2.0 * self.log_scale + self.matrix.det().ln()
    }

    /// log of the spectral norm of U.
    pub fn log_op_norm(&self) -> f64 {
        self.log_scale + self.matrix.op_norm().ln()
    }

    /// log |U v| for a unit-scale vector v.
    pub fn apply_log_norm(&self, v: [f64; 2]) -> f64 {
        let w = self.matrix.mul_vec(v);
        self.log_scale + w[0].hypot(w[1]).ln()
    }

    /// U itself; may overflow for long expansive horizons, prefer the
    /// log accessors there.
    pub fn full_matrix(&self) -> Mat2 {
        self.matrix.scale(self.log_scale.exp())
    }
}

fn cocycle_rhs(orbit: &OrbitEval) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    // State is column-major: [u11, u21, u12, u22].
    move |t, u| {
        let (a, b, c, d) = orbit.entries(t);
        [
            a * u[0] + b * u[1],
            c * u[0] + d * u[1],
            a * u[2] + b * u[3],
            c * u[2] + d * u[3],
        ]
    }
}

/// Integrate the matrix equation U' = (A + eps I)(omega . t) U from the
/// identity to `t_end`, renormalizing as columns grow or shrink.
pub fn propagate_cocycle(
    fam: &SystemFamily,
    p0: &TorusPoint,
    t_end: f64,
    ctl: StepControl,
) -> Result<CocycleState> {
    Ok(propagate_cocycle_sampled(fam, p0, &[t_end], ctl)?.pop().expect("one sample").1)
}

/// Sampled version of [`propagate_cocycle`]; times must be monotone.
pub fn propagate_cocycle_sampled(
    fam: &SystemFamily,
    p0: &TorusPoint,
    times: &[f64],
    ctl: StepControl,
) -> Result<Vec<(f64, CocycleState)>> {
    let orbit = fam.along_orbit(p0);
    let rhs = cocycle_rhs(&orbit);
    let mut solver = Solver::new(rhs, 0.0, [1.0, 0.0, 0.0, 1.0], ctl);
    let mut log_scale = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        solver.run_to_hooked(t, |_, u| {
            let norm = Mat2::new(u[0], u[2], u[1], u[3]).max_col_norm();
            if norm > RENORM_HIGH || (norm < RENORM_LOW && norm > 0.0) {
                for v in u.iter_mut() {
                    *v /= norm;
                }
                log_scale += norm.ln();
            }
            Control::Continue
        })?;
        let u = solver.y;
        out.push((t, CocycleState { matrix: Mat2::new(u[0], u[2], u[1], u[3]), log_scale }));
    }
    Ok(out)
}

/// Map a polar trajectory back to the plane: y = e^(log r) (sin, cos).
pub fn reconstruct_cartesian(traj: &[(f64, PolarState)]) -> Vec<(f64, [f64; 2])> {
    traj.iter().map(|(t, s)| (*t, s.to_cartesian())).collect()
}
