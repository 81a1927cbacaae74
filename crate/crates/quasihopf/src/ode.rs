//! Adaptive explicit Runge-Kutta integration.
//!
//! Single integrator for every flow in the crate: the Dormand-Prince
//! embedded 5(4) pair with proportional-integral step-size control.
//! Right-hand sides here are smooth trigonometric polynomials, so an
//! explicit non-stiff pair with tight tolerances is the right tool;
//! defaults are `atol = rtol = 1e-10`, overridable per call.
//!
//! The solver is resumable (`run_to` keeps the adapted step across
//! segments, which makes dense sampling cheap) and accepts a per-step
//! hook that may mutate the state after an accepted step. The hook is
//! how cocycle renormalization, running extrema, and escape guards are
//! implemented without specializing the loop.

/// Default absolute tolerance.
pub const DEFAULT_ATOL: f64 = 1e-10;
/// Default relative tolerance.
pub const DEFAULT_RTOL: f64 = 1e-10;

const SAFETY: f64 = 0.9;
/// PI controller integral gain (Hairer's dopri5 value).
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
/// Step growth/shrink limits per accepted step.
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Tolerances and step limits for one integration.
#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub atol: f64,
    pub rtol: f64,
    /// Upper bound on |h|. Keeps the driving phases resolved even when
    /// the error estimate would allow giant steps (e.g. a radius
    /// component that has decayed below `atol`).
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { atol: DEFAULT_ATOL, rtol: DEFAULT_RTOL, h_max: 1.0 }
    }
}

impl StepControl {
    pub fn with_tol(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol, ..Self::default() }
    }
}

/// Integration failure. Carries the last accepted state so callers can
/// report partial results.
#[derive(Debug, Clone, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (|h| = {h:.3e})")]
    StepUnderflow { t: f64, h: f64, last_state: Vec<f64> },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, last_state: Vec<f64> },
}

impl OdeError {
    pub fn time(&self) -> f64 {
        match self {
            OdeError::StepUnderflow { t, .. } | OdeError::NonFinite { t, .. } => *t,
        }
    }
}

/// Hook verdict after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Outcome of a hooked run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    /// Reached the target time.
    Completed,
    /// Hook returned [`Control::Stop`].
    Stopped,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Difference between 5th- and 4th-order weights (error estimator).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Resumable adaptive solver for y' = f(t, y), y in R^N.
pub struct Solver<F, const N: usize> {
    f: F,
    pub t: f64,
    pub y: [f64; N],
    ctl: StepControl,
    h: f64,
    err_prev: f64,
}

impl<F, const N: usize> Solver<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(f: F, t0: f64, y0: [f64; N], ctl: StepControl) -> Self {
        Self { f, t: t0, y: y0, ctl, h: 0.0, err_prev: 1e-4 }
    }

    /// Advance to exactly `t_target` (either direction).
    pub fn run_to(&mut self, t_target: f64) -> Result<(), OdeError> {
        self.run_to_hooked(t_target, |_, _: &mut [f64; N]| Control::Continue)
            .map(|_| ())
    }

    /// Advance to `t_target`, invoking `hook` after every accepted step.
    /// The hook may mutate the state (renormalization) or stop the run.
    pub fn run_to_hooked(
        &mut self,
        t_target: f64,
        mut hook: impl FnMut(f64, &mut [f64; N]) -> Control,
    ) -> Result<Halt, OdeError> {
        let dir = (t_target - self.t).signum();
        if dir == 0.0 || (t_target - self.t).abs() == 0.0 {
            return Ok(Halt::Completed);
        }
        if self.h == 0.0 || self.h.signum() != dir {
            self.h = dir * self.initial_step(t_target);
        }
        loop {
            let remaining = t_target - self.t;
            if remaining.abs() <= 1e-14 * self.t.abs().max(1.0) {
                self.t = t_target;
                return Ok(Halt::Completed);
            }
            let mut h = self.h.clamp(-self.ctl.h_max, self.ctl.h_max);
            let mut clipped = false;
            if h.abs() >= remaining.abs() {
                h = remaining;
                clipped = true;
            }
            let h_floor = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if h.abs() < h_floor {
                return Err(OdeError::StepUnderflow {
                    t: self.t,
                    h: h.abs(),
                    last_state: self.y.to_vec(),
                });
            }

            let (y_new, err) = self.try_step(h);
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                // Treat as a hard rejection; shrink and retry.
                self.h = h * FAC_MIN;
                if self.h.abs() < h_floor {
                    return Err(OdeError::NonFinite { t: self.t, last_state: self.y.to_vec() });
                }
                continue;
            }

            if err <= 1.0 {
                self.t = if clipped { t_target } else { self.t + h };
                self.y = y_new;
                let fac = (err.powf(EXPO1) / self.err_prev.powf(BETA) / SAFETY)
                    .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let h_next = h / fac;
                // When clipped to the boundary, do not let the short final
                // step shrink the adapted step for the next segment.
                self.h = if clipped { self.h.abs().max(h_next.abs()) * h.signum() } else { h_next };
                self.err_prev = err.max(1e-4);
                if hook(self.t, &mut self.y) == Control::Stop {
                    return Ok(Halt::Stopped);
                }
            } else {
                let fac = (err.powf(EXPO1) / SAFETY).min(1.0 / FAC_MIN);
                self.h = h / fac;
            }
        }
    }

    /// One embedded step from the current state; returns (y5, scaled error norm).
    fn try_step(&mut self, h: f64) -> ([f64; N], f64) {
        let (t, y) = (self.t, self.y);
        let k1 = (self.f)(t, &y);
        let k2 = (self.f)(t + C[1] * h, &axpy(&y, h, &[(A2[0], &k1)]));
        let k3 = (self.f)(t + C[2] * h, &axpy(&y, h, &[(A3[0], &k1), (A3[1], &k2)]));
        let k4 = (self.f)(
            t + C[3] * h,
            &axpy(&y, h, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]),
        );
        let k5 = (self.f)(
            t + C[4] * h,
            &axpy(&y, h, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]),
        );
        let k6 = (self.f)(
            t + C[5] * h,
            &axpy(
                &y,
                h,
                &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)],
            ),
        );
        let y5 = axpy(
            &y,
            h,
            &[(A7[0], &k1), (A7[2], &k3), (A7[3], &k4), (A7[4], &k5), (A7[5], &k6)],
        );
        let k7 = (self.f)(t + h, &y5);

        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, k) in ks.iter().enumerate() {
                e += E[j] * k[i];
            }
            e *= h;
            let sc = self.ctl.atol + self.ctl.rtol * y[i].abs().max(y5[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        (y5, (err_sq / N as f64).sqrt())
    }

    /// Standard starting-step heuristic (Hairer II.4) capped by h_max.
    fn initial_step(&mut self, t_target: f64) -> f64 {
        let span = (t_target - self.t).abs();
        let f0 = (self.f)(self.t, &self.y);
        let sc: Vec<f64> =
            (0..N).map(|i| self.ctl.atol + self.ctl.rtol * self.y[i].abs()).collect();
        let d0 = rms(&self.y, &sc);
        let d1 = rms(&f0, &sc);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * (d0 / d1) };
        let h0 = h0.min(span);
        let dir = (t_target - self.t).signum();
        let y1 = axpy(&self.y, dir * h0, &[(1.0, &f0)]);
        let f1 = (self.f)(self.t + dir * h0, &y1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = rms(&diff, &sc) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span).min(self.ctl.h_max)
    }
}

/// y + h * sum(c_j * k_j), the tableau combination.
#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

fn rms(v: &[f64], sc: &[f64]) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter().zip(sc).map(|(x, s)| (x / s) * (x / s)).sum::<f64>() / n).sqrt()
}

/// Integrate to `t_end` and return the final state.
pub fn integrate_final<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: StepControl,
) -> Result<[f64; N], OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut s = Solver::new(f, t0, y0, ctl);
    s.run_to(t_end)?;
    Ok(s.y)
}

/// Integrate through `times` (monotone in either direction), calling
/// `out` at each one. The adapted step persists across segments.
pub fn integrate_sampled<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    times: &[f64],
    ctl: StepControl,
    mut out: impl FnMut(f64, &[f64; N]),
) -> Result<(), OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut s = Solver::new(f, t0, y0, ctl);
    for &t in times {
        s.run_to(t)?;
        out(s.t, &s.y);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let y = integrate_final(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, StepControl::default())
            .unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_preserves_energy() {
        let ctl = StepControl::default();
        let y = integrate_final(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 200.0, ctl)
            .unwrap();
        let energy = y[0] * y[0] + y[1] * y[1];
        assert!((energy - 1.0).abs() < 1e-7, "energy {energy}");
        assert!((y[0] - 200.0f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn backward_integration_reverses_forward() {
        let ctl = StepControl::default();
        let fwd =
            integrate_final(|t: f64, y: &[f64; 1]| [t.sin() * y[0]], 0.0, [2.0], 7.0, ctl).unwrap();
        let back =
            integrate_final(|t: f64, y: &[f64; 1]| [t.sin() * y[0]], 7.0, fwd, 0.0, ctl).unwrap();
        assert!((back[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_hits_requested_times() {
        let times: Vec<f64> = (1..=10).map(|i| i as f64 * 0.7).collect();
        let mut got = Vec::new();
        integrate_sampled(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            &times,
            StepControl::default(),
            |t, y| got.push((t, y[0])),
        )
        .unwrap();
        for ((t, v), want_t) in got.iter().zip(&times) {
            assert_eq!(t, want_t);
            assert!((v - want_t.exp()).abs() < 1e-9 * want_t.exp());
        }
    }

    #[test]
    fn hook_can_stop_and_rescale() {
        let mut s = Solver::new(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], StepControl::default());
        let halt = s
            .run_to_hooked(100.0, |_, y| {
                if y[0] > 10.0 {
                    y[0] /= 10.0;
                    Control::Stop
                } else {
                    Control::Continue
                }
            })
            .unwrap();
        assert_eq!(halt, Halt::Stopped);
        assert!(s.t < 100.0 && s.y[0] <= 1.1);
    }

    #[test]
    fn finite_time_blowup_reports_underflow() {
        // y' = y^2 blows up at t = 1; the guard must fire, not hang.
        let res = integrate_final(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            StepControl { h_max: 10.0, ..StepControl::default() },
        );
        match res {
            Err(e) => assert!((e.time() - 1.0).abs() < 1e-3, "blowup time {}", e.time()),
            Ok(y) => panic!("expected failure, got {y:?}"),
        }
    }
}
