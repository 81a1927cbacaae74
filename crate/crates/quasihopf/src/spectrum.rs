//! Spectral diagnostics of the linear flow: Lyapunov exponents, the
//! dichotomy spectrum, rotation number, and the sign classification
//! that organizes the bifurcation picture.
//!
//! Everything here works on one base orbit and finite horizons, so all
//! outputs are estimates with explicit error proxies. The top exponent
//! comes from the polar radial equation log-averaged over the horizon;
//! the bottom one from the trace identity: the two exponents sum to the
//! time average of tr(A + eps I). Dichotomy probes test the shifted
//! family A + (eps - lambda) I for uniform forward or backward decay of
//! the fundamental matrix; shifting commutes with the flow, so a scan
//! reuses one matrix propagation per time direction.

use crate::cocycle::{polar_linear_sampled, polar_linear_watch, propagate_cocycle};
use crate::driving::{SystemFamily, TorusPoint};
use crate::ode::StepControl;
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Decay margin (per unit time) a dichotomy probe must clear.
pub const DICHOTOMY_MARGIN: f64 = 0.02;
/// Default spacing of the probe grid in lambda.
pub const DICHOTOMY_STEP: f64 = 0.05;
/// Default probe horizon.
pub const DICHOTOMY_HORIZON: f64 = 2000.0;

/// Finite-horizon Lyapunov exponent estimate.
#[derive(Clone, Debug)]
pub struct LyapunovEstimate {
    /// Full-horizon average (log r(T) - log r(0)) / T.
    pub value: f64,
    /// Standard deviation of the per-window averages.
    pub error_bar: f64,
    /// Per-window exponent averages.
    pub windows: Vec<f64>,
    /// Starting angle that produced the larger estimate.
    pub theta0: f64,
}

/// Largest Lyapunov exponent of the linear flow over one base orbit.
///
/// Two starting angles a quarter turn apart are integrated and the
/// larger full-horizon average wins; a single angle could sit on the
/// contracting invariant direction and report the bottom exponent.
pub fn lyapunov_max(
    fam: &SystemFamily,
    p0: &TorusPoint,
    horizon: f64,
    n_windows: usize,
    ctl: StepControl,
) -> Result<LyapunovEstimate> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if n_windows == 0 {
        return Err(Error::invalid("need at least one window"));
    }
    let times: Vec<f64> =
        (1..=n_windows).map(|i| horizon * i as f64 / n_windows as f64).collect();
    let mut best: Option<LyapunovEstimate> = None;
    for theta0 in [0.3, 0.3 + FRAC_PI_2] {
        let traj = polar_linear_sampled(fam, p0, theta0, 0.0, &times, ctl)?;
        let mut windows = Vec::with_capacity(n_windows);
        let (mut t_prev, mut lr_prev) = (0.0, 0.0);
        for (t, s) in &traj {
            windows.push((s.log_r - lr_prev) / (t - t_prev));
            t_prev = *t;
            lr_prev = s.log_r;
        }
        let value = traj.last().expect("nonempty schedule").1.log_r / horizon;
        let est = LyapunovEstimate { value, error_bar: stddev(&windows), windows, theta0 };
        if best.as_ref().map_or(true, |b| est.value > b.value) {
            best = Some(est);
        }
    }
    Ok(best.expect("two candidates"))
}

fn stddev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

/// Smallest Lyapunov exponent via the trace identity: the exponents sum
/// to the orbit average of tr(A + eps I), so the bottom one is that
/// average minus `lambda_max`. Can come out above `lambda_max` when
/// both carry finite-horizon error; callers wanting an ordered pair
/// should use [`lyapunov_pair`].
pub fn lyapunov_min(
    fam: &SystemFamily,
    p0: &TorusPoint,
    horizon: f64,
    lambda_max: f64,
    ctl: StepControl,
) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    let orbit = fam.along_orbit(p0);
    let total =
        crate::ode::integrate_final(|t, _y: &[f64; 1]| [2.0 * orbit.e(t)], 0.0, [0.0], horizon, ctl)?;
    Ok(total[0] / horizon - lambda_max)
}

/// Both exponents, ordered.
pub fn lyapunov_pair(
    fam: &SystemFamily,
    p0: &TorusPoint,
    horizon: f64,
    n_windows: usize,
    ctl: StepControl,
) -> Result<(LyapunovEstimate, f64)> {
    let mut top = lyapunov_max(fam, p0, horizon, n_windows, ctl)?;
    let mut bottom = lyapunov_min(fam, p0, horizon, top.value, ctl)?;
    if bottom > top.value {
        // Finite-horizon noise inverted the order; swap the values and
        // keep the window diagnostics with the top estimate.
        std::mem::swap(&mut top.value, &mut bottom);
    }
    Ok((top, bottom))
}

/// Outcome of one exponential-dichotomy probe at a trial shift lambda.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DichotomyVerdict {
    /// The lambda-shifted flow decays forward: lambda above the spectrum.
    Attracting,
    /// Decays backward: lambda below the spectrum.
    Repelling,
    /// Neither decay observed: lambda in (or near) the spectrum.
    Ambiguous,
}

/// Probe the shifted family A + (eps - lambda) I for uniform decay over
/// the given horizon in either time direction.
pub fn dichotomy_probe(
    fam: &SystemFamily,
    p0: &TorusPoint,
    lambda: f64,
    horizon: f64,
    margin: f64,
    ctl: StepControl,
) -> Result<DichotomyVerdict> {
    if !(horizon > 0.0 && margin > 0.0) {
        return Err(Error::invalid("horizon and margin must be positive"));
    }
    let shifted = fam.with_epsilon(fam.epsilon - lambda);
    let forward = propagate_cocycle(&shifted, p0, horizon, ctl)?.log_op_norm();
    if forward <= -margin * horizon {
        return Ok(DichotomyVerdict::Attracting);
    }
    let backward = propagate_cocycle(&shifted, p0, -horizon, ctl)?.log_op_norm();
    if backward <= -margin * horizon {
        return Ok(DichotomyVerdict::Repelling);
    }
    Ok(DichotomyVerdict::Ambiguous)
}

/// Dichotomy probes over a lambda grid, plus the hull of the ambiguous
/// probes as the spectrum estimate.
#[derive(Clone, Debug)]
pub struct SpectrumScan {
    pub probes: Vec<(f64, DichotomyVerdict)>,
    /// Hull [lo, hi] of the ambiguous probes; None if every probe was
    /// decisive (spectrum outside the scanned range).
    pub interval: Option<(f64, f64)>,
    pub horizon: f64,
    pub margin: f64,
}

/// Scan [lo, hi] with the given step. The shift identity
/// U_lambda(t) = exp(-lambda t) U(t) lets one propagation per time
/// direction serve every grid point.
pub fn scan_spectrum(
    fam: &SystemFamily,
    p0: &TorusPoint,
    lo: f64,
    hi: f64,
    step: f64,
    horizon: f64,
    margin: f64,
    ctl: StepControl,
) -> Result<SpectrumScan> {
    if !(step > 0.0 && hi >= lo) {
        return Err(Error::invalid("need hi >= lo and a positive step"));
    }
    if !(horizon > 0.0 && margin > 0.0) {
        return Err(Error::invalid("horizon and margin must be positive"));
    }
    let forward = propagate_cocycle(fam, p0, horizon, ctl)?.log_op_norm();
    let backward = propagate_cocycle(fam, p0, -horizon, ctl)?.log_op_norm();
    let n = ((hi - lo) / step).round() as usize;
    let mut probes = Vec::with_capacity(n + 1);
    let mut hull: Option<(f64, f64)> = None;
    for i in 0..=n {
        let lambda = lo + step * i as f64;
        let verdict = if forward - lambda * horizon <= -margin * horizon {
            DichotomyVerdict::Attracting
        } else if backward + lambda * horizon <= -margin * horizon {
            DichotomyVerdict::Repelling
        } else {
            DichotomyVerdict::Ambiguous
        };
        if verdict == DichotomyVerdict::Ambiguous {
            hull = Some(match hull {
                None => (lambda, lambda),
                Some((a, b)) => (a.min(lambda), b.max(lambda)),
            });
        }
        probes.push((lambda, verdict));
    }
    Ok(SpectrumScan { probes, interval: hull, horizon, margin })
}

/// Rotation number of the angular flow: average angular speed of the
/// lift. The error proxy compares the full-horizon average with the
/// half-horizon one from the same run.
#[derive(Clone, Copy, Debug)]
pub struct RotationEstimate {
    pub value: f64,
    pub error: f64,
}

pub fn rotation_number(
    fam: &SystemFamily,
    p0: &TorusPoint,
    horizon: f64,
    ctl: StepControl,
) -> Result<RotationEstimate> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    let theta0 = 0.3;
    let traj = polar_linear_sampled(fam, p0, theta0, 0.0, &[0.5 * horizon, horizon], ctl)?;
    let half = (traj[0].1.lift - theta0) / (0.5 * horizon);
    let full = (traj[1].1.lift - theta0) / horizon;
    Ok(RotationEstimate { value: full, error: (full - half).abs() })
}

/// Sign of the top exponent, refined by a boundedness probe in the
/// zero case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralCase {
    /// Top exponent clearly negative: the origin attracts.
    Negative,
    /// Top exponent within tolerance of zero and the linear flow stayed
    /// in a bounded log-radius band both ways for every sampled angle.
    Zero,
    /// Top exponent clearly positive.
    Positive,
    /// Top exponent near zero but some sampled solution left the band;
    /// the bounded zero case is not established.
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct ClassifyParams {
    pub horizon: f64,
    /// Half-width of the zero band for the top exponent.
    pub zero_tol: f64,
    /// Boundedness band: |log r| must stay at or below this.
    pub log_bound: f64,
    /// Angles sampled in [0, pi) for the boundedness probe.
    pub n_angles: usize,
    pub n_windows: usize,
    pub ctl: StepControl,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            horizon: 5000.0,
            zero_tol: 0.02,
            log_bound: 1e6f64.ln(),
            n_angles: 8,
            n_windows: 10,
            ctl: StepControl::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub verdict: SpectralCase,
    pub lambda_max: LyapunovEstimate,
    pub lambda_min: f64,
    /// How many sampled angles stayed bounded (only probed in the zero
    /// band; None otherwise).
    pub bounded_angles: Option<(usize, usize)>,
}

/// Classify the spectral case of the family over one base orbit.
pub fn classify_case(
    fam: &SystemFamily,
    p0: &TorusPoint,
    params: &ClassifyParams,
) -> Result<CaseReport> {
    let (lambda_max, lambda_min) =
        lyapunov_pair(fam, p0, params.horizon, params.n_windows, params.ctl)?;
    if lambda_max.value > params.zero_tol {
        return Ok(CaseReport {
            verdict: SpectralCase::Positive,
            lambda_max,
            lambda_min,
            bounded_angles: None,
        });
    }
    if lambda_max.value < -params.zero_tol {
        return Ok(CaseReport {
            verdict: SpectralCase::Negative,
            lambda_max,
            lambda_min,
            bounded_angles: None,
        });
    }
    let mut bounded = 0;
    for j in 0..params.n_angles {
        let theta = PI * j as f64 / params.n_angles as f64;
        if angle_stays_banded(fam, p0, theta, params)? {
            bounded += 1;
        }
    }
    let verdict = if bounded == params.n_angles {
        SpectralCase::Zero
    } else {
        SpectralCase::Unresolved
    };
    Ok(CaseReport {
        verdict,
        lambda_max,
        lambda_min,
        bounded_angles: Some((bounded, params.n_angles)),
    })
}

fn angle_stays_banded(
    fam: &SystemFamily,
    p0: &TorusPoint,
    theta: f64,
    params: &ClassifyParams,
) -> Result<bool> {
    for dir in [params.horizon, -params.horizon] {
        let w = polar_linear_watch(fam, p0, theta, 0.0, dir, params.ctl, Some(params.log_bound))?;
        if w.stopped_at.is_some() || w.inf_log_r < -params.log_bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::{CoefficientMatrix, Frequencies, TrigPoly};
    use crate::presets;

    fn ctl() -> StepControl {
        StepControl::default()
    }

    fn saddle() -> SystemFamily {
        // Constant A = diag(2, -1): exponents exactly {2, -1}.
        SystemFamily::new(
            CoefficientMatrix {
                a: TrigPoly::constant(2.0),
                b: TrigPoly::constant(0.0),
                c: TrigPoly::constant(0.0),
                d: TrigPoly::constant(-1.0),
            },
            0.0,
            1.0,
            Frequencies::new(vec![1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rigid_rotation_exponents_are_the_shift() {
        let fam = presets::autonomous(0.35);
        let p = TorusPoint::origin(1);
        let top = lyapunov_max(&fam, &p, 200.0, 10, ctl()).unwrap();
        assert!((top.value - 0.35).abs() < 1e-9);
        assert!(top.error_bar < 1e-9);
        let bottom = lyapunov_min(&fam, &p, 200.0, top.value, ctl()).unwrap();
        assert!((bottom - 0.35).abs() < 1e-8);
    }

    #[test]
    fn saddle_exponents_recovered() {
        let fam = saddle();
        let p = TorusPoint::origin(1);
        let (top, bottom) = lyapunov_pair(&fam, &p, 500.0, 10, ctl()).unwrap();
        assert!((top.value - 2.0).abs() < 0.01, "top = {}", top.value);
        assert!((bottom + 1.0).abs() < 0.01, "bottom = {bottom}");
        // Late windows sit on the exponent exactly.
        assert!((top.windows.last().unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn dichotomy_probe_three_ways() {
        let fam = saddle();
        let p = TorusPoint::origin(1);
        let probe = |l: f64| dichotomy_probe(&fam, &p, l, 50.0, 0.02, ctl()).unwrap();
        assert_eq!(probe(3.0), DichotomyVerdict::Attracting);
        assert_eq!(probe(-2.0), DichotomyVerdict::Repelling);
        assert_eq!(probe(0.5), DichotomyVerdict::Ambiguous);
    }

    #[test]
    fn scan_hull_brackets_the_saddle_spectrum() {
        let fam = saddle();
        let p = TorusPoint::origin(1);
        let scan = scan_spectrum(&fam, &p, -2.0, 3.0, 0.05, 200.0, 0.02, ctl()).unwrap();
        let (lo, hi) = scan.interval.expect("spectrum in range");
        assert!((lo + 1.0).abs() < 0.051, "lo = {lo}");
        assert!((hi - 2.0).abs() < 0.051, "hi = {hi}");
        // Decisive on both flanks.
        assert_eq!(scan.probes.first().unwrap().1, DichotomyVerdict::Repelling);
        assert_eq!(scan.probes.last().unwrap().1, DichotomyVerdict::Attracting);
    }

    #[test]
    fn scan_agrees_with_direct_probes() {
        let fam = presets::quasiperiodic(0.2);
        let p = TorusPoint::new(vec![1.0, 2.0]).unwrap();
        let scan = scan_spectrum(&fam, &p, -0.3, 0.7, 0.25, 100.0, 0.02, ctl()).unwrap();
        for &(lambda, verdict) in &scan.probes {
            let direct = dichotomy_probe(&fam, &p, lambda, 100.0, 0.02, ctl()).unwrap();
            assert_eq!(direct, verdict, "lambda = {lambda}");
        }
    }

    #[test]
    fn rotation_numbers_of_the_presets() {
        let p1 = TorusPoint::origin(1);
        let p2 = TorusPoint::origin(2);
        let rot = rotation_number(&presets::autonomous(0.2), &p1, 500.0, ctl()).unwrap();
        assert!((rot.value - 1.0).abs() < 1e-9);
        let rot = rotation_number(&presets::quasiperiodic(0.0), &p2, 500.0, ctl()).unwrap();
        assert!(rot.value.abs() < 0.02, "value = {}", rot.value);
        let rot = rotation_number(&presets::rotational(0.0), &p2, 500.0, ctl()).unwrap();
        assert!((rot.value - 0.5).abs() < 0.02, "value = {}", rot.value);
        assert!(rot.error < 0.05);
    }

    #[test]
    fn classify_signs_and_bounded_zero() {
        let p1 = TorusPoint::origin(1);
        let p2 = TorusPoint::origin(2);
        let params = ClassifyParams { horizon: 500.0, ..ClassifyParams::default() };
        let neg = classify_case(&presets::autonomous(-0.15), &p1, &params).unwrap();
        assert_eq!(neg.verdict, SpectralCase::Negative);
        let pos = classify_case(&presets::quasiperiodic(0.3), &p2, &params).unwrap();
        assert_eq!(pos.verdict, SpectralCase::Positive);
        // Rigid rotations at eps = 0 keep log r identically zero.
        let zero = classify_case(&presets::rotational(0.0), &p2, &params).unwrap();
        assert_eq!(zero.verdict, SpectralCase::Zero);
        assert_eq!(zero.bounded_angles, Some((8, 8)));
    }

    #[test]
    fn classify_flags_wandering_zero_case() {
        // Diagonal family with large trace oscillation: top exponent
        // tends to zero yet log r leaves any moderate band, so the
        // bounded zero case must not be claimed.
        let fam = presets::chaotic(5, 2.0, 0.0);
        let p = TorusPoint::origin(5);
        let params = ClassifyParams {
            horizon: 3000.0,
            log_bound: 10.0,
            n_angles: 4,
            ..ClassifyParams::default()
        };
        let report = classify_case(&fam, &p, &params).unwrap();
        assert_eq!(report.verdict, SpectralCase::Unresolved);
        let (bounded, total) = report.bounded_angles.unwrap();
        assert!(bounded < total);
    }
}
