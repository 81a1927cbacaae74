//! Bundled example families.
//!
//! Four systems exercise every regime the crate diagnoses. All use
//! rho = 0.5 and are parametrized by the spectral shift eps, which for
//! the first three is exactly the spectrum: the shifted rotation
//! families all have g identically eps (the off-diagonal entries cancel
//! in the radial direction), so the attractor boundary is 0 for eps < 0,
//! the circle of radius rho for eps = 0, and rho + sqrt(eps) for eps > 0.

use crate::driving::{CoefficientMatrix, Frequencies, SystemFamily, TrigPoly, TrigTerm};

pub const RHO: f64 = 0.5;

/// Constant rotation: A = [[eps, 1], [-1, eps]]. Rotation number 1.
pub fn autonomous(epsilon: f64) -> SystemFamily {
    SystemFamily::new(
        CoefficientMatrix {
            a: TrigPoly::constant(0.0),
            b: TrigPoly::constant(1.0),
            c: TrigPoly::constant(-1.0),
            d: TrigPoly::constant(0.0),
        },
        epsilon,
        RHO,
        Frequencies::new(vec![1.0]).unwrap(),
    )
    .unwrap()
}

/// Quasiperiodic antisymmetric rotation over T^2 with frequencies
/// (1, sqrt 2): b = cos phi1 + sin phi2, c = -b. The angular speed has
/// zero mean, so the rotation number is 0.
pub fn quasiperiodic(epsilon: f64) -> SystemFamily {
    SystemFamily::new(
        CoefficientMatrix {
            a: TrigPoly::constant(0.0),
            b: oscillating_b(0.0),
            c: negate(&oscillating_b(0.0)),
            d: TrigPoly::constant(0.0),
        },
        epsilon,
        RHO,
        Frequencies::new(vec![1.0, std::f64::consts::SQRT_2]).unwrap(),
    )
    .unwrap()
}

/// Same as [`quasiperiodic`] but with mean angular speed 0.5:
/// b = 0.5 + cos phi1 + sin phi2, c = -b. Rotation number 0.5.
pub fn rotational(epsilon: f64) -> SystemFamily {
    SystemFamily::new(
        CoefficientMatrix {
            a: TrigPoly::constant(0.0),
            b: oscillating_b(0.5),
            c: negate(&oscillating_b(0.5)),
            d: TrigPoly::constant(0.0),
        },
        epsilon,
        RHO,
        Frequencies::new(vec![1.0, std::f64::consts::SQRT_2]).unwrap(),
    )
    .unwrap()
}

/// Diagonal family A = diag(3e/2, e/2) where the half trace
/// e(t) = amplitude * sum_{k=1..n} 2^{-k} cos(3^{-k} t)
/// is a truncated limit-periodic series: zero mean, but a primitive
/// whose partial-sum amplitude grows like (3/2)^k through the slow
/// harmonics. The fundamental matrix is diag(exp(3H/2), exp(H/2)) with
/// H the primitive of e, so radii rise and collapse with H and pair
/// distances on the attractor dip and recover: the chaotic regime.
pub fn chaotic(n_harmonics: usize, amplitude: f64, epsilon: f64) -> SystemFamily {
    assert!(n_harmonics >= 1, "need at least one harmonic");
    let freqs: Vec<f64> = (1..=n_harmonics).map(|k| 3.0f64.powi(-(k as i32))).collect();
    let term = |k: usize, scale: f64| {
        let mut idx = vec![0i32; n_harmonics];
        idx[k - 1] = 1;
        TrigTerm {
            k: idx,
            cos_coeff: scale * amplitude * 2.0f64.powi(-(k as i32)),
            sin_coeff: 0.0,
        }
    };
    let poly = |scale: f64| TrigPoly::new(0.0, (1..=n_harmonics).map(|k| term(k, scale)).collect());
    SystemFamily::new(
        CoefficientMatrix {
            a: poly(1.5),
            b: TrigPoly::constant(0.0),
            c: TrigPoly::constant(0.0),
            d: poly(0.5),
        },
        epsilon,
        RHO,
        Frequencies::new(freqs).unwrap(),
    )
    .unwrap()
}

/// Closed-form primitive of the chaotic family's half trace from the
/// all-zero base point: H(t) = amplitude * sum (3/2)^k sin(3^{-k} t).
/// Independent oracle for the oscillation diagnostics.
pub fn chaotic_primitive(n_harmonics: usize, amplitude: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        (1..=n_harmonics)
            .map(|k| {
                amplitude * 1.5f64.powi(k as i32) * (t * 3.0f64.powi(-(k as i32))).sin()
            })
            .sum()
    }
}

fn oscillating_b(mean: f64) -> TrigPoly {
    TrigPoly::new(
        mean,
        vec![
            TrigTerm { k: vec![1, 0], cos_coeff: 1.0, sin_coeff: 0.0 },
            TrigTerm { k: vec![0, 1], cos_coeff: 0.0, sin_coeff: 1.0 },
        ],
    )
}

fn negate(p: &TrigPoly) -> TrigPoly {
    TrigPoly::new(
        -p.constant,
        p.terms
            .iter()
            .map(|t| TrigTerm { k: t.k.clone(), cos_coeff: -t.cos_coeff, sin_coeff: -t.sin_coeff })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::TorusPoint;

    #[test]
    fn chaotic_half_trace_matches_series_at_origin_orbit() {
        let fam = chaotic(5, 2.0, 0.0);
        let orbit = fam.along_orbit(&TorusPoint::origin(5));
        for t in [0.0, 1.0, 17.3, 243.0] {
            let want: f64 =
                (1..=5).map(|k| 2.0 * 2.0f64.powi(-k) * (t * 3.0f64.powi(-k)).cos()).sum();
            assert!((orbit.e(t) - want).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn chaotic_primitive_differentiates_to_half_trace() {
        let h = chaotic_primitive(4, 1.0);
        let fam = chaotic(4, 1.0, 0.0);
        let orbit = fam.along_orbit(&TorusPoint::origin(4));
        let dt = 1e-6;
        for t in [0.4, 5.0, 100.0] {
            let deriv = (h(t + dt) - h(t - dt)) / (2.0 * dt);
            assert!((deriv - orbit.e(t)).abs() < 1e-7, "t = {t}");
        }
    }
}
