//! The driving flow and the coefficient family evaluated along it.
//!
//! The base space is a d-torus carrying a Kronecker flow: phases advance
//! linearly at fixed angular frequencies. Coefficients of the planar
//! system are finite trigonometric polynomials on the torus, so the
//! matrix family is evaluated by advancing the base point and summing
//! harmonics. Minimality and unique ergodicity of the base flow are a
//! user obligation (rationally independent frequencies); the tool
//! reports ratio diagnostics but never rejects a configuration.

use crate::mat::Mat2;
use crate::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

/// Angular frequencies of the torus flow, radians per unit time.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequencies {
    values: Vec<f64>,
}

/// How close a frequency ratio is to a small rational.
#[derive(Clone, Debug)]
pub struct RatioDiagnostic {
    pub i: usize,
    pub j: usize,
    pub ratio: f64,
    /// Best rational approximation p/q with q bounded by 1000.
    pub p: i64,
    pub q: i64,
    pub error: f64,
}

impl Frequencies {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("frequencies must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("frequencies must be finite"));
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pairwise ratio diagnostics. A tiny `error` with a small
    /// denominator flags (near-)rational dependence, which breaks the
    /// minimality assumption the asymptotic theory needs.
    pub fn ratio_diagnostics(&self) -> Vec<RatioDiagnostic> {
        let mut out = Vec::new();
        for i in 0..self.values.len() {
            for j in (i + 1)..self.values.len() {
                if self.values[j] == 0.0 {
                    continue;
                }
                let ratio = self.values[i] / self.values[j];
                let (p, q, error) = best_rational(ratio, 1000);
                out.push(RatioDiagnostic { i, j, ratio, p, q, error });
            }
        }
        out
    }
}

/// Best rational approximation p/q to `x` with q <= q_max, by
/// continued-fraction convergents.
fn best_rational(x: f64, q_max: i64) -> (i64, i64, f64) {
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, v.floor() as i64, 1i64);
    v -= v.floor();
    while v > 1e-12 {
        let inv = 1.0 / v;
        // Snap to the nearest integer when rounding noise would derail
        // the expansion (e.g. 1/0.500000000000002 = 1.999999...).
        let a_f = if (inv - inv.round()).abs() < 1e-9 { inv.round() } else { inv.floor() };
        let a = a_f as i64;
        let (p2, q2) =
            (a.saturating_mul(p1).saturating_add(p0), a.saturating_mul(q1).saturating_add(q0));
        if q2 > q_max {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        v = (inv - a_f).max(0.0);
    }
    let approx = p1 as f64 / q1 as f64;
    (if x < 0.0 { -p1 } else { p1 }, q1, (x.abs() - approx).abs())
}

/// A point on the d-torus; phases stored reduced to [0, 2pi).
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    phases: Vec<f64>,
}

impl TorusPoint {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("phases must be finite"));
        }
        Ok(Self { phases: phases.into_iter().map(reduce_phase).collect() })
    }

    pub fn origin(dim: usize) -> Self {
        Self { phases: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Flow the point for time `t`: phases[i] + freqs[i] * t, mod 2pi.
    /// Phases are re-reduced on every call so long pullback horizons do
    /// not accumulate magnitude.
    pub fn advance(&self, freqs: &Frequencies, t: f64) -> TorusPoint {
        debug_assert_eq!(self.dim(), freqs.dim());
        TorusPoint {
            phases: self
                .phases
                .iter()
                .zip(freqs.values())
                .map(|(p, w)| reduce_phase(p + w * t))
                .collect(),
        }
    }
}

pub fn reduce_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid may return TAU when x is a tiny negative number.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// One harmonic of a trigonometric polynomial on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm {
    /// Integer multi-index; the term oscillates as k . phases.
    pub k: Vec<i32>,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

/// Finite trigonometric polynomial Omega -> R. The `constant` field is
/// the mean value over the torus (every nonconstant harmonic averages
/// to zero), which the trace diagnostics rely on.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub constant: f64,
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: Vec::new() }
    }

    pub fn new(constant: f64, terms: Vec<TrigTerm>) -> Self {
        Self { constant, terms }
    }

    pub fn eval(&self, p: &TorusPoint) -> f64 {
        let mut acc = self.constant;
        for term in &self.terms {
            let angle: f64 = term
                .k
                .iter()
                .zip(p.phases())
                .map(|(k, phi)| *k as f64 * phi)
                .sum();
            acc += term.cos_coeff * angle.cos() + term.sin_coeff * angle.sin();
        }
        acc
    }

    /// Mean over the torus.
    pub fn mean(&self) -> f64 {
        self.constant
    }

    /// Upper bound for the supremum: constant + sum of term amplitudes.
    pub fn sup_bound(&self) -> f64 {
        self.constant + self.amplitude_sum()
    }

    /// Upper bound for sup |.|.
    pub fn abs_bound(&self) -> f64 {
        self.constant.abs() + self.amplitude_sum()
    }

    fn amplitude_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.cos_coeff.hypot(t.sin_coeff)).sum()
    }

    /// Pointwise sum, merging harmonics with equal multi-index.
    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut terms: Vec<TrigTerm> = self.terms.clone();
        for t in &other.terms {
            if let Some(existing) = terms.iter_mut().find(|e| e.k == t.k) {
                existing.cos_coeff += t.cos_coeff;
                existing.sin_coeff += t.sin_coeff;
            } else {
                terms.push(t.clone());
            }
        }
        terms.retain(|t| t.cos_coeff != 0.0 || t.sin_coeff != 0.0);
        TrigPoly { constant: self.constant + other.constant, terms }
    }

    fn check_dim(&self, dim: usize, what: &str) -> Result<()> {
        for t in &self.terms {
            if t.k.len() != dim {
                return Err(Error::invalid(format!(
                    "coefficient {what}: term index has length {} but the torus has dimension {dim}",
                    t.k.len()
                )));
            }
        }
        Ok(())
    }
}

/// The four coefficient functions of the planar linear part,
/// [[a, b], [c, d]], each a trigonometric polynomial on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMatrix {
    pub a: TrigPoly,
    pub b: TrigPoly,
    pub c: TrigPoly,
    pub d: TrigPoly,
}

impl CoefficientMatrix {
    pub fn eval(&self, p: &TorusPoint) -> Mat2 {
        Mat2::new(self.a.eval(p), self.b.eval(p), self.c.eval(p), self.d.eval(p))
    }
}

/// The full system family: linear part A + eps I and the dissipation
/// knee radius rho of the cutoff nonlinearity.
#[derive(Clone, Debug)]
pub struct SystemFamily {
    pub matrix: CoefficientMatrix,
    pub epsilon: f64,
    /// Radius where the dissipative term switches on; in (0, 1].
    pub rho: f64,
    pub freqs: Frequencies,
}

impl SystemFamily {
    pub fn new(
        matrix: CoefficientMatrix,
        epsilon: f64,
        rho: f64,
        freqs: Frequencies,
    ) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::invalid(format!("rho must be in (0, 1], got {rho}")));
        }
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon must be finite"));
        }
        let dim = freqs.dim();
        matrix.a.check_dim(dim, "a")?;
        matrix.b.check_dim(dim, "b")?;
        matrix.c.check_dim(dim, "c")?;
        matrix.d.check_dim(dim, "d")?;
        Ok(Self { matrix, epsilon, rho, freqs })
    }

    pub fn dim(&self) -> usize {
        self.freqs.dim()
    }

    /// Same family with a different spectral shift.
    pub fn with_epsilon(&self, epsilon: f64) -> SystemFamily {
        SystemFamily { epsilon, ..self.clone() }
    }

    /// A + eps I at the given base point.
    pub fn eval_matrix(&self, p: &TorusPoint) -> Mat2 {
        let m = self.matrix.eval(p);
        m.add(&Mat2::diag(self.epsilon, self.epsilon))
    }

    /// Half trace of A + eps I.
    pub fn eval_e(&self, p: &TorusPoint) -> f64 {
        0.5 * (self.matrix.a.eval(p) + self.matrix.d.eval(p)) + self.epsilon
    }

    /// Traceless part: (A + eps I) - e I.
    pub fn eval_tilde(&self, p: &TorusPoint) -> Mat2 {
        let m = self.eval_matrix(p);
        let e = 0.5 * m.trace();
        m.add(&Mat2::diag(-e, -e))
    }

    /// Compile coefficient evaluation along the orbit of `p0`: each
    /// harmonic becomes a single scalar oscillation in t. This is the
    /// allocation-free form every integrator right-hand side uses.
    pub fn along_orbit(&self, p0: &TorusPoint) -> OrbitEval {
        debug_assert_eq!(p0.dim(), self.dim());
        let compile = |poly: &TrigPoly| CompiledPoly {
            constant: poly.constant,
            terms: poly
                .terms
                .iter()
                .map(|t| {
                    let phase0: f64 = t
                        .k
                        .iter()
                        .zip(p0.phases())
                        .map(|(k, phi)| *k as f64 * phi)
                        .sum();
                    let rate: f64 = t
                        .k
                        .iter()
                        .zip(self.freqs.values())
                        .map(|(k, w)| *k as f64 * w)
                        .sum();
                    (reduce_phase(phase0), rate, t.cos_coeff, t.sin_coeff)
                })
                .collect(),
        };
        OrbitEval {
            a: compile(&self.matrix.a),
            b: compile(&self.matrix.b),
            c: compile(&self.matrix.c),
            d: compile(&self.matrix.d),
            epsilon: self.epsilon,
            rho: self.rho,
        }
    }
}

/// Trig polynomial restricted to one orbit: a function of time only.
#[derive(Clone, Debug)]
struct CompiledPoly {
    constant: f64,
    /// (initial phase, angular rate, cos coeff, sin coeff) per harmonic.
    terms: Vec<(f64, f64, f64, f64)>,
}

impl CompiledPoly {
    #[inline]
    fn eval(&self, t: f64) -> f64 {
        let mut acc = self.constant;
        for &(phase0, rate, cc, sc) in &self.terms {
            let (s, c) = (phase0 + rate * t).sin_cos();
            acc += cc * c + sc * s;
        }
        acc
    }
}

/// Coefficients of the family along one base orbit, as functions of t.
/// The spectral shift eps is folded into the diagonal.
#[derive(Clone, Debug)]
pub struct OrbitEval {
    a: CompiledPoly,
    b: CompiledPoly,
    c: CompiledPoly,
    d: CompiledPoly,
    pub epsilon: f64,
    pub rho: f64,
}

impl OrbitEval {
    /// Entries (a, b, c, d) of A + eps I at time t along the orbit.
    #[inline]
    pub fn entries(&self, t: f64) -> (f64, f64, f64, f64) {
        (
            self.a.eval(t) + self.epsilon,
            self.b.eval(t),
            self.c.eval(t),
            self.d.eval(t) + self.epsilon,
        )
    }

    pub fn matrix(&self, t: f64) -> Mat2 {
        let (a, b, c, d) = self.entries(t);
        Mat2::new(a, b, c, d)
    }

    /// Half trace at time t.
    #[inline]
    pub fn e(&self, t: f64) -> f64 {
        0.5 * (self.a.eval(t) + self.d.eval(t)) + self.epsilon
    }
}
