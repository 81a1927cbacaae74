//! On-disk system descriptions.
//!
//! A configuration is a TOML document naming the torus frequencies, the
//! four coefficient polynomials, the spectral shift, and the
//! dissipation parameters. Unknown keys are rejected: a typo in a
//! coefficient name must not silently produce the zero polynomial.
//!
//! Configurations carry a stable 64-bit content hash (FNV-1a over the
//! canonical serialization) that output files echo, so a result can be
//! traced back to the exact system that produced it across runs and
//! machines.

use crate::driving::{CoefficientMatrix, Frequencies, SystemFamily, TrigPoly, TrigTerm};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One harmonic: integer multi-index and its two amplitudes.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub k: Vec<i32>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// One coefficient polynomial.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolyConfig {
    #[serde(default)]
    pub constant: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    #[serde(default)]
    pub a: PolyConfig,
    #[serde(default)]
    pub b: PolyConfig,
    #[serde(default)]
    pub c: PolyConfig,
    #[serde(default)]
    pub d: PolyConfig,
}

/// A complete system description as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub name: String,
    pub frequencies: Vec<f64>,
    pub epsilon: f64,
    pub rho: f64,
    /// Safety margin under the square root of the absorbing radius.
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub coefficients: CoefficientsConfig,
}

fn default_delta() -> f64 {
    crate::nonlinear::DEFAULT_DELTA
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Build the runtime family, validating dimensions and ranges.
    pub fn to_family(&self) -> Result<SystemFamily> {
        let poly = |p: &PolyConfig| {
            TrigPoly::new(
                p.constant,
                p.terms
                    .iter()
                    .map(|t| TrigTerm {
                        k: t.k.clone(),
                        cos_coeff: t.cos,
                        sin_coeff: t.sin,
                    })
                    .collect(),
            )
        };
        let matrix = CoefficientMatrix {
            a: poly(&self.coefficients.a),
            b: poly(&self.coefficients.b),
            c: poly(&self.coefficients.c),
            d: poly(&self.coefficients.d),
        };
        if !(self.delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        SystemFamily::new(matrix, self.epsilon, self.rho, Frequencies::new(self.frequencies.clone())?)
    }

    /// Describe a runtime family (used to emit the bundled files).
    pub fn from_family(name: &str, fam: &SystemFamily, delta: f64) -> ConfigFile {
        let poly = |p: &TrigPoly| PolyConfig {
            constant: p.constant,
            terms: p
                .terms
                .iter()
                .map(|t| TermConfig { k: t.k.clone(), cos: t.cos_coeff, sin: t.sin_coeff })
                .collect(),
        };
        ConfigFile {
            name: name.to_string(),
            frequencies: fam.freqs.values().to_vec(),
            epsilon: fam.epsilon,
            rho: fam.rho,
            delta,
            coefficients: CoefficientsConfig {
                a: poly(&fam.matrix.a),
                b: poly(&fam.matrix.b),
                c: poly(&fam.matrix.c),
                d: poly(&fam.matrix.d),
            },
        }
    }

    /// Stable content hash: FNV-1a over the canonical serialization.
    /// Identical configurations hash identically on every platform.
    pub fn content_hash(&self) -> u64 {
        fnv1a64(self.to_toml().as_bytes())
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    const QUASI: &str = r#"
name = "quasiperiodic"
frequencies = [1.0, 1.4142135623730951]
epsilon = 0.0
rho = 0.5

[coefficients.b]
constant = 0.0
terms = [{ k = [1, 0], cos = 1.0 }, { k = [0, 1], sin = 1.0 }]

[coefficients.c]
constant = 0.0
terms = [{ k = [1, 0], cos = -1.0 }, { k = [0, 1], sin = -1.0 }]
"#;

    #[test]
    fn parses_with_defaults_and_matches_the_preset() {
        let cfg = ConfigFile::parse(QUASI).unwrap();
        assert_eq!(cfg.delta, 0.1);
        assert_eq!(cfg.coefficients.a, PolyConfig::default());
        let fam = cfg.to_family().unwrap();
        let preset = presets::quasiperiodic(0.0);
        let p = crate::driving::TorusPoint::new(vec![0.7, 2.9]).unwrap();
        let (m1, m2) = (fam.eval_matrix(&p), preset.eval_matrix(&p));
        for i in 0..2 {
            for j in 0..2 {
                assert!((m1.m[i][j] - m2.m[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let fam = presets::chaotic(5, 2.0, 0.0);
        let cfg = ConfigFile::from_family("chaotic", &fam, 0.1);
        let back = ConfigFile::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.content_hash(), back.content_hash());
        let fam2 = back.to_family().unwrap();
        let p = crate::driving::TorusPoint::new(vec![0.1, 0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!((fam.eval_e(&p) - fam2.eval_e(&p)).abs() < 1e-15);
    }

    #[test]
    fn hash_tracks_content() {
        let a = ConfigFile::parse(QUASI).unwrap();
        let mut b = a.clone();
        assert_eq!(a.content_hash(), b.content_hash());
        b.epsilon = 0.25;
        assert_ne!(a.content_hash(), b.content_hash());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let typo = QUASI.replace("epsilon = 0.0", "epsilon = 0.0\nepsilonn = 1.0");
        assert!(ConfigFile::parse(&typo).is_err());
        let bad_rho = QUASI.replace("rho = 0.5", "rho = 0.0");
        assert!(ConfigFile::parse(&bad_rho).unwrap().to_family().is_err());
        // Mismatched index length against the frequency count.
        let bad_k = QUASI.replace("k = [1, 0]", "k = [1]");
        assert!(ConfigFile::parse(&bad_k).unwrap().to_family().is_err());
    }
}
