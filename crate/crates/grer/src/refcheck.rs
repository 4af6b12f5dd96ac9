//! Frozen reference tables and drift detection.
//!
//! The JSON files under `references/` hold values computed once by
//! independent high-precision tools (40-digit arithmetic; each entry's
//! `note` names the generating routine and settings) and are embedded into
//! the crate. [`regenerate_references`] recomputes each entry through this
//! crate's own routines — quadrature for the integrals, the series and
//! search code for the rest — and reports any drift beyond the suite
//! tolerance. Values are stored in shortest-round-trip decimal form, which
//! reproduces the exact `f64` bit pattern on parse.

use serde::{Deserialize, Serialize};

use crate::oracle::{gauss_legendre, integrate_hemisphere, QuadratureSpec};
use crate::patterns::{equivalent_alpha_grer, f_grer, grer_k_series};
use crate::specfun::{legendre_p, scaled_mod_sph_bessel_i};
use crate::{Error, Result, ScatterGeometry};

/// Where a frozen value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
}

/// One frozen reference value with its generating context.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrozenReference {
    pub id: String,
    pub inputs: serde_json::Value,
    pub value: f64,
    pub provenance: Provenance,
    pub note: String,
}

/// A file of frozen references sharing one tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceSuite {
    pub suite: String,
    #[serde(default)]
    pub tolerance_rel: Option<f64>,
    #[serde(default)]
    pub tolerance_abs: Option<f64>,
    pub entries: Vec<FrozenReference>,
}

/// One regenerated entry compared against its frozen value.
#[derive(Debug, Clone, Serialize)]
pub struct DriftEntry {
    pub id: String,
    pub frozen: f64,
    pub regenerated: f64,
    pub abs_diff: f64,
    pub within_tolerance: bool,
}

/// Outcome of re-running one suite.
#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub suite: String,
    pub entries: Vec<DriftEntry>,
    pub pass: bool,
}

const BESSEL_SCALED: &str = include_str!("../references/bessel_scaled.json");
const B_COEFFICIENTS: &str = include_str!("../references/b_coefficients.json");
const K_NORMALIZATION: &str = include_str!("../references/k_normalization.json");
const F_NORMALIZATION: &str = include_str!("../references/f_normalization.json");
const EQUIVALENT_ALPHA: &str = include_str!("../references/equivalent_alpha.json");

/// Names of the available suites.
pub fn suites() -> &'static [&'static str] {
    &[
        "bessel_scaled",
        "b_coefficients",
        "k_normalization",
        "f_normalization",
        "equivalent_alpha",
    ]
}

/// Loads one embedded suite.
pub fn load_suite(name: &str) -> Result<ReferenceSuite> {
    let text = match name {
        "bessel_scaled" => BESSEL_SCALED,
        "b_coefficients" => B_COEFFICIENTS,
        "k_normalization" => K_NORMALIZATION,
        "f_normalization" => F_NORMALIZATION,
        "equivalent_alpha" => EQUIVALENT_ALPHA,
        other => {
            return Err(Error::Domain(format!(
                "unknown reference suite '{other}' (available: {})",
                suites().join(", ")
            )))
        }
    };
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("suite {name}: {e}")))
}

fn input_f64(entry: &FrozenReference, key: &str) -> Result<f64> {
    entry.inputs[key]
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("entry {}: missing input '{key}'", entry.id)))
}

fn input_u64(entry: &FrozenReference, key: &str) -> Result<u64> {
    entry.inputs[key]
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("entry {}: missing input '{key}'", entry.id)))
}

/// `b_l` by quadrature with the substitution `u = s^2`, which turns the
/// integrand into a polynomial that Gauss–Legendre integrates exactly.
fn b_by_quadrature(degree: u32) -> Result<f64> {
    let nodes = gauss_legendre(((degree as usize) + 8).max(64));
    let mut sum = 0.0;
    for (x, w) in nodes {
        let s = 0.5 * (x + 1.0);
        sum += 0.5 * w * 2.0 * s * s * legendre_p(degree, s * s)?;
    }
    Ok(sum)
}

fn regenerate_entry(suite: &str, entry: &FrozenReference) -> Result<f64> {
    match suite {
        "bessel_scaled" => {
            let degree = input_u64(entry, "degree")? as u32;
            let x = input_f64(entry, "x")?;
            scaled_mod_sph_bessel_i(degree, x)
        }
        "b_coefficients" => b_by_quadrature(input_u64(entry, "degree")? as u32),
        "k_normalization" => Ok(grer_k_series(input_f64(entry, "alpha_r")?, 1e-12)?.value),
        "f_normalization" => {
            let alpha = input_f64(entry, "alpha_r")?;
            let theta_i = input_f64(entry, "theta_i_deg")?.to_radians();
            let spec = QuadratureSpec {
                refine_until: 1e-8,
                ..QuadratureSpec::default()
            };
            integrate_hemisphere(
                |theta_s, phi_s| {
                    let geom = ScatterGeometry::from_angles(theta_i, 0.0, theta_s, phi_s)
                        .expect("grid angles valid");
                    f_grer(&geom, alpha).expect("alpha valid")
                },
                &spec,
            )
        }
        "equivalent_alpha" => equivalent_alpha_grer(input_u64(entry, "alpha_rer")? as u32),
        other => Err(Error::Domain(format!("unknown suite '{other}'"))),
    }
}

/// Re-runs the generating routines for a suite and diffs against the
/// frozen values.
pub fn regenerate_references(suite: &str) -> Result<DriftReport> {
    let loaded = load_suite(suite)?;
    let mut entries = Vec::with_capacity(loaded.entries.len());
    let mut pass = true;
    for entry in &loaded.entries {
        let regenerated = regenerate_entry(&loaded.suite, entry)?;
        let abs_diff = (regenerated - entry.value).abs();
        let within = match (loaded.tolerance_rel, loaded.tolerance_abs) {
            (Some(rel), _) => {
                let scale = entry.value.abs().max(regenerated.abs());
                scale == 0.0 || abs_diff <= rel * scale
            }
            (None, Some(abs)) => abs_diff <= abs,
            (None, None) => abs_diff == 0.0,
        };
        pass &= within;
        entries.push(DriftEntry {
            id: entry.id.clone(),
            frozen: entry.value,
            regenerated,
            abs_diff,
            within_tolerance: within,
        });
    }
    Ok(DriftReport {
        suite: loaded.suite,
        entries,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::b_coefficient;

    #[test]
    fn all_suites_load() {
        for name in suites() {
            let s = load_suite(name).unwrap();
            assert_eq!(&s.suite, name);
            assert!(!s.entries.is_empty());
        }
        assert!(load_suite("nope").is_err());
    }

    #[test]
    fn bessel_suite_passes() {
        let r = regenerate_references("bessel_scaled").unwrap();
        for e in r.entries.iter().filter(|e| !e.within_tolerance) {
            eprintln!("drift: {} frozen={} regen={}", e.id, e.frozen, e.regenerated);
        }
        assert!(r.pass);
    }

    #[test]
    fn b_coefficient_suite_passes_and_matches_closed_form() {
        let r = regenerate_references("b_coefficients").unwrap();
        assert!(r.pass);
        let suite = load_suite("b_coefficients").unwrap();
        for e in &suite.entries {
            let l = e.inputs["degree"].as_u64().unwrap() as u32;
            assert!(
                (b_coefficient(l) - e.value).abs() <= 1e-10,
                "closed form drifts from frozen quadrature at l = {l}"
            );
        }
    }

    #[test]
    fn k_suite_passes() {
        assert!(regenerate_references("k_normalization").unwrap().pass);
    }

    #[test]
    fn f_suite_passes() {
        let r = regenerate_references("f_normalization").unwrap();
        for e in r.entries.iter().filter(|e| !e.within_tolerance) {
            eprintln!("drift: {} frozen={} regen={}", e.id, e.frozen, e.regenerated);
        }
        assert!(r.pass);
    }

    #[test]
    fn equivalent_alpha_suite_passes() {
        assert!(regenerate_references("equivalent_alpha").unwrap().pass);
    }

    #[test]
    fn regeneration_is_idempotent() {
        let a = regenerate_references("k_normalization").unwrap();
        let b = regenerate_references("k_normalization").unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.regenerated, y.regenerated);
        }
    }
}
