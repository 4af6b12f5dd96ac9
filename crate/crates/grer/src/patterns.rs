//! The RER and G-RER scattering patterns and their normalization routes.
//!
//! Both patterns share the `sqrt(cos theta_s)` factor that makes the power
//! model reciprocal, and differ in the lobe: `((1 + cos psi)/2)^alpha` for
//! RER, `exp(-alpha (1 - cos psi))` for G-RER.
//!
//! Normalization routes:
//!
//! - [`grer_normalization_series`] — the Legendre/Bessel series for the full
//!   hemispherical integral of the G-RER pattern. The series is evaluated
//!   with `e^{-alpha} i_l(alpha)` fused into one scaled function; that
//!   scaling is the one consistent with the pattern itself (the published
//!   variants disagree among themselves) and is pinned here by the
//!   quadrature oracle tests.
//! - [`grer_k_series`] — the incidence-independent constant `K(alpha)` such
//!   that `F ~ K sqrt(cos theta_i)`; equals the least-squares projection of
//!   the series onto `sqrt(cos theta_i)`.
//! - [`grer_k_pade`] — a degree (2,3) rational approximation of `K(alpha)`
//!   with fixed published coefficients; no series at all.
//! - [`rer_normalization_exact`] — the exact double sum for the RER lobe.
//!   Note the sum integrates the lobe *without* the `sqrt(cos theta_s)`
//!   factor: at `alpha = 0` it yields `2 pi`, the bare hemisphere solid
//!   angle.
//! - [`rer_k`] — the simplified RER constant; this one *does* correspond to
//!   the full pattern (it equals the hemispherical integral of the full
//!   pattern at normal incidence, `4 pi / 3` at `alpha = 0`).

use crate::geometry::ScatterGeometry;
use crate::specfun::{
    b_coefficient, ln_double_factorial_table, ln_factorial_table, ScaledBesselTable, SeriesResult,
};
use crate::{Error, Result};

/// Relative truncation threshold used when no explicit tolerance is given
/// (the operational threshold of the reference implementation).
pub const DEFAULT_REL_TOL: f64 = 1e-3;

/// Hard cap on series length before reporting non-convergence.
pub const TERM_BUDGET: usize = 100_000;

/// Incidence angles are clamped to this value (89.999 degrees): the exact
/// RER sum is undefined at grazing and every `sqrt(cos)` route degenerates
/// there.
pub fn max_theta_i() -> f64 {
    89.999f64.to_radians()
}

/// Which member of the reciprocal effective-roughness family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScatteringModel {
    /// Legacy power-of-cosine lobe; exact sums require an integer exponent.
    Rer,
    /// Gaussian lobe; any positive real exponent.
    Grer,
}

/// How the normalization factor in the power model is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    /// Full incidence-dependent integral (series for G-RER, double sum for
    /// RER).
    Exact,
    /// `K(alpha) sqrt(cos theta_i)` with `K` from the series/sum.
    KSqrtCos,
    /// `K(alpha) sqrt(cos theta_i)` with `K` from the rational
    /// approximation; G-RER only.
    Pade,
}

/// A validated (model, lobe exponent) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    model: ScatteringModel,
    alpha_r: f64,
}

impl ModelParams {
    /// Validates the exponent for the chosen model: any positive real for
    /// G-RER, a positive integer for RER (its exact sums run over integer
    /// ranges).
    pub fn new(model: ScatteringModel, alpha_r: f64) -> Result<Self> {
        if !alpha_r.is_finite() || alpha_r <= 0.0 {
            return Err(Error::Domain(format!(
                "lobe exponent must be positive and finite, got {alpha_r}"
            )));
        }
        if model == ScatteringModel::Rer
            && (alpha_r.fract() != 0.0 || alpha_r < 1.0 || alpha_r > u32::MAX as f64)
        {
            return Err(Error::Domain(format!(
                "RER exact sums require a positive integer exponent, got {alpha_r}"
            )));
        }
        Ok(Self { model, alpha_r })
    }

    pub fn model(&self) -> ScatteringModel {
        self.model
    }

    pub fn alpha_r(&self) -> f64 {
        self.alpha_r
    }

    /// The exponent as an integer (valid by construction for RER).
    pub fn alpha_int(&self) -> u32 {
        self.alpha_r as u32
    }

    /// The unnormalized pattern value for this model.
    pub fn pattern(&self, geom: &ScatterGeometry) -> Result<f64> {
        match self.model {
            ScatteringModel::Grer => f_grer(geom, self.alpha_r),
            ScatteringModel::Rer => f_rer(geom, self.alpha_r),
        }
    }
}

/// G-RER pattern: `sqrt(cos theta_s) * exp(-alpha (1 - cos psi))`.
///
/// `alpha_r = 0` is accepted as the isotropic limit.
pub fn f_grer(geom: &ScatterGeometry, alpha_r: f64) -> Result<f64> {
    check_alpha(alpha_r)?;
    Ok(geom.theta_s().cos().sqrt() * (-alpha_r * (1.0 - geom.cos_psi())).exp())
}

/// RER pattern: `sqrt(cos theta_s) * ((1 + cos psi)/2)^alpha`. The pattern
/// itself accepts any real exponent; only the exact sums need integers.
pub fn f_rer(geom: &ScatterGeometry, alpha_r: f64) -> Result<f64> {
    check_alpha(alpha_r)?;
    Ok(geom.theta_s().cos().sqrt() * ((1.0 + geom.cos_psi()) / 2.0).powf(alpha_r))
}

fn check_alpha(alpha_r: f64) -> Result<()> {
    if !alpha_r.is_finite() || alpha_r < 0.0 {
        return Err(Error::Domain(format!(
            "lobe exponent must be non-negative and finite, got {alpha_r}"
        )));
    }
    Ok(())
}

fn check_theta_i(theta_i: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta_i) {
        return Err(Error::Domain(format!(
            "theta_i must lie in [0, pi/2), got {theta_i}"
        )));
    }
    Ok(theta_i.min(max_theta_i()))
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Domain(format!(
            "relative tolerance must lie in (0, 1), got {rel_tol}"
        )));
    }
    Ok(())
}

/// Shared truncation loop: terms are added until two consecutive terms fall
/// below `rel_tol * |partial sum|` (two, because the Legendre factors can
/// vanish incidentally at isolated angles). `terms_used` reports the
/// truncation order: the count up to and including the last term that met
/// the threshold.
fn truncate_series(
    rel_tol: f64,
    scale: f64,
    mut term: impl FnMut(usize) -> f64,
) -> Result<SeriesResult> {
    let mut sum = 0.0f64;
    let mut below = 0u32;
    let mut last_significant = 0usize;
    for l in 0..TERM_BUDGET {
        let t = term(l);
        sum += t;
        if t.abs() < rel_tol * sum.abs() {
            below += 1;
            if below >= 2 {
                return Ok(SeriesResult {
                    value: scale * sum,
                    terms_used: last_significant + 1,
                    converged: true,
                });
            }
        } else {
            below = 0;
            last_significant = l;
        }
    }
    Err(Error::NonConvergence {
        budget: TERM_BUDGET,
    })
}

/// Hemispherical normalization of the G-RER pattern,
/// `2 pi sum_l (2l+1) e^{-alpha} i_l(alpha) P_l(cos theta_i) b_l`.
pub fn grer_normalization_series(
    alpha_r: f64,
    theta_i: f64,
    rel_tol: f64,
) -> Result<SeriesResult> {
    check_alpha(alpha_r)?;
    check_rel_tol(rel_tol)?;
    let mu = check_theta_i(theta_i)?.cos();
    let mut bessel = ScaledBesselTable::new(alpha_r)?;
    // Legendre values carried through the Bonnet recurrence.
    let mut p_prev = 1.0f64;
    let mut p = mu;
    truncate_series(rel_tol, std::f64::consts::TAU, |l| {
        let p_l = match l {
            0 => 1.0,
            1 => mu,
            _ => {
                let lf = (l - 1) as f64;
                let next = ((2.0 * lf + 1.0) * mu * p - lf * p_prev) / (lf + 1.0);
                p_prev = p;
                p = next;
                next
            }
        };
        (2 * l + 1) as f64 * bessel.get(l) * p_l * b_coefficient(l as u32)
    })
}

/// Incidence-independent G-RER normalization constant,
/// `4 pi sum_l (2l+1) e^{-alpha} i_l(alpha) b_l^2`; the least-squares
/// projection of the full normalization onto `sqrt(cos theta_i)`.
pub fn grer_k_series(alpha_r: f64, rel_tol: f64) -> Result<SeriesResult> {
    check_alpha(alpha_r)?;
    check_rel_tol(rel_tol)?;
    let mut bessel = ScaledBesselTable::new(alpha_r)?;
    truncate_series(rel_tol, 2.0 * std::f64::consts::TAU, |l| {
        let b = b_coefficient(l as u32);
        (2 * l + 1) as f64 * bessel.get(l) * b * b
    })
}

/// Rational approximation of the G-RER constant:
/// `pi (16/9 + 0.536 a + 0.399 a^2) / (1 + 0.965 a + 0.457 a^2 + 0.200 a^3)`.
pub fn grer_k_pade(alpha_r: f64) -> Result<f64> {
    check_alpha(alpha_r)?;
    let a = alpha_r;
    let num = 16.0 / 9.0 + 0.536 * a + 0.399 * a * a;
    let den = 1.0 + 0.965 * a + 0.457 * a * a + 0.200 * a * a * a;
    Ok(std::f64::consts::PI * num / den)
}

/// Exponent beyond which the exact RER sums switch to log-domain terms.
const RER_LOG_DOMAIN_ALPHA: u32 = 150;

/// Exact RER normalization double sum over `(j, l)`.
///
/// This sum integrates the *lobe-only* pattern `((1 + cos psi)/2)^alpha`
/// over the hemisphere — not the full pattern with its `sqrt(cos theta_s)`
/// factor. `terms_used` counts evaluated `(j, l)` pairs.
pub fn rer_normalization_exact(alpha_r: u32, theta_i: f64) -> Result<SeriesResult> {
    let theta_i = check_theta_i(theta_i)?;
    let value = if alpha_r <= RER_LOG_DOMAIN_ALPHA {
        rer_exact_direct(alpha_r, theta_i)
    } else {
        rer_exact_log(alpha_r, theta_i)
    };
    let pairs: usize = (0..=alpha_r as usize).map(|j| j / 2 + 1).sum();
    Ok(SeriesResult {
        value,
        terms_used: pairs,
        converged: true,
    })
}

fn rer_exact_direct(alpha: u32, theta_i: f64) -> f64 {
    let n = alpha as usize;
    let mut fact = vec![1.0f64; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut dfact = vec![1.0f64; n + 2];
    for i in 2..=(n + 1) {
        dfact[i] = dfact[i - 2] * i as f64;
    }
    let ci = theta_i.cos();
    let si = theta_i.sin();
    let prefactor = std::f64::consts::TAU * fact[n] / 2.0f64.powi(alpha as i32);
    let mut total = 0.0f64;
    for j in 0..=n {
        let outer = 1.0 / (fact[n - j] * dfact[j + 1]);
        let mut inner = 0.0f64;
        for l in 0..=(j / 2) {
            inner += ci.powi((j - 2 * l) as i32) * si.powi(2 * l as i32)
                / (2.0f64.powi(l as i32) * fact[l] * dfact[j - 2 * l]);
        }
        total += outer * inner;
    }
    prefactor * total
}

/// Log-domain evaluation with a streaming log-sum-exp over the (all
/// positive) terms; needed once the factorials leave the `f64` range.
fn rer_exact_log(alpha: u32, theta_i: f64) -> f64 {
    let n = alpha as usize;
    let lf = ln_factorial_table(n);
    let ld = ln_double_factorial_table(n + 1);
    let ci = theta_i.cos();
    let si = theta_i.sin();
    let ln_ci = ci.ln();
    let ln_si = if si > 0.0 { si.ln() } else { f64::NEG_INFINITY };
    let ln2 = std::f64::consts::LN_2;
    let ln_pref = std::f64::consts::TAU.ln() + lf[n] - alpha as f64 * ln2;
    let mut running_max = f64::NEG_INFINITY;
    let mut scaled_sum = 0.0f64;
    for j in 0..=n {
        for l in 0..=(j / 2) {
            if l > 0 && si == 0.0 {
                continue;
            }
            // The sin factor is absent for l = 0; avoid 0 * ln(0) = NaN.
            let ln_sin_part = if l == 0 { 0.0 } else { (2 * l) as f64 * ln_si };
            let ln_t = ln_pref - lf[n - j] - ld[j + 1]
                + (j - 2 * l) as f64 * ln_ci
                + ln_sin_part
                - l as f64 * ln2
                - lf[l]
                - ld[j - 2 * l];
            if ln_t <= running_max {
                scaled_sum += (ln_t - running_max).exp();
            } else {
                scaled_sum = scaled_sum * (running_max - ln_t).exp() + 1.0;
                running_max = ln_t;
            }
        }
    }
    running_max.exp() * scaled_sum
}

/// Simplified RER normalization constant
/// `(4 pi / 2^alpha) sum_j C(alpha, j) / (2j + 3)`; `terms_used` is
/// `alpha + 1`.
pub fn rer_k(alpha_r: u32) -> SeriesResult {
    let n = alpha_r as usize;
    let value = if alpha_r <= 900 {
        // Ratio recurrence in the linear domain:
        // t_{j+1}/t_j = (alpha-j)/(j+1) * (2j+3)/(2j+5).
        let mut t = 4.0 * std::f64::consts::PI / 2.0f64.powi(alpha_r as i32) / 3.0;
        let mut sum = t;
        for j in 0..n {
            t *= (n - j) as f64 / (j + 1) as f64 * (2 * j + 3) as f64 / (2 * j + 5) as f64;
            sum += t;
        }
        sum
    } else {
        let ln2 = std::f64::consts::LN_2;
        let mut ln_t = (4.0 * std::f64::consts::PI).ln() - alpha_r as f64 * ln2 - 3.0f64.ln();
        let mut running_max = ln_t;
        let mut scaled_sum = 1.0f64;
        for j in 0..n {
            ln_t += ((n - j) as f64 / (j + 1) as f64).ln()
                + ((2 * j + 3) as f64 / (2 * j + 5) as f64).ln();
            if ln_t <= running_max {
                scaled_sum += (ln_t - running_max).exp();
            } else {
                scaled_sum = scaled_sum * (running_max - ln_t).exp() + 1.0;
                running_max = ln_t;
            }
        }
        running_max.exp() * scaled_sum
    };
    SeriesResult {
        value,
        terms_used: n + 1,
        converged: true,
    }
}

/// The normalization factor entering the power model, dispatched over model
/// and mode, at the default truncation threshold.
pub fn normalization(params: &ModelParams, theta_i: f64, mode: NormalizationMode) -> Result<f64> {
    normalization_with_tol(params, theta_i, mode, DEFAULT_REL_TOL)
}

/// As [`normalization`], with an explicit series truncation threshold.
pub fn normalization_with_tol(
    params: &ModelParams,
    theta_i: f64,
    mode: NormalizationMode,
    rel_tol: f64,
) -> Result<f64> {
    let capped = check_theta_i(theta_i)?;
    match (params.model, mode) {
        (ScatteringModel::Grer, NormalizationMode::Exact) => {
            Ok(grer_normalization_series(params.alpha_r, capped, rel_tol)?.value)
        }
        (ScatteringModel::Grer, NormalizationMode::KSqrtCos) => {
            Ok(grer_k_series(params.alpha_r, rel_tol)?.value * capped.cos().sqrt())
        }
        (ScatteringModel::Grer, NormalizationMode::Pade) => {
            Ok(grer_k_pade(params.alpha_r)? * capped.cos().sqrt())
        }
        (ScatteringModel::Rer, NormalizationMode::Exact) => {
            Ok(rer_normalization_exact(params.alpha_int(), capped)?.value)
        }
        (ScatteringModel::Rer, NormalizationMode::KSqrtCos) => {
            Ok(rer_k(params.alpha_int()).value * capped.cos().sqrt())
        }
        (ScatteringModel::Rer, NormalizationMode::Pade) => Err(Error::UnsupportedMode(
            "the rational K approximation is defined for the Gaussian model only".into(),
        )),
    }
}

/// In-plane pattern cut used to match lobes between the two models:
/// `theta_i = 45 deg`, `phi_i = 90 deg`, signed `theta_s` from -89.5 to
/// +89.5 degrees in 0.5-degree steps (negative values are the
/// `phi_s = 270 deg` half-plane), peak-normalized.
fn inplane_cut(model: ScatteringModel, alpha: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(359);
    for k in 0..=358 {
        let t = -89.5 + 0.5 * k as f64;
        let phi_s = if t >= 0.0 { 90.0 } else { 270.0 };
        let geom = ScatterGeometry::from_degrees(45.0, 90.0, t.abs(), phi_s)?;
        out.push(match model {
            ScatteringModel::Grer => f_grer(&geom, alpha)?,
            ScatteringModel::Rer => f_rer(&geom, alpha)?,
        });
    }
    let peak = out.iter().cloned().fold(f64::MIN, f64::max);
    for v in &mut out {
        *v /= peak;
    }
    Ok(out)
}

fn cut_distance_sq(target: &[f64], model_alpha: f64) -> Result<f64> {
    let cut = inplane_cut(ScatteringModel::Grer, model_alpha)?;
    Ok(cut
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// The Gaussian exponent whose peak-normalized in-plane cut best matches
/// (in L2) the RER cut with exponent `alpha_rer`, searched to an absolute
/// resolution of `1e-4`.
pub fn equivalent_alpha_grer(alpha_rer: u32) -> Result<f64> {
    if alpha_rer < 1 {
        return Err(Error::Domain("alpha_rer must be at least 1".into()));
    }
    let target = inplane_cut(ScatteringModel::Rer, f64::from(alpha_rer))?;
    // Coarse bracket, then golden-section refinement.
    let hi = f64::from(alpha_rer) + 2.0;
    let mut best = (f64::INFINITY, 0.25);
    let mut a = 0.25;
    while a <= hi {
        let d = cut_distance_sq(&target, a)?;
        if d < best.0 {
            best = (d, a);
        }
        a += 0.25;
    }
    let mut lo = (best.1 - 0.3).max(1e-3);
    let mut up = best.1 + 0.3;
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = up - inv_phi * (up - lo);
    let mut x2 = lo + inv_phi * (up - lo);
    let mut f1 = cut_distance_sq(&target, x1)?;
    let mut f2 = cut_distance_sq(&target, x2)?;
    while up - lo > 1e-5 {
        if f1 < f2 {
            up = x2;
            x2 = x1;
            f2 = f1;
            x1 = up - inv_phi * (up - lo);
            f1 = cut_distance_sq(&target, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (up - lo);
            f2 = cut_distance_sq(&target, x2)?;
        }
    }
    Ok((lo + up) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn f_grer_specular_peak() {
        let g = ScatterGeometry::from_degrees(45.0, 0.0, 45.0, 0.0).unwrap();
        assert_relative_eq!(
            f_grer(&g, 12.0).unwrap(),
            45.0f64.to_radians().cos().sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn f_grer_isotropic_limit() {
        let g = ScatterGeometry::from_degrees(30.0, 10.0, 70.0, 200.0).unwrap();
        assert_relative_eq!(
            f_grer(&g, 0.0).unwrap(),
            70.0f64.to_radians().cos().sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn f_grer_direct_value_and_both_forms_agree() {
        let g = ScatterGeometry::from_degrees(0.0, 0.0, 60.0, 0.0).unwrap();
        let expect = 0.5f64.sqrt() * (-1.0f64).exp();
        assert_relative_eq!(f_grer(&g, 2.0).unwrap(), expect, max_relative = 1e-12);
        // exp(-alpha (1 - cos psi)) == exp(-alpha/2 |k_r - k_s|^2)
        let alt = g.theta_s().cos().sqrt()
            * (-2.0 * 0.5 * g.k_r().distance_sq(&g.k_s())).exp();
        assert_relative_eq!(f_grer(&g, 2.0).unwrap(), alt, max_relative = 1e-12);
    }

    #[test]
    fn f_rer_values() {
        let g = ScatterGeometry::from_degrees(30.0, 0.0, 30.0, 0.0).unwrap();
        assert_relative_eq!(
            f_rer(&g, 9.0).unwrap(),
            30.0f64.to_radians().cos().sqrt(),
            max_relative = 1e-14
        );
        let g = ScatterGeometry::from_degrees(0.0, 0.0, 60.0, 0.0).unwrap();
        assert_relative_eq!(
            f_rer(&g, 4.0).unwrap(),
            0.5f64.sqrt() * 0.75f64.powi(4),
            max_relative = 1e-14
        );
    }

    #[test]
    fn f_rer_antispecular_zero() {
        // cos psi = -1 requires theta_i ~ 90; closest in-domain: grazing
        // incidence, scattering straight back near the horizon.
        let g = ScatterGeometry::from_degrees(89.9, 0.0, 89.9, 180.0).unwrap();
        assert!(f_rer(&g, 3.0).unwrap() < 1e-10);
    }

    #[test]
    fn patterns_bounded_by_one() {
        for seed in 0..200u64 {
            let ti = 89.9 * ((seed as f64 * 0.37).fract());
            let ts = 90.0 * ((seed as f64 * 0.61).fract());
            let ps = 360.0 * ((seed as f64 * 0.17).fract());
            let g = ScatterGeometry::from_degrees(ti, 0.0, ts, ps).unwrap();
            for alpha in [0.0, 0.5, 3.0, 40.0] {
                let fg = f_grer(&g, alpha).unwrap();
                let fr = f_rer(&g, alpha).unwrap();
                assert!((0.0..=1.0).contains(&fg));
                assert!((0.0..=1.0).contains(&fr));
            }
        }
    }

    #[test]
    fn grer_series_isotropic_anchor() {
        // alpha -> 0 leaves only the l = 0 term: 2 pi b_0 = 4 pi / 3.
        for ti_deg in [0.0f64, 30.0, 60.0, 89.0] {
            let r = grer_normalization_series(0.0, ti_deg.to_radians(), 1e-9).unwrap();
            assert_relative_eq!(r.value, 4.0 * PI / 3.0, max_relative = 1e-12);
            assert_eq!(r.terms_used, 1);
            assert!(r.converged);
        }
    }

    #[test]
    fn grer_series_frozen_value() {
        // Frozen from a 40-digit evaluation of the same series.
        let r = grer_normalization_series(5.0, 30.0f64.to_radians(), 1e-9).unwrap();
        assert_relative_eq!(r.value, 1.018523880470421, max_relative = 1e-9);
    }

    #[test]
    fn k_series_anchors() {
        let r = grer_k_series(0.0, 1e-9).unwrap();
        assert_relative_eq!(r.value, 16.0 * PI / 9.0, max_relative = 1e-12);
        assert_eq!(r.terms_used, 1);
        // Frozen 40-digit values.
        assert_relative_eq!(
            grer_k_series(1.0, 1e-9).unwrap().value,
            3.2466021749742016,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            grer_k_series(10.0, 1e-9).unwrap().value,
            0.5781371188901175,
            max_relative = 1e-9
        );
        // Large-alpha lobe solid angle: alpha K / (2 pi) -> 1.
        let k200 = grer_k_series(200.0, 1e-9).unwrap().value;
        let ratio = 200.0 * k200 / (2.0 * PI);
        assert!((0.98..=1.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn pade_anchors() {
        assert_relative_eq!(grer_k_pade(0.0).unwrap(), 16.0 * PI / 9.0, max_relative = 1e-15);
        // pi * (16/9 + 0.536 + 0.399) / (1 + 0.965 + 0.457 + 0.200),
        // frozen from independent rational evaluation.
        assert_relative_eq!(
            grer_k_pade(1.0).unwrap(),
            3.2503595490039325,
            max_relative = 1e-14
        );
        assert!(grer_k_pade(-1.0).is_err());
    }

    #[test]
    fn pade_tracks_series() {
        // Regression guard at the observed fidelity of the published
        // coefficients (max deviation 0.351% near alpha = 6.2).
        let mut worst = 0.0f64;
        for i in 0..200 {
            let a = 0.05 * (100.0f64 / 0.05).powf(i as f64 / 199.0);
            let k = grer_k_series(a, 1e-9).unwrap().value;
            let p = grer_k_pade(a).unwrap();
            worst = worst.max((p / k - 1.0).abs());
        }
        assert!(worst < 0.004, "max deviation {worst}");
        assert!(worst > 0.002, "deviation unexpectedly small: {worst}");
    }

    #[test]
    fn rer_exact_anchors() {
        // alpha = 0: the bare hemisphere solid angle (lobe-only integrand).
        let r = rer_normalization_exact(0, 0.7).unwrap();
        assert_relative_eq!(r.value, 2.0 * PI, max_relative = 1e-14);
        assert_eq!(r.terms_used, 1);
        // alpha = 1 at normal incidence: 3 pi / 2.
        let r = rer_normalization_exact(1, 0.0).unwrap();
        assert_relative_eq!(r.value, 1.5 * PI, max_relative = 1e-14);
        assert_eq!(r.terms_used, 2);
        // Pair count at alpha = 10.
        assert_eq!(rer_normalization_exact(10, 0.5).unwrap().terms_used, 36);
    }

    #[test]
    fn rer_exact_log_path_matches_direct() {
        for theta in [0.0, 0.5, 1.2] {
            let direct = rer_exact_direct(140, theta);
            let logged = rer_exact_log(140, theta);
            assert_relative_eq!(direct, logged, max_relative = 1e-11);
        }
    }

    #[test]
    fn rer_k_anchors() {
        assert_relative_eq!(rer_k(0).value, 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(rer_k(1).value, 16.0 * PI / 15.0, max_relative = 1e-14);
        assert_eq!(rer_k(10).terms_used, 11);
    }

    #[test]
    fn rer_k_log_path_continuous() {
        // The two evaluation paths agree where they meet.
        let direct = rer_k(900).value;
        // Direct formula (linear path) forced through the log branch by
        // comparing against neighbors' scaling trend instead: check the
        // large-alpha asymptote K ~ 4 pi / (alpha + 3) holds on both sides.
        let k901 = rer_k(901).value;
        assert_relative_eq!(
            direct / k901,
            (4.0 * PI / 903.0) / (4.0 * PI / 904.0),
            max_relative = 1e-3
        );
        assert!(rer_k(10_000).value.is_finite());
        assert!(rer_k(10_000).value > 0.0);
    }

    #[test]
    fn normalization_dispatch() {
        let grer = ModelParams::new(ScatteringModel::Grer, 3.0).unwrap();
        // Pade at normal incidence is the bare constant.
        assert_relative_eq!(
            normalization(&grer, 0.0, NormalizationMode::Pade).unwrap(),
            grer_k_pade(3.0).unwrap(),
            max_relative = 1e-15
        );
        // KSqrtCos vs Exact within a couple percent in the directive regime.
        let p50 = ModelParams::new(ScatteringModel::Grer, 50.0).unwrap();
        let approx_ = normalization_with_tol(
            &p50,
            60.0f64.to_radians(),
            NormalizationMode::KSqrtCos,
            1e-9,
        )
        .unwrap();
        let exact = normalization_with_tol(
            &p50,
            60.0f64.to_radians(),
            NormalizationMode::Exact,
            1e-9,
        )
        .unwrap();
        assert!((approx_ / exact - 1.0).abs() < 0.02);
        // Pade for RER is rejected.
        let rer = ModelParams::new(ScatteringModel::Rer, 5.0).unwrap();
        assert!(matches!(
            normalization(&rer, 0.5, NormalizationMode::Pade),
            Err(Error::UnsupportedMode(_))
        ));
    }

    #[test]
    fn model_params_validation() {
        assert!(ModelParams::new(ScatteringModel::Rer, 2.5).is_err());
        assert!(ModelParams::new(ScatteringModel::Rer, 0.0).is_err());
        assert!(ModelParams::new(ScatteringModel::Grer, -1.0).is_err());
        assert!(ModelParams::new(ScatteringModel::Grer, 2.5).is_ok());
        assert!(ModelParams::new(ScatteringModel::Rer, 7.0).is_ok());
    }

    #[test]
    fn normalization_positive_over_wide_exponent_range() {
        for &alpha in &[0.01, 0.5, 1.0, 10.0, 100.0, 1000.0, 1e4] {
            for &ti_deg in &[0.0, 45.0, 89.0] {
                let ti = (ti_deg as f64).to_radians();
                let f = grer_normalization_series(alpha, ti, 1e-6).unwrap();
                assert!(f.value > 0.0 && f.value.is_finite());
                let k = grer_k_series(alpha, 1e-6).unwrap();
                assert!(k.value > 0.0 && k.value.is_finite());
                let p = grer_k_pade(alpha).unwrap();
                assert!(p > 0.0 && p.is_finite());
            }
        }
        for &alpha in &[1u32, 10, 100, 1000, 10_000] {
            let k = rer_k(alpha);
            assert!(k.value > 0.0 && k.value.is_finite(), "K_rer({alpha})");
        }
        for &alpha in &[1u32, 10, 100, 400] {
            for &ti_deg in &[0.0, 45.0, 89.0] {
                let f = rer_normalization_exact(alpha, (ti_deg as f64).to_radians()).unwrap();
                assert!(f.value > 0.0 && f.value.is_finite(), "F_rer({alpha}, {ti_deg})");
            }
        }
    }

    #[test]
    fn series_rejects_bad_tolerance() {
        assert!(grer_k_series(1.0, 0.0).is_err());
        assert!(grer_k_series(1.0, 1.5).is_err());
        assert!(grer_normalization_series(1.0, 2.0, 1e-3).is_err()); // theta out of range
    }

    #[test]
    fn equivalent_alpha_frozen_anchor() {
        // Frozen from a dense grid search (step 1e-3 over (0, 50]) on the
        // same cut definition.
        let a = equivalent_alpha_grer(1).unwrap();
        assert_abs_diff_eq!(a, 0.702, epsilon = 2e-3);
    }

    #[test]
    fn equivalent_alpha_monotone_and_below_identity() {
        let mut prev = 0.0;
        for ar in [1u32, 2, 3, 5, 8, 10] {
            let a = equivalent_alpha_grer(ar).unwrap();
            assert!(a > prev, "not increasing at alpha_rer = {ar}");
            if ar >= 2 {
                assert!(a < f64::from(ar), "equivalent alpha not smaller at {ar}");
            }
            prev = a;
        }
    }
}
