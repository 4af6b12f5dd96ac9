//! Physical scattered-power evaluation and its consistency checks.
//!
//! Power flows through the bistatic model
//!
//! `|E_s|^2 = (K S / (r_i r_s))^2 Gamma^2 cos(theta_i) f / F dS`
//!
//! with the surface reflectivity `Gamma^2` from the Fresnel coefficients of
//! a lossy dielectric, the pattern `f` and normalization `F` from
//! [`crate::patterns`], and an optional depolarization split of the total
//! diffuse power between co- and cross-polarized channels.

use num_complex::Complex64;

use crate::geometry::ScatterGeometry;
use crate::patterns::{normalization_with_tol, ModelParams, NormalizationMode, DEFAULT_REL_TOL};
use crate::{Error, Result};

/// Vacuum permittivity, F/m.
const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Field polarization with respect to the plane of incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Transverse electric (perpendicular, s).
    Te,
    /// Transverse magnetic (parallel, p).
    Tm,
}

/// Everything calibration estimates about a surface, plus the
/// depolarization coefficient.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Material {
    /// Relative permittivity (real part), at least 1.
    pub eps_r: f64,
    /// Conductivity, S/m.
    pub sigma: f64,
    /// Scattering coefficient `S` in `[0, 1]`: the amplitude fraction of
    /// incident power diverted into diffuse scattering.
    #[serde(rename = "s")]
    pub scattering: f64,
    /// Lobe exponent.
    pub alpha_r: f64,
    /// Depolarization coefficient in `[0, 1)`.
    pub kappa: f64,
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_r >= 1.0) {
            return Err(Error::Domain(format!(
                "relative permittivity must be >= 1, got {}",
                self.eps_r
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Domain(format!(
                "conductivity must be >= 0, got {}",
                self.sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.scattering) {
            return Err(Error::Domain(format!(
                "scattering coefficient must lie in [0, 1], got {}",
                self.scattering
            )));
        }
        if !(self.alpha_r > 0.0) {
            return Err(Error::Domain(format!(
                "lobe exponent must be positive, got {}",
                self.alpha_r
            )));
        }
        if !(0.0..1.0).contains(&self.kappa) {
            return Err(Error::Domain(format!(
                "depolarization coefficient must lie in [0, 1), got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// Path lengths, surface element area and transmit constant of the power
/// model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinkBudget {
    /// Transmitter to surface-element path length, m.
    pub r_i: f64,
    /// Surface element to receiver path length, m.
    pub r_s: f64,
    /// Surface element area, m^2.
    pub surface_element: f64,
    /// Transmit power/gain constant.
    pub k_tx: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_i", self.r_i),
            ("r_s", self.r_s),
            ("surface_element", self.surface_element),
            ("k_tx", self.k_tx),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Power reflectivity `|Gamma|^2` of a lossy dielectric half-space with
/// complex permittivity `eps = eps_r - j sigma / (omega eps_0)`.
pub fn fresnel_reflectivity(
    material: &Material,
    freq_hz: f64,
    theta_i: f64,
    pol: Polarization,
) -> Result<f64> {
    material.validate()?;
    if !(freq_hz > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {freq_hz}"
        )));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta_i) {
        return Err(Error::Domain(format!(
            "incidence angle must lie in [0, pi/2], got {theta_i}"
        )));
    }
    let omega = std::f64::consts::TAU * freq_hz;
    let eps = Complex64::new(material.eps_r, -material.sigma / (omega * EPSILON_0));
    let ci = theta_i.cos();
    let s2 = theta_i.sin().powi(2);
    let root = (eps - s2).sqrt();
    let r = match pol {
        Polarization::Te => (ci - root) / (ci + root),
        Polarization::Tm => (eps * ci - root) / (eps * ci + root),
    };
    Ok(r.norm_sqr())
}

/// Diffuse power density of one surface element.
///
/// The reflectivity is evaluated at the incidence angle of `geom`, per the
/// power model. For reciprocity experiments that hold the surface
/// interaction fixed while exchanging the endpoints, use
/// [`diffuse_power_with_reflectivity`].
#[allow(clippy::too_many_arguments)]
pub fn diffuse_power(
    link: &LinkBudget,
    geom: &ScatterGeometry,
    material: &Material,
    freq_hz: f64,
    pol: Polarization,
    model: &ModelParams,
    mode: NormalizationMode,
) -> Result<f64> {
    let gamma_sq = fresnel_reflectivity(material, freq_hz, geom.theta_i(), pol)?;
    diffuse_power_with_reflectivity(link, geom, gamma_sq, material.scattering, model, mode)
}

/// Diffuse power density with a caller-supplied reflectivity.
pub fn diffuse_power_with_reflectivity(
    link: &LinkBudget,
    geom: &ScatterGeometry,
    gamma_sq: f64,
    scattering: f64,
    model: &ModelParams,
    mode: NormalizationMode,
) -> Result<f64> {
    link.validate()?;
    if !(0.0..=1.0).contains(&scattering) {
        return Err(Error::Domain(format!(
            "scattering coefficient must lie in [0, 1], got {scattering}"
        )));
    }
    if !(0.0..=1.0).contains(&gamma_sq) {
        return Err(Error::Domain(format!(
            "reflectivity must lie in [0, 1], got {gamma_sq}"
        )));
    }
    let f = model.pattern(geom)?;
    let norm = normalization_with_tol(model, geom.theta_i(), mode, DEFAULT_REL_TOL)?;
    let spreading = link.k_tx * scattering / (link.r_i * link.r_s);
    Ok(spreading * spreading
        * gamma_sq
        * geom.theta_i().cos()
        * (f / norm)
        * link.surface_element)
}

/// Relative difference between the two sides of the reciprocity condition
/// `f(k_s, k_i) cos(theta_i) / F(k_i) = f(k_i, k_s) cos(theta_s) / F(k_s)`.
///
/// Under the `K sqrt(cos)` normalizations the two sides are algebraically
/// identical and the result sits at floating-point level. Under the exact
/// G-RER normalization the residual is a diagnostic of how far `F` departs
/// from the `sqrt(cos)` shape at the probe angles.
pub fn reciprocity_residual(
    geom: &ScatterGeometry,
    model: &ModelParams,
    mode: NormalizationMode,
) -> Result<f64> {
    let swapped = geom.swapped()?;
    let lhs = model.pattern(geom)? * geom.theta_i().cos()
        / normalization_with_tol(model, geom.theta_i(), mode, 1e-9)?;
    let rhs = model.pattern(&swapped)? * swapped.theta_i().cos()
        / normalization_with_tol(model, swapped.theta_i(), mode, 1e-9)?;
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs() / scale)
}

/// Splits total diffuse power between co- and cross-polarized channels:
/// `co = (1 - kappa) total`, `cross = kappa total`. The pair sums back to
/// `total` exactly (the co term is computed as the complement).
pub fn depolarize(total_power: f64, kappa: f64) -> Result<(f64, f64)> {
    if !(total_power >= 0.0) {
        return Err(Error::Domain(format!(
            "power must be non-negative, got {total_power}"
        )));
    }
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::Domain(format!(
            "depolarization coefficient must lie in [0, 1), got {kappa}"
        )));
    }
    // Compute the larger share by product and the smaller by subtraction:
    // the larger share is provably >= total/2, so the subtraction is exact
    // (Sterbenz) and the pair sums back bit-for-bit.
    let pair = if kappa <= 0.5 {
        let co = (1.0 - kappa) * total_power;
        (co, total_power - co)
    } else {
        let cross = kappa * total_power;
        (total_power - cross, cross)
    };
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::ScatteringModel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn brick() -> Material {
        Material {
            eps_r: 3.219,
            sigma: 0.050,
            scattering: 0.4,
            alpha_r: 15.0,
            kappa: 0.074,
        }
    }

    #[test]
    fn fresnel_normal_incidence_lossless() {
        // eps_r = 4: |(sqrt(4)-1)/(sqrt(4)+1)|^2 = 1/9, both polarizations.
        let m = Material {
            eps_r: 4.0,
            sigma: 0.0,
            ..brick()
        };
        for pol in [Polarization::Te, Polarization::Tm] {
            let g = fresnel_reflectivity(&m, 28.5e9, 0.0, pol).unwrap();
            assert_relative_eq!(g, 1.0 / 9.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn fresnel_conductor_limit() {
        let m = Material {
            eps_r: 1.0,
            sigma: 1e9,
            ..brick()
        };
        for theta in [0.0, 0.5, 1.2] {
            let g = fresnel_reflectivity(&m, 28.5e9, theta, Polarization::Te).unwrap();
            assert!((g - 1.0).abs() < 1e-3, "got {g} at {theta}");
        }
    }

    #[test]
    fn fresnel_brewster_null() {
        let m = Material {
            eps_r: 3.0,
            sigma: 0.0,
            ..brick()
        };
        let brewster = 3.0f64.sqrt().atan();
        let g = fresnel_reflectivity(&m, 28.5e9, brewster, Polarization::Tm).unwrap();
        assert!(g < 1e-6, "got {g}");
        // TE has no null there.
        let g_te = fresnel_reflectivity(&m, 28.5e9, brewster, Polarization::Te).unwrap();
        assert!(g_te > 0.1);
    }

    #[test]
    fn fresnel_grazing_limit() {
        let m = brick();
        for pol in [Polarization::Te, Polarization::Tm] {
            let g =
                fresnel_reflectivity(&m, 28.5e9, std::f64::consts::FRAC_PI_2, pol).unwrap();
            assert_relative_eq!(g, 1.0, max_relative = 1e-6);
        }
    }

    fn link() -> LinkBudget {
        LinkBudget {
            r_i: 0.8,
            r_s: 1.6,
            surface_element: 6.25e-4,
            k_tx: 1.0,
        }
    }

    #[test]
    fn diffuse_power_zero_scattering() {
        let geom = ScatterGeometry::from_degrees(30.0, 0.0, 50.0, 40.0).unwrap();
        let model = ModelParams::new(ScatteringModel::Grer, 8.0).unwrap();
        let mut m = brick();
        m.scattering = 0.0;
        let p = diffuse_power(
            &link(),
            &geom,
            &m,
            28.5e9,
            Polarization::Te,
            &model,
            NormalizationMode::Pade,
        )
        .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn diffuse_power_inverse_square_each_leg() {
        let geom = ScatterGeometry::from_degrees(30.0, 0.0, 50.0, 40.0).unwrap();
        let model = ModelParams::new(ScatteringModel::Grer, 8.0).unwrap();
        let near = diffuse_power(
            &link(),
            &geom,
            &brick(),
            28.5e9,
            Polarization::Te,
            &model,
            NormalizationMode::Pade,
        )
        .unwrap();
        let far = diffuse_power(
            &LinkBudget {
                r_i: 1.6,
                r_s: 3.2,
                ..link()
            },
            &geom,
            &brick(),
            28.5e9,
            Polarization::Te,
            &model,
            NormalizationMode::Pade,
        )
        .unwrap();
        assert_relative_eq!(near / far, 16.0, max_relative = 1e-12);
    }

    #[test]
    fn diffuse_power_monotone_in_scattering() {
        let geom = ScatterGeometry::from_degrees(30.0, 0.0, 50.0, 40.0).unwrap();
        let model = ModelParams::new(ScatteringModel::Grer, 8.0).unwrap();
        let mut prev = 0.0;
        for s in [0.1, 0.3, 0.5, 0.8, 1.0] {
            let mut m = brick();
            m.scattering = s;
            let p = diffuse_power(
                &link(),
                &geom,
                &m,
                28.5e9,
                Polarization::Te,
                &model,
                NormalizationMode::Pade,
            )
            .unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn power_reciprocity_under_k_sqrt_cos() {
        // Exchanging the endpoints (angles and path lengths swap, the
        // surface interaction stays fixed) leaves the power unchanged.
        for seed in 0..50u64 {
            let ti = 1.0 + 28.0 * ((seed as f64 * 0.31).fract());
            let ts = 1.0 + 88.0 * ((seed as f64 * 0.47).fract());
            let ps = 360.0 * ((seed as f64 * 0.59).fract());
            let geom = ScatterGeometry::from_degrees(ti.min(89.0), 10.0, ts.min(89.0), ps)
                .unwrap();
            for (model, mode) in [
                (
                    ModelParams::new(ScatteringModel::Grer, 7.0).unwrap(),
                    NormalizationMode::KSqrtCos,
                ),
                (
                    ModelParams::new(ScatteringModel::Rer, 4.0).unwrap(),
                    NormalizationMode::KSqrtCos,
                ),
            ] {
                let forward = diffuse_power_with_reflectivity(
                    &link(),
                    &geom,
                    0.3,
                    0.5,
                    &model,
                    mode,
                )
                .unwrap();
                let swapped_link = LinkBudget {
                    r_i: link().r_s,
                    r_s: link().r_i,
                    ..link()
                };
                let backward = diffuse_power_with_reflectivity(
                    &swapped_link,
                    &geom.swapped().unwrap(),
                    0.3,
                    0.5,
                    &model,
                    mode,
                )
                .unwrap();
                assert_relative_eq!(forward, backward, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn residual_floating_point_level_for_k_modes() {
        let geom = ScatterGeometry::from_degrees(33.0, 15.0, 61.0, 200.0).unwrap();
        let grer = ModelParams::new(ScatteringModel::Grer, 7.0).unwrap();
        let rer = ModelParams::new(ScatteringModel::Rer, 4.0).unwrap();
        assert!(
            reciprocity_residual(&geom, &grer, NormalizationMode::KSqrtCos).unwrap() <= 1e-12
        );
        assert!(
            reciprocity_residual(&geom, &rer, NormalizationMode::KSqrtCos).unwrap() <= 1e-12
        );
        assert!(
            reciprocity_residual(&geom, &grer, NormalizationMode::Pade).unwrap() <= 1e-12
        );
    }

    #[test]
    fn residual_exact_mode_shrinks_from_2_to_50() {
        let geom = ScatterGeometry::from_degrees(20.0, 0.0, 70.0, 0.0).unwrap();
        let at = |alpha: f64| {
            let m = ModelParams::new(ScatteringModel::Grer, alpha).unwrap();
            reciprocity_residual(&geom, &m, NormalizationMode::Exact).unwrap()
        };
        assert!(at(50.0) < at(2.0));
    }

    #[test]
    fn depolarize_split() {
        assert_eq!(depolarize(2.0, 0.0).unwrap(), (2.0, 0.0));
        let (co, cross) = depolarize(1.0, 0.074).unwrap();
        assert_relative_eq!(cross / (co + cross), 0.074, max_relative = 1e-15);
        let (co, cross) = depolarize(3.0, 0.5).unwrap();
        assert_abs_diff_eq!(co, cross, epsilon = 1e-15);
    }

    #[test]
    fn depolarize_conserves_exactly() {
        for seed in 0..100u64 {
            let total = (seed as f64 * 0.731).fract() * 10.0;
            let kappa = (seed as f64 * 0.377).fract() * 0.999;
            let (co, cross) = depolarize(total, kappa).unwrap();
            assert_eq!(co + cross, total);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(depolarize(-1.0, 0.1).is_err());
        assert!(depolarize(1.0, 1.0).is_err());
        let mut m = brick();
        m.scattering = 1.5;
        assert!(m.validate().is_err());
        assert!(fresnel_reflectivity(&brick(), -1.0, 0.3, Polarization::Te).is_err());
        let bad_link = LinkBudget {
            r_i: 0.0,
            ..link()
        };
        assert!(bad_link.validate().is_err());
    }
}
