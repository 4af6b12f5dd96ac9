//! Direction vectors, angle conventions, and the lobe angle.
//!
//! Conventions: the surface element lies in the `z = 0` plane with normal
//! `+z`. The incident wavevector `k_i` is the *propagation* direction, so it
//! points downward (`k_i.z < 0`); the scattering direction `k_s` points into
//! the upper hemisphere. The specular direction is the reflection of `k_i`
//! about the normal, and the lobe angle `psi` separates it from `k_s`.

use crate::{Error, Result};

/// How far from unit norm a vector may be before construction fails; inside
/// the band it is renormalized silently.
const UNIT_NORM_SLACK: f64 = 1e-9;

/// A three-component direction with unit Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    /// Builds a unit vector, renormalizing silently when the input norm is
    /// within `1e-9` of one and rejecting it otherwise.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !((norm - 1.0).abs() <= UNIT_NORM_SLACK) {
            return Err(Error::Domain(format!(
                "vector ({x}, {y}, {z}) has norm {norm}, expected 1 within {UNIT_NORM_SLACK:e}"
            )));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate(format!(
                "cannot normalize vector ({x}, {y}, {z})"
            )));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// The surface normal `+z`.
    pub fn z_axis() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Squared Euclidean distance to another unit vector.
    pub fn distance_sq(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }
}

/// Reflection of the propagation direction `k_i` about `normal`:
/// `k_i - 2 (k_i . normal) normal`.
///
/// Requires `k_i . normal < 0` (the ray travels toward the surface).
pub fn specular_reflect(k_i: UnitVector3, normal: UnitVector3) -> Result<UnitVector3> {
    let c = k_i.dot(&normal);
    if c >= 0.0 {
        return Err(Error::Degenerate(format!(
            "incident direction does not point toward the surface (k_i . n = {c})"
        )));
    }
    UnitVector3::new(
        k_i.x - 2.0 * c * normal.x,
        k_i.y - 2.0 * c * normal.y,
        k_i.z - 2.0 * c * normal.z,
    )
}

/// One incidence/scattering configuration over the `z = 0` surface element,
/// with the derived specular direction and lobe angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterGeometry {
    theta_i: f64,
    phi_i: f64,
    theta_s: f64,
    phi_s: f64,
    k_i: UnitVector3,
    k_s: UnitVector3,
    k_r: UnitVector3,
    cos_psi: f64,
}

impl ScatterGeometry {
    /// Builds the geometry from angles in radians.
    ///
    /// Domain: `0 <= theta_i < pi/2` (grazing incidence excluded) and
    /// `0 <= theta_s <= pi/2`.
    pub fn from_angles(theta_i: f64, phi_i: f64, theta_s: f64, phi_s: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta_i) {
            return Err(Error::Domain(format!(
                "theta_i must lie in [0, pi/2), got {theta_i}"
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta_s) {
            return Err(Error::Domain(format!(
                "theta_s must lie in [0, pi/2], got {theta_s}"
            )));
        }
        if !phi_i.is_finite() || !phi_s.is_finite() {
            return Err(Error::Domain("azimuths must be finite".into()));
        }
        let k_i = UnitVector3::new(
            theta_i.sin() * phi_i.cos(),
            theta_i.sin() * phi_i.sin(),
            -theta_i.cos(),
        )?;
        let k_s = UnitVector3::new(
            theta_s.sin() * phi_s.cos(),
            theta_s.sin() * phi_s.sin(),
            theta_s.cos(),
        )?;
        let k_r = specular_reflect(k_i, UnitVector3::z_axis())?;
        // 1 - |k_r - k_s|^2 / 2 rather than the dot product: at the specular
        // configuration the difference vector is exactly zero, so cos_psi is
        // exactly one, and the form is well conditioned near the peak.
        let cos_psi = (1.0 - 0.5 * k_r.distance_sq(&k_s)).clamp(-1.0, 1.0);
        Ok(Self {
            theta_i,
            phi_i,
            theta_s,
            phi_s,
            k_i,
            k_s,
            k_r,
            cos_psi,
        })
    }

    /// Same as [`from_angles`](Self::from_angles) with angles in degrees.
    pub fn from_degrees(theta_i: f64, phi_i: f64, theta_s: f64, phi_s: f64) -> Result<Self> {
        Self::from_angles(
            theta_i.to_radians(),
            phi_i.to_radians(),
            theta_s.to_radians(),
            phi_s.to_radians(),
        )
    }

    /// The geometry with incidence and observation roles interchanged.
    /// Fails if `theta_s = pi/2` exactly, which is not a valid incidence.
    pub fn swapped(&self) -> Result<Self> {
        Self::from_angles(self.theta_s, self.phi_s, self.theta_i, self.phi_i)
    }

    pub fn theta_i(&self) -> f64 {
        self.theta_i
    }

    pub fn phi_i(&self) -> f64 {
        self.phi_i
    }

    pub fn theta_s(&self) -> f64 {
        self.theta_s
    }

    pub fn phi_s(&self) -> f64 {
        self.phi_s
    }

    pub fn k_i(&self) -> UnitVector3 {
        self.k_i
    }

    pub fn k_s(&self) -> UnitVector3 {
        self.k_s
    }

    /// The specular reflection direction.
    pub fn k_r(&self) -> UnitVector3 {
        self.k_r
    }

    /// Cosine of the angle between the specular and scattering directions.
    pub fn cos_psi(&self) -> f64 {
        self.cos_psi
    }
}
