//! Multipath-component classification and model calibration.
//!
//! The measured side of the pipeline: split multipath components into
//! specular and diffuse clusters, compare predicted and measured powers in
//! dB, and estimate material parameters with a deterministic two-stage
//! particle-swarm fit. A synthetic dataset generator stands in for the
//! (non-public) measurement campaign; generator and fitter share only the
//! forward model, which makes zero-noise round trips an end-to-end oracle
//! for the whole chain.

mod forward;
mod io;
mod pso;

pub use forward::{
    default_orientations, synth_dataset, CampaignGeometry, ForwardConfig, OrientationSample,
    SynthDataset,
};
pub use io::{read_mpc_csv, write_labeled_mpc_csv, CalibConfig, MpcCsvRow};
pub use pso::{pso_fit, FitResult, SwarmConfig};

use crate::geometry::UnitVector3;
use crate::{Error, Result};

/// One rotator setting of the material under test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Orientation {
    /// Azimuth rotation, degrees in `[-15, 75]`.
    pub rotation_deg: f64,
    /// Elevation tilt, degrees in `[0, 75]`.
    pub tilt_deg: f64,
}

impl Orientation {
    pub fn new(rotation_deg: f64, tilt_deg: f64) -> Result<Self> {
        if !(-15.0..=75.0).contains(&rotation_deg) {
            return Err(Error::Domain(format!(
                "rotation must lie in [-15, 75] degrees, got {rotation_deg}"
            )));
        }
        if !(0.0..=75.0).contains(&tilt_deg) {
            return Err(Error::Domain(format!(
                "tilt must lie in [0, 75] degrees, got {tilt_deg}"
            )));
        }
        Ok(Self {
            rotation_deg,
            tilt_deg,
        })
    }
}

/// One resolved multipath component: arrival direction at the receiver,
/// delay, and path gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpcRecord {
    /// Arrival azimuth, radians.
    pub azimuth: f64,
    /// Arrival elevation, radians.
    pub elevation: f64,
    /// Propagation delay, ns.
    pub delay_ns: f64,
    /// Path gain, dB.
    pub path_gain_db: f64,
    /// Index into the orientation list this component was measured at.
    pub orientation_index: usize,
}

/// Specular/diffuse decision for one multipath component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MpcLabel {
    Sp,
    Ds,
}

/// Classifier thresholds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassifierConfig {
    /// Radius of the specular region on the surface, meters. Converted to
    /// an angular cone at the receiver via the range to the specular point.
    pub rho_m: f64,
    /// Path-gain acceptance threshold below the strongest in-region
    /// component, dB.
    pub pg_th_db: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            rho_m: 0.15,
            pg_th_db: 6.0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_m > 0.0) || !(self.pg_th_db > 0.0) {
            return Err(Error::Domain(format!(
                "classifier thresholds must be positive, got rho = {}, pg_th = {}",
                self.rho_m, self.pg_th_db
            )));
        }
        Ok(())
    }
}

/// Search box for the calibration parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CalibBounds {
    pub s: (f64, f64),
    pub eps_r: (f64, f64),
    pub sigma: (f64, f64),
    pub alpha_r: (f64, f64),
}

impl Default for CalibBounds {
    fn default() -> Self {
        Self {
            s: (0.0, 1.0),
            eps_r: (1.0, 10.0),
            sigma: (0.0, 0.5),
            alpha_r: (1.0, 100.0),
        }
    }
}

impl CalibBounds {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("s", self.s),
            ("eps_r", self.eps_r),
            ("sigma", self.sigma),
            ("alpha_r", self.alpha_r),
        ] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBounds(format!("{name}: [{lo}, {hi}]")));
            }
        }
        if self.s.0 < 0.0 || self.s.1 > 1.0 {
            return Err(Error::InvalidBounds(format!(
                "s bounds must lie within [0, 1], got [{}, {}]",
                self.s.0, self.s.1
            )));
        }
        Ok(())
    }
}

/// A finite square surface element: the material under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutPlane {
    center: [f64; 3],
    normal: UnitVector3,
    u_axis: UnitVector3,
    v_axis: UnitVector3,
    side: f64,
}

impl MutPlane {
    /// Builds the plane with in-plane axes derived from the normal (the
    /// `u` axis is horizontal).
    pub fn new(center: [f64; 3], normal: UnitVector3, side: f64) -> Result<Self> {
        if !(side > 0.0) {
            return Err(Error::Domain(format!("side must be positive, got {side}")));
        }
        // u = z x n, falling back to x x n when the normal is vertical.
        let (ux, uy, uz) = if normal.z().abs() < 0.999 {
            (-normal.y(), normal.x(), 0.0)
        } else {
            (0.0, normal.z(), -normal.y())
        };
        let u_axis = UnitVector3::normalized(ux, uy, uz)?;
        let v_axis = UnitVector3::normalized(
            normal.y() * u_axis.z() - normal.z() * u_axis.y(),
            normal.z() * u_axis.x() - normal.x() * u_axis.z(),
            normal.x() * u_axis.y() - normal.y() * u_axis.x(),
        )?;
        Ok(Self {
            center,
            normal,
            u_axis,
            v_axis,
            side,
        })
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn normal(&self) -> UnitVector3 {
        self.normal
    }

    pub fn u_axis(&self) -> UnitVector3 {
        self.u_axis
    }

    pub fn v_axis(&self) -> UnitVector3 {
        self.v_axis
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    fn signed_height(&self, p: [f64; 3]) -> f64 {
        (p[0] - self.center[0]) * self.normal.x()
            + (p[1] - self.center[1]) * self.normal.y()
            + (p[2] - self.center[2]) * self.normal.z()
    }
}

/// Image-method specular reflection point of the `tx -> surface -> rx`
/// path. Returns `None` when the mirror point falls outside the finite
/// square; errors when an endpoint lies on the plane or the endpoints are
/// on opposite sides.
pub fn specular_point(tx: [f64; 3], rx: [f64; 3], surface: &MutPlane) -> Result<Option<[f64; 3]>> {
    let h_tx = surface.signed_height(tx);
    let h_rx = surface.signed_height(rx);
    if h_tx.abs() < 1e-12 || h_rx.abs() < 1e-12 {
        return Err(Error::Degenerate(
            "endpoint lies on the surface plane".into(),
        ));
    }
    if h_tx * h_rx < 0.0 {
        return Err(Error::Domain(
            "endpoints must lie strictly on the same side of the surface".into(),
        ));
    }
    // Mirror tx across the plane; the image line crosses at t in (0, 1).
    let t = h_tx / (h_tx + h_rx);
    let mirrored = [
        tx[0] - 2.0 * h_tx * surface.normal.x(),
        tx[1] - 2.0 * h_tx * surface.normal.y(),
        tx[2] - 2.0 * h_tx * surface.normal.z(),
    ];
    let p = [
        mirrored[0] + t * (rx[0] - mirrored[0]),
        mirrored[1] + t * (rx[1] - mirrored[1]),
        mirrored[2] + t * (rx[2] - mirrored[2]),
    ];
    let du = (p[0] - surface.center[0]) * surface.u_axis.x()
        + (p[1] - surface.center[1]) * surface.u_axis.y()
        + (p[2] - surface.center[2]) * surface.u_axis.z();
    let dv = (p[0] - surface.center[0]) * surface.v_axis.x()
        + (p[1] - surface.center[1]) * surface.v_axis.y()
        + (p[2] - surface.center[2]) * surface.v_axis.z();
    let half = surface.side / 2.0;
    if du.abs() <= half && dv.abs() <= half {
        Ok(Some(p))
    } else {
        Ok(None)
    }
}

/// The specular arrival as seen from the receiver: direction plus range,
/// which together define the angular acceptance cone of the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecularArrival {
    pub direction: UnitVector3,
    pub range_m: f64,
}

impl SpecularArrival {
    /// Arrival looking from `rx` toward `point`.
    pub fn from_points(rx: [f64; 3], point: [f64; 3]) -> Result<Self> {
        let d = [point[0] - rx[0], point[1] - rx[1], point[2] - rx[2]];
        let range = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if range == 0.0 {
            return Err(Error::Degenerate("zero-range specular arrival".into()));
        }
        Ok(Self {
            direction: UnitVector3::normalized(d[0], d[1], d[2])?,
            range_m: range,
        })
    }
}

fn arrival_direction(azimuth: f64, elevation: f64) -> Result<UnitVector3> {
    UnitVector3::normalized(
        elevation.cos() * azimuth.cos(),
        elevation.cos() * azimuth.sin(),
        elevation.sin(),
    )
}

/// Three-step specular/diffuse rule: find the strongest component inside
/// the acceptance cone around the specular arrival, then label as specular
/// every in-cone component within `pg_th` dB of it; everything else is
/// diffuse. With no specular arrival (the mirror point missed the finite
/// surface) every component is diffuse.
pub fn classify_mpcs(
    mpcs: &[MpcRecord],
    specular: Option<&SpecularArrival>,
    cfg: &ClassifierConfig,
) -> Vec<MpcLabel> {
    let Some(spec) = specular else {
        return vec![MpcLabel::Ds; mpcs.len()];
    };
    if cfg.validate().is_err() {
        return vec![MpcLabel::Ds; mpcs.len()];
    }
    let cone_half_angle = (cfg.rho_m / spec.range_m).atan();
    let inside: Vec<bool> = mpcs
        .iter()
        .map(|m| {
            arrival_direction(m.azimuth, m.elevation)
                .map(|v| v.dot(&spec.direction).clamp(-1.0, 1.0).acos() <= cone_half_angle)
                .unwrap_or(false)
        })
        .collect();
    let pg_max = mpcs
        .iter()
        .zip(&inside)
        .filter(|(_, &i)| i)
        .map(|(m, _)| m.path_gain_db)
        .fold(f64::NEG_INFINITY, f64::max);
    if pg_max == f64::NEG_INFINITY {
        return vec![MpcLabel::Ds; mpcs.len()];
    }
    mpcs.iter()
        .zip(&inside)
        .map(|(m, &i)| {
            if i && pg_max - m.path_gain_db < cfg.pg_th_db {
                MpcLabel::Sp
            } else {
                MpcLabel::Ds
            }
        })
        .collect()
}

/// Root-mean-square difference of two dB series.
pub fn rmse_db(predicted_db: &[f64], measured_db: &[f64]) -> Result<f64> {
    if predicted_db.len() != measured_db.len() {
        return Err(Error::LengthMismatch {
            left: predicted_db.len(),
            right: measured_db.len(),
        });
    }
    if predicted_db.is_empty() {
        return Err(Error::EmptyDataset("rmse of empty series".into()));
    }
    let sum_sq: f64 = predicted_db
        .iter()
        .zip(measured_db)
        .map(|(p, m)| (p - m) * (p - m))
        .sum();
    Ok((sum_sq / predicted_db.len() as f64).sqrt())
}

/// Relative RMSE: `rmse_rer - rmse_grer`; positive values mean the
/// Gaussian model fits better.
pub fn rrmse_db(rmse_rer: f64, rmse_grer: f64) -> f64 {
    rmse_rer - rmse_grer
}

/// Centered moving average with symmetrically shrunken windows at the
/// edges. The window must be odd and no longer than the series.
pub fn sliding_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::Domain(format!(
            "window must be odd and positive, got {window}"
        )));
    }
    if window > series.len() {
        return Err(Error::Domain(format!(
            "window {window} longer than series of length {}",
            series.len()
        )));
    }
    let half = window / 2;
    let n = series.len();
    Ok((0..n)
        .map(|i| {
            let radius = half.min(i).min(n - 1 - i);
            let slice = &series[i - radius..=i + radius];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}
