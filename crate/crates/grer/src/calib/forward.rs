//! Campaign geometry and the shared forward model.
//!
//! The testbed: transmitter and receiver fixed, the square material sample
//! rotating and tilting on a rotator whose vertical axis sits a small
//! offset `d` behind the sample face. At the reference orientation
//! (rotation 30 degrees, tilt 0) the sample normal bisects the two pointing
//! directions, which are 60 degrees apart, and the nominal path lengths
//! `l_tx`/`l_rx` hold exactly.
//!
//! The same forward model produces the synthetic datasets and drives the
//! calibration objectives: specular power from the image-method path with
//! Fresnel reflectivity, diffuse total power from the scattering model
//! summed over a facet grid on the sample.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{specular_point, MutPlane, Orientation, SpecularArrival};
use crate::geometry::UnitVector3;
use crate::patterns::{grer_k_pade, rer_k, ScatteringModel};
use crate::scatter::{fresnel_reflectivity, Material, Polarization};
use crate::{Error, Result};

/// Fixed distances of the measurement layout, meters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CampaignGeometry {
    pub h_tx: f64,
    pub h_rx: f64,
    pub h_mut: f64,
    pub l_rx: f64,
    pub l_tx: f64,
    pub l_mut: f64,
    pub d: f64,
}

impl Default for CampaignGeometry {
    fn default() -> Self {
        Self {
            h_tx: 1.54,
            h_rx: 1.53,
            h_mut: 1.53,
            l_rx: 1.5,
            l_tx: 0.75,
            l_mut: 0.6,
            d: 0.07,
        }
    }
}

/// Azimuth of the sample normal at the reference orientation, degrees.
const REFERENCE_ROTATION_DEG: f64 = 30.0;
/// Half of the angle between the two pointing directions, degrees.
const HALF_POINTING_ANGLE_DEG: f64 = 30.0;

impl CampaignGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("h_tx", self.h_tx),
            ("h_rx", self.h_rx),
            ("h_mut", self.h_mut),
            ("l_rx", self.l_rx),
            ("l_tx", self.l_tx),
            ("l_mut", self.l_mut),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.d >= 0.0) {
            return Err(Error::Domain(format!(
                "rotator offset must be non-negative, got {}",
                self.d
            )));
        }
        Ok(())
    }

    /// Sample normal for an orientation; tilt raises it out of the
    /// horizontal plane.
    pub fn mut_normal(&self, o: &Orientation) -> UnitVector3 {
        let rot = o.rotation_deg.to_radians();
        let tilt = o.tilt_deg.to_radians();
        UnitVector3::new(
            tilt.cos() * rot.cos(),
            tilt.cos() * rot.sin(),
            tilt.sin(),
        )
        .expect("angles produce a unit vector")
    }

    /// Sample center: the rotator axis plus the face offset along the
    /// normal.
    pub fn mut_center(&self, o: &Orientation) -> [f64; 3] {
        let n = self.mut_normal(o);
        [self.d * n.x(), self.d * n.y(), self.h_mut + self.d * n.z()]
    }

    /// The sample face as a finite plane.
    pub fn mut_plane(&self, o: &Orientation) -> Result<MutPlane> {
        MutPlane::new(self.mut_center(o), self.mut_normal(o), self.l_mut)
    }

    fn reference_center(&self) -> [f64; 3] {
        self.mut_center(&Orientation {
            rotation_deg: REFERENCE_ROTATION_DEG,
            tilt_deg: 0.0,
        })
    }

    fn antenna_position(&self, azimuth_deg: f64, distance: f64, height: f64) -> [f64; 3] {
        let c = self.reference_center();
        let dz = height - c[2];
        let horizontal = (1.0 - (dz / distance).powi(2)).sqrt();
        let az = azimuth_deg.to_radians();
        [
            c[0] + distance * horizontal * az.cos(),
            c[1] + distance * horizontal * az.sin(),
            height,
        ]
    }

    /// Transmitter position: `l_tx` from the reference sample center, on
    /// the far side of the normal bisector.
    pub fn tx_position(&self) -> [f64; 3] {
        self.antenna_position(
            REFERENCE_ROTATION_DEG + HALF_POINTING_ANGLE_DEG,
            self.l_tx,
            self.h_tx,
        )
    }

    /// Receiver position, mirror side of the bisector.
    pub fn rx_position(&self) -> [f64; 3] {
        self.antenna_position(
            REFERENCE_ROTATION_DEG - HALF_POINTING_ANGLE_DEG,
            self.l_rx,
            self.h_rx,
        )
    }

    /// Specular arrival at the receiver for an orientation, when the mirror
    /// point lands on the finite sample.
    pub fn specular_arrival(&self, o: &Orientation) -> Result<Option<SpecularArrival>> {
        let plane = self.mut_plane(o)?;
        let tx = self.tx_position();
        let rx = self.rx_position();
        // TX or RX behind the tilted sample plane means no reflection path.
        match specular_point(tx, rx, &plane) {
            Ok(Some(p)) => Ok(Some(SpecularArrival::from_points(rx, p)?)),
            Ok(None) => Ok(None),
            Err(Error::Domain(_)) | Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Everything the forward model needs besides the material itself.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForwardConfig {
    pub geometry: CampaignGeometry,
    pub freq_hz: f64,
    pub model: ScatteringModel,
    pub pol: Polarization,
    /// Facet grid resolution per side of the sample.
    pub facets_per_side: usize,
}

impl Default for ForwardConfig {
    fn default() -> Self {
        Self {
            geometry: CampaignGeometry::default(),
            freq_hz: 28.5e9,
            model: ScatteringModel::Grer,
            pol: Polarization::Te,
            facets_per_side: 24,
        }
    }
}

impl ForwardConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.freq_hz > 0.0) {
            return Err(Error::Domain(format!(
                "frequency must be positive, got {}",
                self.freq_hz
            )));
        }
        if self.facets_per_side == 0 {
            return Err(Error::Domain("facet grid cannot be empty".into()));
        }
        Ok(())
    }
}

/// Specular path geometry, independent of material.
#[derive(Debug, Clone, Copy)]
pub(super) struct SpPathGeom {
    pub theta_inc: f64,
    pub path_len: f64,
}

/// One illuminated facet: local incidence angle, geometric gain
/// `sqrt(cos_i cos_s) dS / (r_i r_s)^2`, and the lobe angle cosine.
#[derive(Debug, Clone, Copy)]
pub(super) struct FacetGeom {
    pub theta_inc: f64,
    pub gain: f64,
    pub cos_psi: f64,
}

/// Material-independent tables for one orientation.
pub(super) struct OrientationGeom {
    pub sp: Option<SpPathGeom>,
    pub facets: Vec<FacetGeom>,
}

/// Precomputes the geometry tables for every orientation.
pub(super) fn orientation_tables(
    cfg: &ForwardConfig,
    orientations: &[Orientation],
) -> Result<Vec<OrientationGeom>> {
    cfg.validate()?;
    let tx = cfg.geometry.tx_position();
    let rx = cfg.geometry.rx_position();
    let n_facets = cfg.facets_per_side;
    let ds = (cfg.geometry.l_mut / n_facets as f64).powi(2);
    let mut out = Vec::with_capacity(orientations.len());
    for o in orientations {
        let plane = cfg.geometry.mut_plane(o)?;
        let normal = plane.normal();
        let sp = match cfg.geometry.specular_arrival(o)? {
            Some(_) => {
                let p = specular_point(tx, rx, &plane)?.expect("arrival implies point");
                let di = sub(p, tx);
                let dsn = sub(rx, p);
                let ri = norm(di);
                let rs = norm(dsn);
                let cos_inc = (-dot(scale(di, 1.0 / ri), normal)).clamp(-1.0, 1.0);
                Some(SpPathGeom {
                    theta_inc: cos_inc.acos(),
                    path_len: ri + rs,
                })
            }
            None => None,
        };
        let mut facets = Vec::with_capacity(n_facets * n_facets);
        let center = plane.center();
        let (u_ax, v_ax) = (plane.u_axis(), plane.v_axis());
        for iu in 0..n_facets {
            for iv in 0..n_facets {
                let u = ((iu as f64 + 0.5) / n_facets as f64 - 0.5) * cfg.geometry.l_mut;
                let v = ((iv as f64 + 0.5) / n_facets as f64 - 0.5) * cfg.geometry.l_mut;
                let p = [
                    center[0] + u * u_ax.x() + v * v_ax.x(),
                    center[1] + u * u_ax.y() + v * v_ax.y(),
                    center[2] + u * u_ax.z() + v * v_ax.z(),
                ];
                let di = sub(p, tx);
                let dsv = sub(rx, p);
                let ri = norm(di);
                let rs = norm(dsv);
                let ki = scale(di, 1.0 / ri);
                let ks = scale(dsv, 1.0 / rs);
                let cos_i = -dot(ki, normal);
                let cos_s = dot(ks, normal);
                if cos_i <= 0.0 || cos_s <= 0.0 {
                    continue; // facet not visible from both ends
                }
                let kr = [
                    ki[0] + 2.0 * cos_i * normal.x(),
                    ki[1] + 2.0 * cos_i * normal.y(),
                    ki[2] + 2.0 * cos_i * normal.z(),
                ];
                let cos_psi = dot3(kr, ks).clamp(-1.0, 1.0);
                facets.push(FacetGeom {
                    theta_inc: cos_i.clamp(-1.0, 1.0).acos(),
                    gain: (cos_i * cos_s).sqrt() * ds / (ri * rs).powi(2),
                    cos_psi,
                });
            }
        }
        out.push(OrientationGeom { sp, facets });
    }
    Ok(out)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot(a: [f64; 3], b: UnitVector3) -> f64 {
    a[0] * b.x() + a[1] * b.y() + a[2] * b.z()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Specular received power, dB: Fresnel reflectivity over the image path.
pub(super) fn sp_power_db(geom: &SpPathGeom, material: &Material, cfg: &ForwardConfig) -> Result<f64> {
    let gamma_sq = fresnel_reflectivity(material, cfg.freq_hz, geom.theta_inc, cfg.pol)?;
    Ok(10.0 * gamma_sq.log10() - 20.0 * geom.path_len.log10())
}

/// Total co-polarized diffuse power over the facet grid, linear scale.
///
/// Per facet the power model reduces (with `F = K sqrt(cos theta_i)`) to
/// `S^2 Gamma^2 sqrt(cos_i cos_s) lobe(psi) dS / (K (r_i r_s)^2)`; the
/// depolarization split leaves `(1 - kappa)` in the co-polarized channel.
pub(super) fn ds_power_linear(
    geom: &OrientationGeom,
    gamma_sq: &[f64],
    scattering: f64,
    alpha: f64,
    kappa: f64,
    model: ScatteringModel,
) -> Result<f64> {
    let k_norm = match model {
        ScatteringModel::Grer => grer_k_pade(alpha)?,
        ScatteringModel::Rer => rer_k(alpha.round().max(1.0) as u32).value,
    };
    let mut sum = 0.0f64;
    for (f, g2) in geom.facets.iter().zip(gamma_sq) {
        let lobe = match model {
            ScatteringModel::Grer => (-alpha * (1.0 - f.cos_psi)).exp(),
            ScatteringModel::Rer => ((1.0 + f.cos_psi) / 2.0).powf(alpha.round().max(1.0)),
        };
        sum += g2 * f.gain * lobe;
    }
    Ok((1.0 - kappa) * scattering * scattering * sum / k_norm)
}

/// Measured (or synthesized) powers for one orientation; absent entries
/// mean the mechanism produced no detectable power there.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OrientationSample {
    pub orientation_index: usize,
    pub orientation: Orientation,
    pub sp_power_db: Option<f64>,
    pub ds_power_db: Option<f64>,
}

/// A synthesized measurement campaign.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthDataset {
    pub material: Material,
    pub config: ForwardConfig,
    pub noise_db: f64,
    pub seed: u64,
    pub samples: Vec<OrientationSample>,
}

/// The full rotation/tilt sweep at a given step, rotation sweeping fastest
/// starting from (-15, 0).
pub fn default_orientations(step_deg: f64) -> Vec<Orientation> {
    let mut out = Vec::new();
    let mut tilt = 0.0;
    while tilt <= 75.0 + 1e-9 {
        let mut rot = -15.0;
        while rot <= 75.0 + 1e-9 {
            out.push(Orientation {
                rotation_deg: rot,
                tilt_deg: tilt,
            });
            rot += step_deg;
        }
        tilt += step_deg;
    }
    out
}

/// Forward-simulates specular and diffuse powers for each orientation and
/// adds Gaussian dB noise; fully deterministic for a given seed.
pub fn synth_dataset(
    material: &Material,
    cfg: &ForwardConfig,
    orientations: &[Orientation],
    noise_db: f64,
    seed: u64,
) -> Result<SynthDataset> {
    material.validate()?;
    if !(noise_db >= 0.0) {
        return Err(Error::Domain(format!(
            "noise level must be non-negative, got {noise_db}"
        )));
    }
    let tables = orientation_tables(cfg, orientations)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(orientations.len());
    for (idx, (o, table)) in orientations.iter().zip(&tables).enumerate() {
        let sp = match &table.sp {
            Some(g) => Some(sp_power_db(g, material, cfg)? + noise_db * gaussian(&mut rng)),
            None => None,
        };
        let gamma_sq: Vec<f64> = table
            .facets
            .iter()
            .map(|f| fresnel_reflectivity(material, cfg.freq_hz, f.theta_inc, cfg.pol))
            .collect::<Result<_>>()?;
        let ds_lin = ds_power_linear(
            table,
            &gamma_sq,
            material.scattering,
            material.alpha_r,
            material.kappa,
            cfg.model,
        )?;
        let ds = if ds_lin > 0.0 {
            Some(10.0 * ds_lin.log10() + noise_db * gaussian(&mut rng))
        } else {
            None
        };
        samples.push(OrientationSample {
            orientation_index: idx,
            orientation: *o,
            sp_power_db: sp,
            ds_power_db: ds,
        });
    }
    Ok(SynthDataset {
        material: *material,
        config: *cfg,
        noise_db,
        seed,
        samples,
    })
}

/// Box–Muller standard normal draw; kept local so dataset generation
/// depends only on the seeded stream.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
