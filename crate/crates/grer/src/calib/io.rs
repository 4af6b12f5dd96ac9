//! File formats: the multipath-component CSV schema and the calibration
//! configuration JSON.

use std::io;

use super::{
    CalibBounds, CampaignGeometry, ClassifierConfig, MpcLabel, MpcRecord, Orientation,
    SwarmConfig,
};
use crate::{Error, Result};

/// One multipath component as stored on disk. Angles in degrees.
///
/// Schema (header required):
/// `orientation_index,rotation_deg,tilt_deg,azimuth_deg,elevation_deg,delay_ns,path_gain_db`
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MpcCsvRow {
    pub orientation_index: usize,
    pub rotation_deg: f64,
    pub tilt_deg: f64,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub delay_ns: f64,
    pub path_gain_db: f64,
}

impl MpcCsvRow {
    pub fn orientation(&self) -> Result<Orientation> {
        Orientation::new(self.rotation_deg, self.tilt_deg)
    }

    pub fn record(&self) -> Result<MpcRecord> {
        for (name, v) in [
            ("azimuth_deg", self.azimuth_deg),
            ("elevation_deg", self.elevation_deg),
            ("delay_ns", self.delay_ns),
            ("path_gain_db", self.path_gain_db),
        ] {
            if !v.is_finite() {
                return Err(Error::Parse(format!("non-finite {name}: {v}")));
            }
        }
        if self.delay_ns < 0.0 {
            return Err(Error::Parse(format!(
                "negative delay: {} ns",
                self.delay_ns
            )));
        }
        Ok(MpcRecord {
            azimuth: self.azimuth_deg.to_radians(),
            elevation: self.elevation_deg.to_radians(),
            delay_ns: self.delay_ns,
            path_gain_db: self.path_gain_db,
            orientation_index: self.orientation_index,
        })
    }
}

/// Reads the multipath CSV schema.
pub fn read_mpc_csv<R: io::Read>(reader: R) -> Result<Vec<MpcCsvRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<MpcCsvRow>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        row.orientation()?;
        row.record()?;
        out.push(row);
    }
    Ok(out)
}

/// Writes the rows back with a trailing `label` column.
pub fn write_labeled_mpc_csv<W: io::Write>(
    writer: W,
    rows: &[MpcCsvRow],
    labels: &[MpcLabel],
) -> Result<()> {
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([
        "orientation_index",
        "rotation_deg",
        "tilt_deg",
        "azimuth_deg",
        "elevation_deg",
        "delay_ns",
        "path_gain_db",
        "label",
    ])
    .map_err(|e| Error::Parse(e.to_string()))?;
    for (row, label) in rows.iter().zip(labels) {
        wtr.write_record([
            row.orientation_index.to_string(),
            row.rotation_deg.to_string(),
            row.tilt_deg.to_string(),
            row.azimuth_deg.to_string(),
            row.elevation_deg.to_string(),
            row.delay_ns.to_string(),
            row.path_gain_db.to_string(),
            match label {
                MpcLabel::Sp => "SP".to_string(),
                MpcLabel::Ds => "DS".to_string(),
            },
        ])
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

/// Calibration configuration file: bounds, swarm, classifier, geometry and
/// the shared scalars. Every field has a default, so `{}` is a valid
/// config.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CalibConfig {
    pub geometry: CampaignGeometry,
    pub classifier: ClassifierConfig,
    pub bounds: CalibBounds,
    pub swarm: SwarmConfig,
    pub seed: u64,
    pub freq_hz: f64,
    pub kappa: f64,
    pub facets_per_side: usize,
}

impl Default for CalibConfig {
    fn default() -> Self {
        Self {
            geometry: CampaignGeometry::default(),
            classifier: ClassifierConfig::default(),
            bounds: CalibBounds::default(),
            swarm: SwarmConfig::default(),
            seed: 0,
            freq_hz: 28.5e9,
            kappa: 0.074,
            facets_per_side: 24,
        }
    }
}

impl CalibConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.geometry.validate()?;
        cfg.classifier.validate()?;
        cfg.bounds.validate()?;
        cfg.swarm.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::classify_mpcs;

    const SAMPLE: &str = "\
orientation_index,rotation_deg,tilt_deg,azimuth_deg,elevation_deg,delay_ns,path_gain_db
0,30,0,12.5,-1.2,8.3,-61.0
0,30,0,14.0,0.4,9.1,-72.5
1,35,0,20.0,3.0,10.0,-80.0
";

    #[test]
    fn csv_round_trip() {
        let rows = read_mpc_csv(SAMPLE.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].orientation_index, 0);
        assert_eq!(rows[2].rotation_deg, 35.0);
        let records: Vec<_> = rows.iter().map(|r| r.record().unwrap()).collect();
        let labels = classify_mpcs(&records, None, &ClassifierConfig::default());
        let mut buf = Vec::new();
        write_labeled_mpc_csv(&mut buf, &rows, &labels).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("orientation_index,"));
        assert!(text.lines().count() == 4);
        assert!(text.contains(",DS"));
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let bad = "orientation_index,rotation_deg,tilt_deg,azimuth_deg,elevation_deg,delay_ns,path_gain_db\n0,30,0,1,1,-5,-60\n";
        assert!(read_mpc_csv(bad.as_bytes()).is_err());
        let bad2 = "orientation_index,rotation_deg,tilt_deg,azimuth_deg,elevation_deg,delay_ns,path_gain_db\n0,90,0,1,1,5,-60\n";
        assert!(read_mpc_csv(bad2.as_bytes()).is_err());
    }

    #[test]
    fn config_defaults_and_parse() {
        let cfg = CalibConfig::from_json("{}").unwrap();
        assert_eq!(cfg.geometry.l_mut, 0.6);
        assert_eq!(cfg.facets_per_side, 24);
        let cfg = CalibConfig::from_json(r#"{"seed": 9, "classifier": {"rho_m": 0.2, "pg_th_db": 8.0}}"#)
            .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.classifier.rho_m, 0.2);
        assert!(CalibConfig::from_json(r#"{"classifier": {"rho_m": -1, "pg_th_db": 8}}"#).is_err());
    }
}
