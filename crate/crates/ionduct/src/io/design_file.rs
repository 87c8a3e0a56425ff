//! The JSON design file: one thruster design plus optional calibration,
//! medium overrides, and provenance.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibrate::CalibrationParams;
use crate::geometry::{EmitterRing, StageGeometry};
use crate::physics::FluidMedium;
use crate::stack::ThrusterDesign;

use super::blocks::{RawCalibration, RawCollector, RawMedium};
use super::{units, IoError, SCHEMA_VERSION};

/// In-memory form of a design file.
///
/// The JSON design block carries geometry only; the corona model lives in
/// the calibration block, and on load the design's corona is synced from
/// it (or left at the default when the block is absent).
#[derive(Clone, Debug, PartialEq)]
pub struct DesignFile {
    pub design: ThrusterDesign,
    pub calibration: Option<CalibrationParams>,
    pub medium: FluidMedium,
    pub provenance: Option<String>,
}

impl DesignFile {
    pub fn new(design: ThrusterDesign) -> Self {
        Self {
            design,
            calibration: None,
            medium: FluidMedium::default(),
            provenance: None,
        }
    }

    /// The calibration analyses should run with: the stored block, or
    /// defaults built around the design's own corona model.
    pub fn effective_calibration(&self) -> CalibrationParams {
        self.calibration.clone().unwrap_or_else(|| CalibrationParams {
            corona: self.design.corona,
            ..CalibrationParams::default()
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, IoError> {
        let raw: RawDesignFile = serde_json::from_str(text)
            .map_err(|e| IoError::Schema(format!("design file: {e}")))?;
        raw.resolve()
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&RawDesignFile::from_file(self))
            .expect("validated design files serialize");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        Self::from_json_str(&super::read_file(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        super::write_file(path, &self.to_json_string())
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawEmitter {
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_diameter_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner_diameter_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outer_diameter_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outer_diameter_mm: Option<f64>,
    tip_count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    tip_angle_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bend_depth_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bend_depth_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aspect_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_height_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_height_mm: Option<f64>,
}

impl RawEmitter {
    fn resolve(self) -> Result<EmitterRing, IoError> {
        let defaults = (
            crate::geometry::EmitterRing::DEFAULT_TIP_ANGLE_DEG,
            crate::geometry::EmitterRing::DEFAULT_BEND_DEPTH,
        );
        let outer =
            units::length("outer_diameter", self.outer_diameter_m, self.outer_diameter_mm, None)?;
        Ok(EmitterRing {
            inner_diameter: units::length(
                "inner_diameter",
                self.inner_diameter_m,
                self.inner_diameter_mm,
                None,
            )?,
            outer_diameter: outer,
            tip_count: self.tip_count,
            tip_angle_deg: self.tip_angle_deg.unwrap_or(defaults.0),
            bend_depth: units::length("bend_depth", self.bend_depth_m, self.bend_depth_mm, Some(defaults.1))?,
            aspect_ratio: self.aspect_ratio.unwrap_or(1.0),
            duct_height: units::length(
                "duct_height",
                self.duct_height_m,
                self.duct_height_mm,
                Some(outer),
            )?,
        })
    }

    fn from_ring(e: &EmitterRing) -> Self {
        Self {
            inner_diameter_m: Some(e.inner_diameter),
            inner_diameter_mm: None,
            outer_diameter_m: Some(e.outer_diameter),
            outer_diameter_mm: None,
            tip_count: e.tip_count,
            tip_angle_deg: Some(e.tip_angle_deg),
            bend_depth_m: Some(e.bend_depth),
            bend_depth_mm: None,
            aspect_ratio: Some(e.aspect_ratio),
            duct_height_m: Some(e.duct_height),
            duct_height_mm: None,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawStage {
    emitter: RawEmitter,
    #[serde(skip_serializing_if = "Option::is_none")]
    collector: Option<RawCollector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_inner_height_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_inner_height_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_inner_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_inner_width_mm: Option<f64>,
}

impl RawStage {
    pub fn resolve(self) -> Result<StageGeometry, IoError> {
        let emitter = self.emitter.resolve()?;
        let collector = self.collector.unwrap_or_default().resolve()?;
        let height = units::length(
            "duct_inner_height",
            self.duct_inner_height_m,
            self.duct_inner_height_mm,
            Some(emitter.duct_height),
        )?;
        let width = units::length(
            "duct_inner_width",
            self.duct_inner_width_m,
            self.duct_inner_width_mm,
            Some(height * emitter.aspect_ratio),
        )?;
        Ok(StageGeometry {
            emitter,
            collector,
            gap: units::length("gap", self.gap_m, self.gap_mm, Some(crate::geometry::StageGeometry::DEFAULT_GAP))?,
            duct_inner_height: height,
            duct_inner_width: width,
        })
    }

    pub fn from_stage(s: &StageGeometry) -> Self {
        Self {
            emitter: RawEmitter::from_ring(&s.emitter),
            collector: Some(RawCollector::from_grid(&s.collector)),
            gap_m: Some(s.gap),
            gap_mm: None,
            duct_inner_height_m: Some(s.duct_inner_height),
            duct_inner_height_mm: None,
            duct_inner_width_m: Some(s.duct_inner_width),
            duct_inner_width_mm: None,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawDesign {
    stage: RawStage,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage_count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interstage_factor: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawDesignFile {
    schema_version: Option<u32>,
    design: RawDesign,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<RawCalibration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    medium: Option<RawMedium>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

impl RawDesignFile {
    fn resolve(self) -> Result<DesignFile, IoError> {
        super::check_schema_version(self.schema_version)?;
        let calibration = self.calibration.map(RawCalibration::resolve).transpose()?;
        let medium = self.medium.unwrap_or_default().resolve()?;
        let design = ThrusterDesign {
            stage: self.design.stage.resolve()?,
            stage_count: self.design.stage_count.unwrap_or(1),
            interstage_factor: self
                .design
                .interstage_factor
                .unwrap_or(ThrusterDesign::DEFAULT_INTERSTAGE_FACTOR),
            corona: calibration
                .as_ref()
                .map(|c| c.corona)
                .unwrap_or_default(),
        };
        design
            .validate()
            .map_err(|e| IoError::Schema(format!("design: {e}")))?;
        Ok(DesignFile {
            design,
            calibration,
            medium,
            provenance: self.provenance,
        })
    }

    fn from_file(f: &DesignFile) -> Self {
        Self {
            schema_version: Some(SCHEMA_VERSION),
            design: RawDesign {
                stage: RawStage::from_stage(&f.design.stage),
                stage_count: Some(f.design.stage_count),
                interstage_factor: Some(f.design.interstage_factor),
            },
            calibration: f.calibration.as_ref().map(RawCalibration::from_params),
            medium: Some(RawMedium::from_medium(&f.medium)),
            provenance: f.provenance.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CollectorGrid;
    use crate::physics::CoronaModel;
    use crate::stack::StageDegradation;

    fn demo_file() -> DesignFile {
        let emitter = EmitterRing::new(4e-3, 6e-3, 20, 5.0, 6e-3).unwrap();
        let stage = StageGeometry::new(emitter, CollectorGrid::default(), 2e-3).unwrap();
        let corona = CoronaModel {
            conductance_coeff: 3.509499390287516e-11,
            onset_voltage: 2.4e3,
            thrust_effectiveness: 0.61008,
        };
        DesignFile {
            design: ThrusterDesign {
                stage,
                stage_count: 5,
                interstage_factor: 1.5,
                corona,
            },
            calibration: Some(CalibrationParams {
                corona,
                degradation: StageDegradation::default(),
                onset_wall_coeff: 0.0,
                onset_tip_coeff: 0.0,
                ion_mobility_override: None,
            }),
            medium: FluidMedium::default(),
            provenance: Some("demo".into()),
        }
    }

    #[test]
    fn round_trip_preserves_every_field() {
        let file = demo_file();
        let text = file.to_json_string();
        let back = DesignFile::from_json_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn millimeter_and_kilovolt_spellings_load_identically() {
        let si = r#"{
            "schema_version": 1,
            "design": {
                "stage": {
                    "emitter": {
                        "inner_diameter_m": 0.004,
                        "outer_diameter_m": 0.006,
                        "tip_count": 20,
                        "aspect_ratio": 5.0
                    },
                    "gap_m": 0.002
                },
                "stage_count": 5
            },
            "calibration": { "onset_voltage_v": 2400.0 }
        }"#;
        let mm = r#"{
            "schema_version": 1,
            "design": {
                "stage": {
                    "emitter": {
                        "inner_diameter_mm": 4.0,
                        "outer_diameter_mm": 6.0,
                        "tip_count": 20,
                        "aspect_ratio": 5.0
                    },
                    "gap_mm": 2.0
                },
                "stage_count": 5
            },
            "calibration": { "onset_voltage_kv": 2.4 }
        }"#;
        let a = DesignFile::from_json_str(si).unwrap();
        let b = DesignFile::from_json_str(mm).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.design.stage.emitter.tip_count, 20);
        assert_eq!(a.design.stage.duct_inner_width, 0.03);
        assert_eq!(a.design.corona.onset_voltage, 2400.0);
        // Minimal file: defaults fill the collector, bend, angle, medium.
        assert_eq!(a.design.stage.collector, CollectorGrid::default());
        assert_eq!(a.medium, FluidMedium::default());
        // No explicit slopes in the block: the defaults apply.
        let calib = a.effective_calibration();
        assert!(calib.onset_wall_coeff > 0.0);
    }

    #[test]
    fn duplicate_units_unknown_fields_and_versions_are_rejected() {
        let both_units = r#"{
            "schema_version": 1,
            "design": { "stage": { "emitter": {
                "inner_diameter_m": 0.004, "inner_diameter_mm": 4.0,
                "outer_diameter_m": 0.006, "tip_count": 3
            } } }
        }"#;
        assert!(matches!(
            DesignFile::from_json_str(both_units),
            Err(IoError::Schema(_))
        ));

        let unknown = r#"{
            "schema_version": 1,
            "design": { "stage": { "emitter": {
                "inner_diameter_m": 0.004, "outer_diameter_m": 0.006,
                "tip_count": 3, "tipcount": 4
            } } }
        }"#;
        assert!(matches!(
            DesignFile::from_json_str(unknown),
            Err(IoError::Schema(_))
        ));

        let bad_version = r#"{ "schema_version": 2, "design": { "stage": { "emitter": {
            "inner_diameter_m": 0.004, "outer_diameter_m": 0.006, "tip_count": 3 } } } }"#;
        assert!(matches!(
            DesignFile::from_json_str(bad_version),
            Err(IoError::Schema(_))
        ));

        let no_version = r#"{ "design": { "stage": { "emitter": {
            "inner_diameter_m": 0.004, "outer_diameter_m": 0.006, "tip_count": 3 } } } }"#;
        assert!(matches!(
            DesignFile::from_json_str(no_version),
            Err(IoError::Schema(_))
        ));
    }

    #[test]
    fn structurally_invalid_designs_are_schema_errors() {
        // Aspect ratio 5 demands 20 tips; 12 contradicts it.
        let text = r#"{
            "schema_version": 1,
            "design": { "stage": { "emitter": {
                "inner_diameter_m": 0.004, "outer_diameter_m": 0.006,
                "tip_count": 12, "aspect_ratio": 5.0
            } } }
        }"#;
        assert!(matches!(
            DesignFile::from_json_str(text),
            Err(IoError::Schema(_))
        ));
    }

    #[test]
    fn corona_defaults_when_no_calibration_block() {
        let text = r#"{
            "schema_version": 1,
            "design": { "stage": { "emitter": {
                "inner_diameter_m": 0.004, "outer_diameter_m": 0.006, "tip_count": 3
            } } }
        }"#;
        let f = DesignFile::from_json_str(text).unwrap();
        assert_eq!(f.design.corona, CoronaModel::default());
        assert_eq!(f.calibration, None);
        assert_eq!(
            f.effective_calibration().corona,
            CoronaModel::default()
        );
    }
}
