//! The JSON design-space file consumed by the optimizer.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibrate::CalibrationParams;
use crate::optimize::DesignSpace;
use crate::physics::FluidMedium;

use super::blocks::{RawCalibration, RawCollector, RawMedium};
use super::{units, IoError, SCHEMA_VERSION};

/// In-memory form of a space file. Every axis and build parameter is
/// optional in the JSON; absent ones take the [`DesignSpace`] defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceFile {
    pub space: DesignSpace,
    pub calibration: Option<CalibrationParams>,
    pub medium: FluidMedium,
    pub provenance: Option<String>,
}

impl SpaceFile {
    pub fn new(space: DesignSpace) -> Self {
        Self {
            space,
            calibration: None,
            medium: FluidMedium::default(),
            provenance: None,
        }
    }

    pub fn effective_calibration(&self) -> CalibrationParams {
        self.calibration.clone().unwrap_or_default()
    }

    pub fn from_json_str(text: &str) -> Result<Self, IoError> {
        let raw: RawSpaceFile = serde_json::from_str(text)
            .map_err(|e| IoError::Schema(format!("space file: {e}")))?;
        raw.resolve()
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&RawSpaceFile::from_file(self))
            .expect("validated space files serialize");
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

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    #[serde(skip_serializing_if = "Option::is_none")]
    aspect_ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage_counts: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tip_counts: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaps_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaps_mm: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interstage_factors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    voltage_range_v: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    voltage_range_kv: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_height_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duct_height_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lateral_clearance_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lateral_clearance_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bend_depth_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bend_depth_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tip_angle_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    collector: Option<RawCollector>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSpaceFile {
    schema_version: Option<u32>,
    space: RawSpace,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<RawCalibration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    medium: Option<RawMedium>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

impl RawSpaceFile {
    fn resolve(self) -> Result<SpaceFile, IoError> {
        super::check_schema_version(self.schema_version)?;
        let d = DesignSpace::default();
        let raw = self.space;
        let space = DesignSpace {
            aspect_ratios: raw.aspect_ratios.unwrap_or(d.aspect_ratios),
            stage_counts: raw.stage_counts.unwrap_or(d.stage_counts),
            tip_counts: raw.tip_counts.unwrap_or(d.tip_counts),
            gaps: units::length_list("gaps", raw.gaps_m, raw.gaps_mm, d.gaps)?,
            interstage_factors: raw.interstage_factors.unwrap_or(d.interstage_factors),
            voltage_range: units::voltage_range(
                "voltage_range",
                raw.voltage_range_v,
                raw.voltage_range_kv,
                d.voltage_range,
            )?,
            duct_height: units::length(
                "duct_height",
                raw.duct_height_m,
                raw.duct_height_mm,
                Some(d.duct_height),
            )?,
            lateral_clearance: units::length(
                "lateral_clearance",
                raw.lateral_clearance_m,
                raw.lateral_clearance_mm,
                Some(d.lateral_clearance),
            )?,
            bend_depth: units::length(
                "bend_depth",
                raw.bend_depth_m,
                raw.bend_depth_mm,
                Some(d.bend_depth),
            )?,
            tip_angle_deg: raw.tip_angle_deg.unwrap_or(d.tip_angle_deg),
            collector: raw.collector.unwrap_or_default().resolve()?,
        };
        space
            .validate()
            .map_err(|e| IoError::Schema(format!("space: {e}")))?;
        Ok(SpaceFile {
            space,
            calibration: self.calibration.map(RawCalibration::resolve).transpose()?,
            medium: self.medium.unwrap_or_default().resolve()?,
            provenance: self.provenance,
        })
    }

    fn from_file(f: &SpaceFile) -> Self {
        Self {
            schema_version: Some(SCHEMA_VERSION),
            space: RawSpace {
                aspect_ratios: Some(f.space.aspect_ratios.clone()),
                stage_counts: Some(f.space.stage_counts.clone()),
                tip_counts: Some(f.space.tip_counts.clone()),
                gaps_m: Some(f.space.gaps.clone()),
                gaps_mm: None,
                interstage_factors: Some(f.space.interstage_factors.clone()),
                voltage_range_v: Some([f.space.voltage_range.0, f.space.voltage_range.1]),
                voltage_range_kv: None,
                duct_height_m: Some(f.space.duct_height),
                duct_height_mm: None,
                lateral_clearance_m: Some(f.space.lateral_clearance),
                lateral_clearance_mm: None,
                bend_depth_m: Some(f.space.bend_depth),
                bend_depth_mm: None,
                tip_angle_deg: Some(f.space.tip_angle_deg),
                collector: Some(RawCollector::from_grid(&f.space.collector)),
            },
            calibration: f.calibration.as_ref().map(RawCalibration::from_params),
            medium: Some(RawMedium::from_medium(&f.medium)),
            provenance: f.provenance.clone(),
        }
    }
}
