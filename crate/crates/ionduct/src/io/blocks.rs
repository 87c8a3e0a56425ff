//! Raw serde blocks shared by the design and space file formats.

use serde::{Deserialize, Serialize};

use crate::calibrate::CalibrationParams;
use crate::geometry::CollectorGrid;
use crate::physics::{CoronaModel, FluidMedium};
use crate::stack::StageDegradation;

use super::{units, IoError};

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawCalibration {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conductance_coeff_a_per_v2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_voltage_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_voltage_kv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thrust_effectiveness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degradation_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_wall_coeff_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_tip_coeff_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ion_mobility_override_m2_per_vs: Option<f64>,
}

impl RawCalibration {
    pub fn resolve(self) -> Result<CalibrationParams, IoError> {
        let defaults = CalibrationParams::default();
        let params = CalibrationParams {
            corona: CoronaModel {
                conductance_coeff: self
                    .conductance_coeff_a_per_v2
                    .unwrap_or(defaults.corona.conductance_coeff),
                onset_voltage: units::voltage(
                    "onset_voltage",
                    self.onset_voltage_v,
                    self.onset_voltage_kv,
                    Some(defaults.corona.onset_voltage),
                )?,
                thrust_effectiveness: self
                    .thrust_effectiveness
                    .unwrap_or(defaults.corona.thrust_effectiveness),
            },
            degradation: StageDegradation {
                factor: self
                    .degradation_factor
                    .unwrap_or(defaults.degradation.factor),
            },
            onset_wall_coeff: self.onset_wall_coeff_v.unwrap_or(defaults.onset_wall_coeff),
            onset_tip_coeff: self.onset_tip_coeff_v.unwrap_or(defaults.onset_tip_coeff),
            ion_mobility_override: self.ion_mobility_override_m2_per_vs,
        };
        params
            .validate()
            .map_err(|e| IoError::Schema(format!("calibration: {e}")))?;
        Ok(params)
    }

    pub fn from_params(p: &CalibrationParams) -> Self {
        Self {
            conductance_coeff_a_per_v2: Some(p.corona.conductance_coeff),
            onset_voltage_v: Some(p.corona.onset_voltage),
            onset_voltage_kv: None,
            thrust_effectiveness: Some(p.corona.thrust_effectiveness),
            degradation_factor: Some(p.degradation.factor),
            onset_wall_coeff_v: Some(p.onset_wall_coeff),
            onset_tip_coeff_v: Some(p.onset_tip_coeff),
            ion_mobility_override_m2_per_vs: p.ion_mobility_override,
        }
    }
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawMedium {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ion_mobility_m2_per_vs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permittivity_f_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_kg_per_m3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kinematic_viscosity_m2_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown_field_v_per_m: Option<f64>,
}

impl RawMedium {
    pub fn resolve(self) -> Result<FluidMedium, IoError> {
        let d = FluidMedium::default();
        let medium = FluidMedium {
            ion_mobility: self.ion_mobility_m2_per_vs.unwrap_or(d.ion_mobility),
            permittivity: self.permittivity_f_per_m.unwrap_or(d.permittivity),
            density: self.density_kg_per_m3.unwrap_or(d.density),
            kinematic_viscosity: self
                .kinematic_viscosity_m2_per_s
                .unwrap_or(d.kinematic_viscosity),
            breakdown_field: self.breakdown_field_v_per_m.unwrap_or(d.breakdown_field),
        };
        medium
            .validate()
            .map_err(|e| IoError::Schema(format!("medium: {e}")))?;
        Ok(medium)
    }

    pub fn from_medium(m: &FluidMedium) -> Self {
        Self {
            ion_mobility_m2_per_vs: Some(m.ion_mobility),
            permittivity_f_per_m: Some(m.permittivity),
            density_kg_per_m3: Some(m.density),
            kinematic_viscosity_m2_per_s: Some(m.kinematic_viscosity),
            breakdown_field_v_per_m: Some(m.breakdown_field),
        }
    }
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawCollector {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wire_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wire_width_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pitch_mm: Option<f64>,
}

impl RawCollector {
    pub fn resolve(self) -> Result<CollectorGrid, IoError> {
        let d = CollectorGrid::default();
        let grid = CollectorGrid {
            wire_width: units::length(
                "wire_width",
                self.wire_width_m,
                self.wire_width_mm,
                Some(d.wire_width),
            )?,
            pitch: units::length("pitch", self.pitch_m, self.pitch_mm, Some(d.pitch))?,
        };
        grid.validate()
            .map_err(|e| IoError::Schema(format!("collector: {e}")))?;
        Ok(grid)
    }

    pub fn from_grid(g: &CollectorGrid) -> Self {
        Self {
            wire_width_m: Some(g.wire_width),
            wire_width_mm: None,
            pitch_m: Some(g.pitch),
            pitch_mm: None,
        }
    }
}
