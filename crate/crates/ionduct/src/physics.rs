//! Corona discharge and ion-drift thrust physics for a single stage.
//!
//! The model chain: a quadratic corona law gives current from voltage; ion
//! drift converts current to thrust `F = beta * I * d / mu`, clamped by the
//! space-charge limit `(9/8) * eps * A * E^2`; efficiency is thrust over
//! electrical power and can never beat `1 / (mu * E)`.

use thiserror::Error;

use crate::geometry::{self, GeometryError, OnsetPenaltyModel, StageGeometry};

/// Fraction of the breakdown field treated as the safe operating ceiling.
pub const BREAKDOWN_GUARD_FRACTION: f64 = 0.9;

#[derive(Debug, Error)]
pub enum PhysicsError {
    /// Input outside an operation's domain.
    #[error("physics domain error: {0}")]
    Domain(String),
    /// Mean drift field above the guarded fraction of the breakdown field.
    #[error(
        "drift field {field:.4e} V/m exceeds the guarded limit {limit:.4e} V/m \
         (90% of breakdown)"
    )]
    Breakdown { field: f64, limit: f64 },
    /// A structurally valid request that no operating point satisfies.
    #[error("infeasible operating point: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn require_finite(name: &str, v: f64) -> Result<(), PhysicsError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(PhysicsError::Domain(format!("{name} must be finite, got {v}")))
    }
}

fn require_positive(name: &str, v: f64) -> Result<(), PhysicsError> {
    require_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(PhysicsError::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn require_non_negative(name: &str, v: f64) -> Result<(), PhysicsError> {
    require_finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(PhysicsError::Domain(format!("{name} must be >= 0, got {v}")))
    }
}

/// Working-fluid properties. Defaults are sea-level air with small positive
/// ions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidMedium {
    /// Ion mobility, m^2/(V s).
    pub ion_mobility: f64,
    /// Permittivity, F/m.
    pub permittivity: f64,
    /// Mass density, kg/m^3.
    pub density: f64,
    /// Kinematic viscosity, m^2/s.
    pub kinematic_viscosity: f64,
    /// Dielectric breakdown field, V/m.
    pub breakdown_field: f64,
}

impl Default for FluidMedium {
    fn default() -> Self {
        Self {
            ion_mobility: 2.0e-4,
            permittivity: 8.854e-12,
            density: 1.225,
            kinematic_viscosity: 1.5e-5,
            breakdown_field: 3.0e6,
        }
    }
}

impl FluidMedium {
    pub fn validate(&self) -> Result<(), PhysicsError> {
        require_positive("ion_mobility", self.ion_mobility)?;
        require_positive("permittivity", self.permittivity)?;
        require_positive("density", self.density)?;
        require_positive("kinematic_viscosity", self.kinematic_viscosity)?;
        require_positive("breakdown_field", self.breakdown_field)
    }
}

/// Quadratic corona discharge law `I = C * V * (V - V0)` above onset, zero
/// at or below it. `thrust_effectiveness` is the fraction of the ideal
/// ion-drift thrust actually realized (momentum lost to walls and
/// recirculation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoronaModel {
    /// Conductance coefficient C, A/V^2.
    pub conductance_coeff: f64,
    /// Onset voltage V0, V.
    pub onset_voltage: f64,
    /// Realized fraction of ideal thrust, in (0, 1].
    pub thrust_effectiveness: f64,
}

impl Default for CoronaModel {
    fn default() -> Self {
        Self {
            conductance_coeff: 1.0e-11,
            onset_voltage: 2.4e3,
            thrust_effectiveness: 1.0,
        }
    }
}

impl CoronaModel {
    pub fn validate(&self) -> Result<(), PhysicsError> {
        require_positive("conductance_coeff", self.conductance_coeff)?;
        require_positive("onset_voltage", self.onset_voltage)?;
        require_finite("thrust_effectiveness", self.thrust_effectiveness)?;
        if self.thrust_effectiveness > 0.0 && self.thrust_effectiveness <= 1.0 {
            Ok(())
        } else {
            Err(PhysicsError::Domain(format!(
                "thrust_effectiveness {} must lie in (0, 1]",
                self.thrust_effectiveness
            )))
        }
    }
}

/// Single-stage operating point at a fixed drive voltage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    pub voltage: f64,
    /// Mean drift field V/d, V/m.
    pub drift_field: f64,
    pub current: f64,
    pub thrust: f64,
    pub power: f64,
    /// Thrust per watt, N/W; zero when power is zero.
    pub efficiency: f64,
    /// True when the ion-drift thrust was clamped to the space-charge limit.
    pub space_charge_limited: bool,
}

/// Mean drift field between emitter and collector, `V / d`.
pub fn drift_field(voltage: f64, gap: f64) -> Result<f64, PhysicsError> {
    require_non_negative("voltage", voltage)?;
    require_positive("gap", gap)?;
    Ok(voltage / gap)
}

/// Ideal ion-drift thrust `I * d / mu`.
pub fn thrust_from_current(
    current: f64,
    gap: f64,
    medium: &FluidMedium,
) -> Result<f64, PhysicsError> {
    require_non_negative("current", current)?;
    require_positive("gap", gap)?;
    medium.validate()?;
    Ok(current * gap / medium.ion_mobility)
}

/// Space-charge-limited thrust ceiling `(9/8) * eps * A * E^2`.
pub fn space_charge_thrust_limit(
    area: f64,
    field: f64,
    medium: &FluidMedium,
) -> Result<f64, PhysicsError> {
    require_positive("area", area)?;
    require_non_negative("field", field)?;
    medium.validate()?;
    Ok(1.125 * medium.permittivity * area * field * field)
}

/// Upper bound on thrust per watt at a given drift field, `1 / (mu * E)`.
pub fn efficiency_bound(field: f64, medium: &FluidMedium) -> Result<f64, PhysicsError> {
    require_positive("field", field)?;
    medium.validate()?;
    Ok(1.0 / (medium.ion_mobility * field))
}

/// Corona current at `voltage`. Total: zero at or below onset, and for
/// negative voltages; `C * V * (V - V0)` above onset. Continuous at onset.
pub fn corona_current(voltage: f64, model: &CoronaModel) -> f64 {
    if voltage > model.onset_voltage {
        model.conductance_coeff * voltage * (voltage - model.onset_voltage)
    } else {
        0.0
    }
}

/// Corona onset of a stage after the geometric penalty:
/// `V0 + onset_penalty(stage)`.
pub fn adjusted_onset(
    stage: &StageGeometry,
    model: &CoronaModel,
    penalty: &OnsetPenaltyModel,
) -> Result<f64, PhysicsError> {
    model.validate()?;
    Ok(model.onset_voltage + geometry::onset_penalty(stage, penalty)?)
}

/// Operating point of one stage at a drive voltage.
///
/// The corona onset is first raised by the stage's geometric penalty; the
/// resulting current drives `F = beta * I * d / mu`, clamped to the
/// space-charge limit of the duct cross-section. Power is exactly
/// `V * I`. Errors if the drift field exceeds
/// [`BREAKDOWN_GUARD_FRACTION`] of the medium's breakdown field.
pub fn stage_performance(
    stage: &StageGeometry,
    voltage: f64,
    model: &CoronaModel,
    penalty: &OnsetPenaltyModel,
    medium: &FluidMedium,
) -> Result<OperatingPoint, PhysicsError> {
    stage.validate()?;
    model.validate()?;
    medium.validate()?;
    let field = drift_field(voltage, stage.gap)?;
    let limit_field = BREAKDOWN_GUARD_FRACTION * medium.breakdown_field;
    if field > limit_field {
        return Err(PhysicsError::Breakdown {
            field,
            limit: limit_field,
        });
    }
    let onset = adjusted_onset(stage, model, penalty)?;
    let effective = CoronaModel {
        onset_voltage: onset,
        ..*model
    };
    let current = corona_current(voltage, &effective);
    let ideal = model.thrust_effectiveness * thrust_from_current(current, stage.gap, medium)?;
    let area = geometry::inner_area(stage)?;
    let limit = space_charge_thrust_limit(area, field, medium)?;
    let space_charge_limited = ideal > limit;
    let thrust = if space_charge_limited { limit } else { ideal };
    let power = voltage * current;
    let efficiency = if power > 0.0 { thrust / power } else { 0.0 };
    Ok(OperatingPoint {
        voltage,
        drift_field: field,
        current,
        thrust,
        power,
        efficiency,
        space_charge_limited,
    })
}

/// Bulk outlet velocity from momentum balance, `sqrt(F / (rho * A))`.
pub fn outlet_velocity(thrust: f64, area: f64, medium: &FluidMedium) -> Result<f64, PhysicsError> {
    require_non_negative("thrust", thrust)?;
    require_positive("area", area)?;
    medium.validate()?;
    Ok((thrust / (medium.density * area)).sqrt())
}

/// Reynolds number `v * L / nu` with the duct height as the length scale.
pub fn reynolds(velocity: f64, chord: f64, medium: &FluidMedium) -> Result<f64, PhysicsError> {
    require_non_negative("velocity", velocity)?;
    require_positive("chord", chord)?;
    medium.validate()?;
    Ok(velocity * chord / medium.kinematic_viscosity)
}
