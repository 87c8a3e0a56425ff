//! Multi-stage aggregation: series-ducted stages with per-stage thrust
//! degradation, duct length, and vehicle-level thrust budgets.
//!
//! Stage i (0-based) produces `T1 * k^i` thrust at the full first-stage
//! power: downstream stages ingest pre-accelerated flow, which erodes
//! thrust but not draw. Totals follow the geometric series
//! `S_N(k) = (1 - k^N) / (1 - k)`.

use crate::geometry::{self, OnsetPenaltyModel, StageGeometry};
use crate::physics::{self, CoronaModel, FluidMedium, OperatingPoint, PhysicsError};

/// Standard gravity, m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// A complete thruster: `stage_count` identical stages spaced
/// `interstage_factor * gap` apart, driven by one corona supply.
///
/// `interstage_factor >= 1` is required for a buildable device ([factors
/// below 1 arc between stages and are reported as hard violations by
/// `clearance_check`); factors in [1, 1.5) draw reverse-corona losses.
#[derive(Clone, Debug, PartialEq)]
pub struct ThrusterDesign {
    pub stage: StageGeometry,
    pub stage_count: u32,
    pub interstage_factor: f64,
    pub corona: CoronaModel,
}

impl ThrusterDesign {
    pub const DEFAULT_INTERSTAGE_FACTOR: f64 = 1.5;

    pub fn new(
        stage: StageGeometry,
        stage_count: u32,
        interstage_factor: f64,
        corona: CoronaModel,
    ) -> Result<Self, PhysicsError> {
        let design = Self {
            stage,
            stage_count,
            interstage_factor,
            corona,
        };
        design.validate()?;
        Ok(design)
    }

    /// Structural validity only; spacing rules are an operational question
    /// answered by `clearance_check`.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        self.stage.validate()?;
        self.corona.validate()?;
        if self.stage_count < 1 {
            return Err(PhysicsError::Domain("stage_count must be >= 1".into()));
        }
        if !(self.interstage_factor.is_finite() && self.interstage_factor > 0.0) {
            return Err(PhysicsError::Domain(format!(
                "interstage_factor must be positive and finite, got {}",
                self.interstage_factor
            )));
        }
        Ok(())
    }
}

/// Fraction of the previous stage's thrust each subsequent stage retains,
/// in (0, 1]. 1 means perfectly independent stages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageDegradation {
    pub factor: f64,
}

impl Default for StageDegradation {
    fn default() -> Self {
        Self { factor: 1.0 }
    }
}

impl StageDegradation {
    pub fn validate(&self) -> Result<(), PhysicsError> {
        if self.factor.is_finite() && self.factor > 0.0 && self.factor <= 1.0 {
            Ok(())
        } else {
            Err(PhysicsError::Domain(format!(
                "degradation factor {} must lie in (0, 1]",
                self.factor
            )))
        }
    }
}

/// Aggregate performance of a stack at one drive voltage.
#[derive(Clone, Debug, PartialEq)]
pub struct StackPerformance {
    pub per_stage: Vec<OperatingPoint>,
    pub total_thrust: f64,
    pub total_power: f64,
    /// Thrust per watt, N/W; zero when power is zero.
    pub efficiency: f64,
    /// Thrust per unit of duct cross-section, N/m^2.
    pub thrust_density: f64,
    pub outlet_velocity: f64,
    pub reynolds: f64,
}

/// Partial geometric sum `1 + k + ... + k^(N-1)`; exactly `N` at `k = 1`.
pub fn geometric_sum(factor: f64, count: u32) -> f64 {
    if factor == 1.0 {
        f64::from(count)
    } else {
        (1.0 - factor.powi(count as i32)) / (1.0 - factor)
    }
}

/// Performance of a full stack at one voltage.
///
/// Refuses designs with hard clearance violations (interstage arcing).
/// Per-stage thrust decays by the degradation factor; per-stage power does
/// not. For `stage_count = 1` the single entry reproduces
/// [`physics::stage_performance`] bit for bit.
pub fn stack_performance(
    design: &ThrusterDesign,
    voltage: f64,
    degradation: &StageDegradation,
    penalty: &OnsetPenaltyModel,
    medium: &FluidMedium,
) -> Result<StackPerformance, PhysicsError> {
    design.validate()?;
    degradation.validate()?;
    let report = geometry::clearance_check(&design.stage, design.interstage_factor)?;
    if report.has_hard() {
        let rules: Vec<&str> = report.hard_violations().map(|v| v.rule.id()).collect();
        return Err(PhysicsError::Infeasible(format!(
            "hard clearance violation: {}",
            rules.join(", ")
        )));
    }
    let first = physics::stage_performance(&design.stage, voltage, &design.corona, penalty, medium)?;
    let k = degradation.factor;
    let n = design.stage_count;
    let per_stage: Vec<OperatingPoint> = (0..n)
        .map(|i| {
            let thrust = first.thrust * k.powi(i as i32);
            OperatingPoint {
                thrust,
                efficiency: if first.power > 0.0 {
                    thrust / first.power
                } else {
                    0.0
                },
                ..first
            }
        })
        .collect();
    let total_thrust = first.thrust * geometric_sum(k, n);
    let total_power = first.power * f64::from(n);
    let efficiency = if total_power > 0.0 {
        total_thrust / total_power
    } else {
        0.0
    };
    let area = geometry::inner_area(&design.stage)?;
    let density = thrust_density(total_thrust, area)?;
    let outlet = physics::outlet_velocity(total_thrust, area, medium)?;
    let re = physics::reynolds(outlet, design.stage.duct_inner_height, medium)?;
    Ok(StackPerformance {
        per_stage,
        total_thrust,
        total_power,
        efficiency,
        thrust_density: density,
        outlet_velocity: outlet,
        reynolds: re,
    })
}

/// Thrust per unit duct cross-section, N/m^2.
pub fn thrust_density(total_thrust: f64, area: f64) -> Result<f64, PhysicsError> {
    if !(total_thrust.is_finite() && total_thrust >= 0.0) {
        return Err(PhysicsError::Domain(format!(
            "total_thrust must be >= 0, got {total_thrust}"
        )));
    }
    if !(area.is_finite() && area > 0.0) {
        return Err(PhysicsError::Domain(format!(
            "area must be positive, got {area}"
        )));
    }
    Ok(total_thrust / area)
}

/// Axial duct length: `N` gaps plus `N - 1` interstage spacings of
/// `interstage_factor * gap`.
pub fn duct_length(design: &ThrusterDesign) -> Result<f64, PhysicsError> {
    design.validate()?;
    let n = f64::from(design.stage_count);
    let d = design.stage.gap;
    Ok(n * d + (n - 1.0) * design.interstage_factor * d)
}

/// Total thrust of `thruster_count` identical stacks at one operating
/// point. Exactly linear in the count.
pub fn system_budget(
    design: &ThrusterDesign,
    thruster_count: u32,
    voltage: f64,
    degradation: &StageDegradation,
    penalty: &OnsetPenaltyModel,
    medium: &FluidMedium,
) -> Result<f64, PhysicsError> {
    if thruster_count < 1 {
        return Err(PhysicsError::Domain("thruster_count must be >= 1".into()));
    }
    let stack = stack_performance(design, voltage, degradation, penalty, medium)?;
    Ok(f64::from(thruster_count) * stack.total_thrust)
}

/// Thrust-to-weight ratio against standard gravity.
pub fn thrust_to_weight(total_thrust: f64, mass: f64) -> Result<f64, PhysicsError> {
    if !(total_thrust.is_finite() && total_thrust >= 0.0) {
        return Err(PhysicsError::Domain(format!(
            "total_thrust must be >= 0, got {total_thrust}"
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(PhysicsError::Domain(format!(
            "mass must be positive, got {mass}"
        )));
    }
    Ok(total_thrust / (mass * STANDARD_GRAVITY))
}
