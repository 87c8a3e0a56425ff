//! Minimal library walkthrough: build a stack, evaluate one operating
//! point, print the headline numbers. Mirrors the snippet in the README.

use ionduct::geometry::{CollectorGrid, EmitterRing, OnsetPenaltyModel, StageGeometry};
use ionduct::physics::{CoronaModel, FluidMedium};
use ionduct::stack::{stack_performance, StageDegradation, ThrusterDesign};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 4 mm / 6 mm emitter ring with 20 tips around a 6 mm duct stretched
    // to aspect ratio 5, 2 mm emitter-collector gap, five stages.
    let emitter = EmitterRing::new(4e-3, 6e-3, 20, 5.0, 6e-3)?;
    let stage = StageGeometry::new(emitter, CollectorGrid::default(), 2e-3)?;
    let corona = CoronaModel {
        conductance_coeff: 3.509e-11,
        onset_voltage: 2400.0,
        thrust_effectiveness: 0.61,
    };
    let design = ThrusterDesign::new(stage, 5, 1.5, corona)?;

    // Zero onset-penalty slopes: a fitted onset voltage already includes
    // the penalty this build pays for its own clearances.
    let perf = stack_performance(
        &design,
        3280.0,
        &StageDegradation::default(),
        &OnsetPenaltyModel {
            wall_coeff: 0.0,
            tip_coeff: 0.0,
        },
        &FluidMedium::default(),
    )?;

    println!(
        "thrust {:.3} mN, power {:.2} W, density {:.1} N/m^2",
        perf.total_thrust * 1e3,
        perf.total_power,
        perf.thrust_density
    );
    Ok(())
}
