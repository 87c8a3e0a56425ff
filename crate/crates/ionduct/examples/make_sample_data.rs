//! Regenerates the sample files in `data/` from scratch.
//!
//! Everything here is deterministic (fixed RNG seeds), so the checked-in
//! files are reproducible bit for bit:
//!
//! ```text
//! cargo run --example make_sample_data
//! ```

use std::path::PathBuf;

use ionduct::calibrate::CalibrationParams;
use ionduct::geometry::{CollectorGrid, EmitterRing, StageGeometry};
use ionduct::io::measurements::write_measurements;
use ionduct::io::{DesignFile, SpaceFile};
use ionduct::optimize::DesignSpace;
use ionduct::physics::{CoronaModel, FluidMedium};
use ionduct::stack::{StageDegradation, ThrusterDesign};
use ionduct::synth;

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    std::fs::create_dir_all(&dir).expect("create data dir");

    // Bench-fitted corona of the five-stage demonstrator.
    let corona = CoronaModel {
        conductance_coeff: 3.509499390287516e-11,
        onset_voltage: 2.4e3,
        thrust_effectiveness: 0.61008,
    };

    // Five-stage demonstrator: 20-tip AR-5 stage in a 6 mm duct. The onset
    // was fitted on this build, so it already contains the build's geometric
    // penalty and the calibration zeroes the penalty slopes.
    let emitter = EmitterRing::new(4e-3, 6e-3, 20, 5.0, 6e-3).unwrap();
    let stage = StageGeometry::new(emitter, CollectorGrid::default(), 2e-3).unwrap();
    let ar5 = DesignFile {
        design: ThrusterDesign {
            stage: stage.clone(),
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
        provenance: Some("five-stage bench demonstrator, 2026-06 calibration".into()),
    };
    ar5.save(&dir.join("design_ar5.json")).unwrap();

    // Uncalibrated single-stage square-duct unit: three tips, defaults
    // everywhere, no calibration block.
    let emitter = EmitterRing::new(4e-3, 6e-3, 3, 1.0, 6e-3).unwrap();
    let stage1 = StageGeometry::new(emitter, CollectorGrid::default(), 2e-3).unwrap();
    DesignFile::new(ThrusterDesign {
        stage: stage1,
        stage_count: 1,
        interstage_factor: 1.5,
        corona: CoronaModel::default(),
    })
    .save(&dir.join("design_ar1.json"))
    .unwrap();

    // Small search space around the demonstrator. The calibration keeps the
    // default anchored penalty slopes: 2400 V is treated as the baseline
    // onset, and each candidate geometry adds its own penalty.
    let space = SpaceFile {
        space: DesignSpace {
            aspect_ratios: vec![1.0, 5.0],
            stage_counts: vec![1, 3, 5],
            tip_counts: vec![3],
            gaps: vec![2e-3],
            interstage_factors: vec![1.5],
            voltage_range: (0.0, 5e3),
            bend_depth: 2e-3,
            ..DesignSpace::default()
        },
        calibration: Some(CalibrationParams {
            corona,
            ..CalibrationParams::default()
        }),
        medium: FluidMedium::default(),
        provenance: Some("demonstrator-neighborhood search space".into()),
    };
    space.save(&dir.join("space_small.json")).unwrap();

    // Synthetic bench sweeps for the demonstrator corona: two devices, two
    // trials each, on a common 1000..4000 V grid with 2% multiplicative
    // noise and per-curve seeds.
    let grid = synth::voltage_grid(1.0e3, 4.0e3, 13);
    let medium = FluidMedium::default();
    let curves = vec![
        synth::curve(
            "dev-a",
            "t1",
            "",
            synth::ivf_sweep(&corona, 2e-3, &medium, 0.61008, &grid, 0.02, 11),
        ),
        synth::curve(
            "dev-a",
            "t2",
            "",
            synth::ivf_sweep(&corona, 2e-3, &medium, 0.61008, &grid, 0.02, 12),
        ),
        synth::curve(
            "dev-b",
            "t1",
            "",
            synth::ivf_sweep(&corona, 2e-3, &medium, 0.61008, &grid, 0.02, 21),
        ),
        synth::curve(
            "dev-b",
            "t2",
            "",
            synth::ivf_sweep(&corona, 2e-3, &medium, 0.61008, &grid, 0.02, 22),
        ),
    ];
    write_measurements(&dir.join("measurements_example.csv"), &curves).unwrap();

    println!("wrote sample files to {}", dir.display());
}
