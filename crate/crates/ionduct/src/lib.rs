//! Design modeling and optimization for multi-stage ducted
//! electroaerodynamic (EAD) thrusters.
//!
//! The library covers the full loop from geometry to flight-scale budgeting:
//!
//! * [`geometry`]: stadium duct cross-sections, emitter tip layout, spacing
//!   rules, and fabrication outlines.
//! * [`physics`]: corona discharge current, ion-drift thrust, space-charge
//!   and efficiency limits, single-stage operating points.
//! * [`stack`]: multi-stage aggregation with per-stage thrust degradation,
//!   duct length, and system thrust budgets.
//! * [`calibrate`]: deterministic fits of the corona and degradation
//!   parameters from measured voltage/current/force sweeps.
//! * [`optimize`]: exhaustive design-space search under feasibility
//!   constraints, plus Pareto fronts over thrust density and efficiency.
//! * [`io`]: JSON design/space files, measurement CSV ingestion, sweep
//!   tables, and SVG fabrication exports.
//! * [`cli`]: the `ionduct` command-line interface built on the above.
//!
//! Units are SI throughout the API: meters, volts, amperes, newtons, watts.
//! File formats additionally accept millimeter- and kilovolt-suffixed fields
//! on input; outputs are always SI. All fits and searches are derivative-free
//! and bit-deterministic: the same inputs produce the same outputs, with no
//! hidden global state.

#![forbid(unsafe_code)]

pub mod calibrate;
pub mod cli;
pub mod geometry;
pub mod io;
mod numeric;
pub mod optimize;
pub mod physics;
pub mod stack;
pub mod synth;
