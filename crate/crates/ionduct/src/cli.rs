//! Command-line front end.
//!
//! Exit codes: 0 success; 1 output write failure; 2 bad usage, unreadable
//! input, or schema violation; 3 physically infeasible request (breakdown,
//! hard clearance violation, empty feasible set); 4 data insufficient to
//! identify the requested fit.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::calibrate::{self, CalibrationParams, FitError, Sample};
use crate::geometry::{self, GeometryError};
use crate::io::report::AnalysisReport;
use crate::io::sweep::{pareto_csv, sweep_csv, sweep_json};
use crate::io::{self, DesignFile, IoError, ParetoRow, SpaceFile, SweepRow, SweepSpec};
use crate::optimize::{self, Constraint, Objective, ObjectiveTarget, OptimizeResult};
use crate::physics::{self, CoronaModel, FluidMedium, PhysicsError};
use crate::stack::{self, ThrusterDesign};

#[derive(Parser)]
#[command(
    name = "ionduct",
    version,
    about = "Design modeling and optimization for multi-stage ducted \
             electroaerodynamic thrusters"
)]
struct Cli {
    /// Reserved for future stochastic features; accepted and ignored so
    /// scripts can pin it today.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a design at one voltage, or over a sweep with --sweep.
    Analyze(AnalyzeArgs),
    /// Tabulate performance over a voltage sweep.
    Sweep(SweepArgs),
    /// Fit corona calibration from measured sweeps into a design file.
    Fit(FitArgs),
    /// Search a design space for the best feasible design.
    Optimize(OptimizeArgs),
    /// Export a design's electrode outlines as SVG.
    Geometry(GeometryArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Design file (JSON).
    design: PathBuf,
    /// Operating voltage, V.
    #[arg(long, conflicts_with_all = ["voltage_kv", "sweep"])]
    voltage: Option<f64>,
    /// Operating voltage, kV.
    #[arg(long, conflicts_with = "sweep")]
    voltage_kv: Option<f64>,
    /// Render a table over start:stop:step volts instead of one report.
    #[arg(long, value_name = "START:STOP:STEP")]
    sweep: Option<String>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (sweeps render as csv unless json is asked for).
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Design file (JSON).
    design: PathBuf,
    /// start:stop:step in volts.
    #[arg(value_name = "START:STOP:STEP")]
    spec: String,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FitArgs {
    /// Measurement CSV: device_id,trial_id,voltage_V,current_A,force_N.
    data: PathBuf,
    /// Design file providing geometry, medium, and prior calibration.
    design: PathBuf,
    /// Write the recalibrated design file here (default: stdout, with the
    /// fit summary on stderr).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concatenate all curves into one sample set instead of aggregating
    /// repeated trials on a common voltage grid.
    #[arg(long)]
    pooled: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Space file (JSON).
    space: PathBuf,
    /// What to maximize.
    #[arg(long, value_enum)]
    target: TargetArg,
    /// Supply ceiling, V. Required (or --max-voltage-kv).
    #[arg(long, conflicts_with = "max_voltage_kv")]
    max_voltage: Option<f64>,
    /// Supply ceiling, kV.
    #[arg(long)]
    max_voltage_kv: Option<f64>,
    /// Feasibility floor on stack efficiency, N/W.
    #[arg(long)]
    min_efficiency: Option<f64>,
    /// Feasibility floor on outlet thrust density, N/m^2.
    #[arg(long)]
    min_thrust_density: Option<f64>,
    /// Feasibility floor on total thrust, N.
    #[arg(long)]
    min_total_thrust: Option<f64>,
    /// Reject designs with any soft clearance violation.
    #[arg(long)]
    no_soft_violations: bool,
    /// Also write the density-efficiency Pareto front CSV here.
    #[arg(long)]
    pareto: Option<PathBuf>,
    /// Voltage grid step for the Pareto sweep, V.
    #[arg(long, default_value_t = 50.0)]
    pareto_grid: f64,
    /// Write the winning design file here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GeometryArgs {
    /// Design file (JSON).
    design: PathBuf,
    /// Write the SVG here (default: stdout).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Rim width drawn around the emitter ring, mm.
    #[arg(long, default_value_t = 2.0)]
    rim_mm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    /// Outlet thrust density, N/m^2.
    Density,
    /// Stack efficiency, N/W.
    Efficiency,
    /// Total thrust, N.
    Thrust,
}

impl From<TargetArg> for ObjectiveTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Density => ObjectiveTarget::MaxThrustDensity,
            TargetArg::Efficiency => ObjectiveTarget::MaxEfficiency,
            TargetArg::Thrust => ObjectiveTarget::MaxTotalThrust,
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Optimize(#[from] optimize::OptimizeError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn geometry_code(g: &GeometryError) -> i32 {
    match g {
        GeometryError::Layout(_) => 3,
        _ => 2,
    }
}

fn physics_code(p: &PhysicsError) -> i32 {
    match p {
        PhysicsError::Breakdown { .. } | PhysicsError::Infeasible(_) => 3,
        PhysicsError::Geometry(g) => geometry_code(g),
        _ => 2,
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(e) => match e {
                IoError::Schema(_) | IoError::Read { .. } => 2,
                IoError::Write { .. } => 1,
                IoError::Infeasible(_) => 3,
                IoError::InsufficientData(_) => 4,
            },
            CliError::Fit(e) => match e {
                FitError::InsufficientData(_)
                | FitError::NoDischarge(_)
                | FitError::Unidentifiable(_) => 4,
                FitError::Geometry(g) => geometry_code(g),
                _ => 2,
            },
            CliError::Optimize(e) => match e {
                optimize::OptimizeError::EmptyFeasibleSet { .. } => 3,
                optimize::OptimizeError::Physics(p) => physics_code(p),
                optimize::OptimizeError::Geometry(g) => geometry_code(g),
                _ => 2,
            },
            CliError::Physics(p) => physics_code(p),
            CliError::Geometry(g) => geometry_code(g),
        }
    }
}

/// Entry point for `main`: real argv, stdout, stderr.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against explicit arguments and streams; returns the exit
/// code instead of exiting.
pub fn run<O: Write, E: Write>(args: Vec<String>, out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(String::as_str)) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch<O: Write, E: Write>(cli: Cli, out: &mut O, err: &mut E) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Fit(a) => cmd_fit(a, out, err),
        Command::Optimize(a) => cmd_optimize(a, out),
        Command::Geometry(a) => cmd_geometry(a, out),
    }
}

fn write_stdout<O: Write>(out: &mut O, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| {
        CliError::Io(IoError::Write {
            path: "stdout".into(),
            source,
        })
    })
}

fn emit<O: Write>(out: &mut O, path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => Ok(io::write_file(p, text)?),
        None => write_stdout(out, text),
    }
}

/// The design as analyses run it: corona from the effective calibration,
/// plus that calibration and its adjusted medium.
fn operating_state(file: &DesignFile) -> (ThrusterDesign, CalibrationParams, FluidMedium) {
    let calib = file.effective_calibration();
    let mut design = file.design.clone();
    design.corona = calib.corona;
    let medium = calib.effective_medium(&file.medium);
    (design, calib, medium)
}

fn cmd_analyze<O: Write>(a: AnalyzeArgs, out: &mut O) -> Result<(), CliError> {
    let file = DesignFile::load(&a.design)?;
    if let Some(spec) = &a.sweep {
        let rows = run_sweep(&file, &SweepSpec::parse(spec)?)?;
        let text = match a.format {
            Format::Json => sweep_json(&rows),
            Format::Text | Format::Csv => sweep_csv(&rows),
        };
        return emit(out, &a.out, &text);
    }
    let voltage = match (a.voltage, a.voltage_kv) {
        (Some(v), None) => v,
        (None, Some(kv)) => kv * 1e3,
        (None, None) => {
            return Err(CliError::Usage(
                "analyze needs --voltage, --voltage-kv, or --sweep".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the conflict"),
    };
    if !(voltage.is_finite() && voltage >= 0.0) {
        return Err(CliError::Usage(format!(
            "voltage {voltage} must be finite and >= 0"
        )));
    }
    let report = build_report(&file, voltage)?;
    let text = match a.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
        Format::Csv => {
            return Err(CliError::Usage(
                "--format csv renders tables; use it with --sweep".into(),
            ))
        }
    };
    emit(out, &a.out, &text)
}

fn build_report(file: &DesignFile, voltage: f64) -> Result<AnalysisReport, CliError> {
    let (design, calib, medium) = operating_state(file);
    let penalty = calib.penalty_model();
    let clearances = geometry::clearance_check(&design.stage, design.interstage_factor)?;
    let perf = stack::stack_performance(&design, voltage, &calib.degradation, &penalty, &medium)?;
    let field = physics::drift_field(voltage, design.stage.gap)?;
    let area = geometry::inner_area(&design.stage)?;
    let bound = if field > 0.0 {
        physics::efficiency_bound(field, &medium)?
    } else {
        f64::INFINITY
    };
    let sc_limit = if field > 0.0 {
        physics::space_charge_thrust_limit(area, field, &medium)?
    } else {
        0.0
    };
    let first = perf.per_stage[0];
    Ok(AnalysisReport {
        voltage_v: voltage,
        stage_count: design.stage_count,
        adjusted_onset_v: physics::adjusted_onset(&design.stage, &design.corona, &penalty)?,
        drift_field_v_per_m: field,
        stage_current_a: first.current,
        stage_thrust_n: first.thrust,
        space_charge_limited: first.space_charge_limited,
        space_charge_limit_n: sc_limit,
        total_thrust_n: perf.total_thrust,
        total_power_w: perf.total_power,
        efficiency_n_per_w: perf.efficiency,
        efficiency_bound_n_per_w: bound,
        thrust_density_n_per_m2: perf.thrust_density,
        outlet_velocity_m_per_s: perf.outlet_velocity,
        reynolds: perf.reynolds,
        duct_area_m2: area,
        duct_length_m: stack::duct_length(&design)?,
        soft_violations: clearances
            .soft_violations()
            .map(|v| format!("{}: {}", v.rule.id(), v.message))
            .collect(),
    })
}

fn cmd_sweep<O: Write>(a: SweepArgs, out: &mut O) -> Result<(), CliError> {
    let file = DesignFile::load(&a.design)?;
    let rows = run_sweep(&file, &SweepSpec::parse(&a.spec)?)?;
    let text = match a.format {
        Format::Json => sweep_json(&rows),
        Format::Text | Format::Csv => sweep_csv(&rows),
    };
    emit(out, &a.out, &text)
}

fn run_sweep(file: &DesignFile, spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    let (design, calib, medium) = operating_state(file);
    let penalty = calib.penalty_model();
    let stage = &design.stage;
    let base = SweepRow {
        aspect_ratio: stage.emitter.aspect_ratio,
        stage_count: design.stage_count,
        tip_count: stage.emitter.tip_count,
        gap_m: stage.gap,
        interstage_factor: design.interstage_factor,
        voltage_v: 0.0,
        current_a: 0.0,
        thrust_n: 0.0,
        power_w: 0.0,
        efficiency_n_per_w: 0.0,
        thrust_density_n_per_m2: 0.0,
        feasible: false,
    };
    let mut rows = Vec::new();
    for v in spec.voltages() {
        match stack::stack_performance(&design, v, &calib.degradation, &penalty, &medium) {
            Ok(p) => rows.push(SweepRow {
                voltage_v: v,
                current_a: p.per_stage[0].current,
                thrust_n: p.total_thrust,
                power_w: p.total_power,
                efficiency_n_per_w: p.efficiency,
                thrust_density_n_per_m2: p.thrust_density,
                feasible: true,
                ..base
            }),
            Err(PhysicsError::Breakdown { .. }) => rows.push(SweepRow {
                voltage_v: v,
                ..base
            }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rows)
}

fn cmd_fit<O: Write, E: Write>(a: FitArgs, out: &mut O, err: &mut E) -> Result<(), CliError> {
    let curves = io::measurements::read_measurements(&a.data)?;
    if curves.is_empty() {
        return Err(FitError::InsufficientData(
            "the measurement CSV has no data rows".into(),
        )
        .into());
    }
    let file = DesignFile::load(&a.design)?;
    let prev = file.effective_calibration();
    let medium = prev.effective_medium(&file.medium);

    let (iv_fit, fit_samples, mode) = if curves.len() == 1 {
        (
            calibrate::fit_iv(&curves[0])?,
            curves[0].samples.clone(),
            "single curve".to_string(),
        )
    } else if a.pooled {
        let samples: Vec<Sample> = curves
            .iter()
            .flat_map(|c| c.samples.iter().copied())
            .collect();
        (
            calibrate::fit_iv_pooled(&curves)?,
            samples,
            format!("pooled over {} curves", curves.len()),
        )
    } else {
        let agg = calibrate::aggregate_trials(&curves).map_err(|e| match e {
            FitError::Mismatch(m) => FitError::Mismatch(format!(
                "{m}; rerun with --pooled to concatenate samples instead of aggregating"
            )),
            other => other,
        })?;
        let samples = agg.curve.samples.clone();
        let mode = format!(
            "aggregated over {} device(s), {} curve(s)",
            agg.device_count,
            curves.len()
        );
        (calibrate::fit_iv(&agg.curve)?, samples, mode)
    };

    let has_force = fit_samples
        .iter()
        .any(|s| s.force.is_some() && s.current > 0.0);
    let beta_fit = if has_force {
        Some(calibrate::fit_thrust_effectiveness_samples(
            &fit_samples,
            file.design.stage.gap,
            &medium,
        )?)
    } else {
        None
    };

    // A fitted onset already includes this build's geometric penalty, so
    // the written calibration zeroes the penalty slopes to avoid counting
    // it twice. Degradation and mobility carry over from the prior block.
    let params = CalibrationParams {
        corona: CoronaModel {
            conductance_coeff: iv_fit.params.corona.conductance_coeff,
            onset_voltage: iv_fit.params.corona.onset_voltage,
            thrust_effectiveness: beta_fit
                .as_ref()
                .map(|f| f.params.corona.thrust_effectiveness)
                .unwrap_or(prev.corona.thrust_effectiveness),
        },
        degradation: prev.degradation,
        onset_wall_coeff: 0.0,
        onset_tip_coeff: 0.0,
        ion_mobility_override: prev.ion_mobility_override,
    };
    let mut design = file.design.clone();
    design.corona = params.corona;
    let result = DesignFile {
        design,
        calibration: Some(params.clone()),
        medium: file.medium,
        provenance: Some(format!("fit from {}", a.data.display())),
    };

    let mut sum = 0.0;
    let mut n = 0usize;
    for s in fit_samples.iter().filter(|s| s.current > 0.0) {
        sum += s.current * s.current;
        n += 1;
    }
    let current_rms = if n > 0 { (sum / n as f64).sqrt() } else { 0.0 };
    let relative_residual = if current_rms > 0.0 {
        iv_fit.residual_rms / current_rms
    } else {
        0.0
    };

    let mut summary = String::new();
    summary.push_str(&format!("fit mode: {mode}\n"));
    summary.push_str(&format!(
        "fitted conductance (A/V^2): {}\n",
        params.corona.conductance_coeff
    ));
    summary.push_str(&format!(
        "fitted onset (V): {}\n",
        params.corona.onset_voltage
    ));
    match &beta_fit {
        Some(f) => {
            summary.push_str(&format!(
                "thrust effectiveness: {}\n",
                f.params.corona.thrust_effectiveness
            ));
            if let Some(note) = &f.note {
                summary.push_str(&format!("note: {note}\n"));
            }
        }
        None => summary.push_str("thrust effectiveness: unchanged (no force data)\n"),
    }
    summary.push_str(&format!("relative current residual: {relative_residual}\n"));
    summary.push_str(&format!("samples used: {}\n", iv_fit.sample_count));
    if let Some(note) = &iv_fit.note {
        summary.push_str(&format!("note: {note}\n"));
    }

    match &a.out {
        Some(path) => {
            result.save(path)?;
            write_stdout(out, &summary)
        }
        None => {
            let _ = err.write_all(summary.as_bytes());
            write_stdout(out, &result.to_json_string())
        }
    }
}

#[derive(Serialize)]
struct OptimizeSummary {
    target: String,
    best_voltage_v: f64,
    objective_value: f64,
    total_thrust_n: f64,
    total_power_w: f64,
    efficiency_n_per_w: f64,
    thrust_density_n_per_m2: f64,
    evaluated_count: usize,
    feasible_count: usize,
    rejections: BTreeMap<String, usize>,
    design: serde_json::Value,
}

fn target_label(t: TargetArg) -> &'static str {
    match t {
        TargetArg::Density => "thrust density, N/m^2",
        TargetArg::Efficiency => "efficiency, N/W",
        TargetArg::Thrust => "total thrust, N",
    }
}

fn cmd_optimize<O: Write>(a: OptimizeArgs, out: &mut O) -> Result<(), CliError> {
    let file = SpaceFile::load(&a.space)?;
    let calib = file.effective_calibration();
    let max_voltage = match (a.max_voltage, a.max_voltage_kv) {
        (Some(v), None) => v,
        (None, Some(kv)) => kv * 1e3,
        (None, None) => {
            return Err(CliError::Usage(
                "optimize needs --max-voltage or --max-voltage-kv".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the conflict"),
    };
    let mut constraints = vec![Constraint::MaxVoltage(max_voltage)];
    if let Some(x) = a.min_efficiency {
        constraints.push(Constraint::MinEfficiency(x));
    }
    if let Some(x) = a.min_thrust_density {
        constraints.push(Constraint::MinThrustDensity(x));
    }
    if let Some(x) = a.min_total_thrust {
        constraints.push(Constraint::MinTotalThrust(x));
    }
    if a.no_soft_violations {
        constraints.push(Constraint::NoSoftViolations);
    }
    let objective = Objective::new(a.target.into(), constraints)?;
    let result = optimize::optimize(&file.space, &objective, &calib, &file.medium)?;

    if let Some(path) = &a.pareto {
        let front = optimize::pareto_front(&file.space, &calib, &file.medium, a.pareto_grid)?;
        let rows: Vec<ParetoRow> = front
            .iter()
            .map(|p| ParetoRow {
                aspect_ratio: p.design.stage.emitter.aspect_ratio,
                stage_count: p.design.stage_count,
                tip_count: p.design.stage.emitter.tip_count,
                gap_m: p.design.stage.gap,
                interstage_factor: p.design.interstage_factor,
                voltage_v: p.voltage,
                thrust_density_n_per_m2: p.thrust_density,
                efficiency_n_per_w: p.efficiency,
            })
            .collect();
        io::write_file(path, &pareto_csv(&rows))?;
    }

    let winner_file = DesignFile {
        design: result.best_design.clone(),
        calibration: Some(calib.clone()),
        medium: file.medium,
        provenance: Some(format!(
            "optimizer selection from {} (target: {})",
            a.space.display(),
            target_label(a.target)
        )),
    };
    if let Some(path) = &a.out {
        winner_file.save(path)?;
    }

    let text = match a.format {
        Format::Json => {
            let summary = OptimizeSummary {
                target: target_label(a.target).to_string(),
                best_voltage_v: result.best_voltage,
                objective_value: result.objective_value,
                total_thrust_n: result.metrics.total_thrust,
                total_power_w: result.metrics.total_power,
                efficiency_n_per_w: result.metrics.efficiency,
                thrust_density_n_per_m2: result.metrics.thrust_density,
                evaluated_count: result.evaluated_count,
                feasible_count: result.feasible_count,
                rejections: result.rejections.clone(),
                design: serde_json::from_str(&winner_file.to_json_string())
                    .expect("design files are valid JSON"),
            };
            let mut s = serde_json::to_string_pretty(&summary).expect("summaries serialize");
            s.push('\n');
            s
        }
        Format::Text | Format::Csv => optimize_text(&result, a.target),
    };
    write_stdout(out, &text)
}

fn optimize_text(result: &OptimizeResult, target: TargetArg) -> String {
    let d = &result.best_design;
    let mut s = String::new();
    s.push_str(&format!(
        "best design: aspect ratio {}, stages {}, tips {}, gap (m) {}, interstage factor {}\n",
        d.stage.emitter.aspect_ratio,
        d.stage_count,
        d.stage.emitter.tip_count,
        d.stage.gap,
        d.interstage_factor
    ));
    s.push_str(&format!("best voltage (V): {}\n", result.best_voltage));
    s.push_str(&format!(
        "objective ({}): {}\n",
        target_label(target),
        result.objective_value
    ));
    s.push_str(&format!(
        "total thrust (N): {}\n",
        result.metrics.total_thrust
    ));
    s.push_str(&format!("total power (W): {}\n", result.metrics.total_power));
    s.push_str(&format!(
        "efficiency (N/W): {}\n",
        result.metrics.efficiency
    ));
    s.push_str(&format!(
        "thrust density (N/m^2): {}\n",
        result.metrics.thrust_density
    ));
    s.push_str(&format!("evaluated designs: {}\n", result.evaluated_count));
    s.push_str(&format!("feasible designs: {}\n", result.feasible_count));
    if result.rejections.is_empty() {
        s.push_str("rejections: none\n");
    } else {
        s.push_str("rejections:\n");
        for (reason, count) in &result.rejections {
            s.push_str(&format!("  {reason}: {count}\n"));
        }
    }
    s
}

fn cmd_geometry<O: Write>(a: GeometryArgs, out: &mut O) -> Result<(), CliError> {
    let file = DesignFile::load(&a.design)?;
    if !(a.rim_mm.is_finite() && a.rim_mm > 0.0) {
        return Err(CliError::Usage(format!(
            "--rim-mm {} must be positive",
            a.rim_mm
        )));
    }
    let outline = geometry::electrode_outline(&file.design.stage, a.rim_mm * 1e-3)?;
    emit(out, &a.svg, &io::svg::outline_svg(&outline))
}
