//! Exhaustive design-space search with per-design voltage optimization.
//!
//! The discrete axes (aspect ratio, stage count, tip count, gap, interstage
//! factor) are enumerated outright; voltage is continuous and solved per
//! design by interval refinement against the constraints followed by
//! golden-section search. Everything runs on fixed iteration budgets, so a
//! repeated run over the same inputs is bit-identical.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::calibrate::CalibrationParams;
use crate::geometry::{CollectorGrid, GeometryError, StageGeometry};
use crate::numeric;
use crate::physics::{self, CoronaModel, FluidMedium, PhysicsError};
use crate::stack::{self, StackPerformance, ThrusterDesign};

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error("invalid design space: {0}")]
    InvalidSpace(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Every enumerated design was rejected or infeasible. The histogram
    /// counts designs per rejection reason.
    #[error("no feasible design among {evaluated} evaluated: {rejections:?}")]
    EmptyFeasibleSet {
        evaluated: usize,
        rejections: BTreeMap<String, usize>,
    },
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Scalar the search maximizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveTarget {
    MaxThrustDensity,
    MaxEfficiency,
    MaxTotalThrust,
}

/// One feasibility condition on an operating design.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constraint {
    /// Stack efficiency at the chosen voltage, N/W.
    MinEfficiency(f64),
    /// Outlet thrust density at the chosen voltage, N/m^2.
    MinThrustDensity(f64),
    /// Stack total thrust at the chosen voltage, N.
    MinTotalThrust(f64),
    /// Supply ceiling, V. At least one is required per objective.
    MaxVoltage(f64),
    /// Rejects designs with any soft clearance violation.
    NoSoftViolations,
}

impl Constraint {
    /// Stable identifier used in reports and rejection histograms.
    pub fn name(&self) -> &'static str {
        match self {
            Constraint::MinEfficiency(_) => "efficiency",
            Constraint::MinThrustDensity(_) => "thrust-density",
            Constraint::MinTotalThrust(_) => "total-thrust",
            Constraint::MaxVoltage(_) => "voltage-ceiling",
            Constraint::NoSoftViolations => "no-soft-violations",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub target: ObjectiveTarget,
    pub constraints: Vec<Constraint>,
}

impl Objective {
    pub fn new(target: ObjectiveTarget, constraints: Vec<Constraint>) -> Result<Self, OptimizeError> {
        let o = Self { target, constraints };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        let mut has_ceiling = false;
        for c in &self.constraints {
            match c {
                Constraint::MinEfficiency(v)
                | Constraint::MinThrustDensity(v)
                | Constraint::MinTotalThrust(v) => {
                    if !(v.is_finite() && *v >= 0.0) {
                        return Err(OptimizeError::InvalidObjective(format!(
                            "{} threshold {v} must be finite and >= 0",
                            c.name()
                        )));
                    }
                }
                Constraint::MaxVoltage(v) => {
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(OptimizeError::InvalidObjective(format!(
                            "voltage ceiling {v} must be positive"
                        )));
                    }
                    has_ceiling = true;
                }
                Constraint::NoSoftViolations => {}
            }
        }
        if !has_ceiling {
            return Err(OptimizeError::InvalidObjective(
                "a MaxVoltage ceiling is required; without one the optimum always \
                 sits at the breakdown guard"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Discrete axes of the search plus the shared build parameters.
///
/// Tip count is a free axis only at aspect ratio 1; wider ducts take the
/// tip count their aspect ratio dictates (four tips per unit).
#[derive(Clone, Debug, PartialEq)]
pub struct DesignSpace {
    pub aspect_ratios: Vec<f64>,
    pub stage_counts: Vec<u32>,
    pub tip_counts: Vec<u32>,
    /// Emitter-collector gaps, m.
    pub gaps: Vec<f64>,
    pub interstage_factors: Vec<f64>,
    /// Supply voltage interval searched per design, V.
    pub voltage_range: (f64, f64),
    /// Duct inner height, m; also the emitter outer diameter.
    pub duct_height: f64,
    /// Emitter inset from the duct wall per side, m.
    pub lateral_clearance: f64,
    /// Downstream tip bend, m.
    pub bend_depth: f64,
    pub tip_angle_deg: f64,
    pub collector: CollectorGrid,
}

impl Default for DesignSpace {
    fn default() -> Self {
        Self {
            aspect_ratios: vec![1.0],
            stage_counts: vec![1],
            tip_counts: vec![3],
            gaps: vec![crate::geometry::StageGeometry::DEFAULT_GAP],
            interstage_factors: vec![ThrusterDesign::DEFAULT_INTERSTAGE_FACTOR],
            voltage_range: (0.0, 5.0e3),
            duct_height: 6.0e-3,
            lateral_clearance: 1.0e-3,
            bend_depth: crate::geometry::EmitterRing::DEFAULT_BEND_DEPTH,
            tip_angle_deg: crate::geometry::EmitterRing::DEFAULT_TIP_ANGLE_DEG,
            collector: CollectorGrid::default(),
        }
    }
}

impl DesignSpace {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let err = |m: String| Err(OptimizeError::InvalidSpace(m));
        if self.aspect_ratios.is_empty()
            || self.stage_counts.is_empty()
            || self.tip_counts.is_empty()
            || self.gaps.is_empty()
            || self.interstage_factors.is_empty()
        {
            return err("every axis needs at least one value".into());
        }
        for &ar in &self.aspect_ratios {
            if !(ar.is_finite() && ar >= 1.0) {
                return err(format!("aspect ratio {ar} must be finite and >= 1"));
            }
        }
        for &n in &self.stage_counts {
            if n == 0 {
                return err("stage counts must be >= 1".into());
            }
        }
        for &n in &self.tip_counts {
            if n == 0 {
                return err("tip counts must be >= 1".into());
            }
        }
        for &g in &self.gaps {
            if !(g.is_finite() && g > 0.0) {
                return err(format!("gap {g} must be positive"));
            }
        }
        for &k in &self.interstage_factors {
            if !(k.is_finite() && k > 0.0) {
                return err(format!("interstage factor {k} must be positive"));
            }
        }
        let (lo, hi) = self.voltage_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return err(format!("voltage range ({lo}, {hi}) must satisfy 0 <= lo <= hi"));
        }
        if !(self.duct_height.is_finite() && self.duct_height > 0.0) {
            return err(format!("duct height {} must be positive", self.duct_height));
        }
        if !(self.lateral_clearance.is_finite() && self.lateral_clearance > 0.0) {
            return err(format!(
                "lateral clearance {} must be positive",
                self.lateral_clearance
            ));
        }
        if 2.0 * self.lateral_clearance >= self.duct_height {
            return err(format!(
                "lateral clearance {} leaves no emitter aperture in a {} duct",
                self.lateral_clearance, self.duct_height
            ));
        }
        if !(self.bend_depth.is_finite() && self.bend_depth >= 0.0) {
            return err(format!("bend depth {} must be finite and >= 0", self.bend_depth));
        }
        if !(self.tip_angle_deg.is_finite()
            && self.tip_angle_deg > 0.0
            && self.tip_angle_deg < 180.0)
        {
            return err(format!(
                "tip angle {} deg must be inside (0, 180)",
                self.tip_angle_deg
            ));
        }
        self.collector
            .validate()
            .map_err(|e| OptimizeError::InvalidSpace(e.to_string()))?;
        Ok(())
    }
}

/// One grid point of the space. `rejected` marks designs that never reach
/// voltage search: structurally invalid builds or hard clearance failures,
/// keyed by a short reason.
#[derive(Clone, Debug)]
pub struct EnumeratedDesign {
    pub design: ThrusterDesign,
    pub rejected: Option<String>,
}

fn sorted_dedup_f64(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("validated values are comparable"));
    v.dedup();
    v
}

fn sorted_dedup_u32(values: &[u32]) -> Vec<u32> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn build_design(space: &DesignSpace, ar: f64, stages: u32, tips: u32, gap: f64, gamma: f64) -> ThrusterDesign {
    let d2 = space.duct_height;
    let d1 = d2 - 2.0 * space.lateral_clearance;
    let emitter = crate::geometry::EmitterRing {
        inner_diameter: d1,
        outer_diameter: d2,
        tip_count: tips,
        tip_angle_deg: space.tip_angle_deg,
        bend_depth: space.bend_depth,
        aspect_ratio: ar,
        duct_height: space.duct_height,
    };
    let stage = StageGeometry {
        emitter,
        collector: space.collector.clone(),
        gap,
        duct_inner_height: space.duct_height,
        duct_inner_width: space.duct_height * ar,
    };
    ThrusterDesign {
        stage,
        stage_count: stages,
        interstage_factor: gamma,
        corona: CoronaModel::default(),
    }
}

/// Expands the space into concrete designs in lexicographic order over
/// (aspect ratio, stage count, tip count, gap, interstage factor), each
/// axis sorted ascending and deduplicated.
pub fn enumerate_designs(space: &DesignSpace) -> Result<Vec<EnumeratedDesign>, OptimizeError> {
    space.validate()?;
    let ars = sorted_dedup_f64(&space.aspect_ratios);
    let stage_counts = sorted_dedup_u32(&space.stage_counts);
    let tip_options = sorted_dedup_u32(&space.tip_counts);
    let gaps = sorted_dedup_f64(&space.gaps);
    let gammas = sorted_dedup_f64(&space.interstage_factors);

    let mut out = Vec::new();
    for &ar in &ars {
        let tips_for_ar: Vec<u32> = if ar == 1.0 {
            tip_options.clone()
        } else {
            vec![(4.0 * ar).round() as u32]
        };
        for &stages in &stage_counts {
            for &tips in &tips_for_ar {
                for &gap in &gaps {
                    for &gamma in &gammas {
                        let design = build_design(space, ar, stages, tips, gap, gamma);
                        let rejected = match design.validate() {
                            Err(_) => Some("invalid-design".to_string()),
                            Ok(()) => {
                                let report = crate::geometry::clearance_check(
                                    &design.stage,
                                    design.interstage_factor,
                                )?;
                                let first = report
                                    .hard_violations()
                                    .next()
                                    .map(|v| v.rule.id().to_string());
                                first
                            }
                        };
                        out.push(EnumeratedDesign { design, rejected });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Result of optimizing one design's operating voltage.
#[derive(Clone, Debug)]
pub struct EvalOutcome {
    pub feasible: bool,
    /// Performance at `best_voltage`; present only when feasible.
    pub metrics: Option<StackPerformance>,
    /// Value of the objective target; negative infinity when infeasible.
    pub objective_value: f64,
    /// Constraint (or clearance rule) that made the design infeasible.
    pub binding_constraint: Option<String>,
    pub best_voltage: f64,
}

fn infeasible(reason: impl Into<String>) -> EvalOutcome {
    EvalOutcome {
        feasible: false,
        metrics: None,
        objective_value: f64::NEG_INFINITY,
        binding_constraint: Some(reason.into()),
        best_voltage: 0.0,
    }
}

/// Voltage probes inside the golden-section stage.
const VOLTAGE_SEARCH_ITERS: u32 = 96;
/// Bisection steps when a constraint clips the voltage interval.
const CONSTRAINT_BISECT_ITERS: u32 = 128;

/// Finds the best feasible operating voltage for one design under the
/// objective, searching from zero up to the breakdown guard and any
/// `MaxVoltage` ceiling.
///
/// The design's corona model is replaced by the calibration's; the
/// calibration also supplies the degradation factor, the onset-penalty
/// slopes, and any mobility override.
pub fn evaluate(
    design: &ThrusterDesign,
    objective: &Objective,
    calib: &CalibrationParams,
    medium: &FluidMedium,
) -> Result<EvalOutcome, OptimizeError> {
    design
        .validate()
        .map_err(|e| OptimizeError::Invalid(e.to_string()))?;
    eval_in_range(design, objective, calib, medium, None)
}

fn eval_in_range(
    design: &ThrusterDesign,
    objective: &Objective,
    calib: &CalibrationParams,
    medium: &FluidMedium,
    range: Option<(f64, f64)>,
) -> Result<EvalOutcome, OptimizeError> {
    objective.validate()?;
    calib
        .validate()
        .map_err(|e| OptimizeError::Invalid(e.to_string()))?;
    medium
        .validate()
        .map_err(|e| OptimizeError::Invalid(e.to_string()))?;

    let mut d = design.clone();
    d.corona = calib.corona;
    let med = calib.effective_medium(medium);
    let penalty = calib.penalty_model();

    let report = crate::geometry::clearance_check(&d.stage, d.interstage_factor)?;
    if let Some(v) = report.hard_violations().next() {
        return Ok(infeasible(v.rule.id()));
    }
    if objective
        .constraints
        .iter()
        .any(|c| matches!(c, Constraint::NoSoftViolations))
        && !report.is_clean()
    {
        return Ok(infeasible("no-soft-violations"));
    }

    // Guarded supply interval. The ceiling sits an epsilon inside the
    // breakdown guard so boundary probes cannot trip it by rounding.
    let guard =
        physics::BREAKDOWN_GUARD_FRACTION * med.breakdown_field * d.stage.gap * (1.0 - 1e-12);
    let mut lo = 0.0_f64;
    let mut hi = guard;
    if let Some((rlo, rhi)) = range {
        lo = lo.max(rlo);
        hi = hi.min(rhi);
    }
    for c in &objective.constraints {
        if let Constraint::MaxVoltage(v) = c {
            hi = hi.min(*v);
        }
    }
    if lo > hi {
        return Ok(infeasible("voltage-ceiling"));
    }

    let perf_at = |v: f64| stack::stack_performance(&d, v, &calib.degradation, &penalty, &med);
    let eff_at = |v: f64| perf_at(v).map(|p| p.efficiency).unwrap_or(f64::NEG_INFINITY);
    let density_at = |v: f64| {
        perf_at(v)
            .map(|p| p.thrust_density)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let thrust_at = |v: f64| {
        perf_at(v)
            .map(|p| p.total_thrust)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let onset = physics::adjusted_onset(&d.stage, &d.corona, &penalty)?;

    // Shrink [lo, hi] against each constraint in declaration order.
    // Efficiency falls with voltage above onset, so it caps the top;
    // thrust and density rise with voltage, so they raise the bottom.
    for c in &objective.constraints {
        match *c {
            Constraint::MinEfficiency(min) if min > 0.0 => {
                let p_lo = lo.max(onset * (1.0 + 1e-12) + 1e-9);
                if p_lo > hi || eff_at(p_lo) < min {
                    return Ok(infeasible(c.name()));
                }
                lo = p_lo;
                if eff_at(hi) < min {
                    hi = numeric::bisect_feasible(
                        |v| eff_at(v) >= min,
                        lo,
                        hi,
                        CONSTRAINT_BISECT_ITERS,
                    );
                }
            }
            Constraint::MinThrustDensity(min) if min > 0.0 => {
                if density_at(hi) < min {
                    return Ok(infeasible(c.name()));
                }
                if density_at(lo) < min {
                    lo = numeric::bisect_feasible(
                        |v| density_at(v) >= min,
                        hi,
                        lo,
                        CONSTRAINT_BISECT_ITERS,
                    );
                }
            }
            Constraint::MinTotalThrust(min) if min > 0.0 => {
                if thrust_at(hi) < min {
                    return Ok(infeasible(c.name()));
                }
                if thrust_at(lo) < min {
                    lo = numeric::bisect_feasible(
                        |v| thrust_at(v) >= min,
                        hi,
                        lo,
                        CONSTRAINT_BISECT_ITERS,
                    );
                }
            }
            _ => {}
        }
        if lo > hi {
            return Ok(infeasible(c.name()));
        }
    }

    let value_at = |v: f64| -> f64 {
        match perf_at(v) {
            Ok(p) => match objective.target {
                ObjectiveTarget::MaxThrustDensity => p.thrust_density,
                ObjectiveTarget::MaxEfficiency => p.efficiency,
                ObjectiveTarget::MaxTotalThrust => p.total_thrust,
            },
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let (best_v, best_val) = numeric::golden_max(&value_at, lo, hi, VOLTAGE_SEARCH_ITERS);
    let Ok(perf) = perf_at(best_v) else {
        return Ok(infeasible("voltage-ceiling"));
    };

    // The refined interval satisfies every constraint by construction;
    // re-verify at the chosen point with a one-part-per-billion slack
    // against boundary rounding.
    const SLACK: f64 = 1.0 + 1e-9;
    for c in &objective.constraints {
        let ok = match *c {
            Constraint::MinEfficiency(min) => perf.efficiency * SLACK >= min,
            Constraint::MinThrustDensity(min) => perf.thrust_density * SLACK >= min,
            Constraint::MinTotalThrust(min) => perf.total_thrust * SLACK >= min,
            Constraint::MaxVoltage(v) => best_v <= v * SLACK,
            Constraint::NoSoftViolations => true,
        };
        if !ok {
            return Ok(infeasible(c.name()));
        }
    }

    Ok(EvalOutcome {
        feasible: true,
        metrics: Some(perf),
        objective_value: best_val,
        binding_constraint: None,
        best_voltage: best_v,
    })
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    /// Winning design, carrying the calibration's corona model.
    pub best_design: ThrusterDesign,
    pub best_voltage: f64,
    pub metrics: StackPerformance,
    pub objective_value: f64,
    /// All enumerated grid points, including rejected ones.
    pub evaluated_count: usize,
    pub feasible_count: usize,
    /// Designs per rejection reason (clearance rule ids, constraint names,
    /// "invalid-design").
    pub rejections: BTreeMap<String, usize>,
}

/// Exhaustive search: every enumerated design is voltage-optimized and the
/// best feasible objective value wins. Ties keep the first design in
/// enumeration order.
pub fn optimize(
    space: &DesignSpace,
    objective: &Objective,
    calib: &CalibrationParams,
    medium: &FluidMedium,
) -> Result<OptimizeResult, OptimizeError> {
    objective.validate()?;
    let designs = enumerate_designs(space)?;
    let mut rejections: BTreeMap<String, usize> = BTreeMap::new();
    let mut feasible_count = 0usize;
    let mut best: Option<(usize, EvalOutcome)> = None;

    for (i, entry) in designs.iter().enumerate() {
        if let Some(reason) = &entry.rejected {
            *rejections.entry(reason.clone()).or_insert(0) += 1;
            continue;
        }
        let outcome = eval_in_range(
            &entry.design,
            objective,
            calib,
            medium,
            Some(space.voltage_range),
        )?;
        if !outcome.feasible {
            let key = outcome
                .binding_constraint
                .unwrap_or_else(|| "infeasible".into());
            *rejections.entry(key).or_insert(0) += 1;
            continue;
        }
        feasible_count += 1;
        let better = match &best {
            None => true,
            Some((_, b)) => outcome.objective_value > b.objective_value,
        };
        if better {
            best = Some((i, outcome));
        }
    }

    let Some((i, outcome)) = best else {
        return Err(OptimizeError::EmptyFeasibleSet {
            evaluated: designs.len(),
            rejections,
        });
    };
    let mut best_design = designs[i].design.clone();
    best_design.corona = calib.corona;
    Ok(OptimizeResult {
        best_design,
        best_voltage: outcome.best_voltage,
        metrics: outcome.metrics.expect("feasible outcome has metrics"),
        objective_value: outcome.objective_value,
        evaluated_count: designs.len(),
        feasible_count,
        rejections,
    })
}

/// One non-dominated operating point in the density-efficiency plane.
#[derive(Clone, Debug)]
pub struct ParetoPoint {
    pub design: ThrusterDesign,
    pub voltage: f64,
    pub thrust_density: f64,
    pub efficiency: f64,
}

/// Sweeps every valid design over the space's voltage range at `voltage_step`
/// and keeps the operating points no other point beats on both thrust
/// density and efficiency. Points that tie on both axes are all kept. The
/// front comes back sorted by ascending density (hence descending
/// efficiency).
pub fn pareto_front(
    space: &DesignSpace,
    calib: &CalibrationParams,
    medium: &FluidMedium,
    voltage_step: f64,
) -> Result<Vec<ParetoPoint>, OptimizeError> {
    if !(voltage_step.is_finite() && voltage_step > 0.0) {
        return Err(OptimizeError::Invalid(format!(
            "voltage step {voltage_step} must be positive"
        )));
    }
    calib
        .validate()
        .map_err(|e| OptimizeError::Invalid(e.to_string()))?;
    medium
        .validate()
        .map_err(|e| OptimizeError::Invalid(e.to_string()))?;
    let designs = enumerate_designs(space)?;
    let penalty = calib.penalty_model();
    let med = calib.effective_medium(medium);

    let (vlo, vhi) = space.voltage_range;
    let steps = ((vhi - vlo) / voltage_step + 1e-9).floor() as usize;

    let mut pts: Vec<ParetoPoint> = Vec::new();
    for entry in &designs {
        if entry.rejected.is_some() {
            continue;
        }
        let mut d = entry.design.clone();
        d.corona = calib.corona;
        for j in 0..=steps {
            let v = vlo + voltage_step * j as f64;
            let Ok(perf) = stack::stack_performance(&d, v, &calib.degradation, &penalty, &med)
            else {
                continue; // past the breakdown guard
            };
            if perf.total_thrust <= 0.0 {
                continue; // below onset, carries no tradeoff information
            }
            pts.push(ParetoPoint {
                design: d.clone(),
                voltage: v,
                thrust_density: perf.thrust_density,
                efficiency: perf.efficiency,
            });
        }
    }

    // Descending-density sweep: a point survives iff its efficiency beats
    // every strictly denser point's. Exact density ties form one group so
    // equal-on-both-axes duplicates survive together.
    pts.sort_by(|a, b| {
        b.thrust_density
            .partial_cmp(&a.thrust_density)
            .expect("finite metrics")
    });
    let mut front: Vec<ParetoPoint> = Vec::new();
    let mut best_eff = f64::NEG_INFINITY;
    let mut i = 0;
    while i < pts.len() {
        let mut j = i;
        let mut group_max = f64::NEG_INFINITY;
        while j < pts.len() && pts[j].thrust_density == pts[i].thrust_density {
            group_max = group_max.max(pts[j].efficiency);
            j += 1;
        }
        if group_max > best_eff {
            front.extend(pts[i..j].iter().filter(|p| p.efficiency == group_max).cloned());
            best_eff = group_max;
        }
        i = j;
    }
    front.sort_by(|a, b| {
        a.thrust_density
            .partial_cmp(&b.thrust_density)
            .expect("finite metrics")
    });
    Ok(front)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn clean_space() -> DesignSpace {
        // Bend depth 2 mm keeps the wall clearance above the ionization
        // radius at a 2 mm gap, so these designs have no soft violations.
        DesignSpace {
            aspect_ratios: vec![1.0],
            stage_counts: vec![1],
            tip_counts: vec![3],
            gaps: vec![2.0e-3],
            interstage_factors: vec![1.5],
            voltage_range: (2.5e3, 3.3e3),
            bend_depth: 2.0e-3,
            ..DesignSpace::default()
        }
    }

    fn zero_slope_calib() -> CalibrationParams {
        CalibrationParams {
            onset_wall_coeff: 0.0,
            onset_tip_coeff: 0.0,
            ..CalibrationParams::default()
        }
    }

    fn ceiling_objective(target: ObjectiveTarget) -> Objective {
        Objective::new(target, vec![Constraint::MaxVoltage(3.3e3)]).unwrap()
    }

    #[test]
    fn objective_requires_a_voltage_ceiling() {
        let err = Objective::new(ObjectiveTarget::MaxEfficiency, vec![]).unwrap_err();
        assert!(matches!(err, OptimizeError::InvalidObjective(_)));
    }

    #[test]
    fn enumeration_is_sorted_deduped_and_marks_rejections() {
        let space = DesignSpace {
            aspect_ratios: vec![5.0, 1.0, 1.0],
            stage_counts: vec![2, 1],
            tip_counts: vec![20, 3],
            gaps: vec![2.0e-3],
            interstage_factors: vec![1.5, 0.5],
            ..clean_space()
        };
        let designs = enumerate_designs(&space).unwrap();
        // AR 1 takes both tip counts, AR 5 only its dictated 20 tips.
        assert_eq!(designs.len(), 2 * 2 * 2 + 2 * 1 * 2);
        assert_eq!(designs[0].design.stage.emitter.aspect_ratio, 1.0);
        assert_eq!(designs[0].design.interstage_factor, 0.5);
        assert_eq!(designs[1].design.interstage_factor, 1.5);
        let last = &designs.last().unwrap().design;
        assert_eq!(last.stage.emitter.aspect_ratio, 5.0);
        assert_eq!(last.stage.emitter.tip_count, 20);
        for d in &designs {
            if d.design.interstage_factor == 0.5 {
                assert_eq!(d.rejected.as_deref(), Some("interstage-arcing"));
            } else {
                assert_eq!(d.rejected, None);
            }
        }
    }

    #[test]
    fn enumeration_rejects_fractional_tip_aspect_ratios() {
        let space = DesignSpace {
            aspect_ratios: vec![1.3],
            ..clean_space()
        };
        let designs = enumerate_designs(&space).unwrap();
        assert_eq!(designs.len(), 1);
        assert_eq!(designs[0].rejected.as_deref(), Some("invalid-design"));
    }

    #[test]
    fn more_stages_and_more_voltage_win_on_density() {
        let space = DesignSpace {
            stage_counts: vec![1, 2, 3],
            ..clean_space()
        };
        let result = optimize(
            &space,
            &ceiling_objective(ObjectiveTarget::MaxThrustDensity),
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap();
        assert_eq!(result.best_design.stage_count, 3);
        // Density rises with voltage, so the optimum sits on the ceiling,
        // which the endpoint probe hits exactly.
        assert_eq!(result.best_voltage, 3.3e3);
        assert_eq!(result.evaluated_count, 3);
        assert_eq!(result.feasible_count, 3);
        assert!(result.rejections.is_empty());
        assert_relative_eq!(
            result.objective_value,
            result.metrics.thrust_density,
            max_relative = 1e-15
        );
    }

    #[test]
    fn efficiency_objective_prefers_low_voltage_and_one_stage_is_tied() {
        // With no degradation the stack efficiency is stage-count
        // independent, so the first enumerated count wins the tie.
        let space = DesignSpace {
            stage_counts: vec![3, 1, 2],
            ..clean_space()
        };
        let result = optimize(
            &space,
            &ceiling_objective(ObjectiveTarget::MaxEfficiency),
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap();
        assert_eq!(result.best_design.stage_count, 1);
        assert_eq!(result.best_voltage, 2.5e3);
    }

    #[test]
    fn min_efficiency_caps_the_operating_voltage() {
        // beta = 1 and no clamp give efficiency = gap/(mobility*V) = 10/V,
        // so a floor of 10/3000 admits voltages up to exactly 3000 V.
        let objective = Objective::new(
            ObjectiveTarget::MaxThrustDensity,
            vec![
                Constraint::MaxVoltage(3.3e3),
                Constraint::MinEfficiency(10.0 / 3000.0),
            ],
        )
        .unwrap();
        let result = optimize(
            &clean_space(),
            &objective,
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap();
        assert_relative_eq!(result.best_voltage, 3000.0, max_relative = 1e-9);
        assert!(result.metrics.efficiency * (1.0 + 1e-9) >= 10.0 / 3000.0);
    }

    #[test]
    fn min_total_thrust_raises_the_voltage_floor() {
        // Single stage, beta = 1: thrust = 1e-10 * V * (V - 2400), which
        // crosses 1.8e-4 N at exactly 3000 V. Maximizing efficiency then
        // pins the optimum to that floor.
        let objective = Objective::new(
            ObjectiveTarget::MaxEfficiency,
            vec![
                Constraint::MaxVoltage(3.3e3),
                Constraint::MinTotalThrust(1.8e-4),
            ],
        )
        .unwrap();
        let result = optimize(
            &clean_space(),
            &objective,
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap();
        assert_relative_eq!(result.best_voltage, 3000.0, max_relative = 1e-9);
        assert!(result.metrics.total_thrust * (1.0 + 1e-9) >= 1.8e-4);
    }

    #[test]
    fn unreachable_efficiency_floor_is_named() {
        // Just above onset the efficiency tops out at 10/2400; asking for
        // more is infeasible and the binding constraint says which.
        let objective = Objective::new(
            ObjectiveTarget::MaxThrustDensity,
            vec![
                Constraint::MaxVoltage(3.3e3),
                Constraint::MinEfficiency(4.2e-3),
            ],
        )
        .unwrap();
        let design = enumerate_designs(&clean_space()).unwrap()[0].design.clone();
        let outcome = evaluate(
            &design,
            &objective,
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap();
        assert!(!outcome.feasible);
        assert_eq!(outcome.binding_constraint.as_deref(), Some("efficiency"));

        let err = optimize(
            &clean_space(),
            &objective,
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap_err();
        match err {
            OptimizeError::EmptyFeasibleSet {
                evaluated,
                rejections,
            } => {
                assert_eq!(evaluated, 1);
                assert_eq!(rejections.get("efficiency"), Some(&1));
            }
            other => panic!("expected EmptyFeasibleSet, got {other:?}"),
        }
    }

    #[test]
    fn no_soft_violations_rejects_shallow_bends() {
        // The default 1 mm bend leaves the wall clearance under the
        // ionization radius, a soft violation.
        let space = DesignSpace {
            bend_depth: 1.0e-3,
            ..clean_space()
        };
        let objective = Objective::new(
            ObjectiveTarget::MaxThrustDensity,
            vec![Constraint::MaxVoltage(3.3e3), Constraint::NoSoftViolations],
        )
        .unwrap();
        let err = optimize(
            &space,
            &objective,
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .unwrap_err();
        match err {
            OptimizeError::EmptyFeasibleSet { rejections, .. } => {
                assert_eq!(rejections.get("no-soft-violations"), Some(&1));
            }
            other => panic!("expected EmptyFeasibleSet, got {other:?}"),
        }

        // The same request succeeds once the bend is deep enough.
        assert!(optimize(
            &clean_space(),
            &objective,
            &zero_slope_calib(),
            &FluidMedium::default(),
        )
        .is_ok());
    }

    #[test]
    fn optimizer_matches_a_one_volt_grid_oracle() {
        let space = DesignSpace {
            stage_counts: vec![1, 2],
            tip_counts: vec![3, 5],
            gaps: vec![1.5e-3, 2.0e-3],
            ..clean_space()
        };
        let calib = zero_slope_calib();
        let medium = FluidMedium::default();
        let objective = ceiling_objective(ObjectiveTarget::MaxThrustDensity);

        let mut oracle: Option<(usize, f64, f64)> = None;
        let designs = enumerate_designs(&space).unwrap();
        for (i, entry) in designs.iter().enumerate() {
            if entry.rejected.is_some() {
                continue;
            }
            let mut d = entry.design.clone();
            d.corona = calib.corona;
            let mut v = space.voltage_range.0;
            while v <= space.voltage_range.1 {
                if let Ok(p) = stack::stack_performance(
                    &d,
                    v,
                    &calib.degradation,
                    &calib.penalty_model(),
                    &medium,
                ) {
                    let better = match oracle {
                        None => true,
                        Some((_, _, best)) => p.thrust_density > best,
                    };
                    if better {
                        oracle = Some((i, v, p.thrust_density));
                    }
                }
                v += 1.0;
            }
        }
        let (oracle_idx, oracle_v, oracle_val) = oracle.unwrap();

        let result = optimize(&space, &objective, &calib, &medium).unwrap();
        assert_eq!(result.best_design, {
            let mut d = designs[oracle_idx].design.clone();
            d.corona = calib.corona;
            d
        });
        assert!((result.best_voltage - oracle_v).abs() <= 1.0);
        assert!(result.objective_value >= oracle_val * (1.0 - 1e-12));
    }

    #[test]
    fn optimizer_is_bit_deterministic() {
        let space = DesignSpace {
            stage_counts: vec![1, 2, 3],
            tip_counts: vec![3, 4, 5],
            ..clean_space()
        };
        let objective = ceiling_objective(ObjectiveTarget::MaxTotalThrust);
        let calib = CalibrationParams::default();
        let medium = FluidMedium::default();
        let a = optimize(&space, &objective, &calib, &medium).unwrap();
        let b = optimize(&space, &objective, &calib, &medium).unwrap();
        assert_eq!(a.best_voltage.to_bits(), b.best_voltage.to_bits());
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.best_design, b.best_design);
    }

    #[test]
    fn pareto_front_is_sorted_and_non_dominated() {
        let space = DesignSpace {
            aspect_ratios: vec![1.0, 5.0],
            stage_counts: vec![1, 2],
            ..clean_space()
        };
        let calib = zero_slope_calib();
        let medium = FluidMedium::default();
        let front = pareto_front(&space, &calib, &medium, 100.0).unwrap();
        assert!(!front.is_empty());
        for w in front.windows(2) {
            assert!(w[0].thrust_density <= w[1].thrust_density);
            if w[0].thrust_density < w[1].thrust_density {
                assert!(w[0].efficiency > w[1].efficiency);
            }
        }
        for a in &front {
            for b in &front {
                let dominates = b.thrust_density >= a.thrust_density
                    && b.efficiency >= a.efficiency
                    && (b.thrust_density > a.thrust_density || b.efficiency > a.efficiency);
                assert!(!dominates, "front contains a dominated point");
            }
        }

        let again = pareto_front(&space, &calib, &medium, 100.0).unwrap();
        assert_eq!(front.len(), again.len());
        for (a, b) in front.iter().zip(&again) {
            assert_eq!(a.voltage.to_bits(), b.voltage.to_bits());
            assert_eq!(a.thrust_density.to_bits(), b.thrust_density.to_bits());
            assert_eq!(a.efficiency.to_bits(), b.efficiency.to_bits());
        }
    }

    #[test]
    fn space_validation_catches_bad_axes() {
        let mut space = clean_space();
        space.gaps.clear();
        assert!(matches!(
            space.validate(),
            Err(OptimizeError::InvalidSpace(_))
        ));

        let mut space = clean_space();
        space.lateral_clearance = 3.1e-3;
        assert!(matches!(
            space.validate(),
            Err(OptimizeError::InvalidSpace(_))
        ));

        let mut space = clean_space();
        space.voltage_range = (3.0e3, 2.0e3);
        assert!(matches!(
            space.validate(),
            Err(OptimizeError::InvalidSpace(_))
        ));
    }
}
