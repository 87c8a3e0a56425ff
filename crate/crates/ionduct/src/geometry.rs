//! Electrode and duct geometry for ducted EAD thruster stages.
//!
//! The duct cross-section is a stadium: a rectangle of height `h` and width
//! `w >= h` with semicircular caps of radius `h/2`, centered at the origin
//! with the long axis along x. Emitter tips sit on an inset stadium contour
//! and point inward toward the duct centerline; the collector is a grid of
//! wires spanning the same cross-section one gap downstream.
//!
//! All lengths are meters. Angles held in fields are degrees; internal
//! trigonometry is radians.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    /// Input outside an operation's domain: non-finite, wrong sign, or
    /// inconsistent with a structural invariant.
    #[error("geometry domain error: {0}")]
    Domain(String),
    /// The requested electrode layout cannot be realized on the contour.
    #[error("layout infeasible: {0}")]
    Layout(String),
    /// Geometry collapses to zero measure.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

fn require_finite(name: &str, v: f64) -> Result<(), GeometryError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::Domain(format!("{name} must be finite, got {v}")))
    }
}

fn require_positive(name: &str, v: f64) -> Result<(), GeometryError> {
    require_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn require_non_negative(name: &str, v: f64) -> Result<(), GeometryError> {
    require_finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(GeometryError::Domain(format!("{name} must be >= 0, got {v}")))
    }
}

/// Lateral footprint radius of a single corona tip: `arctan(pi/3) * gap`.
///
/// Tips packed closer than twice this radius share their space-charge
/// envelope and stop behaving as independent emitters.
pub fn warburg_radius(gap: f64) -> Result<f64, GeometryError> {
    require_positive("gap", gap)?;
    Ok((PI / 3.0).atan() * gap)
}

/// Straight-line spacing of `tip_count` points equally spaced on a circle
/// of diameter `inner_diameter`: `d * sin(pi / n)`.
pub fn chord_spacing(inner_diameter: f64, tip_count: u32) -> Result<f64, GeometryError> {
    require_positive("inner_diameter", inner_diameter)?;
    if tip_count < 2 {
        return Err(GeometryError::Domain(format!(
            "chord spacing needs at least 2 tips, got {tip_count}"
        )));
    }
    Ok(inner_diameter * (PI / f64::from(tip_count)).sin())
}

/// Straight-line distance from a tip apex to the annulus lip:
/// `sqrt(lateral^2 + bend_depth^2)`.
///
/// `lateral` is the in-plane component `(d2 - d1) / 2`; `bend_depth` is the
/// out-of-plane offset introduced when tips are bent toward the collector.
pub fn tip_to_lip_clearance(lateral: f64, bend_depth: f64) -> Result<f64, GeometryError> {
    require_non_negative("lateral", lateral)?;
    require_non_negative("bend_depth", bend_depth)?;
    Ok(lateral.hypot(bend_depth))
}

/// Area of a stadium cross-section: `pi * (h/2)^2 + (w - h) * h`.
pub fn stadium_area(height: f64, width: f64) -> Result<f64, GeometryError> {
    require_positive("height", height)?;
    require_finite("width", width)?;
    if width < height {
        return Err(GeometryError::Domain(format!(
            "stadium width {width} must be >= height {height}"
        )));
    }
    let r = height / 2.0;
    Ok(PI * r * r + (width - height) * height)
}

/// Open inlet area of a stage's duct cross-section.
pub fn inner_area(stage: &StageGeometry) -> Result<f64, GeometryError> {
    stage.validate()?;
    stadium_area(stage.duct_inner_height, stage.duct_inner_width)
}

/// Stadium contour centered at the origin: straight sections of half-length
/// `half_straight` along x, caps of radius `radius` centered at
/// `(+-half_straight, 0)`. `half_straight == 0` degenerates to a circle.
///
/// Arc length is measured counterclockwise from the rightmost point
/// `(half_straight + radius, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StadiumContour {
    pub half_straight: f64,
    pub radius: f64,
}

impl StadiumContour {
    /// Contour of the stadium inscribed in a `height x width` box.
    pub fn from_box(height: f64, width: f64) -> Result<Self, GeometryError> {
        require_positive("height", height)?;
        require_finite("width", width)?;
        if width < height {
            return Err(GeometryError::Domain(format!(
                "stadium width {width} must be >= height {height}"
            )));
        }
        Ok(Self {
            half_straight: (width - height) / 2.0,
            radius: height / 2.0,
        })
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius + 4.0 * self.half_straight
    }

    /// Point at arc length `s` from the start, counterclockwise; `s` wraps.
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        let a = self.half_straight;
        let r = self.radius;
        let len = self.perimeter();
        let s = s.rem_euclid(len);
        let q = PI * r / 2.0;
        if s < q {
            let th = s / r;
            [a + r * th.cos(), r * th.sin()]
        } else if s < q + 2.0 * a {
            [a - (s - q), r]
        } else if s < q + 2.0 * a + PI * r {
            let th = PI / 2.0 + (s - q - 2.0 * a) / r;
            [-a + r * th.cos(), r * th.sin()]
        } else if s < q + 4.0 * a + PI * r {
            [-a + (s - q - 2.0 * a - PI * r), -r]
        } else {
            let th = 3.0 * PI / 2.0 + (s - q - 4.0 * a - PI * r) / r;
            [a + r * th.cos(), r * th.sin()]
        }
    }

    /// Maps an arc position to the arc position on a concentric offset
    /// contour (same `half_straight`, different radius) along the common
    /// normal: cap points keep their angle, straight points keep their x.
    pub fn corresponding_arc(&self, s: f64, other: &Self) -> f64 {
        debug_assert!((self.half_straight - other.half_straight).abs() < 1e-12);
        let a = self.half_straight;
        let (r1, r2) = (self.radius, other.radius);
        let (q1, q2) = (PI * r1 / 2.0, PI * r2 / 2.0);
        let s = s.rem_euclid(self.perimeter());
        if s < q1 {
            (s / r1) * r2
        } else if s < q1 + 2.0 * a {
            q2 + (s - q1)
        } else if s < q1 + 2.0 * a + PI * r1 {
            q2 + 2.0 * a + ((s - q1 - 2.0 * a) / r1) * r2
        } else if s < q1 + 4.0 * a + PI * r1 {
            q2 + 2.0 * a + PI * r2 + (s - q1 - 2.0 * a - PI * r1)
        } else {
            q2 + 4.0 * a + PI * r2 + ((s - q1 - 4.0 * a - PI * r1) / r1) * r2
        }
    }

    /// Signed distance from a point to the contour; negative inside.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let qx = (p[0].abs() - self.half_straight).max(0.0);
        qx.hypot(p[1]) - self.radius
    }
}

/// Annular emitter electrode carrying inward-pointing corona tips.
///
/// The annulus lip follows the duct contour at diameter `outer_diameter`;
/// tips of in-plane height `(outer_diameter - inner_diameter) / 2` reach
/// down to the `inner_diameter` contour, optionally bent out of plane by
/// `bend_depth` toward the collector.
#[derive(Clone, Debug, PartialEq)]
pub struct EmitterRing {
    pub inner_diameter: f64,
    pub outer_diameter: f64,
    pub tip_count: u32,
    pub tip_angle_deg: f64,
    pub bend_depth: f64,
    pub aspect_ratio: f64,
    pub duct_height: f64,
}

impl EmitterRing {
    pub const DEFAULT_TIP_ANGLE_DEG: f64 = 5.0;
    pub const DEFAULT_BEND_DEPTH: f64 = 1e-3;

    /// Ring with the nominal tip angle and bend depth.
    pub fn new(
        inner_diameter: f64,
        outer_diameter: f64,
        tip_count: u32,
        aspect_ratio: f64,
        duct_height: f64,
    ) -> Result<Self, GeometryError> {
        let ring = Self {
            inner_diameter,
            outer_diameter,
            tip_count,
            tip_angle_deg: Self::DEFAULT_TIP_ANGLE_DEG,
            bend_depth: Self::DEFAULT_BEND_DEPTH,
            aspect_ratio,
            duct_height,
        };
        ring.validate()?;
        Ok(ring)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        require_positive("inner_diameter", self.inner_diameter)?;
        require_positive("outer_diameter", self.outer_diameter)?;
        require_positive("duct_height", self.duct_height)?;
        require_non_negative("bend_depth", self.bend_depth)?;
        require_finite("tip_angle_deg", self.tip_angle_deg)?;
        require_finite("aspect_ratio", self.aspect_ratio)?;
        if self.inner_diameter >= self.outer_diameter {
            return Err(GeometryError::Domain(format!(
                "inner diameter {} must be smaller than outer diameter {}",
                self.inner_diameter, self.outer_diameter
            )));
        }
        if self.outer_diameter > self.duct_height * (1.0 + 1e-12) {
            return Err(GeometryError::Domain(format!(
                "outer diameter {} exceeds duct height {}",
                self.outer_diameter, self.duct_height
            )));
        }
        if self.tip_count < 1 {
            return Err(GeometryError::Domain("tip_count must be >= 1".into()));
        }
        if !(self.tip_angle_deg > 0.0 && self.tip_angle_deg < 180.0) {
            return Err(GeometryError::Domain(format!(
                "tip angle {} deg must lie in (0, 180)",
                self.tip_angle_deg
            )));
        }
        if self.aspect_ratio < 1.0 {
            return Err(GeometryError::Domain(format!(
                "aspect ratio {} must be >= 1",
                self.aspect_ratio
            )));
        }
        if self.aspect_ratio > 1.0 {
            let expected = 4.0 * self.aspect_ratio;
            if (expected - f64::from(self.tip_count)).abs() > 1e-9 {
                return Err(GeometryError::Domain(format!(
                    "elongated rings require tip_count = 4 * aspect_ratio; \
                     aspect ratio {} wants {} tips, got {}",
                    self.aspect_ratio, expected, self.tip_count
                )));
            }
        }
        Ok(())
    }

    /// In-plane tip height, `(d2 - d1) / 2`.
    pub fn tip_height(&self) -> f64 {
        (self.outer_diameter - self.inner_diameter) / 2.0
    }

    /// In-plane component of the tip-to-lip clearance; equals
    /// [`tip_height`](Self::tip_height).
    pub fn lateral_clearance(&self) -> f64 {
        self.tip_height()
    }
}

/// Collector grid: wires of width `wire_width` on centers `pitch` apart,
/// spanning the duct cross-section in both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectorGrid {
    pub wire_width: f64,
    pub pitch: f64,
}

impl Default for CollectorGrid {
    fn default() -> Self {
        Self {
            wire_width: 50e-6,
            pitch: 1e-3,
        }
    }
}

impl CollectorGrid {
    pub fn validate(&self) -> Result<(), GeometryError> {
        require_positive("wire_width", self.wire_width)?;
        require_positive("pitch", self.pitch)?;
        if self.wire_width >= self.pitch {
            return Err(GeometryError::Domain(format!(
                "wire width {} must be smaller than pitch {}",
                self.wire_width, self.pitch
            )));
        }
        Ok(())
    }
}

/// One thruster stage: an emitter ring facing a collector grid across an
/// axial `gap`, inside a duct of stadium cross-section
/// `duct_inner_height x duct_inner_width`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageGeometry {
    pub emitter: EmitterRing,
    pub collector: CollectorGrid,
    pub gap: f64,
    pub duct_inner_height: f64,
    pub duct_inner_width: f64,
}

impl StageGeometry {
    pub const DEFAULT_GAP: f64 = 2e-3;

    /// Stage with duct dimensions derived from the emitter:
    /// height from `emitter.duct_height`, width from its aspect ratio.
    pub fn new(
        emitter: EmitterRing,
        collector: CollectorGrid,
        gap: f64,
    ) -> Result<Self, GeometryError> {
        let duct_inner_height = emitter.duct_height;
        let duct_inner_width = emitter.duct_height * emitter.aspect_ratio;
        let stage = Self {
            emitter,
            collector,
            gap,
            duct_inner_height,
            duct_inner_width,
        };
        stage.validate()?;
        Ok(stage)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        self.emitter.validate()?;
        self.collector.validate()?;
        require_positive("gap", self.gap)?;
        require_positive("duct_inner_height", self.duct_inner_height)?;
        require_positive("duct_inner_width", self.duct_inner_width)?;
        let h = self.duct_inner_height;
        if (h - self.emitter.duct_height).abs() > 1e-12 * h.max(1.0) {
            return Err(GeometryError::Domain(format!(
                "duct_inner_height {} disagrees with emitter duct_height {}",
                h, self.emitter.duct_height
            )));
        }
        let w = self.duct_inner_width;
        let expected_w = h * self.emitter.aspect_ratio;
        if (w - expected_w).abs() > 1e-9 * expected_w.max(1.0) {
            return Err(GeometryError::Domain(format!(
                "duct_inner_width {} disagrees with height {} x aspect ratio {}",
                w, h, self.emitter.aspect_ratio
            )));
        }
        Ok(())
    }

    /// Duct wall contour.
    pub fn duct_contour(&self) -> Result<StadiumContour, GeometryError> {
        StadiumContour::from_box(self.duct_inner_height, self.duct_inner_width)
    }

    /// Annulus lip contour: the duct contour inset to diameter `d2`.
    pub fn lip_contour(&self) -> Result<StadiumContour, GeometryError> {
        let d2 = self.emitter.outer_diameter;
        StadiumContour::from_box(d2, self.duct_inner_width - (self.duct_inner_height - d2))
    }

    /// Tip apex contour: the duct contour inset to diameter `d1`.
    pub fn tip_contour(&self) -> Result<StadiumContour, GeometryError> {
        let d1 = self.emitter.inner_diameter;
        StadiumContour::from_box(d1, self.duct_inner_width - (self.duct_inner_height - d1))
    }
}

/// Arc positions of `n` equally spaced tips on a contour, starting at the
/// right cap apex. Shared by layout and outline so apexes agree bit-exactly.
fn tip_arc_positions(contour: &StadiumContour, n: u32) -> Vec<f64> {
    let spacing = contour.perimeter() / f64::from(n);
    (0..n).map(|i| f64::from(i) * spacing).collect()
}

fn layout_positions_unchecked(stage: &StageGeometry) -> Result<Vec<[f64; 2]>, GeometryError> {
    let contour = stage.tip_contour()?;
    Ok(tip_arc_positions(&contour, stage.emitter.tip_count)
        .iter()
        .map(|&s| contour.point_at(s))
        .collect())
}

/// Tip apex coordinates in the stage cross-section plane: equally spaced in
/// arc length along the inner (`d1`) contour, starting at the right cap apex
/// `(w/2 - (h - d1)/2, 0)`.
///
/// Errors if the contour cannot hold `tip_count` tips without their bases
/// overlapping (arc spacing below the tip base width).
pub fn layout_emitters(stage: &StageGeometry) -> Result<Vec<[f64; 2]>, GeometryError> {
    stage.validate()?;
    let contour = stage.tip_contour()?;
    let n = stage.emitter.tip_count;
    let spacing = contour.perimeter() / f64::from(n);
    let base_width =
        2.0 * stage.emitter.tip_height() * (stage.emitter.tip_angle_deg.to_radians() / 2.0).tan();
    if n >= 2 && spacing < base_width {
        return Err(GeometryError::Layout(format!(
            "{} tips on a {:.4} mm contour leave {:.4} mm per tip, below the \
             {:.4} mm tip base width",
            n,
            contour.perimeter() * 1e3,
            spacing * 1e3,
            base_width * 1e3
        )));
    }
    layout_positions_unchecked(stage)
}

/// Smallest pairwise distance in a point set; `None` for fewer than 2 points.
pub fn nearest_neighbor_spacing(points: &[[f64; 2]]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let d = (p[0] - q[0]).hypot(p[1] - q[1]);
            if d < best {
                best = d;
            }
        }
    }
    Some(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    /// Degrades performance (raises onset voltage); the design still works.
    Soft,
    /// Breaks the device (arcing); the design must be rejected.
    Hard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClearanceRule {
    WallClearance,
    TipSpacing,
    InterstageArcing,
    InterstageReverseCorona,
}

impl ClearanceRule {
    pub fn id(&self) -> &'static str {
        match self {
            Self::WallClearance => "wall-clearance",
            Self::TipSpacing => "tip-spacing",
            Self::InterstageArcing => "interstage-arcing",
            Self::InterstageReverseCorona => "interstage-reverse-corona",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub rule: ClearanceRule,
    pub severity: Severity,
    pub measured: f64,
    pub threshold: f64,
    pub message: String,
}

/// Outcome of a clearance audit. Empty exactly when the stage satisfies
/// every spacing rule.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintReport {
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_hard(&self) -> bool {
        self.violations.iter().any(|v| v.severity == Severity::Hard)
    }

    pub fn hard_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Hard)
    }

    pub fn soft_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Soft)
    }
}

/// Audits a stage (plus its interstage spacing factor) against the spacing
/// rules. Violations are reported, never errored; `Err` only means the stage
/// itself is structurally invalid.
///
/// Rules:
/// * wall clearance (soft): tip-to-lip clearance below the Warburg radius;
/// * tip spacing (soft): nearest tips closer than twice the Warburg radius;
/// * interstage arcing (hard): stages closer than one gap;
/// * reverse corona (soft): stages closer than 1.5 gaps.
pub fn clearance_check(
    stage: &StageGeometry,
    interstage_factor: f64,
) -> Result<ConstraintReport, GeometryError> {
    stage.validate()?;
    require_positive("interstage_factor", interstage_factor)?;
    let mut report = ConstraintReport::default();
    let r = warburg_radius(stage.gap)?;

    let cl = tip_to_lip_clearance(stage.emitter.lateral_clearance(), stage.emitter.bend_depth)?;
    if cl < r {
        report.violations.push(Violation {
            rule: ClearanceRule::WallClearance,
            severity: Severity::Soft,
            measured: cl,
            threshold: r,
            message: format!(
                "tip-to-lip clearance {:.4} mm is below the Warburg radius {:.4} mm; \
                 onset voltage rises",
                cl * 1e3,
                r * 1e3
            ),
        });
    }

    if stage.emitter.tip_count >= 2 {
        let positions = layout_positions_unchecked(stage)?;
        let spacing = nearest_neighbor_spacing(&positions).unwrap_or(f64::INFINITY);
        if spacing < 2.0 * r {
            report.violations.push(Violation {
                rule: ClearanceRule::TipSpacing,
                severity: Severity::Soft,
                measured: spacing,
                threshold: 2.0 * r,
                message: format!(
                    "tip spacing {:.4} mm is below twice the Warburg radius {:.4} mm; \
                     tips stop acting as independent emitters",
                    spacing * 1e3,
                    2.0 * r * 1e3
                ),
            });
        }
    }

    if interstage_factor < 1.0 {
        report.violations.push(Violation {
            rule: ClearanceRule::InterstageArcing,
            severity: Severity::Hard,
            measured: interstage_factor,
            threshold: 1.0,
            message: format!(
                "interstage spacing factor {interstage_factor} is below 1; \
                 adjacent stages arc"
            ),
        });
    } else if interstage_factor < 1.5 {
        report.violations.push(Violation {
            rule: ClearanceRule::InterstageReverseCorona,
            severity: Severity::Soft,
            measured: interstage_factor,
            threshold: 1.5,
            message: format!(
                "interstage spacing factor {interstage_factor} is below 1.5; \
                 reverse corona erodes thrust"
            ),
        });
    }

    Ok(report)
}

/// Linear penalty slopes (volts per unit relative deficit) applied to the
/// corona onset voltage when clearance rules are violated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnsetPenaltyModel {
    pub wall_coeff: f64,
    pub tip_coeff: f64,
}

/// Wall slope anchored so that a 1.25 mm tip-to-lip clearance at a 2 mm gap
/// costs 200 V of onset.
pub fn anchored_wall_coeff() -> f64 {
    let r = (PI / 3.0).atan() * 2e-3;
    200.0 * r / (r - 1.25e-3)
}

impl Default for OnsetPenaltyModel {
    fn default() -> Self {
        // No tip-spacing anchor is available, so both slopes share the wall
        // anchor until calibration replaces them.
        let c = anchored_wall_coeff();
        Self {
            wall_coeff: c,
            tip_coeff: c,
        }
    }
}

impl OnsetPenaltyModel {
    pub fn validate(&self) -> Result<(), GeometryError> {
        require_non_negative("wall_coeff", self.wall_coeff)?;
        require_non_negative("tip_coeff", self.tip_coeff)
    }
}

/// Relative clearance deficits `(wall, tip)` of a stage, each in [0, 1):
/// `max(0, r - cl)/r` and `max(0, 2r - c)/(2r)` with `r` the Warburg radius,
/// `cl` the tip-to-lip clearance, and `c` the nearest-neighbor tip spacing.
/// Both are zero exactly when the corresponding rule is satisfied.
pub fn clearance_deficits(stage: &StageGeometry) -> Result<(f64, f64), GeometryError> {
    stage.validate()?;
    let r = warburg_radius(stage.gap)?;
    let cl = tip_to_lip_clearance(stage.emitter.lateral_clearance(), stage.emitter.bend_depth)?;
    let wall = (r - cl).max(0.0) / r;
    let tip = if stage.emitter.tip_count >= 2 {
        let positions = layout_positions_unchecked(stage)?;
        let c = nearest_neighbor_spacing(&positions).unwrap_or(f64::INFINITY);
        (2.0 * r - c).max(0.0) / (2.0 * r)
    } else {
        0.0
    };
    Ok((wall, tip))
}

/// Additive onset-voltage penalty for a stage:
/// `wall_coeff * wall_deficit + tip_coeff * tip_deficit` over the
/// [`clearance_deficits`]. Zero exactly when both rules are satisfied.
pub fn onset_penalty(stage: &StageGeometry, model: &OnsetPenaltyModel) -> Result<f64, GeometryError> {
    model.validate()?;
    let (wall, tip) = clearance_deficits(stage)?;
    Ok(model.wall_coeff * wall + model.tip_coeff * tip)
}

/// Fabrication outline of a stage in the cross-section plane: closed
/// polylines in meters, without a repeated closing vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectrodeOutline {
    /// Outer rim contour, then the lip contour with tip triangles spliced in.
    pub emitter: Vec<Vec<[f64; 2]>>,
    /// Duct boundary, then horizontal wires bottom-to-top, then vertical
    /// wires left-to-right, each wire a 4-vertex rectangle.
    pub collector: Vec<Vec<[f64; 2]>>,
}

/// Default emitter rim width beyond the lip contour.
pub const DEFAULT_RIM_WIDTH: f64 = 2e-3;

/// Arc sampling step for curved outline sections.
const OUTLINE_ARC_STEP: f64 = 2e-4;

fn sample_closed(contour: &StadiumContour, step: f64) -> Vec<[f64; 2]> {
    let len = contour.perimeter();
    let n = ((len / step).ceil() as usize).max(8);
    (0..n)
        .map(|k| contour.point_at(len * (k as f64) / (n as f64)))
        .collect()
}

fn sample_between(contour: &StadiumContour, s0: f64, s1: f64, step: f64) -> Vec<[f64; 2]> {
    let span = s1 - s0;
    debug_assert!(span >= 0.0);
    let m = (span / step).floor() as usize;
    (1..=m)
        .map(|k| contour.point_at(s0 + span * (k as f64) / (m as f64 + 1.0)))
        .collect()
}

/// Top-view manufacturing outline of both electrodes.
///
/// The emitter is drawn as its rim (lip contour offset outward by
/// `rim_width`) plus the lip contour with one 3-vertex triangular tip per
/// emitter, apexes landing exactly on the [`layout_emitters`] positions.
/// The collector is the duct boundary plus one rectangle per grid wire.
/// Tip bend depth is an out-of-plane offset and does not appear here.
pub fn electrode_outline(
    stage: &StageGeometry,
    rim_width: f64,
) -> Result<ElectrodeOutline, GeometryError> {
    stage.validate()?;
    require_positive("rim_width", rim_width)?;
    if stage.emitter.tip_height() <= 0.0 {
        return Err(GeometryError::Degenerate("tips have zero height".into()));
    }
    let apex_positions = layout_emitters(stage)?;
    let lip = stage.lip_contour()?;
    let tipc = stage.tip_contour()?;
    let n = stage.emitter.tip_count;

    let rim = StadiumContour {
        half_straight: lip.half_straight,
        radius: lip.radius + rim_width,
    };
    let rim_poly = sample_closed(&rim, OUTLINE_ARC_STEP);

    // Tip bases sit on the lip contour, centered on the normal projection of
    // each apex; base half-width is measured along the lip arc.
    let half_base =
        stage.emitter.tip_height() * (stage.emitter.tip_angle_deg.to_radians() / 2.0).tan();
    let lip_len = lip.perimeter();
    let base_arcs: Vec<f64> = tip_arc_positions(&tipc, n)
        .iter()
        .map(|&s| tipc.corresponding_arc(s, &lip))
        .collect();
    for i in 0..n as usize {
        let next = if i + 1 < n as usize {
            base_arcs[i + 1]
        } else {
            base_arcs[0] + lip_len
        };
        if next - base_arcs[i] < 2.0 * half_base {
            return Err(GeometryError::Layout(format!(
                "tip bases overlap on the lip contour between tips {} and {}",
                i,
                (i + 1) % n as usize
            )));
        }
    }
    let mut lip_poly: Vec<[f64; 2]> = Vec::new();
    for i in 0..n as usize {
        lip_poly.push(lip.point_at(base_arcs[i] - half_base));
        lip_poly.push(apex_positions[i]);
        lip_poly.push(lip.point_at(base_arcs[i] + half_base));
        let next = if i + 1 < n as usize {
            base_arcs[i + 1]
        } else {
            base_arcs[0] + lip_len
        };
        lip_poly.extend(sample_between(
            &lip,
            base_arcs[i] + half_base,
            next - half_base,
            OUTLINE_ARC_STEP,
        ));
    }

    let duct = stage.duct_contour()?;
    let mut collector = vec![sample_closed(&duct, OUTLINE_ARC_STEP)];
    let hw = stage.collector.wire_width / 2.0;
    let pitch = stage.collector.pitch;
    let (a, r) = (duct.half_straight, duct.radius);

    let kmax = ((r - hw) / pitch).floor() as i64;
    for k in -kmax..=kmax {
        let y = pitch * k as f64;
        let edge = y.abs() + hw;
        if edge >= r {
            continue;
        }
        let x = a + (r * r - edge * edge).sqrt();
        collector.push(vec![[-x, y - hw], [x, y - hw], [x, y + hw], [-x, y + hw]]);
    }
    let wmax = a + r;
    let jmax = ((wmax - hw) / pitch).floor() as i64;
    for j in -jmax..=jmax {
        let x = pitch * j as f64;
        let edge = x.abs() + hw;
        if edge >= wmax {
            continue;
        }
        let y = if edge <= a {
            r
        } else {
            (r * r - (edge - a) * (edge - a)).sqrt()
        };
        collector.push(vec![[x - hw, -y], [x + hw, -y], [x + hw, y], [x - hw, y]]);
    }

    Ok(ElectrodeOutline {
        emitter: vec![rim_poly, lip_poly],
        collector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ring(ar: f64, tips: u32) -> EmitterRing {
        EmitterRing::new(4e-3, 6e-3, tips, ar, 6e-3).unwrap()
    }

    fn stage(ar: f64, tips: u32) -> StageGeometry {
        StageGeometry::new(ring(ar, tips), CollectorGrid::default(), 2e-3).unwrap()
    }

    #[test]
    fn warburg_radius_matches_arctan_scaling() {
        let r = warburg_radius(2e-3).unwrap();
        assert_relative_eq!(r, 1.616_897_585_260_044e-3, max_relative = 1e-15);
        assert!(r > 1.61e-3 && r < 1.63e-3);
        let r4 = warburg_radius(4e-3).unwrap();
        assert_relative_eq!(r4, 2.0 * r, max_relative = 1e-15);
        assert!(warburg_radius(0.0).is_err());
        assert!(warburg_radius(-1e-3).is_err());
    }

    #[test]
    fn chord_spacing_known_values_and_monotonicity() {
        assert_relative_eq!(
            chord_spacing(4e-3, 3).unwrap(),
            3.464_101_615_137_754_3e-3,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            chord_spacing(4e-3, 5).unwrap(),
            2.351_141_009_169_892_4e-3,
            max_relative = 1e-15
        );
        let mut prev = f64::INFINITY;
        for n in 2..=40 {
            let c = chord_spacing(4e-3, n).unwrap();
            assert!(c < prev, "chord must strictly decrease with tip count");
            prev = c;
        }
        assert!(chord_spacing(4e-3, 1).is_err());
        assert!(chord_spacing(0.0, 3).is_err());
    }

    #[test]
    fn clearance_combines_lateral_and_bend() {
        assert_relative_eq!(
            tip_to_lip_clearance(1e-3, 2e-3).unwrap(),
            2.236_067_977_499_79e-3,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            tip_to_lip_clearance(1e-3, 1e-3).unwrap(),
            1.414_213_562_373_095_1e-3,
            max_relative = 1e-15
        );
        assert_eq!(tip_to_lip_clearance(1.25e-3, 0.0).unwrap(), 1.25e-3);
        assert!(tip_to_lip_clearance(-1e-3, 0.0).is_err());
    }

    #[test]
    fn stadium_area_known_values() {
        // 6 mm duct at aspect ratios 5 and 9.
        assert_relative_eq!(
            stadium_area(6e-3, 30e-3).unwrap(),
            1.722_743_338_823_081_3e-4,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            stadium_area(6e-3, 54e-3).unwrap(),
            3.162_743_338_823_081_6e-4,
            max_relative = 1e-15
        );
        // Circle limit.
        assert_relative_eq!(
            stadium_area(6e-3, 6e-3).unwrap(),
            PI * 9e-6,
            max_relative = 1e-15
        );
        assert!(stadium_area(6e-3, 5e-3).is_err());
    }

    #[test]
    fn stadium_area_is_linear_in_width() {
        let h = 6e-3;
        let a1 = stadium_area(h, 20e-3).unwrap();
        let a2 = stadium_area(h, 35e-3).unwrap();
        assert_relative_eq!(a2 - a1, 15e-3 * h, max_relative = 1e-12);
    }

    #[test]
    fn inner_area_uses_duct_cross_section() {
        assert_relative_eq!(
            inner_area(&stage(5.0, 20)).unwrap(),
            1.722_743_338_823_081_3e-4,
            max_relative = 1e-15
        );
    }

    #[test]
    fn ring_validation_enforces_tip_rule() {
        assert!(EmitterRing::new(4e-3, 6e-3, 20, 5.0, 6e-3).is_ok());
        assert!(EmitterRing::new(4e-3, 6e-3, 19, 5.0, 6e-3).is_err());
        assert!(EmitterRing::new(4e-3, 6e-3, 7, 1.0, 6e-3).is_ok());
        assert!(EmitterRing::new(6e-3, 4e-3, 3, 1.0, 6e-3).is_err());
        assert!(EmitterRing::new(4e-3, 6e-3, 3, 0.5, 6e-3).is_err());
        assert!(EmitterRing::new(4e-3, 8e-3, 3, 1.0, 6e-3).is_err());
    }

    #[test]
    fn stadium_contour_walks_counterclockwise() {
        let c = StadiumContour::from_box(4e-3, 28e-3).unwrap();
        assert_relative_eq!(c.perimeter(), 60.566_370_614_359_17e-3, max_relative = 1e-15);
        let start = c.point_at(0.0);
        assert_relative_eq!(start[0], 14e-3, max_relative = 1e-12);
        assert!(start[1].abs() < 1e-18);
        // Quarter way up the right cap, then along the top.
        let quarter = c.point_at(PI * 2e-3 / 2.0);
        assert_relative_eq!(quarter[0], 12e-3, max_relative = 1e-12);
        assert_relative_eq!(quarter[1], 2e-3, max_relative = 1e-12);
        let top_mid = c.point_at(PI * 2e-3 / 2.0 + 12e-3);
        assert_relative_eq!(top_mid[0], 0.0, epsilon = 1e-17);
        assert_relative_eq!(top_mid[1], 2e-3, max_relative = 1e-12);
        // Every sample lies on the contour.
        for k in 0..200 {
            let p = c.point_at(c.perimeter() * k as f64 / 200.0);
            assert!(c.signed_distance(p).abs() < 1e-15);
        }
    }

    #[test]
    fn corresponding_arc_preserves_angle_and_x() {
        let inner = StadiumContour::from_box(4e-3, 28e-3).unwrap();
        let outer = StadiumContour::from_box(6e-3, 30e-3).unwrap();
        assert_eq!(inner.half_straight, outer.half_straight);
        // Cap point: same polar angle about the cap center.
        let s = 0.7 * PI * inner.radius / 2.0;
        let p = inner.point_at(s);
        let q = outer.point_at(inner.corresponding_arc(s, &outer));
        let a = inner.half_straight;
        let ang_p = (p[1]).atan2(p[0] - a);
        let ang_q = (q[1]).atan2(q[0] - a);
        assert_relative_eq!(ang_p, ang_q, max_relative = 1e-12);
        // Straight point: same x, offset y.
        let s_top = PI * inner.radius / 2.0 + 5e-3;
        let p = inner.point_at(s_top);
        let q = outer.point_at(inner.corresponding_arc(s_top, &outer));
        assert_relative_eq!(p[0], q[0], max_relative = 1e-12);
        assert_relative_eq!(q[1], outer.radius, max_relative = 1e-12);
    }

    #[test]
    fn layout_circle_matches_chord_formula() {
        let pts = layout_emitters(&stage(1.0, 3)).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert_relative_eq!(p[0].hypot(p[1]), 2e-3, max_relative = 1e-12);
        }
        let nn = nearest_neighbor_spacing(&pts).unwrap();
        assert_relative_eq!(nn, chord_spacing(4e-3, 3).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn layout_elongated_ring_spacing() {
        // Aspect ratio 5: 20 tips on a 4 x 28 mm stadium contour.
        let pts = layout_emitters(&stage(5.0, 20)).unwrap();
        assert_eq!(pts.len(), 20);
        let contour = stage(5.0, 20).tip_contour().unwrap();
        for p in &pts {
            assert!(contour.signed_distance(*p).abs() < 1e-15);
        }
        // Arc spacing is exactly uniform; the tightest straight-line pair is
        // a cap chord.
        assert_relative_eq!(
            contour.perimeter() / 20.0,
            3.028_318_530_717_958_5e-3,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            nearest_neighbor_spacing(&pts).unwrap(),
            2.747_206_891_896_488_5e-3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn layout_arc_spacing_uniform_across_aspect_ratios() {
        for ar in 1..=9u32 {
            let tips = if ar == 1 { 8 } else { 4 * ar };
            let st = stage(f64::from(ar), tips);
            let pts = layout_emitters(&st).unwrap();
            let contour = st.tip_contour().unwrap();
            let len = contour.perimeter();
            // Recover arc positions from the construction and check the
            // consecutive gaps agree to float precision.
            let arcs = tip_arc_positions(&contour, tips);
            let mut gaps: Vec<f64> = arcs.windows(2).map(|w| w[1] - w[0]).collect();
            gaps.push(len - arcs[arcs.len() - 1]);
            let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = gaps.iter().cloned().fold(0.0, f64::max);
            assert!(max / min <= 1.1, "aspect ratio {ar}: {max} / {min}");
            assert!(max / min <= 1.0 + 1e-12);
            assert_eq!(pts.len(), tips as usize);
        }
    }

    #[test]
    fn layout_rejects_overcrowded_contour() {
        // 4000 tips on a ~12.6 mm circle: 3.1 um spacing, below the
        // 87 um tip base width.
        let st = StageGeometry::new(ring(1.0, 4000), CollectorGrid::default(), 2e-3).unwrap();
        match layout_emitters(&st) {
            Err(GeometryError::Layout(_)) => {}
            other => panic!("expected layout error, got {other:?}"),
        }
    }

    #[test]
    fn clearance_check_reports_soft_wall_violation() {
        // Bend depth 0: clearance 1 mm < Warburg radius 1.617 mm.
        let mut e = ring(1.0, 3);
        e.bend_depth = 0.0;
        let st = StageGeometry::new(e, CollectorGrid::default(), 2e-3).unwrap();
        let report = clearance_check(&st, 1.5).unwrap();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.rule, ClearanceRule::WallClearance);
        assert_eq!(v.severity, Severity::Soft);
        assert_relative_eq!(v.measured, 1e-3, max_relative = 1e-12);
        assert_relative_eq!(v.threshold, 1.616_897_585_260_044e-3, max_relative = 1e-12);
    }

    #[test]
    fn clearance_check_flags_crowded_tips() {
        // 5 tips on a 4 mm circle: chord 2.35 mm < 2r = 3.23 mm.
        let report = clearance_check(&stage(1.0, 5), 1.5).unwrap();
        let tip: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.rule == ClearanceRule::TipSpacing)
            .collect();
        assert_eq!(tip.len(), 1);
        assert_relative_eq!(
            tip[0].measured,
            2.351_141_009_169_892_4e-3,
            max_relative = 1e-12
        );
        // 3 tips: chord 3.46 mm clears the threshold.
        let report = clearance_check(&stage(1.0, 3), 1.5).unwrap();
        assert!(report
            .violations
            .iter()
            .all(|v| v.rule != ClearanceRule::TipSpacing));
    }

    #[test]
    fn clearance_check_interstage_rules() {
        let st = stage(1.0, 3);
        let hard = clearance_check(&st, 0.8).unwrap();
        assert!(hard.has_hard());
        assert_eq!(
            hard.hard_violations().next().unwrap().rule,
            ClearanceRule::InterstageArcing
        );
        let soft = clearance_check(&st, 1.2).unwrap();
        assert!(!soft.has_hard());
        assert!(soft
            .violations
            .iter()
            .any(|v| v.rule == ClearanceRule::InterstageReverseCorona));
        for ok in [1.5, 1.75, 2.0] {
            let report = clearance_check(&st, ok).unwrap();
            assert!(report
                .violations
                .iter()
                .all(|v| v.rule == ClearanceRule::WallClearance
                    || v.rule == ClearanceRule::TipSpacing));
        }
    }

    #[test]
    fn clean_stage_produces_empty_report() {
        // Bend depth 2 mm lifts the clearance to 2.24 mm > 1.62 mm; 3 tips
        // clear the spacing rule; interstage 1.5 passes.
        let mut e = ring(1.0, 3);
        e.bend_depth = 2e-3;
        let st = StageGeometry::new(e, CollectorGrid::default(), 2e-3).unwrap();
        let report = clearance_check(&st, 1.5).unwrap();
        assert!(report.is_clean());
        assert_eq!(
            onset_penalty(&st, &OnsetPenaltyModel::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn onset_penalty_matches_wall_anchor() {
        // Lateral 0.75 mm with a 1 mm bend: clearance exactly 1.25 mm, the
        // anchor condition, so the default model charges exactly 200 V.
        let e = EmitterRing {
            inner_diameter: 4.5e-3,
            outer_diameter: 6e-3,
            tip_count: 3,
            tip_angle_deg: 5.0,
            bend_depth: 1e-3,
            aspect_ratio: 1.0,
            duct_height: 6e-3,
        };
        let st = StageGeometry::new(e, CollectorGrid::default(), 2e-3).unwrap();
        let cl = tip_to_lip_clearance(0.75e-3, 1e-3).unwrap();
        assert_relative_eq!(cl, 1.25e-3, max_relative = 1e-15);
        // 3 tips on 4.5 mm: chord 3.897 mm > 3.234 mm, so only the wall
        // deficit contributes.
        let p = onset_penalty(&st, &OnsetPenaltyModel::default()).unwrap();
        assert_relative_eq!(p, 200.0, max_relative = 1e-12);
    }

    #[test]
    fn onset_penalty_scales_with_coefficients() {
        let st = stage(1.0, 5);
        let base = onset_penalty(&st, &OnsetPenaltyModel::default()).unwrap();
        assert!(base > 0.0);
        let doubled = onset_penalty(
            &st,
            &OnsetPenaltyModel {
                wall_coeff: 2.0 * anchored_wall_coeff(),
                tip_coeff: 2.0 * anchored_wall_coeff(),
            },
        )
        .unwrap();
        assert_relative_eq!(doubled, 2.0 * base, max_relative = 1e-12);
        let zeroed = onset_penalty(
            &st,
            &OnsetPenaltyModel {
                wall_coeff: 0.0,
                tip_coeff: 0.0,
            },
        )
        .unwrap();
        assert_eq!(zeroed, 0.0);
    }

    fn segments_intersect(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> bool {
        let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let d1 = cross(p, q, r);
        let d2 = cross(p, q, s);
        let d3 = cross(r, s, p);
        let d4 = cross(r, s, q);
        ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    }

    fn assert_simple_polygon(poly: &[[f64; 2]]) {
        let n = poly.len();
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            for j in i + 1..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (c, d) = (poly[j], poly[(j + 1) % n]);
                assert!(
                    !segments_intersect(a, b, c, d),
                    "edges {i} and {j} intersect"
                );
            }
        }
    }

    #[test]
    fn outline_apexes_land_on_layout_positions() {
        for (ar, tips) in [(1.0, 3u32), (5.0, 20)] {
            let st = stage(ar, tips);
            let outline = electrode_outline(&st, DEFAULT_RIM_WIDTH).unwrap();
            assert_eq!(outline.emitter.len(), 2);
            let layout = layout_emitters(&st).unwrap();
            let lip = st.lip_contour().unwrap();
            let inset = (st.emitter.outer_diameter - st.emitter.inner_diameter) / 2.0;
            let tip_poly = &outline.emitter[1];
            // Apexes are the only vertices off the lip contour, and each one
            // reproduces a layout position exactly.
            let apexes: Vec<_> = tip_poly
                .iter()
                .filter(|p| lip.signed_distance(**p).abs() > inset / 2.0)
                .collect();
            assert_eq!(apexes.len(), tips as usize);
            for apex in &apexes {
                assert!(
                    layout.iter().any(|l| *l == **apex),
                    "apex {apex:?} missing from layout"
                );
            }
            for p in tip_poly {
                let d = lip.signed_distance(*p).abs();
                assert!(d < 1e-12 || (d - inset).abs() < 1e-12);
            }
            assert_eq!(
                tip_poly
                    .iter()
                    .filter(|p| lip.signed_distance(**p).abs() < 1e-12)
                    .count(),
                tip_poly.len() - tips as usize
            );
            // 3 spliced vertices per tip on top of the sampled base outline.
            assert!(tip_poly.len() > 3 * tips as usize);
            assert_simple_polygon(tip_poly);
            assert_simple_polygon(&outline.emitter[0]);
        }
    }

    #[test]
    fn outline_collector_wires_stay_inside_duct() {
        let st = stage(5.0, 20);
        let outline = electrode_outline(&st, DEFAULT_RIM_WIDTH).unwrap();
        let duct = st.duct_contour().unwrap();
        // Boundary plus 5 horizontal and 29 vertical wires for 6 x 30 mm at
        // 1 mm pitch.
        assert_eq!(outline.collector.len(), 1 + 5 + 29);
        for wire in &outline.collector[1..] {
            assert_eq!(wire.len(), 4);
            for p in wire {
                assert!(duct.signed_distance(*p) <= 1e-12);
            }
        }
    }

    #[test]
    fn outline_requires_positive_rim() {
        let st = stage(1.0, 3);
        assert!(electrode_outline(&st, 0.0).is_err());
    }
}
