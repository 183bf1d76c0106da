//! Predicates for the four equivalent characterizations of a reduced odd-gon.
//!
//! For an odd-gon `V = v_0 … v_{n−1}` with thickness below π/2 whose feet
//! `t_i` (projections of `v_i` on the circle of the opposite side) fall in
//! the relative interiors of those sides, with `h = (n + 1) / 2`:
//!
//! - (a) `|v_i t_i| = Δ(V)` for all `i` (the finite criterion for reducedness),
//! - (b) `|v_i t_{i+h}| = |t_i v_{i+h}|`,
//! - (c) `∠ t_{i+h} v_i t_i = ∠ t_i v_{i+h} t_{i+h}`,
//! - (d) the arc `v_i t_i` halves the perimeter.
//!
//! Every condition is reported as a residual (the largest defect over `i`,
//! in radians) plus a boolean at a caller-chosen tolerance.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{
    arc_intersection, distance, spherical_angle, Arc, GeometryError, SpherePoint, EPS_GEO,
};
use crate::polygon::{boundary_length_ccw, opposite_projection, OppositeProjection, PolygonError, SphericalPolygon};
use crate::width::{thickness, WidthError, WidthProfile};

/// Default threshold on residuals, in radians.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReducednessError {
    #[error("the characterizations need an odd vertex count, got {0}")]
    EvenPolygon(usize),
    #[error("thickness {0} is not below π/2")]
    ThicknessTooLarge(f64),
    #[error("feet of vertices {0:?} are not in the relative interior of their opposite sides")]
    PreconditionFailed(Vec<usize>),
    #[error("angle at vertex pair {0} is degenerate")]
    DegenerateAngle(usize),
    #[error("arcs v_i t_i and v_(i+h) t_(i+h) do not meet for i = {0}")]
    NoIntersection(usize),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Width(#[from] WidthError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl ReducednessError {
    pub fn kind(&self) -> &'static str {
        match self {
            ReducednessError::EvenPolygon(_) => "EvenPolygon",
            ReducednessError::ThicknessTooLarge(_) => "ThicknessTooLarge",
            ReducednessError::PreconditionFailed(_) => "PreconditionFailed",
            ReducednessError::DegenerateAngle(_) => "DegenerateAngle",
            ReducednessError::NoIntersection(_) => "NoIntersection",
            ReducednessError::Polygon(_) => "PolygonError",
            ReducednessError::Width(_) => "WidthError",
            ReducednessError::Geometry(_) => "GeometryError",
        }
    }
}

/// Feet of all vertices and whether each lies in the open opposite side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Precondition {
    pub holds: bool,
    pub projections: Vec<OppositeProjection>,
    pub offending: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionOutcome {
    pub holds: bool,
    #[serde(rename = "residual_rad")]
    pub residual: f64,
}

impl ConditionOutcome {
    fn at(residual: f64, tol: f64) -> Self {
        ConditionOutcome {
            holds: residual <= tol,
            residual,
        }
    }
}

/// Everything the conditions need, computed once.
struct Analysis<'a> {
    poly: &'a SphericalPolygon,
    half: usize,
    profile: WidthProfile,
    feet: Vec<SpherePoint>,
    dist_to_side: Vec<f64>,
}

impl<'a> Analysis<'a> {
    fn new(poly: &'a SphericalPolygon, profile: WidthProfile) -> Result<Self, ReducednessError> {
        let pre = precondition_with(poly, &profile)?;
        if !pre.holds {
            return Err(ReducednessError::PreconditionFailed(pre.offending));
        }
        Ok(Analysis {
            poly,
            half: (poly.len() + 1) / 2,
            feet: pre.projections.iter().map(|p| p.t).collect(),
            dist_to_side: pre.projections.iter().map(|p| p.dist_to_side).collect(),
            profile,
        })
    }

    fn from_polygon(poly: &'a SphericalPolygon) -> Result<Self, ReducednessError> {
        if !poly.is_odd() {
            return Err(ReducednessError::EvenPolygon(poly.len()));
        }
        Self::new(poly, thickness(poly)?)
    }

    fn n(&self) -> usize {
        self.poly.len()
    }

    fn partner(&self, i: usize) -> usize {
        (i + self.half) % self.n()
    }

    fn residual_a(&self) -> f64 {
        let delta = self.profile.thickness;
        self.dist_to_side
            .iter()
            .map(|d| (d - delta).abs())
            .fold(0.0, f64::max)
    }

    fn residual_b(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                let j = self.partner(i);
                let near = distance(&self.poly.vertex(i), &self.feet[j]);
                let far = distance(&self.feet[i], &self.poly.vertex(j));
                (near - far).abs()
            })
            .fold(0.0, f64::max)
    }

    fn residual_c(&self) -> Result<f64, ReducednessError> {
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            let j = self.partner(i);
            let (vi, vj) = (self.poly.vertex(i), self.poly.vertex(j));
            let at_i = spherical_angle(&vi, &self.feet[j], &self.feet[i])
                .map_err(|_| ReducednessError::DegenerateAngle(i))?;
            let at_j = spherical_angle(&vj, &self.feet[i], &self.feet[j])
                .map_err(|_| ReducednessError::DegenerateAngle(i))?;
            worst = worst.max((at_i - at_j).abs());
        }
        Ok(worst)
    }

    fn residual_d(&self) -> Result<f64, ReducednessError> {
        let half_perimeter = self.poly.perimeter() / 2.0;
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            let len = boundary_length_ccw(self.poly, &self.poly.vertex(i), &self.feet[i])?;
            worst = worst.max((len - half_perimeter).abs());
        }
        Ok(worst)
    }

    fn o_witness(&self, i: usize) -> Result<SpherePoint, ReducednessError> {
        let i = i % self.n();
        let j = self.partner(i);
        let first = Arc::new(self.poly.vertex(i), self.feet[i])?;
        let second = Arc::new(self.poly.vertex(j), self.feet[j])?;
        arc_intersection(&first, &second)?.ok_or(ReducednessError::NoIntersection(i))
    }
}

fn precondition_with(
    poly: &SphericalPolygon,
    profile: &WidthProfile,
) -> Result<Precondition, ReducednessError> {
    if !poly.is_odd() {
        return Err(ReducednessError::EvenPolygon(poly.len()));
    }
    if profile.thickness >= FRAC_PI_2 - EPS_GEO {
        return Err(ReducednessError::ThicknessTooLarge(profile.thickness));
    }
    let projections = (0..poly.len())
        .map(|i| opposite_projection(poly, i))
        .collect::<Result<Vec<_>, _>>()?;
    let offending: Vec<usize> = projections
        .iter()
        .filter(|p| !p.in_relative_interior)
        .map(|p| p.index)
        .collect();
    Ok(Precondition {
        holds: offending.is_empty(),
        projections,
        offending,
    })
}

/// Whether every foot `t_i` lies in the relative interior of its side.
pub fn check_precondition(v: &SphericalPolygon) -> Result<Precondition, ReducednessError> {
    if !v.is_odd() {
        return Err(ReducednessError::EvenPolygon(v.len()));
    }
    precondition_with(v, &thickness(v)?)
}

/// Condition (a): every vertex is at distance `Δ(V)` from its opposite side.
pub fn condition_a(v: &SphericalPolygon, tol: f64) -> Result<ConditionOutcome, ReducednessError> {
    let analysis = Analysis::from_polygon(v)?;
    Ok(ConditionOutcome::at(analysis.residual_a(), tol))
}

/// Condition (b): `|v_i t_{i+h}| = |t_i v_{i+h}|`.
pub fn condition_b(v: &SphericalPolygon, tol: f64) -> Result<ConditionOutcome, ReducednessError> {
    let analysis = Analysis::from_polygon(v)?;
    Ok(ConditionOutcome::at(analysis.residual_b(), tol))
}

/// Condition (c): `∠ t_{i+h} v_i t_i = ∠ t_i v_{i+h} t_{i+h}`.
pub fn condition_c(v: &SphericalPolygon, tol: f64) -> Result<ConditionOutcome, ReducednessError> {
    let analysis = Analysis::from_polygon(v)?;
    Ok(ConditionOutcome::at(analysis.residual_c()?, tol))
}

/// Condition (d): the arc `v_i t_i` halves the perimeter.
pub fn condition_d(v: &SphericalPolygon, tol: f64) -> Result<ConditionOutcome, ReducednessError> {
    let analysis = Analysis::from_polygon(v)?;
    Ok(ConditionOutcome::at(analysis.residual_d()?, tol))
}

/// Intersection `o_i` of the arcs `v_i t_i` and `v_{i+h} t_{i+h}`.
pub fn o_witness(v: &SphericalPolygon, i: usize) -> Result<SpherePoint, ReducednessError> {
    Analysis::from_polygon(v)?.o_witness(i)
}

/// Largest gap between consecutive side widths, `max_i |Δ_i − Δ_{i+1}|`.
pub fn width_chain_residual(profile: &WidthProfile) -> f64 {
    let n = profile.per_side.len();
    (0..n)
        .map(|i| (profile.per_side[i].width - profile.per_side[(i + 1) % n].width).abs())
        .fold(0.0, f64::max)
}

/// One condition inside a report. `error` is set when the condition could
/// not be evaluated; `holds` is then false.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSlot {
    pub holds: bool,
    pub residual_rad: Option<f64>,
    pub error: Option<String>,
}

impl ConditionSlot {
    fn from_result(r: Result<f64, ReducednessError>, tol: f64) -> Self {
        match r {
            Ok(residual) => ConditionSlot {
                holds: residual <= tol,
                residual_rad: Some(residual),
                error: None,
            },
            Err(e) => Self::failed(&e),
        }
    }

    fn failed(e: &ReducednessError) -> Self {
        ConditionSlot {
            holds: false,
            residual_rad: None,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub t: SpherePoint,
    pub dist_to_side_rad: f64,
    pub in_relative_interior: bool,
    pub o: Option<SpherePoint>,
    pub o_error: Option<String>,
    /// `Δ_i`: width determined by the hemisphere flush with side `i`.
    pub side_width_rad: f64,
}

/// Why the conditions were not evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub kind: String,
    pub message: String,
    pub indices: Vec<usize>,
}

impl From<&ReducednessError> for Gate {
    fn from(e: &ReducednessError) -> Self {
        let indices = match e {
            ReducednessError::PreconditionFailed(ix) => ix.clone(),
            _ => Vec::new(),
        };
        Gate {
            kind: e.kind().to_string(),
            message: e.to_string(),
            indices,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The precondition holds and all four conditions hold.
    Reduced,
    /// The precondition holds but at least one condition fails.
    NotReduced,
    /// The input is outside the scope of the characterizations.
    Gated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducednessReport {
    pub n: usize,
    pub tolerance_rad: f64,
    pub thickness_rad: Option<f64>,
    pub precondition_ok: bool,
    pub gate: Option<Gate>,
    pub condition_a: ConditionSlot,
    pub condition_b: ConditionSlot,
    pub condition_c: ConditionSlot,
    pub condition_d: ConditionSlot,
    pub witnesses: Vec<Witness>,
    pub width_profile: Option<WidthProfile>,
}

impl ReducednessReport {
    pub fn conditions(&self) -> [&ConditionSlot; 4] {
        [&self.condition_a, &self.condition_b, &self.condition_c, &self.condition_d]
    }

    pub fn residuals(&self) -> [Option<f64>; 4] {
        self.conditions().map(|c| c.residual_rad)
    }

    pub fn verdict(&self) -> Verdict {
        if !self.precondition_ok {
            Verdict::Gated
        } else if self.conditions().iter().all(|c| c.holds) {
            Verdict::Reduced
        } else {
            Verdict::NotReduced
        }
    }

    fn gated(n: usize, tol: f64, profile: Option<WidthProfile>, err: &ReducednessError) -> Self {
        let slot = ConditionSlot::failed(err);
        ReducednessReport {
            n,
            tolerance_rad: tol,
            thickness_rad: profile.as_ref().map(|p| p.thickness),
            precondition_ok: false,
            gate: Some(Gate::from(err)),
            condition_a: slot.clone(),
            condition_b: slot.clone(),
            condition_c: slot.clone(),
            condition_d: slot,
            witnesses: Vec::new(),
            width_profile: profile,
        }
    }
}

/// Runs the precondition, all four conditions and the witnesses. Failures
/// are recorded in the report rather than returned.
pub fn full_report(v: &SphericalPolygon, tol: f64) -> ReducednessReport {
    let n = v.len();
    let profile = match thickness(v) {
        Ok(p) => p,
        Err(e) => return ReducednessReport::gated(n, tol, None, &ReducednessError::from(e)),
    };
    if !v.is_odd() {
        return ReducednessReport::gated(n, tol, Some(profile), &ReducednessError::EvenPolygon(n));
    }
    let pre = match precondition_with(v, &profile) {
        Ok(pre) => pre,
        Err(e) => return ReducednessReport::gated(n, tol, Some(profile), &e),
    };
    let witnesses_without_o = |pre: &Precondition, profile: &WidthProfile| -> Vec<Witness> {
        pre.projections
            .iter()
            .map(|p| Witness {
                index: p.index,
                t: p.t,
                dist_to_side_rad: p.dist_to_side,
                in_relative_interior: p.in_relative_interior,
                o: None,
                o_error: None,
                side_width_rad: profile.per_side[p.index].width,
            })
            .collect()
    };
    if !pre.holds {
        let mut report = ReducednessReport::gated(
            n,
            tol,
            Some(profile.clone()),
            &ReducednessError::PreconditionFailed(pre.offending.clone()),
        );
        report.witnesses = witnesses_without_o(&pre, &profile);
        return report;
    }

    let mut witnesses = witnesses_without_o(&pre, &profile);
    let analysis = match Analysis::new(v, profile.clone()) {
        Ok(a) => a,
        Err(e) => return ReducednessReport::gated(n, tol, Some(profile), &e),
    };
    for w in &mut witnesses {
        match analysis.o_witness(w.index) {
            Ok(o) => w.o = Some(o),
            Err(e) => w.o_error = Some(e.to_string()),
        }
    }
    ReducednessReport {
        n,
        tolerance_rad: tol,
        thickness_rad: Some(profile.thickness),
        precondition_ok: true,
        gate: None,
        condition_a: ConditionSlot::from_result(Ok(analysis.residual_a()), tol),
        condition_b: ConditionSlot::from_result(Ok(analysis.residual_b()), tol),
        condition_c: ConditionSlot::from_result(analysis.residual_c(), tol),
        condition_d: ConditionSlot::from_result(analysis.residual_d(), tol),
        witnesses,
        width_profile: Some(profile),
    }
}
