//! Points, arcs, great circles, hemispheres and lunes on the unit sphere.
//!
//! Every point is a unit vector in E³. Angles are radians. Distances are
//! computed as `atan2(|a × b|, a · b)` rather than `acos(a · b)`, which keeps
//! full relative precision for nearly coincident and nearly antipodal pairs.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `|‖p‖ − 1|` before a point is renormalized.
pub const EPS_UNIT: f64 = 1e-12;

/// Tolerance for geometric predicates (membership, degeneracy), in radians.
pub const EPS_GEO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vector ({0}, {1}, {2}) cannot be normalized onto the sphere")]
    NotNormalizable(f64, f64, f64),
    #[error("points are equal or antipodal, no unique great circle")]
    DegenerateCircle,
    #[error("points are equal or antipodal, no arc")]
    DegenerateArc,
    #[error("arc length parameter {s} outside [0, {length}]")]
    OutOfRange { s: f64, length: f64 },
    #[error("point is a pole of the great circle, projection is not unique")]
    PoleProjection,
    #[error("angle is undefined: an arm collapses onto the apex or its antipode")]
    DegenerateAngle,
    #[error("arcs lie on one great circle and overlap")]
    CoplanarArcs,
    #[error("hemisphere centers are equal or antipodal, not a lune")]
    InvalidLune,
}

/// A point of S², stored as a unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint(Vector3<f64>);

impl SpherePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    /// Projects `v` onto the sphere. Vectors already within [`EPS_UNIT`] of
    /// unit length are kept bit-for-bit.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self, GeometryError> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(GeometryError::NotNormalizable(v.x, v.y, v.z));
        }
        if (norm - 1.0).abs() <= EPS_UNIT {
            Ok(SpherePoint(v))
        } else {
            Ok(SpherePoint(v / norm))
        }
    }

    /// Longitude and latitude in degrees, `x = cos(lat)cos(lon)`, `z = sin(lat)`.
    pub fn from_lon_lat_deg(lon: f64, lat: f64) -> Result<Self, GeometryError> {
        let (lon, lat) = (lon.to_radians(), lat.to_radians());
        Self::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin())
    }

    pub fn to_lon_lat_deg(&self) -> (f64, f64) {
        let v = self.0;
        let lon = v.y.atan2(v.x).to_degrees();
        let lat = v.z.atan2(v.x.hypot(v.y)).to_degrees();
        (lon, lat)
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn cross(&self, other: &SpherePoint) -> Vector3<f64> {
        self.0.cross(&other.0)
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint(-self.0)
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        distance(self, other)
    }

    /// Unit tangent at `self` pointing along the arc towards `towards`.
    pub(crate) fn tangent_towards(&self, towards: &SpherePoint) -> Option<Vector3<f64>> {
        // self × (towards × self) = towards − (self · towards) self, without cancellation.
        let t = self.0.cross(&towards.0.cross(&self.0));
        let norm = t.norm();
        (norm > EPS_GEO).then(|| t / norm)
    }
}

impl TryFrom<[f64; 3]> for SpherePoint {
    type Error = GeometryError;

    fn try_from(v: [f64; 3]) -> Result<Self, Self::Error> {
        SpherePoint::new(v[0], v[1], v[2])
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> Self {
        [p.0.x, p.0.y, p.0.z]
    }
}

/// Great circle `{x : x · pole = 0}`. `pole` and `−pole` give the same set
/// with opposite orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreatCircle {
    pub pole: SpherePoint,
}

impl GreatCircle {
    pub fn new(pole: SpherePoint) -> Self {
        GreatCircle { pole }
    }

    /// Signed angular offset of `p` from the circle, positive on the pole side.
    pub fn signed_offset(&self, p: &SpherePoint) -> f64 {
        p.dot(&self.pole).clamp(-1.0, 1.0).asin()
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.signed_offset(p).abs() <= EPS_GEO
    }
}

/// Closed hemisphere `{x : x · center ≥ 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hemisphere {
    pub center: SpherePoint,
}

impl Hemisphere {
    pub fn new(center: SpherePoint) -> Self {
        Hemisphere { center }
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        p.dot(&self.center) >= -EPS_GEO
    }

    pub fn boundary(&self) -> GreatCircle {
        GreatCircle::new(self.center)
    }
}

/// The shorter great-circle arc between two non-antipodal, distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub a: SpherePoint,
    pub b: SpherePoint,
}

impl Arc {
    pub fn new(a: SpherePoint, b: SpherePoint) -> Result<Self, GeometryError> {
        let d = distance(&a, &b);
        if d <= EPS_GEO || d >= PI - EPS_GEO {
            return Err(GeometryError::DegenerateArc);
        }
        Ok(Arc { a, b })
    }

    pub fn length(&self) -> f64 {
        distance(&self.a, &self.b)
    }

    /// Carrier circle oriented by the right-hand rule from `a` to `b`.
    pub fn circle(&self) -> GreatCircle {
        // Arc::new guarantees a unique circle.
        great_circle_through(&self.a, &self.b).expect("arc endpoints span a circle")
    }

    /// Whether `p` lies on the arc, endpoints included, within [`EPS_GEO`].
    pub fn contains(&self, p: &SpherePoint) -> bool {
        let pole = self.circle().pole;
        if pole.dot(p).abs() > EPS_GEO {
            return false;
        }
        self.a.cross(p).dot(pole.vector()) >= -EPS_GEO
            && p.cross(&self.b).dot(pole.vector()) >= -EPS_GEO
            && distance(&self.a, p) <= self.length() + EPS_GEO
    }
}

/// Ordered pair of hemispheres `G ∩ H` with non-coincident, non-antipodal centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lune {
    pub g: Hemisphere,
    pub h: Hemisphere,
}

impl Lune {
    pub fn new(g: Hemisphere, h: Hemisphere) -> Result<Self, GeometryError> {
        let angle = distance(&g.center, &h.center);
        if angle <= EPS_GEO || angle >= PI - EPS_GEO {
            return Err(GeometryError::InvalidLune);
        }
        Ok(Lune { g, h })
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.g.contains(p) && self.h.contains(p)
    }
}

/// Arc length between `a` and `b` in `[0, π]`. Antipodes are at distance π.
pub fn distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn antipode(a: &SpherePoint) -> SpherePoint {
    a.antipode()
}

/// The great circle through `a` and `b`, with pole `normalize(a × b)`.
pub fn great_circle_through(a: &SpherePoint, b: &SpherePoint) -> Result<GreatCircle, GeometryError> {
    let d = distance(a, b);
    if d <= EPS_GEO || d >= PI - EPS_GEO {
        return Err(GeometryError::DegenerateCircle);
    }
    let pole = SpherePoint::from_vector(a.cross(b)).map_err(|_| GeometryError::DegenerateCircle)?;
    Ok(GreatCircle::new(pole))
}

/// Point at arc length `s` from `arc.a` towards `arc.b`.
pub fn arc_point_at(arc: &Arc, s: f64) -> Result<SpherePoint, GeometryError> {
    let length = arc.length();
    if !(0.0..=length).contains(&s) {
        return Err(GeometryError::OutOfRange { s, length });
    }
    let u = arc
        .a
        .tangent_towards(&arc.b)
        .ok_or(GeometryError::DegenerateArc)?;
    SpherePoint::from_vector(arc.a.vector() * s.cos() + u * s.sin())
}

/// Nearest point of `f` to `a`.
pub fn project_onto_circle(a: &SpherePoint, f: &GreatCircle) -> Result<SpherePoint, GeometryError> {
    let pole = f.pole.vector();
    let v = pole.cross(&a.vector().cross(pole));
    if v.norm() <= EPS_GEO {
        return Err(GeometryError::PoleProjection);
    }
    SpherePoint::from_vector(v).map_err(|_| GeometryError::PoleProjection)
}

/// Centers of the two bounding semicircles of the lune: `m_G ∈ ∂G` deepest
/// inside `H`, and `m_H ∈ ∂H` deepest inside `G`.
pub fn lune_midpoints(l: &Lune) -> Result<(SpherePoint, SpherePoint), GeometryError> {
    let g = l.g.center;
    let h = l.h.center;
    let m_g = project_onto_circle(&h, &l.g.boundary()).map_err(|_| GeometryError::InvalidLune)?;
    let m_h = project_onto_circle(&g, &l.h.boundary()).map_err(|_| GeometryError::InvalidLune)?;
    Ok((m_g, m_h))
}

/// Distance between the semicircle centers; equals `π − |g h|`.
pub fn lune_thickness(l: &Lune) -> Result<f64, GeometryError> {
    let (m_g, m_h) = lune_midpoints(l)?;
    Ok(distance(&m_g, &m_h))
}

/// Angle at `at` between the arcs towards `p` and towards `q`.
pub fn spherical_angle(at: &SpherePoint, p: &SpherePoint, q: &SpherePoint) -> Result<f64, GeometryError> {
    let u = at.tangent_towards(p).ok_or(GeometryError::DegenerateAngle)?;
    let w = at.tangent_towards(q).ok_or(GeometryError::DegenerateAngle)?;
    Ok(u.cross(&w).norm().atan2(u.dot(&w)))
}

/// Common point of two arcs, if any.
pub fn arc_intersection(u: &Arc, v: &Arc) -> Result<Option<SpherePoint>, GeometryError> {
    let pu = u.circle().pole;
    let pv = v.circle().pole;
    let line = pu.cross(&pv);
    if line.norm() <= EPS_GEO {
        return coplanar_intersection(u, v, &pu, &pv);
    }
    let x = SpherePoint::from_vector(line)?;
    Ok([x, x.antipode()]
        .into_iter()
        .find(|c| u.contains(c) && v.contains(c)))
}

fn coplanar_intersection(
    u: &Arc,
    v: &Arc,
    pu: &SpherePoint,
    pv: &SpherePoint,
) -> Result<Option<SpherePoint>, GeometryError> {
    // Angular position along u's circle, measured from u.a in u's direction.
    let angle_of = |p: &SpherePoint| u.a.cross(p).dot(pu.vector()).atan2(u.a.dot(p));
    let len_u = u.length();
    let start = angle_of(&v.a);
    let sweep = if pu.dot(pv) > 0.0 { v.length() } else { -v.length() };
    let (lo, hi) = if sweep >= 0.0 {
        (start, start + sweep)
    } else {
        (start + sweep, start)
    };
    let mut best: Option<(f64, f64)> = None;
    for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
        let (a, b) = (lo + shift, hi + shift);
        let overlap = b.min(len_u) - a.max(0.0);
        if overlap >= -EPS_GEO && best.is_none_or(|(o, _)| overlap > o) {
            best = Some((overlap, a.max(0.0)));
        }
    }
    match best {
        Some((overlap, _)) if overlap > EPS_GEO => Err(GeometryError::CoplanarArcs),
        Some((_, at)) => {
            let at = at.clamp(0.0, len_u);
            arc_point_at(u, at).map(Some)
        }
        None => Ok(None),
    }
}
