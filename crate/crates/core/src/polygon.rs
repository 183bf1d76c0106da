//! Validated spherically convex polygons.
//!
//! Vertices are stored in positive orientation: seen from outside the sphere
//! the boundary runs counterclockwise, so every side pole `v_i × v_{i+1}` has
//! positive dot product with all other vertices. Indices are zero-based and
//! cyclic modulo `n`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{
    distance, great_circle_through, project_onto_circle, Arc, GeometryError, GreatCircle, SpherePoint,
    EPS_GEO,
};

/// One violated polygon invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    TooFewVertices { count: usize },
    CoincidentVertices { indices: Vec<usize> },
    AntipodalVertices { indices: Vec<usize> },
    /// Vertices not strictly on the inner side of the side `(side, side + 1)`.
    NotConvex { side: usize, indices: Vec<usize> },
    NotInOpenHemisphere,
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::TooFewVertices { .. } => "TooFewVertices",
            Violation::CoincidentVertices { .. } => "CoincidentVertices",
            Violation::AntipodalVertices { .. } => "AntipodalVertices",
            Violation::NotConvex { .. } => "NotConvex",
            Violation::NotInOpenHemisphere => "NotInOpenHemisphere",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewVertices { count } => write!(f, "TooFewVertices: {count} < 3"),
            Violation::CoincidentVertices { indices } => write!(f, "CoincidentVertices: {indices:?}"),
            Violation::AntipodalVertices { indices } => write!(f, "AntipodalVertices: {indices:?}"),
            Violation::NotConvex { side, indices } => {
                write!(f, "NotConvex: side {side} has {indices:?} on or outside it")
            }
            Violation::NotInOpenHemisphere => write!(f, "NotInOpenHemisphere"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolygonError {
    #[error("invalid polygon: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("opposite sides need an odd vertex count, got {0}")]
    EvenPolygon(usize),
    #[error("point {0:?} is not on the polygon boundary")]
    NotOnBoundary(SpherePoint),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl PolygonError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            PolygonError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalPolygon {
    vertices: Vec<SpherePoint>,
    /// A point strictly inside the open hemisphere that contains all vertices.
    #[serde(skip)]
    hemisphere_witness: SpherePoint,
}

/// Foot `t_i` of vertex `v_i` on the great circle of its opposite side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OppositeProjection {
    pub index: usize,
    pub t: SpherePoint,
    #[serde(rename = "dist_to_side_rad")]
    pub dist_to_side: f64,
    pub in_relative_interior: bool,
    pub side_indices: (usize, usize),
}

/// Checks every polygon invariant and collects all violations.
pub fn validate(vertices: Vec<SpherePoint>) -> Result<SphericalPolygon, PolygonError> {
    let n = vertices.len();
    if n < 3 {
        return Err(PolygonError::Invalid(vec![Violation::TooFewVertices { count: n }]));
    }
    let mut violations = Vec::new();
    let mut degenerate = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(&vertices[i], &vertices[j]);
            if d <= EPS_GEO {
                violations.push(Violation::CoincidentVertices { indices: vec![i, j] });
            } else if d >= std::f64::consts::PI - EPS_GEO {
                violations.push(Violation::AntipodalVertices { indices: vec![i, j] });
            } else {
                continue;
            }
            degenerate[i] = true;
            degenerate[j] = true;
        }
    }

    let mut poles = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        if degenerate[i] || degenerate[j] {
            continue;
        }
        let Ok(circle) = great_circle_through(&vertices[i], &vertices[j]) else {
            continue;
        };
        let offending: Vec<usize> = (0..n)
            .filter(|&m| m != i && m != j)
            .filter(|&m| circle.pole.dot(&vertices[m]) <= EPS_GEO)
            .collect();
        if !offending.is_empty() {
            violations.push(Violation::NotConvex { side: i, indices: offending });
        }
        poles.push(circle.pole);
    }

    let witness = hemisphere_witness(&vertices, &poles);
    if witness.is_none() {
        violations.push(Violation::NotInOpenHemisphere);
    }

    match (violations.is_empty(), witness) {
        (true, Some(hemisphere_witness)) => Ok(SphericalPolygon {
            vertices,
            hemisphere_witness,
        }),
        _ => Err(PolygonError::Invalid(violations)),
    }
}

/// Finds `c` with `v · c > EPS_GEO` for all vertices. Tries the sum of side
/// poles (always a witness for a strictly convex polygon) and the vertex
/// centroid, then falls back to perceptron updates.
fn hemisphere_witness(vertices: &[SpherePoint], poles: &[SpherePoint]) -> Option<SpherePoint> {
    let certifies = |c: &SpherePoint| vertices.iter().all(|v| v.dot(c) > EPS_GEO);

    let pole_sum = poles.iter().fold(nalgebra::Vector3::zeros(), |acc, p| acc + p.vector());
    let centroid = vertices.iter().fold(nalgebra::Vector3::zeros(), |acc, v| acc + v.vector());
    for candidate in [pole_sum, centroid] {
        if let Ok(c) = SpherePoint::from_vector(candidate) {
            if certifies(&c) {
                return Some(c);
            }
        }
    }

    let mut c = centroid;
    for _ in 0..10_000 {
        let Ok(unit) = SpherePoint::from_vector(c) else {
            c = *vertices[0].vector();
            continue;
        };
        match vertices.iter().find(|v| v.dot(&unit) <= EPS_GEO) {
            None => return Some(unit),
            Some(v) => c = unit.vector() + v.vector(),
        }
    }
    None
}

impl SphericalPolygon {
    pub fn vertices(&self) -> &[SpherePoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.len() % 2 == 1
    }

    /// Vertex `i` modulo `n`.
    pub fn vertex(&self, i: usize) -> SpherePoint {
        self.vertices[i % self.len()]
    }

    pub fn hemisphere_witness(&self) -> SpherePoint {
        self.hemisphere_witness
    }

    /// Side `i` runs from `v_i` to `v_{i+1}`.
    pub fn side(&self, i: usize) -> Arc {
        let n = self.len();
        Arc {
            a: self.vertices[i % n],
            b: self.vertices[(i + 1) % n],
        }
    }

    /// Pole `normalize(v_i × v_{i+1})`; points into the polygon.
    pub fn side_pole(&self, i: usize) -> SpherePoint {
        self.side(i).circle().pole
    }

    pub fn side_length(&self, i: usize) -> f64 {
        let arc = self.side(i);
        distance(&arc.a, &arc.b)
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.side_length(i)).sum()
    }

    /// Returns a copy with vertex `i` removed, if the rest is still valid.
    pub fn without_vertex(&self, i: usize) -> Result<SphericalPolygon, PolygonError> {
        let mut vertices = self.vertices.clone();
        vertices.remove(i % self.len());
        validate(vertices)
    }

    /// Offset of a boundary point from `v_0`, counterclockwise. Points on a
    /// vertex resolve to the lower side index.
    fn boundary_offset(&self, p: &SpherePoint) -> Result<f64, PolygonError> {
        let mut start = 0.0;
        for i in 0..self.len() {
            let side = self.side(i);
            if side.contains(p) {
                return Ok(start + distance(&side.a, p));
            }
            start += self.side_length(i);
        }
        Err(PolygonError::NotOnBoundary(*p))
    }
}

pub fn perimeter(v: &SphericalPolygon) -> f64 {
    v.perimeter()
}

/// Opposite side of vertex `i` in an odd-gon: `(i + (n−1)/2, i + (n+1)/2) mod n`.
pub fn opposite_side(v: &SphericalPolygon, i: usize) -> Result<(usize, usize), PolygonError> {
    opposite_side_indices(v.len(), i)
}

pub fn opposite_side_indices(n: usize, i: usize) -> Result<(usize, usize), PolygonError> {
    if n % 2 == 0 {
        return Err(PolygonError::EvenPolygon(n));
    }
    Ok(((i + (n - 1) / 2) % n, (i + (n + 1) / 2) % n))
}

pub fn opposite_projection(v: &SphericalPolygon, i: usize) -> Result<OppositeProjection, PolygonError> {
    let (j, k) = opposite_side(v, i)?;
    let vi = v.vertex(i);
    let (a, b) = (v.vertex(j), v.vertex(k));
    let circle: GreatCircle = great_circle_through(&a, &b)?;
    let t = project_onto_circle(&vi, &circle)?;
    let side = Arc { a, b };
    let in_relative_interior =
        side.contains(&t) && distance(&a, &t) > EPS_GEO && distance(&t, &b) > EPS_GEO;
    Ok(OppositeProjection {
        index: i % v.len(),
        t,
        dist_to_side: distance(&vi, &t),
        in_relative_interior,
        side_indices: (j, k),
    })
}

/// Length of the counterclockwise boundary path from `from` to `to`.
pub fn boundary_length_ccw(
    v: &SphericalPolygon,
    from: &SpherePoint,
    to: &SpherePoint,
) -> Result<f64, PolygonError> {
    let s = v.boundary_offset(from)?;
    let e = v.boundary_offset(to)?;
    if s == e {
        return Ok(0.0);
    }
    let perimeter = v.perimeter();
    let d = e - s;
    Ok(if d < 0.0 { d + perimeter } else { d })
}
