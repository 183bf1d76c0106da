//! Widths of a polygon determined by its side hemispheres, and its thickness.
//!
//! For a supporting hemisphere `K` with center `k`, the lune `K ∩ K*` has
//! thickness `π − |k c*|`, so `width_K(V)` is found by minimizing `k · c*`
//! over centers `c*` of hemispheres that contain every vertex. That feasible
//! region is the polar polygon of `V`; a linear function on it attains its
//! minimum either in the interior of an edge `{c : c · v_j = 0}` or at a
//! corner `±normalize(v_j × v_l)`. Both families are enumerated exhaustively.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{distance, GeometryError, Hemisphere, Lune, SpherePoint, EPS_GEO};
use crate::polygon::SphericalPolygon;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WidthError {
    #[error("no hemisphere center supports the polygon (side {0})")]
    NoFeasibleSupport(usize),
    #[error("optimal supporting hemisphere coincides with the side hemisphere (side {0})")]
    DegenerateLune(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How the optimal opposite hemisphere `K*` touches the polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    /// `∂K*` passes through one vertex only.
    Vertex { index: usize },
    /// `∂K*` passes through two vertices.
    Chord { indices: (usize, usize) },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideWidth {
    pub side: usize,
    #[serde(rename = "width_rad")]
    pub width: f64,
    pub lune: Lune,
    pub support: Support,
    /// Widths of π/2 or more are computed but fall outside the reducedness
    /// results, which assume thickness below π/2.
    pub at_least_half_pi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthProfile {
    pub per_side: Vec<SideWidth>,
    #[serde(rename = "thickness_rad")]
    pub thickness: f64,
    pub attaining_side: usize,
}

impl WidthProfile {
    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_side.iter().map(|s| s.width)
    }

    pub fn max_width(&self) -> f64 {
        self.widths().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn attaining(&self) -> &SideWidth {
        &self.per_side[self.attaining_side]
    }
}

/// Supporting hemisphere whose boundary contains side `i`.
pub fn side_hemisphere(v: &SphericalPolygon, i: usize) -> Hemisphere {
    Hemisphere::new(v.side_pole(i))
}

struct Candidate {
    center: SpherePoint,
    dot: f64,
    support: Support,
}

fn feasible(vertices: &[SpherePoint], c: &SpherePoint) -> bool {
    vertices.iter().all(|v| v.dot(c) >= -EPS_GEO)
}

pub fn width_for_side(v: &SphericalPolygon, i: usize) -> Result<SideWidth, WidthError> {
    let n = v.len();
    let side = i % n;
    let k = side_hemisphere(v, side);
    let kc = k.center.vector();
    let vertices = v.vertices();

    let mut best: Option<Candidate> = None;
    // Near-ties keep the earlier candidate, i.e. the smallest touched index.
    let mut offer = |center: SpherePoint, support: Support| {
        if !feasible(vertices, &center) {
            return;
        }
        let dot = kc.dot(center.vector());
        let better = match &best {
            None => true,
            Some(b) => dot < b.dot - 1e-15,
        };
        if better {
            best = Some(Candidate { center, dot, support });
        }
    };

    for (j, vj) in vertices.iter().enumerate() {
        let along = kc - vj.vector() * kc.dot(vj.vector());
        if along.norm() <= EPS_GEO {
            continue;
        }
        if let Ok(c) = SpherePoint::from_vector(-along) {
            offer(c, Support::Vertex { index: j });
        }
    }
    for j in 0..n {
        for l in j + 1..n {
            let Ok(c) = SpherePoint::from_vector(vertices[j].cross(&vertices[l])) else {
                continue;
            };
            offer(c, Support::Chord { indices: (j, l) });
            offer(c.antipode(), Support::Chord { indices: (j, l) });
        }
    }

    let best = best.ok_or(WidthError::NoFeasibleSupport(side))?;
    let angle = distance(&k.center, &best.center);
    if angle <= EPS_GEO || angle >= PI - EPS_GEO {
        return Err(WidthError::DegenerateLune(side));
    }
    let lune = Lune::new(k, Hemisphere::new(best.center))?;
    let width = PI - angle;
    Ok(SideWidth {
        side,
        width,
        lune,
        support: best.support,
        at_least_half_pi: width >= FRAC_PI_2,
    })
}

/// Widths for every side and their minimum. Ties go to the lowest side index.
pub fn thickness(v: &SphericalPolygon) -> Result<WidthProfile, WidthError> {
    let per_side = (0..v.len())
        .map(|i| width_for_side(v, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut attaining_side = 0;
    for (i, s) in per_side.iter().enumerate() {
        if s.width < per_side[attaining_side].width {
            attaining_side = i;
        }
    }
    Ok(WidthProfile {
        thickness: per_side[attaining_side].width,
        attaining_side,
        per_side,
    })
}
