#![allow(dead_code)]

use nalgebra::{Rotation3, Unit, Vector3};
use sphred::generators::{
    perturb, random_convex_odd_gon_with, regular_odd_gon, search_reduced, RegularOddGonSpec, SeededStream,
};
use sphred::polygon::validate;
use sphred::{full_report, SpherePoint, SphericalPolygon, Verdict, DEFAULT_TOLERANCE};

pub fn p(x: f64, y: f64, z: f64) -> SpherePoint {
    SpherePoint::new(x, y, z).unwrap()
}

pub fn random_rotation(rng: &mut SeededStream) -> Rotation3<f64> {
    let axis = Unit::new_normalize(*rng.sphere_point().vector());
    Rotation3::from_axis_angle(&axis, 2.0 * std::f64::consts::PI * rng.unit())
}

pub fn rotate(rot: &Rotation3<f64>, q: &SpherePoint) -> SpherePoint {
    SpherePoint::from_vector(rot * q.vector()).unwrap()
}

pub fn rotate_polygon(rot: &Rotation3<f64>, poly: &SphericalPolygon) -> SphericalPolygon {
    validate(poly.vertices().iter().map(|v| rotate(rot, v)).collect()).unwrap()
}

/// Samples `k` points on the boundary of the polar region
/// `{c : c · v ≥ 0 for all vertices v}`, one batch per constraint circle.
pub fn polar_boundary_samples(poly: &SphericalPolygon, per_circle: usize) -> Vec<(usize, f64, SpherePoint)> {
    let mut out = Vec::new();
    for (j, v) in poly.vertices().iter().enumerate() {
        let (e1, e2) = circle_frame(v);
        for s in 0..per_circle {
            let theta = 2.0 * std::f64::consts::PI * s as f64 / per_circle as f64;
            let c = circle_point(&e1, &e2, theta);
            if poly.vertices().iter().all(|x| x.dot(&c) >= -1e-9) {
                out.push((j, theta, c));
            }
        }
    }
    out
}

pub fn circle_frame(normal: &SpherePoint) -> (Vector3<f64>, Vector3<f64>) {
    let n = normal.vector();
    let seed = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&seed).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

pub fn circle_point(e1: &Vector3<f64>, e2: &Vector3<f64>, theta: f64) -> SpherePoint {
    SpherePoint::from_vector(e1 * theta.cos() + e2 * theta.sin()).unwrap()
}

/// Random odd-gons (n cycling through 3, 5, 7, 9) whose feet all land in
/// their opposite sides. Irregularity cycles through 1, 1/2 and 1/4 so that
/// the larger odd-gons show up too.
pub fn precondition_corpus(count: usize) -> Vec<SphericalPolygon> {
    let ns = [3, 5, 7, 9];
    let irregularity = [1.0, 0.5, 0.25];
    let mut out = Vec::new();
    let mut k = 0usize;
    while out.len() < count {
        let n = ns[k % 4];
        let x = irregularity[(k / 4) % 3];
        let poly = random_convex_odd_gon_with(n, x, k as u64).unwrap();
        if full_report(&poly, DEFAULT_TOLERANCE).precondition_ok {
            out.push(poly);
        }
        k += 1;
    }
    out
}

/// Regular odd-gons moved by `perturb`, with n, thickness and magnitude
/// varying with the seed.
pub fn perturbed_corpus(count: usize) -> Vec<SphericalPolygon> {
    (0..count as u64)
        .map(|seed| {
            let n = [3, 5, 7, 9][seed as usize % 4];
            let target = [0.3, 0.8, 1.2][seed as usize % 3];
            let reg = regular_odd_gon(&RegularOddGonSpec::new(n, target).unwrap()).unwrap();
            let magnitude = [0.02, 0.04, 0.08][(seed as usize / 3) % 3] * reg.side_length(0);
            perturb(&reg, magnitude, seed).unwrap()
        })
        .collect()
}

/// Reduced polygons: a few regular ones plus non-regular ones found by the
/// Gauss–Newton search and confirmed by the full report.
pub fn reduced_corpus() -> Vec<SphericalPolygon> {
    let mut out = Vec::new();
    for (n, t) in [(3, 0.5), (5, 0.8), (7, 1.2), (9, 1.0), (11, 0.4)] {
        out.push(regular_odd_gon(&RegularOddGonSpec::new(n, t).unwrap()).unwrap());
    }
    for seed in 0..24u64 {
        let n = [5, 7][seed as usize % 2];
        let target = [0.6, 0.9, 1.3][seed as usize % 3];
        let Ok(found) = search_reduced(n, target, 0.02, seed) else {
            continue;
        };
        if full_report(&found.polygon, DEFAULT_TOLERANCE).verdict() == Verdict::Reduced {
            out.push(found.polygon);
        }
    }
    out
}
