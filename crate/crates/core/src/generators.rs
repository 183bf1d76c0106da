//! Test families: regular odd-gons of prescribed thickness, perturbations,
//! random convex odd-gons, and a local search for non-regular reduced ones.
//!
//! All randomness comes from [`SeededStream`], a ChaCha8 stream turned into
//! doubles as `(next_u64 >> 11) · 2⁻⁵³`. The identifier [`PRNG_ID`] names that
//! exact recipe so corpora can be regenerated from any language.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector, Vector3};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernel::{SpherePoint, EPS_GEO};
use crate::polygon::{validate, PolygonError, SphericalPolygon};
use crate::width::{thickness, WidthError};

pub const PRNG_ID: &str = "chacha8-le-u64-shr11-2pow-53";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid generator input: {0}")]
    InvalidSpec(String),
    #[error("target thickness {0} is not in (0, π/2)")]
    Unachievable(f64),
    #[error("perturbation kept breaking the polygon after {0} attempts")]
    PerturbationFailed(usize),
    #[error("no valid polygon after {0} attempts")]
    GenerationFailed(usize),
    #[error("search stopped with residual {0}")]
    SearchFailed(f64),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Width(#[from] WidthError),
}

/// Deterministic stream of uniform doubles in `[0, 1)`.
pub struct SeededStream(ChaCha8Rng);

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        SeededStream(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform point on S².
    pub fn sphere_point(&mut self) -> SpherePoint {
        let z = 2.0 * self.unit() - 1.0;
        let phi = 2.0 * PI * self.unit();
        let rho = (1.0 - z * z).max(0.0).sqrt();
        SpherePoint::new(rho * phi.cos(), rho * phi.sin(), z).expect("unit vector")
    }
}

/// Orthonormal `(u, w)` tangent to the sphere at `p` with `u × w = p`.
pub fn tangent_frame(p: &SpherePoint) -> (Vector3<f64>, Vector3<f64>) {
    let v = p.vector();
    let axis = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vector3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let u = axis.cross(v).normalize();
    let w = v.cross(&u);
    (u, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularOddGonSpec {
    pub n: usize,
    pub target_thickness: f64,
    pub pole: SpherePoint,
    pub phase: f64,
}

impl RegularOddGonSpec {
    pub fn new(n: usize, target_thickness: f64) -> Result<Self, GeneratorError> {
        let spec = RegularOddGonSpec {
            n,
            target_thickness,
            pole: SpherePoint::new(0.0, 0.0, 1.0).expect("unit vector"),
            phase: 0.0,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_pole(mut self, pole: SpherePoint, phase: f64) -> Self {
        self.pole = pole;
        self.phase = phase;
        self
    }

    fn check(&self) -> Result<(), GeneratorError> {
        if self.n < 3 || self.n % 2 == 0 {
            return Err(GeneratorError::InvalidSpec(format!(
                "n must be odd and at least 3, got {}",
                self.n
            )));
        }
        let t = self.target_thickness;
        if !(t > 0.0 && t < FRAC_PI_2 - EPS_GEO) {
            return Err(GeneratorError::Unachievable(t));
        }
        Ok(())
    }

    fn vertices(&self, circumradius: f64) -> Vec<SpherePoint> {
        let (u, w) = tangent_frame(&self.pole);
        let c = self.pole.vector();
        (0..self.n)
            .map(|j| {
                let phi = self.phase + 2.0 * PI * j as f64 / self.n as f64;
                let dir = u * phi.cos() + w * phi.sin();
                SpherePoint::from_vector(c * circumradius.cos() + dir * circumradius.sin())
                    .expect("unit vector")
            })
            .collect()
    }
}

/// Inradius of the regular `n`-gon with circumradius `r`: `tan ρ = tan r · cos(π/n)`.
pub fn regular_inradius(n: usize, r: f64) -> f64 {
    (r.tan() * (PI / n as f64).cos()).atan()
}

/// Circumradius solving `r + ρ(r) = target`, from the closed form.
pub fn regular_circumradius_closed_form(n: usize, target: f64) -> f64 {
    bisect(|r| r + regular_inradius(n, r) - target, 0.0, FRAC_PI_2 - 1e-12, 0.0)
}

/// Root of an increasing `f` on `[lo, hi]`; stops once `|f| ≤ tol_f` or the
/// bracket stops shrinking.
fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol_f: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let value = f(mid);
        if value.abs() <= tol_f {
            return mid;
        }
        if value < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Regular odd-gon whose measured thickness equals the target.
///
/// The closed-form circumradius only seeds the bracket; bisection runs on the
/// thickness reported by [`crate::width::thickness`].
pub fn regular_odd_gon(spec: &RegularOddGonSpec) -> Result<SphericalPolygon, GeneratorError> {
    spec.check()?;
    let target = spec.target_thickness;
    let measure = |r: f64| -> Result<f64, GeneratorError> {
        let poly = validate(spec.vertices(r))?;
        Ok(thickness(&poly)?.thickness - target)
    };

    let r0 = regular_circumradius_closed_form(spec.n, target);
    if measure(r0)?.abs() < 1e-10 {
        return Ok(validate(spec.vertices(r0))?);
    }
    let mut delta = 1e-6 * r0.max(1e-6);
    let (mut lo, mut hi);
    loop {
        lo = (r0 - delta).max(r0 * 1e-3);
        hi = (r0 + delta).min(FRAC_PI_2 - 1e-9);
        if measure(lo)? < 0.0 && measure(hi)? > 0.0 {
            break;
        }
        delta *= 4.0;
        if delta > 1.0 {
            return Err(GeneratorError::Unachievable(target));
        }
    }
    let mut failure = None;
    let r = bisect(
        |r| match measure(r) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        1e-10,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(validate(spec.vertices(r))?)
}

/// Displaces every vertex by an independent tangent offset of norm at most
/// `magnitude` (uniform in the tangent disk). Redraws up to 100 times while
/// the result is invalid.
pub fn perturb(v: &SphericalPolygon, magnitude: f64, seed: u64) -> Result<SphericalPolygon, GeneratorError> {
    if !(magnitude >= 0.0) {
        return Err(GeneratorError::InvalidSpec(format!("magnitude {magnitude} must be non-negative")));
    }
    if magnitude == 0.0 {
        return Ok(v.clone());
    }
    const ATTEMPTS: usize = 100;
    let mut rng = SeededStream::new(seed);
    for _ in 0..ATTEMPTS {
        let moved: Result<Vec<_>, _> = v
            .vertices()
            .iter()
            .map(|p| {
                let (u, w) = tangent_frame(p);
                let angle = 2.0 * PI * rng.unit();
                let radius = magnitude * rng.unit().sqrt();
                SpherePoint::from_vector(p.vector() + (u * angle.cos() + w * angle.sin()) * radius)
            })
            .collect();
        if let Ok(moved) = moved {
            if let Ok(poly) = validate(moved) {
                return Ok(poly);
            }
        }
    }
    Err(GeneratorError::PerturbationFailed(ATTEMPTS))
}

/// Moves vertex `i` by `amount` radians directly away from the polygon's
/// interior witness point.
pub fn push_vertex_outward(v: &SphericalPolygon, i: usize, amount: f64) -> Result<SphericalPolygon, GeneratorError> {
    let center = v.hemisphere_witness();
    let p = v.vertex(i);
    let toward_center = center.vector() - p.vector() * p.vector().dot(center.vector());
    if toward_center.norm() <= EPS_GEO {
        return Err(GeneratorError::InvalidSpec(format!("vertex {i} sits on the center")));
    }
    let dir = -toward_center.normalize();
    let mut vertices = v.vertices().to_vec();
    vertices[i % v.len()] = SpherePoint::from_vector(p.vector() * amount.cos() + dir * amount.sin())
        .map_err(|e| GeneratorError::InvalidSpec(e.to_string()))?;
    Ok(validate(vertices)?)
}

/// Random convex odd-gon: `n` points in a cap of radius π/4 around a random
/// pole. Each draw picks an outer radius `R` in `[0.25, 1] · π/4`; azimuths
/// are stratified, one per sector of angle `2π/n`, and jittered by up to
/// `0.6·irregularity` of a sector; colatitudes lie in
/// `[1 − 0.3·irregularity, 1] · R`. Draws repeat until the polygon
/// validates with thickness below π/2.
pub fn random_convex_odd_gon(n: usize, seed: u64) -> Result<SphericalPolygon, GeneratorError> {
    random_convex_odd_gon_with(n, 1.0, seed)
}

/// [`random_convex_odd_gon`] with an explicit `irregularity` in `(0, 1]`.
/// Small values stay close to a regular polygon, which is where the feet of
/// larger odd-gons tend to land inside their opposite sides.
pub fn random_convex_odd_gon_with(
    n: usize,
    irregularity: f64,
    seed: u64,
) -> Result<SphericalPolygon, GeneratorError> {
    if n < 3 || n % 2 == 0 {
        return Err(GeneratorError::InvalidSpec(format!("n must be odd and at least 3, got {n}")));
    }
    if !(irregularity > 0.0 && irregularity <= 1.0) {
        return Err(GeneratorError::InvalidSpec(format!(
            "irregularity must lie in (0, 1], got {irregularity}"
        )));
    }
    const ATTEMPTS: usize = 10_000;
    const CAP: f64 = PI / 4.0;
    let jitter = 0.6 * irregularity;
    let floor = 1.0 - 0.3 * irregularity;
    let mut rng = SeededStream::new(seed);
    for _ in 0..ATTEMPTS {
        let pole = rng.sphere_point();
        let (u, w) = tangent_frame(&pole);
        let offset = 2.0 * PI * rng.unit();
        let sector = 2.0 * PI / n as f64;
        let radius = CAP * (0.25 + 0.75 * rng.unit());
        let vertices: Result<Vec<_>, _> = (0..n)
            .map(|j| {
                let phi = offset + sector * (j as f64 + jitter * (rng.unit() - 0.5));
                let theta = radius * (floor + (1.0 - floor) * rng.unit());
                let dir = u * phi.cos() + w * phi.sin();
                SpherePoint::from_vector(pole.vector() * theta.cos() + dir * theta.sin())
            })
            .collect();
        let Ok(poly) = validate(vertices.expect("unit vectors")) else {
            continue;
        };
        if thickness(&poly)?.thickness < FRAC_PI_2 - EPS_GEO {
            return Ok(poly);
        }
    }
    Err(GeneratorError::GenerationFailed(ATTEMPTS))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub polygon: SphericalPolygon,
    /// Largest `|dist(v_i, opposite side) − target|` at exit.
    pub residual: f64,
    pub iterations: usize,
}

/// Distances from each vertex to the great circle of its opposite side.
fn vertex_side_distances(vertices: &[SpherePoint]) -> Option<DVector<f64>> {
    let n = vertices.len();
    let mut out = DVector::zeros(n);
    for i in 0..n {
        let a = vertices[(i + (n - 1) / 2) % n];
        let b = vertices[(i + (n + 1) / 2) % n];
        let pole = a.cross(&b);
        let norm = pole.norm();
        if norm < EPS_GEO {
            return None;
        }
        out[i] = (vertices[i].vector().dot(&pole) / norm).clamp(-1.0, 1.0).asin();
    }
    Some(out)
}

/// Best-effort search for a reduced odd-gon near a perturbed regular one.
///
/// Starts from `perturb(regular_odd_gon(n, target), magnitude, seed)` and
/// runs minimum-norm Gauss–Newton on the equations "every vertex is at
/// distance `target` from its opposite side". The result carries no
/// guarantee beyond what [`crate::reducedness::full_report`] says about it.
pub fn search_reduced(
    n: usize,
    target: f64,
    magnitude: f64,
    seed: u64,
) -> Result<SearchOutcome, GeneratorError> {
    let start = perturb(&regular_odd_gon(&RegularOddGonSpec::new(n, target)?)?, magnitude, seed)?;
    let base: Vec<SpherePoint> = start.vertices().to_vec();
    let frames: Vec<_> = base.iter().map(tangent_frame).collect();
    let place = |x: &DVector<f64>| -> Option<Vec<SpherePoint>> {
        base.iter()
            .zip(&frames)
            .enumerate()
            .map(|(i, (p, (u, w)))| {
                SpherePoint::from_vector(p.vector() + u * x[2 * i] + w * x[2 * i + 1]).ok()
            })
            .collect()
    };
    let residual_at = |x: &DVector<f64>| -> Option<DVector<f64>> {
        let d = vertex_side_distances(&place(x)?)?;
        Some(d.add_scalar(-target))
    };

    let mut x = DVector::zeros(2 * n);
    let mut f = residual_at(&x).ok_or(GeneratorError::SearchFailed(f64::INFINITY))?;
    let mut iterations = 0;
    const STEP: f64 = 1e-7;
    while f.amax() > 1e-14 && iterations < 50 {
        iterations += 1;
        let mut jac = DMatrix::zeros(n, 2 * n);
        for k in 0..2 * n {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[k] += STEP;
            minus[k] -= STEP;
            let (Some(fp), Some(fm)) = (residual_at(&plus), residual_at(&minus)) else {
                return Err(GeneratorError::SearchFailed(f.amax()));
            };
            jac.set_column(k, &((fp - fm) / (2.0 * STEP)));
        }
        let gram = &jac * jac.transpose();
        let Some(y) = gram.lu().solve(&f) else {
            return Err(GeneratorError::SearchFailed(f.amax()));
        };
        let step = jac.transpose() * y;
        // Halve the step until the residual drops.
        let mut scale = 1.0;
        let accepted = loop {
            if scale < 1.0 / 1024.0 {
                break None;
            }
            let next = &x - &step * scale;
            match residual_at(&next) {
                Some(fnext) if fnext.amax() < f.amax() => break Some((next, fnext)),
                _ => scale /= 2.0,
            }
        };
        let Some((next, fnext)) = accepted else { break };
        x = next;
        f = fnext;
    }
    let residual = f.amax();
    if residual > 1e-11 {
        return Err(GeneratorError::SearchFailed(residual));
    }
    let polygon = validate(place(&x).ok_or(GeneratorError::SearchFailed(residual))?)?;
    Ok(SearchOutcome {
        polygon,
        residual,
        iterations,
    })
}
