//! Brute-force width oracle.
//!
//! Samples hemisphere centers instead of enumerating support candidates, so it
//! shares nothing with [`crate::width`] beyond the definition: the width for
//! side `i` is `π − max |k c*|` over centers `c*` whose hemisphere contains
//! every vertex.

use std::f64::consts::PI;

use nalgebra::Vector3;
use thiserror::Error;

use crate::kernel::{distance, SpherePoint, EPS_GEO};
use crate::polygon::SphericalPolygon;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("none of the {0} grid points is a feasible hemisphere center; use a larger grid")]
    NoFeasibleSample(usize),
}

/// `m` points of the Fibonacci (golden-angle) lattice on S².
pub fn fibonacci_grid(m: usize) -> impl Iterator<Item = SpherePoint> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..m).map(move |i| {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden_angle * i as f64;
        SpherePoint::new(rho * phi.cos(), rho * phi.sin(), z).expect("lattice point is on the sphere")
    })
}

/// Rough spacing of an `m`-point lattice, in radians.
pub fn grid_spacing(m: usize) -> f64 {
    (4.0 * PI / m.max(1) as f64).sqrt()
}

fn supports(v: &SphericalPolygon, c: &SpherePoint) -> bool {
    v.vertices().iter().all(|x| x.dot(c) >= -EPS_GEO)
}

fn side_center(v: &SphericalPolygon, i: usize) -> SpherePoint {
    let side = v.side(i);
    SpherePoint::from_vector(side.a.cross(&side.b)).expect("validated side")
}

/// Best feasible center among `grid` for side `i`, with its objective `k · c`.
pub fn best_sample(
    v: &SphericalPolygon,
    i: usize,
    grid: impl IntoIterator<Item = SpherePoint>,
) -> Result<SpherePoint, OracleError> {
    let k = side_center(v, i);
    let mut count = 0;
    let mut best: Option<(f64, SpherePoint)> = None;
    for c in grid {
        count += 1;
        if !supports(v, &c) {
            continue;
        }
        let dot = k.dot(&c);
        if best.is_none_or(|(d, _)| dot < d) {
            best = Some((dot, c));
        }
    }
    best.map(|(_, c)| c).ok_or(OracleError::NoFeasibleSample(count))
}

/// Grid-only estimate of the width for side `i`.
pub fn sampling_oracle_width(v: &SphericalPolygon, i: usize, m: usize) -> Result<f64, OracleError> {
    let k = side_center(v, i);
    let c = best_sample(v, i, fibonacci_grid(m))?;
    Ok(PI - distance(&k, &c))
}

/// Grid estimate followed by a local search on the constraint circles
/// `{c : c · v_j = 0}` passing near the best sample. The optimum of a linear
/// objective over the feasible region lies on one of those circles.
pub fn refined_oracle_width(v: &SphericalPolygon, i: usize, m: usize) -> Result<f64, OracleError> {
    let k = side_center(v, i);
    let start = best_sample(v, i, fibonacci_grid(m))?;
    let reach = 0.35 + 4.0 * grid_spacing(m);
    let mut best = k.dot(&start);
    for vj in v.vertices() {
        let offset = start.dot(vj).clamp(-1.0, 1.0).asin();
        if offset.abs() > reach {
            continue;
        }
        if let Some(dot) = refine_on_circle(v, &k, vj, &start, 0.6) {
            best = best.min(dot);
        }
    }
    Ok(PI - best.clamp(-1.0, 1.0).acos())
}

/// Minimizes `k · c` over feasible `c` on the circle orthogonal to `normal`,
/// within `±window` of the projection of `near`, by repeated zooming.
fn refine_on_circle(
    v: &SphericalPolygon,
    k: &SpherePoint,
    normal: &SpherePoint,
    near: &SpherePoint,
    window: f64,
) -> Option<f64> {
    let nv = normal.vector();
    let e1 = near.vector() - nv * nv.dot(near.vector());
    if e1.norm() < 1e-6 {
        return None;
    }
    let e1 = e1.normalize();
    let e2 = nv.cross(&e1);
    let at = |theta: f64| -> Vector3<f64> { e1 * theta.cos() + e2 * theta.sin() };
    let eval = |theta: f64| -> Option<f64> {
        let c = SpherePoint::from_vector(at(theta)).ok()?;
        supports(v, &c).then(|| k.dot(&c))
    };

    const SAMPLES: usize = 200;
    let (mut lo, mut hi) = (-window, window);
    let mut best: Option<(f64, f64)> = None;
    for _ in 0..60 {
        let step = (hi - lo) / SAMPLES as f64;
        let mut thetas: Vec<f64> = (0..=SAMPLES).map(|s| lo + step * s as f64).collect();
        if let Some((theta, _)) = best {
            thetas.push(theta);
        }
        for theta in thetas {
            if let Some(dot) = eval(theta) {
                if best.is_none_or(|(_, d)| dot < d) {
                    best = Some((theta, dot));
                }
            }
        }
        let (theta, _) = best?;
        lo = theta - 2.0 * step;
        hi = theta + 2.0 * step;
        if step < 1e-14 {
            break;
        }
    }
    best.map(|(_, d)| d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::validate;

    fn regular(n: usize, r: f64) -> SphericalPolygon {
        let vertices = (0..n)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n as f64;
                SpherePoint::new(r.sin() * phi.cos(), r.sin() * phi.sin(), r.cos()).unwrap()
            })
            .collect();
        validate(vertices).unwrap()
    }

    #[test]
    fn fibonacci_grid_is_unit_and_spread() {
        let pts: Vec<_> = fibonacci_grid(2000).collect();
        assert_eq!(pts.len(), 2000);
        let mean = pts.iter().fold(Vector3::zeros(), |a, p| a + p.vector()) / 2000.0;
        assert!(mean.norm() < 1e-2);
        // Every point of a coarse probe set is within a few spacings of the lattice.
        for probe in fibonacci_grid(97) {
            let nearest = pts.iter().map(|p| distance(p, &probe)).fold(f64::INFINITY, f64::min);
            assert!(nearest < grid_spacing(2000));
        }
    }

    #[test]
    fn regular_pentagon_oracle() {
        let r = 0.5;
        let poly = regular(5, r);
        let exact = r + (r.tan() * (PI / 5.0).cos()).atan();
        let m = 1_000_000;
        let coarse = sampling_oracle_width(&poly, 0, m).unwrap();
        assert!((coarse - exact).abs() < 1e-2);
        assert!(coarse >= exact - PI / (m as f64).sqrt());
        let refined = refined_oracle_width(&poly, 0, 20_000).unwrap();
        assert!((refined - exact).abs() < 1e-6, "{refined} vs {exact}");
    }

    #[test]
    fn infeasible_grid() {
        // Polygon around −x; the one-point lattice is (1, 0, 0).
        let vertices = [(-1.0, 0.2, 0.0), (-1.0, -0.1, -0.2), (-1.0, -0.1, 0.2)]
            .into_iter()
            .map(|(x, y, z)| SpherePoint::new(x, y, z).unwrap())
            .collect();
        let poly = validate(vertices).unwrap();
        assert_eq!(
            sampling_oracle_width(&poly, 0, 1),
            Err(OracleError::NoFeasibleSample(1))
        );
        let adversarial = [SpherePoint::new(1.0, 0.0, 0.0).unwrap(), SpherePoint::new(0.0, 1.0, 0.3).unwrap()];
        assert_eq!(
            best_sample(&poly, 0, adversarial),
            Err(OracleError::NoFeasibleSample(2))
        );
    }
}
