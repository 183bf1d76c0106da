//! Deterministic SVG figures of a polygon with its feet, `o_i` points and
//! attaining lune.
//!
//! The view axis is the normalized vertex sum. Great-circle arcs are sampled
//! adaptively until every chord is within half a pixel of the projected
//! curve, and coordinates are printed with three decimals.

use std::fmt::Write;

use nalgebra::Vector3;
use sphred::generators::tangent_frame;
use sphred::kernel::{distance, lune_midpoints};
use sphred::polygon::opposite_projection;
use sphred::{full_report, thickness, SpherePoint, SphericalPolygon, DEFAULT_TOLERANCE};

use crate::error::CliError;

pub const CANVAS: f64 = 800.0;
const CENTER: f64 = CANVAS / 2.0;
/// Largest projected distance of the polygon from the canvas center, px.
const FIT: f64 = 320.0;
const MAX_CHORD_ERROR: f64 = 0.5;
const MAX_DEPTH: u32 = 24;
/// Points further than this outside the canvas break a polyline.
const CLIP_MARGIN: f64 = 400.0;

const BACKGROUND: &str = "#ffffff";
const HORIZON: &str = "#d0d0d0";
const POLYGON_FILL: &str = "#e8eef7";
const POLYGON_STROKE: &str = "#1f3b73";
const FOOT: &str = "#b03a2e";
const WITNESS: &str = "#1e8449";
const LUNE: &str = "#7d3c98";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Projection {
    /// Orthographic view of the hemisphere around the view axis.
    Ortho,
    /// Stereographic projection from the antipode of the view axis.
    Stereo,
}

/// Optional overlays selected by `--show`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Layers {
    pub feet: bool,
    pub witnesses: bool,
    pub lunes: bool,
}

impl Layers {
    /// Parses a comma-separated list drawn from `t`, `o` and `lunes`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let mut layers = Layers::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "t" => layers.feet = true,
                "o" => layers.witnesses = true,
                "lunes" => layers.lunes = true,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown --show item {other:?}; expected t, o or lunes"
                    )))
                }
            }
        }
        Ok(layers)
    }
}

type Pixel = (f64, f64);

struct View {
    axis: Vector3<f64>,
    u: Vector3<f64>,
    w: Vector3<f64>,
    projection: Projection,
    scale: f64,
}

impl View {
    fn unit_coords(&self, p: &SpherePoint) -> Option<(f64, f64)> {
        let v = p.vector();
        let depth = v.dot(&self.axis);
        match self.projection {
            Projection::Ortho => (depth >= -1e-12).then(|| (v.dot(&self.u), v.dot(&self.w))),
            Projection::Stereo => {
                let d = 1.0 + depth;
                (d > 1e-9).then(|| (2.0 * v.dot(&self.u) / d, 2.0 * v.dot(&self.w) / d))
            }
        }
    }

    fn pixel(&self, p: &SpherePoint) -> Option<Pixel> {
        let (x, y) = self.unit_coords(p)?;
        let px = (CENTER + self.scale * x, CENTER - self.scale * y);
        let inside = |c: f64| (-CLIP_MARGIN..=CANVAS + CLIP_MARGIN).contains(&c);
        (inside(px.0) && inside(px.1)).then_some(px)
    }

    /// Samples `curve` on `[s0, s1]` and returns the visible runs.
    fn trace(&self, curve: &dyn Fn(f64) -> SpherePoint, s0: f64, s1: f64) -> Vec<Vec<Pixel>> {
        const START: usize = 8;
        let mut points = vec![self.pixel(&curve(s0))];
        for k in 0..START {
            let a = s0 + (s1 - s0) * k as f64 / START as f64;
            let b = s0 + (s1 - s0) * (k + 1) as f64 / START as f64;
            let (pa, pb) = (self.pixel(&curve(a)), self.pixel(&curve(b)));
            self.subdivide(curve, a, b, pa, pb, 0, &mut points);
        }
        let mut runs = Vec::new();
        let mut run = Vec::new();
        for p in points {
            match p {
                Some(p) => run.push(p),
                None if !run.is_empty() => runs.push(std::mem::take(&mut run)),
                None => {}
            }
        }
        if run.len() > 1 {
            runs.push(run);
        }
        runs.retain(|r| r.len() > 1);
        runs
    }

    /// Pushes the samples in `(a, b]`.
    #[allow(clippy::too_many_arguments)]
    fn subdivide(
        &self,
        curve: &dyn Fn(f64) -> SpherePoint,
        a: f64,
        b: f64,
        pa: Option<Pixel>,
        pb: Option<Pixel>,
        depth: u32,
        out: &mut Vec<Option<Pixel>>,
    ) {
        let m = 0.5 * (a + b);
        let pm = self.pixel(&curve(m));
        let flat = match (pa, pm, pb) {
            (Some(pa), Some(pm), Some(pb)) => {
                let chord_mid = (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1));
                (pm.0 - chord_mid.0).hypot(pm.1 - chord_mid.1) <= MAX_CHORD_ERROR
            }
            (None, None, None) => true,
            _ => false,
        };
        if flat || depth >= MAX_DEPTH {
            out.push(pb);
            return;
        }
        self.subdivide(curve, a, m, pa, pm, depth + 1, out);
        self.subdivide(curve, m, b, pm, pb, depth + 1, out);
    }
}

fn coord(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn polyline_data(runs: &[Vec<Pixel>]) -> String {
    let mut d = String::new();
    for run in runs {
        for (k, p) in run.iter().enumerate() {
            let op = if k == 0 { "M" } else { "L" };
            if !d.is_empty() {
                d.push(' ');
            }
            let _ = write!(d, "{op}{},{}", coord(p.0), coord(p.1));
        }
    }
    d
}

/// Point at arc length `s` from `a` towards `b` along their great circle.
fn geodesic(a: SpherePoint, b: SpherePoint) -> (impl Fn(f64) -> SpherePoint, f64) {
    let len = distance(&a, &b);
    let dir = (b.vector() - a.vector() * a.dot(&b)).normalize();
    let f = move |s: f64| {
        SpherePoint::from_vector(a.vector() * s.cos() + dir * s.sin()).expect("unit combination")
    };
    (f, len)
}

/// Half great circle from `corner` to its antipode through `mid`.
fn semicircle(corner: SpherePoint, mid: SpherePoint) -> impl Fn(f64) -> SpherePoint {
    let dir = (mid.vector() - corner.vector() * corner.dot(&mid)).normalize();
    move |s: f64| SpherePoint::from_vector(corner.vector() * s.cos() + dir * s.sin()).expect("unit combination")
}

fn view_for(poly: &SphericalPolygon, projection: Projection) -> Result<View, CliError> {
    let sum: Vector3<f64> = poly.vertices().iter().map(|v| *v.vector()).sum();
    let axis_point = SpherePoint::from_vector(sum).map_err(|e| CliError::Computation(e.to_string()))?;
    let axis = *axis_point.vector();
    if projection == Projection::Ortho {
        let hidden: Vec<usize> = (0..poly.len()).filter(|&i| poly.vertex(i).vector().dot(&axis) < 0.0).collect();
        if !hidden.is_empty() {
            return Err(CliError::NotVisible(hidden));
        }
    }
    let (u, w) = tangent_frame(&axis_point);
    let mut view = View { axis, u, w, projection, scale: 1.0 };
    let mut extent: f64 = 0.0;
    for i in 0..poly.len() {
        let (f, len) = geodesic(poly.vertex(i), poly.vertex(i + 1));
        for k in 0..=32 {
            if let Some((x, y)) = view.unit_coords(&f(len * k as f64 / 32.0)) {
                extent = extent.max(x.abs()).max(y.abs());
            }
        }
    }
    view.scale = if extent > 0.0 { FIT / extent } else { FIT };
    Ok(view)
}

pub fn render_svg(poly: &SphericalPolygon, projection: Projection, layers: Layers) -> Result<String, CliError> {
    let view = view_for(poly, projection)?;
    let n = poly.len();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(svg, r#"<rect width="{c}" height="{c}" fill="{BACKGROUND}"/>"#, c = CANVAS);
    if projection == Projection::Ortho && view.scale <= 2.0 * CANVAS {
        let _ = writeln!(
            svg,
            r#"<circle id="horizon" cx="{0}" cy="{0}" r="{1}" fill="none" stroke="{HORIZON}"/>"#,
            coord(CENTER),
            coord(view.scale)
        );
    }

    // Boundary, one closed path.
    let mut boundary: Vec<Pixel> = Vec::new();
    for i in 0..n {
        let (f, len) = geodesic(poly.vertex(i), poly.vertex(i + 1));
        for run in view.trace(&f, 0.0, len) {
            let skip = usize::from(!boundary.is_empty());
            boundary.extend(run.into_iter().skip(skip));
        }
    }
    boundary.pop();
    let _ = writeln!(
        svg,
        r#"<path id="polygon" d="{} Z" fill="{POLYGON_FILL}" stroke="{POLYGON_STROKE}" stroke-width="2"/>"#,
        polyline_data(&[boundary])
    );

    if layers.lunes {
        if let Ok(profile) = thickness(poly) {
            let lune = profile.attaining().lune;
            if let (Ok(corner), Ok((m_g, m_h))) = (
                SpherePoint::from_vector(lune.g.center.cross(&lune.h.center)),
                lune_midpoints(&lune),
            ) {
                let _ = writeln!(svg, r#"<g id="lune" fill="none" stroke="{LUNE}" stroke-width="1.5">"#);
                for mid in [m_g, m_h] {
                    let runs = view.trace(&semicircle(corner, mid), 0.0, std::f64::consts::PI);
                    if !runs.is_empty() {
                        let _ = writeln!(svg, r#"<path d="{}"/>"#, polyline_data(&runs));
                    }
                }
                let _ = writeln!(svg, "</g>");
            }
        }
    }

    if layers.feet && poly.is_odd() {
        let mark = 8.0 / view.scale;
        let _ = writeln!(svg, r#"<g id="feet" fill="none" stroke="{FOOT}" stroke-width="1">"#);
        for i in 0..n {
            let Ok(proj) = opposite_projection(poly, i) else { continue };
            let (t, v) = (proj.t, poly.vertex(i));
            let (f, len) = geodesic(v, t);
            let runs = view.trace(&f, 0.0, len);
            if !runs.is_empty() {
                let _ = writeln!(svg, r#"<path d="{}" stroke-dasharray="4 3"/>"#, polyline_data(&runs));
            }
            let a = poly.vertex(proj.side_indices.0);
            let b = poly.vertex(proj.side_indices.1);
            let s = mark.min(0.3 * distance(&t, &v)).min(0.3 * distance(&t, &a).max(distance(&t, &b)));
            let along = if distance(&t, &a) >= distance(&t, &b) { a } else { b };
            let e_side = (along.vector() - t.vector() * t.dot(&along)).normalize();
            let e_up = (v.vector() - t.vector() * t.dot(&v)).normalize();
            let corner = |x: Vector3<f64>| SpherePoint::from_vector(t.vector() + x).ok().and_then(|q| view.pixel(&q));
            let pts = [corner(e_side * s), corner((e_side + e_up) * s), corner(e_up * s)];
            if let [Some(p1), Some(p2), Some(p3)] = pts {
                let _ = writeln!(svg, r#"<path d="{}"/>"#, polyline_data(&[vec![p1, p2, p3]]));
            }
            if let Some(p) = view.pixel(&t) {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{}" cy="{}" r="3" fill="{FOOT}" stroke="none"/>"#,
                    coord(p.0),
                    coord(p.1)
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    if layers.witnesses {
        let report = full_report(poly, DEFAULT_TOLERANCE);
        let _ = writeln!(svg, r#"<g id="witnesses" fill="{WITNESS}" stroke="none">"#);
        for o in report.witnesses.iter().filter_map(|w| w.o) {
            if let Some(p) = view.pixel(&o) {
                let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="3.5"/>"#, coord(p.0), coord(p.1));
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    let _ = writeln!(svg, r#"<g id="vertices" fill="{POLYGON_STROKE}" font-family="sans-serif" font-size="12">"#);
    for (i, v) in poly.vertices().iter().enumerate() {
        if let Some(p) = view.pixel(v) {
            let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="4"/>"#, coord(p.0), coord(p.1));
            let (dx, dy) = (p.0 - CENTER, p.1 - CENTER);
            let r = dx.hypot(dy).max(1e-9);
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">v{i}</text>"#,
                coord(p.0 + 16.0 * dx / r),
                coord(p.1 + 16.0 * dy / r + 4.0)
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}
