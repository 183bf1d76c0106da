use std::fmt::Write;
use std::io::Read;

use serde_json::{json, Value};
use sphred::generators::{
    perturb, random_convex_odd_gon_with, regular_odd_gon, search_reduced, GeneratorError, RegularOddGonSpec,
    PRNG_ID,
};
use sphred::oracle::{grid_spacing, refined_oracle_width, sampling_oracle_width};
use sphred::{full_report, thickness, ReducednessReport, SphericalPolygon, Verdict, VERSION};

use crate::document::{load, CoordinateMode, PolygonDocument};
use crate::error::CliError;
use crate::render::{render_svg, Layers};
use crate::{Command, Env, Outcome};

pub const DEFAULT_GRID: usize = 20_000;
pub const REPORT_VERSION: &str = "1";

pub fn execute(command: Command, stdin: &mut dyn Read, env: Env) -> Outcome {
    let errors = match &command {
        Command::Check { json: true, .. } => ErrorStyle::JsonStdout,
        Command::Check { .. } => ErrorStyle::Text,
        _ => ErrorStyle::JsonStderr,
    };
    let result = match command {
        Command::Check { input, tol, json, .. } => {
            check_tolerance(tol).and_then(|_| load(&input, stdin)).map(|(_, poly)| check(&poly, tol, json, env))
        }
        Command::Gen { n, thickness, seed, perturb, random, irregularity, mode } => {
            gen(n, thickness, seed, perturb, random.then_some(irregularity), mode).map(ok)
        }
        Command::Width { input, oracle, grid } => load(&input, stdin).and_then(|(_, p)| width(&p, oracle.then_some(grid))).map(ok),
        Command::Oracle { input, grid } => load(&input, stdin).and_then(|(_, p)| oracle(&p, grid)).map(ok),
        Command::Search { n, thickness, perturb, seed, tol, mode } => {
            check_tolerance(tol).and_then(|_| search(n, thickness, perturb, seed, tol, mode))
        }
        Command::Render { input, projection, show } => Layers::parse(&show)
            .and_then(|layers| {
                let (_, poly) = load(&input, stdin)?;
                render_svg(&poly, projection, layers)
            })
            .map(ok),
    };
    result.unwrap_or_else(|e| failure(&e, errors))
}

fn ok(stdout: String) -> Outcome {
    Outcome { code: 0, stdout, stderr: String::new() }
}

/// Where a failed command reports its error. Stdout is kept for documents
/// and reports, so only `check --json` puts the error object there.
#[derive(Clone, Copy)]
enum ErrorStyle {
    JsonStdout,
    JsonStderr,
    Text,
}

fn failure(e: &CliError, style: ErrorStyle) -> Outcome {
    let (stdout, stderr) = match style {
        ErrorStyle::JsonStdout => (to_json_line(&e.to_json()), String::new()),
        ErrorStyle::JsonStderr => (String::new(), to_json_line(&e.to_json())),
        ErrorStyle::Text => (String::new(), format!("error[{}]: {e}\n", e.kind())),
    };
    Outcome { code: 2, stdout, stderr }
}

fn to_json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn check_tolerance(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--tol must be a positive number of radians, got {tol}")))
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Reduced => 0,
        Verdict::NotReduced => 1,
        Verdict::Gated => 2,
    }
}

pub fn report_json(report: &ReducednessReport) -> Value {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    value["report_version"] = json!(REPORT_VERSION);
    value["verdict"] = json!(report.verdict());
    value
}

fn check(poly: &SphericalPolygon, tol: f64, json: bool, env: Env) -> Outcome {
    let report = full_report(poly, tol);
    let stdout = if json { to_json_line(&report_json(&report)) } else { text_report(&report, env.color) };
    Outcome { code: verdict_code(report.verdict()), stdout, stderr: String::new() }
}

fn paint(text: &str, good: bool, color: bool) -> String {
    match (color, good) {
        (false, _) => text.to_string(),
        (true, true) => format!("\x1b[32m{text}\x1b[0m"),
        (true, false) => format!("\x1b[31m{text}\x1b[0m"),
    }
}

fn lon_lat(p: &sphred::SpherePoint) -> String {
    let (lon, lat) = p.to_lon_lat_deg();
    format!("({lon:.6}, {lat:.6})")
}

pub fn text_report(report: &ReducednessReport, color: bool) -> String {
    let mut out = String::new();
    let verdict = match report.verdict() {
        Verdict::Reduced => "reduced",
        Verdict::NotReduced => "not reduced",
        Verdict::Gated => "gated",
    };
    let _ = writeln!(out, "{:<16}{}", "verdict", paint(verdict, report.verdict() == Verdict::Reduced, color));
    let _ = writeln!(out, "{:<16}{}", "n", report.n);
    let thickness = report.thickness_rad.map_or("-".to_string(), |t| format!("{t:.15}"));
    let _ = writeln!(out, "{:<16}{thickness}", "thickness_rad");
    let _ = writeln!(out, "{:<16}{:e}", "tolerance_rad", report.tolerance_rad);
    let pre = if report.precondition_ok { "ok" } else { "failed" };
    let _ = writeln!(out, "{:<16}{}", "precondition", paint(pre, report.precondition_ok, color));
    if let Some(gate) = &report.gate {
        let _ = writeln!(out, "{:<16}{}: {}", "gate", gate.kind, gate.message);
        if !gate.indices.is_empty() {
            let _ = writeln!(out, "{:<16}{:?}", "offending", gate.indices);
        }
    } else {
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<11}{:<7}residual_rad", "condition", "holds");
        for (name, slot) in ["(a)", "(b)", "(c)", "(d)"].iter().zip(report.conditions()) {
            let holds = format!("{:<7}", slot.holds);
            let residual = match (&slot.residual_rad, &slot.error) {
                (Some(r), _) => format!("{r:.3e}"),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => "-".to_string(),
            };
            let _ = writeln!(out, "{name:<11}{}{residual}", paint(&holds, slot.holds, color));
        }
    }
    if !report.witnesses.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<4}{:<32}{:<20}{:<10}{:<32}side_width_rad",
            "i", "t_i (lon, lat deg)", "dist_to_side_rad", "interior", "o_i (lon, lat deg)"
        );
        for w in &report.witnesses {
            let o = match (&w.o, &w.o_error) {
                (Some(o), _) => lon_lat(o),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<4}{:<32}{:<20.15}{:<10}{:<32}{:.15}",
                w.index,
                lon_lat(&w.t),
                w.dist_to_side_rad,
                w.in_relative_interior,
                o,
                w.side_width_rad
            );
        }
    }
    out
}

fn generator_error(e: GeneratorError) -> CliError {
    match e {
        GeneratorError::InvalidSpec(_) | GeneratorError::Unachievable(_) => CliError::Usage(e.to_string()),
        other => CliError::Generation(other.to_string()),
    }
}

fn measured(poly: &SphericalPolygon) -> Result<f64, CliError> {
    thickness(poly).map(|p| p.thickness).map_err(|e| CliError::Computation(e.to_string()))
}

pub fn gen(
    n: usize,
    target: Option<f64>,
    seed: u64,
    magnitude: f64,
    random: Option<f64>,
    mode: CoordinateMode,
) -> Result<String, CliError> {
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(CliError::Usage(format!("--perturb must be a non-negative number, got {magnitude}")));
    }
    let mut meta = serde_json::Map::new();
    let base = match (random, target) {
        (Some(irregularity), _) => {
            meta.insert("generator".into(), json!("random_convex_odd_gon"));
            meta.insert("irregularity".into(), json!(irregularity));
            random_convex_odd_gon_with(n, irregularity, seed).map_err(generator_error)?
        }
        (None, Some(target)) => {
            meta.insert("generator".into(), json!("regular_odd_gon"));
            meta.insert("target_thickness_rad".into(), json!(target));
            let spec = RegularOddGonSpec::new(n, target).map_err(generator_error)?;
            regular_odd_gon(&spec).map_err(generator_error)?
        }
        (None, None) => return Err(CliError::Usage("--thickness is required without --random".into())),
    };
    let poly = if magnitude > 0.0 { perturb(&base, magnitude, seed).map_err(generator_error)? } else { base };
    meta.insert("n".into(), json!(n));
    meta.insert("seed".into(), json!(seed));
    meta.insert("perturb_rad".into(), json!(magnitude));
    meta.insert("prng".into(), json!(PRNG_ID));
    meta.insert("library_version".into(), json!(VERSION));
    meta.insert("measured_thickness_rad".into(), json!(measured(&poly)?));
    let mut doc = PolygonDocument::from_polygon(&poly, mode);
    doc.metadata = meta.into_iter().collect();
    Ok(doc.to_json())
}

pub fn width(poly: &SphericalPolygon, grid: Option<usize>) -> Result<String, CliError> {
    let profile = thickness(poly).map_err(|e| CliError::Computation(e.to_string()))?;
    let attaining = profile.attaining().lune;
    let mut value = serde_json::to_value(&profile).expect("profiles serialize");
    value["n"] = json!(poly.len());
    value["attaining_lune"] = json!({ "g_center": attaining.g.center, "h_center": attaining.h.center });
    if let Some(m) = grid {
        let oracle: Vec<f64> = (0..poly.len())
            .map(|i| refined_oracle_width(poly, i, m))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Computation(e.to_string()))?;
        let diff = profile.widths().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        value["oracle"] = json!({ "grid": m, "widths_rad": oracle, "max_abs_diff_rad": diff });
    }
    Ok(to_json_line(&value))
}

pub fn oracle(poly: &SphericalPolygon, m: usize) -> Result<String, CliError> {
    let mut per_side = Vec::new();
    for i in 0..poly.len() {
        let coarse = sampling_oracle_width(poly, i, m).map_err(|e| CliError::Computation(e.to_string()))?;
        let refined = refined_oracle_width(poly, i, m).map_err(|e| CliError::Computation(e.to_string()))?;
        per_side.push(json!({ "side": i, "coarse_width_rad": coarse, "refined_width_rad": refined }));
    }
    let coarse_min = per_side.iter().map(|s| s["coarse_width_rad"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    let refined_min = per_side.iter().map(|s| s["refined_width_rad"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    Ok(to_json_line(&json!({
        "grid": m,
        "grid_spacing_rad": grid_spacing(m),
        "per_side": per_side,
        "coarse_thickness_rad": coarse_min,
        "refined_thickness_rad": refined_min,
    })))
}

fn search(n: usize, target: f64, magnitude: f64, seed: u64, tol: f64, mode: CoordinateMode) -> Result<Outcome, CliError> {
    if !(magnitude.is_finite() && magnitude > 0.0) {
        return Err(CliError::Usage(format!("--perturb must be positive, got {magnitude}")));
    }
    let found = search_reduced(n, target, magnitude, seed).map_err(generator_error)?;
    let report = full_report(&found.polygon, tol);
    let mut doc = PolygonDocument::from_polygon(&found.polygon, mode);
    let residuals: Vec<Value> = report.residuals().iter().map(|r| json!(r)).collect();
    for (key, value) in [
        ("generator", json!("search_reduced")),
        ("n", json!(n)),
        ("target_thickness_rad", json!(target)),
        ("seed", json!(seed)),
        ("perturb_rad", json!(magnitude)),
        ("prng", json!(PRNG_ID)),
        ("library_version", json!(VERSION)),
        ("search_residual_rad", json!(found.residual)),
        ("search_iterations", json!(found.iterations)),
        ("measured_thickness_rad", json!(report.thickness_rad)),
        ("tolerance_rad", json!(tol)),
        ("verdict", json!(report.verdict())),
        ("condition_residuals_rad", json!(residuals)),
    ] {
        doc.metadata.insert(key.to_string(), value);
    }
    let code = match report.verdict() {
        Verdict::Reduced => 0,
        _ => 1,
    };
    Ok(Outcome { code, stdout: doc.to_json(), stderr: String::new() })
}
