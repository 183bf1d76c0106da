//! End-to-end behaviour of the `sphred` binary and its library entry point.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::process::{Command, Stdio};

use proptest::prelude::*;
use serde_json::Value;
use sphred::generators::random_convex_odd_gon;
use sphred_cli::document::{CoordinateMode, PolygonDocument};
use sphred_cli::{run, Env};

fn sphred(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sphred"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn in_process(args: &[&str], stdin: &str) -> (i32, String, String) {
    let argv = std::iter::once("sphred").chain(args.iter().copied());
    let out = run(argv, &mut stdin.as_bytes(), Env::default());
    (out.code, out.stdout, out.stderr)
}

fn gen(args: &[&str]) -> String {
    let mut argv = vec!["gen"];
    argv.extend_from_slice(args);
    let (code, doc, err) = in_process(&argv, "");
    assert_eq!(code, 0, "{err}");
    doc
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

const TRIANGLE: &str = r#"{"format_version":"1","mode":"xyz","vertices":[[1,0,0],[0,1,0],[0,0,1]]}"#;

#[test]
fn exit_code_contract() {
    let reduced = gen(&["--n", "5", "--thickness", "0.8"]);
    let (code, out, _) = sphred(&["check", "--json", "-"], &reduced);
    assert_eq!(code, 0);
    let report = json(&out);
    assert_eq!(report["verdict"], "reduced");
    for c in ["condition_a", "condition_b", "condition_c", "condition_d"] {
        assert_eq!(report[c]["holds"], true);
    }

    let perturbed = gen(&["--n", "5", "--thickness", "0.8", "--perturb", "0.05", "--seed", "7"]);
    assert_eq!(sphred(&["check", "-"], &perturbed).0, 1);

    let square = r#"{"format_version":"1","mode":"lonlat","vertices":[[0,0],[20,0],[20,20],[0,20]]}"#;
    let (code, out, _) = sphred(&["check", "--json", "-"], square);
    assert_eq!(code, 2);
    let report = json(&out);
    assert_eq!(report["verdict"], "gated");
    assert_eq!(report["gate"]["kind"], "EvenPolygon");
    assert!(report["width_profile"]["thickness_rad"].as_f64().unwrap() > 0.0);

    // Octant triangle: thickness π/2 is out of scope.
    let (code, out, _) = sphred(&["check", "--json", "-"], TRIANGLE);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["gate"]["kind"], "ThicknessTooLarge");

    // Obtuse apex sends two feet outside their sides.
    let skewed = r#"{"format_version":"1","mode":"lonlat","vertices":[[0,0],[40,0],[3,4]]}"#;
    let (code, out, _) = sphred(&["check", "--json", "-"], skewed);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["gate"]["kind"], "PreconditionFailed");
    assert!(!json(&out)["gate"]["indices"].as_array().unwrap().is_empty());
}

#[test]
fn input_errors_are_machine_readable() {
    let cases = [
        ("{not json", "ParseError"),
        (r#"{"format_version":"1","vertices":{"a":1}}"#, "SchemaError"),
        (r#"{"format_version":"1","vertices":[[1,0,0],[0,1,0],[-1,0,0]]}"#, "ValidationError"),
        (r#"{"format_version":"1","vertices":[[0,0,0],[0,1,0],[0,0,1]]}"#, "ValidationError"),
    ];
    for (input, kind) in cases {
        let (code, out, _) = sphred(&["check", "--json", "-"], input);
        assert_eq!(code, 2, "{input}");
        assert_eq!(json(&out)["error"]["kind"], kind, "{input}");
    }
    let (_, out, _) = sphred(&["check", "--json", "-"], cases[2].0);
    assert_eq!(json(&out)["error"]["violations"][0]["kind"], "AntipodalVertices");

    let (code, out, err) = sphred(&["check", "-"], "{");
    assert_eq!((code, out.as_str()), (2, ""));
    assert!(err.starts_with("error[ParseError]"));

    let (code, _, err) = sphred(&["check", "/nonexistent/polygon.json"], "");
    assert_eq!(code, 2);
    assert!(err.contains("IoError"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sphred(&["gen", "--n", "4", "--thickness", "0.8"], "").0, 2);
    assert_eq!(sphred(&["gen", "--n", "5", "--thickness", "1.6"], "").0, 2);
    assert_eq!(sphred(&["gen", "--n", "5"], "").0, 2);
    assert_eq!(sphred(&["check", "--tol", "-1", "-"], TRIANGLE).0, 2);
    assert_eq!(sphred(&["render", "--show", "t,x", "-"], TRIANGLE).0, 2);
    assert_eq!(sphred(&["frobnicate"], "").0, 2);
    let (code, out, _) = sphred(&["--help"], "");
    assert_eq!(code, 0);
    assert!(out.contains("check"));
}

#[test]
fn gen_metadata_records_provenance() {
    let doc = json(&gen(&["--n", "5", "--thickness", "0.8", "--perturb", "0.05", "--seed", "7"]));
    let meta = &doc["metadata"];
    assert_eq!(meta["generator"], "regular_odd_gon");
    assert_eq!(meta["n"], 5);
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["perturb_rad"], 0.05);
    assert_eq!(meta["target_thickness_rad"], 0.8);
    assert_eq!(meta["prng"], sphred::generators::PRNG_ID);
    assert_eq!(meta["library_version"], sphred::VERSION);
    assert!(meta["measured_thickness_rad"].as_f64().unwrap() > 0.0);

    let random = json(&gen(&["--n", "7", "--random", "--seed", "3"]));
    assert_eq!(random["metadata"]["generator"], "random_convex_odd_gon");
    assert_eq!(random["vertices"].as_array().unwrap().len(), 7);
}

#[test]
fn generated_documents_are_byte_identical() {
    for args in [
        vec!["--n", "9", "--thickness", "1.1", "--perturb", "0.01", "--seed", "42"],
        vec!["--n", "5", "--random", "--seed", "17", "--mode", "lonlat"],
    ] {
        let a = sphred(&[&["gen"][..], &args].concat(), "").1;
        let b = sphred(&[&["gen"][..], &args].concat(), "").1;
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
}

#[test]
fn width_command() {
    let hept = gen(&["--n", "7", "--thickness", "1.0"]);
    let (code, out, _) = in_process(&["width", "-"], &hept);
    assert_eq!(code, 0);
    let profile = json(&out);
    let sides = profile["per_side"].as_array().unwrap();
    assert_eq!(sides.len(), 7);
    for s in sides {
        assert!((s["width_rad"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
    assert!(profile["attaining_lune"]["g_center"].is_array());

    let random = gen(&["--n", "5", "--random", "--seed", "8"]);
    let (code, out, _) = in_process(&["width", "--oracle", "-"], &random);
    assert_eq!(code, 0);
    assert!(json(&out)["oracle"]["max_abs_diff_rad"].as_f64().unwrap() < 1e-6);

    let (_, out, _) = in_process(&["width", "-"], TRIANGLE);
    for s in json(&out)["per_side"].as_array().unwrap() {
        let w = s["width_rad"].as_f64().unwrap();
        // The octant triangle sits exactly at π/2.
        assert!(w > 0.0 && w <= FRAC_PI_2 + 1e-12);
    }
    let smaller = r#"{"format_version":"1","mode":"lonlat","vertices":[[0,0],[30,0],[15,25]]}"#;
    let (_, out, _) = in_process(&["width", "-"], smaller);
    for s in json(&out)["per_side"].as_array().unwrap() {
        let w = s["width_rad"].as_f64().unwrap();
        assert!(w > 0.0 && w < FRAC_PI_2);
    }
}

#[test]
fn oracle_command() {
    let pent = gen(&["--n", "5", "--thickness", "0.8"]);
    let (code, out, _) = in_process(&["oracle", "--grid", "20000", "-"], &pent);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["refined_thickness_rad"].as_f64().unwrap() - 0.8).abs() < 1e-6);
    assert!(v["coarse_thickness_rad"].as_f64().unwrap() >= 0.8 - v["grid_spacing_rad"].as_f64().unwrap());
    let (code, out, _) = in_process(&["oracle", "--grid", "1", "-"], &pent);
    assert_eq!(code, 2);
    assert!(out.is_empty());
}

#[test]
fn search_command() {
    let (code, out, _) = in_process(&["search", "--n", "5", "--thickness", "0.8", "--seed", "1"], "");
    assert_eq!(code, 0);
    let doc = json(&out);
    assert_eq!(doc["metadata"]["verdict"], "reduced");
    let (code, _, _) = in_process(&["check", "-"], &out);
    assert_eq!(code, 0);
}

#[test]
fn color_only_when_asked() {
    let pent = gen(&["--n", "5", "--thickness", "0.8"]);
    let argv = ["sphred", "check", "-"];
    let colored = run(argv, &mut pent.as_bytes(), Env { color: true });
    assert!(colored.stdout.contains("\x1b[32m"));
    let plain = run(argv, &mut pent.as_bytes(), Env { color: false });
    assert!(!plain.stdout.contains('\x1b'));
    let mut child = Command::new(env!("CARGO_BIN_EXE_sphred"))
        .args(["check", "-"])
        .env("NO_COLOR", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(pent.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(!String::from_utf8(out.stdout).unwrap().contains('\x1b'));
}

fn path_points(svg: &str, id: &str) -> Vec<(f64, f64)> {
    let start = svg.find(&format!(r#"id="{id}" d=""#)).unwrap() + id.len() + 9;
    let d = &svg[start..start + svg[start..].find('"').unwrap()];
    d.split_whitespace()
        .filter(|t| *t != "Z")
        .map(|t| {
            let (x, y) = t[1..].split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn distance_to_polyline(p: (f64, f64), pts: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..pts.len() {
        let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
        best = best.min((a.0 + t * dx - p.0).hypot(a.1 + t * dy - p.1));
    }
    best
}

#[test]
fn regular_pentagon_figure_has_five_fold_symmetry() {
    let pent = gen(&["--n", "5", "--thickness", "0.8"]);
    let (code, svg, _) = in_process(&["render", "-"], &pent);
    assert_eq!(code, 0);
    let pts = path_points(&svg, "polygon");
    assert!(pts.len() > 5);
    let angle = 2.0 * std::f64::consts::PI / 5.0;
    for &(x, y) in &pts {
        let (dx, dy) = (x - 400.0, y - 400.0);
        let turned = (400.0 + dx * angle.cos() - dy * angle.sin(), 400.0 + dx * angle.sin() + dy * angle.cos());
        assert!(distance_to_polyline(turned, &pts) < 0.01, "{turned:?}");
    }
}

#[test]
fn svg_is_deterministic_and_shows_overlays() {
    let pent = gen(&["--n", "5", "--thickness", "0.8"]);
    for projection in ["ortho", "stereo"] {
        let args = ["render", "--projection", projection, "--show", "t,o,lunes", "-"];
        let a = sphred(&args, &pent);
        let b = sphred(&args, &pent);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        assert!(a.1.starts_with("<svg") && a.1.contains(r#"viewBox="0 0 800 800""#));
        for group in [r#"id="feet""#, r#"id="witnesses""#, r#"id="lune""#] {
            assert!(a.1.contains(group), "{group}");
        }
        let feet = &a.1[a.1.find(r#"id="feet""#).unwrap()..];
        let feet = &feet[..feet.find("</g>").unwrap()];
        assert_eq!(feet.matches("<circle").count(), 5);
        assert!(!a.1.contains("-0.000"));
    }
}

#[test]
fn feet_are_drawn_on_their_sides() {
    let pent = gen(&["--n", "5", "--thickness", "0.8"]);
    let (_, svg, _) = in_process(&["render", "--show", "t", "-"], &pent);
    let boundary = path_points(&svg, "polygon");
    let feet = &svg[svg.find(r#"id="feet""#).unwrap()..];
    for circle in feet.split("<circle").skip(1) {
        let attr = |name: &str| -> f64 {
            let s = &circle[circle.find(&format!(r#"{name}=""#)).unwrap() + name.len() + 2..];
            s[..s.find('"').unwrap()].parse().unwrap()
        };
        assert!(distance_to_polyline((attr("cx"), attr("cy")), &boundary) < 0.5);
    }
}

#[test]
fn vertices_facing_away_are_not_visible() {
    let doc = r#"{"format_version":"1","vertices":[[1,0,-0.2],[-0.108,0.168,1],[-0.189,0.065,1],[-0.189,-0.065,1],[-0.108,-0.168,1]]}"#;
    let (code, _, err) = sphred(&["render", "-"], doc);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["kind"], "NotVisible");
    assert_eq!(sphred(&["render", "--projection", "stereo", "-"], doc).0, 0);
}

fn max_abs_diff(a: &sphred::SphericalPolygon, b: &sphred::SphericalPolygon) -> f64 {
    a.vertices()
        .iter()
        .zip(b.vertices())
        .map(|(p, q)| (p.vector() - q.vector()).amax())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn documents_round_trip(seed in any::<u64>(), k in 0usize..4, lonlat in any::<bool>()) {
        let poly = random_convex_odd_gon([3, 5, 7, 9][k], seed).unwrap();
        let mode = if lonlat { CoordinateMode::Lonlat } else { CoordinateMode::Xyz };
        let text = PolygonDocument::from_polygon(&poly, mode).to_json();
        let back = PolygonDocument::parse(&text).unwrap().to_polygon().unwrap();
        prop_assert!(max_abs_diff(&poly, &back) < 1e-12);
        if !lonlat {
            prop_assert_eq!(poly.vertices(), back.vertices());
        }
    }
}

#[test]
fn file_input_and_tempfile() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(gen(&["--n", "3", "--thickness", "0.5"]).as_bytes()).unwrap();
    let path = file.path().to_str().unwrap();
    assert_eq!(sphred(&["check", path], "").0, 0);
}
