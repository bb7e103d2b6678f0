use std::io::Write;
use std::process::{Command, Stdio};

use nalgebra::{DMatrix, DVector};
use periodica::cli::analyze;
use periodica::constructors::{cadelniza, double_arrowhead, CadelnizaParams, GalleryItem, GallerySelector};
use periodica::io::{export_obj, framework_to_json, linkage_to_json, parse_document, Document};
use periodica::quotient::to_periodic;
use periodica::{Error, PeriodicFramework};
use serde_json::Value;

fn exe(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_periodica"));
    cmd.args(args)
        .env_remove("PERIODICA_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn pipeline(gallery: &[&str]) -> Value {
    let (code, doc, _) = exe(gallery, "", &[]);
    assert_eq!(code, 0);
    let (code, framework, _) = exe(&["convert"], &doc, &[]);
    assert_eq!(code, 0);
    let (code, report, _) = exe(&["analyze", "--json"], &framework, &[]);
    assert_eq!(code, 0);
    serde_json::from_str(&report).unwrap()
}

#[test]
fn gallery_documents_round_trip() {
    for sel in GallerySelector::standard() {
        let text = match sel.build().unwrap() {
            GalleryItem::Linkage(l) => linkage_to_json(&l),
            GalleryItem::Framework(f) => framework_to_json(&f),
        };
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.to_json(), text, "{}", sel.name());
    }
}

#[test]
fn missing_marked_pairs_is_located() {
    let mut v: Value = serde_json::from_str(&linkage_to_json(&double_arrowhead())).unwrap();
    v.as_object_mut().unwrap().remove("marked_pairs");
    let err = parse_document(&v.to_string()).unwrap_err();
    assert!(matches!(err, Error::SchemaError { ref path, .. } if path == "$.marked_pairs"));
}

#[test]
fn schema_errors_carry_nested_paths() {
    let mut v: Value = serde_json::from_str(&linkage_to_json(&double_arrowhead())).unwrap();
    v["vertices"][2][1] = Value::from("high");
    let err = parse_document(&v.to_string()).unwrap_err();
    assert!(matches!(err, Error::SchemaError { ref path, .. } if path == "$.vertices[2][1]"));
    v["version"] = Value::from(7);
    assert_eq!(parse_document(&v.to_string()).unwrap_err(), Error::VersionUnsupported(7));
}

#[test]
fn serialized_cadelniza_analyzes_identically() {
    let l = cadelniza(CadelnizaParams::new(3)).unwrap();
    let direct = analyze(&Document::Linkage(l.clone()), 42).unwrap();
    let reread = parse_document(&linkage_to_json(&l)).unwrap();
    assert_eq!(analyze(&reread, 42).unwrap(), direct);
}

#[test]
fn obj_of_a_lone_orbit_is_a_cube_of_points() {
    let f = PeriodicFramework::new(
        3,
        DMatrix::identity(3, 3),
        vec![DVector::zeros(3)],
        &[],
    )
    .unwrap();
    let obj = export_obj(&f, 2).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 8);
    assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 0);
}

#[test]
fn obj_line_count_matches_interior_translates() {
    let f = to_periodic(&double_arrowhead()).unwrap();
    let cells = 3i64;
    let obj = export_obj(&f, cells as usize).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 2 * 9);
    // translates γ with γ + shift still inside the block, counted per axis
    let expected: i64 = f
        .edge_orbits()
        .iter()
        .map(|e| e.shift.iter().map(|s| (cells - s.abs()).max(0)).product::<i64>())
        .sum();
    assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count() as i64, expected);
}

#[test]
fn obj_rejects_other_dimensions() {
    let f = PeriodicFramework::new(4, DMatrix::identity(4, 4), vec![DVector::zeros(4)], &[]).unwrap();
    assert_eq!(export_obj(&f, 1).unwrap_err(), Error::UnsupportedDimension(4));
}

#[test]
fn lk_pipeline_has_one_degree_of_freedom() {
    let r = pipeline(&["gallery", "lk", "--k", "3"]);
    assert_eq!(r["dof"], 1);
    assert_eq!(r["seed"], 42);
    for key in ["rank", "independent", "strict_direction", "eigenvalues"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn cadelniza_pipeline_finds_a_strict_direction() {
    let r = pipeline(&["gallery", "cadelniza", "--d", "3"]);
    assert_eq!(r["dof"], 3);
    assert_eq!(r["strict_direction"]["found"], true);
}

#[test]
fn rigid_input_reports_nothing_to_search() {
    let doc = r#"{"kind":"linkage","version":1,"dimension":2,
        "vertices":[[0,0],[1,0],[0.2,0.9]],"edges":[[0,1],[1,2],[0,2]],"marked_pairs":[[0,1],[0,2]]}"#;
    let (code, out, _) = exe(&["analyze", "--json"], doc, &[]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["dof"], 0);
    assert_eq!(r["strict_direction"]["found"], false);
}

#[test]
fn exit_codes_separate_input_from_numerics() {
    let (code, _, err) = exe(&["analyze"], "{\"version\":1}", &[]);
    assert_eq!(code, 1);
    assert!(err.contains("$.kind"));
    // a nearly flat triangle puts a singular value next to the rank threshold
    let flat = r#"{"kind":"linkage","version":1,"dimension":2,
        "vertices":[[0,0],[2,0],[1,1e-8],[0,1]],"edges":[[0,1],[1,2],[0,2],[0,3],[1,3]],
        "marked_pairs":[[0,1],[0,3]]}"#;
    let (code, _, err) = exe(&["analyze"], flat, &[]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn seed_comes_from_the_environment() {
    let doc = linkage_to_json(&cadelniza(CadelnizaParams::new(3)).unwrap());
    let (code, out, _) = exe(&["analyze", "--json"], &doc, &[("PERIODICA_SEED", "7")]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["seed"], 7);
    let (code, _, _) = exe(&["analyze"], &doc, &[("PERIODICA_SEED", "seven")]);
    assert_eq!(code, 1);
}

#[test]
fn commands_are_deterministic() {
    let (_, a, _) = exe(&["gallery", "paneled-simplex", "--d", "3"], "", &[]);
    let (_, b, _) = exe(&["gallery", "paneled-simplex", "--d", "3"], "", &[]);
    assert_eq!(a, b);
    let (_, x, _) = exe(&["analyze", "--json"], &a, &[]);
    let (_, y, _) = exe(&["analyze", "--json"], &a, &[]);
    assert_eq!(x, y);
}

#[test]
fn trace_affine_and_export_run() {
    let (_, doc, _) = exe(&["gallery", "double-arrowhead"], "", &[]);
    let (code, out, _) = exe(&["trace", "--steps", "60", "--seed", "-1", "--interval"], &doc, &[]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["interval"]["hi_kind"], "ConeBoundary");
    assert!(r["samples"].as_array().unwrap().len() > 100);

    let (code, out, err) = exe(&["affine", "--matrix", "1,0.5,0,2", "--check-invariance"], &doc, &[]);
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("ok"));
    assert!(matches!(parse_document(&out).unwrap(), Document::Framework(_)));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("block.obj");
    let (code, _, _) = exe(&["export", "--cells", "3", "-o", path.to_str().unwrap()], &doc, &[]);
    assert_eq!(code, 0);
    let obj = std::fs::read_to_string(path).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 18);
}
