use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use clap::Parser;
use serde_json::{json, Value};
use tempfile::TempDir;
use wignerkit::format::{ray_table_to_json, GeneratorJson, LineJson, MatrixJson};
use wignerkit::hilbert::{Ray, Subspace};
use wignerkit::isometry::{Isometry, OperatorClass};
use wignerkit::measure::{cabello_18_json, peres_33_json};
use wignerkit::projective::{random_line_family, RayMapTable};
use wignerkit::reconstruct::anchor_rays;
use wignerkit::sampling::{random_ray, seeded};
use wignerkit::tolerance::Tolerance;
use wignerkit_cli::{run, Outcome, RunConfig};

fn exec(args: &[&str]) -> Outcome {
    let config =
        RunConfig::try_parse_from(std::iter::once("wignerkit").chain(args.iter().copied()))
            .unwrap();
    run(&config)
}

fn write(dir: &TempDir, name: &str, value: &impl serde::Serialize) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn coordinate_file(dir: &TempDir, name: &str, n: usize, idx: &[usize]) -> PathBuf {
    write(
        dir,
        name,
        &MatrixJson::from_matrix(Subspace::coordinate(n, idx).basis()),
    )
}

fn induced_table(l: &Isometry, extra: usize, seed: u64) -> RayMapTable {
    let tol = Tolerance::default();
    let mut rng = seeded(seed);
    let mut sources = anchor_rays(l.dim());
    sources.extend((0..extra).map(|_| random_ray(l.dim(), &mut rng)));
    RayMapTable::induced_by(l, sources.iter(), &tol).unwrap()
}

#[test]
fn angles_of_orthogonal_subspaces_are_right() {
    let dir = TempDir::new().unwrap();
    let x = coordinate_file(&dir, "x.json", 5, &[0, 1]);
    let y = coordinate_file(&dir, "y.json", 5, &[2, 3]);
    let out = exec(&["angles", "--x", s(&x), "--y", s(&y)]);
    assert_eq!(out.code, 0);
    let angles = out.report["result"]["angles"].as_array().unwrap();
    assert_eq!(angles.len(), 2);
    assert!(angles
        .iter()
        .all(|a| (a.as_f64().unwrap() - FRAC_PI_2).abs() < 1e-12));
    assert_eq!(out.report["result"]["all_right"], json!(true));
}

#[test]
fn reports_carry_tolerances_and_seed() {
    let dir = TempDir::new().unwrap();
    let x = coordinate_file(&dir, "x.json", 4, &[0]);
    let out = exec(&[
        "distance",
        "--x",
        s(&x),
        "--y",
        s(&x),
        "--tol-eq",
        "1e-7",
        "--seed",
        "17",
    ]);
    assert_eq!(out.code, 0);
    assert_eq!(out.report["seed"], json!(17));
    assert_eq!(out.report["tolerances"]["eps_eq"], json!(1e-7));
    assert_eq!(out.report["tolerances"]["eps_rank"], json!(1e-9));
    assert_eq!(out.report["result"]["distance"], json!(0));
}

#[test]
fn distance_geodesic_and_compat_agree_on_coordinate_pairs() {
    let dir = TempDir::new().unwrap();
    let x = coordinate_file(&dir, "x.json", 7, &[0, 1, 2]);
    let y = coordinate_file(&dir, "y.json", 7, &[0, 3, 4]);
    let d = exec(&["distance", "--x", s(&x), "--y", s(&y)]);
    assert_eq!(d.report["result"]["distance"], json!(2));
    assert_eq!(d.report["result"]["intersection_dim"], json!(1));
    assert_eq!(d.report["result"]["sum_dim"], json!(5));
    let g = exec(&["geodesic", "--x", s(&x), "--y", s(&y)]);
    assert_eq!(g.code, 0);
    assert_eq!(g.report["result"]["length"], json!(2));
    assert_eq!(g.report["result"]["nodes"].as_array().unwrap().len(), 3);
    let c = exec(&["compat", "--x", s(&x), "--y", s(&y)]);
    assert_eq!(c.report["result"]["compatible"], json!(true));
    assert_eq!(c.report["result"]["adjacent"], json!(false));
}

#[test]
fn cliques_have_the_maximal_size() {
    let dir = TempDir::new().unwrap();
    let star = coordinate_file(&dir, "star.json", 6, &[0]);
    let out = exec(&["clique", "--anchor", s(&star), "--kind", "star"]);
    assert_eq!(out.code, 0, "{}", out.render());
    assert_eq!(out.report["result"]["report"]["size"], json!(5));
    let top = coordinate_file(&dir, "top.json", 6, &[0, 1, 2]);
    let out = exec(&[
        "clique",
        "--anchor",
        s(&top),
        "--kind",
        "top",
        "--samples",
        "50",
    ]);
    assert_eq!(out.code, 0);
    assert_eq!(out.report["result"]["report"]["size"], json!(3));
    assert_eq!(
        out.report["result"]["report"]["candidates_tried"],
        json!(50)
    );
}

#[test]
fn ks_search_on_fixtures() {
    let dir = TempDir::new().unwrap();
    for text in [peres_33_json(), cabello_18_json()] {
        let path = dir.path().join("h.json");
        std::fs::write(&path, text).unwrap();
        let out = exec(&["ks-search", "--rays", s(&path)]);
        assert_eq!(out.code, 0);
        assert_eq!(out.report["result"]["status"], json!("UNSAT"));
        assert!(out.report["result"].get("assignment").is_none());
    }
    let basis: Vec<MatrixJson> = (0..3)
        .map(|j| MatrixJson::from_ray(&Ray::basis(3, j)))
        .collect();
    let path = write(&dir, "basis.json", &json!({ "d": 3, "rays": basis }));
    let out = exec(&["ks-search", "--rays", s(&path)]);
    assert_eq!(out.code, 0);
    assert_eq!(out.report["result"]["status"], json!("SAT"));
    assert_eq!(out.report["result"]["verified"], json!(true));
}

#[test]
fn reconstruct_recovers_an_induced_table() {
    let dir = TempDir::new().unwrap();
    let l = Isometry::random(4, OperatorClass::ConjugateLinear, &mut seeded(3));
    let path = write(&dir, "t.json", &ray_table_to_json(&induced_table(&l, 8, 4)));
    let out = exec(&["reconstruct", "--table", s(&path)]);
    assert_eq!(out.code, 0, "{}", out.render());
    assert_eq!(
        out.report["result"]["reconstruction"]["class"],
        json!("conjugate-linear")
    );
    assert!(
        out.report["result"]["reconstruction"]["residual"]
            .as_f64()
            .unwrap()
            < 1e-8
    );
}

#[test]
fn reconstruct_rejects_a_table_that_breaks_orthogonality() {
    let dir = TempDir::new().unwrap();
    let mut table = induced_table(&Isometry::identity(3), 0, 0);
    table.set_image(1, Ray::basis(3, 0)).unwrap();
    let path = write(&dir, "bad.json", &ray_table_to_json(&table));
    let out = exec(&["reconstruct", "--table", s(&path)]);
    assert_eq!(out.code, 1);
    let violations = out.report["result"]["orthogonality"]["violations"]
        .as_array()
        .unwrap();
    assert!(!violations.is_empty());
    assert!(violations.iter().any(|v| v["indices"] == json!([0, 1])));
}

#[test]
fn reconstruct_names_an_inconsistent_entry() {
    let dir = TempDir::new().unwrap();
    let l = Isometry::random(4, OperatorClass::Linear, &mut seeded(5));
    let mut table = induced_table(&l, 6, 6);
    let idx = table.len() - 2;
    table.set_image(idx, random_ray(4, &mut seeded(7))).unwrap();
    let path = write(&dir, "t.json", &ray_table_to_json(&table));
    let out = exec(&["reconstruct", "--table", s(&path)]);
    assert_eq!(out.code, 1);
    let violations = &out.report["result"]["verification"]["violations"];
    assert_eq!(violations.as_array().unwrap().len(), 1);
    assert_eq!(violations[0]["indices"], json!([idx]));
}

#[test]
fn check_op_and_lineation_on_an_induced_map() {
    let dir = TempDir::new().unwrap();
    let tol = Tolerance::default();
    let l = Isometry::random(4, OperatorClass::Linear, &mut seeded(8));
    let samples = random_line_family(4, 4, 5, &mut seeded(9)).unwrap();
    let lines: Vec<LineJson> = samples
        .iter()
        .map(|ls| LineJson {
            carrier: None,
            members: ls.members.iter().map(MatrixJson::from_ray).collect(),
        })
        .collect();
    let sources: Vec<Ray> = samples.iter().flat_map(|ls| ls.members.clone()).collect();
    let table = RayMapTable::induced_by(&l, sources.iter(), &tol).unwrap();
    let t = write(&dir, "t.json", &ray_table_to_json(&table));
    let lp = write(&dir, "lines.json", &lines);
    assert_eq!(exec(&["check-op", "--table", s(&t)]).code, 0);
    let out = exec(&["check-lineation", "--table", s(&t), "--lines", s(&lp)]);
    assert_eq!(out.code, 0, "{}", out.render());
    assert_eq!(out.report["result"]["lines"], json!(4));

    // Every ray onto one point: images no longer span three dimensions.
    let flat = RayMapTable::from_fn(4, sources.iter(), &tol, |_| Ray::basis(4, 0)).unwrap();
    let f = write(&dir, "flat.json", &ray_table_to_json(&flat));
    let out = exec(&["check-lineation", "--table", s(&f), "--lines", s(&lp)]);
    assert_eq!(out.code, 1);
    assert_eq!(
        out.report["result"]["nondegenerate"]["l1_pass"],
        json!(false)
    );
    assert_eq!(
        out.report["result"]["nondegenerate"]["l2_pass"],
        json!(false)
    );
}

#[test]
fn descend_recovers_the_generator_class() {
    let dir = TempDir::new().unwrap();
    let tol = Tolerance::default();
    for (class, name) in [
        (OperatorClass::Linear, "linear"),
        (OperatorClass::ConjugateLinear, "conjugate-linear"),
    ] {
        let l = Isometry::random(5, class, &mut seeded(10));
        let g = GeneratorJson {
            matrix: MatrixJson::from_matrix(l.matrix()),
            class,
            k: 2,
        };
        assert!(g.isometry(&tol).is_ok());
        let path = write(&dir, "g.json", &g);
        let out = exec(&["descend", "--generator", s(&path), "--samples", "5"]);
        assert_eq!(out.code, 0, "{}", out.render());
        assert_eq!(
            out.report["result"]["descent"]["reconstruction"]["class"],
            json!(name)
        );
        assert_eq!(out.report["result"]["class_matches_generator"], json!(true));
    }
}

#[test]
fn descend_outside_its_range_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let g = GeneratorJson {
        matrix: MatrixJson::from_matrix(Isometry::identity(4).matrix()),
        class: OperatorClass::Linear,
        k: 2,
    };
    let path = write(&dir, "g.json", &g);
    assert_eq!(exec(&["descend", "--generator", s(&path)]).code, 2);
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        "{\"rows\": 3,\n \"cols\": 1,\n \"data\": [[1, 0], [0 0]]}",
    )
    .unwrap();
    let y = coordinate_file(&dir, "y.json", 3, &[0]);
    let out = exec(&["angles", "--x", s(&path), "--y", s(&y)]);
    assert_eq!(out.code, 2);
    assert_eq!(
        out.report["error_location"],
        json!({ "line": 3, "column": 22 })
    );
    assert!(out.report["error"].as_str().unwrap().contains("line 3"));
}

#[test]
fn bad_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let x = coordinate_file(&dir, "x.json", 4, &[0]);
    let y = coordinate_file(&dir, "y.json", 5, &[0]);
    assert_eq!(exec(&["angles", "--x", s(&x), "--y", s(&y)]).code, 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(exec(&["angles", "--x", s(&missing), "--y", s(&x)]).code, 2);
    assert_eq!(
        exec(&["angles", "--x", s(&x), "--y", s(&x), "--tol-eq=-1"]).code,
        2
    );
    let ragged = write(
        &dir,
        "r.json",
        &json!({ "rows": 2, "cols": 2, "data": [[1, 0]] }),
    );
    assert_eq!(exec(&["angles", "--x", s(&ragged), "--y", s(&x)]).code, 2);
}

#[test]
fn verify_suite_passes_and_is_deterministic() {
    let a = exec(&["verify-suite", "--dims", "5x2,7x3", "--seed", "3"]);
    let b = exec(&["verify-suite", "--dims", "5x2,7x3", "--seed", "3"]);
    assert_eq!(a.code, 0, "{}", a.render());
    assert_eq!(a.render(), b.render());
    let anchors = a.report["result"]["anchors"].as_object().unwrap();
    assert_eq!(anchors.len(), 9);
    assert!(anchors
        .values()
        .all(|v| v["pass"] == json!(true) && v["trials"].as_u64().unwrap() > 0));
}

#[test]
fn injected_fault_fails_exactly_one_anchor() {
    let out = exec(&["verify-suite", "--inject-fault"]);
    assert_eq!(out.code, 1);
    let failing: Vec<&String> = out.report["result"]["anchors"]
        .as_object()
        .unwrap()
        .iter()
        .filter(|(_, v)| v["pass"] == json!(false))
        .map(|(k, _)| k)
        .collect();
    assert_eq!(failing, ["wigner_reconstruction"]);
}

#[test]
fn verify_suite_rejects_empty_or_invalid_dims() {
    for dims in ["", "4x2", "5x1", "five"] {
        let out = exec(&["verify-suite", "--dims", dims]);
        assert_eq!(out.code, 2, "{dims:?}");
        assert!(out.report["error"].is_string());
    }
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_wignerkit"))
}

#[test]
fn binary_exit_codes_and_output_file() {
    let dir = TempDir::new().unwrap();
    let peres = dir.path().join("p.json");
    std::fs::write(&peres, peres_33_json()).unwrap();
    let out = binary()
        .args(["ks-search", "--rays", s(&peres)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["status"], json!("UNSAT"));

    let file = dir.path().join("report.json");
    let written = binary()
        .args(["ks-search", "--rays", s(&peres), "--out", s(&file)])
        .output()
        .unwrap();
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), out.stdout);

    assert_eq!(
        binary()
            .args(["no-such-verb"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        binary().args(["angles"]).output().unwrap().status.code(),
        Some(2)
    );
    let empty = binary()
        .args(["verify-suite", "--dims", ""])
        .output()
        .unwrap();
    assert_eq!(empty.status.code(), Some(2));
}

#[test]
fn binary_reads_seed_from_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = binary();
        cmd.args(["verify-suite", "--dims", "5x2"])
            .env_remove("WIGNERKIT_SEED");
        if let Some(v) = env {
            cmd.env("WIGNERKIT_SEED", v);
        }
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    assert_eq!(run(None, None)["seed"], json!(0));
    assert_eq!(run(Some("42"), None)["seed"], json!(42));
    assert_eq!(run(Some("42"), Some("7"))["seed"], json!(7));
}
