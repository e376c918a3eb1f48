use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use erunits::notation::parse_model;
use erunits::rds::schema_from_json;
use erunits::{models_equal, ERModel};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn erunits(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erunits")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn partition_prints_six_labels() {
    let o = erunits(&["partition", path(&fixture("vehicle_project.er"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "b(Project)\nc(Project)\nb(Vehicle)\nc(Vehicle)\n\
         b(AssignedTo(Vehicle,Project))\np(AssignedTo(Vehicle,Project))\n"
    );
}

#[test]
fn partition_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = erunits(&["partition", path(&fixture("employee.er")), "--json", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["units"][0]["label"], "b(Employee)");
    assert_eq!(doc["units"][1]["kind"], "secondary_simple_attrs");
    assert_eq!(doc["units"][1]["attrs"], serde_json::json!(["Address", "Gender"]));
}

#[test]
fn classify_output() {
    let o = erunits(&["classify", path(&fixture("vehicle_project.er"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "AssignedTo: Vehicle partial, Project total, one-to-many Vehicle->Project\n");

    let o = erunits(&["classify", path(&fixture("constraint_examples.er"))]);
    assert_eq!(
        stdout(&o),
        "OneToOne: A total, B partial, one-to-one\n\
         ManyToMany: A total, B total, many-to-many\n\
         Open: A partial, B total, one-to-many A->B\n"
    );
}

#[test]
fn validate_exit_codes() {
    let o = erunits(&["validate", path(&fixture("employee.er"))]);
    assert_eq!(o.status.code(), Some(0));

    let o = erunits(&["validate", path(&fixture("invalid.er"))]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    for code in ["DuplicateAttributeName", "RecursiveRelationship", "MinExceedsMax"] {
        assert!(text.contains(code), "{text}");
    }

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.er");
    fs::write(&bad, "entity E { key k }").unwrap();
    let o = erunits(&["validate", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:18: expected `attr`, found `}`"), "{}", stderr(&o));
}

#[test]
fn usage_errors() {
    assert_eq!(erunits(&[]).status.code(), Some(4));
    assert_eq!(erunits(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(erunits(&["check", "--seed", "1", "--iterations", "0"]).status.code(), Some(4));
    assert_eq!(erunits(&["validate", "/nonexistent/model.er"]).status.code(), Some(4));
    assert_eq!(erunits(&["--help"]).status.code(), Some(0));
}

#[test]
fn transform_then_reverse() {
    let dir = tempfile::tempdir().unwrap();
    let src = fixture("vehicle_project.er");
    let before = fs::read(&src).unwrap();
    let schema = dir.path().join("schema.json");
    let ddl = dir.path().join("schema.sql");
    let o = erunits(&["transform", path(&src), "--out", path(&schema), "--ddl", path(&ddl)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let (s, mapping) = schema_from_json(&fs::read_to_string(&schema).unwrap()).unwrap();
    assert_eq!(s.units.len(), 6);
    assert_eq!(mapping.len(), 6);
    let sql = fs::read_to_string(&ddl).unwrap();
    assert!(sql.contains("-- @minmax side=left min=0 max=3\n"));
    assert!(sql.contains("-- @minmax side=right min=1 max=1\n"));

    let back = dir.path().join("back.er");
    let o = erunits(&["reverse", path(&schema), "--out", path(&back)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let original: ERModel = parse_model(&String::from_utf8(before.clone()).unwrap()).unwrap();
    let restored = parse_model(&fs::read_to_string(&back).unwrap()).unwrap();
    assert!(models_equal(&original, &restored));

    // Inputs are never touched.
    assert_eq!(fs::read(&src).unwrap(), before);
}

#[test]
fn reverse_rejects_bad_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.er");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(erunits(&["reverse", path(&bad), "--out", path(&out)]).status.code(), Some(2));
    fs::write(&bad, r#"{"units":[],"mapping":[]}"#).unwrap();
    assert_eq!(erunits(&["reverse", path(&bad), "--out", path(&out)]).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn gen_and_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "42", "977"] {
        let o = erunits(&["gen", "--seed", seed]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), stdout(&erunits(&["gen", "--seed", seed])));
        let file = dir.path().join(format!("m{seed}.er"));
        fs::write(&file, stdout(&o)).unwrap();
        let o = erunits(&["roundtrip", path(&file)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).starts_with("round trip ok"));
    }

    let o = erunits(&["gen", "--seed", "5", "--entities", "1", "--rels", "0"]);
    let m = parse_model(&stdout(&o)).unwrap();
    assert_eq!(m.entities.len(), 1);
    assert!(m.relationships.is_empty());
    assert_eq!(erunits(&["gen", "--seed", "5", "--entities", "0"]).status.code(), Some(4));
}

#[test]
fn roundtrip_on_invalid_model() {
    assert_eq!(erunits(&["roundtrip", path(&fixture("invalid.er"))]).status.code(), Some(1));
}

#[test]
fn check_command() {
    let o = erunits(&["check", "--seed", "9", "--iterations", "25"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "25 iteration(s), 0 failure(s)\n");
}
