//! Acceptance gate. Every criterion runs at its stated threshold and prints one
//! PASS/FAIL line; the test fails if any criterion does.
//!
//! Run with `cargo test -p erunits --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use erunits::harness::{generate_model, GenConfig};
use erunits::notation::{model_from_json, model_to_json, parse_model, print_model};
use erunits::partition::{verify_partition, ERConstructUnit};
use erunits::*;

const CORPUS_SIZE: u64 = 1000;
const FORMAT_CORPUS_SIZE: u64 = 200;
const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const ROUND_TRIP_LIMIT: Duration = Duration::from_secs(10);

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn corpus(range: std::ops::Range<u64>) -> Vec<ERModel> {
    range.map(|seed| generate_model(&GenConfig::with_seed(seed))).collect()
}

type Outcome = Result<String, String>;

type Criterion<'a> = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn employee_golden() -> Outcome {
    let model = parse_model(&fixture("employee.er")).map_err(|e| e.to_string())?;
    let p = partition_model(&model).map_err(|e| e.to_string())?;
    let labels: BTreeSet<String> = p.labels().into_iter().collect();
    let expected: BTreeSet<String> = ["b(Employee)", "c(Employee)"].map(String::from).into();
    ensure(labels == expected && p.units.len() == 2, format!("labels {labels:?}"))?;
    let secondary = p.units.iter().find_map(|u| match u {
        ERConstructUnit::SecondarySimpleAttrs { attrs, .. } => Some(attrs.clone()),
        _ => None,
    });
    ensure(
        secondary == Some(vec!["Address".into(), "Gender".into()]),
        format!("c(Employee) holds {secondary:?}"),
    )?;
    Ok("{b(Employee), c(Employee)}, c = [Address, Gender]".into())
}

fn six_unit_golden() -> Outcome {
    let model = parse_model(&fixture("vehicle_project.er")).map_err(|e| e.to_string())?;
    let p = partition_model(&model).map_err(|e| e.to_string())?;
    let labels: BTreeSet<String> = p.labels().into_iter().collect();
    let expected: BTreeSet<String> = [
        "b(Vehicle)",
        "c(Vehicle)",
        "b(Project)",
        "c(Project)",
        "b(AssignedTo(Vehicle,Project))",
        "p(AssignedTo(Vehicle,Project))",
    ]
    .map(String::from)
    .into();
    ensure(labels == expected && p.units.len() == 6, format!("labels {labels:?}"))?;
    Ok("six units, exact set match".into())
}

fn constraint_classification() -> Outcome {
    use CardinalityRatio::*;
    use Participation::*;
    let p = MinMaxPair::finite;
    let cases = [
        ("vehicle/project", p(0, 3), p(1, 1), Partial, Total, OneToMany(Direction::LeftToRight)),
        ("one-to-one", p(1, 1), p(0, 1), Total, Partial, OneToOne),
        ("many-to-many", p(1, 3), p(2, 5), Total, Total, ManyToMany),
    ];
    for (name, l, r, lp, rp, ratio) in cases {
        let got = (classify_participation(l), classify_participation(r), classify_cardinality(l, r));
        ensure(got == (lp, rp, ratio), format!("{name}: {got:?}"))?;
    }
    Ok("3/3 exact".into())
}

fn round_trip_identity(models: &[ERModel]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (seed, m) in models.iter().enumerate() {
        let ok = partition_model(m)
            .ok()
            .and_then(|p| forward_transform(&p).ok())
            .and_then(|(s, _)| reverse_transform(&s).ok())
            .is_some_and(|back| models_equal(&back, m));
        if !ok {
            failures.push(seed);
        }
    }
    let elapsed = start.elapsed();
    ensure(
        failures.is_empty(),
        format!("{} failures, first seeds {:?}", failures.len(), &failures[..failures.len().min(5)]),
    )?;
    ensure(elapsed < ROUND_TRIP_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!("{}/{} identical in {elapsed:.2?}", models.len(), models.len()))
}

fn bijection(models: &[ERModel]) -> Outcome {
    for (seed, m) in models.iter().enumerate() {
        let p = partition_model(m).map_err(|e| format!("seed {seed}: {e}"))?;
        let (s, map) = forward_transform(&p).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = check_bijection(&p, &s, &map);
        ensure(report.passed(), format!("seed {seed}:\n{report}"))?;
    }
    Ok(format!("totality, injectivity, surjectivity, cardinality on {}/{}", models.len(), models.len()))
}

/// Independent recount: walk the model's constructs, tag each with the kind
/// of unit that owns it, and count distinct (kind, owner) tags.
fn recount_units(m: &ERModel) -> usize {
    let mut tags = BTreeSet::new();
    for e in &m.entities {
        tags.insert(("b", e.name.to_string()));
        for _ in &e.secondary_attrs {
            tags.insert(("c", e.name.to_string()));
        }
    }
    for r in &m.relationships {
        tags.insert(("br", r.name.to_string()));
        for _ in &r.attrs {
            tags.insert(("p", r.name.to_string()));
        }
    }
    tags.len()
}

fn partition_laws(models: &[ERModel]) -> Outcome {
    for (seed, m) in models.iter().enumerate() {
        let p = partition_model(m).map_err(|e| format!("seed {seed}: {e}"))?;
        let v = verify_partition(&p);
        ensure(v.is_empty(), format!("seed {seed}: {:?}", v.first().map(ToString::to_string)))?;
        let e = m.entities.len();
        let r = m.relationships.len();
        let e2 = m.entities.iter().filter(|e| !e.secondary_attrs.is_empty()).count();
        let r2 = m.relationships.iter().filter(|r| !r.attrs.is_empty()).count();
        let formula = e + r + e2 + r2;
        ensure(
            p.units.len() == formula && formula == recount_units(m),
            format!("seed {seed}: {} units, formula {formula}, recount {}", p.units.len(), recount_units(m)),
        )?;
    }
    Ok(format!("no violations, E+R+E2+R2 = recount on {}/{}", models.len(), models.len()))
}

fn format_round_trips(models: &[ERModel]) -> Outcome {
    for (seed, m) in models.iter().enumerate() {
        let dsl = parse_model(&print_model(m)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(models_equal(&dsl, m), format!("seed {seed}: DSL round trip differs"))?;
        let json = model_from_json(&model_to_json(m)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(models_equal(&json, m), format!("seed {seed}: JSON round trip differs"))?;
        let (schema, _) = forward_transform(&partition_model(m).unwrap()).unwrap();
        ensure(emit_ddl(&schema) == emit_ddl(&schema), format!("seed {seed}: DDL not stable"))?;
    }

    // Byte stability across separate processes as well.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/vehicle_project.er");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let ddl = dir.path().join(format!("run{run}.sql"));
        let status = Command::new(env!("CARGO_BIN_EXE_erunits"))
            .arg("transform")
            .arg(&src)
            .arg("--out")
            .arg(dir.path().join(format!("run{run}.json")))
            .arg("--ddl")
            .arg(&ddl)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), "transform failed")?;
        outputs.push(std::fs::read(&ddl).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], "DDL differs between runs")?;
    Ok(format!("DSL and JSON {}/{}, DDL byte-stable", models.len(), models.len()))
}

#[test]
fn acceptance_criteria() {
    let corpus_models = corpus(0..CORPUS_SIZE);
    let format_models = corpus(10_000..10_000 + FORMAT_CORPUS_SIZE);

    let criteria: Vec<Criterion> = vec![
        ("1 Employee golden partition", Some(GOLDEN_LIMIT), Box::new(employee_golden)),
        ("2 six-unit golden partition", Some(GOLDEN_LIMIT), Box::new(six_unit_golden)),
        ("3 constraint classification", None, Box::new(constraint_classification)),
        (
            "4 round-trip identity (1000 models, <10 s)",
            None,
            Box::new(|| round_trip_identity(&corpus_models)),
        ),
        ("5 bijection (1000 models)", None, Box::new(|| bijection(&corpus_models))),
        ("6 partition laws (1000 models)", None, Box::new(|| partition_laws(&corpus_models))),
        (
            "7 format round trips (200 models) + DDL stability",
            None,
            Box::new(|| format_round_trips(&format_models)),
        ),
    ];

    let mut failed = Vec::new();
    for (name, limit, run) in &criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed >= *limit {
                outcome = Err(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL criterion {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
