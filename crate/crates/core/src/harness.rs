//! Seeded random model generation and the property battery run by `check`.
//!
//! The generator uses ChaCha8 seeded with `GenConfig::seed`. Iteration `i` of
//! the suite uses seed `config.seed + i` (wrapping), so every failure can be
//! replayed with `gen --seed`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{
    canonicalize, classify_cardinality, classify_participation, models_equal, validate_model, ERModel,
    EntityType, Ident, MaxBound, MinMaxPair, Participation, RelationshipType,
};
use crate::notation::{model_from_json, model_to_json, parse_model, print_model};
use crate::partition::{partition_model, verify_partition, ERConstructUnit, UnitKind};
use crate::rds::{
    check_bijection, emit_ddl, forward_transform, reverse_transform, schema_from_json, schema_to_json,
    RdsUnit, RdsUnitKind, RelationalSchema, ReverseError,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_entities: usize,
    pub max_secondary_attrs: usize,
    pub max_relationships: usize,
    pub max_rel_attrs: usize,
    /// Largest finite max value drawn.
    pub max_bound: u32,
    /// Chance that a max is `N`.
    pub unbounded_probability: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_entities: 6,
            max_secondary_attrs: 4,
            max_relationships: 5,
            max_rel_attrs: 3,
            max_bound: 9,
            unbounded_probability: 0.3,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig { seed, ..Self::default() }
    }

    pub fn is_valid(&self) -> bool {
        self.max_entities >= 1 && self.max_bound >= 1 && (0.0..=1.0).contains(&self.unbounded_probability)
    }
}

/// Draws a valid model. Entities are `Entity1..`, relationships `Rel1..`, and
/// attributes `a1..` numbered across the whole model.
///
/// Panics if `config` is not valid.
pub fn generate_model(config: &GenConfig) -> ERModel {
    assert!(config.is_valid(), "invalid generator config: {config:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut next_attr = 0usize;
    let mut attr = || {
        next_attr += 1;
        Ident::new(format!("a{next_attr}"))
    };

    let entity_count = rng.gen_range(1..=config.max_entities);
    let entities: Vec<EntityType> = (1..=entity_count)
        .map(|i| {
            let key_attr = attr();
            let mandatory_attr = attr();
            let secondary = rng.gen_range(0..=config.max_secondary_attrs);
            EntityType {
                name: Ident::new(format!("Entity{i}")),
                key_attr,
                mandatory_attr,
                secondary_attrs: (0..secondary).map(|_| attr()).collect(),
            }
        })
        .collect();

    let rel_count = if entity_count < 2 { 0 } else { rng.gen_range(0..=config.max_relationships) };
    let relationships = (1..=rel_count)
        .map(|i| {
            let left = rng.gen_range(0..entity_count);
            let mut right = rng.gen_range(0..entity_count - 1);
            if right >= left {
                right += 1;
            }
            let left_constraint = draw_pair(&mut rng, config);
            let right_constraint = draw_pair(&mut rng, config);
            let attrs = rng.gen_range(0..=config.max_rel_attrs);
            RelationshipType {
                name: Ident::new(format!("Rel{i}")),
                left_entity: entities[left].name.clone(),
                right_entity: entities[right].name.clone(),
                left_constraint,
                right_constraint,
                attrs: (0..attrs).map(|_| attr()).collect(),
            }
        })
        .collect();

    ERModel { entities, relationships }
}

fn draw_pair(rng: &mut ChaCha8Rng, config: &GenConfig) -> MinMaxPair {
    if rng.gen_bool(config.unbounded_probability) {
        MinMaxPair::unbounded(rng.gen_range(0..=config.max_bound))
    } else {
        let max = rng.gen_range(1..=config.max_bound);
        MinMaxPair::finite(rng.gen_range(0..=max), max)
    }
}

/// Names of the properties checked per generated model.
pub mod property {
    pub const GENERATED_VALID: &str = "generated-model-valid";
    pub const CANONICAL_IDEMPOTENT: &str = "canonicalize-idempotent";
    pub const CLASSIFICATION: &str = "classification-laws";
    pub const PARTITION_VERIFIES: &str = "partition-verifies";
    pub const PARTITION_DETERMINISTIC: &str = "partition-deterministic";
    pub const UNIT_COUNT: &str = "unit-count-formula";
    pub const DSL_ROUND_TRIP: &str = "dsl-round-trip";
    pub const JSON_ROUND_TRIP: &str = "json-round-trip";
    pub const FORWARD_REVERSE: &str = "forward-reverse-round-trip";
    pub const BIJECTION: &str = "bijection";
    pub const SCHEMA_LAWS: &str = "schema-laws";
    pub const SCHEMA_JSON_ROUND_TRIP: &str = "schema-json-round-trip";
    pub const DDL_STABLE: &str = "ddl-stable";
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub seed: u64,
    pub property: &'static str,
    pub detail: String,
    /// Canonical JSON of the generated model.
    pub model_json: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub iterations: usize,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Swappable pipeline stages, so the suite can be pointed at a faulty stage
/// to confirm it notices.
#[derive(Clone, Copy)]
pub struct Stages {
    pub reverse: fn(&RelationalSchema) -> Result<ERModel, ReverseError>,
}

impl Default for Stages {
    fn default() -> Self {
        Stages { reverse: reverse_transform }
    }
}

pub fn run_property_suite(config: &GenConfig, iterations: usize) -> CheckReport {
    run_property_suite_with(config, iterations, Stages::default())
}

pub fn run_property_suite_with(config: &GenConfig, iterations: usize, stages: Stages) -> CheckReport {
    assert!(iterations >= 1, "iterations must be at least 1");
    let mut failures: Vec<Failure> = (0..iterations as u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let seed = config.seed.wrapping_add(i);
            let model = generate_model(&GenConfig { seed, ..config.clone() });
            let model_json = model_to_json(&model);
            check_model(&model, stages).into_iter().map(move |(property, detail)| Failure {
                seed,
                property,
                detail,
                model_json: model_json.clone(),
            })
        })
        .collect();
    failures.sort_by(|a, b| (a.seed, a.property).cmp(&(b.seed, b.property)));
    CheckReport { iterations, failures }
}

/// Runs every property against one model; returns the ones that failed.
pub fn check_model(model: &ERModel, stages: Stages) -> Vec<(&'static str, String)> {
    use property::*;
    let mut failed = Vec::new();
    let mut check = |name: &'static str, outcome: Result<(), String>| {
        if let Err(detail) = outcome {
            failed.push((name, detail));
        }
    };

    let violations = validate_model(model);
    if !violations.is_empty() {
        check(GENERATED_VALID, Err(format!("{} violation(s): {}", violations.len(), violations[0])));
        return failed;
    }

    let canonical = canonicalize(model);
    check(
        CANONICAL_IDEMPOTENT,
        expect(
            canonicalize(&canonical) == canonical && models_equal(model, &canonical),
            "canonicalize is not idempotent",
        ),
    );
    check(CLASSIFICATION, classification_laws(model));

    let partition = match partition_model(model) {
        Ok(p) => p,
        Err(e) => {
            check(PARTITION_VERIFIES, Err(e.to_string()));
            return failed;
        }
    };
    let violations = verify_partition(&partition);
    check(
        PARTITION_VERIFIES,
        expect(violations.is_empty(), &format!("{:?}", violations.first().map(ToString::to_string))),
    );
    check(
        PARTITION_DETERMINISTIC,
        expect(
            partition_model(&canonical).ok().as_ref() == Some(&partition),
            "partition differs between equal models",
        ),
    );
    check(UNIT_COUNT, unit_count(model, &partition.units));

    check(DSL_ROUND_TRIP, dsl_round_trip(model));
    check(
        JSON_ROUND_TRIP,
        match model_from_json(&model_to_json(model)) {
            Ok(back) => expect(models_equal(&back, model), "decoded model differs"),
            Err(e) => Err(e.to_string()),
        },
    );

    let (schema, mapping) = match forward_transform(&partition) {
        Ok(out) => out,
        Err(e) => {
            check(FORWARD_REVERSE, Err(e.to_string()));
            return failed;
        }
    };
    check(
        FORWARD_REVERSE,
        match (stages.reverse)(&schema) {
            Ok(back) => expect(models_equal(&back, model), "reversed model differs"),
            Err(e) => Err(e.to_string()),
        },
    );
    let report = check_bijection(&partition, &schema, &mapping);
    check(BIJECTION, expect(report.passed(), &report.to_string()));
    check(SCHEMA_LAWS, schema_laws(model, &schema));
    check(
        SCHEMA_JSON_ROUND_TRIP,
        match schema_from_json(&schema_to_json(&schema, &mapping)) {
            Ok((s, m)) => expect(s == schema && m == mapping, "decoded schema differs"),
            Err(e) => Err(e.to_string()),
        },
    );
    check(DDL_STABLE, expect(emit_ddl(&schema) == emit_ddl(&schema), "DDL output not stable"));
    failed
}

fn expect(ok: bool, detail: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail.to_owned())
    }
}

fn classification_laws(model: &ERModel) -> Result<(), String> {
    for r in &model.relationships {
        for pair in [r.left_constraint, r.right_constraint] {
            let partial = classify_participation(pair) == Participation::Partial;
            if partial != (pair.min == 0) {
                return Err(format!("{}: participation of {pair} wrong", r.name));
            }
        }
        let forward = classify_cardinality(r.left_constraint, r.right_constraint);
        let backward = classify_cardinality(r.right_constraint, r.left_constraint);
        if backward != forward.swapped() {
            return Err(format!("{}: swap symmetry broken ({forward:?} vs {backward:?})", r.name));
        }
    }
    Ok(())
}

fn unit_count(model: &ERModel, units: &[ERConstructUnit]) -> Result<(), String> {
    let e = model.entities.len();
    let r = model.relationships.len();
    let e2 = model.entities.iter().filter(|e| !e.secondary_attrs.is_empty()).count();
    let r2 = model.relationships.iter().filter(|r| !r.attrs.is_empty()).count();
    let empty = units.iter().any(|u| match u {
        ERConstructUnit::SecondarySimpleAttrs { attrs, .. }
        | ERConstructUnit::OptionalRelationshipAttrs { attrs, .. } => attrs.is_empty(),
        _ => false,
    });
    let base_claims_three =
        units.iter().filter(|u| u.kind() == UnitKind::RegularEntityBase).all(|u| u.constructs().len() == 3);
    if units.len() != e + r + e2 + r2 {
        Err(format!("{} units, expected {e}+{r}+{e2}+{r2}", units.len()))
    } else if empty {
        Err("empty attribute unit emitted".into())
    } else if !base_claims_three {
        Err("entity base unit does not claim exactly three constructs".into())
    } else {
        Ok(())
    }
}

fn dsl_round_trip(model: &ERModel) -> Result<(), String> {
    let text = print_model(model);
    if print_model(model) != text {
        return Err("printer output not stable".into());
    }
    match parse_model(&text) {
        Ok(back) => expect(models_equal(&back, model), "reparsed model differs"),
        Err(e) => Err(format!("printed model does not parse: {e}")),
    }
}

fn schema_laws(model: &ERModel, schema: &RelationalSchema) -> Result<(), String> {
    for unit in &schema.units {
        if let RdsUnit::RelationshipRelation {
            relation,
            left_annotation,
            right_annotation,
            unique_left_fk,
            unique_right_fk,
            ..
        } = unit
        {
            if *unique_left_fk != (left_annotation.max == MaxBound::Finite(1))
                || *unique_right_fk != (right_annotation.max == MaxBound::Finite(1))
            {
                return Err(format!("{relation}: uniqueness flags disagree with annotations"));
            }
            let source = model.relationship(relation.as_str()).ok_or(format!("{relation}: no source"))?;
            if (*left_annotation, *right_annotation) != (source.left_constraint, source.right_constraint) {
                return Err(format!("{relation}: annotations differ from the source constraints"));
            }
        }
    }
    let rel_units = schema.units.iter().filter(|u| u.kind() == RdsUnitKind::RelationshipRelation).count();
    expect(
        rel_units == model.relationships.len(),
        "relationship mapped to something other than a relationship relation",
    )
}
