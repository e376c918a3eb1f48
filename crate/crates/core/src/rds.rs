//! Relational schema side: relation-schema-units, the forward and reverse
//! transformations, the unit-mapping bijection check, and the schema's JSON
//! and DDL renderings.
//!
//! Each ER-construct-unit becomes exactly one relation-schema-unit:
//!
//! | ER unit   | relation-schema-unit                                            |
//! |-----------|-----------------------------------------------------------------|
//! | `b(e)`    | `BaseRelation e` with NOT NULL key and mandatory columns         |
//! | `c(e)`    | `SecondaryColumns` on `e`, nullable, declaration order          |
//! | `b(r)`    | `RelationshipRelation r` with `fk_<left>`, `fk_<right>`, annotations |
//! | `p(r)`    | `RelationshipAttrColumns` on `r`, nullable, declaration order   |
//!
//! Every relationship gets its own relation whatever its cardinality ratio, so
//! the shape of the `b(r)` image never depends on the min-max values. Maxima
//! other than 1 cannot be expressed by constraints and travel as annotations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_model, ERModel, EntityType, Ident, MinMaxPair, RelationshipType, Violation};
use crate::notation::{to_canonical_json, JsonError};
use crate::partition::{unit_label, verify_partition, ERConstructUnit, Partition, PartitionViolation};

/// Prefix of the foreign-key columns of a relationship relation.
pub const FK_PREFIX: &str = "fk_";

pub fn fk_column_name(entity: &Ident) -> Ident {
    Ident::new(format!("{FK_PREFIX}{entity}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: Ident,
    pub not_null: bool,
}

impl Column {
    pub fn not_null(name: impl Into<Ident>) -> Self {
        Column { name: name.into(), not_null: true }
    }

    pub fn nullable(name: impl Into<Ident>) -> Self {
        Column { name: name.into(), not_null: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RdsUnit {
    BaseRelation {
        relation: Ident,
        pk_column: Column,
        mandatory_column: Column,
    },
    SecondaryColumns {
        relation: Ident,
        columns: Vec<Column>,
    },
    RelationshipRelation {
        relation: Ident,
        left_fk: Column,
        right_fk: Column,
        left_target: Ident,
        right_target: Ident,
        left_annotation: MinMaxPair,
        right_annotation: MinMaxPair,
        unique_left_fk: bool,
        unique_right_fk: bool,
    },
    RelationshipAttrColumns {
        relation: Ident,
        columns: Vec<Column>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RdsUnitKind {
    BaseRelation,
    SecondaryColumns,
    RelationshipRelation,
    RelationshipAttrColumns,
}

impl RdsUnitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RdsUnitKind::BaseRelation => "base_relation",
            RdsUnitKind::SecondaryColumns => "secondary_columns",
            RdsUnitKind::RelationshipRelation => "relationship_relation",
            RdsUnitKind::RelationshipAttrColumns => "relationship_attr_columns",
        }
    }
}

/// Identity of a relation-schema-unit: its kind and the relation it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdsUnitId {
    pub kind: RdsUnitKind,
    pub relation: Ident,
}

impl fmt::Display for RdsUnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.relation)
    }
}

impl RdsUnit {
    pub fn kind(&self) -> RdsUnitKind {
        match self {
            RdsUnit::BaseRelation { .. } => RdsUnitKind::BaseRelation,
            RdsUnit::SecondaryColumns { .. } => RdsUnitKind::SecondaryColumns,
            RdsUnit::RelationshipRelation { .. } => RdsUnitKind::RelationshipRelation,
            RdsUnit::RelationshipAttrColumns { .. } => RdsUnitKind::RelationshipAttrColumns,
        }
    }

    pub fn relation(&self) -> &Ident {
        match self {
            RdsUnit::BaseRelation { relation, .. }
            | RdsUnit::SecondaryColumns { relation, .. }
            | RdsUnit::RelationshipRelation { relation, .. }
            | RdsUnit::RelationshipAttrColumns { relation, .. } => relation,
        }
    }

    pub fn id(&self) -> RdsUnitId {
        RdsUnitId { kind: self.kind(), relation: self.relation().clone() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationalSchema {
    pub units: Vec<RdsUnit>,
}

impl RelationalSchema {
    fn base_relation(&self, name: &Ident) -> Option<(&Column, &Column)> {
        self.units.iter().find_map(|u| match u {
            RdsUnit::BaseRelation { relation, pk_column, mandatory_column } if relation == name => {
                Some((pk_column, mandatory_column))
            }
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingPair {
    /// Label of the ER-construct-unit, e.g. `b(Vehicle)`.
    pub source: String,
    pub target: RdsUnitId,
}

/// Which relation-schema-unit each ER-construct-unit was mapped to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitMapping {
    pub pairs: Vec<MappingPair>,
}

impl UnitMapping {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn target_of(&self, source: &str) -> Option<&RdsUnitId> {
        self.pairs.iter().find(|p| p.source == source).map(|p| &p.target)
    }
}

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error("partition does not verify ({} violation(s))", .0.len())]
    InvalidPartition(Vec<PartitionViolation>),
    #[error("`{relationship}` has attribute `{attr}`, which clashes with its foreign-key column")]
    ReservedName { relationship: Ident, attr: Ident },
    #[error("`{0}` names both an entity type and a relationship type")]
    RelationNameCollision(Ident),
}

/// Maps every unit of a verified partition to its relation-schema-unit.
pub fn forward_transform(partition: &Partition) -> Result<(RelationalSchema, UnitMapping), ForwardError> {
    let violations = verify_partition(partition);
    if !violations.is_empty() {
        return Err(ForwardError::InvalidPartition(violations));
    }

    let entity_names: HashSet<&Ident> = partition
        .units
        .iter()
        .filter_map(|u| match u {
            ERConstructUnit::RegularEntityBase { entity, .. } => Some(entity),
            _ => None,
        })
        .collect();

    let mut schema = RelationalSchema::default();
    let mut mapping = UnitMapping::default();
    for unit in &partition.units {
        let rds = match unit {
            ERConstructUnit::RegularEntityBase { entity, key, mandatory } => RdsUnit::BaseRelation {
                relation: entity.clone(),
                pk_column: Column::not_null(key.clone()),
                mandatory_column: Column::not_null(mandatory.clone()),
            },
            ERConstructUnit::SecondarySimpleAttrs { entity, attrs } => RdsUnit::SecondaryColumns {
                relation: entity.clone(),
                columns: attrs.iter().cloned().map(Column::nullable).collect(),
            },
            ERConstructUnit::BinaryRelationshipBase {
                relationship,
                left,
                right,
                left_constraint,
                right_constraint,
            } => {
                if entity_names.contains(relationship) {
                    return Err(ForwardError::RelationNameCollision(relationship.clone()));
                }
                RdsUnit::RelationshipRelation {
                    relation: relationship.clone(),
                    left_fk: Column::not_null(fk_column_name(left)),
                    right_fk: Column::not_null(fk_column_name(right)),
                    left_target: left.clone(),
                    right_target: right.clone(),
                    left_annotation: *left_constraint,
                    right_annotation: *right_constraint,
                    unique_left_fk: left_constraint.max.is_one(),
                    unique_right_fk: right_constraint.max.is_one(),
                }
            }
            ERConstructUnit::OptionalRelationshipAttrs { relationship, left, right, attrs } => {
                let reserved = [fk_column_name(left), fk_column_name(right)];
                if let Some(attr) = attrs.iter().find(|a| reserved.contains(a)) {
                    return Err(ForwardError::ReservedName {
                        relationship: relationship.clone(),
                        attr: attr.clone(),
                    });
                }
                RdsUnit::RelationshipAttrColumns {
                    relation: relationship.clone(),
                    columns: attrs.iter().cloned().map(Column::nullable).collect(),
                }
            }
        };
        mapping.pairs.push(MappingPair { source: unit_label(unit), target: rds.id() });
        schema.units.push(rds);
    }
    Ok((schema, mapping))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemaViolationCode {
    NoBaseRelation,
    DuplicateRelation,
    DuplicateUnit,
    DanglingUnit,
    UnknownTarget,
    SelfReference,
    UniquenessFlagMismatch,
    NullableKeyColumn,
    EmptyColumns,
    DuplicateColumn,
    InvalidAnnotation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    pub code: SchemaViolationCode,
    pub relation: String,
    pub message: String,
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [{}]: {}", self.code, self.relation, self.message)
    }
}

/// Checks the structural invariants of a relational schema.
pub fn validate_schema(schema: &RelationalSchema) -> Vec<SchemaViolation> {
    use SchemaViolationCode as C;
    let mut out = Vec::new();
    let mut push = |code, relation: &Ident, message: String| {
        out.push(SchemaViolation { code, relation: relation.to_string(), message })
    };

    let mut relations: HashMap<&Ident, RdsUnitKind> = HashMap::new();
    for unit in &schema.units {
        if matches!(unit, RdsUnit::BaseRelation { .. } | RdsUnit::RelationshipRelation { .. })
            && relations.insert(unit.relation(), unit.kind()).is_some()
        {
            push(C::DuplicateRelation, unit.relation(), "relation defined more than once".into());
        }
    }
    if !relations.values().any(|k| *k == RdsUnitKind::BaseRelation) {
        push(C::NoBaseRelation, &Ident::new(""), "schema has no base relation".into());
    }

    let mut seen_ids = HashSet::new();
    for unit in &schema.units {
        let rel = unit.relation();
        if !seen_ids.insert(unit.id())
            && !matches!(unit.kind(), RdsUnitKind::BaseRelation | RdsUnitKind::RelationshipRelation)
        {
            push(C::DuplicateUnit, rel, format!("more than one {} unit", unit.kind().as_str()));
        }
        match unit {
            RdsUnit::BaseRelation { pk_column, mandatory_column, .. } => {
                if !pk_column.not_null || !mandatory_column.not_null {
                    push(C::NullableKeyColumn, rel, "key and mandatory columns must be NOT NULL".into());
                }
            }
            RdsUnit::SecondaryColumns { columns, .. } | RdsUnit::RelationshipAttrColumns { columns, .. } => {
                let owner_kind = match unit.kind() {
                    RdsUnitKind::SecondaryColumns => RdsUnitKind::BaseRelation,
                    _ => RdsUnitKind::RelationshipRelation,
                };
                if relations.get(rel) != Some(&owner_kind) {
                    push(
                        C::DanglingUnit,
                        rel,
                        format!(
                            "{} unit refers to no {} named `{rel}`",
                            unit.kind().as_str(),
                            owner_kind.as_str()
                        ),
                    );
                }
                if columns.is_empty() {
                    push(C::EmptyColumns, rel, format!("{} unit has no columns", unit.kind().as_str()));
                }
            }
            RdsUnit::RelationshipRelation {
                left_fk,
                right_fk,
                left_target,
                right_target,
                left_annotation,
                right_annotation,
                unique_left_fk,
                unique_right_fk,
                ..
            } => {
                for target in [left_target, right_target] {
                    if relations.get(target) != Some(&RdsUnitKind::BaseRelation) {
                        push(
                            C::UnknownTarget,
                            rel,
                            format!("foreign key targets unknown relation `{target}`"),
                        );
                    }
                }
                if left_target == right_target {
                    push(C::SelfReference, rel, format!("both foreign keys target `{left_target}`"));
                }
                if left_fk.name == right_fk.name {
                    push(C::DuplicateColumn, rel, format!("column `{}` appears twice", left_fk.name));
                }
                for (side, ann, unique) in
                    [("left", left_annotation, unique_left_fk), ("right", right_annotation, unique_right_fk)]
                {
                    if !ann.is_valid() {
                        push(
                            C::InvalidAnnotation,
                            rel,
                            format!("{side} annotation {ann} is not a valid min-max pair"),
                        );
                    }
                    if ann.max.is_one() != *unique {
                        push(
                            C::UniquenessFlagMismatch,
                            rel,
                            format!("{side} uniqueness flag disagrees with annotation {ann}"),
                        );
                    }
                }
            }
        }
    }

    // Attribute columns must not shadow the foreign-key columns.
    for unit in &schema.units {
        if let RdsUnit::RelationshipAttrColumns { relation, columns } = unit {
            let fks = schema.units.iter().find_map(|u| match u {
                RdsUnit::RelationshipRelation { relation: r, left_fk, right_fk, .. } if r == relation => {
                    Some([&left_fk.name, &right_fk.name])
                }
                _ => None,
            });
            if let Some(fks) = fks {
                for c in columns.iter().filter(|c| fks.contains(&&c.name)) {
                    push(
                        C::DuplicateColumn,
                        relation,
                        format!("column `{}` clashes with a foreign key", c.name),
                    );
                }
            }
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum ReverseError {
    #[error("malformed schema: {}", join_display(.0))]
    MalformedSchema(Vec<SchemaViolation>),
    #[error("schema does not describe a valid ER model: {}", join_display(.0))]
    InvalidModel(Vec<Violation>),
}

fn join_display<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Rebuilds the ER model by inverting each forward rule. Min-max values come
/// from the annotations; endpoints come from the foreign-key targets.
pub fn reverse_transform(schema: &RelationalSchema) -> Result<ERModel, ReverseError> {
    let violations = validate_schema(schema);
    if !violations.is_empty() {
        return Err(ReverseError::MalformedSchema(violations));
    }

    let mut entities: Vec<EntityType> = Vec::new();
    let mut relationships: Vec<RelationshipType> = Vec::new();
    let mut secondary: HashMap<&Ident, &[Column]> = HashMap::new();
    let mut rel_attrs: HashMap<&Ident, &[Column]> = HashMap::new();

    for unit in &schema.units {
        match unit {
            RdsUnit::BaseRelation { relation, pk_column, mandatory_column } => {
                entities.push(EntityType {
                    name: relation.clone(),
                    key_attr: pk_column.name.clone(),
                    mandatory_attr: mandatory_column.name.clone(),
                    secondary_attrs: Vec::new(),
                });
            }
            RdsUnit::SecondaryColumns { relation, columns } => {
                secondary.insert(relation, columns);
            }
            RdsUnit::RelationshipRelation {
                relation,
                left_target,
                right_target,
                left_annotation,
                right_annotation,
                ..
            } => {
                relationships.push(RelationshipType {
                    name: relation.clone(),
                    left_entity: left_target.clone(),
                    right_entity: right_target.clone(),
                    left_constraint: *left_annotation,
                    right_constraint: *right_annotation,
                    attrs: Vec::new(),
                });
            }
            RdsUnit::RelationshipAttrColumns { relation, columns } => {
                rel_attrs.insert(relation, columns);
            }
        }
    }

    let names = |cols: &[Column]| cols.iter().map(|c| c.name.clone()).collect::<Vec<_>>();
    for e in &mut entities {
        if let Some(cols) = secondary.get(&e.name) {
            e.secondary_attrs = names(cols);
        }
    }
    for r in &mut relationships {
        if let Some(cols) = rel_attrs.get(&r.name) {
            r.attrs = names(cols);
        }
    }

    let model = ERModel { entities, relationships };
    let violations = validate_model(&model);
    if !violations.is_empty() {
        return Err(ReverseError::InvalidModel(violations));
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseResult {
    pub holds: bool,
    pub counterexamples: Vec<String>,
}

impl ClauseResult {
    fn from_counterexamples(counterexamples: Vec<String>) -> Self {
        ClauseResult { holds: counterexamples.is_empty(), counterexamples }
    }
}

/// Outcome of checking that a unit mapping is one-to-one and onto.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionReport {
    /// Every ER-construct-unit is mapped exactly once.
    pub totality: ClauseResult,
    /// No relation-schema-unit is the image of two ER-construct-units.
    pub injectivity: ClauseResult,
    /// Every relation-schema-unit is the image of some ER-construct-unit.
    pub surjectivity: ClauseResult,
    /// Both sides have the same number of units.
    pub cardinality: ClauseResult,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.clauses().iter().all(|(_, c)| c.holds)
    }

    pub fn clauses(&self) -> [(&'static str, &ClauseResult); 4] {
        [
            ("totality", &self.totality),
            ("injectivity", &self.injectivity),
            ("surjectivity", &self.surjectivity),
            ("cardinality", &self.cardinality),
        ]
    }
}

impl fmt::Display for BijectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, clause) in self.clauses() {
            writeln!(f, "{name}: {}", if clause.holds { "pass" } else { "FAIL" })?;
            for c in &clause.counterexamples {
                writeln!(f, "  {c}")?;
            }
        }
        Ok(())
    }
}

pub fn check_bijection(
    partition: &Partition,
    schema: &RelationalSchema,
    mapping: &UnitMapping,
) -> BijectionReport {
    let labels: Vec<String> = partition.units.iter().map(unit_label).collect();
    let label_set: HashSet<&str> = labels.iter().map(String::as_str).collect();
    let schema_ids: Vec<RdsUnitId> = schema.units.iter().map(RdsUnit::id).collect();
    let id_set: HashSet<&RdsUnitId> = schema_ids.iter().collect();

    let mut source_counts: HashMap<&str, usize> = HashMap::new();
    let mut preimages: BTreeMap<&RdsUnitId, Vec<&str>> = BTreeMap::new();
    for pair in &mapping.pairs {
        *source_counts.entry(pair.source.as_str()).or_default() += 1;
        preimages.entry(&pair.target).or_default().push(pair.source.as_str());
    }

    let mut totality = Vec::new();
    for label in &labels {
        match source_counts.get(label.as_str()).copied().unwrap_or(0) {
            0 => totality.push(format!("unit {label} is not mapped")),
            1 => {}
            n => totality.push(format!("unit {label} is mapped {n} times")),
        }
    }
    for pair in &mapping.pairs {
        if !label_set.contains(pair.source.as_str()) {
            totality.push(format!("mapping source {} is not a unit of the partition", pair.source));
        }
    }

    let injectivity = preimages
        .iter()
        .filter(|(_, sources)| sources.len() > 1)
        .map(|(target, sources)| format!("{target} is the image of {}", sources.join(", ")))
        .collect();

    let mut surjectivity: Vec<String> = schema_ids
        .iter()
        .filter(|id| !preimages.contains_key(id))
        .map(|id| format!("{id} is not the image of any unit"))
        .collect();
    for target in preimages.keys() {
        if !id_set.contains(target) {
            surjectivity.push(format!("mapping target {target} is not a unit of the schema"));
        }
    }

    let cardinality = if labels.len() == schema.units.len() {
        Vec::new()
    } else {
        vec![format!("{} ER-construct-units but {} relation-schema-units", labels.len(), schema.units.len())]
    };

    BijectionReport {
        totality: ClauseResult::from_counterexamples(totality),
        injectivity: ClauseResult::from_counterexamples(injectivity),
        surjectivity: ClauseResult::from_counterexamples(surjectivity),
        cardinality: ClauseResult::from_counterexamples(cardinality),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    units: Vec<RdsUnit>,
    mapping: UnitMapping,
}

#[derive(Debug, Error)]
pub enum SchemaJsonError {
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("malformed schema: {}", join_display(.0))]
    Malformed(Vec<SchemaViolation>),
}

/// `{"units":[...],"mapping":[{"source":"b(Vehicle)","target":{...}}, ...]}`
pub fn schema_to_json(schema: &RelationalSchema, mapping: &UnitMapping) -> String {
    to_canonical_json(&SchemaDoc { units: schema.units.clone(), mapping: mapping.clone() })
}

pub fn schema_from_json(text: &str) -> Result<(RelationalSchema, UnitMapping), SchemaJsonError> {
    let doc: SchemaDoc = serde_json::from_str(text).map_err(JsonError::from)?;
    let schema = RelationalSchema { units: doc.units };
    let violations = validate_schema(&schema);
    if !violations.is_empty() {
        return Err(SchemaJsonError::Malformed(violations));
    }
    Ok((schema, doc.mapping))
}

/// Portable `CREATE TABLE` statements. Base relations come first, then
/// relationship relations, each group sorted by name. Every relationship
/// statement is followed by one `-- @minmax` line per side.
pub fn emit_ddl(schema: &RelationalSchema) -> String {
    let mut bases: Vec<(&Ident, &Column, &Column)> = Vec::new();
    let mut rels = Vec::new();
    let mut extra: HashMap<(RdsUnitKind, &Ident), &[Column]> = HashMap::new();
    for unit in &schema.units {
        match unit {
            RdsUnit::BaseRelation { relation, pk_column, mandatory_column } => {
                bases.push((relation, pk_column, mandatory_column))
            }
            RdsUnit::RelationshipRelation { .. } => rels.push(unit),
            RdsUnit::SecondaryColumns { relation, columns } => {
                extra.insert((RdsUnitKind::BaseRelation, relation), columns);
            }
            RdsUnit::RelationshipAttrColumns { relation, columns } => {
                extra.insert((RdsUnitKind::RelationshipRelation, relation), columns);
            }
        }
    }
    bases.sort_by(|a, b| a.0.cmp(b.0));
    rels.sort_by(|a, b| a.relation().cmp(b.relation()));

    let column = |c: &Column| {
        if c.not_null {
            format!("{} TEXT NOT NULL", c.name)
        } else {
            format!("{} TEXT", c.name)
        }
    };

    let mut statements = Vec::new();
    for (relation, pk, mandatory) in bases {
        let mut lines = vec![format!("{} PRIMARY KEY", column(pk)), column(mandatory)];
        if let Some(cols) = extra.get(&(RdsUnitKind::BaseRelation, relation)) {
            lines.extend(cols.iter().map(column));
        }
        statements.push(create_table(relation, &lines));
    }
    for unit in rels {
        let RdsUnit::RelationshipRelation {
            relation,
            left_fk,
            right_fk,
            left_target,
            right_target,
            left_annotation,
            right_annotation,
            unique_left_fk,
            unique_right_fk,
        } = unit
        else {
            continue;
        };
        let reference = |fk: &Column, target: &Ident| match schema.base_relation(target) {
            Some((pk, _)) => format!("{} REFERENCES {target} ({})", column(fk), pk.name),
            None => format!("{} REFERENCES {target}", column(fk)),
        };
        let mut lines = vec![reference(left_fk, left_target), reference(right_fk, right_target)];
        if let Some(cols) = extra.get(&(RdsUnitKind::RelationshipRelation, relation)) {
            lines.extend(cols.iter().map(column));
        }
        lines.push(format!("PRIMARY KEY ({}, {})", left_fk.name, right_fk.name));
        if *unique_left_fk {
            lines.push(format!("UNIQUE ({})", left_fk.name));
        }
        if *unique_right_fk {
            lines.push(format!("UNIQUE ({})", right_fk.name));
        }
        let mut stmt = create_table(relation, &lines);
        for (side, ann) in [("left", left_annotation), ("right", right_annotation)] {
            let _ = writeln!(stmt, "-- @minmax side={side} min={} max={}", ann.min, ann.max);
        }
        statements.push(stmt);
    }
    statements.join("\n")
}

fn create_table(relation: &Ident, lines: &[String]) -> String {
    let mut out = format!("CREATE TABLE {relation} (\n");
    for (i, line) in lines.iter().enumerate() {
        let sep = if i + 1 == lines.len() { "" } else { "," };
        let _ = writeln!(out, "    {line}{sep}");
    }
    out.push_str(");\n");
    out
}
