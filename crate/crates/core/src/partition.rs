//! Splitting a model into ER-construct-units.
//!
//! Four unit kinds exist:
//!
//! | kind                        | label            | claims                                   |
//! |-----------------------------|------------------|------------------------------------------|
//! | regular entity base         | `b(E)`           | entity, key attribute, mandatory attribute |
//! | secondary simple attributes | `c(E)`           | every secondary attribute of `E`          |
//! | binary relationship base    | `b(R(L,Rt))`     | relationship, both min-max pairs          |
//! | optional relationship attrs | `p(R(L,Rt))`     | every attribute of `R`                    |
//!
//! `c` and `p` units are only emitted when they would be non-empty.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{canonicalize, validate_model, AttributeName, ERModel, Ident, MinMaxPair, Violation};
use crate::notation::to_canonical_json;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ERConstructUnit {
    RegularEntityBase {
        entity: Ident,
        key: AttributeName,
        mandatory: AttributeName,
    },
    SecondarySimpleAttrs {
        entity: Ident,
        attrs: Vec<AttributeName>,
    },
    BinaryRelationshipBase {
        relationship: Ident,
        left: Ident,
        right: Ident,
        left_constraint: MinMaxPair,
        right_constraint: MinMaxPair,
    },
    /// `left` and `right` name the relationship's endpoints for labelling only;
    /// they are claimed by the matching base unit.
    OptionalRelationshipAttrs {
        relationship: Ident,
        left: Ident,
        right: Ident,
        attrs: Vec<AttributeName>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitKind {
    RegularEntityBase,
    SecondarySimpleAttrs,
    BinaryRelationshipBase,
    OptionalRelationshipAttrs,
}

impl UnitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            UnitKind::RegularEntityBase => "regular_entity_base",
            UnitKind::SecondarySimpleAttrs => "secondary_simple_attrs",
            UnitKind::BinaryRelationshipBase => "binary_relationship_base",
            UnitKind::OptionalRelationshipAttrs => "optional_relationship_attrs",
        }
    }
}

impl ERConstructUnit {
    pub fn kind(&self) -> UnitKind {
        match self {
            ERConstructUnit::RegularEntityBase { .. } => UnitKind::RegularEntityBase,
            ERConstructUnit::SecondarySimpleAttrs { .. } => UnitKind::SecondarySimpleAttrs,
            ERConstructUnit::BinaryRelationshipBase { .. } => UnitKind::BinaryRelationshipBase,
            ERConstructUnit::OptionalRelationshipAttrs { .. } => UnitKind::OptionalRelationshipAttrs,
        }
    }

    /// Name of the entity or relationship the unit belongs to.
    pub fn owner(&self) -> &Ident {
        match self {
            ERConstructUnit::RegularEntityBase { entity, .. }
            | ERConstructUnit::SecondarySimpleAttrs { entity, .. } => entity,
            ERConstructUnit::BinaryRelationshipBase { relationship, .. }
            | ERConstructUnit::OptionalRelationshipAttrs { relationship, .. } => relationship,
        }
    }

    pub fn label(&self) -> String {
        unit_label(self)
    }

    /// The model constructs this unit takes ownership of.
    pub fn constructs(&self) -> Vec<Construct> {
        match self {
            ERConstructUnit::RegularEntityBase { entity, key, mandatory } => vec![
                Construct::Entity(entity.clone()),
                Construct::Attribute { owner: entity.clone(), name: key.clone(), role: AttrRole::Key },
                Construct::Attribute {
                    owner: entity.clone(),
                    name: mandatory.clone(),
                    role: AttrRole::Mandatory,
                },
            ],
            ERConstructUnit::SecondarySimpleAttrs { entity, attrs } => attrs
                .iter()
                .enumerate()
                .map(|(i, a)| Construct::Attribute {
                    owner: entity.clone(),
                    name: a.clone(),
                    role: AttrRole::Secondary(i),
                })
                .collect(),
            ERConstructUnit::BinaryRelationshipBase {
                relationship,
                left,
                right,
                left_constraint,
                right_constraint,
            } => vec![
                Construct::Relationship {
                    name: relationship.clone(),
                    left: left.clone(),
                    right: right.clone(),
                },
                Construct::MinMax {
                    relationship: relationship.clone(),
                    side: Side::Left,
                    pair: *left_constraint,
                },
                Construct::MinMax {
                    relationship: relationship.clone(),
                    side: Side::Right,
                    pair: *right_constraint,
                },
            ],
            ERConstructUnit::OptionalRelationshipAttrs { relationship, attrs, .. } => attrs
                .iter()
                .enumerate()
                .map(|(i, a)| Construct::Attribute {
                    owner: relationship.clone(),
                    name: a.clone(),
                    role: AttrRole::Relationship(i),
                })
                .collect(),
        }
    }
}

impl fmt::Display for ERConstructUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&unit_label(self))
    }
}

/// `b(Vehicle)`, `c(Vehicle)`, `b(AssignedTo(Vehicle,Project))`,
/// `p(AssignedTo(Vehicle,Project))`.
pub fn unit_label(unit: &ERConstructUnit) -> String {
    match unit {
        ERConstructUnit::RegularEntityBase { entity, .. } => format!("b({entity})"),
        ERConstructUnit::SecondarySimpleAttrs { entity, .. } => format!("c({entity})"),
        ERConstructUnit::BinaryRelationshipBase { relationship, left, right, .. } => {
            format!("b({relationship}({left},{right}))")
        }
        ERConstructUnit::OptionalRelationshipAttrs { relationship, left, right, .. } => {
            format!("p({relationship}({left},{right}))")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Where an attribute sits in its owner. Positions are part of the identity
/// because order carries meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrRole {
    Key,
    Mandatory,
    Secondary(usize),
    Relationship(usize),
}

/// One atomic piece of an ER model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construct {
    Entity(Ident),
    Attribute { owner: Ident, name: AttributeName, role: AttrRole },
    Relationship { name: Ident, left: Ident, right: Ident },
    MinMax { relationship: Ident, side: Side, pair: MinMaxPair },
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construct::Entity(name) => write!(f, "entity {name}"),
            Construct::Attribute { owner, name, role } => {
                let role = match role {
                    AttrRole::Key => "key attribute".to_owned(),
                    AttrRole::Mandatory => "mandatory attribute".to_owned(),
                    AttrRole::Secondary(i) => format!("secondary attribute #{}", i + 1),
                    AttrRole::Relationship(i) => format!("relationship attribute #{}", i + 1),
                };
                write!(f, "{role} {owner}.{name}")
            }
            Construct::Relationship { name, left, right } => {
                write!(f, "relationship {name}({left},{right})")
            }
            Construct::MinMax { relationship, side, pair } => {
                let side = if *side == Side::Left { "left" } else { "right" };
                write!(f, "{side} min-max {pair} of {relationship}")
            }
        }
    }
}

/// Every construct of `model`, each listed once.
pub fn model_constructs(model: &ERModel) -> Vec<Construct> {
    let mut out = Vec::new();
    for e in &model.entities {
        out.push(Construct::Entity(e.name.clone()));
        out.push(Construct::Attribute {
            owner: e.name.clone(),
            name: e.key_attr.clone(),
            role: AttrRole::Key,
        });
        out.push(Construct::Attribute {
            owner: e.name.clone(),
            name: e.mandatory_attr.clone(),
            role: AttrRole::Mandatory,
        });
        for (i, a) in e.secondary_attrs.iter().enumerate() {
            out.push(Construct::Attribute {
                owner: e.name.clone(),
                name: a.clone(),
                role: AttrRole::Secondary(i),
            });
        }
    }
    for r in &model.relationships {
        out.push(Construct::Relationship {
            name: r.name.clone(),
            left: r.left_entity.clone(),
            right: r.right_entity.clone(),
        });
        out.push(Construct::MinMax {
            relationship: r.name.clone(),
            side: Side::Left,
            pair: r.left_constraint,
        });
        out.push(Construct::MinMax {
            relationship: r.name.clone(),
            side: Side::Right,
            pair: r.right_constraint,
        });
        for (i, a) in r.attrs.iter().enumerate() {
            out.push(Construct::Attribute {
                owner: r.name.clone(),
                name: a.clone(),
                role: AttrRole::Relationship(i),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub units: Vec<ERConstructUnit>,
    /// Canonical form of the partitioned model.
    pub source_model: ERModel,
}

impl Partition {
    pub fn labels(&self) -> Vec<String> {
        self.units.iter().map(unit_label).collect()
    }
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("model is not valid ({} violation(s))", .0.len())]
    InvalidModel(Vec<Violation>),
}

/// Partitions a valid model. Units come out in canonical order: for each
/// entity by name `b` then `c`, then for each relationship by name `b` then `p`.
pub fn partition_model(model: &ERModel) -> Result<Partition, PartitionError> {
    let violations = validate_model(model);
    if !violations.is_empty() {
        return Err(PartitionError::InvalidModel(violations));
    }
    let model = canonicalize(model);
    let mut units = Vec::new();
    for e in &model.entities {
        units.push(ERConstructUnit::RegularEntityBase {
            entity: e.name.clone(),
            key: e.key_attr.clone(),
            mandatory: e.mandatory_attr.clone(),
        });
        if !e.secondary_attrs.is_empty() {
            units.push(ERConstructUnit::SecondarySimpleAttrs {
                entity: e.name.clone(),
                attrs: e.secondary_attrs.clone(),
            });
        }
    }
    for r in &model.relationships {
        units.push(ERConstructUnit::BinaryRelationshipBase {
            relationship: r.name.clone(),
            left: r.left_entity.clone(),
            right: r.right_entity.clone(),
            left_constraint: r.left_constraint,
            right_constraint: r.right_constraint,
        });
        if !r.attrs.is_empty() {
            units.push(ERConstructUnit::OptionalRelationshipAttrs {
                relationship: r.name.clone(),
                left: r.left_entity.clone(),
                right: r.right_entity.clone(),
                attrs: r.attrs.clone(),
            });
        }
    }
    Ok(Partition { units, source_model: model })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionViolationCode {
    /// A construct is claimed by more than one unit.
    OverlappingUnits,
    /// A construct of the model is claimed by no unit.
    UncoveredConstruct,
    /// A unit claims something the model does not contain.
    UnknownConstruct,
}

impl PartitionViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionViolationCode::OverlappingUnits => "OverlappingUnits",
            PartitionViolationCode::UncoveredConstruct => "UncoveredConstruct",
            PartitionViolationCode::UnknownConstruct => "UnknownConstruct",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionViolation {
    pub code: PartitionViolationCode,
    pub construct: Construct,
    /// Labels of the units claiming the construct.
    pub units: Vec<String>,
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.construct)?;
        if !self.units.is_empty() {
            write!(f, " (claimed by {})", self.units.join(", "))?;
        }
        Ok(())
    }
}

/// Checks that the units are pairwise disjoint and together cover the source
/// model, by comparing the model's construct multiset with the union of the
/// units' claims.
pub fn verify_partition(partition: &Partition) -> Vec<PartitionViolation> {
    let mut claims: HashMap<Construct, Vec<String>> = HashMap::new();
    for unit in &partition.units {
        let label = unit_label(unit);
        for c in unit.constructs() {
            claims.entry(c).or_default().push(label.clone());
        }
    }

    let mut model_counts: HashMap<Construct, usize> = HashMap::new();
    for c in model_constructs(&partition.source_model) {
        *model_counts.entry(c).or_default() += 1;
    }

    let mut out = Vec::new();
    for (construct, &expected) in &model_counts {
        match claims.get(construct) {
            None => out.push(PartitionViolation {
                code: PartitionViolationCode::UncoveredConstruct,
                construct: construct.clone(),
                units: Vec::new(),
            }),
            Some(labels) if labels.len() > expected => out.push(PartitionViolation {
                code: PartitionViolationCode::OverlappingUnits,
                construct: construct.clone(),
                units: labels.clone(),
            }),
            Some(labels) if labels.len() < expected => out.push(PartitionViolation {
                code: PartitionViolationCode::UncoveredConstruct,
                construct: construct.clone(),
                units: labels.clone(),
            }),
            Some(_) => {}
        }
    }
    for (construct, labels) in &claims {
        if !model_counts.contains_key(construct) {
            out.push(PartitionViolation {
                code: PartitionViolationCode::UnknownConstruct,
                construct: construct.clone(),
                units: labels.clone(),
            });
        }
    }
    out.sort_by(|a, b| (a.code, &a.construct).cmp(&(b.code, &b.construct)));
    out
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum UnitDoc<'a> {
    RegularEntityBase {
        label: String,
        entity: &'a Ident,
        key: &'a Ident,
        mandatory: &'a Ident,
    },
    SecondarySimpleAttrs {
        label: String,
        entity: &'a Ident,
        attrs: &'a [Ident],
    },
    BinaryRelationshipBase {
        label: String,
        relationship: &'a Ident,
        left: &'a Ident,
        right: &'a Ident,
        left_minmax: MinMaxPair,
        right_minmax: MinMaxPair,
    },
    OptionalRelationshipAttrs {
        label: String,
        relationship: &'a Ident,
        left: &'a Ident,
        right: &'a Ident,
        attrs: &'a [Ident],
    },
}

#[derive(Serialize)]
struct PartitionDoc<'a> {
    units: Vec<UnitDoc<'a>>,
}

/// `{"units":[{"kind":"regular_entity_base","label":"b(Employee)",...}, ...]}`
pub fn partition_to_json(partition: &Partition) -> String {
    let units = partition
        .units
        .iter()
        .map(|u| {
            let label = unit_label(u);
            match u {
                ERConstructUnit::RegularEntityBase { entity, key, mandatory } => {
                    UnitDoc::RegularEntityBase { label, entity, key, mandatory }
                }
                ERConstructUnit::SecondarySimpleAttrs { entity, attrs } => {
                    UnitDoc::SecondarySimpleAttrs { label, entity, attrs }
                }
                ERConstructUnit::BinaryRelationshipBase {
                    relationship,
                    left,
                    right,
                    left_constraint,
                    right_constraint,
                } => UnitDoc::BinaryRelationshipBase {
                    label,
                    relationship,
                    left,
                    right,
                    left_minmax: *left_constraint,
                    right_minmax: *right_constraint,
                },
                ERConstructUnit::OptionalRelationshipAttrs { relationship, left, right, attrs } => {
                    UnitDoc::OptionalRelationshipAttrs { label, relationship, left, right, attrs }
                }
            }
        })
        .collect();
    to_canonical_json(&PartitionDoc { units })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EntityType, RelationshipType};

    fn vehicle_project() -> ERModel {
        ERModel::new(
            vec![
                EntityType::new("Vehicle", "VehicleNo", "Make", ["Color"]),
                EntityType::new("Project", "ProjectNo", "Title", ["Budget"]),
            ],
            vec![RelationshipType::new(
                "AssignedTo",
                "Vehicle",
                MinMaxPair::finite(0, 3),
                "Project",
                MinMaxPair::finite(1, 1),
                ["AssignedDate", "Period"],
            )],
        )
    }

    #[test]
    fn generic_entity_gives_two_units() {
        let m = ERModel::new(vec![EntityType::new("e_i", "k", "s_1", ["s_2", "s_3", "s_4"])], vec![]);
        let p = partition_model(&m).unwrap();
        assert_eq!(p.labels(), vec!["b(e_i)", "c(e_i)"]);
    }

    #[test]
    fn six_units_in_canonical_order() {
        let p = partition_model(&vehicle_project()).unwrap();
        assert_eq!(
            p.labels(),
            vec![
                "b(Project)",
                "c(Project)",
                "b(Vehicle)",
                "c(Vehicle)",
                "b(AssignedTo(Vehicle,Project))",
                "p(AssignedTo(Vehicle,Project))"
            ]
        );
        assert!(verify_partition(&p).is_empty());
    }

    #[test]
    fn minimal_entity_gives_one_unit() {
        let m = ERModel::new(vec![EntityType::new("E", "k", "m", Vec::<&str>::new())], vec![]);
        let p = partition_model(&m).unwrap();
        assert_eq!(p.units.len(), 1);
        assert_eq!(p.units[0].kind(), UnitKind::RegularEntityBase);
        assert_eq!(p.units[0].constructs().len(), 3);
    }

    #[test]
    fn rejects_invalid_model() {
        assert!(matches!(
            partition_model(&ERModel::default()),
            Err(PartitionError::InvalidModel(v)) if v.len() == 1
        ));
    }

    #[test]
    fn labels() {
        let unit = ERConstructUnit::RegularEntityBase {
            entity: "Employee".into(),
            key: "Emp_No".into(),
            mandatory: "Name".into(),
        };
        assert_eq!(unit_label(&unit), "b(Employee)");
        let unit = ERConstructUnit::OptionalRelationshipAttrs {
            relationship: "AssignedTo".into(),
            left: "Vehicle".into(),
            right: "Project".into(),
            attrs: vec!["Period".into()],
        };
        assert_eq!(unit.to_string(), "p(AssignedTo(Vehicle,Project))");
    }

    #[test]
    fn duplicated_unit_overlaps() {
        let mut p = partition_model(&vehicle_project()).unwrap();
        let c = p.units[3].clone();
        assert_eq!(c.kind(), UnitKind::SecondarySimpleAttrs);
        p.units.push(c);
        let v = verify_partition(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, PartitionViolationCode::OverlappingUnits);
        assert_eq!(v[0].units, vec!["c(Vehicle)", "c(Vehicle)"]);
    }

    #[test]
    fn deleted_unit_uncovers() {
        let mut p = partition_model(&vehicle_project()).unwrap();
        p.units.retain(|u| u.kind() != UnitKind::OptionalRelationshipAttrs);
        let v = verify_partition(&p);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.code == PartitionViolationCode::UncoveredConstruct));
    }

    #[test]
    fn altered_unit_is_unknown_and_uncovered() {
        let mut p = partition_model(&vehicle_project()).unwrap();
        if let ERConstructUnit::BinaryRelationshipBase { left_constraint, .. } = &mut p.units[4] {
            *left_constraint = MinMaxPair::finite(0, 4);
        }
        let codes: Vec<_> = verify_partition(&p).into_iter().map(|v| v.code).collect();
        assert_eq!(
            codes,
            vec![PartitionViolationCode::UncoveredConstruct, PartitionViolationCode::UnknownConstruct]
        );
    }

    #[test]
    fn partition_json_shape() {
        let m = ERModel::new(vec![EntityType::new("Employee", "Emp_No", "Name", ["Address"])], vec![]);
        let json = partition_to_json(&partition_model(&m).unwrap());
        let flat: String = json.split_whitespace().collect();
        assert_eq!(
            flat,
            r#"{"units":[{"kind":"regular_entity_base","label":"b(Employee)","entity":"Employee","key":"Emp_No","mandatory":"Name"},{"kind":"secondary_simple_attrs","label":"c(Employee)","entity":"Employee","attrs":["Address"]}]}"#
        );
    }
}
