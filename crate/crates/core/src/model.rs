//! Domain model of a binary ER schema: regular entity types with a key and a
//! mandatory simple attribute, and binary relationship types carrying a
//! min-max structural constraint on each side.
//!
//! Everything here is a plain value. Construction never fails; well-formedness
//! is checked separately by [`validate_model`] so that callers can report every
//! problem in one pass.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An identifier: letters, digits and underscores, not starting with a digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(String);

/// Attribute symbols (key, mandatory, secondary, relationship attributes).
pub type AttributeName = Ident;

impl Ident {
    pub fn new(text: impl Into<String>) -> Self {
        Ident(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the text obeys the identifier lexical rule.
    pub fn is_well_formed(&self) -> bool {
        is_identifier(&self.0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident(s.to_owned())
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident(s)
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Upper end of a min-max pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaxBound {
    Finite(u32),
    /// Written `N`.
    Unbounded,
}

impl MaxBound {
    pub fn is_one(self) -> bool {
        self == MaxBound::Finite(1)
    }

    /// Unbounded counts as greater than one.
    pub fn exceeds_one(self) -> bool {
        match self {
            MaxBound::Finite(n) => n > 1,
            MaxBound::Unbounded => true,
        }
    }
}

impl fmt::Display for MaxBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxBound::Finite(n) => write!(f, "{n}"),
            MaxBound::Unbounded => f.write_str("N"),
        }
    }
}

/// A `(min, max)` structural constraint on one side of a binary relationship.
///
/// The pair sits next to the entity it constrains and reads across the
/// relationship: an entity on this side relates to at least `min` and at most
/// `max` entities on the other side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinMaxPair {
    pub min: u32,
    pub max: MaxBound,
}

impl MinMaxPair {
    pub fn new(min: u32, max: MaxBound) -> Self {
        MinMaxPair { min, max }
    }

    pub fn finite(min: u32, max: u32) -> Self {
        MinMaxPair { min, max: MaxBound::Finite(max) }
    }

    pub fn unbounded(min: u32) -> Self {
        MinMaxPair { min, max: MaxBound::Unbounded }
    }

    pub fn is_valid(&self) -> bool {
        match self.max {
            MaxBound::Finite(max) => max >= 1 && self.min <= max,
            MaxBound::Unbounded => true,
        }
    }
}

impl fmt::Display for MinMaxPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.min, self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityType {
    pub name: Ident,
    pub key_attr: AttributeName,
    /// The first simple attribute after the key.
    pub mandatory_attr: AttributeName,
    pub secondary_attrs: Vec<AttributeName>,
}

impl EntityType {
    pub fn new(
        name: impl Into<Ident>,
        key_attr: impl Into<Ident>,
        mandatory_attr: impl Into<Ident>,
        secondary_attrs: impl IntoIterator<Item = impl Into<Ident>>,
    ) -> Self {
        EntityType {
            name: name.into(),
            key_attr: key_attr.into(),
            mandatory_attr: mandatory_attr.into(),
            secondary_attrs: secondary_attrs.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationshipType {
    pub name: Ident,
    pub left_entity: Ident,
    pub right_entity: Ident,
    pub left_constraint: MinMaxPair,
    pub right_constraint: MinMaxPair,
    pub attrs: Vec<AttributeName>,
}

impl RelationshipType {
    pub fn new(
        name: impl Into<Ident>,
        left_entity: impl Into<Ident>,
        left_constraint: MinMaxPair,
        right_entity: impl Into<Ident>,
        right_constraint: MinMaxPair,
        attrs: impl IntoIterator<Item = impl Into<Ident>>,
    ) -> Self {
        RelationshipType {
            name: name.into(),
            left_entity: left_entity.into(),
            right_entity: right_entity.into(),
            left_constraint,
            right_constraint,
            attrs: attrs.into_iter().map(Into::into).collect(),
        }
    }

    pub fn cardinality(&self) -> CardinalityRatio {
        classify_cardinality(self.left_constraint, self.right_constraint)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ERModel {
    pub entities: Vec<EntityType>,
    pub relationships: Vec<RelationshipType>,
}

impl ERModel {
    pub fn new(entities: Vec<EntityType>, relationships: Vec<RelationshipType>) -> Self {
        ERModel { entities, relationships }
    }

    pub fn entity(&self, name: &str) -> Option<&EntityType> {
        self.entities.iter().find(|e| e.name.as_str() == name)
    }

    pub fn relationship(&self, name: &str) -> Option<&RelationshipType> {
        self.relationships.iter().find(|r| r.name.as_str() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Participation {
    /// min ≥ 1, also called mandatory.
    Total,
    /// min = 0, also called optional.
    Partial,
}

impl fmt::Display for Participation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Participation::Total => "total",
            Participation::Partial => "partial",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CardinalityRatio {
    OneToOne,
    OneToMany(Direction),
    ManyToMany,
}

impl CardinalityRatio {
    /// The ratio seen with the two sides exchanged.
    pub fn swapped(self) -> Self {
        match self {
            CardinalityRatio::OneToMany(Direction::LeftToRight) => {
                CardinalityRatio::OneToMany(Direction::RightToLeft)
            }
            CardinalityRatio::OneToMany(Direction::RightToLeft) => {
                CardinalityRatio::OneToMany(Direction::LeftToRight)
            }
            other => other,
        }
    }
}

pub fn classify_participation(pair: MinMaxPair) -> Participation {
    if pair.min == 0 {
        Participation::Partial
    } else {
        Participation::Total
    }
}

/// Cardinality ratio from the two maxima. A side whose max exceeds one is the
/// "one" end's partner: `(0,3),(1,1)` is one-to-many from left to right.
pub fn classify_cardinality(left: MinMaxPair, right: MinMaxPair) -> CardinalityRatio {
    match (left.max.exceeds_one(), right.max.exceeds_one()) {
        (false, false) => CardinalityRatio::OneToOne,
        (true, false) => CardinalityRatio::OneToMany(Direction::LeftToRight),
        (false, true) => CardinalityRatio::OneToMany(Direction::RightToLeft),
        (true, true) => CardinalityRatio::ManyToMany,
    }
}

/// Stable machine-readable violation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    NoEntities,
    InvalidIdentifier,
    DuplicateEntityName,
    DuplicateRelationshipName,
    DuplicateAttributeName,
    UnknownEntity,
    RecursiveRelationship,
    ZeroMax,
    MinExceedsMax,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::NoEntities => "NoEntities",
            ViolationCode::InvalidIdentifier => "InvalidIdentifier",
            ViolationCode::DuplicateEntityName => "DuplicateEntityName",
            ViolationCode::DuplicateRelationshipName => "DuplicateRelationshipName",
            ViolationCode::DuplicateAttributeName => "DuplicateAttributeName",
            ViolationCode::UnknownEntity => "UnknownEntity",
            ViolationCode::RecursiveRelationship => "RecursiveRelationship",
            ViolationCode::ZeroMax => "ZeroMax",
            ViolationCode::MinExceedsMax => "MinExceedsMax",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Name of the offending entity, relationship or attribute.
    pub element: String,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, element: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { code, element: element.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.code, self.element, self.message)
    }
}

/// Collects every broken invariant in `model`. Returns an empty list iff the
/// model is well formed.
pub fn validate_model(model: &ERModel) -> Vec<Violation> {
    let mut out = Vec::new();

    if model.entities.is_empty() {
        out.push(Violation::new(ViolationCode::NoEntities, "", "a model needs at least one entity type"));
    }

    let mut entity_names = HashSet::new();
    for entity in &model.entities {
        check_ident(&mut out, &entity.name, "entity name");
        if !entity_names.insert(entity.name.as_str()) {
            out.push(Violation::new(
                ViolationCode::DuplicateEntityName,
                entity.name.as_str(),
                format!("entity type `{}` is declared more than once", entity.name),
            ));
        }
        let attrs = std::iter::once(&entity.key_attr)
            .chain(std::iter::once(&entity.mandatory_attr))
            .chain(&entity.secondary_attrs);
        check_attrs(&mut out, entity.name.as_str(), attrs);
    }

    let mut rel_names = HashSet::new();
    for rel in &model.relationships {
        let owner = rel.name.as_str();
        check_ident(&mut out, &rel.name, "relationship name");
        if !rel_names.insert(owner) {
            out.push(Violation::new(
                ViolationCode::DuplicateRelationshipName,
                owner,
                format!("relationship type `{owner}` is declared more than once"),
            ));
        }
        for endpoint in [&rel.left_entity, &rel.right_entity] {
            if !entity_names.contains(endpoint.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownEntity,
                    owner,
                    format!("relationship `{owner}` refers to undeclared entity `{endpoint}`"),
                ));
            }
        }
        if rel.left_entity == rel.right_entity {
            out.push(Violation::new(
                ViolationCode::RecursiveRelationship,
                owner,
                format!(
                    "relationship `{owner}` connects `{}` to itself; recursive relationships are not supported",
                    rel.left_entity
                ),
            ));
        }
        for (side, pair) in [("left", rel.left_constraint), ("right", rel.right_constraint)] {
            check_pair(&mut out, owner, side, pair);
        }
        check_attrs(&mut out, owner, rel.attrs.iter());
    }

    out
}

fn check_ident(out: &mut Vec<Violation>, ident: &Ident, what: &str) {
    if !ident.is_well_formed() {
        out.push(Violation::new(
            ViolationCode::InvalidIdentifier,
            ident.as_str(),
            format!("{what} `{ident}` is not a valid identifier"),
        ));
    }
}

fn check_attrs<'a>(out: &mut Vec<Violation>, owner: &str, attrs: impl Iterator<Item = &'a Ident>) {
    let mut seen = HashSet::new();
    for attr in attrs {
        check_ident(out, attr, "attribute name");
        if !seen.insert(attr.as_str()) {
            out.push(Violation::new(
                ViolationCode::DuplicateAttributeName,
                format!("{owner}.{attr}"),
                format!("attribute `{attr}` appears more than once in `{owner}`"),
            ));
        }
    }
}

fn check_pair(out: &mut Vec<Violation>, owner: &str, side: &str, pair: MinMaxPair) {
    if let MaxBound::Finite(max) = pair.max {
        if max == 0 {
            out.push(Violation::new(
                ViolationCode::ZeroMax,
                owner,
                format!("{side} constraint {pair} of `{owner}` has max 0; max must be at least 1"),
            ));
        } else if pair.min > max {
            out.push(Violation::new(
                ViolationCode::MinExceedsMax,
                owner,
                format!("{side} constraint {pair} of `{owner}` has min greater than max"),
            ));
        }
    }
}

/// Entities and relationships sorted by name. Attribute order is left alone:
/// position decides which attribute is mandatory.
pub fn canonicalize(model: &ERModel) -> ERModel {
    let mut out = model.clone();
    out.entities.sort_by(|a, b| a.name.cmp(&b.name));
    out.relationships.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

pub fn models_equal(a: &ERModel, b: &ERModel) -> bool {
    canonicalize(a) == canonicalize(b)
}

/// Human-readable list of structural differences between two models, compared
/// by name. Empty iff [`models_equal`] holds.
pub fn diff_models(expected: &ERModel, actual: &ERModel) -> Vec<String> {
    let a = canonicalize(expected);
    let b = canonicalize(actual);
    let mut out = Vec::new();

    merge_by_name(
        &a.entities,
        &b.entities,
        |e| &e.name,
        |name, left, right| match (left, right) {
            (Some(_), None) => out.push(format!("entity `{name}` missing")),
            (None, Some(_)) => out.push(format!("entity `{name}` unexpected")),
            (Some(l), Some(r)) => {
                if l.key_attr != r.key_attr {
                    out.push(format!("entity `{name}`: key `{}` became `{}`", l.key_attr, r.key_attr));
                }
                if l.mandatory_attr != r.mandatory_attr {
                    out.push(format!(
                        "entity `{name}`: mandatory attribute `{}` became `{}`",
                        l.mandatory_attr, r.mandatory_attr
                    ));
                }
                if l.secondary_attrs != r.secondary_attrs {
                    out.push(format!(
                        "entity `{name}`: secondary attributes [{}] became [{}]",
                        join(&l.secondary_attrs),
                        join(&r.secondary_attrs)
                    ));
                }
            }
            (None, None) => {}
        },
    );

    merge_by_name(
        &a.relationships,
        &b.relationships,
        |r| &r.name,
        |name, left, right| match (left, right) {
            (Some(_), None) => out.push(format!("relationship `{name}` missing")),
            (None, Some(_)) => out.push(format!("relationship `{name}` unexpected")),
            (Some(l), Some(r)) => {
                if (&l.left_entity, &l.right_entity) != (&r.left_entity, &r.right_entity) {
                    out.push(format!(
                        "relationship `{name}`: endpoints ({},{}) became ({},{})",
                        l.left_entity, l.right_entity, r.left_entity, r.right_entity
                    ));
                }
                if l.left_constraint != r.left_constraint {
                    out.push(format!(
                        "relationship `{name}`: left constraint {} became {}",
                        l.left_constraint, r.left_constraint
                    ));
                }
                if l.right_constraint != r.right_constraint {
                    out.push(format!(
                        "relationship `{name}`: right constraint {} became {}",
                        l.right_constraint, r.right_constraint
                    ));
                }
                if l.attrs != r.attrs {
                    out.push(format!(
                        "relationship `{name}`: attributes [{}] became [{}]",
                        join(&l.attrs),
                        join(&r.attrs)
                    ));
                }
            }
            (None, None) => {}
        },
    );

    // Same names, same fields, but duplicated declarations differ in count.
    if out.is_empty() && a != b {
        out.push("models differ in duplicated declarations".to_owned());
    }
    out
}

fn join(attrs: &[Ident]) -> String {
    attrs.iter().map(Ident::as_str).collect::<Vec<_>>().join(", ")
}

/// Walks two name-sorted slices in lockstep.
fn merge_by_name<'a, T>(
    left: &'a [T],
    right: &'a [T],
    name: impl Fn(&T) -> &Ident,
    mut visit: impl FnMut(&Ident, Option<&'a T>, Option<&'a T>),
) {
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        let order = match (left.get(i), right.get(j)) {
            (Some(l), Some(r)) => name(l).cmp(name(r)),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match order {
            Ordering::Less => {
                visit(name(&left[i]), Some(&left[i]), None);
                i += 1;
            }
            Ordering::Greater => {
                visit(name(&right[j]), None, Some(&right[j]));
                j += 1;
            }
            Ordering::Equal => {
                visit(name(&left[i]), Some(&left[i]), Some(&right[j]));
                i += 1;
                j += 1;
            }
        }
    }
}
