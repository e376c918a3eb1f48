//! Partition ER models into ER-construct-units, transform them into an
//! annotated relational schema split into matching relation-schema-units, and
//! check that the unit mapping is one-to-one, onto and reversible.
//!
//! The pipeline is
//!
//! ```text
//! DSL / JSON --parse--> ERModel --partition_model--> Partition
//!     --forward_transform--> (RelationalSchema, UnitMapping)
//!     --reverse_transform--> ERModel
//! ```

pub mod cli;
pub mod harness;
pub mod model;
pub mod notation;
pub mod partition;
pub mod rds;

pub use model::{
    canonicalize, classify_cardinality, classify_participation, models_equal, validate_model,
    CardinalityRatio, Direction, ERModel, EntityType, Ident, MaxBound, MinMaxPair, Participation,
    RelationshipType, Violation, ViolationCode,
};
pub use notation::{model_from_json, model_to_json, parse_model, print_model, ParseError};
pub use partition::{partition_model, unit_label, verify_partition, ERConstructUnit, Partition};
pub use rds::{
    check_bijection, emit_ddl, forward_transform, reverse_transform, schema_from_json, schema_to_json,
    BijectionReport, RdsUnit, RelationalSchema, UnitMapping,
};
