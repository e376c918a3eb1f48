//! Command-line front end. [`run`] takes the argument list and two writers so
//! it can be driven from tests; the binary just forwards `std::env::args`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::harness::{generate_model, run_property_suite, GenConfig};
use crate::model::{
    classify_cardinality, classify_participation, diff_models, models_equal, validate_model,
    CardinalityRatio, Direction, ERModel,
};
use crate::notation::{parse_model, print_model};
use crate::partition::{partition_model, partition_to_json, Partition};
use crate::rds::{
    check_bijection, emit_ddl, forward_transform, reverse_transform, schema_from_json, schema_to_json,
    SchemaJsonError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ROUND_TRIP: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "erunits", version, about = "Partition ER models and map them to relational schemas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report every well-formedness violation in a model
    Validate { file: PathBuf },
    /// List the ER-construct-units of a model
    Partition {
        file: PathBuf,
        /// Write the partition as JSON instead of printing labels
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Show participation and cardinality ratio of every relationship
    Classify { file: PathBuf },
    /// Produce the relational schema (JSON) and optionally DDL
    Transform {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ddl: Option<PathBuf>,
    },
    /// Rebuild a model from a schema JSON document
    Reverse {
        schema: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a model survives the forward and reverse transformations
    Roundtrip { file: PathBuf },
    /// Print a random model
    Gen {
        #[arg(long)]
        seed: u64,
        /// Upper bound on the number of entity types
        #[arg(long)]
        entities: Option<usize>,
        /// Upper bound on the number of relationship types
        #[arg(long)]
        rels: Option<usize>,
    },
    /// Run the property suite over generated models
    Check {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        iterations: u64,
    },
}

/// Exit code plus the message already written to stderr.
struct Exit(i32);

type CmdResult = Result<(), Exit>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut ctx = Ctx { out, err };
    match ctx.dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Exit(code)) => code,
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn dispatch(&mut self, command: Command) -> CmdResult {
        match command {
            Command::Validate { file } => self.validate(&file),
            Command::Partition { file, json } => self.partition(&file, json.as_deref()),
            Command::Classify { file } => self.classify(&file),
            Command::Transform { file, out, ddl } => self.transform(&file, &out, ddl.as_deref()),
            Command::Reverse { schema, out } => self.reverse(&schema, &out),
            Command::Roundtrip { file } => self.roundtrip(&file),
            Command::Gen { seed, entities, rels } => self.gen(seed, entities, rels),
            Command::Check { seed, iterations } => self.check(seed, iterations as usize),
        }
    }

    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> Exit {
        let _ = writeln!(self.err, "error: {message}");
        Exit(code)
    }

    fn read(&mut self, path: &Path) -> Result<String, Exit> {
        fs::read_to_string(path)
            .map_err(|e| self.fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
    }

    fn write(&mut self, path: &Path, contents: &str) -> CmdResult {
        fs::write(path, contents)
            .map_err(|e| self.fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
    }

    fn load(&mut self, path: &Path) -> Result<ERModel, Exit> {
        let source = self.read(path)?;
        parse_model(&source).map_err(|e| self.fail(EXIT_PARSE, format!("{}:{e}", path.display())))
    }

    fn load_valid(&mut self, path: &Path) -> Result<ERModel, Exit> {
        let model = self.load(path)?;
        let violations = validate_model(&model);
        if violations.is_empty() {
            return Ok(model);
        }
        for v in &violations {
            let _ = writeln!(self.err, "{}: {v}", path.display());
        }
        Err(Exit(EXIT_INVALID))
    }

    fn partitioned(&mut self, path: &Path) -> Result<Partition, Exit> {
        let model = self.load_valid(path)?;
        partition_model(&model).map_err(|e| self.fail(EXIT_INVALID, e))
    }

    fn validate(&mut self, path: &Path) -> CmdResult {
        let model = self.load(path)?;
        let violations = validate_model(&model);
        for v in &violations {
            let _ = writeln!(self.out, "{v}");
        }
        if violations.is_empty() {
            let _ = writeln!(self.out, "ok");
            Ok(())
        } else {
            Err(Exit(EXIT_INVALID))
        }
    }

    fn partition(&mut self, path: &Path, json: Option<&Path>) -> CmdResult {
        let partition = self.partitioned(path)?;
        match json {
            Some(target) => self.write(target, &partition_to_json(&partition)),
            None => {
                for label in partition.labels() {
                    let _ = writeln!(self.out, "{label}");
                }
                Ok(())
            }
        }
    }

    fn classify(&mut self, path: &Path) -> CmdResult {
        let model = self.load_valid(path)?;
        for r in &model.relationships {
            let ratio = match classify_cardinality(r.left_constraint, r.right_constraint) {
                CardinalityRatio::OneToOne => "one-to-one".to_owned(),
                CardinalityRatio::ManyToMany => "many-to-many".to_owned(),
                CardinalityRatio::OneToMany(Direction::LeftToRight) => {
                    format!("one-to-many {}->{}", r.left_entity, r.right_entity)
                }
                CardinalityRatio::OneToMany(Direction::RightToLeft) => {
                    format!("one-to-many {}->{}", r.right_entity, r.left_entity)
                }
            };
            let _ = writeln!(
                self.out,
                "{}: {} {}, {} {}, {ratio}",
                r.name,
                r.left_entity,
                classify_participation(r.left_constraint),
                r.right_entity,
                classify_participation(r.right_constraint),
            );
        }
        Ok(())
    }

    fn transform(&mut self, path: &Path, out: &Path, ddl: Option<&Path>) -> CmdResult {
        let partition = self.partitioned(path)?;
        let (schema, mapping) = forward_transform(&partition).map_err(|e| self.fail(EXIT_INVALID, e))?;
        self.write(out, &schema_to_json(&schema, &mapping))?;
        if let Some(ddl) = ddl {
            self.write(ddl, &emit_ddl(&schema))?;
        }
        Ok(())
    }

    fn reverse(&mut self, path: &Path, out: &Path) -> CmdResult {
        let text = self.read(path)?;
        let (schema, _) = schema_from_json(&text).map_err(|e| match e {
            SchemaJsonError::Json(e) => self.fail(EXIT_PARSE, format!("{}:{e}", path.display())),
            e @ SchemaJsonError::Malformed(_) => self.fail(EXIT_INVALID, e),
        })?;
        let model = reverse_transform(&schema).map_err(|e| self.fail(EXIT_INVALID, e))?;
        self.write(out, &print_model(&model))
    }

    fn roundtrip(&mut self, path: &Path) -> CmdResult {
        let partition = self.partitioned(path)?;
        let (schema, mapping) = forward_transform(&partition).map_err(|e| self.fail(EXIT_INVALID, e))?;
        let report = check_bijection(&partition, &schema, &mapping);
        if !report.passed() {
            let _ = write!(self.out, "{report}");
            return Err(self.fail(EXIT_ROUND_TRIP, "unit mapping is not a bijection"));
        }
        // Go through the serialized document, as `reverse` would.
        let (schema, _) = schema_from_json(&schema_to_json(&schema, &mapping))
            .map_err(|e| self.fail(EXIT_ROUND_TRIP, e))?;
        let back = reverse_transform(&schema).map_err(|e| self.fail(EXIT_ROUND_TRIP, e))?;
        if models_equal(&back, &partition.source_model) {
            let _ = writeln!(self.out, "round trip ok: {} units", partition.units.len());
            Ok(())
        } else {
            for line in diff_models(&partition.source_model, &back) {
                let _ = writeln!(self.out, "{line}");
            }
            Err(self.fail(EXIT_ROUND_TRIP, "round trip changed the model"))
        }
    }

    fn gen(&mut self, seed: u64, entities: Option<usize>, rels: Option<usize>) -> CmdResult {
        let mut config = GenConfig::with_seed(seed);
        if let Some(k) = entities {
            if k == 0 {
                return Err(self.fail(EXIT_USAGE, "--entities must be at least 1"));
            }
            config.max_entities = k;
        }
        if let Some(k) = rels {
            config.max_relationships = k;
        }
        let _ = write!(self.out, "{}", print_model(&generate_model(&config)));
        Ok(())
    }

    fn check(&mut self, seed: u64, iterations: usize) -> CmdResult {
        let report = run_property_suite(&GenConfig::with_seed(seed), iterations);
        for f in &report.failures {
            let _ = writeln!(self.out, "seed {}: {} failed: {}", f.seed, f.property, f.detail);
            let _ = write!(self.out, "{}", f.model_json);
        }
        let _ =
            writeln!(self.out, "{} iteration(s), {} failure(s)", report.iterations, report.failures.len());
        if report.passed() {
            Ok(())
        } else {
            Err(Exit(EXIT_ROUND_TRIP))
        }
    }
}
