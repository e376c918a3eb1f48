/*!
Textual notation for ER models, and the canonical JSON encoding.

```ebnf
model       = { entity_decl | rel_decl } ;
entity_decl = "entity", IDENT, "{", "key", IDENT, attr_decl, { attr_decl }, "}" ;
attr_decl   = "attr", IDENT ;
rel_decl    = "relationship", IDENT, "between", IDENT, "(", bound, ",", bound, ")",
              "and", IDENT, "(", bound, ",", bound, ")", [ "{", { attr_decl }, "}" ] ;
bound       = INTEGER | "N" ;          (* "N" only as a max *)
IDENT       = ( letter | "_" ), { letter | digit | "_" } ;
```

`#` starts a comment running to end of line. Keywords are contextual, so an
attribute may be called `key` or `attr` and an entity may be called `N`.
The first `attr` after the key is the mandatory attribute.
*/

use std::fmt::{self, Write as _};

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ERModel, EntityType, Ident, MaxBound, MinMaxPair, RelationshipType};

/// Position of a token in the source. Line and column are 1-based; columns
/// count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Word(String),
    Int(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    span: SourceSpan,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Int(n) => format!("`{n}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str) -> Self {
        Lexer { chars: source.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '#' {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.bump();
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let span = |length| SourceSpan { line, column, length };
            let Some(&c) = self.chars.peek() else {
                tokens.push(Token { kind: TokenKind::Eof, span: span(0) });
                return Ok(tokens);
            };
            let kind = if c.is_ascii_alphabetic() || c == '_' {
                TokenKind::Word(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
            } else if c.is_ascii_digit() {
                TokenKind::Int(self.take_while(|c| c.is_ascii_digit()))
            } else {
                self.bump();
                match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    other => {
                        return Err(ParseError {
                            span: span(1),
                            expected: "a token".into(),
                            found: format!("character `{other}`"),
                        })
                    }
                }
            };
            let length = self.column - column;
            tokens.push(Token { kind, span: span(length) });
        }
    }

    fn take_while(&mut self, keep: impl Fn(char) -> bool) -> String {
        let mut text = String::new();
        while let Some(&c) = self.chars.peek() {
            if !keep(c) {
                break;
            }
            text.push(c);
            self.bump();
        }
        text
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let tok = self.peek();
        ParseError { span: tok.span, expected: expected.into(), found: tok.describe() }
    }

    fn at_keyword(&self, keyword: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Word(w) if w == keyword)
    }

    fn keyword(&mut self, keyword: &str) -> Result<(), ParseError> {
        if self.at_keyword(keyword) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("`{keyword}`")))
        }
    }

    fn punct(&mut self, kind: TokenKind, text: &str) -> Result<(), ParseError> {
        if self.peek().kind == kind {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("`{text}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        match &self.peek().kind {
            TokenKind::Word(w) => {
                let ident = Ident::new(w.clone());
                self.advance();
                Ok(ident)
            }
            _ => Err(self.error(what)),
        }
    }

    fn model(&mut self) -> Result<ERModel, ParseError> {
        let mut model = ERModel::default();
        loop {
            if self.at_keyword("entity") {
                model.entities.push(self.entity()?);
            } else if self.at_keyword("relationship") {
                model.relationships.push(self.relationship()?);
            } else if self.peek().kind == TokenKind::Eof {
                return Ok(model);
            } else {
                return Err(self.error("`entity` or `relationship`"));
            }
        }
    }

    fn entity(&mut self) -> Result<EntityType, ParseError> {
        self.keyword("entity")?;
        let name = self.ident("entity name")?;
        self.punct(TokenKind::LBrace, "{")?;
        self.keyword("key")?;
        let key_attr = self.ident("key attribute name")?;
        self.keyword("attr")?;
        let mandatory_attr = self.ident("attribute name")?;
        let mut secondary_attrs = Vec::new();
        loop {
            if self.at_keyword("attr") {
                self.advance();
                secondary_attrs.push(self.ident("attribute name")?);
            } else if self.peek().kind == TokenKind::RBrace {
                self.advance();
                break;
            } else {
                return Err(self.error("`attr` or `}`"));
            }
        }
        Ok(EntityType { name, key_attr, mandatory_attr, secondary_attrs })
    }

    fn relationship(&mut self) -> Result<RelationshipType, ParseError> {
        self.keyword("relationship")?;
        let name = self.ident("relationship name")?;
        self.keyword("between")?;
        let left_entity = self.ident("entity name")?;
        let left_constraint = self.min_max()?;
        self.keyword("and")?;
        let right_entity = self.ident("entity name")?;
        let right_constraint = self.min_max()?;
        let mut attrs = Vec::new();
        if self.peek().kind == TokenKind::LBrace {
            self.advance();
            loop {
                if self.at_keyword("attr") {
                    self.advance();
                    attrs.push(self.ident("attribute name")?);
                } else if self.peek().kind == TokenKind::RBrace {
                    self.advance();
                    break;
                } else {
                    return Err(self.error("`attr` or `}`"));
                }
            }
        }
        Ok(RelationshipType { name, left_entity, right_entity, left_constraint, right_constraint, attrs })
    }

    fn min_max(&mut self) -> Result<MinMaxPair, ParseError> {
        self.punct(TokenKind::LParen, "(")?;
        let min = self.integer("integer min")?;
        self.punct(TokenKind::Comma, ",")?;
        let max = if self.at_keyword("N") {
            self.advance();
            MaxBound::Unbounded
        } else {
            MaxBound::Finite(self.integer("integer max or `N`")?)
        };
        self.punct(TokenKind::RParen, ")")?;
        Ok(MinMaxPair { min, max })
    }

    fn integer(&mut self, what: &str) -> Result<u32, ParseError> {
        match &self.peek().kind {
            TokenKind::Int(digits) => match digits.parse::<u32>() {
                Ok(n) => {
                    self.advance();
                    Ok(n)
                }
                Err(_) => Err(self.error("integer no larger than 4294967295")),
            },
            _ => Err(self.error(what)),
        }
    }
}

/// Parses DSL source. Declaration order is kept; semantic checks are left to
/// [`crate::model::validate_model`].
pub fn parse_model(source: &str) -> Result<ERModel, ParseError> {
    let tokens = Lexer::new(source).tokenize()?;
    Parser { tokens, pos: 0 }.model()
}

/// Renders `model` in the DSL, in declaration order.
pub fn print_model(model: &ERModel) -> String {
    let mut out = String::new();
    let mut first = true;
    let mut gap = |out: &mut String| {
        if !std::mem::take(&mut first) {
            out.push('\n');
        }
    };
    for e in &model.entities {
        gap(&mut out);
        let _ = writeln!(out, "entity {} {{", e.name);
        let _ = writeln!(out, "    key {}", e.key_attr);
        let _ = writeln!(out, "    attr {}", e.mandatory_attr);
        for a in &e.secondary_attrs {
            let _ = writeln!(out, "    attr {a}");
        }
        out.push_str("}\n");
    }
    for r in &model.relationships {
        gap(&mut out);
        let _ = write!(
            out,
            "relationship {} between {} {} and {} {}",
            r.name, r.left_entity, r.left_constraint, r.right_entity, r.right_constraint
        );
        if r.attrs.is_empty() {
            out.push('\n');
        } else {
            out.push_str(" {\n");
            for a in &r.attrs {
                let _ = writeln!(out, "    attr {a}");
            }
            out.push_str("}\n");
        }
    }
    out
}

/// Malformed JSON input, or JSON that does not have the expected shape.
#[derive(Debug, Error)]
#[error("{line}:{column}: {message}")]
pub struct JsonError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for JsonError {
    fn from(err: serde_json::Error) -> Self {
        JsonError { line: err.line(), column: err.column(), message: err.to_string() }
    }
}

impl Serialize for MaxBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MaxBound::Finite(n) => serializer.serialize_u32(*n),
            MaxBound::Unbounded => serializer.serialize_str("N"),
        }
    }
}

impl<'de> Deserialize<'de> for MaxBound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = MaxBound;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or \"N\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<MaxBound, E> {
                u32::try_from(v)
                    .map(MaxBound::Finite)
                    .map_err(|_| E::invalid_value(de::Unexpected::Unsigned(v), &self))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<MaxBound, E> {
                if v == "N" {
                    Ok(MaxBound::Unbounded)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Ident {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer).map(Ident::new)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntityDoc {
    name: Ident,
    key: Ident,
    mandatory: Ident,
    secondary: Vec<Ident>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationshipDoc {
    name: Ident,
    left: Ident,
    right: Ident,
    left_minmax: MinMaxPair,
    right_minmax: MinMaxPair,
    attrs: Vec<Ident>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    entities: Vec<EntityDoc>,
    relationships: Vec<RelationshipDoc>,
}

/// Canonical JSON: pretty-printed, fields in fixed order, newline-terminated.
pub fn model_to_json(model: &ERModel) -> String {
    let doc = ModelDoc {
        entities: model
            .entities
            .iter()
            .map(|e| EntityDoc {
                name: e.name.clone(),
                key: e.key_attr.clone(),
                mandatory: e.mandatory_attr.clone(),
                secondary: e.secondary_attrs.clone(),
            })
            .collect(),
        relationships: model
            .relationships
            .iter()
            .map(|r| RelationshipDoc {
                name: r.name.clone(),
                left: r.left_entity.clone(),
                right: r.right_entity.clone(),
                left_minmax: r.left_constraint,
                right_minmax: r.right_constraint,
                attrs: r.attrs.clone(),
            })
            .collect(),
    };
    to_canonical_json(&doc)
}

pub fn model_from_json(text: &str) -> Result<ERModel, JsonError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    Ok(ERModel {
        entities: doc
            .entities
            .into_iter()
            .map(|e| EntityType {
                name: e.name,
                key_attr: e.key,
                mandatory_attr: e.mandatory,
                secondary_attrs: e.secondary,
            })
            .collect(),
        relationships: doc
            .relationships
            .into_iter()
            .map(|r| RelationshipType {
                name: r.name,
                left_entity: r.left,
                right_entity: r.right,
                left_constraint: r.left_minmax,
                right_constraint: r.right_minmax,
                attrs: r.attrs,
            })
            .collect(),
    })
}

pub(crate) fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("document types always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{models_equal, validate_model, ViolationCode};

    const VEHICLE_PROJECT: &str = "\
entity Vehicle { key VehicleNo attr Make attr Color }
entity Project { key ProjectNo attr Title attr Budget }
relationship AssignedTo between Vehicle (0,3) and Project (1,1) { attr AssignedDate attr Period }
";

    #[test]
    fn parses_employee() {
        let m = parse_model("entity Employee { key Emp_No attr Name attr Address attr Gender }").unwrap();
        assert_eq!(m.entities, vec![EntityType::new("Employee", "Emp_No", "Name", ["Address", "Gender"])]);
        assert!(m.relationships.is_empty());
    }

    #[test]
    fn empty_source_is_an_empty_model() {
        let m = parse_model("  # nothing here\n").unwrap();
        assert_eq!(m, ERModel::default());
        assert_eq!(validate_model(&m)[0].code, ViolationCode::NoEntities);
    }

    #[test]
    fn parses_relationship_with_attributes() {
        let m = parse_model(VEHICLE_PROJECT).unwrap();
        let r = &m.relationships[0];
        assert_eq!(r.left_entity.as_str(), "Vehicle");
        assert_eq!(r.right_entity.as_str(), "Project");
        assert_eq!(r.left_constraint, MinMaxPair::finite(0, 3));
        assert_eq!(r.right_constraint, MinMaxPair::finite(1, 1));
        assert_eq!(r.attrs, vec![Ident::from("AssignedDate"), Ident::from("Period")]);
    }

    #[test]
    fn unbounded_max_and_contextual_keywords() {
        let src = "entity N { key key attr attr attr entity }\n\
                   entity B { key k attr m }\n\
                   relationship and between N (2,N) and B (0, 1)";
        let m = parse_model(src).unwrap();
        assert_eq!(m.entities[0].name.as_str(), "N");
        assert_eq!(m.entities[0].key_attr.as_str(), "key");
        assert_eq!(m.entities[0].secondary_attrs, vec![Ident::from("entity")]);
        assert_eq!(m.relationships[0].left_constraint, MinMaxPair::unbounded(2));
        assert!(m.relationships[0].attrs.is_empty());
        assert!(models_equal(&parse_model(&print_model(&m)).unwrap(), &m));
    }

    #[test]
    fn n_in_min_position_is_rejected() {
        let err = parse_model("relationship R between A (N,1) and B (0,1)").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 1, column: 27, length: 1 });
        assert_eq!(err.found, "`N`");
        assert_eq!(err.expected, "integer min");
    }

    #[test]
    fn error_positions() {
        let err = parse_model("entity E {\n  key k\n  attr\n}").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 4, column: 1, length: 1 });
        assert_eq!(err.expected, "attribute name");

        let err = parse_model("entity E { key k }").unwrap_err();
        assert_eq!(err.expected, "`attr`");
        assert_eq!(err.found, "`}`");

        let err = parse_model("entity E { key k attr m").unwrap_err();
        assert_eq!(err.found, "end of input");
        assert_eq!(err.span, SourceSpan { line: 1, column: 24, length: 0 });

        let err = parse_model("entity E { key k attr m } @").unwrap_err();
        assert_eq!(err.found, "character `@`");
        assert_eq!(err.span.column, 27);

        let err = parse_model("relationship R between A (0,99999999999) and B (0,1)").unwrap_err();
        assert!(err.expected.contains("4294967295"));
    }

    #[test]
    fn recursive_relationship_parses_but_fails_validation() {
        let m = parse_model("entity A { key k attr m }\nrelationship R between A (0,1) and A (0,N)").unwrap();
        let codes: Vec<_> = validate_model(&m).into_iter().map(|v| v.code).collect();
        assert_eq!(codes, vec![ViolationCode::RecursiveRelationship]);
    }

    #[test]
    fn printer_layout() {
        let m = parse_model(VEHICLE_PROJECT).unwrap();
        let text = print_model(&m);
        assert_eq!(
            text,
            "entity Vehicle {\n    key VehicleNo\n    attr Make\n    attr Color\n}\n\n\
             entity Project {\n    key ProjectNo\n    attr Title\n    attr Budget\n}\n\n\
             relationship AssignedTo between Vehicle (0,3) and Project (1,1) {\n    attr AssignedDate\n    attr Period\n}\n"
        );
        assert_eq!(print_model(&m), text);
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn employee_json() {
        let m =
            ERModel::new(vec![EntityType::new("Employee", "Emp_No", "Name", ["Address", "Gender"])], vec![]);
        let json = model_to_json(&m);
        let compact: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(
            serde_json::to_string(&compact["entities"][0]).unwrap(),
            r#"{"key":"Emp_No","mandatory":"Name","name":"Employee","secondary":["Address","Gender"]}"#
        );
        // Key order in the emitted text, not just the parsed value.
        let flat: String = json.split_whitespace().collect();
        assert!(flat.contains(
            r#"{"name":"Employee","key":"Emp_No","mandatory":"Name","secondary":["Address","Gender"]}"#
        ));
        assert!(json.ends_with('\n'));
        assert_eq!(model_from_json(&json).unwrap(), m);
    }

    #[test]
    fn unbounded_json_marker() {
        let mut m = parse_model(VEHICLE_PROJECT).unwrap();
        m.relationships[0].left_constraint = MinMaxPair::unbounded(0);
        let json = model_to_json(&m);
        let flat: String = json.split_whitespace().collect();
        assert!(flat.contains(r#""left_minmax":{"min":0,"max":"N"}"#));
        assert!(flat.contains(r#""name":"AssignedTo","left":"Vehicle","right":"Project","left_minmax""#));
        assert_eq!(model_from_json(&json).unwrap(), m);
    }

    #[test]
    fn malformed_json() {
        assert!(model_from_json("{").is_err());
        assert!(model_from_json(r#"{"entities":[]}"#).is_err());
        let bad_max = r#"{"entities":[],"relationships":[{"name":"R","left":"A","right":"B",
            "left_minmax":{"min":0,"max":"M"},"right_minmax":{"min":0,"max":1},"attrs":[]}]}"#;
        let err = model_from_json(bad_max).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(model_from_json(r#"{"entities":[],"relationships":[],"extra":1}"#).is_err());
    }
}
