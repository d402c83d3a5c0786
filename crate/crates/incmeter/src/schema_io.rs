//! Flat-file ingestion: schema declarations, CSV relation data, and the
//! manifest tying them together.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::constraint::{parse_constraints, ConstraintSet};
use crate::error::Error;
use crate::model::{AttributeKind, Database, RelationScheme, Schema, Value};

/// Parses a schema file: one `relation Name(Attr: kind, ...)` per line,
/// `#` comments, blank lines ignored.
pub fn parse_schema(text: &str) -> Result<Schema, Error> {
    let mut relations = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| Error::parse_at(lineno + 1, 1, msg);
        let rest = line
            .strip_prefix("relation")
            .ok_or_else(|| at(format!("expected `relation`, got `{line}`")))?
            .trim_start();
        let (name, args) = rest
            .split_once('(')
            .ok_or_else(|| at("expected `(` after relation name".into()))?;
        let name = name.trim();
        if name.is_empty() || !is_identifier(name) {
            return Err(at(format!("bad relation name `{name}`")));
        }
        let args = args
            .trim_end()
            .strip_suffix(')')
            .ok_or_else(|| at("expected closing `)`".into()))?;
        let mut attributes = Vec::new();
        for part in args.split(',') {
            let (attr, kind) = part
                .split_once(':')
                .ok_or_else(|| at(format!("expected `name: kind` in `{part}`")))?;
            let attr = attr.trim();
            if !is_identifier(attr) {
                return Err(at(format!("bad attribute name `{attr}`")));
            }
            let kind = AttributeKind::from_name(kind.trim())
                .ok_or_else(|| at(format!("unknown kind `{}`", kind.trim())))?;
            attributes.push((attr.to_string(), kind));
        }
        relations.push(RelationScheme {
            name: name.to_string(),
            attributes,
        });
    }
    Schema::new(relations)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads one relation's CSV file. The header must name the scheme's
/// attributes in order; cells are parsed at the declared kinds.
pub fn read_relation_csv(
    schema: &Schema,
    relation: &str,
    path: &Path,
) -> Result<Vec<Vec<Value>>, Error> {
    let scheme = schema
        .relation(relation)
        .ok_or_else(|| Error::Model(format!("unknown relation {relation}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?
        .clone();
    let expected: Vec<&str> = scheme.attributes.iter().map(|(n, _)| n.as_str()).collect();
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::Validation(format!(
            "{}: header {:?} does not match scheme attributes {:?}",
            path.display(),
            got,
            expected
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
        if record.len() != scheme.arity() {
            return Err(Error::Validation(format!(
                "{}: row {}: got {} fields, expected {}",
                path.display(),
                i + 1,
                record.len(),
                scheme.arity()
            )));
        }
        let mut row = Vec::with_capacity(scheme.arity());
        for (j, cell) in record.iter().enumerate() {
            let kind = scheme.attributes[j].1;
            let v = Value::parse_as(kind, cell).map_err(|e| {
                Error::Validation(format!(
                    "{}: row {} attribute {}: {e}",
                    path.display(),
                    i + 1,
                    scheme.attributes[j].0
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// A parsed manifest: paths are resolved against the manifest location.
#[derive(Clone, Debug)]
pub struct Manifest {
    pub schema_path: PathBuf,
    pub constraints_path: PathBuf,
    pub data_paths: BTreeMap<String, PathBuf>,
}

impl Manifest {
    /// Parses `key = value` lines: `schema`, `constraints`, and one
    /// `data.<Relation>` entry per relation.
    pub fn parse(text: &str, base: &Path) -> Result<Manifest, Error> {
        let mut schema_path = None;
        let mut constraints_path = None;
        let mut data_paths = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse_at(lineno + 1, 1, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = base.join(value.trim());
            match key {
                "schema" => schema_path = Some(value),
                "constraints" => constraints_path = Some(value),
                _ => match key.strip_prefix("data.") {
                    Some(rel) if is_identifier(rel) => {
                        data_paths.insert(rel.to_string(), value);
                    }
                    _ => {
                        return Err(Error::parse_at(
                            lineno + 1,
                            1,
                            format!("unknown manifest key `{key}`"),
                        ))
                    }
                },
            }
        }
        Ok(Manifest {
            schema_path: schema_path
                .ok_or_else(|| Error::Validation("manifest is missing `schema`".into()))?,
            constraints_path: constraints_path
                .ok_or_else(|| Error::Validation("manifest is missing `constraints`".into()))?,
            data_paths,
        })
    }

    pub fn read(path: &Path) -> Result<Manifest, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Manifest::parse(&text, base)
    }

    /// Loads the full workload: schema, constraints, and all data files.
    /// Every schema relation must have a data entry (possibly an empty
    /// file body, but the header row is required).
    pub fn load(&self) -> Result<(Database, ConstraintSet), Error> {
        let schema_text = std::fs::read_to_string(&self.schema_path)
            .map_err(|e| Error::io(self.schema_path.display().to_string(), e))?;
        let schema = parse_schema(&schema_text)?;
        for r in schema.relations() {
            if !self.data_paths.contains_key(&r.name) {
                return Err(Error::Validation(format!(
                    "manifest has no data file for relation {}",
                    r.name
                )));
            }
        }
        let mut rows = Vec::new();
        for (rel, path) in &self.data_paths {
            rows.push((rel.clone(), read_relation_csv(&schema, rel, path)?));
        }
        let db = Database::load(schema, &rows)?;
        let constraints_text = std::fs::read_to_string(&self.constraints_path)
            .map_err(|e| Error::io(self.constraints_path.display().to_string(), e))?;
        let cs = parse_constraints(&constraints_text, db.schema())?;
        Ok((db, cs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mealticket")
    }

    #[test]
    fn manifest_loads_the_figure_fixture() {
        let m = Manifest::read(&fixture_dir().join("manifest.txt")).unwrap();
        let (db, cs) = m.load().unwrap();
        assert_eq!(db.len(), 7);
        assert_eq!(cs.len(), 4);
    }

    #[test]
    fn csv_header_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "Number,Holder\n1,2\n").unwrap();
        let m = Manifest::read(&fixture_dir().join("manifest.txt")).unwrap();
        let schema_text = std::fs::read_to_string(&m.schema_path).unwrap();
        let schema = parse_schema(&schema_text).unwrap();
        let e = read_relation_csv(&schema, "MealTicket", &p).unwrap_err();
        assert!(format!("{e}").contains("header"), "{e}");
    }

    #[test]
    fn schema_parse_rejects_duplicates() {
        assert!(parse_schema("relation R(A: int, A: int)").is_err());
        assert!(parse_schema("relation R(A: int)\nrelation R(B: int)").is_err());
        assert!(parse_schema("relation R(A: blob)").is_err());
        assert!(parse_schema("").is_err());
    }
}
