//! Values, tuples and set-valued relations, plus CSV ingestion.

use std::cmp::Ordering;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A scalar attribute value. All values of one attribute carry the same tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Str(Arc<str>),
}

impl Value {
    pub fn str(s: &str) -> Self {
        Value::Str(Arc::from(s))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Str(_) => None,
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Value::Int(_) => 0,
            Value::Str(_) => 1,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Str(a), Value::Str(b)) => a.as_bytes().cmp(b.as_bytes()),
            // never happens within one attribute; keeps the order total
            _ => self.tag().cmp(&other.tag()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::str(s)
    }
}

pub type Tuple = Vec<Value>;

/// A named set of tuples over a fixed schema.
///
/// Tuples are kept sorted and deduplicated, so two relations holding the same
/// set compare equal regardless of insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    name: String,
    schema: Vec<String>,
    tuples: Vec<Tuple>,
}

impl Relation {
    pub fn new(name: impl Into<String>, schema: Vec<String>, mut tuples: Vec<Tuple>) -> Result<Self> {
        let name = name.into();
        for (i, t) in tuples.iter().enumerate() {
            if t.len() != schema.len() {
                return Err(Error::InvalidQuery(format!(
                    "relation `{name}`: tuple {i} has {} values, schema has {}",
                    t.len(),
                    schema.len()
                )));
            }
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation {
            name,
            schema,
            tuples,
        })
    }

    /// Builds a relation of integer tuples; handy for fixtures.
    pub fn from_ints(name: &str, schema: &[&str], rows: &[&[i64]]) -> Self {
        let tuples = rows
            .iter()
            .map(|r| r.iter().map(|&v| Value::Int(v)).collect())
            .collect();
        Relation::new(name, schema.iter().map(|s| s.to_string()).collect(), tuples)
            .expect("fixture arity")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn position(&self, attr: &str) -> Option<usize> {
        self.schema.iter().position(|a| a == attr)
    }

    /// Same tuples under new attribute names (positional).
    pub fn renamed(&self, name: &str, schema: Vec<String>) -> Result<Self> {
        if schema.len() != self.schema.len() {
            return Err(Error::InvalidQuery(format!(
                "relation `{}` has {} columns but {} attribute names were given",
                self.name,
                self.schema.len(),
                schema.len()
            )));
        }
        Ok(Relation {
            name: name.to_string(),
            schema,
            tuples: self.tuples.clone(),
        })
    }

    pub fn filtered(&self, mut keep: impl FnMut(&Tuple) -> bool) -> Self {
        Relation {
            name: self.name.clone(),
            schema: self.schema.clone(),
            tuples: self.tuples.iter().filter(|t| keep(t)).cloned().collect(),
        }
    }
}

/// Loads a relation whose CSV header must equal `schema`.
pub fn load_relation(path: &Path, name: &str, schema: &[String]) -> Result<Relation> {
    let rel = load_csv(path, name)?;
    if rel.schema() != schema {
        return Err(Error::Csv {
            context: path.display().to_string(),
            row: 1,
            message: format!("header {:?} does not match schema {:?}", rel.schema(), schema),
        });
    }
    Ok(rel)
}

/// Loads a relation taking its schema from the CSV header.
pub fn load_csv(path: &Path, name: &str) -> Result<Relation> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, name, &path.display().to_string())
}

/// Parses CSV text with a header row. Each column is typed by its first data
/// row; a later cell of the other kind is an error naming the row (1-based,
/// header is row 1).
pub fn read_csv<R: Read>(reader: R, name: &str, context: &str) -> Result<Relation> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv {
            context: context.to_string(),
            row: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().any(String::is_empty) {
        return Err(Error::Csv {
            context: context.to_string(),
            row: 1,
            message: "empty header".into(),
        });
    }
    let mut is_int: Vec<Option<bool>> = vec![None; header.len()];
    let mut tuples = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Csv {
            context: context.to_string(),
            row,
            message: e.to_string(),
        })?;
        if rec.len() != header.len() {
            return Err(Error::Csv {
                context: context.to_string(),
                row,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        let mut tuple = Vec::with_capacity(header.len());
        for (c, cell) in rec.iter().enumerate() {
            let parsed = cell.parse::<i64>().ok();
            let kind = *is_int[c].get_or_insert(parsed.is_some());
            if kind != parsed.is_some() {
                return Err(Error::MixedType {
                    context: context.to_string(),
                    column: header[c].clone(),
                    row,
                });
            }
            tuple.push(match parsed {
                Some(v) => Value::Int(v),
                None => Value::str(cell),
            });
        }
        tuples.push(tuple);
    }
    Relation::new(name, header, tuples)
}
