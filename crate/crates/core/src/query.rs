//! Join-project query specifications and their JSON form.
//!
//! ```json
//! {"relations": [{"name": "edges", "file": "edges.csv", "as": "R1", "attrs": ["A", "B"],
//!                 "filters": [{"attr": "A", "op": "!=", "value": 3}]}],
//!  "project": ["A"], "order": {"type": "sum"}, "limit": 10}
//! ```
//!
//! A relation is addressed by its alias (`as`, defaulting to `name`). `attrs`
//! renames the file's columns positionally, which is how self-joins are
//! written. Natural-join semantics follow from attribute-name equality.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ranking::{Direction, RankingFunction};
use crate::relation::{load_csv, Relation, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "=" | "==" | "eq" => CmpOp::Eq,
            "!=" | "<>" | "ne" => CmpOp::Ne,
            "<" | "lt" => CmpOp::Lt,
            "<=" | "le" => CmpOp::Le,
            ">" | "gt" => CmpOp::Gt,
            ">=" | "ge" => CmpOp::Ge,
            other => return Err(Error::InvalidQuery(format!("unknown filter operator `{other}`"))),
        })
    }

    pub fn holds(self, l: &Value, r: &Value) -> bool {
        let ord = l.cmp(r);
        match self {
            CmpOp::Eq => ord.is_eq(),
            CmpOp::Ne => ord.is_ne(),
            CmpOp::Lt => ord.is_lt(),
            CmpOp::Le => ord.is_le(),
            CmpOp::Gt => ord.is_gt(),
            CmpOp::Ge => ord.is_ge(),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Attr(String),
    Const(Value),
}

/// A selection predicate `attr op (attr2 | constant)` over query attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    pub attr: String,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl Filter {
    pub fn attrs(&self) -> Vec<&str> {
        match &self.rhs {
            Operand::Attr(b) => vec![self.attr.as_str(), b.as_str()],
            Operand::Const(_) => vec![self.attr.as_str()],
        }
    }

    /// Evaluates the predicate against a tuple over `schema`.
    pub fn eval(&self, schema: &[String], tuple: &[Value]) -> bool {
        let pos = |a: &str| schema.iter().position(|s| s == a).expect("filter attribute in schema");
        let l = &tuple[pos(&self.attr)];
        match &self.rhs {
            Operand::Attr(b) => self.op.holds(l, &tuple[pos(b)]),
            Operand::Const(v) => self.op.holds(l, v),
        }
    }

    pub fn fits(&self, schema: &[String]) -> bool {
        self.attrs().iter().all(|a| schema.iter().any(|s| s == a))
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rhs {
            Operand::Attr(b) => write!(f, "{} {} {}", self.attr, self.op.symbol(), b),
            Operand::Const(v) => write!(f, "{} {} {}", self.attr, self.op.symbol(), v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationSource {
    File(PathBuf),
    /// Looked up by name in a [`Catalog`].
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSpec {
    pub alias: String,
    pub source: RelationSource,
    /// Positional renaming of the source columns; `None` keeps the header.
    pub attrs: Option<Vec<String>>,
    pub filters: Vec<Filter>,
}

impl RelationSpec {
    pub fn named(source: &str, alias: &str, attrs: &[&str]) -> Self {
        RelationSpec {
            alias: alias.to_string(),
            source: RelationSource::Named(source.to_string()),
            attrs: Some(attrs.iter().map(|s| s.to_string()).collect()),
            filters: Vec::new(),
        }
    }

    pub fn with_filter(mut self, filter: Filter) -> Self {
        self.filters.push(filter);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BagSpec {
    pub attrs: Vec<String>,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuerySpec {
    pub relations: Vec<RelationSpec>,
    pub project: Vec<String>,
    pub ranking: RankingFunction,
    pub limit: Option<usize>,
    pub ghd: Option<Vec<BagSpec>>,
    pub union: Vec<QuerySpec>,
    pub root: Option<String>,
}

impl QuerySpec {
    pub fn new(relations: Vec<RelationSpec>, project: &[&str], ranking: RankingFunction) -> Self {
        QuerySpec {
            relations,
            project: project.iter().map(|s| s.to_string()).collect(),
            ranking,
            limit: None,
            ghd: None,
            union: Vec::new(),
            root: None,
        }
    }

    pub fn with_root(mut self, root: &str) -> Self {
        self.root = Some(root.to_string());
        self
    }

    pub fn with_ghd(mut self, bags: Vec<BagSpec>) -> Self {
        self.ghd = Some(bags);
        self
    }

    pub fn with_limit(mut self, k: usize) -> Self {
        self.limit = Some(k);
        self
    }

    pub fn is_union(&self) -> bool {
        !self.union.is_empty()
    }

    /// The conjunctive branches of a UCQ; a plain query is its own branch.
    pub fn branches(&self) -> Vec<QuerySpec> {
        if !self.is_union() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        if !self.relations.is_empty() {
            let mut head = self.clone();
            head.union.clear();
            out.push(head);
        }
        out.extend(self.union.iter().cloned());
        out
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }

    /// Parses the JSON DSL; relative file paths resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawQuery =
            serde_json::from_str(text).map_err(|e| Error::InvalidQuery(format!("json: {e}")))?;
        raw.into_spec(base_dir, None)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    #[serde(default)]
    relations: Vec<RawRelation>,
    #[serde(default)]
    project: Option<Vec<String>>,
    #[serde(default)]
    order: Option<RawOrder>,
    #[serde(default)]
    limit: Option<usize>,
    #[serde(default)]
    ghd: Option<Vec<BagRaw>>,
    #[serde(default)]
    union: Vec<RawQuery>,
    #[serde(default)]
    root: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    name: String,
    #[serde(default)]
    file: Option<String>,
    #[serde(default, rename = "as")]
    alias: Option<String>,
    #[serde(default)]
    attrs: Option<Vec<String>>,
    #[serde(default)]
    filters: Vec<RawFilter>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    attr: String,
    op: String,
    #[serde(default)]
    value: Option<serde_json::Value>,
    #[serde(default)]
    attr2: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawOrder {
    Sum,
    Lex { attrs: Vec<RawLexAttr> },
}

#[derive(Debug, Deserialize)]
struct RawLexAttr {
    attr: String,
    #[serde(default = "asc")]
    dir: Direction,
}

fn asc() -> Direction {
    Direction::Asc
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BagRaw {
    attrs: Vec<String>,
    relations: Vec<String>,
}

impl RawFilter {
    fn into_filter(self) -> Result<Filter> {
        let op = CmpOp::parse(&self.op)?;
        let rhs = match (self.value, self.attr2) {
            (Some(v), None) => Operand::Const(match v {
                serde_json::Value::Number(n) => Value::Int(n.as_i64().ok_or_else(|| {
                    Error::InvalidQuery(format!("filter constant {n} is not an integer"))
                })?),
                serde_json::Value::String(s) => Value::str(&s),
                other => {
                    return Err(Error::InvalidQuery(format!("unsupported filter constant {other}")))
                }
            }),
            (None, Some(b)) => Operand::Attr(b),
            _ => {
                return Err(Error::InvalidQuery(format!(
                    "filter on `{}` needs exactly one of `value` or `attr2`",
                    self.attr
                )))
            }
        };
        Ok(Filter {
            attr: self.attr,
            op,
            rhs,
        })
    }
}

impl RawQuery {
    fn into_spec(self, base: &Path, parent: Option<(&[String], &RankingFunction)>) -> Result<QuerySpec> {
        let project = match (self.project, parent) {
            (Some(p), Some((pp, _))) if p != pp => {
                return Err(Error::UnionMismatch(format!(
                    "branch projects {p:?}, union projects {pp:?}"
                )))
            }
            (Some(p), _) => p,
            (None, Some((pp, _))) => pp.to_vec(),
            (None, None) => return Err(Error::InvalidQuery("missing `project`".into())),
        };
        let ranking = match (self.order, parent) {
            (Some(o), p) => {
                let rf = match o {
                    RawOrder::Sum => RankingFunction::Sum,
                    RawOrder::Lex { attrs } => {
                        RankingFunction::Lex(attrs.into_iter().map(|a| (a.attr, a.dir)).collect())
                    }
                };
                if let Some((_, prf)) = p {
                    if &rf != prf {
                        return Err(Error::UnionMismatch("branch ranking differs from union".into()));
                    }
                }
                rf
            }
            (None, Some((_, prf))) => prf.clone(),
            (None, None) => RankingFunction::Sum,
        };
        let relations = self
            .relations
            .into_iter()
            .map(|r| {
                Ok(RelationSpec {
                    alias: r.alias.unwrap_or_else(|| r.name.clone()),
                    source: match r.file {
                        Some(f) => RelationSource::File(base.join(f)),
                        None => RelationSource::Named(r.name),
                    },
                    attrs: r.attrs,
                    filters: r
                        .filters
                        .into_iter()
                        .map(RawFilter::into_filter)
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let union = self
            .union
            .into_iter()
            .map(|b| b.into_spec(base, Some((&project, &ranking))))
            .collect::<Result<Vec<_>>>()?;
        if relations.is_empty() && union.is_empty() {
            return Err(Error::InvalidQuery("query has no relations".into()));
        }
        Ok(QuerySpec {
            relations,
            project,
            ranking,
            limit: self.limit,
            ghd: self.ghd.map(|bags| {
                bags.into_iter()
                    .map(|b| BagSpec {
                        attrs: b.attrs,
                        relations: b.relations,
                    })
                    .collect()
            }),
            union,
            root: self.root,
        })
    }
}

/// Named relations available to queries; files are loaded once and shared.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    relations: HashMap<String, Arc<Relation>>,
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    pub fn insert(&mut self, rel: Relation) {
        self.relations.insert(rel.name().to_string(), Arc::new(rel));
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Relation>> {
        self.relations.get(name)
    }

    fn fetch(&mut self, source: &RelationSource) -> Result<Arc<Relation>> {
        match source {
            RelationSource::Named(n) => self
                .relations
                .get(n)
                .cloned()
                .ok_or_else(|| Error::InvalidQuery(format!("unknown relation `{n}`"))),
            RelationSource::File(p) => {
                let key = p.display().to_string();
                if let Some(r) = self.relations.get(&key) {
                    return Ok(r.clone());
                }
                let rel = Arc::new(load_csv(p, &key)?);
                self.relations.insert(key, rel.clone());
                Ok(rel)
            }
        }
    }
}

/// A conjunctive query with its relations bound to data.
///
/// Relations are renamed to query attributes and single-relation filters are
/// already applied; predicates spanning relations stay in `cross_filters`.
#[derive(Debug, Clone)]
pub struct BoundQuery {
    pub relations: Vec<Relation>,
    pub project: Vec<String>,
    pub ranking: RankingFunction,
    pub limit: Option<usize>,
    pub cross_filters: Vec<Filter>,
    pub ghd: Option<Vec<BagSpec>>,
    pub root: Option<String>,
}

impl BoundQuery {
    pub fn attr_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.relations {
            for a in r.schema() {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }

    pub fn db_size(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }
}

/// Binds one conjunctive query (not a union) to data from `catalog`.
pub fn bind(q: &QuerySpec, catalog: &mut Catalog) -> Result<BoundQuery> {
    if q.is_union() {
        return Err(Error::InvalidQuery("bind() takes a single branch; use branches()".into()));
    }
    let mut relations = Vec::with_capacity(q.relations.len());
    let mut cross_filters = Vec::new();
    let mut aliases: Vec<&str> = Vec::new();
    for spec in &q.relations {
        if aliases.contains(&spec.alias.as_str()) {
            return Err(Error::InvalidQuery(format!("duplicate relation alias `{}`", spec.alias)));
        }
        aliases.push(&spec.alias);
        let src = catalog.fetch(&spec.source)?;
        let schema = spec.attrs.clone().unwrap_or_else(|| src.schema().to_vec());
        let mut uniq = schema.clone();
        uniq.sort();
        uniq.dedup();
        if uniq.len() != schema.len() {
            return Err(Error::InvalidQuery(format!(
                "relation `{}` repeats an attribute name",
                spec.alias
            )));
        }
        let mut rel = src.renamed(&spec.alias, schema)?;
        for f in &spec.filters {
            if f.fits(rel.schema()) {
                let schema = rel.schema().to_vec();
                rel = rel.filtered(|t| f.eval(&schema, t));
            } else {
                cross_filters.push(f.clone());
            }
        }
        relations.push(rel);
    }
    let bound = BoundQuery {
        relations,
        project: q.project.clone(),
        ranking: q.ranking.clone(),
        limit: q.limit,
        cross_filters,
        ghd: q.ghd.clone(),
        root: q.root.clone(),
    };
    let names = bound.attr_names();
    for a in &bound.project {
        if !names.contains(a) {
            return Err(Error::InvalidQuery(format!("projection attribute `{a}` is in no relation")));
        }
    }
    let mut dedup = bound.project.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != bound.project.len() {
        return Err(Error::InvalidQuery("projection repeats an attribute".into()));
    }
    if bound.project.is_empty() {
        return Err(Error::InvalidQuery("empty projection".into()));
    }
    for f in &bound.cross_filters {
        for a in f.attrs() {
            if !names.iter().any(|n| n == a) {
                return Err(Error::InvalidQuery(format!("filter `{f}` names unknown attribute `{a}`")));
            }
        }
    }
    bound.ranking.validate(&bound.project)?;
    if let Some(root) = &bound.root {
        if !bound.relations.iter().any(|r| r.name() == root) {
            return Err(Error::InvalidRoot(root.clone()));
        }
    }
    Ok(bound)
}
