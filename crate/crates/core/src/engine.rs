//! From a bound query to a ranked stream.

use std::str::FromStr;
use std::sync::Arc;

use crate::acyclic::{is_free_connex, OrderSpec, RankedStream};
use crate::composite::{materialize_ghd, UcqSession};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::join_tree::{JoinTree, QuerySchema, RelSchema};
use crate::lexi::LexiStream;
use crate::query::{bind, BoundQuery, Catalog, QuerySpec};
use crate::ranking::OutputTuple;
use crate::reduce::{build_indexes, full_reduce, prune_projection_free_leaves, ReducedInstance};
use crate::star::{StarConfig, StarSession};
use crate::stream::{Counters, Enumerator};
use crate::weights::WeightMap;

pub type Stream = Box<dyn Enumerator + Send>;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Mode {
    /// Priority-queue forest over the join tree; any ranking.
    #[default]
    Acyclic,
    /// Queue-free enumeration; lexicographic rankings only.
    Lexi,
    /// Heavy/light split for star queries.
    Star { epsilon: f64 },
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acyclic" => Ok(Mode::Acyclic),
            "lexi" => Ok(Mode::Lexi),
            "star" => Ok(Mode::Star { epsilon: 0.0 }),
            other => Err(Error::InvalidParams(format!("unknown mode `{other}`"))),
        }
    }
}

/// Reduced, indexed instance and the tree the engines walk.
pub struct Prepared {
    pub tree: JoinTree,
    pub inst: Arc<ReducedInstance>,
    /// Whether the query was turned into a full query over the projection.
    pub rewritten: bool,
}

pub fn schema_of(q: &BoundQuery) -> Result<Arc<QuerySchema>> {
    let rels: Vec<(String, Vec<String>)> = q
        .relations
        .iter()
        .map(|r| (r.name().to_string(), r.schema().to_vec()))
        .collect();
    Ok(Arc::new(QuerySchema::new(&rels, &q.project)?))
}

pub fn encode(q: &BoundQuery, wm: &WeightMap) -> Result<Instance> {
    Instance::encode(schema_of(q)?, &q.relations, wm)
}

/// Full reduction, then normalization: free-connex queries become the full
/// join of their relations projected onto the output attributes; other
/// queries lose the leaves that project nothing.
pub fn prepare_acyclic(inst: Instance, root: Option<&str>) -> Result<Prepared> {
    let schema = inst.schema.clone();
    let jt = JoinTree::build(schema.clone(), root)?;
    let reduced = full_reduce(inst, &jt);
    if !schema.is_full() && is_free_connex(&schema) {
        if let Some(p) = project_to_output(&reduced, root)? {
            return Ok(p);
        }
    }
    let tree = prune_projection_free_leaves(&jt, &reduced);
    let inst = Arc::new(build_indexes(reduced, &tree));
    Ok(Prepared {
        tree,
        inst,
        rewritten: false,
    })
}

/// On a reduced free-connex instance, the join of every relation projected
/// onto the output attributes equals the projected query.
fn project_to_output(reduced: &ReducedInstance, root: Option<&str>) -> Result<Option<Prepared>> {
    let schema = &reduced.schema;
    let mut rels = Vec::new();
    let mut data = Vec::new();
    for (rs, rel) in schema.relations.iter().zip(&reduced.relations) {
        let keep: Vec<usize> = rs.attrs.iter().copied().filter(|a| schema.is_projected(*a)).collect();
        if keep.is_empty() {
            continue;
        }
        data.push(rel.project(&keep));
        rels.push(RelSchema {
            name: rs.name.clone(),
            attrs: keep,
        });
    }
    let root = root.filter(|r| rels.iter().any(|x| x.name == *r));
    let projected = Arc::new(QuerySchema {
        attrs: schema.attrs.clone(),
        relations: rels,
        projection: schema.projection.clone(),
    });
    let tree = match JoinTree::build(projected.clone(), root) {
        Ok(t) => t,
        Err(Error::Cyclic(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let inst = Instance {
        schema: projected,
        domains: reduced.domains.clone(),
        relations: data,
    };
    let reduced = full_reduce(inst, &tree);
    let inst = Arc::new(build_indexes(reduced, &tree));
    Ok(Some(Prepared {
        tree,
        inst,
        rewritten: true,
    }))
}

/// Opens one conjunctive query. The query's limit is not applied here.
pub fn open_bound(q: &BoundQuery, wm: &WeightMap, mode: Mode) -> Result<Stream> {
    if q.ghd.is_some() {
        let plan = materialize_ghd(q)?;
        return open_bound(&plan.query, wm, mode);
    }
    if let Some(f) = q.cross_filters.first() {
        return Err(Error::FilterPlacement(f.to_string()));
    }
    let inst = encode(q, wm)?;
    match mode {
        Mode::Star { epsilon } => Ok(Box::new(StarSession::new(inst, StarConfig::new(epsilon)?, &q.ranking)?)),
        Mode::Acyclic => {
            let p = prepare_acyclic(inst, q.root.as_deref())?;
            let order = OrderSpec::for_projection(&p.inst.schema, &q.ranking)?;
            Ok(Box::new(RankedStream::new(p.inst.clone(), &p.tree, order)))
        }
        Mode::Lexi => {
            let p = prepare_acyclic(inst, q.root.as_deref())?;
            Ok(Box::new(LexiStream::new(p.inst.clone(), &p.tree, &q.ranking)?))
        }
    }
}

/// Opens a query or a union of queries and applies its limit.
pub fn open(spec: &QuerySpec, catalog: &mut Catalog, wm: &WeightMap, mode: Mode) -> Result<Stream> {
    let stream: Stream = if spec.is_union() {
        let mut streams = Vec::new();
        let mut projections = Vec::new();
        for b in spec.branches() {
            let bound = bind(&b, catalog)?;
            projections.push(bound.project.clone());
            streams.push(open_bound(&bound, wm, mode)?);
        }
        Box::new(UcqSession::new(streams, &projections, &spec.ranking)?)
    } else {
        open_bound(&bind(spec, catalog)?, wm, mode)?
    };
    Ok(match spec.limit {
        Some(k) => Box::new(Limited { inner: stream, left: k }),
        None => stream,
    })
}

/// Stops a stream after a fixed number of answers.
pub struct Limited<E> {
    pub inner: E,
    pub left: usize,
}

impl<E: Enumerator> Enumerator for Limited<E> {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        self.inner.next_answer()
    }

    fn counters(&self) -> Counters {
        self.inner.counters()
    }
}
