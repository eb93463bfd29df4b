//! Cyclic queries through user-supplied decompositions, and unions.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::heap;
use crate::join_tree::gyo_links;
use crate::query::{BagSpec, BoundQuery, Filter};
use crate::ranking::{OutputOrder, OutputTuple, RankingFunction};
use crate::relation::{Relation, Tuple, Value};
use crate::stream::{Counters, Enumerator};

/// The acyclic query over materialized bags, plus bag cardinalities.
#[derive(Debug, Clone)]
pub struct GhdPlan {
    pub query: BoundQuery,
    pub bag_sizes: Vec<usize>,
}

/// Checks that every relation fits in some bag, every bag is covered by its
/// listed relations, and the bags form an acyclic hypergraph (so a tree with
/// the running-intersection property exists).
pub fn validate_ghd(q: &BoundQuery, bags: &[BagSpec]) -> Result<()> {
    if bags.is_empty() {
        return Err(Error::InvalidGhd("no bags".into()));
    }
    for (i, bag) in bags.iter().enumerate() {
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        for name in &bag.relations {
            let rel = q
                .relations
                .iter()
                .find(|r| r.name() == name)
                .ok_or_else(|| Error::InvalidGhd(format!("bag {i} names unknown relation `{name}`")))?;
            covered.extend(rel.schema().iter().map(String::as_str));
        }
        if let Some(a) = bag.attrs.iter().find(|a| !covered.contains(a.as_str())) {
            return Err(Error::InvalidGhd(format!("bag {i} attribute `{a}` is not covered by its relations")));
        }
    }
    for r in &q.relations {
        if !bags.iter().any(|b| r.schema().iter().all(|a| b.attrs.contains(a))) {
            return Err(Error::InvalidGhd(format!("relation `{}` fits in no bag", r.name())));
        }
    }
    let names: Vec<&String> = {
        let mut v: Vec<&String> = bags.iter().flat_map(|b| &b.attrs).collect();
        v.sort();
        v.dedup();
        v
    };
    let edges: Vec<BTreeSet<usize>> = bags
        .iter()
        .map(|b| b.attrs.iter().map(|a| names.binary_search(&a).unwrap()).collect())
        .collect();
    if gyo_links(&edges).is_none() {
        return Err(Error::InvalidGhd("bags violate running intersection".into()));
    }
    Ok(())
}

/// Natural join of two relations (hash join on shared attributes).
fn join(left: &Relation, right: &Relation, name: &str) -> Result<Relation> {
    let shared: Vec<(usize, usize)> = left
        .schema()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| right.position(a).map(|j| (i, j)))
        .collect();
    let extra: Vec<usize> = (0..right.schema().len())
        .filter(|j| !shared.iter().any(|&(_, s)| s == *j))
        .collect();
    let mut table: HashMap<Vec<&Value>, Vec<&Tuple>> = HashMap::new();
    for t in right.tuples() {
        table.entry(shared.iter().map(|&(_, j)| &t[j]).collect()).or_default().push(t);
    }
    let mut rows = Vec::new();
    for l in left.tuples() {
        let key: Vec<&Value> = shared.iter().map(|&(i, _)| &l[i]).collect();
        for r in table.get(&key).into_iter().flatten() {
            let mut t = l.clone();
            t.extend(extra.iter().map(|&j| r[j].clone()));
            rows.push(t);
        }
    }
    let mut schema = left.schema().to_vec();
    schema.extend(extra.iter().map(|&j| right.schema()[j].clone()));
    Relation::new(name, schema, rows)
}

fn project(rel: &Relation, attrs: &[String], name: &str) -> Result<Relation> {
    let pos: Vec<usize> = attrs.iter().map(|a| rel.position(a).unwrap()).collect();
    let rows = rel.tuples().iter().map(|t| pos.iter().map(|&p| t[p].clone()).collect()).collect();
    Relation::new(name, attrs.to_vec(), rows)
}

fn semi_join(target: &Relation, source: &Relation) -> Relation {
    let shared: Vec<(usize, usize)> = target
        .schema()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| source.position(a).map(|j| (i, j)))
        .collect();
    let keys: std::collections::HashSet<Vec<&Value>> = source
        .tuples()
        .iter()
        .map(|t| shared.iter().map(|&(_, j)| &t[j]).collect())
        .collect();
    target.filtered(|t| keys.contains(&shared.iter().map(|&(i, _)| &t[i]).collect::<Vec<_>>()))
}

/// Materializes each bag: joins its covering relations, projects to the
/// bag's attributes, semi-joins every other relation contained in the bag
/// and applies the cross-relation filters that fit. The result is an
/// acyclic query over bag relations named `bag0`, `bag1`, ...
pub fn materialize_ghd(q: &BoundQuery) -> Result<GhdPlan> {
    let bags = q
        .ghd
        .as_ref()
        .ok_or_else(|| Error::InvalidGhd("query has no decomposition".into()))?;
    validate_ghd(q, bags)?;
    let mut placed = vec![false; q.cross_filters.len()];
    let mut out = Vec::with_capacity(bags.len());
    for (i, bag) in bags.iter().enumerate() {
        let name = format!("bag{i}");
        let find = |n: &str| q.relations.iter().find(|r| r.name() == n).unwrap();
        let mut acc = find(&bag.relations[0]).clone();
        for n in &bag.relations[1..] {
            acc = join(&acc, find(n), &name)?;
        }
        let mut rel = project(&acc, &bag.attrs, &name)?;
        for r in &q.relations {
            if !bag.relations.contains(&r.name().to_string()) && r.schema().iter().all(|a| bag.attrs.contains(a)) {
                rel = semi_join(&rel, r);
            }
        }
        let schema = rel.schema().to_vec();
        let fitting: Vec<&Filter> = q
            .cross_filters
            .iter()
            .enumerate()
            .filter(|(_, f)| f.fits(&schema))
            .map(|(j, f)| {
                placed[j] = true;
                f
            })
            .collect();
        if !fitting.is_empty() {
            rel = rel.filtered(|t| fitting.iter().all(|f| f.eval(&schema, t)));
        }
        out.push(rel);
    }
    if let Some(j) = placed.iter().position(|p| !p) {
        return Err(Error::FilterPlacement(q.cross_filters[j].to_string()));
    }
    Ok(GhdPlan {
        bag_sizes: out.iter().map(Relation::len).collect(),
        query: BoundQuery {
            relations: out,
            project: q.project.clone(),
            ranking: q.ranking.clone(),
            limit: q.limit,
            cross_filters: Vec::new(),
            ghd: None,
            root: None,
        },
    })
}

type Branch = Box<dyn Enumerator + Send>;

/// Deduplicating merge of ranked branch streams.
pub struct UcqSession {
    branches: Vec<Branch>,
    order: OutputOrder,
    queue: Vec<(OutputTuple, usize)>,
    last: Option<OutputTuple>,
    counters: Counters,
}

impl UcqSession {
    /// `projections[i]` is branch `i`'s ordered projection; all must agree.
    pub fn new(branches: Vec<Branch>, projections: &[Vec<String>], rf: &RankingFunction) -> Result<Self> {
        let first = projections
            .first()
            .ok_or_else(|| Error::UnionMismatch("union without branches".into()))?;
        if projections.len() != branches.len() || projections.iter().any(|p| p != first) {
            return Err(Error::UnionMismatch("branches project different attribute lists".into()));
        }
        let mut s = UcqSession {
            branches,
            order: OutputOrder::new(first, rf)?,
            queue: Vec::new(),
            last: None,
            counters: Counters::default(),
        };
        for i in 0..s.branches.len() {
            s.refill(i);
        }
        Ok(s)
    }

    fn cmp(order: &OutputOrder) -> impl FnMut(&(OutputTuple, usize), &(OutputTuple, usize)) -> Ordering + '_ {
        move |a, b| order.compare_ranked(&a.0, &b.0)
    }

    fn refill(&mut self, branch: usize) {
        if let Some(t) = self.branches[branch].next_answer() {
            self.counters.pq_push += 1;
            heap::push(&mut self.queue, (t, branch), &mut Self::cmp(&self.order));
        }
    }
}

impl Enumerator for UcqSession {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        loop {
            let (t, b) = heap::pop(&mut self.queue, &mut Self::cmp(&self.order))?;
            self.counters.pq_pop += 1;
            self.refill(b);
            if self.last.as_ref() == Some(&t) {
                continue;
            }
            self.last = Some(t.clone());
            self.counters.emitted += 1;
            return Some(t);
        }
    }

    fn counters(&self) -> Counters {
        let mut c = self.counters;
        for b in &self.branches {
            let bc = b.counters();
            c.add(&Counters { emitted: 0, ..bc });
        }
        c
    }
}
