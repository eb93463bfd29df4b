//! Ground truth: materialize the full join, project, deduplicate, sort.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::query::{bind, BoundQuery, Catalog, Filter, QuerySpec};
use crate::ranking::{rank_of, OutputOrder, OutputTuple};
use crate::relation::{Relation, Value};
use crate::weights::WeightMap;

/// Largest intermediate join the oracle agrees to build.
pub const ORACLE_LIMIT: usize = 10_000_000;

/// Full join of `rels` (natural join on attribute names) with `filters`
/// applied as soon as their attributes are bound. Returns the attribute list
/// and the joined rows.
pub fn full_join(rels: &[Relation], filters: &[Filter]) -> Result<(Vec<String>, Vec<Vec<Value>>)> {
    let mut attrs: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<Value>> = vec![Vec::new()];
    let mut used = vec![false; rels.len()];
    let mut pending: Vec<&Filter> = filters.iter().collect();
    for _ in 0..rels.len() {
        // prefer a relation connected to what is already bound
        let pick = (0..rels.len())
            .filter(|&i| !used[i])
            .max_by_key(|&i| rels[i].schema().iter().filter(|a| attrs.contains(a)).count())
            .unwrap();
        used[pick] = true;
        let rel = &rels[pick];
        let shared: Vec<(usize, usize)> = rel
            .schema()
            .iter()
            .enumerate()
            .filter_map(|(j, a)| attrs.iter().position(|b| b == a).map(|i| (i, j)))
            .collect();
        let fresh: Vec<usize> = (0..rel.schema().len())
            .filter(|j| !shared.iter().any(|&(_, s)| s == *j))
            .collect();
        let mut table: HashMap<Vec<&Value>, Vec<&Vec<Value>>> = HashMap::new();
        for t in rel.tuples() {
            table.entry(shared.iter().map(|&(_, j)| &t[j]).collect()).or_default().push(t);
        }
        let mut next = Vec::new();
        for r in &rows {
            let key: Vec<&Value> = shared.iter().map(|&(i, _)| &r[i]).collect();
            if let Some(ts) = table.get(&key) {
                for t in ts {
                    let mut out = r.clone();
                    out.extend(fresh.iter().map(|&j| t[j].clone()));
                    next.push(out);
                    if next.len() > ORACLE_LIMIT {
                        return Err(Error::OracleGuard { limit: ORACLE_LIMIT });
                    }
                }
            }
        }
        attrs.extend(fresh.iter().map(|&j| rel.schema()[j].clone()));
        let (ready, later): (Vec<&Filter>, Vec<&Filter>) = pending.into_iter().partition(|f| f.fits(&attrs));
        pending = later;
        if !ready.is_empty() {
            next.retain(|r| ready.iter().all(|f| f.eval(&attrs, r)));
        }
        rows = next;
    }
    if let Some(f) = pending.first() {
        return Err(Error::InvalidQuery(format!("filter `{f}` names an unknown attribute")));
    }
    Ok((attrs, rows))
}

/// Distinct answers of `q` sorted by its ranking function.
pub fn oracle_enumerate(q: &BoundQuery, wm: &WeightMap) -> Result<Vec<OutputTuple>> {
    let (attrs, rows) = full_join(&q.relations, &q.cross_filters)?;
    let pos: Vec<usize> = q
        .project
        .iter()
        .map(|a| {
            attrs
                .iter()
                .position(|b| b == a)
                .ok_or_else(|| Error::InvalidQuery(format!("projection attribute `{a}` is in no relation")))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<Value>> = rows.iter().map(|r| pos.iter().map(|&p| r[p].clone()).collect()).collect();
    out.sort_unstable();
    out.dedup();
    Ok(sort_answers(out, &q.project, &q.ranking, wm))
}

/// Ranks and sorts distinct projected tuples.
pub fn sort_answers(
    tuples: Vec<Vec<Value>>,
    project: &[String],
    rf: &crate::ranking::RankingFunction,
    wm: &WeightMap,
) -> Vec<OutputTuple> {
    let order = OutputOrder::new(project, rf).expect("ranking validated at bind time");
    let mut ranked: Vec<OutputTuple> = tuples
        .into_iter()
        .map(|values| OutputTuple {
            rank: rank_of(&values, project, wm),
            values,
        })
        .collect();
    ranked.sort_by(|a, b| order.compare_ranked(a, b));
    ranked
}

/// Sorted distinct union of several branches' answers.
pub fn oracle_union(branches: &[BoundQuery], wm: &WeightMap) -> Result<Vec<OutputTuple>> {
    let first = branches
        .first()
        .ok_or_else(|| Error::InvalidQuery("union without branches".into()))?;
    let mut all: Vec<Vec<Value>> = Vec::new();
    for b in branches {
        all.extend(oracle_enumerate(b, wm)?.into_iter().map(|t| t.values));
    }
    all.sort_unstable();
    all.dedup();
    Ok(sort_answers(all, &first.project, &first.ranking, wm))
}

/// Index of the first answer where `got` and `want` disagree, comparing
/// values exactly and ranks to a relative 1e-9. Equal sequences give `None`.
pub fn first_mismatch(got: &[OutputTuple], want: &[OutputTuple]) -> Option<usize> {
    let pos = got.iter().zip(want).position(|(g, w)| {
        g.values != w.values || (g.rank - w.rank).abs() > 1e-9 * w.rank.abs().max(1.0)
    });
    match pos {
        Some(i) => Some(i),
        None if got.len() != want.len() => Some(got.len().min(want.len())),
        None => None,
    }
}

/// Oracle answers for a query or a union; the query's limit is not applied.
pub fn oracle_spec(spec: &QuerySpec, catalog: &mut Catalog, wm: &WeightMap) -> Result<Vec<OutputTuple>> {
    let branches = spec
        .branches()
        .iter()
        .map(|b| bind(b, catalog))
        .collect::<Result<Vec<_>>>()?;
    if spec.is_union() {
        oracle_union(&branches, wm)
    } else {
        oracle_enumerate(&branches[0], wm)
    }
}
