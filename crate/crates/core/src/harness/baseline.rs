//! Zero-weight baseline: enumerate the full join ranked by the projection's
//! weights only, and report a projected answer once the full answers move
//! past it.
//!
//! Correct, but every full answer that shares a projection is walked before
//! the projection is reported; [`adversarial_star_instance`] makes that cost
//! `N^(ℓ-1)` before the first answer.

use std::sync::Arc;

use crate::acyclic::{OrderSpec, RankedStream};
use crate::engine::encode;
use crate::error::{Error, Result};
use crate::join_tree::JoinTree;
use crate::query::BoundQuery;
use crate::ranking::OutputTuple;
use crate::reduce::{build_indexes, full_reduce};
use crate::relation::Relation;
use crate::stream::{Counters, Enumerator};
use crate::weights::WeightMap;

pub struct BaselineStream {
    inner: RankedStream,
    width: usize,
    pending: Option<(Vec<u32>, f64)>,
    internal: u64,
}

impl BaselineStream {
    pub fn new(q: &BoundQuery, wm: &WeightMap) -> Result<Self> {
        if !q.cross_filters.is_empty() || q.ghd.is_some() {
            return Err(Error::InvalidParams("baseline supports plain acyclic queries only".into()));
        }
        let inst = encode(q, wm)?;
        let schema = inst.schema.clone();
        let jt = JoinTree::build(schema.clone(), q.root.as_deref())?;
        let reduced = Arc::new(build_indexes(full_reduce(inst, &jt), &jt));
        let order = OrderSpec::full_with_zero_weights(&schema, &q.ranking)?;
        Ok(BaselineStream {
            inner: RankedStream::new(reduced, &jt, order),
            width: schema.projection.len(),
            pending: None,
            internal: 0,
        })
    }

    /// Full-join answers pulled so far.
    pub fn internal_emissions(&self) -> u64 {
        self.internal
    }

    fn finish(&self, codes: Vec<u32>, rank: f64) -> OutputTuple {
        let mut values = self.inner.decode(&codes);
        values.truncate(self.width);
        OutputTuple { values, rank }
    }
}

impl Enumerator for BaselineStream {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        loop {
            match self.inner.next_encoded() {
                Some((codes, rank)) => {
                    self.internal += 1;
                    let proj = codes[..self.width].to_vec();
                    match self.pending.take() {
                        None => self.pending = Some((proj, rank)),
                        Some((prev, prev_rank)) if prev != proj => {
                            self.pending = Some((proj, rank));
                            return Some(self.finish(prev, prev_rank));
                        }
                        Some(same) => self.pending = Some(same),
                    }
                }
                None => {
                    let (codes, rank) = self.pending.take()?;
                    return Some(self.finish(codes, rank));
                }
            }
        }
    }

    fn counters(&self) -> Counters {
        self.inner.counters()
    }
}

/// `ℓ` relations `Ri(Xi, Y)`, each pairing `N` values of `Xi` with one `Y`.
/// The full join has `N^ℓ` rows; projecting onto `X1` leaves `N`.
pub fn adversarial_star_instance(n: usize, l: usize) -> Result<Vec<Relation>> {
    if n == 0 || l < 2 {
        return Err(Error::InvalidParams("need N >= 1 and ℓ >= 2".into()));
    }
    (1..=l)
        .map(|i| {
            let rows: Vec<Vec<i64>> = (1..=n as i64).map(|x| vec![x, 0]).collect();
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            let x = format!("X{i}");
            Ok(Relation::from_ints(&format!("R{i}"), &[x.as_str(), "Y"], &refs))
        })
        .collect()
}
