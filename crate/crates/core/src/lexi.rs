//! Lexicographic enumeration without priority queues.
//!
//! Attributes are fixed one at a time in the requested order. Fixing a value
//! restricts the relations that hold the attribute, and a semi-join sweep
//! over the join tree restores global consistency, so every candidate for
//! the next attribute extends to at least one answer. The recursion is kept
//! on an explicit stack so the stream can be pulled one answer at a time.

use std::sync::Arc;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::instance::Key;
use crate::join_tree::{AttrId, JoinTree};
use crate::ranking::{Direction, OutputTuple, RankingFunction};
use crate::reduce::ReducedInstance;
use crate::relation::Value;
use crate::stream::{Counters, Enumerator};

#[derive(Debug, Clone)]
enum Alive {
    All,
    Rows(Arc<[u32]>),
}

struct LNode {
    rel: usize,
    children: Vec<usize>,
    /// Attributes shared with the parent, ascending.
    anchor: Vec<AttrId>,
}

struct Frame {
    alive: Vec<Alive>,
    cands: Vec<u32>,
    cursor: usize,
}

pub struct LexiStream {
    inst: Arc<ReducedInstance>,
    nodes: Vec<LNode>,
    pre: Vec<usize>,
    post: Vec<usize>,
    /// Attributes in comparison order with their directions.
    levels: Vec<(AttrId, Direction)>,
    /// For each level, the output position of its attribute.
    out_pos: Vec<usize>,
    /// For each level, the tree nodes holding its attribute.
    holders: Vec<Vec<usize>>,
    projection: Vec<AttrId>,
    stack: Vec<Frame>,
    prefix: Vec<u32>,
    started: bool,
    counters: Counters,
}

impl LexiStream {
    /// `inst` must be reduced with respect to `jt`, with indexes built by
    /// [`crate::reduce::build_indexes`].
    pub fn new(inst: Arc<ReducedInstance>, jt: &JoinTree, rf: &RankingFunction) -> Result<Self> {
        let schema = inst.schema.clone();
        let names: Vec<String> = schema.projection.iter().map(|&a| schema.attrs[a].clone()).collect();
        if !rf.is_lex() {
            return Err(Error::InvalidParams("lexicographic mode needs a lex ranking".into()));
        }
        let keys = rf.sort_keys(&names)?;
        let levels: Vec<(AttrId, Direction)> = keys.iter().map(|&(p, d)| (schema.projection[p], d)).collect();
        let nodes: Vec<LNode> = jt
            .nodes()
            .iter()
            .map(|n| {
                let mut anchor = n.anchor.clone();
                anchor.sort_unstable();
                LNode {
                    rel: n.rel,
                    children: n.children.clone(),
                    anchor,
                }
            })
            .collect();
        let holders = levels
            .iter()
            .map(|&(a, _)| (0..nodes.len()).filter(|&i| inst.relations[nodes[i].rel].attrs.contains(&a)).collect())
            .collect();
        let post = jt.post_order();
        let pre = post.iter().rev().copied().collect();
        Ok(LexiStream {
            out_pos: keys.iter().map(|&(p, _)| p).collect(),
            projection: schema.projection.clone(),
            inst,
            nodes,
            pre,
            post,
            levels,
            holders,
            stack: Vec::new(),
            prefix: Vec::new(),
            started: false,
            counters: Counters::default(),
        })
    }

    fn rel_len(&self, node: usize) -> usize {
        self.inst.relations[self.nodes[node].rel].len()
    }

    fn count(&self, node: usize, alive: &Alive) -> usize {
        match alive {
            Alive::All => self.rel_len(node),
            Alive::Rows(r) => r.len(),
        }
    }

    /// Values of level `level`'s attribute that survive in `alive`, in
    /// emission order.
    fn candidates(&mut self, level: usize, alive: &[Alive]) -> Vec<u32> {
        let (attr, dir) = self.levels[level];
        let h = *self.holders[level]
            .iter()
            .min_by_key(|&&h| self.count(h, &alive[h]))
            .expect("attribute held by no node");
        let mut out: Vec<u32> = match &alive[h] {
            Alive::All => self.inst.sorted_domain(attr).to_vec(),
            Alive::Rows(rows) => {
                let rel = &self.inst.relations[self.nodes[h].rel];
                let col = rel.position(attr).unwrap();
                let mut v: Vec<u32> = rows.iter().map(|&r| rel.row(r as usize)[col]).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        self.counters.ops += out.len() as u64;
        if dir == Direction::Desc {
            out.reverse();
        }
        out
    }

    /// `alive[target] ⋉ alive[source]` on `on`; returns whether target shrank.
    fn semi_join(&mut self, alive: &mut [Alive], target: usize, source: usize, on: &[AttrId]) -> bool {
        let src_rel = &self.inst.relations[self.nodes[source].rel];
        let spos = src_rel.positions(on);
        let keys: FxHashSet<Key> = match &alive[source] {
            Alive::All => (0..src_rel.len()).map(|r| src_rel.key(r, &spos)).collect(),
            Alive::Rows(rows) => rows.iter().map(|&r| src_rel.key(r as usize, &spos)).collect(),
        };
        let trel_id = self.nodes[target].rel;
        let trel = &self.inst.relations[trel_id];
        let before = self.count(target, &alive[target]);
        let mut ops = keys.len() as u64;
        let kept: Vec<u32> = match &alive[target] {
            Alive::All => {
                let idx = self.inst.index(trel_id, on);
                let mut v: Vec<u32> = Vec::new();
                for k in &keys {
                    v.extend_from_slice(idx.rows_for(k));
                }
                v.sort_unstable();
                ops += v.len() as u64;
                v
            }
            Alive::Rows(rows) => {
                let tpos = trel.positions(on);
                ops += rows.len() as u64;
                rows.iter()
                    .copied()
                    .filter(|&r| keys.contains(&trel.key(r as usize, &tpos)))
                    .collect()
            }
        };
        self.counters.ops += ops;
        let shrank = kept.len() < before;
        if shrank {
            alive[target] = Alive::Rows(kept.into());
        }
        shrank
    }

    /// Fixes level `level` to `value` and restores consistency.
    fn restrict(&mut self, base: &[Alive], level: usize, value: u32) -> Vec<Alive> {
        let mut alive = base.to_vec();
        let mut changed = vec![false; self.nodes.len()];
        let attr = self.levels[level].0;
        for &h in &self.holders[level].clone() {
            let rel_id = self.nodes[h].rel;
            let rel = &self.inst.relations[rel_id];
            let rows: Vec<u32> = match &alive[h] {
                Alive::All => self.inst.index(rel_id, &[attr]).rows_for(&[value]).to_vec(),
                Alive::Rows(rows) => {
                    let col = rel.position(attr).unwrap();
                    self.counters.ops += rows.len() as u64;
                    rows.iter().copied().filter(|&r| rel.row(r as usize)[col] == value).collect()
                }
            };
            self.counters.ops += rows.len() as u64;
            if rows.len() < self.count(h, &alive[h]) {
                alive[h] = Alive::Rows(rows.into());
                changed[h] = true;
            }
        }
        for u in self.post.clone() {
            for c in self.nodes[u].children.clone() {
                if changed[c] {
                    let on = self.nodes[c].anchor.clone();
                    if self.semi_join(&mut alive, u, c, &on) {
                        changed[u] = true;
                    }
                }
            }
        }
        for u in self.pre.clone() {
            if !changed[u] {
                continue;
            }
            for c in self.nodes[u].children.clone() {
                let on = self.nodes[c].anchor.clone();
                if self.semi_join(&mut alive, c, u, &on) {
                    changed[c] = true;
                }
            }
        }
        alive
    }

    fn emit(&mut self, last: u32) -> OutputTuple {
        let mut codes = vec![0u32; self.levels.len()];
        for (lvl, &c) in self.prefix.iter().chain(std::iter::once(&last)).enumerate() {
            codes[self.out_pos[lvl]] = c;
        }
        let values: Vec<Value> = codes
            .iter()
            .zip(&self.projection)
            .map(|(&c, &a)| self.inst.value(a, c).clone())
            .collect();
        let rank = codes
            .iter()
            .zip(&self.projection)
            .fold(0.0, |acc, (&c, &a)| acc + self.inst.domains[a].weights[c as usize]);
        self.counters.emitted += 1;
        OutputTuple { values, rank }
    }
}

impl Enumerator for LexiStream {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        if !self.started {
            self.started = true;
            let alive = vec![Alive::All; self.nodes.len()];
            let cands = if self.levels.is_empty() || (0..self.nodes.len()).any(|n| self.rel_len(n) == 0) {
                Vec::new()
            } else {
                self.candidates(0, &alive)
            };
            self.stack.push(Frame {
                alive,
                cands,
                cursor: 0,
            });
        }
        let m = self.levels.len();
        loop {
            let depth = self.stack.len().checked_sub(1)?;
            let frame = self.stack.last_mut().unwrap();
            if frame.cursor == frame.cands.len() {
                self.stack.pop();
                if self.stack.is_empty() {
                    return None;
                }
                self.prefix.pop();
                continue;
            }
            let value = frame.cands[frame.cursor];
            frame.cursor += 1;
            if depth + 1 == m {
                return Some(self.emit(value));
            }
            let base = self.stack.last().unwrap().alive.clone();
            let alive = self.restrict(&base, depth, value);
            let cands = self.candidates(depth + 1, &alive);
            self.prefix.push(value);
            self.stack.push(Frame {
                alive,
                cands,
                cursor: 0,
            });
        }
    }

    fn counters(&self) -> Counters {
        self.counters
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::join_tree::tests::{four_path, schema};
    use crate::reduce::tests::running_example;
    use crate::reduce::{build_indexes, full_reduce};
    use crate::relation::Relation;
    use crate::stream::drain;
    use crate::weights::WeightMap;

    fn lexi(rels: &[Relation], s: Arc<crate::join_tree::QuerySchema>, rf: &RankingFunction) -> LexiStream {
        let jt = JoinTree::build(s.clone(), None).unwrap();
        let inst = Instance::encode(s, rels, &WeightMap::identity()).unwrap();
        let red = Arc::new(build_indexes(full_reduce(inst, &jt), &jt));
        LexiStream::new(red, &jt, rf).unwrap()
    }

    fn ints(ts: &[OutputTuple]) -> Vec<Vec<i64>> {
        ts.iter().map(|t| t.values.iter().map(|v| v.as_int().unwrap()).collect()).collect()
    }

    #[test]
    fn ascending_drain() {
        let mut s = lexi(&running_example(), four_path(), &RankingFunction::lex_asc(&["A", "E"]));
        let out = drain(&mut s, None);
        assert_eq!(ints(&out), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2], vec![3, 1], vec![3, 2]]);
        assert_eq!(out[0].rank, 2.0);
        assert_eq!(s.counters().pq_ops(), 0);
    }

    #[test]
    fn mixed_directions() {
        let rf = RankingFunction::Lex(vec![("A".into(), Direction::Asc), ("E".into(), Direction::Desc)]);
        let mut s = lexi(&running_example(), four_path(), &rf);
        assert_eq!(
            ints(&drain(&mut s, None)),
            vec![vec![1, 2], vec![1, 1], vec![2, 2], vec![2, 1], vec![3, 2], vec![3, 1]]
        );
    }

    #[test]
    fn attribute_order_follows_ranking_not_projection() {
        let rf = RankingFunction::Lex(vec![("E".into(), Direction::Desc), ("A".into(), Direction::Asc)]);
        let mut s = lexi(&running_example(), four_path(), &rf);
        assert_eq!(
            ints(&drain(&mut s, None)),
            vec![vec![1, 2], vec![2, 2], vec![3, 2], vec![1, 1], vec![2, 1], vec![3, 1]]
        );
    }

    #[test]
    fn candidates_after_fixing_a() {
        let mut s = lexi(&running_example(), four_path(), &RankingFunction::lex_asc(&["A", "E"]));
        let alive = vec![Alive::All; s.nodes.len()];
        let a = s.inst.schema.attr_id("A").unwrap();
        let e = s.inst.schema.attr_id("E").unwrap();
        for v in [1, 3] {
            let code = s.inst.domains[a].code(&Value::Int(v)).unwrap();
            let restricted = s.restrict(&alive, 0, code);
            let cands: Vec<i64> = s
                .candidates(1, &restricted)
                .iter()
                .map(|&c| s.inst.value(e, c).as_int().unwrap())
                .collect();
            assert_eq!(cands, [1, 2]);
        }
    }

    #[test]
    fn empty_instance() {
        let s = schema(&[("R1", &["A", "B"]), ("R2", &["B", "C"])], &["A", "C"]);
        let rels = [
            Relation::from_ints("R1", &["A", "B"], &[&[1, 1]]),
            Relation::from_ints("R2", &["B", "C"], &[]),
        ];
        let mut st = lexi(&rels, s, &RankingFunction::lex_asc(&["A", "C"]));
        assert!(st.next_answer().is_none());
        assert!(st.next_answer().is_none());
    }

    #[test]
    fn sum_ranking_rejected() {
        let s = four_path();
        let jt = JoinTree::build(s.clone(), None).unwrap();
        let inst = Instance::encode(s, &running_example(), &WeightMap::identity()).unwrap();
        let red = Arc::new(build_indexes(full_reduce(inst, &jt), &jt));
        assert!(LexiStream::new(red, &jt, &RankingFunction::Sum).is_err());
    }
}
