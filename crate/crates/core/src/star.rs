//! Heavy/light enumeration for star queries `π_{A1..Am}(R1(A1,B) ⋈ … ⋈ Rm(Am,B))`.
//!
//! Values of `Ai` with at least `δ` partners in `Ri` are heavy. Answers whose
//! every attribute is heavy are joined, deduplicated and sorted up front.
//! The rest are split by the first light attribute: subquery `Qi` joins the
//! heavy parts of `R1..R(i-1)`, the light part of `Ri` and the whole of the
//! remaining relations, and is enumerated by a ranked stream rooted at `Ri`.
//! An (m+1)-way merge interleaves the sorted heavy answers with the m
//! streams. Raising ε lowers δ: more is materialized and less is left for
//! the streams.

use std::cmp::Ordering;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::acyclic::{OrderSpec, RankedStream};
use crate::engine::prepare_acyclic;
use crate::error::{Error, Result};
use crate::heap;
use crate::instance::{EncodedRelation, Instance};
use crate::join_tree::{AttrId, JoinTree, QuerySchema};
use crate::ranking::{OutputTuple, RankingFunction};
use crate::reduce::full_reduce;
use crate::stream::{Counters, Enumerator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarConfig {
    pub epsilon: f64,
}

impl StarConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParams(format!("epsilon {epsilon} outside [0, 1]")));
        }
        Ok(StarConfig { epsilon })
    }

    /// `ceil(db_size^(1-ε))`, at least 1.
    pub fn delta(&self, db_size: usize) -> usize {
        ((db_size as f64).powf(1.0 - self.epsilon).ceil() as usize).max(1)
    }
}

/// Attribute layout of a star query: for relation `i`, the column of its
/// arm attribute `Ai` and of the centre `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarShape {
    pub arms: Vec<AttrId>,
    pub center: AttrId,
    pub arm_col: Vec<usize>,
    pub center_col: Vec<usize>,
}

impl StarShape {
    pub fn detect(schema: &QuerySchema) -> Result<Self> {
        let not_star = |why: &str| Error::NotStar(why.to_string());
        if schema.relations.is_empty() || schema.relations.iter().any(|r| r.attrs.len() != 2) {
            return Err(not_star("every relation must be binary"));
        }
        let first = &schema.relations[0].attrs;
        let center = *first
            .iter()
            .find(|&&a| !schema.is_projected(a) && schema.relations.iter().all(|r| r.attrs.contains(&a)))
            .ok_or_else(|| not_star("no unprojected attribute shared by all relations"))?;
        let mut arms = Vec::new();
        let mut arm_col = Vec::new();
        let mut center_col = Vec::new();
        for r in &schema.relations {
            let cc = r.attrs.iter().position(|&a| a == center).unwrap();
            let ac = 1 - cc;
            if r.attrs[ac] == center {
                return Err(not_star("relation repeats the centre"));
            }
            arms.push(r.attrs[ac]);
            arm_col.push(ac);
            center_col.push(cc);
        }
        let mut sorted_arms = arms.clone();
        sorted_arms.sort_unstable();
        sorted_arms.dedup();
        if sorted_arms.len() != arms.len() {
            return Err(not_star("arm attributes must be distinct"));
        }
        let mut proj = schema.projection.clone();
        proj.sort_unstable();
        if proj != sorted_arms {
            return Err(not_star("projection must be exactly the arm attributes"));
        }
        Ok(StarShape {
            arms,
            center,
            arm_col,
            center_col,
        })
    }
}

/// Heavy and light parts of each relation.
#[derive(Debug, Clone)]
pub struct HeavyLightSplit {
    pub delta: usize,
    pub heavy: Vec<EncodedRelation>,
    pub light: Vec<EncodedRelation>,
    /// Per relation, heavy arm codes ascending.
    pub heavy_values: Vec<Vec<u32>>,
}

impl HeavyLightSplit {
    pub fn is_heavy(&self, rel: usize, arm_code: u32) -> bool {
        self.heavy_values[rel].binary_search(&arm_code).is_ok()
    }
}

pub fn split_heavy_light(rels: &[EncodedRelation], shape: &StarShape, delta: usize) -> HeavyLightSplit {
    let mut heavy = Vec::with_capacity(rels.len());
    let mut light = Vec::with_capacity(rels.len());
    let mut heavy_values = Vec::with_capacity(rels.len());
    for (i, rel) in rels.iter().enumerate() {
        let col = shape.arm_col[i];
        let mut degree: FxHashMap<u32, usize> = FxHashMap::default();
        for r in rel.rows() {
            *degree.entry(r[col]).or_default() += 1;
        }
        let mut hv: Vec<u32> = degree.iter().filter(|(_, &d)| d >= delta).map(|(&v, _)| v).collect();
        hv.sort_unstable();
        let (mut h, mut l) = (rel.clone(), rel.clone());
        h.retain_rows(|r| degree[&r[col]] >= delta);
        l.retain_rows(|r| degree[&r[col]] < delta);
        heavy.push(h);
        light.push(l);
        heavy_values.push(hv);
    }
    HeavyLightSplit {
        delta,
        heavy,
        light,
        heavy_values,
    }
}

/// Where an emitted answer came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Heavy,
    Light(usize),
}

struct Entry {
    codes: Vec<u32>,
    score: f64,
    source: Source,
}

pub struct StarSession {
    schema: Arc<QuerySchema>,
    inst_domains: Arc<Vec<crate::instance::Domain>>,
    order: OrderSpec,
    shape: StarShape,
    split: HeavyLightSplit,
    reduced_size: usize,
    heavy: Vec<(Vec<u32>, f64)>,
    heavy_cursor: usize,
    streams: Vec<RankedStream>,
    merge: Vec<Entry>,
    counters: Counters,
    pre_counters: Counters,
    last_source: Option<Source>,
}

impl StarSession {
    /// `inst` is the encoded star instance; it is reduced here and δ is
    /// derived from its reduced size.
    pub fn new(inst: Instance, cfg: StarConfig, rf: &RankingFunction) -> Result<Self> {
        Self::build(inst, &|db| cfg.delta(db), rf)
    }

    /// Same as [`StarSession::new`] with a fixed degree threshold.
    pub fn with_delta(inst: Instance, delta: usize, rf: &RankingFunction) -> Result<Self> {
        Self::build(inst, &|_| delta.max(1), rf)
    }

    fn build(inst: Instance, delta: &dyn Fn(usize) -> usize, rf: &RankingFunction) -> Result<Self> {
        let schema = inst.schema.clone();
        let shape = StarShape::detect(&schema)?;
        let order = OrderSpec::for_projection(&schema, rf)?;
        let domains = inst.domains.clone();
        let jt = JoinTree::build(schema.clone(), None)?;
        let reduced = full_reduce(inst, &jt);
        let db = reduced.size();
        let split = split_heavy_light(&reduced.relations, &shape, delta(db));
        let mut counters = Counters::default();

        // heavy answers, grouped by centre value
        let m = shape.arms.len();
        let out_pos: Vec<usize> = shape
            .arms
            .iter()
            .map(|a| schema.projection.iter().position(|p| p == a).unwrap())
            .collect();
        let mut by_center: Vec<FxHashMap<u32, Vec<u32>>> = vec![FxHashMap::default(); m];
        for (i, rel) in split.heavy.iter().enumerate() {
            for r in rel.rows() {
                by_center[i].entry(r[shape.center_col[i]]).or_default().push(r[shape.arm_col[i]]);
                counters.ops += 1;
            }
        }
        let mut seen: FxHashSet<Vec<u32>> = FxHashSet::default();
        for (b, first) in &by_center[0] {
            let lists: Option<Vec<&Vec<u32>>> = (0..m)
                .map(|i| if i == 0 { Some(first) } else { by_center[i].get(b) })
                .collect();
            let Some(lists) = lists else { continue };
            let mut idx = vec![0usize; m];
            'product: loop {
                let mut codes = vec![0u32; m];
                for i in 0..m {
                    codes[out_pos[i]] = lists[i][idx[i]];
                }
                counters.ops += 1;
                seen.insert(codes);
                for i in (0..m).rev() {
                    idx[i] += 1;
                    if idx[i] < lists[i].len() {
                        continue 'product;
                    }
                    idx[i] = 0;
                }
                break;
            }
        }
        let mut heavy: Vec<(Vec<u32>, f64)> = seen
            .into_iter()
            .map(|c| {
                let s = score_of(&order, &domains, &c);
                (c, s)
            })
            .collect();
        heavy.sort_by(|x, y| compare_codes(&order, x, y));

        // light subqueries
        let mut streams = Vec::with_capacity(m);
        for i in 0..m {
            let rels: Vec<EncodedRelation> = (0..m)
                .map(|j| match j.cmp(&i) {
                    Ordering::Less => split.heavy[j].clone(),
                    Ordering::Equal => split.light[j].clone(),
                    Ordering::Greater => reduced.relations[j].clone(),
                })
                .collect();
            let sub = Instance {
                schema: schema.clone(),
                domains: domains.clone(),
                relations: rels,
            };
            let prepared = prepare_acyclic(sub, Some(&schema.relations[i].name))?;
            let order_i = OrderSpec::for_projection(&prepared.inst.schema, rf)?;
            streams.push(RankedStream::new(prepared.inst.clone(), &prepared.tree, order_i));
        }

        let mut s = StarSession {
            schema,
            inst_domains: domains,
            order,
            shape,
            split,
            reduced_size: db,
            heavy,
            heavy_cursor: 0,
            streams,
            merge: Vec::new(),
            counters,
            pre_counters: Counters::default(),
            last_source: None,
        };
        s.refill(Source::Heavy);
        for i in 0..m {
            s.refill(Source::Light(i));
        }
        s.pre_counters = s.counters();
        Ok(s)
    }

    fn refill(&mut self, source: Source) {
        let next = match source {
            Source::Heavy => {
                let e = self.heavy.get(self.heavy_cursor).cloned();
                if e.is_some() {
                    self.heavy_cursor += 1;
                }
                e
            }
            Source::Light(i) => self.streams[i].next_encoded(),
        };
        if let Some((codes, score)) = next {
            self.counters.pq_push += 1;
            let order = &self.order;
            heap::push(&mut self.merge, Entry { codes, score, source }, &mut |a: &Entry, b: &Entry| {
                order_entries(order, a, b)
            });
        }
    }

    pub fn split(&self) -> &HeavyLightSplit {
        &self.split
    }

    /// Size of the reduced instance that δ was derived from.
    pub fn reduced_size(&self) -> usize {
        self.reduced_size
    }

    pub fn heavy_output_len(&self) -> usize {
        self.heavy.len()
    }

    /// Counters accumulated while building the session.
    pub fn preprocessing_counters(&self) -> Counters {
        self.pre_counters
    }

    /// Source of the most recent answer.
    pub fn last_source(&self) -> Option<Source> {
        self.last_source
    }

    /// The source an answer must come from: the heavy output if every arm
    /// value is heavy, else the subquery of the first light arm.
    pub fn expected_source(&self, codes: &[u32]) -> Source {
        for i in 0..self.shape.arms.len() {
            let pos = self.schema.projection.iter().position(|&p| p == self.shape.arms[i]).unwrap();
            if !self.split.is_heavy(i, codes[pos]) {
                return Source::Light(i);
            }
        }
        Source::Heavy
    }

    pub fn next_encoded(&mut self) -> Option<(Vec<u32>, f64)> {
        let order = &self.order;
        let e = heap::pop(&mut self.merge, &mut |a: &Entry, b: &Entry| {
            order_entries(order, a, b)
        })?;
        self.counters.pq_pop += 1;
        self.refill(e.source);
        self.last_source = Some(e.source);
        self.counters.emitted += 1;
        Some((e.codes, e.score))
    }
}

fn order_entries(order: &OrderSpec, a: &Entry, b: &Entry) -> Ordering {
    if order.sum {
        let o = a.score.total_cmp(&b.score);
        if o != Ordering::Equal {
            return o;
        }
    }
    for &(p, d) in &order.keys {
        let o = d.apply(a.codes[p].cmp(&b.codes[p]));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn compare_codes(order: &OrderSpec, a: &(Vec<u32>, f64), b: &(Vec<u32>, f64)) -> Ordering {
    if order.sum {
        let o = a.1.total_cmp(&b.1);
        if o != Ordering::Equal {
            return o;
        }
    }
    for &(p, d) in &order.keys {
        let o = d.apply(a.0[p].cmp(&b.0[p]));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn score_of(order: &OrderSpec, domains: &[crate::instance::Domain], codes: &[u32]) -> f64 {
    order
        .score
        .iter()
        .fold(0.0, |acc, &p| acc + domains[order.output[p]].weights[codes[p] as usize])
}

impl Enumerator for StarSession {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        let (codes, rank) = self.next_encoded()?;
        let values = codes
            .iter()
            .zip(&self.order.output)
            .map(|(&c, &a)| self.inst_domains[a].values[c as usize].clone())
            .collect();
        Some(OutputTuple { values, rank })
    }

    fn counters(&self) -> Counters {
        let mut c = self.counters;
        for s in &self.streams {
            c.add(&s.counters());
        }
        c.emitted = self.counters.emitted;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::join_tree::tests::schema;
    use crate::relation::Relation;
    use crate::stream::drain;
    use crate::weights::WeightMap;

    fn two_star() -> (Arc<QuerySchema>, Vec<Relation>) {
        let s = schema(&[("R1", &["A1", "B"]), ("R2", &["A2", "B"])], &["A1", "A2"]);
        let rels = vec![
            Relation::from_ints("R1", &["A1", "B"], &[&[1, 1], &[2, 1]]),
            Relation::from_ints("R2", &["A2", "B"], &[&[1, 1], &[3, 1]]),
        ];
        (s, rels)
    }

    fn session_with_delta(s: Arc<QuerySchema>, rels: &[Relation], delta: usize) -> StarSession {
        let inst = Instance::encode(s, rels, &WeightMap::identity()).unwrap();
        let st = StarSession::with_delta(inst, delta, &RankingFunction::Sum).unwrap();
        assert_eq!(st.split().delta, delta);
        st
    }

    fn ints(ts: &[OutputTuple]) -> Vec<Vec<i64>> {
        ts.iter().map(|t| t.values.iter().map(|v| v.as_int().unwrap()).collect()).collect()
    }

    fn expected() -> Vec<Vec<i64>> {
        vec![vec![1, 1], vec![2, 1], vec![1, 3], vec![2, 3]]
    }

    #[test]
    fn degree_split() {
        let s = schema(&[("R1", &["A1", "B"]), ("R2", &["A2", "B"])], &["A1", "A2"]);
        let rels = [
            Relation::from_ints("R1", &["A1", "B"], &[&[1, 1], &[1, 2], &[2, 1]]),
            Relation::from_ints("R2", &["A2", "B"], &[&[5, 1], &[5, 2]]),
        ];
        let inst = Instance::encode(s.clone(), &rels, &WeightMap::identity()).unwrap();
        let shape = StarShape::detect(&s).unwrap();
        let sp = split_heavy_light(&inst.relations, &shape, 2);
        assert_eq!(sp.heavy[0].len(), 2);
        assert_eq!(sp.light[0].len(), 1);
        let sp1 = split_heavy_light(&inst.relations, &shape, 1);
        assert!(sp1.light.iter().all(|r| r.is_empty()));
    }

    #[test]
    fn all_heavy() {
        let (s, rels) = two_star();
        let mut st = session_with_delta(s, &rels, 1);
        assert_eq!(st.heavy_output_len(), 4);
        let ranks: Vec<f64> = st.heavy.iter().map(|h| h.1).collect();
        assert_eq!(ranks, [2.0, 3.0, 4.0, 5.0]);
        assert_eq!(ints(&drain(&mut st, None)), expected());
    }

    #[test]
    fn all_light() {
        let (s, rels) = two_star();
        let mut st = session_with_delta(s, &rels, 3);
        assert_eq!(st.heavy_output_len(), 0);
        assert_eq!(ints(&drain(&mut st, None)), expected());
    }

    #[test]
    fn one_heavy_value() {
        let s = schema(&[("R1", &["A1", "B"]), ("R2", &["A2", "B"])], &["A1", "A2"]);
        let rels = vec![
            Relation::from_ints("R1", &["A1", "B"], &[&[1, 1], &[1, 2], &[2, 1]]),
            Relation::from_ints("R2", &["A2", "B"], &[&[1, 1], &[3, 2]]),
        ];
        let mut st = session_with_delta(s, &rels, 2);
        let mut got = Vec::new();
        while let Some((codes, _)) = st.next_encoded() {
            assert_eq!(st.last_source(), Some(st.expected_source(&codes)));
            got.push(codes);
        }
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn rejects_non_star() {
        let s = schema(&[("R1", &["A", "B"]), ("R2", &["B", "C"]), ("R3", &["C", "D"])], &["A", "D"]);
        assert!(StarShape::detect(&s).is_err());
        let s = schema(&[("R1", &["A1", "B"]), ("R2", &["A2", "B"])], &["A1"]);
        assert!(StarShape::detect(&s).is_err());
    }

    #[test]
    fn epsilon_bounds() {
        assert!(StarConfig::new(1.5).is_err());
        assert_eq!(StarConfig::new(0.0).unwrap().delta(100), 100);
        assert_eq!(StarConfig::new(1.0).unwrap().delta(100), 1);
        assert_eq!(StarConfig::new(0.5).unwrap().delta(0), 1);
    }
}
