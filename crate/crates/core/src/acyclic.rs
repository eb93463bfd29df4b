//! Ranked enumeration over a join tree with a forest of priority queues.
//!
//! Every node keeps one queue per anchor value. A queue entry is a cell: a
//! tuple of the node's relation, one reference into each child's arena, and
//! a write-once `next` link. Following `next` links from the first cell of a
//! queue walks the distinct partial answers of that subtree in ranked order,
//! materialized lazily as parents ask for them.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::Result;
use crate::heap;
use crate::join_tree::{gyo_links, AttrId, JoinTree, QuerySchema};
use crate::ranking::{Direction, OutputTuple, RankingFunction};
use crate::reduce::{GroupIndex, ReducedInstance};
use crate::relation::Value;
use crate::stream::{Counters, Enumerator};

const UNSET: u32 = u32::MAX;
const END: u32 = u32::MAX - 1;

/// What a stream emits and how emitted tuples are ordered.
///
/// Positions refer to `output`. The score is the sum of the weights at
/// `score` positions, accumulated in that order; `keys` break score ties
/// (SUM) or order on their own (LEX).
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpec {
    pub output: Vec<AttrId>,
    pub score: Vec<usize>,
    pub keys: Vec<(usize, Direction)>,
    pub sum: bool,
}

impl OrderSpec {
    /// Emits the projection, ordered as `rf` prescribes.
    pub fn for_projection(schema: &QuerySchema, rf: &RankingFunction) -> Result<Self> {
        let names: Vec<String> = schema.projection.iter().map(|&a| schema.attrs[a].clone()).collect();
        Ok(OrderSpec {
            output: schema.projection.clone(),
            score: (0..names.len()).collect(),
            keys: rf.sort_keys(&names)?,
            sum: !rf.is_lex(),
        })
    }

    /// Emits every attribute: the projection first, then the rest by id.
    /// Only projection attributes carry weight; the rest only break ties.
    pub fn full_with_zero_weights(schema: &QuerySchema, rf: &RankingFunction) -> Result<Self> {
        let mut spec = Self::for_projection(schema, rf)?;
        let m = spec.output.len();
        let rest: Vec<AttrId> = (0..schema.attrs.len()).filter(|a| !schema.is_projected(*a)).collect();
        spec.output.extend(&rest);
        spec.keys.extend((m..m + rest.len()).map(|p| (p, Direction::Asc)));
        Ok(spec)
    }
}

/// True when adding one hyperedge over the projection keeps the query acyclic.
pub fn is_free_connex(schema: &QuerySchema) -> bool {
    let mut edges: Vec<BTreeSet<AttrId>> = schema
        .relations
        .iter()
        .map(|r| r.attrs.iter().copied().collect())
        .collect();
    if gyo_links(&edges).is_none() {
        return false;
    }
    edges.push(schema.projection.iter().copied().collect());
    gyo_links(&edges).is_some()
}

struct NodePlan {
    rel: usize,
    anchor: Vec<AttrId>,
    children: Vec<usize>,
    /// (column in the node's relation, output position)
    own: Vec<(usize, usize)>,
    score_pos: Vec<usize>,
    key_pos: Vec<(usize, Direction)>,
    group_of_row: Vec<u32>,
    /// Per child slot: row -> anchor group in that child (`UNSET` if none).
    child_group: Vec<Vec<u32>>,
}

#[derive(Default)]
struct Arena {
    row: Vec<u32>,
    next: Vec<u32>,
    slot: Vec<u8>,
    score: Vec<f64>,
    kids: Vec<u32>,
}

impl Arena {
    fn len(&self) -> usize {
        self.row.len()
    }
}

struct View<'a> {
    plan: &'a [NodePlan],
    arenas: &'a [Arena],
    inst: &'a ReducedInstance,
}

impl View<'_> {
    fn fill(&self, node: usize, cell: u32, buf: &mut [u32]) {
        let p = &self.plan[node];
        let a = &self.arenas[node];
        let c = cell as usize;
        let row = self.inst.relations[p.rel].row(a.row[c] as usize);
        for &(col, pos) in &p.own {
            buf[pos] = row[col];
        }
        let k = p.children.len();
        for (s, &child) in p.children.iter().enumerate() {
            self.fill(child, a.kids[c * k + s], buf);
        }
    }

    fn compare(&self, sum: bool, node: usize, x: u32, y: u32, bx: &mut [u32], by: &mut [u32]) -> Ordering {
        if x == y {
            return Ordering::Equal;
        }
        if sum {
            let a = &self.arenas[node];
            let ord = a.score[x as usize].total_cmp(&a.score[y as usize]);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.fill(node, x, bx);
        self.fill(node, y, by);
        for &(pos, dir) in &self.plan[node].key_pos {
            let ord = dir.apply(bx[pos].cmp(&by[pos]));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

/// Pull-based ranked enumeration over one join tree.
pub struct RankedStream {
    inst: Arc<ReducedInstance>,
    order: OrderSpec,
    plan: Vec<NodePlan>,
    arenas: Vec<Arena>,
    queues: Vec<Vec<Vec<u32>>>,
    root: usize,
    last: Option<u32>,
    pending: Option<u32>,
    buf_a: Vec<u32>,
    buf_b: Vec<u32>,
    counters: Counters,
    node_pops: Vec<u64>,
}

impl RankedStream {
    /// Builds every node's queues bottom-up. The instance must be reduced
    /// with respect to `jt`, and every output attribute must be held by some
    /// node of `jt`.
    pub fn new(inst: Arc<ReducedInstance>, jt: &JoinTree, order: OrderSpec) -> Self {
        let n = jt.len();
        let width = order.output.len();
        let mut plan = Vec::with_capacity(n);
        for i in 0..n {
            let node = jt.node(i);
            let rel = &inst.relations[node.rel];
            let own: Vec<(usize, usize)> = order
                .output
                .iter()
                .enumerate()
                .filter(|(_, a)| rel.attrs.contains(a) && !node.anchor.contains(a))
                .map(|(pos, &a)| (rel.position(a).unwrap(), pos))
                .collect();
            let anchor_idx = index_on(&inst, node.rel, &node.anchor);
            let group_of_row = (0..rel.len()).map(|r| anchor_idx.group_of(r)).collect();
            let child_group = node
                .children
                .iter()
                .map(|&c| {
                    let anchor = sorted(&jt.node(c).anchor);
                    let cidx = index_on(&inst, jt.node(c).rel, &anchor);
                    let pos = rel.positions(&anchor);
                    (0..rel.len())
                        .map(|r| cidx.group(&rel.key(r, &pos)).unwrap_or(UNSET))
                        .collect()
                })
                .collect();
            plan.push(NodePlan {
                rel: node.rel,
                anchor: sorted(&node.anchor),
                children: node.children.clone(),
                own,
                score_pos: Vec::new(),
                key_pos: Vec::new(),
                group_of_row,
                child_group,
            });
        }
        // positions produced inside each subtree
        for &u in &jt.post_order() {
            let mut scope: Vec<bool> = vec![false; width];
            for &(_, pos) in &plan[u].own {
                scope[pos] = true;
            }
            for &c in &jt.node(u).children {
                for &(pos, _) in &plan[c].key_pos {
                    scope[pos] = true;
                }
            }
            plan[u].score_pos = order.score.iter().copied().filter(|&p| scope[p]).collect();
            plan[u].key_pos = order.keys.iter().copied().filter(|&(p, _)| scope[p]).collect();
        }
        let root = jt.root();
        debug_assert!(
            (0..width).all(|p| plan[root].key_pos.iter().any(|&(q, _)| q == p)),
            "output attribute held by no node"
        );
        let queues = plan
            .iter()
            .map(|p| {
                let groups = p.group_of_row.iter().map(|&g| g as usize + 1).max().unwrap_or(0);
                vec![Vec::new(); groups]
            })
            .collect();
        let mut s = RankedStream {
            inst,
            order,
            plan,
            arenas: (0..n).map(|_| Arena::default()).collect(),
            queues,
            root,
            last: None,
            pending: None,
            buf_a: vec![0; width],
            buf_b: vec![0; width],
            counters: Counters::default(),
            node_pops: vec![0; n],
        };
        s.preprocess(&jt.post_order());
        s
    }

    #[allow(clippy::needless_range_loop)]
    fn preprocess(&mut self, post: &[usize]) {
        for &u in post {
            let k = self.plan[u].children.len();
            assert!(k < u8::MAX as usize, "join tree node has too many children");
            let rows = self.plan[u].group_of_row.len();
            let mut kids = vec![0u32; k];
            'rows: for r in 0..rows {
                for s in 0..k {
                    let c = self.plan[u].children[s];
                    let g = self.plan[u].child_group[s][r];
                    let top = if g == UNSET {
                        None
                    } else {
                        self.queues[c][g as usize].first().copied()
                    };
                    match top {
                        Some(t) => kids[s] = t,
                        None => continue 'rows,
                    }
                }
                let cell = self.alloc(u, r as u32, &kids, 0);
                let g = self.plan[u].group_of_row[r];
                self.push(u, g, cell);
            }
        }
    }

    fn alloc(&mut self, node: usize, row: u32, kids: &[u32], slot: u8) -> u32 {
        let a = &mut self.arenas[node];
        let id = a.len() as u32;
        a.row.push(row);
        a.next.push(UNSET);
        a.slot.push(slot);
        a.score.push(0.0);
        a.kids.extend_from_slice(kids);
        self.counters.cells += 1;
        let view = View {
            plan: &self.plan,
            arenas: &self.arenas,
            inst: &self.inst,
        };
        view.fill(node, id, &mut self.buf_a);
        let score = self.plan[node]
            .score_pos
            .iter()
            .fold(0.0, |acc, &p| {
                acc + self.inst.domains[self.order.output[p]].weights[self.buf_a[p] as usize]
            });
        self.arenas[node].score[id as usize] = score;
        id
    }

    fn push(&mut self, node: usize, group: u32, cell: u32) {
        self.counters.pq_push += 1;
        let view = View {
            plan: &self.plan,
            arenas: &self.arenas,
            inst: &self.inst,
        };
        let sum = self.order.sum;
        let (ba, bb) = (&mut self.buf_a, &mut self.buf_b);
        let mut cmp = |x: &u32, y: &u32| view.compare(sum, node, *x, *y, ba, bb);
        heap::push(&mut self.queues[node][group as usize], cell, &mut cmp);
    }

    fn pop(&mut self, node: usize, group: u32) -> Option<u32> {
        let view = View {
            plan: &self.plan,
            arenas: &self.arenas,
            inst: &self.inst,
        };
        let sum = self.order.sum;
        let (ba, bb) = (&mut self.buf_a, &mut self.buf_b);
        let mut cmp = |x: &u32, y: &u32| view.compare(sum, node, *x, *y, ba, bb);
        let top = heap::pop(&mut self.queues[node][group as usize], &mut cmp);
        if top.is_some() {
            self.counters.pq_pop += 1;
            self.node_pops[node] += 1;
        }
        top
    }

    fn equal(&mut self, node: usize, x: u32, y: u32) -> bool {
        let view = View {
            plan: &self.plan,
            arenas: &self.arenas,
            inst: &self.inst,
        };
        view.compare(self.order.sum, node, x, y, &mut self.buf_a, &mut self.buf_b) == Ordering::Equal
    }

    fn group_of_cell(&self, node: usize, cell: u32) -> u32 {
        self.plan[node].group_of_row[self.arenas[node].row[cell as usize] as usize]
    }

    /// Pushes the successors of a popped cell: for each child slot at or
    /// after the slot that produced the cell, a copy with that child
    /// advanced one step along its chain. Each combination of child
    /// positions is generated exactly once.
    fn expand(&mut self, node: usize, cell: u32) {
        let k = self.plan[node].children.len();
        let c = cell as usize;
        let first = self.arenas[node].slot[c] as usize;
        let row = self.arenas[node].row[c];
        let group = self.group_of_cell(node, cell);
        for s in first..k {
            let child = self.plan[node].children[s];
            let at = self.arenas[node].kids[c * k + s];
            let succ = self.topdown(child, at);
            if succ == END {
                continue;
            }
            let mut kids: smallvec::SmallVec<[u32; 8]> = self.arenas[node].kids[c * k..(c + 1) * k].into();
            kids[s] = succ;
            let id = self.alloc(node, row, &kids, s as u8);
            self.push(node, group, id);
        }
    }

    /// Returns the cell that follows `cell` in its queue's ranked chain, or
    /// `END`. `cell` must be the current top of its queue unless its link is
    /// already set.
    fn topdown(&mut self, node: usize, cell: u32) -> u32 {
        self.counters.topdown_calls += 1;
        let known = self.arenas[node].next[cell as usize];
        if known != UNSET {
            return known;
        }
        self.counters.nontrivial_topdown += 1;
        let group = self.group_of_cell(node, cell);
        let temp = self.pop(node, group).expect("topdown on an empty queue");
        debug_assert!(self.equal(node, temp, cell));
        self.expand(node, temp);
        while let Some(&top) = self.queues[node][group as usize].first() {
            if !self.equal(node, top, temp) {
                break;
            }
            self.pop(node, group);
            self.expand(node, top);
        }
        let next = self.queues[node][group as usize].first().copied().unwrap_or(END);
        if node != self.root {
            debug_assert_eq!(self.arenas[node].next[cell as usize], UNSET);
            self.arenas[node].next[cell as usize] = next;
        }
        next
    }

    /// Next answer as codes over the output attributes, with its score.
    pub fn next_encoded(&mut self) -> Option<(Vec<u32>, f64)> {
        if let Some(p) = self.pending.take() {
            self.topdown(self.root, p);
        }
        loop {
            let o = *self.queues[self.root].first()?.first()?;
            if let Some(l) = self.last {
                if self.equal(self.root, o, l) {
                    self.topdown(self.root, o);
                    continue;
                }
            }
            self.last = Some(o);
            self.pending = Some(o);
            self.counters.emitted += 1;
            let mut codes = vec![0; self.order.output.len()];
            let view = View {
                plan: &self.plan,
                arenas: &self.arenas,
                inst: &self.inst,
            };
            view.fill(self.root, o, &mut codes);
            return Some((codes, self.arenas[self.root].score[o as usize]));
        }
    }

    pub fn decode(&self, codes: &[u32]) -> Vec<Value> {
        codes
            .iter()
            .zip(&self.order.output)
            .map(|(&c, &a)| self.inst.value(a, c).clone())
            .collect()
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn instance(&self) -> &Arc<ReducedInstance> {
        &self.inst
    }

    /// Cells currently allocated across all arenas.
    pub fn live_cells(&self) -> usize {
        self.arenas.iter().map(Arena::len).sum()
    }

    /// Pops performed on the queues of one join-tree node.
    pub fn node_pops(&self, node: usize) -> u64 {
        self.node_pops[node]
    }

    /// Decoded contents of the root queue, best first.
    pub fn root_queue(&self) -> Vec<OutputTuple> {
        let mut cells: Vec<u32> = self.queues[self.root].iter().flatten().copied().collect();
        let view = View {
            plan: &self.plan,
            arenas: &self.arenas,
            inst: &self.inst,
        };
        let (mut ba, mut bb) = (self.buf_a.clone(), self.buf_b.clone());
        cells.sort_by(|&x, &y| view.compare(self.order.sum, self.root, x, y, &mut ba, &mut bb));
        cells
            .into_iter()
            .map(|c| {
                let mut codes = vec![0; self.order.output.len()];
                view.fill(self.root, c, &mut codes);
                OutputTuple {
                    values: self.decode(&codes),
                    rank: self.arenas[self.root].score[c as usize],
                }
            })
            .collect()
    }

    /// Decoded partial answer at the top of a node's queue for `anchor`
    /// (values in output order; positions outside the subtree are `None`).
    pub fn queue_top(&self, node: usize, anchor: &[Value]) -> Option<Vec<Option<Value>>> {
        let rel = &self.inst.relations[self.plan[node].rel];
        let row = (0..rel.len()).find(|&r| {
            let g = self.plan[node].group_of_row[r];
            let any = self.queues[node][g as usize].first().copied();
            any.is_some() && self.anchor_values(node, r) == anchor
        })?;
        let g = self.plan[node].group_of_row[row];
        let top = *self.queues[node][g as usize].first()?;
        let mut codes = vec![u32::MAX; self.order.output.len()];
        let view = View {
            plan: &self.plan,
            arenas: &self.arenas,
            inst: &self.inst,
        };
        view.fill(node, top, &mut codes);
        Some(
            codes
                .iter()
                .zip(&self.order.output)
                .map(|(&c, &a)| (c != u32::MAX).then(|| self.inst.value(a, c).clone()))
                .collect(),
        )
    }

    fn anchor_values(&self, node: usize, row: usize) -> Vec<Value> {
        let rel = &self.inst.relations[self.plan[node].rel];
        let r = rel.row(row);
        self.plan[node]
            .anchor
            .iter()
            .map(|&a| self.inst.value(a, r[rel.position(a).unwrap()]).clone())
            .collect()
    }
}

impl Enumerator for RankedStream {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        let (codes, rank) = self.next_encoded()?;
        Some(OutputTuple {
            values: self.decode(&codes),
            rank,
        })
    }

    fn counters(&self) -> Counters {
        self.counters
    }
}

fn sorted(attrs: &[AttrId]) -> Vec<AttrId> {
    let mut v = attrs.to_vec();
    v.sort_unstable();
    v
}

enum IndexRef<'a> {
    Shared(&'a GroupIndex),
    Owned(GroupIndex),
}

impl std::ops::Deref for IndexRef<'_> {
    type Target = GroupIndex;

    fn deref(&self) -> &GroupIndex {
        match self {
            IndexRef::Shared(g) => g,
            IndexRef::Owned(g) => g,
        }
    }
}

fn index_on<'a>(inst: &'a ReducedInstance, rel: usize, attrs: &[AttrId]) -> IndexRef<'a> {
    let key = sorted(attrs);
    if inst.has_index(rel, &key) {
        IndexRef::Shared(inst.index(rel, &key))
    } else {
        IndexRef::Owned(GroupIndex::build(&inst.relations[rel], &key))
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
    use crate::weights::WeightMap;

    fn stream(s: Arc<QuerySchema>, rels: &[Relation], root: Option<&str>, rf: &RankingFunction) -> (RankedStream, JoinTree) {
        let jt = JoinTree::build(s.clone(), root).unwrap();
        let inst = Instance::encode(s.clone(), rels, &WeightMap::identity()).unwrap();
        let red = Arc::new(build_indexes(full_reduce(inst, &jt), &jt));
        let order = OrderSpec::for_projection(&s, rf).unwrap();
        (RankedStream::new(red, &jt, order), jt)
    }

    fn ints(t: &OutputTuple) -> Vec<i64> {
        t.values.iter().map(|v| v.as_int().unwrap()).collect()
    }

    fn drain_ints(s: &mut RankedStream) -> Vec<Vec<i64>> {
        crate::stream::drain(s, None).iter().map(ints).collect()
    }

    #[test]
    fn preprocessing_leaves_one_root_cell() {
        let (s, jt) = stream(four_path(), &running_example(), Some("R3"), &RankingFunction::Sum);
        let root = s.root_queue();
        assert_eq!(root.len(), 1);
        assert_eq!(ints(&root[0]), [1, 1]);
        assert_eq!(root[0].rank, 2.0);
        // child references point at the tops of the C=1 and D=1 queues
        let r2 = (0..jt.len()).find(|&i| jt.name_of(i) == "R2").unwrap();
        let r4 = (0..jt.len()).find(|&i| jt.name_of(i) == "R4").unwrap();
        let top2 = s.queue_top(r2, &[Value::Int(1)]).unwrap();
        assert_eq!(top2, vec![Some(Value::Int(1)), None]);
        let top4 = s.queue_top(r4, &[Value::Int(1)]).unwrap();
        assert_eq!(top4, vec![None, Some(Value::Int(1))]);
    }

    #[test]
    fn running_example_first_answer_and_drain() {
        let (mut s, _) = stream(four_path(), &running_example(), Some("R3"), &RankingFunction::Sum);
        let first = s.next_answer().unwrap();
        assert_eq!(ints(&first), [1, 1]);
        assert_eq!(first.rank, 2.0);
        let rest = drain_ints(&mut s);
        assert_eq!(rest, vec![vec![1, 2], vec![2, 1], vec![2, 2], vec![3, 1], vec![3, 2]]);
        assert!(s.next_answer().is_none());
    }

    #[test]
    fn first_topdown_queues_both_rank_three_successors() {
        let (mut s, jt) = stream(four_path(), &running_example(), Some("R3"), &RankingFunction::Sum);
        s.next_answer().unwrap();
        let p = s.pending.take().unwrap();
        s.topdown(s.root, p);
        let q: Vec<Vec<i64>> = s.root_queue().iter().map(ints).collect();
        assert_eq!(q, vec![vec![1, 2], vec![2, 1]]);
        // both A=1 cells of R2 (from R1 groups B=1 and B=2) were popped
        let r2 = (0..jt.len()).find(|&i| jt.name_of(i) == "R2").unwrap();
        assert_eq!(s.node_pops(r2), 2);
    }

    #[test]
    fn memoized_topdown_does_no_queue_work() {
        let (mut s, jt) = stream(four_path(), &running_example(), Some("R3"), &RankingFunction::Sum);
        s.next_answer().unwrap();
        s.next_answer().unwrap();
        let r4 = (0..jt.len()).find(|&i| jt.name_of(i) == "R4").unwrap();
        let cell = (0..s.arenas[r4].len() as u32).find(|&c| s.arenas[r4].next[c as usize] != UNSET).unwrap();
        let before = s.counters;
        let a = s.topdown(r4, cell);
        let b = s.topdown(r4, cell);
        assert_eq!(a, b);
        assert_eq!(s.counters.pq_ops(), before.pq_ops());
        assert_eq!(s.counters.nontrivial_topdown, before.nontrivial_topdown);
    }

    #[test]
    fn is_equal_semantics() {
        let (mut s, _) = stream(four_path(), &running_example(), Some("R3"), &RankingFunction::Sum);
        s.next_answer().unwrap();
        let p = s.pending.take().unwrap();
        s.topdown(s.root, p);
        let root = s.root;
        let cells: Vec<u32> = s.queues[root][0].clone();
        assert_eq!(cells.len(), 2);
        // (1,2) and (2,1): equal rank 3, different tuples
        let (x, y) = (cells[0], cells[1]);
        assert_eq!(s.arenas[root].score[x as usize], s.arenas[root].score[y as usize]);
        assert!(!s.equal(root, x, y));
        assert!(s.equal(root, x, x));
    }

    #[test]
    fn single_relation_projection() {
        let s = schema(&[("R", &["A", "B"])], &["A"]);
        let rels = [Relation::from_ints("R", &["A", "B"], &[&[3, 9]])];
        let (mut st, _) = stream(s, &rels, None, &RankingFunction::Sum);
        assert_eq!(drain_ints(&mut st), vec![vec![3]]);
    }

    #[test]
    fn empty_instance_is_exhausted() {
        let s = four_path();
        let mut rels = running_example();
        rels[3] = Relation::from_ints("R4", &["D", "E"], &[]);
        let (mut st, _) = stream(s, &rels, Some("R3"), &RankingFunction::Sum);
        assert!(st.next_answer().is_none());
        assert!(st.next_answer().is_none());
    }

    #[test]
    fn every_root_gives_the_same_sequence() {
        let expect = vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2], vec![3, 1], vec![3, 2]];
        for root in ["R1", "R2", "R3", "R4"] {
            let (mut s, _) = stream(four_path(), &running_example(), Some(root), &RankingFunction::Sum);
            assert_eq!(drain_ints(&mut s), expect, "root {root}");
        }
    }

    #[test]
    fn lex_with_directions() {
        let rf = RankingFunction::Lex(vec![("A".into(), Direction::Asc), ("E".into(), Direction::Desc)]);
        let (mut s, _) = stream(four_path(), &running_example(), Some("R3"), &rf);
        assert_eq!(
            drain_ints(&mut s),
            vec![vec![1, 2], vec![1, 1], vec![2, 2], vec![2, 1], vec![3, 2], vec![3, 1]]
        );
    }

    #[test]
    fn free_connex_detection() {
        let full = schema(&[("R1", &["A", "B"]), ("R2", &["B", "C"])], &["A", "B", "C"]);
        assert!(is_free_connex(&full));
        let one = schema(&[("R1", &["A", "B"]), ("R2", &["B", "C"])], &["A"]);
        assert!(is_free_connex(&one));
        let two_path = schema(&[("R1", &["A", "B"]), ("R2", &["B", "C"])], &["A", "C"]);
        assert!(!is_free_connex(&two_path));
        assert!(!is_free_connex(&four_path()));
    }
}
