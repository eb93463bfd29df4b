//! Full reducer, leaf pruning and anchor-keyed indexes.

use rustc_hash::{FxHashMap, FxHashSet};
use std::sync::Arc;

use crate::instance::{Domain, EncodedRelation, Instance, Key};
use crate::join_tree::{AttrId, JoinTree, QuerySchema};

/// Rows of one relation grouped by their values on `key_attrs`.
#[derive(Debug, Clone)]
pub struct GroupIndex {
    key_attrs: Vec<AttrId>,
    map: FxHashMap<Key, u32>,
    groups: Vec<Vec<u32>>,
    group_of: Vec<u32>,
}

impl GroupIndex {
    /// `key_attrs` is taken as given; callers use ascending attribute ids.
    pub fn build(rel: &EncodedRelation, key_attrs: &[AttrId]) -> Self {
        let pos = rel.positions(key_attrs);
        let mut map: FxHashMap<Key, u32> = FxHashMap::default();
        let mut groups: Vec<Vec<u32>> = Vec::new();
        let mut group_of = Vec::with_capacity(rel.len());
        for i in 0..rel.len() {
            let key = rel.key(i, &pos);
            let g = *map.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                (groups.len() - 1) as u32
            });
            groups[g as usize].push(i as u32);
            group_of.push(g);
        }
        GroupIndex {
            key_attrs: key_attrs.to_vec(),
            map,
            groups,
            group_of,
        }
    }

    pub fn key_attrs(&self) -> &[AttrId] {
        &self.key_attrs
    }

    pub fn group(&self, key: &[u32]) -> Option<u32> {
        self.map.get(key).copied()
    }

    pub fn rows(&self, group: u32) -> &[u32] {
        &self.groups[group as usize]
    }

    pub fn rows_for(&self, key: &[u32]) -> &[u32] {
        match self.group(key) {
            Some(g) => self.rows(g),
            None => &[],
        }
    }

    pub fn group_of(&self, row: usize) -> u32 {
        self.group_of[row]
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_key(&self, group: u32) -> Option<&Key> {
        self.map.iter().find(|(_, &g)| g == group).map(|(k, _)| k)
    }
}

/// A dangling-free instance with per-relation indexes and sorted domains.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub schema: Arc<QuerySchema>,
    pub domains: Arc<Vec<Domain>>,
    pub relations: Vec<EncodedRelation>,
    sorted_domains: Vec<Vec<u32>>,
    indexes: Vec<FxHashMap<Vec<AttrId>, GroupIndex>>,
}

impl ReducedInstance {
    pub fn size(&self) -> usize {
        self.relations.iter().map(EncodedRelation::len).sum()
    }

    /// Size of the relations that appear in `jt`.
    pub fn tree_size(&self, jt: &JoinTree) -> usize {
        jt.nodes().iter().map(|n| self.relations[n.rel].len()).sum()
    }

    /// Distinct codes of `attr` that survive reduction, ascending.
    pub fn sorted_domain(&self, attr: AttrId) -> &[u32] {
        &self.sorted_domains[attr]
    }

    /// Index of relation `rel` keyed on `attrs` (ascending ids). Panics if
    /// [`build_indexes`] did not create it.
    pub fn index(&self, rel: usize, attrs: &[AttrId]) -> &GroupIndex {
        self.indexes[rel]
            .get(attrs)
            .unwrap_or_else(|| panic!("no index on {attrs:?} for relation {rel}"))
    }

    pub fn has_index(&self, rel: usize, attrs: &[AttrId]) -> bool {
        self.indexes[rel].contains_key(attrs)
    }

    pub fn ensure_index(&mut self, rel: usize, attrs: &[AttrId]) {
        let mut key = attrs.to_vec();
        key.sort_unstable();
        if !self.indexes[rel].contains_key(&key) {
            let idx = GroupIndex::build(&self.relations[rel], &key);
            self.indexes[rel].insert(key, idx);
        }
    }

    pub fn value(&self, attr: AttrId, code: u32) -> &crate::relation::Value {
        &self.domains[attr].values[code as usize]
    }

    pub fn to_instance(&self) -> Instance {
        Instance {
            schema: self.schema.clone(),
            domains: self.domains.clone(),
            relations: self.relations.clone(),
        }
    }
}

fn sorted(attrs: &[AttrId]) -> Vec<AttrId> {
    let mut v = attrs.to_vec();
    v.sort_unstable();
    v
}

/// `target ⋉ source` on their shared attributes `on`.
pub fn semi_join(target: &mut EncodedRelation, source: &EncodedRelation, on: &[AttrId]) {
    let spos = source.positions(on);
    let tpos = target.positions(on);
    let keys: FxHashSet<Key> = (0..source.len()).map(|i| source.key(i, &spos)).collect();
    target.retain_rows(|r| {
        let k: Key = tpos.iter().map(|&p| r[p]).collect();
        keys.contains(&k)
    });
}

/// Two semi-join sweeps over the tree (leaves to root, then root to leaves)
/// remove every dangling tuple. Relations outside the tree are left alone.
pub fn full_reduce(inst: Instance, jt: &JoinTree) -> ReducedInstance {
    let Instance {
        schema,
        domains,
        mut relations,
    } = inst;
    let post = jt.post_order();
    for &u in &post {
        let node = jt.node(u);
        if let Some(p) = node.parent {
            let (child, parent) = (node.rel, jt.node(p).rel);
            let src = relations[child].clone();
            semi_join(&mut relations[parent], &src, &node.anchor);
        }
    }
    for &u in post.iter().rev() {
        let node = jt.node(u);
        for &c in &node.children {
            let cn = jt.node(c);
            let src = relations[node.rel].clone();
            semi_join(&mut relations[cn.rel], &src, &cn.anchor);
        }
    }
    let sorted_domains = sorted_domains(&schema, &relations, jt);
    let n = relations.len();
    ReducedInstance {
        schema,
        domains,
        relations,
        sorted_domains,
        indexes: vec![FxHashMap::default(); n],
    }
}

fn sorted_domains(schema: &QuerySchema, relations: &[EncodedRelation], jt: &JoinTree) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); schema.attrs.len()];
    for node in jt.nodes() {
        let rel = &relations[node.rel];
        for (p, &a) in rel.attrs.iter().enumerate() {
            out[a].extend(rel.rows().map(|r| r[p]));
        }
    }
    for d in out.iter_mut() {
        d.sort_unstable();
        d.dedup();
    }
    out
}

/// Drops nodes that contribute no projection attribute of their own: non-root
/// leaves whose projected attributes are all anchors, and a root whose only
/// neighbour is a single child while it projects nothing. Repeats until
/// stable. Sound only on a reduced instance.
pub fn prune_projection_free_leaves(jt: &JoinTree, reduced: &ReducedInstance) -> JoinTree {
    debug_assert!(jt.nodes().iter().all(|n| n.rel < reduced.relations.len()));
    let mut tree = jt.clone();
    loop {
        let n = tree.len();
        if n == 1 {
            return tree;
        }
        let root = tree.root();
        let leaf = (0..n).find(|&i| {
            i != root && tree.node(i).children.is_empty() && tree.owned_projection(i).is_empty()
        });
        let next = if let Some(leaf) = leaf {
            let keep: Vec<usize> = (0..n).filter(|&i| i != leaf).collect();
            tree.restricted(&keep, root)
        } else if tree.node(root).children.len() == 1 && tree.owned_projection(root).is_empty() {
            let child = tree.node(root).children[0];
            let keep: Vec<usize> = (0..n).filter(|&i| i != root).collect();
            tree.restricted(&keep, child)
        } else {
            return tree;
        };
        tree = next.expect("pruning keeps the tree connected");
    }
}

/// Groups every tree relation by its anchor, by each child's anchor and by
/// each single attribute; also materializes sorted domains.
pub fn build_indexes(mut reduced: ReducedInstance, jt: &JoinTree) -> ReducedInstance {
    for node in jt.nodes() {
        reduced.ensure_index(node.rel, &sorted(&node.anchor));
        for &c in &node.children {
            reduced.ensure_index(node.rel, &sorted(&jt.node(c).anchor));
        }
        for &a in &reduced.schema.relations[node.rel].attrs.clone() {
            reduced.ensure_index(node.rel, &[a]);
        }
    }
    reduced
}
