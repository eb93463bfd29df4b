//! Rooted join trees over acyclic queries.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type AttrId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelSchema {
    pub name: String,
    pub attrs: Vec<AttrId>,
}

/// Attribute universe, relation schemas and projection of one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySchema {
    pub attrs: Vec<String>,
    pub relations: Vec<RelSchema>,
    pub projection: Vec<AttrId>,
}

impl QuerySchema {
    /// Attribute ids are assigned in order of first appearance.
    pub fn new(relations: &[(String, Vec<String>)], projection: &[String]) -> Result<Self> {
        let mut attrs: Vec<String> = Vec::new();
        let mut rels = Vec::with_capacity(relations.len());
        for (name, schema) in relations {
            let ids = schema
                .iter()
                .map(|a| match attrs.iter().position(|x| x == a) {
                    Some(i) => i,
                    None => {
                        attrs.push(a.clone());
                        attrs.len() - 1
                    }
                })
                .collect();
            rels.push(RelSchema {
                name: name.clone(),
                attrs: ids,
            });
        }
        let projection = projection
            .iter()
            .map(|p| {
                attrs
                    .iter()
                    .position(|a| a == p)
                    .ok_or_else(|| Error::InvalidQuery(format!("projection attribute `{p}` is in no relation")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QuerySchema {
            attrs,
            relations: rels,
            projection,
        })
    }

    pub fn attr_id(&self, name: &str) -> Option<AttrId> {
        self.attrs.iter().position(|a| a == name)
    }

    pub fn relation_id(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn is_projected(&self, attr: AttrId) -> bool {
        self.projection.contains(&attr)
    }

    pub fn is_full(&self) -> bool {
        self.projection.len() == self.attrs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinNode {
    /// Index into the schema's relations.
    pub rel: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Attributes shared with the parent; empty at the root.
    pub anchor: Vec<AttrId>,
    /// Projection attributes occurring in this node's subtree, in projection order.
    pub subtree_projection: Vec<AttrId>,
}

/// A rooted join tree. Node ids index `nodes`; each node wraps one relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinTree {
    schema: Arc<QuerySchema>,
    nodes: Vec<JoinNode>,
    root: usize,
    attr_order: Vec<AttrId>,
}

impl JoinTree {
    /// GYO ear removal; roots at `root` (a relation name) or at the first
    /// relation.
    pub fn build(schema: Arc<QuerySchema>, root: Option<&str>) -> Result<Self> {
        if schema.relations.is_empty() {
            return Err(Error::InvalidQuery("query has no relations".into()));
        }
        let edges: Vec<BTreeSet<AttrId>> = schema
            .relations
            .iter()
            .map(|r| r.attrs.iter().copied().collect())
            .collect();
        let links = gyo_links(&edges).ok_or_else(|| {
            Error::Cyclic(
                schema
                    .relations
                    .iter()
                    .map(|r| r.name.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            )
        })?;
        let root_rel = match root {
            Some(name) => schema
                .relation_id(name)
                .ok_or_else(|| Error::InvalidRoot(name.to_string()))?,
            None => 0,
        };
        let rels: Vec<usize> = (0..schema.relations.len()).collect();
        Self::from_links(schema, rels, &links, root_rel)
    }

    /// Builds a tree from an explicit parent array over `rels` (indices into
    /// the schema's relations) and validates it.
    pub fn from_parents(schema: Arc<QuerySchema>, rels: Vec<usize>, parents: &[Option<usize>]) -> Result<Self> {
        if rels.len() != parents.len() || rels.is_empty() {
            return Err(Error::InvalidQuery("parent array does not match node list".into()));
        }
        let roots: Vec<usize> = (0..parents.len()).filter(|&i| parents[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidQuery(format!("join tree needs one root, found {}", roots.len())));
        }
        let links: Vec<(usize, usize)> = parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i, p)))
            .collect();
        let root_rel = rels[roots[0]];
        Self::from_links(schema, rels, &links, root_rel)
    }

    fn from_links(
        schema: Arc<QuerySchema>,
        rels: Vec<usize>,
        links: &[(usize, usize)],
        root_rel: usize,
    ) -> Result<Self> {
        let n = rels.len();
        let root = rels
            .iter()
            .position(|&r| r == root_rel)
            .ok_or_else(|| Error::InvalidRoot(schema.relations[root_rel].name.clone()))?;
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in links {
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        let mut nodes: Vec<JoinNode> = rels
            .iter()
            .map(|&rel| JoinNode {
                rel,
                parent: None,
                children: Vec::new(),
                anchor: Vec::new(),
                subtree_projection: Vec::new(),
            })
            .collect();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    nodes[v].parent = Some(u);
                    nodes[u].children.push(v);
                    queue.push_back(v);
                }
            }
        }
        if order.len() != n || links.len() != n - 1 {
            return Err(Error::InvalidQuery("join tree links do not form a tree".into()));
        }
        for i in 0..n {
            if let Some(p) = nodes[i].parent {
                let pa = &schema.relations[nodes[p].rel].attrs;
                nodes[i].anchor = schema.relations[nodes[i].rel]
                    .attrs
                    .iter()
                    .copied()
                    .filter(|a| pa.contains(a))
                    .collect();
            }
        }
        for &u in order.iter().rev() {
            let mut set: BTreeSet<AttrId> = schema.relations[nodes[u].rel]
                .attrs
                .iter()
                .copied()
                .filter(|a| schema.is_projected(*a))
                .collect();
            for &c in &nodes[u].children {
                set.extend(nodes[c].subtree_projection.iter().copied());
            }
            nodes[u].subtree_projection = schema.projection.iter().copied().filter(|a| set.contains(a)).collect();
        }
        let mut tree = JoinTree {
            schema,
            nodes,
            root,
            attr_order: Vec::new(),
        };
        tree.validate()?;
        let mut attr_order = Vec::new();
        tree.in_order(tree.root, &mut attr_order);
        tree.attr_order = attr_order;
        Ok(tree)
    }

    fn in_order(&self, u: usize, out: &mut Vec<AttrId>) {
        let node = &self.nodes[u];
        let mut kids = node.children.iter();
        if let Some(&first) = kids.next() {
            self.in_order(first, out);
        }
        for &a in &self.schema.relations[node.rel].attrs {
            if self.schema.is_projected(a) && !node.anchor.contains(&a) && !out.contains(&a) {
                out.push(a);
            }
        }
        for &c in kids {
            self.in_order(c, out);
        }
    }

    /// Checks the connectedness condition: for every attribute, the nodes
    /// holding it induce a connected subgraph of the tree.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                adj[i].push(p);
                adj[p].push(i);
            }
        }
        let mut attrs: BTreeSet<AttrId> = BTreeSet::new();
        for node in &self.nodes {
            attrs.extend(self.schema.relations[node.rel].attrs.iter().copied());
        }
        for a in attrs {
            let holders: Vec<usize> = (0..n).filter(|&i| self.attrs_of(i).contains(&a)).collect();
            let mut seen = vec![false; n];
            let mut stack = vec![holders[0]];
            seen[holders[0]] = true;
            let mut reached = 0;
            while let Some(u) = stack.pop() {
                reached += 1;
                for &v in &adj[u] {
                    if !seen[v] && self.attrs_of(v).contains(&a) {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            if reached != holders.len() {
                return Err(Error::InvalidQuery(format!(
                    "attribute `{}` is not connected in the join tree",
                    self.schema.attrs[a]
                )));
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> &Arc<QuerySchema> {
        &self.schema
    }

    pub fn nodes(&self) -> &[JoinNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &JoinNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn attrs_of(&self, node: usize) -> &[AttrId] {
        &self.schema.relations[self.nodes[node].rel].attrs
    }

    pub fn name_of(&self, node: usize) -> &str {
        &self.schema.relations[self.nodes[node].rel].name
    }

    /// Projection attributes in in-order traversal order.
    pub fn attr_order(&self) -> &[AttrId] {
        &self.attr_order
    }

    /// Nodes children-before-parents.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((u, done)) = stack.pop() {
            if done {
                out.push(u);
            } else {
                stack.push((u, true));
                for &c in self.nodes[u].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Projection attributes of `node` that are not anchors: each projection
    /// attribute is owned by the highest node that holds it.
    pub fn owned_projection(&self, node: usize) -> Vec<AttrId> {
        let attrs = self.attrs_of(node);
        self.schema
            .projection
            .iter()
            .copied()
            .filter(|a| attrs.contains(a) && !self.nodes[node].anchor.contains(a))
            .collect()
    }

    /// The same tree restricted to `keep` (node ids), rooted at `new_root`.
    /// Caller guarantees the kept nodes stay connected.
    pub fn restricted(&self, keep: &[usize], new_root: usize) -> Result<Self> {
        let rels: Vec<usize> = keep.iter().map(|&i| self.nodes[i].rel).collect();
        let mut links = Vec::new();
        for (pos, &i) in keep.iter().enumerate() {
            if let Some(p) = self.nodes[i].parent {
                if let Some(pp) = keep.iter().position(|&k| k == p) {
                    links.push((pos, pp));
                }
            }
        }
        Self::from_links(self.schema.clone(), rels, &links, self.nodes[new_root].rel)
    }

    /// Same undirected tree, rooted at another relation.
    pub fn rerooted(&self, rel_name: &str) -> Result<Self> {
        let rel = self
            .schema
            .relation_id(rel_name)
            .ok_or_else(|| Error::InvalidRoot(rel_name.to_string()))?;
        let node = self
            .nodes
            .iter()
            .position(|n| n.rel == rel)
            .ok_or_else(|| Error::InvalidRoot(rel_name.to_string()))?;
        let keep: Vec<usize> = (0..self.nodes.len()).collect();
        self.restricted(&keep, node)
    }
}

/// GYO reduction. Returns tree links `(child, parent)` between edge indices,
/// or `None` when the hypergraph is cyclic.
pub fn gyo_links(edges: &[BTreeSet<AttrId>]) -> Option<Vec<(usize, usize)>> {
    let n = edges.len();
    let mut work: Vec<BTreeSet<AttrId>> = edges.to_vec();
    let mut alive = vec![true; n];
    let mut links = Vec::new();
    let mut remaining = n;
    loop {
        let mut changed = false;
        // drop attributes private to a single live edge
        let mut count = std::collections::BTreeMap::<AttrId, usize>::new();
        for (i, e) in work.iter().enumerate() {
            if alive[i] {
                for &a in e {
                    *count.entry(a).or_default() += 1;
                }
            }
        }
        for (i, e) in work.iter_mut().enumerate() {
            if alive[i] {
                let before = e.len();
                e.retain(|a| count[a] > 1);
                changed |= e.len() != before;
            }
        }
        // drop edges contained in another live edge
        for i in 0..n {
            if !alive[i] || remaining == 1 {
                continue;
            }
            let witness = (0..n).find(|&j| j != i && alive[j] && work[i].is_subset(&work[j]));
            if let Some(j) = witness {
                alive[i] = false;
                remaining -= 1;
                links.push((i, j));
                changed = true;
            }
        }
        if remaining == 1 {
            return Some(links);
        }
        if !changed {
            return None;
        }
    }
}

pub fn is_acyclic(edges: &[BTreeSet<AttrId>]) -> bool {
    edges.is_empty() || gyo_links(edges).is_some()
}
