//! Dictionary-encoded relations.
//!
//! Every attribute gets an order-preserving dictionary: code order equals
//! value order, so engines compare `u32` codes instead of values. Attributes
//! shared by several relations share one dictionary, which makes natural
//! joins plain code equality.

use std::collections::HashMap;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::join_tree::{AttrId, QuerySchema};
use crate::relation::{Relation, Value};
use crate::weights::WeightMap;

pub type Key = SmallVec<[u32; 4]>;

/// Sorted distinct values of one attribute with their weights.
#[derive(Debug, Clone, Default)]
pub struct Domain {
    pub values: Vec<Value>,
    pub weights: Vec<f64>,
}

impl Domain {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn code(&self, v: &Value) -> Option<u32> {
        self.values.binary_search(v).ok().map(|i| i as u32)
    }
}

/// Row-major relation over codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedRelation {
    pub attrs: Vec<AttrId>,
    data: Vec<u32>,
}

impl EncodedRelation {
    pub fn new(attrs: Vec<AttrId>, data: Vec<u32>) -> Self {
        debug_assert!(attrs.is_empty() || data.len().is_multiple_of(attrs.len()));
        EncodedRelation { attrs, data }
    }

    pub fn arity(&self) -> usize {
        self.attrs.len()
    }

    pub fn len(&self) -> usize {
        if self.attrs.is_empty() {
            0
        } else {
            self.data.len() / self.attrs.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let k = self.attrs.len();
        &self.data[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.attrs.len().max(1))
    }

    pub fn position(&self, attr: AttrId) -> Option<usize> {
        self.attrs.iter().position(|&a| a == attr)
    }

    /// Column positions of `attrs`, in the given order.
    pub fn positions(&self, attrs: &[AttrId]) -> Vec<usize> {
        attrs
            .iter()
            .map(|&a| self.position(a).expect("attribute not in relation"))
            .collect()
    }

    pub fn key(&self, row: usize, positions: &[usize]) -> Key {
        let r = self.row(row);
        positions.iter().map(|&p| r[p]).collect()
    }

    pub fn retain_rows(&mut self, mut keep: impl FnMut(&[u32]) -> bool) {
        let k = self.attrs.len();
        if k == 0 {
            return;
        }
        let mut out = Vec::with_capacity(self.data.len());
        for r in self.data.chunks_exact(k) {
            if keep(r) {
                out.extend_from_slice(r);
            }
        }
        self.data = out;
    }

    /// Rows selected by index, in the given order.
    pub fn select(&self, rows: &[u32]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.arity());
        for &r in rows {
            data.extend_from_slice(self.row(r as usize));
        }
        EncodedRelation::new(self.attrs.clone(), data)
    }

    /// Projection onto `attrs` with duplicates removed.
    pub fn project(&self, attrs: &[AttrId]) -> Self {
        let pos = self.positions(attrs);
        let mut rows: Vec<Key> = (0..self.len()).map(|i| self.key(i, &pos)).collect();
        rows.sort_unstable();
        rows.dedup();
        EncodedRelation::new(attrs.to_vec(), rows.into_iter().flatten().collect())
    }
}

/// A query's relations encoded against shared per-attribute dictionaries.
#[derive(Debug, Clone)]
pub struct Instance {
    pub schema: Arc<QuerySchema>,
    pub domains: Arc<Vec<Domain>>,
    pub relations: Vec<EncodedRelation>,
}

impl Instance {
    /// `relations[i]` must carry the attributes of `schema.relations[i]`
    /// (by name, any column order).
    pub fn encode(schema: Arc<QuerySchema>, relations: &[Relation], wm: &WeightMap) -> Result<Self> {
        if relations.len() != schema.relations.len() {
            return Err(Error::InvalidQuery("relation count does not match schema".into()));
        }
        let mut values: Vec<Vec<Value>> = vec![Vec::new(); schema.attrs.len()];
        let mut cols: Vec<Vec<usize>> = Vec::with_capacity(relations.len());
        for (rel, rs) in relations.iter().zip(&schema.relations) {
            let c: Vec<usize> = rs
                .attrs
                .iter()
                .map(|&a| {
                    rel.position(&schema.attrs[a]).ok_or_else(|| {
                        Error::InvalidQuery(format!(
                            "relation `{}` lacks attribute `{}`",
                            rel.name(),
                            schema.attrs[a]
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            for t in rel.tuples() {
                for (&a, &p) in rs.attrs.iter().zip(&c) {
                    values[a].push(t[p].clone());
                }
            }
            cols.push(c);
        }
        let mut domains = Vec::with_capacity(values.len());
        for (a, mut vals) in values.into_iter().enumerate() {
            vals.sort_unstable();
            vals.dedup();
            if vals.windows(2).any(|w| w[0].as_int().is_some() != w[1].as_int().is_some()) {
                return Err(Error::InvalidQuery(format!(
                    "attribute `{}` mixes integers and strings across relations",
                    schema.attrs[a]
                )));
            }
            let weights = vals.iter().map(|v| wm.weight(&schema.attrs[a], v)).collect();
            domains.push(Domain { values: vals, weights });
        }
        let mut encoded = Vec::with_capacity(relations.len());
        for ((rel, rs), c) in relations.iter().zip(&schema.relations).zip(&cols) {
            let lookup: Vec<HashMap<&Value, u32>> = rs
                .attrs
                .iter()
                .map(|&a| {
                    domains[a]
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v, i as u32))
                        .collect()
                })
                .collect();
            let mut data = Vec::with_capacity(rel.len() * rs.attrs.len());
            for t in rel.tuples() {
                for (j, &p) in c.iter().enumerate() {
                    data.push(lookup[j][&t[p]]);
                }
            }
            let mut er = EncodedRelation::new(rs.attrs.clone(), data);
            // column reordering can only permute; set semantics already hold
            dedup_rows(&mut er);
            encoded.push(er);
        }
        Ok(Instance {
            schema,
            domains: Arc::new(domains),
            relations: encoded,
        })
    }

    pub fn size(&self) -> usize {
        self.relations.iter().map(EncodedRelation::len).sum()
    }

    pub fn value(&self, attr: AttrId, code: u32) -> &Value {
        &self.domains[attr].values[code as usize]
    }
}

fn dedup_rows(r: &mut EncodedRelation) {
    let k = r.arity();
    if k == 0 {
        return;
    }
    let mut rows: Vec<&[u32]> = r.data.chunks_exact(k).collect();
    rows.sort_unstable();
    rows.dedup();
    let data: Vec<u32> = rows.into_iter().flatten().copied().collect();
    r.data = data;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::join_tree::tests::schema;

    #[test]
    fn codes_preserve_order_and_share_dictionaries() {
        let s = schema(&[("R", &["A", "B"]), ("S", &["B", "C"])], &["A", "C"]);
        let r = Relation::from_ints("R", &["A", "B"], &[&[5, 10], &[1, 30]]);
        // columns in the other order on purpose
        let t = Relation::from_ints("S", &["C", "B"], &[&[7, 30], &[8, 20]]);
        let inst = Instance::encode(s, &[r, t], &WeightMap::identity()).unwrap();
        let b = inst.schema.attr_id("B").unwrap();
        let vals: Vec<i64> = inst.domains[b].values.iter().map(|v| v.as_int().unwrap()).collect();
        assert_eq!(vals, [10, 20, 30]);
        assert_eq!(inst.domains[b].weights, [10.0, 20.0, 30.0]);
        // S is stored in schema order (B, C)
        assert_eq!(inst.relations[1].attrs, vec![b, inst.schema.attr_id("C").unwrap()]);
        assert_eq!(inst.relations[1].row(0), &[1, 1]);
    }

    #[test]
    fn mixed_tags_across_relations_rejected() {
        let s = schema(&[("R", &["A"]), ("S", &["A"])], &["A"]);
        let r = Relation::from_ints("R", &["A"], &[&[1]]);
        let t = Relation::new("S", vec!["A".into()], vec![vec![Value::str("x")]]).unwrap();
        assert!(Instance::encode(s, &[r, t], &WeightMap::identity()).is_err());
    }
}
