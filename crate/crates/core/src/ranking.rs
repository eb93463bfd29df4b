//! Ranking functions and the output comparator shared by every engine mode
//! and by the oracle.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{Tuple, Value};
use crate::weights::WeightMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Asc,
    Desc,
}

impl Direction {
    pub fn apply(self, ord: Ordering) -> Ordering {
        match self {
            Direction::Asc => ord,
            Direction::Desc => ord.reverse(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankingFunction {
    /// Sum of attribute weights; ties broken lexicographically (ascending)
    /// over the projection list.
    Sum,
    /// Attribute-by-attribute comparison, each attribute with its own
    /// direction. Must list every projection attribute exactly once.
    Lex(Vec<(String, Direction)>),
}

impl RankingFunction {
    pub fn lex_asc(attrs: &[&str]) -> Self {
        RankingFunction::Lex(attrs.iter().map(|a| (a.to_string(), Direction::Asc)).collect())
    }

    pub fn is_lex(&self) -> bool {
        matches!(self, RankingFunction::Lex(_))
    }

    /// Checks the LEX attribute list against the projection.
    pub fn validate(&self, projection: &[String]) -> Result<()> {
        if let RankingFunction::Lex(list) = self {
            let mut seen: Vec<&str> = list.iter().map(|(a, _)| a.as_str()).collect();
            seen.sort_unstable();
            let mut proj: Vec<&str> = projection.iter().map(String::as_str).collect();
            proj.sort_unstable();
            if seen != proj {
                return Err(Error::InvalidQuery(format!(
                    "lexicographic order {seen:?} is not a permutation of the projection {proj:?}"
                )));
            }
        }
        Ok(())
    }

    /// Sort keys as (projection position, direction), most significant first.
    pub fn sort_keys(&self, projection: &[String]) -> Result<Vec<(usize, Direction)>> {
        self.validate(projection)?;
        Ok(match self {
            RankingFunction::Sum => (0..projection.len()).map(|i| (i, Direction::Asc)).collect(),
            RankingFunction::Lex(list) => list
                .iter()
                .map(|(a, d)| (projection.iter().position(|p| p == a).unwrap(), *d))
                .collect(),
        })
    }
}

impl fmt::Display for RankingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankingFunction::Sum => f.write_str("sum"),
            RankingFunction::Lex(list) => {
                f.write_str("lex(")?;
                for (i, (a, d)) in list.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a} {}", if *d == Direction::Asc { "asc" } else { "desc" })?;
                }
                f.write_str(")")
            }
        }
    }
}

/// One answer: values over the ordered projection plus its SUM score.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTuple {
    pub values: Tuple,
    pub rank: f64,
}

/// SUM of weights over the projection, accumulated left to right from 0.
///
/// The engine accumulates partial answers in the same order, so ranks agree
/// bit for bit.
pub fn rank_of(values: &[Value], projection: &[String], wm: &WeightMap) -> f64 {
    values
        .iter()
        .zip(projection)
        .fold(0.0, |acc, (v, a)| acc + wm.weight(a, v))
}

/// Precomputed form of [`compare_outputs`] for repeated use.
#[derive(Debug, Clone)]
pub struct OutputOrder {
    projection: Vec<String>,
    keys: Vec<(usize, Direction)>,
    sum: bool,
}

impl OutputOrder {
    pub fn new(projection: &[String], rf: &RankingFunction) -> Result<Self> {
        Ok(OutputOrder {
            projection: projection.to_vec(),
            keys: rf.sort_keys(projection)?,
            sum: !rf.is_lex(),
        })
    }

    pub fn projection(&self) -> &[String] {
        &self.projection
    }

    pub fn compare(&self, t1: &[Value], t2: &[Value], wm: &WeightMap) -> Ordering {
        if self.sum {
            let r1 = rank_of(t1, &self.projection, wm);
            let r2 = rank_of(t2, &self.projection, wm);
            let ord = r1.total_cmp(&r2);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.compare_keys(t1, t2)
    }

    /// Compares two answers whose ranks are already known.
    pub fn compare_ranked(&self, a: &OutputTuple, b: &OutputTuple) -> Ordering {
        if self.sum {
            let ord = a.rank.total_cmp(&b.rank);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.compare_keys(&a.values, &b.values)
    }

    fn compare_keys(&self, t1: &[Value], t2: &[Value]) -> Ordering {
        for &(pos, dir) in &self.keys {
            let ord = dir.apply(t1[pos].cmp(&t2[pos]));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

/// Total order on answers over the same ordered projection.
///
/// SUM compares the weight sums and breaks ties lexicographically over the
/// projection list; LEX compares attribute by attribute honoring directions.
/// Returns `Equal` exactly when the tuples are identical.
pub fn compare_outputs(
    t1: &[Value],
    t2: &[Value],
    projection: &[String],
    rf: &RankingFunction,
    wm: &WeightMap,
) -> Ordering {
    OutputOrder::new(projection, rf)
        .expect("ranking function does not match projection")
        .compare(t1, t2, wm)
}
