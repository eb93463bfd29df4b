//! Per-answer work measurement.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::stream::{Counters, Enumerator};

/// Counter deltas for each answer, measured from the previous answer (or
/// from the end of preprocessing for the first one).
#[derive(Debug, Clone, Default)]
pub struct DelayProfile {
    pub per_answer: Vec<Counters>,
    /// Counters spent before the first `next` call.
    pub preprocessing: Counters,
    /// Counters spent by the call that found the stream exhausted.
    pub tail: Counters,
}

impl DelayProfile {
    pub fn answers(&self) -> usize {
        self.per_answer.len()
    }

    pub fn pq_ops(&self) -> Vec<u64> {
        self.per_answer.iter().map(Counters::pq_ops).collect()
    }

    pub fn max_pq_ops(&self) -> u64 {
        self.pq_ops().into_iter().max().unwrap_or(0)
    }

    pub fn max_ops(&self) -> u64 {
        self.per_answer.iter().map(|c| c.ops).max().unwrap_or(0)
    }

    pub fn mean_pq_ops(&self) -> f64 {
        if self.per_answer.is_empty() {
            return 0.0;
        }
        self.pq_ops().iter().sum::<u64>() as f64 / self.per_answer.len() as f64
    }

    /// Nearest-rank quantile of per-answer queue operations, `q` in [0, 1].
    pub fn quantile(&self, q: f64) -> u64 {
        let mut v = self.pq_ops();
        if v.is_empty() {
            return 0;
        }
        v.sort_unstable();
        let rank = ((q.clamp(0.0, 1.0) * v.len() as f64).ceil() as usize).clamp(1, v.len());
        v[rank - 1]
    }

    /// Queue operations per answer -> number of answers.
    pub fn histogram(&self) -> BTreeMap<u64, usize> {
        let mut h = BTreeMap::new();
        for c in self.pq_ops() {
            *h.entry(c).or_default() += 1;
        }
        h
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("pq_ops,answers\n");
        for (k, v) in self.histogram() {
            let _ = writeln!(s, "{k},{v}");
        }
        s
    }
}

/// Pulls up to `k` answers (all when `None`) from a fresh stream.
pub fn profile_delay<E: Enumerator + ?Sized>(stream: &mut E, k: Option<usize>) -> DelayProfile {
    let mut profile = DelayProfile {
        preprocessing: stream.counters(),
        ..DelayProfile::default()
    };
    let mut prev = profile.preprocessing;
    while k.is_none_or(|k| profile.per_answer.len() < k) {
        let got = stream.next_answer();
        let now = stream.counters();
        if got.is_none() {
            profile.tail = now - prev;
            break;
        }
        profile.per_answer.push(now - prev);
        prev = now;
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::OutputTuple;
    use crate::stream::VecStream;

    #[test]
    fn histogram_totals_answers() {
        let items = (0..6)
            .map(|i| OutputTuple {
                values: vec![],
                rank: i as f64,
            })
            .collect();
        let mut s = VecStream::new(items);
        let p = profile_delay(&mut s, None);
        assert_eq!(p.answers(), 6);
        assert_eq!(p.histogram().values().sum::<usize>(), 6);
        assert_eq!(p.max_pq_ops(), 0);
        assert_eq!(p.quantile(0.5), 0);
        assert!(p.histogram_csv().starts_with("pq_ops,answers\n0,6"));
    }

    #[test]
    fn limit_respected() {
        let items = (0..6)
            .map(|i| OutputTuple {
                values: vec![],
                rank: i as f64,
            })
            .collect();
        let mut s = VecStream::new(items);
        assert_eq!(profile_delay(&mut s, Some(2)).answers(), 2);
    }
}
