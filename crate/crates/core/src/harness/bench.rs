//! Timed runs reported as CSV rows.

use std::fmt;
use std::time::Instant;

use crate::engine::{open, Mode, Stream};
use crate::error::Result;
use crate::harness::baseline::BaselineStream;
use crate::harness::oracle::oracle_spec;
use crate::query::{bind, Catalog, QuerySpec};
use crate::stream::{drain, Counters, VecStream};
use crate::weights::WeightMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchMode {
    Engine(Mode),
    Oracle,
    Baseline,
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchMode::Engine(Mode::Acyclic) => f.write_str("acyclic"),
            BenchMode::Engine(Mode::Lexi) => f.write_str("lexi"),
            BenchMode::Engine(Mode::Star { epsilon }) => write!(f, "star({epsilon})"),
            BenchMode::Oracle => f.write_str("oracle"),
            BenchMode::Baseline => f.write_str("baseline"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub query: String,
    pub mode: BenchMode,
    pub k: Option<usize>,
    pub answers: usize,
    pub wall_ms: f64,
    pub peak_cells: u64,
    pub counters: Counters,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str =
        "query,mode,k,answers,wall_ms,peak_cells,pq_push,pq_pop,topdown_calls,nontrivial_topdown,ops";

    pub fn csv_row(&self) -> String {
        let c = &self.counters;
        format!(
            "{},{},{},{},{:.3},{},{},{},{},{},{}",
            self.query,
            self.mode,
            self.k.map(|k| k.to_string()).unwrap_or_else(|| "all".into()),
            self.answers,
            self.wall_ms,
            self.peak_cells,
            c.pq_push,
            c.pq_pop,
            c.topdown_calls,
            c.nontrivial_topdown,
            c.ops
        )
    }
}

/// Opens `spec` in `mode`, pulls `k` answers (all when `None`) and times
/// preprocessing plus enumeration.
pub fn run_bench(
    name: &str,
    spec: &QuerySpec,
    catalog: &mut Catalog,
    wm: &WeightMap,
    mode: BenchMode,
    k: Option<usize>,
) -> Result<BenchReport> {
    let start = Instant::now();
    let mut stream: Stream = match mode {
        BenchMode::Engine(m) => open(spec, catalog, wm, m)?,
        BenchMode::Oracle => Box::new(VecStream::new(oracle_spec(spec, catalog, wm)?)),
        BenchMode::Baseline => Box::new(BaselineStream::new(&bind(spec, catalog)?, wm)?),
    };
    let k = k.or(spec.limit);
    let answers = drain(&mut stream, k).len();
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let counters = stream.counters();
    Ok(BenchReport {
        query: name.to_string(),
        mode,
        k,
        answers,
        wall_ms,
        peak_cells: counters.cells,
        counters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::RelationSpec;
    use crate::ranking::RankingFunction;
    use crate::reduce::tests::running_example;

    #[test]
    fn modes_agree_on_answer_count() {
        let mut cat = Catalog::new();
        for r in running_example() {
            cat.insert(r);
        }
        let spec = QuerySpec::new(
            vec![
                RelationSpec::named("R1", "R1", &["A", "B"]),
                RelationSpec::named("R2", "R2", &["B", "C"]),
                RelationSpec::named("R3", "R3", &["C", "D"]),
                RelationSpec::named("R4", "R4", &["D", "E"]),
            ],
            &["A", "E"],
            RankingFunction::Sum,
        );
        let wm = WeightMap::identity();
        for mode in [BenchMode::Engine(Mode::Acyclic), BenchMode::Oracle, BenchMode::Baseline] {
            let r = run_bench("4path", &spec, &mut cat, &wm, mode, None).unwrap();
            assert_eq!(r.answers, 6, "{mode}");
            assert_eq!(r.csv_row().split(',').count(), BenchReport::CSV_HEADER.split(',').count());
        }
    }
}
