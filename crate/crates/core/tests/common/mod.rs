#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankenum::engine::{encode, open_bound, prepare_acyclic, Mode};
use rankenum::harness::oracle::oracle_enumerate;
use rankenum::harness::profile::profile_delay;
use rankenum::harness::synth::{gen_atoms, SynthKind};
use rankenum::query::{bind, BagSpec, BoundQuery, Catalog, CmpOp, Filter, Operand, QuerySpec, RelationSpec};
use rankenum::ranking::{Direction, OutputTuple, RankingFunction};
use rankenum::relation::Relation;
use rankenum::weights::WeightMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    TwoPath,
    ThreePath,
    FourPath,
    ThreeStar,
    FreeConnex,
    FullTwoPath,
}

pub const SHAPES: [Shape; 6] = [
    Shape::TwoPath,
    Shape::ThreePath,
    Shape::FourPath,
    Shape::ThreeStar,
    Shape::FreeConnex,
    Shape::FullTwoPath,
];

impl Shape {
    pub fn atoms(self) -> Vec<(&'static str, [&'static str; 2])> {
        match self {
            Shape::TwoPath | Shape::FullTwoPath => vec![("R1", ["A", "B"]), ("R2", ["B", "C"])],
            Shape::ThreePath | Shape::FreeConnex => {
                vec![("R1", ["A", "B"]), ("R2", ["B", "C"]), ("R3", ["C", "D"])]
            }
            Shape::FourPath => vec![("R1", ["A", "B"]), ("R2", ["B", "C"]), ("R3", ["C", "D"]), ("R4", ["D", "E"])],
            Shape::ThreeStar => vec![("R1", ["A1", "B"]), ("R2", ["A2", "B"]), ("R3", ["A3", "B"])],
        }
    }

    pub fn projection(self) -> Vec<&'static str> {
        match self {
            Shape::TwoPath => vec!["A", "C"],
            Shape::ThreePath => vec!["A", "D"],
            Shape::FourPath => vec!["A", "E"],
            Shape::ThreeStar => vec!["A1", "A2", "A3"],
            Shape::FreeConnex => vec!["A", "B", "C"],
            Shape::FullTwoPath => vec!["A", "B", "C"],
        }
    }

    pub fn is_star(self) -> bool {
        self == Shape::ThreeStar
    }

    pub fn is_full(self) -> bool {
        matches!(self, Shape::FullTwoPath | Shape::FreeConnex)
    }
}

pub fn spec_for(shape: Shape, rf: RankingFunction) -> QuerySpec {
    let rels = shape
        .atoms()
        .into_iter()
        .map(|(n, a)| RelationSpec::named(n, n, &a))
        .collect();
    QuerySpec::new(rels, &shape.projection(), rf)
}

pub fn bound(shape: Shape, rels: &[Relation], rf: RankingFunction) -> BoundQuery {
    let mut cat = Catalog::new();
    for r in rels {
        cat.insert(r.clone());
    }
    bind(&spec_for(shape, rf), &mut cat).unwrap()
}

pub fn random_lex(projection: &[&str], rng: &mut ChaCha8Rng) -> RankingFunction {
    let mut attrs: Vec<&str> = projection.to_vec();
    attrs.shuffle(rng);
    RankingFunction::Lex(
        attrs
            .into_iter()
            .map(|a| {
                let d = if rng.gen_bool(0.5) { Direction::Asc } else { Direction::Desc };
                (a.to_string(), d)
            })
            .collect(),
    )
}

/// Random instance with total size near `db`.
pub fn random_relations(shape: Shape, db: usize, zipf: bool, seed: u64) -> Vec<Relation> {
    let atoms = shape.atoms();
    let n = (db / atoms.len()).max(1);
    let domain = ((n as f64).sqrt() as usize).max(2);
    let kind = if zipf {
        SynthKind::Zipf { n, domain, s: 1.1 }
    } else {
        SynthKind::Uniform { n, domain }
    };
    gen_atoms(&kind, &atoms, seed).unwrap()
}

pub fn same_sequence(got: &[OutputTuple], want: &[OutputTuple]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("length {} vs oracle {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        let tol = 1e-9 * w.rank.abs().max(1.0);
        if g.values != w.values || (g.rank - w.rank).abs() > tol {
            return Err(format!("answer {i}: {:?}/{} vs oracle {:?}/{}", g.values, g.rank, w.values, w.rank));
        }
    }
    Ok(())
}

/// Outcome of the randomized sweep.
#[derive(Debug, Default, Clone)]
pub struct SweepStats {
    pub instances: usize,
    pub runs: usize,
    pub mismatches: Vec<String>,
    /// Violations of nontrivial-topdown <= |D| or pq-ops <= 8|D|.
    pub delay_violations: Vec<String>,
    pub worst_pq_ratio: f64,
    /// Full-query answers exceeding 4 * tree nodes.
    pub full_violations: Vec<String>,
    pub full_answers_checked: usize,
    pub worst_full_ops: u64,
}

pub fn run_sweep(instances: usize, seed: u64) -> SweepStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wm = WeightMap::identity();
    let mut stats = SweepStats::default();
    for i in 0..instances {
        let shape = SHAPES[i % SHAPES.len()];
        let zipf = (i / SHAPES.len()) % 2 == 1;
        let db = rng.gen_range(10..=200);
        let rels = random_relations(shape, db, zipf, rng.gen());
        stats.instances += 1;
        let lex = random_lex(&shape.projection(), &mut rng);
        for rf in [RankingFunction::Sum, lex] {
            let q = bound(shape, &rels, rf.clone());
            let oracle = oracle_enumerate(&q, &wm).unwrap();
            let d = q.db_size() as u64;
            let tag = format!("instance {i} {shape:?} |D|={d} {rf}");

            // acyclic engine, with delay accounting
            let mut s = open_bound(&q, &wm, Mode::Acyclic).unwrap();
            let prof = profile_delay(&mut s, None);
            let mut got = Vec::new();
            let mut again = open_bound(&q, &wm, Mode::Acyclic).unwrap();
            while let Some(t) = again.next_answer() {
                got.push(t);
            }
            stats.runs += 1;
            if let Err(e) = same_sequence(&got, &oracle) {
                stats.mismatches.push(format!("{tag} acyclic: {e}"));
            }
            for (k, c) in prof.per_answer.iter().enumerate() {
                let ratio = c.pq_ops() as f64 / d.max(1) as f64;
                stats.worst_pq_ratio = stats.worst_pq_ratio.max(ratio);
                if c.nontrivial_topdown > d || c.pq_ops() > 8 * d {
                    stats.delay_violations.push(format!(
                        "{tag} answer {k}: nontrivial {} pq {}",
                        c.nontrivial_topdown,
                        c.pq_ops()
                    ));
                }
            }
            if shape.is_full() {
                let nodes = prepare_acyclic(encode(&q, &wm).unwrap(), None).unwrap().tree.len() as u64;
                for (k, c) in prof.per_answer.iter().enumerate() {
                    stats.full_answers_checked += 1;
                    stats.worst_full_ops = stats.worst_full_ops.max(c.pq_ops());
                    if c.pq_ops() > 4 * nodes {
                        stats
                            .full_violations
                            .push(format!("{tag} answer {k}: pq {} > 4*{nodes}", c.pq_ops()));
                    }
                }
            }

            if rf.is_lex() {
                let mut l = open_bound(&q, &wm, Mode::Lexi).unwrap();
                let got = rankenum::stream::drain(&mut l, None);
                stats.runs += 1;
                if let Err(e) = same_sequence(&got, &oracle) {
                    stats.mismatches.push(format!("{tag} lexi: {e}"));
                }
                if l.counters().pq_ops() != 0 {
                    stats.mismatches.push(format!("{tag} lexi used the priority queue"));
                }
            }
            if shape.is_star() {
                for eps in [0.0, 0.5, 1.0] {
                    let mut st = open_bound(&q, &wm, Mode::Star { epsilon: eps }).unwrap();
                    let got = rankenum::stream::drain(&mut st, None);
                    stats.runs += 1;
                    if let Err(e) = same_sequence(&got, &oracle) {
                        stats.mismatches.push(format!("{tag} star eps={eps}: {e}"));
                    }
                }
            }
        }
    }
    stats
}

pub fn graph(edges: usize, vertices: usize, seed: u64) -> Relation {
    rankenum::harness::synth::gen_synthetic(&SynthKind::Uniform { n: edges, domain: vertices }, seed).unwrap()
}

pub fn edge_catalog(e: &Relation) -> Catalog {
    let mut cat = Catalog::new();
    cat.insert(e.clone());
    cat
}

pub fn bag(attrs: &[&str], rels: &[&str]) -> BagSpec {
    BagSpec {
        attrs: attrs.iter().map(|s| s.to_string()).collect(),
        relations: rels.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn ne(a: &str, b: &str) -> Filter {
    Filter {
        attr: a.into(),
        op: CmpOp::Ne,
        rhs: Operand::Attr(b.into()),
    }
}

/// A cycle of `len` edge atoms `Ri(Ai, Ai+1)` over `E`.
pub fn cycle_atoms(len: usize) -> Vec<RelationSpec> {
    (1..=len)
        .map(|i| {
            let a = format!("A{i}");
            let b = format!("A{}", i % len + 1);
            RelationSpec::named("E", &format!("R{i}"), &[a.as_str(), b.as_str()])
        })
        .collect()
}

pub fn triangle(project: &[&str], rf: RankingFunction) -> QuerySpec {
    QuerySpec::new(cycle_atoms(3), project, rf).with_ghd(vec![
        bag(&["A1", "A2", "A3"], &["R1", "R2"]),
        bag(&["A3", "A1"], &["R3"]),
    ])
}

pub fn four_cycle(project: &[&str], rf: RankingFunction, distinct: bool) -> QuerySpec {
    let mut atoms = cycle_atoms(4);
    if distinct {
        atoms[1] = atoms[1].clone().with_filter(ne("A1", "A3"));
    }
    QuerySpec::new(atoms, project, rf).with_ghd(vec![
        bag(&["A1", "A2", "A3"], &["R1", "R2"]),
        bag(&["A1", "A3", "A4"], &["R3", "R4"]),
    ])
}

pub fn six_cycle(project: &[&str], rf: RankingFunction) -> QuerySpec {
    QuerySpec::new(cycle_atoms(6), project, rf).with_ghd(vec![
        bag(&["A1", "A2", "A3", "A4"], &["R1", "R2", "R3"]),
        bag(&["A1", "A4", "A5", "A6"], &["R4", "R5", "R6"]),
    ])
}

/// Paths of length 2 and 4 over `E`, both projected onto their endpoints
/// `(S, T)`.
pub fn path_union(rf: RankingFunction) -> QuerySpec {
    let p2 = QuerySpec::new(
        vec![
            RelationSpec::named("E", "P1", &["S", "M"]),
            RelationSpec::named("E", "P2", &["M", "T"]),
        ],
        &["S", "T"],
        rf.clone(),
    );
    let p4 = QuerySpec::new(
        vec![
            RelationSpec::named("E", "Q1", &["S", "X1"]),
            RelationSpec::named("E", "Q2", &["X1", "X2"]),
            RelationSpec::named("E", "Q3", &["X2", "X3"]),
            RelationSpec::named("E", "Q4", &["X3", "T"]),
        ],
        &["S", "T"],
        rf.clone(),
    );
    let mut u = QuerySpec::new(Vec::new(), &["S", "T"], rf);
    u.union = vec![p2, p4];
    u
}

/// Drains `spec` through the engine and through the oracle.
pub fn engine_and_oracle(spec: &QuerySpec, cat: &mut Catalog, mode: Mode) -> (Vec<OutputTuple>, Vec<OutputTuple>) {
    let wm = WeightMap::identity();
    let mut s = rankenum::engine::open(spec, cat, &wm, mode).unwrap();
    let got = rankenum::stream::drain(&mut s, None);
    let branches: Vec<BoundQuery> = spec.branches().iter().map(|b| bind(b, cat).unwrap()).collect();
    let want = if spec.is_union() {
        rankenum::harness::oracle::oracle_union(&branches, &wm).unwrap()
    } else {
        oracle_enumerate(&branches[0], &wm).unwrap()
    };
    (got, want)
}
