//! Seeded synthetic relations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::error::{Error, Result};
use crate::relation::{Relation, Value};

/// Environment variable that overrides every generator seed.
pub const SEED_ENV: &str = "RANKENUM_SEED";

pub fn seed_or_env(default: u64) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// `n` edges, both endpoints uniform over `1..=domain`.
    Uniform { n: usize, domain: usize },
    /// `n` edges; the first endpoint follows Zipf(`domain`, `s`), the second
    /// is uniform.
    Zipf { n: usize, domain: usize, s: f64 },
    /// Complete bipartite graph between `1..=n` and `1..=n`.
    Bipartite { n: usize },
}

impl SynthKind {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        match *self {
            SynthKind::Uniform { domain: 0, .. } => bad("domain must be positive"),
            SynthKind::Zipf { domain: 0, .. } => bad("domain must be positive"),
            SynthKind::Zipf { s, .. } if s.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !s.is_finite() => bad("zipf exponent must be positive"),
            _ => Ok(()),
        }
    }
}

/// A binary relation `name(attrs[0], attrs[1])` drawn from `kind`.
/// Duplicate draws collapse, so the result can hold fewer than `n` tuples.
pub fn gen_relation(kind: &SynthKind, name: &str, attrs: [&str; 2], seed: u64) -> Result<Relation> {
    kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(i64, i64)> = match *kind {
        SynthKind::Uniform { n, domain } => (0..n)
            .map(|_| (rng.gen_range(1..=domain as i64), rng.gen_range(1..=domain as i64)))
            .collect(),
        SynthKind::Zipf { n, domain, s } => {
            let z = Zipf::new(domain as u64, s).map_err(|e| Error::InvalidParams(e.to_string()))?;
            (0..n)
                .map(|_| (z.sample(&mut rng) as i64, rng.gen_range(1..=domain as i64)))
                .collect()
        }
        SynthKind::Bipartite { n } => (1..=n as i64).flat_map(|a| (1..=n as i64).map(move |b| (a, b))).collect(),
    };
    Relation::new(
        name,
        vec![attrs[0].to_string(), attrs[1].to_string()],
        pairs.into_iter().map(|(a, b)| vec![Value::Int(a), Value::Int(b)]).collect(),
    )
}

/// The edge relation `E(src, dst)`.
pub fn gen_synthetic(kind: &SynthKind, seed: u64) -> Result<Relation> {
    gen_relation(kind, "E", ["src", "dst"], seed)
}

/// One relation per atom, each with its own seed derived from `seed`.
pub fn gen_atoms(kind: &SynthKind, atoms: &[(&str, [&str; 2])], seed: u64) -> Result<Vec<Relation>> {
    atoms
        .iter()
        .enumerate()
        .map(|(i, (name, attrs))| gen_relation(kind, name, *attrs, seed.wrapping_mul(1_000_003).wrapping_add(i as u64)))
        .collect()
}
