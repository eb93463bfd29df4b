use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rankenum::engine::{open, Mode};
use rankenum::harness::bench::{run_bench, BenchMode, BenchReport};
use rankenum::harness::oracle::{first_mismatch, oracle_spec};
use rankenum::harness::profile::profile_delay;
use rankenum::harness::synth::{gen_relation, seed_or_env, SynthKind};
use rankenum::query::{Catalog, QuerySpec};
use rankenum::ranking::OutputTuple;
use rankenum::relation::Value;
use rankenum::stream::Enumerator;
use rankenum::weights::{load_weights, WeightMap};

#[derive(Parser)]
#[command(name = "rankenum", version, about = "Ranked enumeration of join-project queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream the ranked answers of a query.
    Run {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the brute-force answers of a query.
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print a histogram of priority-queue operations per answer.
    Profile {
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Time one or more modes and print one CSV row each.
    Bench {
        #[command(flatten)]
        query: QueryArgs,
        /// Comma-separated: acyclic, lexi, star, oracle, baseline.
        #[arg(long, value_delimiter = ',', default_value = "acyclic")]
        modes: Vec<String>,
    },
    /// Compare the engine's output with the oracle.
    Validate {
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Write a synthetic binary relation as CSV.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        domain: usize,
        /// Zipf exponent.
        #[arg(long, default_value_t = 1.2)]
        s: f64,
        /// Overridden by RANKENUM_SEED when set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "src,dst")]
        attrs: Vec<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    query: PathBuf,
    /// CSV of attribute,value,weight rows.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Overrides the query's limit.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value = "acyclic")]
    mode: String,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Zipf,
    Bipartite,
}

/// Failures that signal a broken engine rather than bad input.
#[derive(Debug)]
struct InvariantViolation(String);

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvariantViolation {}

struct Loaded {
    spec: QuerySpec,
    catalog: Catalog,
    weights: WeightMap,
    mode: Mode,
}

impl QueryArgs {
    fn load(&self) -> Result<Loaded> {
        let mut spec = QuerySpec::from_json_file(&self.query)?;
        if self.limit.is_some() {
            spec.limit = self.limit;
        }
        let weights = load_weights(self.weights.as_deref(), &[])?;
        Ok(Loaded {
            spec,
            catalog: Catalog::new(),
            weights,
            mode: parse_mode(&self.mode, self.epsilon)?,
        })
    }
}

fn parse_mode(name: &str, epsilon: f64) -> Result<Mode> {
    Ok(match name.parse::<Mode>()? {
        Mode::Star { .. } => Mode::Star { epsilon },
        m => m,
    })
}

fn value_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Int(i) => (*i).into(),
        Value::Str(s) => s.to_string().into(),
    }
}

struct RowWriter<W: Write> {
    format: Format,
    csv: Option<csv::Writer<W>>,
    raw: Option<W>,
    attrs: Vec<String>,
}

impl<W: Write> RowWriter<W> {
    fn new(out: W, format: Format, attrs: Vec<String>) -> Result<Self> {
        Ok(match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let mut header = attrs.clone();
                header.push("rank".into());
                w.write_record(&header)?;
                RowWriter { format, csv: Some(w), raw: None, attrs }
            }
            Format::Jsonl => RowWriter { format, csv: None, raw: Some(out), attrs },
        })
    }

    fn write(&mut self, t: &OutputTuple) -> Result<()> {
        match self.format {
            Format::Csv => {
                let mut rec: Vec<String> = t.values.iter().map(ToString::to_string).collect();
                rec.push(t.rank.to_string());
                self.csv.as_mut().unwrap().write_record(&rec)?;
            }
            Format::Jsonl => {
                let mut obj = serde_json::Map::new();
                for (a, v) in self.attrs.iter().zip(&t.values) {
                    obj.insert(a.clone(), value_json(v));
                }
                obj.insert("rank".into(), t.rank.into());
                let w = self.raw.as_mut().unwrap();
                serde_json::to_writer(&mut *w, &obj)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        if let Some(w) = self.raw.as_mut() {
            w.flush()?;
        }
        Ok(())
    }
}

fn cmd_run(args: &QueryArgs, format: Format) -> Result<()> {
    let mut l = args.load()?;
    let mut stream = open(&l.spec, &mut l.catalog, &l.weights, l.mode)?;
    let stdout = io::stdout().lock();
    let mut out = RowWriter::new(io::BufWriter::new(stdout), format, l.spec.project.clone())?;
    while let Some(t) = stream.next_answer() {
        out.write(&t)?;
    }
    out.finish()
}

fn cmd_oracle(args: &QueryArgs, format: Format) -> Result<()> {
    let mut l = args.load()?;
    let mut answers = oracle_spec(&l.spec, &mut l.catalog, &l.weights)?;
    if let Some(k) = l.spec.limit {
        answers.truncate(k);
    }
    let stdout = io::stdout().lock();
    let mut out = RowWriter::new(io::BufWriter::new(stdout), format, l.spec.project.clone())?;
    for t in &answers {
        out.write(t)?;
    }
    out.finish()
}

fn cmd_profile(args: &QueryArgs) -> Result<()> {
    let mut l = args.load()?;
    let mut stream = open(&l.spec, &mut l.catalog, &l.weights, l.mode)?;
    let p = profile_delay(&mut stream, None);
    print!("{}", p.histogram_csv());
    eprintln!(
        "answers={} preprocessing_pq_ops={} max_pq_ops={} mean_pq_ops={:.3} p50={} p99={}",
        p.answers(),
        p.preprocessing.pq_ops(),
        p.max_pq_ops(),
        p.mean_pq_ops(),
        p.quantile(0.5),
        p.quantile(0.99)
    );
    Ok(())
}

fn cmd_bench(args: &QueryArgs, modes: &[String]) -> Result<()> {
    let mut l = args.load()?;
    let name = args
        .query
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "query".into());
    println!("{}", BenchReport::CSV_HEADER);
    for m in modes {
        let mode = match m.as_str() {
            "oracle" => BenchMode::Oracle,
            "baseline" => BenchMode::Baseline,
            other => BenchMode::Engine(parse_mode(other, args.epsilon)?),
        };
        let r = run_bench(&name, &l.spec, &mut l.catalog, &l.weights, mode, None)?;
        println!("{}", r.csv_row());
    }
    Ok(())
}

fn cmd_validate(args: &QueryArgs) -> Result<()> {
    let mut l = args.load()?;
    let mut stream = open(&l.spec, &mut l.catalog, &l.weights, l.mode)?;
    let got = rankenum::stream::drain(&mut stream, None);
    let mut want = oracle_spec(&l.spec, &mut l.catalog, &l.weights)?;
    if let Some(k) = l.spec.limit {
        want.truncate(k);
    }
    match first_mismatch(&got, &want) {
        None => {
            println!("MATCH ({} rows)", got.len());
            Ok(())
        }
        Some(i) => {
            let show = |v: &[OutputTuple]| v.get(i).map_or("<end>".to_string(), |t| format!("{:?} rank {}", t.values, t.rank));
            println!("MISMATCH at row {}: engine {} vs oracle {}", i + 1, show(&got), show(&want));
            Err(InvariantViolation(format!("engine output differs from oracle at row {}", i + 1)).into())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(kind: Kind, n: usize, domain: usize, s: f64, seed: u64, attrs: &[String], out: Option<&Path>) -> Result<()> {
    let [a, b] = attrs else {
        bail!("--attrs needs exactly two names");
    };
    let kind = match kind {
        Kind::Uniform => SynthKind::Uniform { n, domain },
        Kind::Zipf => SynthKind::Zipf { n, domain, s },
        Kind::Bipartite => SynthKind::Bipartite { n },
    };
    let rel = gen_relation(&kind, "gen", [a, b], seed_or_env(seed))?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(io::BufWriter::new(sink));
    w.write_record(rel.schema())?;
    for t in rel.tuples() {
        w.write_record(t.iter().map(ToString::to_string))?;
    }
    w.flush()?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { query, format } => cmd_run(&query, format),
        Command::Oracle { query, format } => cmd_oracle(&query, format),
        Command::Profile { query } => cmd_profile(&query),
        Command::Bench { query, modes } => cmd_bench(&query, &modes),
        Command::Validate { query } => cmd_validate(&query),
        Command::Gen {
            kind,
            n,
            domain,
            s,
            seed,
            attrs,
            out,
        } => cmd_gen(kind, n, domain, s, seed, &attrs, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| dispatch(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) if e.is::<InvariantViolation>() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(2),
    }
}
