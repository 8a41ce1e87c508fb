use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use synroute::config::files;
use synroute::corpus::{load_corpus, load_queries, write_corpus, write_queries};
use synroute::eval::{
    ablation_run, collect_validation, evaluate_run, train_router, tune_thresholds, write_records_csv, write_report_csv,
    CommandJudge, ParseMap,
};
use synroute::features::{assemble_raw, write_feature_csv};
use synroute::parse::{load_parses, write_parses};
use synroute::synth::{case_study, case_study_corpus, SynthConfig, World};
use synroute::{build_engine, load_index, save_index, Config, FeatureSchema, Judge, MockJudge, Mode, Query};

#[derive(Parser)]
#[command(name = "synroute", version, about = "Complexity-aware routing between dense, graph and fused retrieval")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic corpus with train/test queries and their parses.
    Synth(SynthArgs),
    /// Build the dense and graph indexes for a corpus.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSON config; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write raw (or, with --schema, selected and standardized) features as CSV.
    Featurize {
        #[arg(long)]
        parses: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Label queries with both retrievers, fit the feature schema and train the adapter.
    TrainAdapter {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Grid-search the routing thresholds on validation queries.
    Tune {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Answer one question or a file of queries; prints one JSON result per line.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        question: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Parse records; with --question the record with id --id is used.
        #[arg(long)]
        parses: Option<PathBuf>,
        #[arg(long, default_value = "q")]
        id: String,
        #[arg(long, default_value = "full")]
        mode: Mode,
    },
    /// Run one mode over a query file and print aggregate metrics.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "full")]
        mode: Mode,
        /// Per-query CSV output.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Run every mode and write one accuracy/latency row per mode.
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 260)]
    passages: usize,
    #[arg(long, default_value_t = 200)]
    train: usize,
    #[arg(long, default_value_t = 100)]
    test: usize,
    /// Share of death-date (two-hop) questions.
    #[arg(long, default_value_t = 0.5)]
    multi_hop: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the two-question case-study fixture instead.
    #[arg(long)]
    case_study: bool,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    parses: PathBuf,
    /// External judge command, e.g. "python judge.py"; contain-match otherwise.
    #[arg(long)]
    judge: Option<String>,
}

impl DataArgs {
    fn load(&self) -> Result<(Vec<Query>, ParseMap, Box<dyn Judge>)> {
        let queries = load_queries(&self.queries).with_context(|| format!("reading {}", self.queries.display()))?;
        let parses = load_parse_map(&self.parses)?;
        let judge: Box<dyn Judge> = match &self.judge {
            None => Box::new(MockJudge),
            Some(cmd) => {
                let mut parts = cmd.split_whitespace().map(str::to_string);
                let program = parts.next().context("empty --judge command")?;
                Box::new(CommandJudge { program, args: parts.collect() })
            }
        };
        Ok((queries, parses, judge))
    }
}

/// Failed sidecar records are skipped with a warning; queries without a
/// parse then fail only in modes that need one.
fn load_parse_map(path: &FsPath) -> Result<ParseMap> {
    let recs = load_parses(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = ParseMap::new();
    for r in recs {
        match r.to_parsed() {
            Ok(pq) => {
                out.insert(r.id.clone(), pq);
            }
            Err(e) => eprintln!("warning: skipping parse {}: {e}", r.id),
        }
    }
    Ok(out)
}

fn create(path: &FsPath) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn synth(a: &SynthArgs) -> Result<()> {
    if a.case_study {
        let cs = case_study()?;
        write_corpus(a.out.join("corpus.jsonl"), &case_study_corpus()?)?;
        write_queries(a.out.join("test.jsonl"), &cs.queries)?;
        write_parses(a.out.join("test_parses.jsonl"), &cs.parses)?;
        println!("wrote case study to {}", a.out.display());
        return Ok(());
    }
    let world = World::generate(&SynthConfig::with_passages(a.passages, a.seed))?;
    write_corpus(a.out.join("corpus.jsonl"), &world.corpus)?;
    for (name, n, seed) in [("train", a.train, a.seed.wrapping_add(1)), ("test", a.test, a.seed.wrapping_add(2))] {
        let wl = world.workload(n, a.multi_hop, seed)?;
        write_queries(a.out.join(format!("{name}.jsonl")), &wl.queries)?;
        write_parses(a.out.join(format!("{name}_parses.jsonl")), &wl.parses)?;
    }
    println!(
        "wrote {} passages, {} train and {} test queries to {}",
        world.corpus.len(),
        a.train,
        a.test,
        a.out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Synth(a) => synth(&a)?,
        Cmd::Index { corpus, out, config } => {
            let cfg = match config {
                Some(p) => Config::load(&p).with_context(|| format!("reading {}", p.display()))?,
                None => Config::default(),
            };
            let corpus = load_corpus(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
            let engine = build_engine(corpus, &cfg)?;
            save_index(&engine, &cfg, &out)?;
            let (g, facts) = engine.graph.as_ref().expect("built above");
            println!(
                "indexed {} passages: {} facts, {} entities, {} synonymy edges -> {}",
                engine.corpus.len(),
                facts.len(),
                g.num_entities(),
                g.synonymy_edges().len(),
                out.display()
            );
        }
        Cmd::Featurize { parses, out, schema } => {
            let recs = load_parses(&parses).with_context(|| format!("reading {}", parses.display()))?;
            let mut rows = Vec::new();
            for r in &recs {
                match r.to_parsed().and_then(|pq| assemble_raw(&pq)) {
                    Ok(raw) => rows.push((r.id.clone(), raw)),
                    Err(e) => eprintln!("warning: skipping {}: {e}", r.id),
                }
            }
            let mut w = create(&out)?;
            match schema {
                None => write_feature_csv(&mut w, &rows)?,
                Some(p) => {
                    let schema = FeatureSchema::load(&p)?;
                    writeln!(w, "query_id,{}", schema.selected_names().join(","))?;
                    for (id, raw) in &rows {
                        let v: Vec<String> = schema.apply(raw)?.values.iter().map(f64::to_string).collect();
                        writeln!(w, "{id},{}", v.join(","))?;
                    }
                }
            }
            w.flush()?;
            println!("featurized {} of {} records -> {}", rows.len(), recs.len(), out.display());
        }
        Cmd::TrainAdapter { data } => {
            let (mut engine, cfg) = load_index(&data.index)?;
            let (queries, parses, judge) = data.load()?;
            let tr = train_router(&engine, &queries, &parses, judge.as_ref(), &cfg)?;
            println!(
                "{} disagreements, trained on {}, {} features, train accuracy {:.3}",
                tr.n_disagreements,
                tr.n_samples,
                tr.schema.dim(),
                tr.train_accuracy
            );
            engine.schema = Some(tr.schema);
            engine.adapter = Some(tr.adapter);
            save_index(&engine, &cfg, &data.index)?;
        }
        Cmd::Tune { data } => {
            let (engine, mut cfg) = load_index(&data.index)?;
            let (queries, parses, judge) = data.load()?;
            let recs = collect_validation(&engine, &queries, &parses, judge.as_ref())?;
            let (t, j) = tune_thresholds(&recs, &cfg.tune)?;
            println!("tau_low={} tau_high={} J={j:.4}", t.tau_low, t.tau_high);
            cfg.engine.thresholds = t;
            cfg.save(data.index.join(files::CONFIG))?;
        }
        Cmd::Query { index, question, file, parses, id, mode } => {
            let (engine, _) = load_index(&index)?;
            let parses = parses.as_deref().map(load_parse_map).transpose()?.unwrap_or_default();
            let queries = match (question, file) {
                (Some(text), _) => {
                    vec![Query { id, text, gold_answers: vec![], gold_passage_ids: vec![] }]
                }
                (None, Some(f)) => load_queries(&f).with_context(|| format!("reading {}", f.display()))?,
                (None, None) => bail!("one of --question or --file is required"),
            };
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for q in &queries {
                let r = engine.answer(q, parses.get(&q.id), mode)?;
                serde_json::to_writer(&mut out, &r)?;
                writeln!(out)?;
            }
        }
        Cmd::Eval { data, mode, records } => {
            let (engine, _) = load_index(&data.index)?;
            let (queries, parses, judge) = data.load()?;
            let recs = ablation_run(&engine, &queries, &parses, mode)?;
            let report = evaluate_run(&recs, &queries, judge.as_ref(), Some(mode))?;
            print!("{}", report.summary());
            if let Some(p) = records {
                let mut w = create(&p)?;
                write_records_csv(&mut w, &recs)?;
                w.flush()?;
            }
        }
        Cmd::Bench { data, csv } => {
            let (engine, _) = load_index(&data.index)?;
            let (queries, parses, judge) = data.load()?;
            let routed = engine.adapter.is_some() && engine.schema.is_some();
            let mut reports = Vec::new();
            for mode in Mode::ALL {
                if !routed && matches!(mode, Mode::Full | Mode::RoutedNoFusion) {
                    eprintln!("skipping {mode}: index has no trained adapter");
                    continue;
                }
                let recs = ablation_run(&engine, &queries, &parses, mode)?;
                let report = evaluate_run(&recs, &queries, judge.as_ref(), Some(mode))?;
                print!("{}", report.summary());
                reports.push(report);
            }
            let mut w = create(&csv)?;
            write_report_csv(&mut w, &reports)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        let broken_pipe = e.chain().any(|c| {
            let kind = c
                .downcast_ref::<std::io::Error>()
                .map(std::io::Error::kind)
                .or_else(|| c.downcast_ref::<serde_json::Error>().and_then(serde_json::Error::io_error_kind));
            kind == Some(std::io::ErrorKind::BrokenPipe)
        });
        if broken_pipe {
            return;
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
