//! Threshold routing, score-weighted reciprocal rank fusion and the
//! per-query pipeline (featurize → score → route → retrieve → generate).

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adapter::AdapterModel;
use crate::corpus::{pack_context, Corpus, Query, RankedList};
use crate::dense::{word_tokens, DenseIndex, Encoder};
use crate::error::{Error, Result};
use crate::features::{featurize, FeatureSchema};
use crate::graph::{FactIndex, HeteroGraph};
use crate::parse::ParsedQuery;
use crate::retrieval::{graph_retrieve, run_json_command, GraphSearchConfig, Reranker};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau_low: f64,
    pub tau_high: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { tau_low: 0.3, tau_high: 0.7 }
    }
}

impl Thresholds {
    pub fn new(tau_low: f64, tau_high: f64) -> Result<Self> {
        let t = Self { tau_low, tau_high };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if 0.0 <= self.tau_low && self.tau_low < self.tau_high && self.tau_high <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidThresholds { tau_low: self.tau_low, tau_high: self.tau_high })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Path {
    Dense,
    Graph,
    Fusion,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Path::Dense => "DENSE",
            Path::Graph => "GRAPH",
            Path::Fusion => "FUSION",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub path: Path,
    pub score: f64,
}

/// GRAPH when `s ≥ τ_H`, DENSE when `s ≤ τ_L`, FUSION in between.
pub fn route(s: f64, t: &Thresholds) -> Result<RoutingDecision> {
    t.validate()?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("score {s} outside [0, 1]")));
    }
    let path = if s >= t.tau_high {
        Path::Graph
    } else if s <= t.tau_low {
        Path::Dense
    } else {
        Path::Fusion
    };
    Ok(RoutingDecision { path, score: s })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrfConfig {
    pub k_smooth: f64,
}

impl Default for RrfConfig {
    fn default() -> Self {
        Self { k_smooth: 60.0 }
    }
}

/// `(1−s)/(k + r_rag) + s/(k + r_gr)` over the union of both lists, with
/// 1-based ranks and no contribution from a list that lacks the passage.
/// Sorted by score, ties by passage id, cut to `k_out`.
pub fn weighted_rrf(rag: &RankedList, gr: &RankedList, s: f64, cfg: &RrfConfig, k_out: usize) -> RankedList {
    let mut acc: BTreeMap<&str, f64> = BTreeMap::new();
    for (i, id) in rag.ids().enumerate() {
        *acc.entry(id).or_default() += (1.0 - s) / (cfg.k_smooth + (i + 1) as f64);
    }
    for (i, id) in gr.ids().enumerate() {
        *acc.entry(id).or_default() += s / (cfg.k_smooth + (i + 1) as f64);
    }
    RankedList::from_scored(acc.into_iter().map(|(k, v)| (k.to_string(), v)).collect(), k_out)
}

/// Answer generation from packed context.
pub trait Generator: Send + Sync {
    fn generate(&self, question: &str, context: &str) -> Result<String>;
}

pub const NO_ANSWER: &str = "no answer";

const STOPWORDS: &[&str] = &[
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "by", "with", "from", "is", "was", "are", "were", "be",
    "been", "did", "do", "does", "and", "or", "what", "when", "where", "who", "whom", "which", "how", "why", "that",
    "this", "it", "its", "as",
];

/// Extractive answerer: the context sentence sharing the most distinct
/// non-stopword tokens with the question; ties go to the shorter sentence,
/// then the earlier one. Bracketed title lines are skipped.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockGenerator;

fn content_tokens(text: &str) -> HashSet<String> {
    word_tokens(text).filter(|w| !STOPWORDS.contains(&w.as_str())).collect()
}

impl Generator for MockGenerator {
    fn generate(&self, question: &str, context: &str) -> Result<String> {
        let q = content_tokens(question);
        let mut best: Option<(usize, usize, String)> = None;
        for line in context.lines() {
            let line = line.trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            for sent in crate::graph::sentences(line) {
                let sent = sent.join(" ");
                let overlap = content_tokens(&sent).intersection(&q).count();
                let len = sent.chars().count();
                let better = match &best {
                    None => true,
                    Some((o, l, _)) => overlap > *o || (overlap == *o && len < *l),
                };
                if better {
                    best = Some((overlap, len, sent));
                }
            }
        }
        Ok(match best {
            Some((o, _, s)) if o > 0 => s,
            _ => NO_ANSWER.to_string(),
        })
    }
}

/// External generator: `{"question", "context"}` on stdin, `{"answer"}` on stdout.
#[derive(Debug, Clone)]
pub struct CommandGenerator {
    pub program: String,
    pub args: Vec<String>,
}

impl Generator for CommandGenerator {
    fn generate(&self, question: &str, context: &str) -> Result<String> {
        let req = serde_json::json!({ "question": question, "context": context });
        let out = run_json_command(&self.program, &self.args, &serde_json::to_vec(&req)?)?;
        #[derive(Deserialize)]
        struct Reply {
            answer: String,
        }
        let r: Reply = serde_json::from_slice(&out).map_err(|e| Error::External(format!("generator reply: {e}")))?;
        Ok(r.answer)
    }
}

/// Which retrieval the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    /// Score, route and retrieve along the chosen path.
    Full,
    /// Always dense; the adapter is not consulted.
    DenseOnly,
    /// Always graph; the adapter is not consulted.
    GraphOnly,
    /// Routed, but the fusion band goes to GRAPH when s ≥ 0.5 and DENSE otherwise.
    RoutedNoFusion,
    /// No retrieval; the generator sees an empty context.
    GeneratorOnly,
}

impl Mode {
    pub const ALL: [Mode; 5] =
        [Mode::GeneratorOnly, Mode::DenseOnly, Mode::GraphOnly, Mode::RoutedNoFusion, Mode::Full];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Full => "FULL",
            Mode::DenseOnly => "DENSE_ONLY",
            Mode::GraphOnly => "GRAPH_ONLY",
            Mode::RoutedNoFusion => "ROUTED_NO_FUSION",
            Mode::GeneratorOnly => "GENERATOR_ONLY",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub featurize_ms: f64,
    pub dense_ms: f64,
    pub graph_ms: f64,
    pub fuse_ms: f64,
}

impl Timings {
    /// Retrieval time: everything except generation.
    pub fn total_ms(&self) -> f64 {
        self.featurize_ms + self.dense_ms + self.graph_ms + self.fuse_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub thresholds: Thresholds,
    pub rrf: RrfConfig,
    /// Passages retrieved per list and kept after fusion.
    pub top_k: usize,
    pub graph: GraphSearchConfig,
    pub max_context_passages: usize,
    pub max_context_chars: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            thresholds: Thresholds::default(),
            rrf: RrfConfig::default(),
            top_k: 5,
            graph: GraphSearchConfig::default(),
            max_context_passages: 5,
            max_context_chars: 4000,
        }
    }
}

/// Evidence for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieval {
    pub list: RankedList,
    pub score: Option<f64>,
    pub path: Option<Path>,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query_id: String,
    pub score: Option<f64>,
    pub path: Option<Path>,
    pub evidence: Vec<String>,
    pub answer: String,
    pub timings: Timings,
}

/// Counts of retrieval calls actually executed.
#[derive(Debug, Default)]
pub struct Counters {
    dense: AtomicUsize,
    graph: AtomicUsize,
}

impl Counters {
    pub fn dense_searches(&self) -> usize {
        self.dense.load(Ordering::Relaxed)
    }

    pub fn graph_searches(&self) -> usize {
        self.graph.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.dense.store(0, Ordering::Relaxed);
        self.graph.store(0, Ordering::Relaxed);
    }
}

/// Everything one query needs. Components are optional so a partially
/// built system reports which piece is missing.
pub struct Engine {
    pub corpus: Corpus,
    pub encoder: Box<dyn Encoder>,
    pub dense: Option<DenseIndex>,
    pub graph: Option<(HeteroGraph, FactIndex)>,
    pub schema: Option<FeatureSchema>,
    pub adapter: Option<AdapterModel>,
    pub reranker: Box<dyn Reranker>,
    pub generator: Box<dyn Generator>,
    pub cfg: EngineConfig,
    counters: Counters,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

impl Engine {
    pub fn new(
        corpus: Corpus,
        encoder: Box<dyn Encoder>,
        reranker: Box<dyn Reranker>,
        generator: Box<dyn Generator>,
        cfg: EngineConfig,
    ) -> Self {
        Self {
            corpus,
            encoder,
            dense: None,
            graph: None,
            schema: None,
            adapter: None,
            reranker,
            generator,
            cfg,
            counters: Counters::default(),
        }
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Adapter score for a parsed query.
    pub fn score(&self, query_id: &str, pq: Option<&ParsedQuery>) -> Result<f64> {
        let pq = pq.ok_or_else(|| Error::MissingParse(query_id.to_string()))?;
        let schema = self.schema.as_ref().ok_or(Error::IndexNotBuilt("feature schema"))?;
        let adapter = self.adapter.as_ref().ok_or(Error::IndexNotBuilt("adapter"))?;
        adapter.score(&featurize(pq, schema)?.values)
    }

    fn dense_search(&self, text: &str) -> Result<RankedList> {
        let idx = self.dense.as_ref().ok_or(Error::IndexNotBuilt("dense index"))?;
        self.counters.dense.fetch_add(1, Ordering::Relaxed);
        idx.search(&self.encoder.encode(text), self.cfg.top_k)
    }

    fn graph_search(&self, text: &str) -> Result<RankedList> {
        let (g, facts) = self.graph.as_ref().ok_or(Error::IndexNotBuilt("graph index"))?;
        self.counters.graph.fetch_add(1, Ordering::Relaxed);
        let q = self.encoder.encode(text);
        graph_retrieve(g, facts, self.reranker.as_ref(), text, &q, &self.cfg.graph, self.cfg.top_k)
    }

    /// Runs exactly the retrieval the mode and routing decision call for.
    pub fn retrieve_evidence(&self, q: &Query, pq: Option<&ParsedQuery>, mode: Mode) -> Result<Retrieval> {
        let mut timings = Timings::default();
        let (score, path) = match mode {
            Mode::GeneratorOnly => {
                return Ok(Retrieval { list: RankedList::default(), score: None, path: None, timings })
            }
            Mode::DenseOnly => (None, Path::Dense),
            Mode::GraphOnly => (None, Path::Graph),
            Mode::Full | Mode::RoutedNoFusion => {
                let t = Instant::now();
                let s = self.score(&q.id, pq)?;
                let mut d = route(s, &self.cfg.thresholds)?;
                if mode == Mode::RoutedNoFusion && d.path == Path::Fusion {
                    d.path = if s >= 0.5 { Path::Graph } else { Path::Dense };
                }
                timings.featurize_ms = ms(t);
                (Some(s), d.path)
            }
        };
        let list = self.run_path(&q.text, path, score.unwrap_or(0.5), &mut timings)?;
        Ok(Retrieval { list, score, path: Some(path), timings })
    }

    /// Runs one retrieval path; `s` weights the fusion.
    pub fn run_path(&self, text: &str, path: Path, s: f64, timings: &mut Timings) -> Result<RankedList> {
        Ok(match path {
            Path::Dense => {
                let t = Instant::now();
                let l = self.dense_search(text)?;
                timings.dense_ms = ms(t);
                l
            }
            Path::Graph => {
                let t = Instant::now();
                let l = self.graph_search(text)?;
                timings.graph_ms = ms(t);
                l
            }
            Path::Fusion => {
                let t = Instant::now();
                let rag = self.dense_search(text)?;
                timings.dense_ms = ms(t);
                let t = Instant::now();
                let gr = self.graph_search(text)?;
                timings.graph_ms = ms(t);
                let t = Instant::now();
                let fused = weighted_rrf(&rag, &gr, s, &self.cfg.rrf, self.cfg.top_k);
                timings.fuse_ms = ms(t);
                fused
            }
        })
    }

    /// Packs `list` and generates an answer.
    pub fn generate(&self, question: &str, list: &RankedList) -> Result<String> {
        let context = pack_context(&self.corpus, list, self.cfg.max_context_passages, self.cfg.max_context_chars)?;
        self.generator.generate(question, &context)
    }

    /// Retrieval, context packing and generation for one query.
    pub fn answer(&self, q: &Query, pq: Option<&ParsedQuery>, mode: Mode) -> Result<QueryResult> {
        let r = self.retrieve_evidence(q, pq, mode)?;
        let answer = self.generate(&q.text, &r.list)?;
        Ok(QueryResult {
            query_id: q.id.clone(),
            score: r.score,
            path: r.path,
            evidence: r.list.ids().map(str::to_string).collect(),
            answer,
            timings: r.timings,
        })
    }
}
