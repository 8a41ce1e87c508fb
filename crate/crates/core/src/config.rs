//! All hyperparameters in one JSON document, and assembly of a mock-backed
//! engine from a corpus.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adapter::AdapterConfig;
use crate::adapter::AdapterModel;
use crate::corpus::{load_corpus, write_corpus, Corpus};
use crate::dense::{DenseIndex, HashEncoder};
use crate::error::{Error, Result};
use crate::eval::{SplitConfig, TuneConfig};
use crate::features::FeatureSchema;
use crate::graph::{build_graph, extract_all, load_facts, write_facts, FactIndex, HeteroGraph, MockOpenIe};
use crate::retrieval::MockReranker;
use crate::router::{Engine, EngineConfig, MockGenerator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub encoder_dim: usize,
    /// Cosine threshold for synonymy edges.
    pub synonymy_tau: f64,
    /// Features kept by mutual-information selection.
    pub k_features: usize,
    pub engine: EngineConfig,
    pub adapter: AdapterConfig,
    pub tune: TuneConfig,
    pub split: SplitConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            encoder_dim: 1024,
            synonymy_tau: 0.8,
            k_features: 85,
            engine: EngineConfig::default(),
            adapter: AdapterConfig::default(),
            tune: TuneConfig::default(),
            split: SplitConfig::default(),
        }
    }
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.engine.thresholds.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn encoder(&self) -> HashEncoder {
        HashEncoder::new(self.encoder_dim)
    }
}

/// Engine over `corpus` with both indexes built from the hash encoder and
/// mock extraction, reranking and generation. No router is attached.
pub fn build_engine(corpus: Corpus, cfg: &Config) -> Result<Engine> {
    let enc = cfg.encoder();
    let dense = DenseIndex::build(&corpus, &enc)?;
    let facts = extract_all(&corpus, &MockOpenIe)?;
    let graph = build_graph(&corpus, &facts, &enc, cfg.synonymy_tau)?;
    let fact_index = FactIndex::build(facts, &enc);
    let mut engine = Engine::new(corpus, Box::new(enc), Box::new(MockReranker), Box::new(MockGenerator), cfg.engine);
    engine.dense = Some(dense);
    engine.graph = Some((graph, fact_index));
    Ok(engine)
}

/// File names inside an index directory.
pub mod files {
    pub const CONFIG: &str = "config.json";
    pub const CORPUS: &str = "corpus.jsonl";
    pub const DENSE: &str = "dense.bin";
    pub const GRAPH: &str = "graph.jsonl";
    pub const FACTS: &str = "facts.jsonl";
    pub const SCHEMA: &str = "schema.json";
    pub const ADAPTER: &str = "adapter.json";
}

/// Writes the config, corpus, both indexes and, when present, the feature
/// schema and adapter into `dir`.
pub fn save_index(engine: &Engine, cfg: &Config, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let dense = engine.dense.as_ref().ok_or(Error::IndexNotBuilt("dense index"))?;
    let (graph, facts) = engine.graph.as_ref().ok_or(Error::IndexNotBuilt("graph index"))?;
    cfg.save(dir.join(files::CONFIG))?;
    write_corpus(dir.join(files::CORPUS), &engine.corpus)?;
    dense.save(dir.join(files::DENSE))?;
    graph.save(dir.join(files::GRAPH))?;
    write_facts(dir.join(files::FACTS), &facts.facts)?;
    if let Some(s) = &engine.schema {
        s.save(dir.join(files::SCHEMA))?;
    }
    if let Some(a) = &engine.adapter {
        a.save(dir.join(files::ADAPTER))?;
    }
    Ok(())
}

/// Reopens a directory written by [`save_index`]. Fact embeddings are
/// recomputed with the configured encoder.
pub fn load_index(dir: impl AsRef<Path>) -> Result<(Engine, Config)> {
    let dir = dir.as_ref();
    let cfg = Config::load(dir.join(files::CONFIG))?;
    let enc = cfg.encoder();
    let corpus = load_corpus(dir.join(files::CORPUS))?;
    let dense = DenseIndex::load(dir.join(files::DENSE))?;
    if dense.dim() != cfg.encoder_dim {
        return Err(Error::DimMismatch { expected: cfg.encoder_dim, got: dense.dim() });
    }
    let graph = HeteroGraph::load(dir.join(files::GRAPH))?;
    let facts = FactIndex::build(load_facts(dir.join(files::FACTS))?, &enc);
    let mut engine = Engine::new(corpus, Box::new(enc), Box::new(MockReranker), Box::new(MockGenerator), cfg.engine);
    engine.dense = Some(dense);
    engine.graph = Some((graph, facts));
    let schema = dir.join(files::SCHEMA);
    if schema.exists() {
        engine.schema = Some(FeatureSchema::load(schema)?);
    }
    let adapter = dir.join(files::ADAPTER);
    if adapter.exists() {
        engine.adapter = Some(AdapterModel::load(adapter)?);
    }
    Ok((engine, cfg))
}
