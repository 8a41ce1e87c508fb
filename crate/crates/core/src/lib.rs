//! Complexity-aware retrieval routing: a syntactic featurizer and a small MLP
//! score each query, which is then sent to dense retrieval, personalized
//! PageRank over an entity/passage graph, or a score-weighted rank fusion.

pub mod adapter;
pub mod config;
pub mod corpus;
pub mod dense;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod parse;
pub mod retrieval;
pub mod router;
pub mod synth;

pub use adapter::{AdapterConfig, AdapterModel, TrainingSample};
pub use config::{build_engine, load_index, save_index, Config};
pub use corpus::{Corpus, Passage, Query, RankedList};
pub use dense::{DenseIndex, Encoder, HashEncoder};
pub use error::{Error, Result};
pub use eval::{Judge, MockJudge, Report, RunRecord, TuneConfig, ValidationRecord};
pub use features::{FeatureSchema, FeatureVector, RawFeatureVector};
pub use graph::{Fact, FactIndex, HeteroGraph, MockOpenIe, OpenIe};
pub use parse::{ConstituencyTree, DependencyTree, EntitySpan, EntityType, ParseRecord, ParsedQuery, Token};
pub use retrieval::{MockReranker, PprConfig, Reranker, ResetVector};
pub use router::{Engine, EngineConfig, Generator, MockGenerator, Mode, Path, QueryResult, Thresholds, Timings};
