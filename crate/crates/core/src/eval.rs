//! Metrics, judging, threshold tuning, ablation runs and report output.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adapter::{accuracy, disagreement_indices, train, AdapterConfig, AdapterModel, TrainingSample};
use crate::config::Config;
use crate::corpus::Query;
use crate::error::{Error, Result};
use crate::features::{assemble_raw, FeatureSchema};
use crate::parse::ParsedQuery;
use crate::retrieval::run_json_command;
use crate::router::{route, Engine, Mode, Path, QueryResult, Thresholds, Timings};

/// One answered query with its gold data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub query_id: String,
    pub path: Option<Path>,
    pub score: Option<f64>,
    pub evidence: Vec<String>,
    pub answer: String,
    pub gold_answers: Vec<String>,
    pub gold_passage_ids: Vec<String>,
    pub timings: Timings,
}

impl RunRecord {
    pub fn new(result: QueryResult, q: &Query) -> Self {
        Self {
            query_id: result.query_id,
            path: result.path,
            score: result.score,
            evidence: result.evidence,
            answer: result.answer,
            gold_answers: q.gold_answers.clone(),
            gold_passage_ids: q.gold_passage_ids.clone(),
            timings: result.timings,
        }
    }
}

/// Share of queries (with at least one gold passage) that have a gold
/// passage among their first `k` evidence ids.
pub fn recall_at_k(records: &[RunRecord], k: usize) -> Result<f64> {
    let eligible: Vec<&RunRecord> = records.iter().filter(|r| !r.gold_passage_ids.is_empty()).collect();
    if eligible.is_empty() {
        return Err(Error::EmptyDenominator);
    }
    let hits = eligible.iter().filter(|r| r.evidence.iter().take(k).any(|e| r.gold_passage_ids.contains(e))).count();
    Ok(hits as f64 / eligible.len() as f64)
}

/// Lowercase and collapse whitespace runs to single spaces.
pub fn normalize_answer(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Whether any non-empty gold answer is a substring of the prediction after
/// normalization.
pub fn contain_match(prediction: &str, golds: &[String]) -> bool {
    let p = normalize_answer(prediction);
    golds.iter().map(|g| normalize_answer(g)).any(|g| !g.is_empty() && p.contains(&g))
}

/// Semantic-equivalence judge.
pub trait Judge: Send + Sync {
    fn judge(&self, question: &str, golds: &[String], prediction: &str) -> Result<bool>;
}

/// Defers to [`contain_match`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MockJudge;

impl Judge for MockJudge {
    fn judge(&self, _question: &str, golds: &[String], prediction: &str) -> Result<bool> {
        Ok(contain_match(prediction, golds))
    }
}

/// External judge: `{"question", "golds", "prediction"}` on stdin,
/// `{"correct": bool}` on stdout. Any failure to reach it is
/// [`Error::JudgeUnavailable`].
#[derive(Debug, Clone)]
pub struct CommandJudge {
    pub program: String,
    pub args: Vec<String>,
}

impl Judge for CommandJudge {
    fn judge(&self, question: &str, golds: &[String], prediction: &str) -> Result<bool> {
        let req = serde_json::json!({ "question": question, "golds": golds, "prediction": prediction });
        let out = run_json_command(&self.program, &self.args, &serde_json::to_vec(&req)?)
            .map_err(|e| Error::JudgeUnavailable(e.to_string()))?;
        #[derive(Deserialize)]
        struct Reply {
            correct: bool,
        }
        let r: Reply = serde_json::from_slice(&out).map_err(|e| Error::JudgeUnavailable(format!("bad reply: {e}")))?;
        Ok(r.correct)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneConfig {
    pub grid_step: f64,
    pub lambda_latency: f64,
    pub k: usize,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self { grid_step: 0.05, lambda_latency: 0.1, k: 5 }
    }
}

/// Per-path outcome for a validation query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PathOutcomes<T> {
    pub dense: T,
    pub graph: T,
    pub fusion: T,
}

impl<T: Copy> PathOutcomes<T> {
    pub fn get(&self, p: Path) -> T {
        match p {
            Path::Dense => self.dense,
            Path::Graph => self.graph,
            Path::Fusion => self.fusion,
        }
    }
}

/// A validation query scored under every path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub s: f64,
    pub correct: PathOutcomes<bool>,
    pub latency_ms: PathOutcomes<f64>,
}

/// Threshold values `0, step, 2·step, …` up to 1.
pub fn lattice(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    // Rounded so 3 × 0.05 prints and compares as 0.15.
    Ok((0..=n).map(|i| ((i as f64 * step * 1e9).round() / 1e9).min(1.0)).collect())
}

/// All `(τ_L, τ_H)` lattice pairs with `τ_L < τ_H`.
pub fn lattice_pairs(step: f64) -> Result<Vec<Thresholds>> {
    let g = lattice(step)?;
    let mut out = Vec::new();
    for (i, &lo) in g.iter().enumerate() {
        for &hi in &g[i + 1..] {
            out.push(Thresholds { tau_low: lo, tau_high: hi });
        }
    }
    Ok(out)
}

/// `accuracy − λ · mean latency / mean graph latency` under the routing
/// induced by `t`.
pub fn objective(records: &[ValidationRecord], t: &Thresholds, lambda: f64) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyValidation);
    }
    let n = records.len() as f64;
    let mut acc = 0.0;
    let mut lat = 0.0;
    for r in records {
        let p = route(r.s, t)?.path;
        acc += r.correct.get(p) as u8 as f64;
        lat += r.latency_ms.get(p);
    }
    let graph_mean = records.iter().map(|r| r.latency_ms.graph).sum::<f64>() / n;
    let norm = if graph_mean > 0.0 { (lat / n) / graph_mean } else { 0.0 };
    Ok(acc / n - lambda * norm)
}

/// Exhaustive lattice search for the thresholds maximizing [`objective`].
/// Ties go to the smaller τ_H, then the larger τ_L.
pub fn tune_thresholds(records: &[ValidationRecord], cfg: &TuneConfig) -> Result<(Thresholds, f64)> {
    if records.is_empty() {
        return Err(Error::EmptyValidation);
    }
    let mut best: Option<(Thresholds, f64)> = None;
    for t in lattice_pairs(cfg.grid_step)? {
        let j = objective(records, &t, cfg.lambda_latency)?;
        let better = match &best {
            None => true,
            Some((b, bj)) => {
                j > *bj
                    || (j == *bj && (t.tau_high < b.tau_high || (t.tau_high == b.tau_high && t.tau_low > b.tau_low)))
            }
        };
        if better {
            best = Some((t, j));
        }
    }
    best.ok_or(Error::EmptyValidation)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Option<Mode>,
    pub n: usize,
    pub acc: f64,
    pub judge_acc: f64,
    pub recall_at_3: Option<f64>,
    pub recall_at_5: Option<f64>,
    pub mean_retrieval_ms: f64,
    /// Mean retrieval time per path taken.
    pub path_latency_ms: BTreeMap<String, f64>,
    /// Fraction of queries per path taken.
    pub path_share: BTreeMap<String, f64>,
}

fn path_name(p: Option<Path>) -> String {
    p.map_or_else(|| "NONE".to_string(), |p| p.to_string())
}

/// Aggregate metrics over a run. Recall is `None` when no record carries a
/// gold passage.
pub fn evaluate_run(records: &[RunRecord], queries: &[Query], judge: &dyn Judge, mode: Option<Mode>) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let by_id: BTreeMap<&str, &Query> = queries.iter().map(|q| (q.id.as_str(), q)).collect();
    let n = records.len() as f64;
    let mut acc = 0.0;
    let mut jacc = 0.0;
    let mut lat = 0.0;
    let mut per_path: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in records {
        acc += contain_match(&r.answer, &r.gold_answers) as u8 as f64;
        let question = by_id.get(r.query_id.as_str()).map_or("", |q| q.text.as_str());
        jacc += judge.judge(question, &r.gold_answers, &r.answer)? as u8 as f64;
        let t = r.timings.total_ms();
        lat += t;
        let e = per_path.entry(path_name(r.path)).or_default();
        e.0 += t;
        e.1 += 1;
    }
    let recall = |k| match recall_at_k(records, k) {
        Ok(v) => Ok(Some(v)),
        Err(Error::EmptyDenominator) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(Report {
        mode,
        n: records.len(),
        acc: acc / n,
        judge_acc: jacc / n,
        recall_at_3: recall(3)?,
        recall_at_5: recall(5)?,
        mean_retrieval_ms: lat / n,
        path_latency_ms: per_path.iter().map(|(k, (t, c))| (k.clone(), t / *c as f64)).collect(),
        path_share: per_path.iter().map(|(k, (_, c))| (k.clone(), *c as f64 / n)).collect(),
    })
}

impl Report {
    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
        let mut s = format!(
            "mode {}  n={}  acc={:.3}  judge_acc={:.3}  R@3={}  R@5={}  mean_retrieval_ms={:.4}\n",
            self.mode.map_or("-", |m| m.as_str()),
            self.n,
            self.acc,
            self.judge_acc,
            opt(self.recall_at_3),
            opt(self.recall_at_5),
            self.mean_retrieval_ms
        );
        for (p, share) in &self.path_share {
            s.push_str(&format!("  {p:<7} share={share:.3}  mean_ms={:.4}\n", self.path_latency_ms[p]));
        }
        s
    }
}

pub const REPORT_CSV_HEADER: &str =
    "mode,n,acc,judge_acc,recall_at_3,recall_at_5,mean_retrieval_ms,dense_share,graph_share,fusion_share";

/// One CSV row per report, for accuracy/latency trade-off plots.
pub fn write_report_csv<W: Write>(mut w: W, reports: &[Report]) -> Result<()> {
    writeln!(w, "{REPORT_CSV_HEADER}")?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for r in reports {
        let share = |p: &str| r.path_share.get(p).copied().unwrap_or(0.0);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.mode.map_or("", |m| m.as_str()),
            r.n,
            r.acc,
            r.judge_acc,
            opt(r.recall_at_3),
            opt(r.recall_at_5),
            r.mean_retrieval_ms,
            share("DENSE"),
            share("GRAPH"),
            share("FUSION")
        )?;
    }
    Ok(())
}

/// Per-query records, one CSV row each.
pub fn write_records_csv<W: Write>(mut w: W, records: &[RunRecord]) -> Result<()> {
    writeln!(w, "query_id,path,score,correct,featurize_ms,dense_ms,graph_ms,fuse_ms,evidence")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.query_id,
            path_name(r.path),
            r.score.map_or_else(String::new, |s| s.to_string()),
            contain_match(&r.answer, &r.gold_answers) as u8,
            r.timings.featurize_ms,
            r.timings.dense_ms,
            r.timings.graph_ms,
            r.timings.fuse_ms,
            r.evidence.join(" ")
        )?;
    }
    Ok(())
}

/// Parse lookup keyed by query id.
pub type ParseMap = BTreeMap<String, ParsedQuery>;

/// Answers every query under `mode`, sequentially.
pub fn ablation_run(engine: &Engine, queries: &[Query], parses: &ParseMap, mode: Mode) -> Result<Vec<RunRecord>> {
    queries.iter().map(|q| Ok(RunRecord::new(engine.answer(q, parses.get(&q.id), mode)?, q))).collect()
}

/// Correctness and latency of every path for each query, plus the adapter
/// score. Input for [`tune_thresholds`].
pub fn collect_validation(
    engine: &Engine,
    queries: &[Query],
    parses: &ParseMap,
    judge: &dyn Judge,
) -> Result<Vec<ValidationRecord>> {
    let mut out = Vec::with_capacity(queries.len());
    for q in queries {
        let s = engine.score(&q.id, parses.get(&q.id))?;
        let mut correct = PathOutcomes::default();
        let mut latency_ms = PathOutcomes::default();
        for p in [Path::Dense, Path::Graph, Path::Fusion] {
            let mut t = Timings::default();
            let list = engine.run_path(&q.text, p, s, &mut t)?;
            let ok = judge.judge(&q.text, &q.gold_answers, &engine.generate(&q.text, &list)?)?;
            match p {
                Path::Dense => (correct.dense, latency_ms.dense) = (ok, t.total_ms()),
                Path::Graph => (correct.graph, latency_ms.graph) = (ok, t.total_ms()),
                Path::Fusion => (correct.fusion, latency_ms.fusion) = (ok, t.total_ms()),
            }
        }
        out.push(ValidationRecord { s, correct, latency_ms });
    }
    Ok(out)
}

/// Whether the dense and graph paths answer each query correctly.
pub fn label_queries(engine: &Engine, queries: &[Query], judge: &dyn Judge) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut z_rag = Vec::with_capacity(queries.len());
    let mut z_gr = Vec::with_capacity(queries.len());
    for q in queries {
        for (p, out) in [(Path::Dense, &mut z_rag), (Path::Graph, &mut z_gr)] {
            let list = engine.run_path(&q.text, p, 0.5, &mut Timings::default())?;
            out.push(judge.judge(&q.text, &q.gold_answers, &engine.generate(&q.text, &list)?)? as u8);
        }
    }
    Ok((z_rag, z_gr))
}

/// Sizes for the train / test protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub n_train: usize,
    /// Disagreement samples kept for adapter training.
    pub n_disagreement: usize,
    pub n_test: usize,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { n_train: 1000, n_disagreement: 200, n_test: 1000, seed: 0 }
    }
}

/// Seeded disjoint train and test index sets over `n` queries.
pub fn split_indices(n: usize, cfg: &SplitConfig) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let n_train = cfg.n_train.min(n);
    let test: Vec<usize> = idx[n_train..].iter().copied().take(cfg.n_test).collect();
    idx.truncate(n_train);
    (idx, test)
}

/// Seeded subsample of at most `k` items, original order preserved.
pub fn subsample<T: Clone>(items: &[T], k: usize, seed: u64) -> Vec<T> {
    if items.len() <= k {
        return items.to_vec();
    }
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx.truncate(k);
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

/// Outcome of [`train_router`].
#[derive(Debug, Clone)]
pub struct TrainedRouter {
    pub schema: FeatureSchema,
    pub adapter: AdapterModel,
    /// Queries on which the two retrievers disagreed, before subsampling.
    pub n_disagreements: usize,
    /// Training samples actually used.
    pub n_samples: usize,
    pub train_accuracy: f64,
}

/// Labels `queries` by running both retrievers, keeps the disagreement
/// set (subsampled to `split.n_disagreement`), fits the feature schema on
/// it and trains the adapter.
pub fn train_router(
    engine: &Engine,
    queries: &[Query],
    parses: &ParseMap,
    judge: &dyn Judge,
    cfg: &Config,
) -> Result<TrainedRouter> {
    let (z_rag, z_gr) = label_queries(engine, queries, judge)?;
    let disagree = disagreement_indices(&z_rag, &z_gr);
    let kept = subsample(&disagree, cfg.split.n_disagreement, cfg.split.seed);
    let mut raw = Vec::with_capacity(kept.len());
    let mut y = Vec::with_capacity(kept.len());
    for &i in &kept {
        let q = &queries[i];
        let pq = parses.get(&q.id).ok_or_else(|| Error::MissingParse(q.id.clone()))?;
        raw.push(assemble_raw(pq)?);
        y.push(z_gr[i]);
    }
    if raw.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let schema = FeatureSchema::fit(&raw, &y, cfg.k_features)?;
    let data = raw
        .iter()
        .zip(&y)
        .map(|(r, &y)| Ok(TrainingSample { x: schema.apply(r)?.values, y }))
        .collect::<Result<Vec<_>>>()?;
    let acfg = AdapterConfig { input_dim: schema.dim(), ..cfg.adapter.clone() };
    let adapter = train(&acfg, &data)?;
    let train_accuracy = accuracy(&adapter, &data)?;
    Ok(TrainedRouter { schema, adapter, n_disagreements: disagree.len(), n_samples: data.len(), train_accuracy })
}
