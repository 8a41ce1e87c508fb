//! Graph retrieval: fact scoring, candidate selection and reranking, entity
//! seeding, personalized PageRank and passage ranking.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::corpus::RankedList;
use crate::error::{Error, Result};
use crate::graph::{Fact, FactIndex, HeteroGraph};

/// Min-max normalized inner products between the query and every fact.
/// When all raw scores are equal every fact gets 1.0.
pub fn fact_scores(q_emb: &[f64], facts: &FactIndex) -> Result<Vec<f64>> {
    if facts.is_empty() {
        return Err(Error::EmptyFactSet);
    }
    Ok(min_max(&facts.raw_scores(q_emb)?))
}

pub fn min_max(raw: &[f64]) -> Vec<f64> {
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return vec![1.0; raw.len()];
    }
    raw.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Indices of the `k` best-scoring facts; equal scores keep insertion order.
pub fn top_k_facts(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(k);
    order
}

/// Filters and reorders candidate facts for a query. Returns positions into
/// `candidates`.
pub trait Reranker: Send + Sync {
    fn rerank(&self, query: &str, candidates: &[(&Fact, f64)]) -> Result<Vec<usize>>;
}

/// Keeps the candidates whose head or tail occurs in the query
/// (case-insensitive substring), in their incoming order; keeps everything
/// when nothing matches.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockReranker;

impl Reranker for MockReranker {
    fn rerank(&self, query: &str, candidates: &[(&Fact, f64)]) -> Result<Vec<usize>> {
        let q = query.to_lowercase();
        let hit = |s: &str| {
            let s = s.trim().to_lowercase();
            !s.is_empty() && q.contains(&s)
        };
        let kept: Vec<usize> =
            (0..candidates.len()).filter(|&i| hit(&candidates[i].0.head) || hit(&candidates[i].0.tail)).collect();
        Ok(if kept.is_empty() { (0..candidates.len()).collect() } else { kept })
    }
}

#[derive(Serialize)]
struct RerankRequest<'a> {
    query: &'a str,
    facts: Vec<RerankFact<'a>>,
}

#[derive(Serialize)]
struct RerankFact<'a> {
    #[serde(flatten)]
    fact: &'a Fact,
    score: f64,
}

#[derive(Deserialize)]
struct RerankResponse {
    keep: Vec<usize>,
}

/// Runs an external program per query. The request
/// `{"query", "facts": [{head, relation, tail, source_passage_id, score}]}`
/// is written to stdin; stdout must be `{"keep": [positions...]}`.
#[derive(Debug, Clone)]
pub struct CommandReranker {
    pub program: String,
    pub args: Vec<String>,
}

impl Reranker for CommandReranker {
    fn rerank(&self, query: &str, candidates: &[(&Fact, f64)]) -> Result<Vec<usize>> {
        let req =
            RerankRequest { query, facts: candidates.iter().map(|(f, s)| RerankFact { fact: f, score: *s }).collect() };
        let out = run_json_command(&self.program, &self.args, &serde_json::to_vec(&req)?)?;
        let resp: RerankResponse =
            serde_json::from_slice(&out).map_err(|e| Error::External(format!("reranker reply: {e}")))?;
        if let Some(bad) = resp.keep.iter().find(|&&i| i >= candidates.len()) {
            return Err(Error::External(format!("reranker returned position {bad} of {}", candidates.len())));
        }
        Ok(resp.keep)
    }
}

/// Spawns `program`, feeds `input` on stdin and returns stdout.
pub(crate) fn run_json_command(program: &str, args: &[String], input: &[u8]) -> Result<Vec<u8>> {
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::External(format!("{program}: {e}")))?;
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(input)
        .map_err(|e| Error::External(format!("{program}: {e}")))?;
    let out = child.wait_with_output().map_err(|e| Error::External(format!("{program}: {e}")))?;
    if !out.status.success() {
        return Err(Error::External(format!(
            "{program} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    Ok(out.stdout)
}

/// Top-`k` facts by normalized score, then the reranker. Returns fact indices.
pub fn select_and_rerank(
    query: &str,
    facts: &FactIndex,
    scores: &[f64],
    k: usize,
    reranker: &dyn Reranker,
) -> Result<Vec<usize>> {
    let top = top_k_facts(scores, k);
    let cands: Vec<(&Fact, f64)> = top.iter().map(|&i| (&facts.facts[i], scores[i])).collect();
    Ok(reranker.rerank(query, &cands)?.into_iter().map(|j| top[j]).collect())
}

/// Seed distribution over entity nodes, in selection order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResetVector {
    pub weights: Vec<(usize, f64)>,
}

impl ResetVector {
    pub fn single(node: usize) -> Self {
        Self { weights: vec![(node, 1.0)] }
    }

    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for &(i, w) in &self.weights {
            v[i] += w;
        }
        v
    }
}

/// Per-entity weight `score(f) / occurrences(n)` over the selected facts,
/// visiting each fact's head then tail; a later fact overwrites an earlier
/// one. Returned in first-visit order.
pub fn entity_weights(
    graph: &HeteroGraph,
    facts: &FactIndex,
    selected: &[usize],
    scores: &[f64],
) -> Result<Vec<(usize, f64)>> {
    let mut order = Vec::new();
    let mut w: HashMap<usize, f64> = HashMap::new();
    for &fi in selected {
        let f = &facts.facts[fi];
        for name in [&f.head, &f.tail] {
            let e = graph.entity_index(name).ok_or_else(|| Error::EntityNotInGraph(name.clone()))?;
            let occ = graph.occurrence_count(e);
            if occ == 0 {
                return Err(Error::ZeroOccurrence(name.clone()));
            }
            if w.insert(e, scores[fi] / occ as f64).is_none() {
                order.push(e);
            }
        }
    }
    Ok(order.into_iter().map(|e| (e, w[&e])).collect())
}

/// Keeps the `k_prime` heaviest entities (ties by entity name) and
/// normalizes them to sum 1. If every kept weight is 0 the seeds are uniform.
pub fn entity_seed_weights(
    graph: &HeteroGraph,
    facts: &FactIndex,
    selected: &[usize],
    scores: &[f64],
    k_prime: usize,
) -> Result<ResetVector> {
    let mut w = entity_weights(graph, facts, selected, scores)?;
    w.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| graph.entities()[a.0].cmp(&graph.entities()[b.0])));
    w.truncate(k_prime);
    let total: f64 = w.iter().map(|(_, v)| v).sum();
    let n = w.len() as f64;
    for (_, v) in &mut w {
        *v = if total > 0.0 { *v / total } else { 1.0 / n };
    }
    Ok(ResetVector { weights: w })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PprConfig {
    /// Reset probability.
    pub alpha: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PprConfig {
    fn default() -> Self {
        Self { alpha: 0.5, tol: 1e-10, max_iters: 1000 }
    }
}

/// Power iteration `r ← α·r0 + (1−α)·Pᵀr` with `P` uniform over incident
/// edges and dangling mass returned to `r0`. Stops once the L1 change drops
/// below `tol`.
pub fn run_ppr(graph: &HeteroGraph, r0: &ResetVector, cfg: &PprConfig) -> Result<Vec<f64>> {
    let n = graph.num_nodes();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {} outside (0, 1)", cfg.alpha)));
    }
    if r0.weights.is_empty() || r0.weights.iter().any(|&(i, w)| i >= n || !(w >= 0.0)) {
        return Err(Error::InvalidArgument("reset vector must be non-empty, in range and non-negative".into()));
    }
    let sum: f64 = r0.weights.iter().map(|(_, w)| w).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("reset vector sums to {sum}")));
    }
    let adj = graph.adjacency();
    let seed = r0.dense(n);
    let mut r = seed.clone();
    let mut next = vec![0.0; n];
    let walk = 1.0 - cfg.alpha;
    for _ in 0..cfg.max_iters {
        next.iter_mut().for_each(|v| *v = 0.0);
        let mut dangling = 0.0;
        for (u, nbrs) in adj.iter().enumerate() {
            if nbrs.is_empty() {
                dangling += r[u];
                continue;
            }
            let share = r[u] / nbrs.len() as f64;
            for &v in nbrs {
                next[v] += share;
            }
        }
        let mut delta = 0.0;
        for v in 0..n {
            let val = cfg.alpha * seed[v] + walk * (next[v] + dangling * seed[v]);
            delta += (val - r[v]).abs();
            next[v] = val;
        }
        std::mem::swap(&mut r, &mut next);
        if delta < cfg.tol {
            return Ok(r);
        }
    }
    Err(Error::NoConvergence(cfg.max_iters))
}

/// Passage nodes ranked by diffusion score (ties by passage id), top `k`.
pub fn graph_search(graph: &HeteroGraph, r: &[f64], k: usize) -> RankedList {
    let scores: Vec<f64> = (0..graph.num_passages()).map(|p| r[graph.passage_node(p)]).collect();
    RankedList::top_k(graph.passages(), &scores, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphSearchConfig {
    /// Candidate facts kept before reranking.
    pub top_k_facts: usize,
    /// Seed entities kept for the walk.
    pub seed_k: usize,
    pub ppr: PprConfig,
}

impl Default for GraphSearchConfig {
    fn default() -> Self {
        Self { top_k_facts: 30, seed_k: 10, ppr: PprConfig::default() }
    }
}

/// End-to-end graph path for one query.
pub fn graph_retrieve(
    graph: &HeteroGraph,
    facts: &FactIndex,
    reranker: &dyn Reranker,
    query: &str,
    q_emb: &[f64],
    cfg: &GraphSearchConfig,
    k: usize,
) -> Result<RankedList> {
    let scores = fact_scores(q_emb, facts)?;
    let selected = select_and_rerank(query, facts, &scores, cfg.top_k_facts, reranker)?;
    let r0 = entity_seed_weights(graph, facts, &selected, &scores, cfg.seed_k)?;
    let r = run_ppr(graph, &r0, &cfg.ppr)?;
    Ok(graph_search(graph, &r, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(h: &str, t: &str, p: &str) -> Fact {
        Fact { head: h.into(), relation: "r".into(), tail: t.into(), source_passage_id: p.into() }
    }

    fn path_graph(names: &[&str]) -> HeteroGraph {
        let rel = (1..names.len()).map(|i| (i - 1, i, "r".to_string()));
        HeteroGraph::from_parts(names.iter().map(|s| s.to_string()).collect(), vec![], rel, [], []).unwrap()
    }

    #[test]
    fn min_max_cases() {
        let s = min_max(&[0.2, 0.6, 1.0]);
        assert!((s[0] - 0.0).abs() < 1e-12 && (s[1] - 0.5).abs() < 1e-12 && (s[2] - 1.0).abs() < 1e-12);
        assert_eq!(min_max(&[0.3, 0.3]), vec![1.0, 1.0]);
        let empty = FactIndex::from_embeddings(vec![], vec![]).unwrap();
        assert!(matches!(fact_scores(&[], &empty), Err(Error::EmptyFactSet)));
    }

    #[test]
    fn top_k_stable() {
        assert_eq!(top_k_facts(&[0.5, 1.0, 0.5, 0.5], 3), vec![1, 0, 2]);
        assert_eq!(top_k_facts(&[0.1, 0.2], 10), vec![1, 0]);
    }

    #[test]
    fn mock_reranker_rules() {
        let a = fact("Don Medford", "The Organization", "p1");
        let b = fact("Lino Brocka", "Manila", "p2");
        let q = "When did the director of film The Organization die? Don Medford?";
        assert_eq!(MockReranker.rerank(q, &[(&a, 1.0), (&b, 0.9)]).unwrap(), vec![0]);
        assert_eq!(MockReranker.rerank("nothing here", &[(&a, 1.0), (&b, 0.9)]).unwrap(), vec![0, 1]);
    }

    fn seed_setup() -> (HeteroGraph, FactIndex) {
        let ents = vec!["A".to_string(), "B".to_string(), "C".to_string()];
        let passages: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
        let occ = vec![(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (2, 1)];
        let g = HeteroGraph::from_parts(ents, passages, [(0, 1, "r".into()), (1, 2, "r".into())], occ, []).unwrap();
        let facts =
            FactIndex::from_embeddings(vec![fact("A", "B", "p0"), fact("B", "C", "p1")], vec![vec![1.0]; 2]).unwrap();
        (g, facts)
    }

    #[test]
    fn hub_weight_and_last_wins() {
        let (g, facts) = seed_setup();
        let w = entity_weights(&g, &facts, &[0, 1], &[0.8, 0.4]).unwrap();
        assert_eq!(w, vec![(0, 0.2), (1, 0.4), (2, 0.4)]);
        let w = entity_weights(&g, &facts, &[1, 0], &[0.8, 0.4]).unwrap();
        assert_eq!(w[0], (1, 0.8));
    }

    #[test]
    fn seed_normalization_and_ties() {
        let (g, facts) = seed_setup();
        let r = entity_seed_weights(&g, &facts, &[1], &[0.9, 0.2], 10).unwrap();
        assert_eq!(r.weights, vec![(1, 0.5), (2, 0.5)]);
        let r = entity_seed_weights(&g, &facts, &[0, 1], &[0.8, 0.4], 1).unwrap();
        assert_eq!(r.weights, vec![(1, 1.0)]);
        let r = entity_seed_weights(&g, &facts, &[0], &[0.0, 0.0], 10).unwrap();
        assert_eq!(r.weights, vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn seed_errors() {
        let (g, _) = seed_setup();
        let missing = FactIndex::from_embeddings(vec![fact("A", "Z", "p0")], vec![vec![1.0]]).unwrap();
        assert!(matches!(entity_weights(&g, &missing, &[0], &[1.0]), Err(Error::EntityNotInGraph(_))));
        let lonely =
            HeteroGraph::from_parts(vec!["A".into(), "B".into()], vec![], [(0, 1, "r".into())], [], []).unwrap();
        let facts = FactIndex::from_embeddings(vec![fact("A", "B", "p0")], vec![vec![1.0]]).unwrap();
        assert!(matches!(entity_weights(&lonely, &facts, &[0], &[1.0]), Err(Error::ZeroOccurrence(_))));
    }

    #[test]
    fn ppr_single_node() {
        let g = path_graph(&["a"]);
        for alpha in [0.1, 0.5, 0.9] {
            let r = run_ppr(&g, &ResetVector::single(0), &PprConfig { alpha, ..Default::default() }).unwrap();
            assert!((r[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ppr_two_nodes_closed_form() {
        let r = run_ppr(&path_graph(&["a", "b"]), &ResetVector::single(0), &PprConfig::default()).unwrap();
        assert!((r[0] - 2.0 / 3.0).abs() < 1e-9);
        assert!((r[1] - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn ppr_locality_on_path() {
        // On a–b–c seeded at a, r(b) > r(c) always, while r(a) > r(b) needs
        // α > 2 − √3; below that the degree-2 middle node collects more mass.
        let cut = 2.0 - 3f64.sqrt();
        for alpha in [0.01, 0.05, 0.2, 0.26, 0.28, 0.3, 0.5, 0.95] {
            let r = run_ppr(
                &path_graph(&["a", "b", "c"]),
                &ResetVector::single(0),
                &PprConfig { alpha, max_iters: 10_000, ..Default::default() },
            )
            .unwrap();
            assert!(r[1] > r[2], "{alpha}: {r:?}");
            assert_eq!(r[0] > r[1], alpha > cut, "{alpha}: {r:?}");
        }
    }

    #[test]
    fn ppr_errors() {
        let g = path_graph(&["a", "b"]);
        let cfg = PprConfig { max_iters: 2, ..Default::default() };
        assert!(matches!(run_ppr(&g, &ResetVector::single(0), &cfg), Err(Error::NoConvergence(2))));
        assert!(matches!(
            run_ppr(&HeteroGraph::default(), &ResetVector::single(0), &PprConfig::default()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn graph_search_passages_only() {
        let g = HeteroGraph::from_parts(vec!["e".into()], vec!["p1".into(), "p2".into()], [], [(0, 0), (0, 1)], [])
            .unwrap();
        let r = vec![0.9, 0.3, 0.1];
        assert_eq!(graph_search(&g, &r, 1).entries, vec![("p1".to_string(), 0.3)]);
        let zero = graph_search(&g, &[1.0, 0.0, 0.0], 5);
        assert_eq!(zero.entries, vec![("p1".to_string(), 0.0), ("p2".to_string(), 0.0)]);
        assert!(zero.ids().all(|id| id != "e"));
    }

    #[test]
    fn command_reranker_missing_program() {
        let cr = CommandReranker { program: "/nonexistent/reranker".into(), args: vec![] };
        let f = fact("A", "B", "p");
        assert!(matches!(cr.rerank("q", &[(&f, 1.0)]), Err(Error::External(_))));
    }
}
