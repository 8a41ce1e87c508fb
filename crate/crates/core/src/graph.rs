//! Entity/passage graph built from OpenIE triples.
//!
//! Node numbering: entities `0..E`, then passages `E..E+P` in corpus order.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{parse_jsonl, write_jsonl, Corpus, Passage};
use crate::dense::{dot, nonzeros, sparse_dot, Encoder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub head: String,
    pub relation: String,
    pub tail: String,
    pub source_passage_id: String,
}

impl Fact {
    /// Text embedded for fact scoring.
    pub fn render(&self) -> String {
        format!("{} {} {}", self.head, self.relation, self.tail)
    }
}

pub fn load_facts(path: impl AsRef<Path>) -> Result<Vec<Fact>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    parse_jsonl(&std::fs::read_to_string(path)?)
}

pub fn write_facts(path: impl AsRef<Path>, facts: &[Fact]) -> Result<()> {
    write_jsonl(path.as_ref(), facts)
}

/// Triple extractor.
pub trait OpenIe: Send + Sync {
    fn extract(&self, passage: &Passage) -> Result<Vec<Fact>>;
}

/// Rule-based extractor: within a sentence, consecutive capitalized spans
/// joined by all-lowercase text become `(span, text, span)`.
///
/// A span is a run of tokens starting with an uppercase letter; a digit
/// token may continue a span but not start one. A token carrying trailing
/// punctuation closes the span it ends. Spans made only of function words
/// ("The", "It", ...) are discarded.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockOpenIe;

const FUNCTION_WORDS: &[&str] = &[
    "a", "an", "the", "it", "its", "in", "on", "at", "of", "he", "she", "his", "her", "they", "their", "this", "that",
    "these", "those", "there", "when", "where", "who", "what", "which", "how", "why", "after", "before", "during",
    "as", "by", "for", "from", "with", "and", "but",
];

fn strip(tok: &str) -> &str {
    tok.trim_matches(|c: char| !c.is_alphanumeric())
}

impl MockOpenIe {
    pub fn extract_sentence(&self, sentence: &[&str]) -> Vec<(String, String, String)> {
        let mut spans: Vec<(usize, usize)> = Vec::new();
        let mut start: Option<usize> = None;
        for (i, raw) in sentence.iter().enumerate() {
            let core = strip(raw);
            let first = core.chars().next();
            let cap = first.is_some_and(char::is_uppercase);
            let digit = first.is_some_and(|c| c.is_ascii_digit());
            if cap || (digit && start.is_some()) {
                start.get_or_insert(i);
            } else if let Some(s) = start.take() {
                spans.push((s, i));
            }
            let closes = raw.ends_with(|c: char| !c.is_alphanumeric());
            if closes {
                if let Some(s) = start.take() {
                    spans.push((s, i + 1));
                }
            }
        }
        if let Some(s) = start {
            spans.push((s, sentence.len()));
        }
        let spans: Vec<(usize, usize)> = spans
            .into_iter()
            .filter(|&(a, b)| {
                !sentence[a..b].iter().all(|t| FUNCTION_WORDS.contains(&strip(t).to_lowercase().as_str()))
            })
            .collect();
        let text = |a: usize, b: usize| {
            sentence[a..b].iter().map(|t| strip(t)).filter(|t| !t.is_empty()).collect::<Vec<_>>().join(" ")
        };
        let mut out = Vec::new();
        for w in spans.windows(2) {
            let (h, t) = (w[0], w[1]);
            let rel = text(h.1, t.0);
            if rel.is_empty() || rel.chars().any(char::is_uppercase) {
                continue;
            }
            out.push((text(h.0, h.1), rel, text(t.0, t.1)));
        }
        out
    }
}

/// Whitespace tokens grouped into sentences at `.`, `?` or `!` endings.
pub fn sentences(text: &str) -> Vec<Vec<&str>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for tok in text.split_whitespace() {
        cur.push(tok);
        if tok.trim_end_matches(['"', '\'', ')']).ends_with(['.', '?', '!']) {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

impl OpenIe for MockOpenIe {
    fn extract(&self, passage: &Passage) -> Result<Vec<Fact>> {
        Ok(sentences(&passage.text)
            .iter()
            .flat_map(|s| self.extract_sentence(s))
            .map(|(head, relation, tail)| Fact { head, relation, tail, source_passage_id: passage.id.clone() })
            .collect())
    }
}

pub fn extract_all(corpus: &Corpus, ie: &dyn OpenIe) -> Result<Vec<Fact>> {
    let mut facts = Vec::new();
    for p in corpus.passages() {
        facts.extend(ie.extract(p)?);
    }
    Ok(facts)
}

/// Facts with their embeddings, in a flat row-major buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct FactIndex {
    pub facts: Vec<Fact>,
    dim: usize,
    data: Vec<f64>,
}

impl FactIndex {
    pub fn build(facts: Vec<Fact>, encoder: &dyn Encoder) -> Self {
        let dim = encoder.dim();
        let mut data = Vec::with_capacity(facts.len() * dim);
        for f in &facts {
            data.extend(encoder.encode(&f.render()));
        }
        Self { facts, dim, data }
    }

    pub fn from_embeddings(facts: Vec<Fact>, embeddings: Vec<Vec<f64>>) -> Result<Self> {
        if facts.len() != embeddings.len() {
            return Err(Error::LengthMismatch(facts.len(), embeddings.len()));
        }
        let dim = embeddings.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(facts.len() * dim);
        for e in embeddings {
            if e.len() != dim {
                return Err(Error::DimMismatch { expected: dim, got: e.len() });
            }
            data.extend(e);
        }
        Ok(Self { facts, dim, data })
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn embedding(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Raw inner products with the query embedding.
    pub fn raw_scores(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.dim && !self.is_empty() {
            return Err(Error::DimMismatch { expected: self.dim, got: q.len() });
        }
        let nz = nonzeros(q);
        Ok((0..self.len()).map(|i| sparse_dot(&nz, self.embedding(i))).collect())
    }
}

/// Heterogeneous graph over entity and passage nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeteroGraph {
    entities: Vec<String>,
    passages: Vec<String>,
    relation_edges: BTreeSet<(usize, usize, String)>,
    occurrence_edges: BTreeSet<(usize, usize)>,
    synonymy_edges: BTreeSet<(usize, usize)>,
    entity_ix: HashMap<String, usize>,
    passage_ix: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
}

/// Case-insensitive entity key.
pub fn entity_key(name: &str) -> String {
    name.trim().to_lowercase()
}

impl HeteroGraph {
    /// Assembles a graph from explicit node and edge lists. Entity names are
    /// matched case-insensitively; duplicate edges collapse; synonymy pairs
    /// are stored unordered and self-pairs are dropped.
    pub fn from_parts(
        entities: Vec<String>,
        passages: Vec<String>,
        relation_edges: impl IntoIterator<Item = (usize, usize, String)>,
        occurrence_edges: impl IntoIterator<Item = (usize, usize)>,
        synonymy_edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut entity_ix = HashMap::new();
        for (i, e) in entities.iter().enumerate() {
            if e.trim().is_empty() {
                return Err(Error::InvalidArgument("empty entity name".into()));
            }
            if entity_ix.insert(entity_key(e), i).is_some() {
                return Err(Error::DuplicateId(e.clone()));
            }
        }
        let mut passage_ix = HashMap::new();
        for (i, p) in passages.iter().enumerate() {
            if passage_ix.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicateId(p.clone()));
            }
        }
        let (ne, np) = (entities.len(), passages.len());
        let check = |e: usize, bound: usize, what: &str| {
            if e < bound {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{what} index {e} out of range")))
            }
        };
        let mut rel = BTreeSet::new();
        for (h, t, l) in relation_edges {
            check(h, ne, "entity")?;
            check(t, ne, "entity")?;
            rel.insert((h, t, l));
        }
        let mut occ = BTreeSet::new();
        for (e, p) in occurrence_edges {
            check(e, ne, "entity")?;
            check(p, np, "passage")?;
            occ.insert((e, p));
        }
        let mut syn = BTreeSet::new();
        for (a, b) in synonymy_edges {
            check(a, ne, "entity")?;
            check(b, ne, "entity")?;
            if a != b {
                syn.insert((a.min(b), a.max(b)));
            }
        }
        let mut g = Self {
            entities,
            passages,
            relation_edges: rel,
            occurrence_edges: occ,
            synonymy_edges: syn,
            entity_ix,
            passage_ix,
            adjacency: Vec::new(),
        };
        g.adjacency = g.build_adjacency();
        Ok(g)
    }

    /// Undirected multigraph over all three edge kinds. A self-loop appears
    /// once in its node's list.
    fn build_adjacency(&self) -> Vec<Vec<usize>> {
        let ne = self.entities.len();
        let mut adj = vec![Vec::new(); self.num_nodes()];
        let mut link = |a: usize, b: usize| {
            adj[a].push(b);
            if a != b {
                adj[b].push(a);
            }
        };
        for (h, t, _) in &self.relation_edges {
            link(*h, *t);
        }
        for (e, p) in &self.occurrence_edges {
            link(*e, ne + *p);
        }
        for (a, b) in &self.synonymy_edges {
            link(*a, *b);
        }
        adj
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_passages(&self) -> usize {
        self.passages.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.entities.len() + self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num_nodes() == 0
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn passages(&self) -> &[String] {
        &self.passages
    }

    pub fn relation_edges(&self) -> &BTreeSet<(usize, usize, String)> {
        &self.relation_edges
    }

    pub fn occurrence_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.occurrence_edges
    }

    pub fn synonymy_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.synonymy_edges
    }

    pub fn entity_index(&self, name: &str) -> Option<usize> {
        self.entity_ix.get(&entity_key(name)).copied()
    }

    pub fn passage_index(&self, id: &str) -> Option<usize> {
        self.passage_ix.get(id).copied()
    }

    /// Node id of passage `p`.
    pub fn passage_node(&self, p: usize) -> usize {
        self.entities.len() + p
    }

    /// Neighbor lists with multiplicity, indexed by node id.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Number of passages the entity occurs in.
    pub fn occurrence_count(&self, entity: usize) -> usize {
        self.occurrence_edges.range((entity, 0)..(entity + 1, 0)).count()
    }

    pub fn entity_passages(&self, entity: usize) -> impl Iterator<Item = &str> {
        self.occurrence_edges.range((entity, 0)..(entity + 1, 0)).map(|(_, p)| self.passages[*p].as_str())
    }
}

/// Builds the graph: one entity node per distinct (case-folded) head/tail,
/// a relation edge per fact, an occurrence edge from each fact entity to
/// its source passage, and synonymy edges between entities whose embedding
/// cosine reaches `tau`.
pub fn build_graph(corpus: &Corpus, facts: &[Fact], encoder: &dyn Encoder, tau: f64) -> Result<HeteroGraph> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("synonymy threshold {tau} outside (0, 1]")));
    }
    let mut entities: Vec<String> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut intern = |name: &str| {
        let key = entity_key(name);
        *seen.entry(key).or_insert_with(|| {
            entities.push(name.trim().to_string());
            entities.len() - 1
        })
    };
    let mut rel = Vec::new();
    let mut occ = Vec::new();
    for f in facts {
        let p = corpus
            .index_of(&f.source_passage_id)
            .ok_or_else(|| Error::UnknownSourcePassage(f.source_passage_id.clone()))?;
        if f.head.trim().is_empty() || f.tail.trim().is_empty() {
            return Err(Error::InvalidArgument(format!("fact with empty head or tail in {}", f.source_passage_id)));
        }
        let h = intern(&f.head);
        let t = intern(&f.tail);
        rel.push((h, t, f.relation.clone()));
        occ.push((h, p));
        occ.push((t, p));
    }
    let syn = synonymy_pairs(&entities, encoder, tau);
    let passages = corpus.passages().iter().map(|p| p.id.clone()).collect();
    HeteroGraph::from_parts(entities, passages, rel, occ, syn)
}

/// All entity pairs with cosine ≥ `tau`. Pairs whose embeddings share no
/// nonzero coordinate have cosine 0 and are skipped through an inverted
/// index over nonzero coordinates.
fn synonymy_pairs(entities: &[String], encoder: &dyn Encoder, tau: f64) -> Vec<(usize, usize)> {
    let embs: Vec<Vec<f64>> = entities
        .iter()
        .map(|e| {
            let mut v = encoder.encode(e);
            let n = dot(&v, &v).sqrt();
            if n > 0.0 {
                v.iter_mut().for_each(|x| *x /= n);
            }
            v
        })
        .collect();
    let mut postings: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, v) in embs.iter().enumerate() {
        for (j, x) in v.iter().enumerate() {
            if *x != 0.0 {
                postings.entry(j).or_default().push(i);
            }
        }
    }
    let mut candidates = BTreeSet::new();
    for list in postings.values() {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                candidates.insert((i.min(j), i.max(j)));
            }
        }
    }
    candidates.into_iter().filter(|&(i, j)| dot(&embs[i], &embs[j]) >= tau).collect()
}

pub const GRAPH_FORMAT: &str = "synroute-graph";
pub const GRAPH_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphHeader {
    format: String,
    version: u32,
    entities: usize,
    passages: usize,
    relation: usize,
    occurrence: usize,
    synonymy: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GraphLine {
    Entity { name: String },
    Passage { id: String },
    Relation { head: usize, tail: usize, label: String },
    Occurrence { entity: usize, passage: usize },
    Synonymy { a: usize, b: usize },
}

impl HeteroGraph {
    /// JSON Lines: a header with section sizes, then entities, passages,
    /// relation, occurrence and synonymy records in that order. Edges refer
    /// to entity and passage positions.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = GraphHeader {
            format: GRAPH_FORMAT.into(),
            version: GRAPH_VERSION,
            entities: self.entities.len(),
            passages: self.passages.len(),
            relation: self.relation_edges.len(),
            occurrence: self.occurrence_edges.len(),
            synonymy: self.synonymy_edges.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        let mut line = |l: GraphLine| -> Result<()> {
            writeln!(w, "{}", serde_json::to_string(&l)?)?;
            Ok(())
        };
        for e in &self.entities {
            line(GraphLine::Entity { name: e.clone() })?;
        }
        for p in &self.passages {
            line(GraphLine::Passage { id: p.clone() })?;
        }
        for (h, t, l) in &self.relation_edges {
            line(GraphLine::Relation { head: *h, tail: *t, label: l.clone() })?;
        }
        for (e, p) in &self.occurrence_edges {
            line(GraphLine::Occurrence { entity: *e, passage: *p })?;
        }
        for (a, b) in &self.synonymy_edges {
            line(GraphLine::Synonymy { a: *a, b: *b })?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::MalformedLine { line_no: 1, reason: "missing header".into() })?;
        let header: GraphHeader =
            serde_json::from_str(&first?).map_err(|e| Error::MalformedLine { line_no: 1, reason: e.to_string() })?;
        if header.format != GRAPH_FORMAT {
            return Err(Error::MalformedLine { line_no: 1, reason: format!("unknown format {}", header.format) });
        }
        if header.version != GRAPH_VERSION {
            return Err(Error::VersionMismatch { expected: GRAPH_VERSION, found: header.version });
        }
        let expected = header.entities + header.passages + header.relation + header.occurrence + header.synonymy;
        let (mut ents, mut pass, mut rel, mut occ, mut syn) = (vec![], vec![], vec![], vec![], vec![]);
        let mut n = 0;
        for (i, l) in lines {
            let l = l?;
            if l.trim().is_empty() {
                continue;
            }
            let rec: GraphLine =
                serde_json::from_str(&l).map_err(|e| Error::MalformedLine { line_no: i + 1, reason: e.to_string() })?;
            match rec {
                GraphLine::Entity { name } => ents.push(name),
                GraphLine::Passage { id } => pass.push(id),
                GraphLine::Relation { head, tail, label } => rel.push((head, tail, label)),
                GraphLine::Occurrence { entity, passage } => occ.push((entity, passage)),
                GraphLine::Synonymy { a, b } => syn.push((a, b)),
            }
            n += 1;
        }
        let sizes = [ents.len(), pass.len(), rel.len(), occ.len(), syn.len()];
        let want = [header.entities, header.passages, header.relation, header.occurrence, header.synonymy];
        if n != expected || sizes != want {
            return Err(Error::MalformedLine {
                line_no: n + 2,
                reason: format!("truncated or inconsistent graph file: {n} of {expected} records"),
            });
        }
        Self::from_parts(ents, pass, rel, occ, syn)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
