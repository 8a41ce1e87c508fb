//! Corpus units, JSON Lines loaders and context packing.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    pub id: String,
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    #[serde(rename = "question")]
    pub text: String,
    #[serde(rename = "answers", default)]
    pub gold_answers: Vec<String>,
    #[serde(default)]
    pub gold_passage_ids: Vec<String>,
}

/// Immutable passage collection with id lookup.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    passages: Vec<Passage>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(passages: Vec<Passage>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(passages.len());
        for (i, p) in passages.iter().enumerate() {
            if p.text.trim().is_empty() {
                return Err(Error::InvalidArgument(format!("passage {:?} has empty text", p.id)));
            }
            if by_id.insert(p.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(p.id.clone()));
            }
        }
        Ok(Self { passages, by_id })
    }

    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }

    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    pub fn get(&self, id: &str) -> Option<&Passage> {
        self.by_id.get(id).map(|&i| &self.passages[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }
}

fn read_lines(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

/// Parses one JSON object per non-blank line, reporting 1-based line numbers.
pub(crate) fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item =
            serde_json::from_str(line).map_err(|e| Error::MalformedLine { line_no: i + 1, reason: e.to_string() })?;
        out.push(item);
    }
    Ok(out)
}

pub(crate) fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let passages: Vec<Passage> = parse_jsonl(&read_lines(path.as_ref())?)?;
    Corpus::new(passages)
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    write_jsonl(path.as_ref(), corpus.passages())
}

pub fn load_queries(path: impl AsRef<Path>) -> Result<Vec<Query>> {
    parse_jsonl(&read_lines(path.as_ref())?)
}

pub fn write_queries(path: impl AsRef<Path>, queries: &[Query]) -> Result<()> {
    write_jsonl(path.as_ref(), queries)
}

// -0.0 and 0.0 must tie
fn score_key(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Ordered `(passage_id, score)` pairs, best first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub entries: Vec<(String, f64)>,
}

impl RankedList {
    /// Sorts by descending score, breaking ties by ascending id, and keeps the first `k`.
    pub fn from_scored(mut scored: Vec<(String, f64)>, k: usize) -> Self {
        scored.sort_by(|a, b| score_key(b.1).total_cmp(&score_key(a.1)).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Self { entries: scored }
    }

    /// Same result as [`RankedList::from_scored`] over `ids.zip(scores)`,
    /// cloning only the ids that are kept.
    pub fn top_k(ids: &[String], scores: &[f64], k: usize) -> Self {
        debug_assert_eq!(ids.len(), scores.len());
        let cmp = |a: &usize, b: &usize| {
            score_key(scores[*b]).total_cmp(&score_key(scores[*a])).then_with(|| ids[*a].cmp(&ids[*b]))
        };
        let mut order: Vec<usize> = (0..ids.len()).collect();
        let k = k.min(order.len());
        if k == 0 {
            return Self::default();
        }
        if k < order.len() {
            order.select_nth_unstable_by(k - 1, cmp);
            order.truncate(k);
        }
        order.sort_unstable_by(cmp);
        Self { entries: order.into_iter().map(|i| (ids[i].clone(), scores[i])).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(id, _)| id.as_str())
    }

    /// 1-based rank of `id`, if present.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|(p, _)| p == id).map(|i| i + 1)
    }
}

/// Concatenates passages as `"[title]\n{text}\n\n"` blocks in list order.
///
/// At most `max_passages` blocks are used and the result never exceeds
/// `max_chars` characters; the last block is cut when it does not fit.
pub fn pack_context(corpus: &Corpus, list: &RankedList, max_passages: usize, max_chars: usize) -> Result<String> {
    // Validate the whole list up front so a bad id is never masked by truncation.
    let passages = list
        .ids()
        .map(|id| corpus.get(id).ok_or_else(|| Error::UnknownPassageId(id.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let mut out = String::new();
    let mut used = 0usize;
    for p in passages.into_iter().take(max_passages) {
        let block = format!("[{}]\n{}\n\n", p.title, p.text);
        let n = block.chars().count();
        if used + n <= max_chars {
            out.push_str(&block);
            used += n;
        } else {
            out.extend(block.chars().take(max_chars - used));
            break;
        }
    }
    Ok(out)
}
