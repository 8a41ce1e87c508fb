//! Dependency and constituency parse representations.
//!
//! Parses arrive from an external NLP front-end as `parses.jsonl` records
//! holding a CoNLL-U block, a PTB bracketed tree and entity spans.

mod bracketed;
mod conllu;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bracketed::{print_bracketed, read_bracketed, read_bracketed_forest};
pub use conllu::{read_conllu, read_conllu_sentences};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position within the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// Index of the governing token; 0 marks the root.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT"
    }
}

/// A validated single-rooted dependency tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyTree {
    tokens: Vec<Token>,
}

impl DependencyTree {
    /// Builds a tree, checking that tokens are numbered 1..=n, exactly one
    /// token attaches to the root, and every token reaches the root.
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        let n = tokens.len();
        let mut roots = 0;
        for (i, t) in tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(Error::MalformedToken(format!("token {} found at position {}", t.index, i + 1)));
            }
            if t.head > n || t.head == t.index {
                if t.head == t.index {
                    return Err(Error::CyclicHeads);
                }
                return Err(Error::MalformedToken(format!("head {} out of range", t.head)));
            }
            if t.head == 0 {
                roots += 1;
            }
        }
        if n > 0 {
            if roots > 1 {
                return Err(Error::MultipleRoots);
            }
            // Walk every token up towards the root; more than n steps means a cycle.
            for start in 1..=n {
                let mut cur = start;
                let mut steps = 0;
                while cur != 0 {
                    cur = tokens[cur - 1].head;
                    steps += 1;
                    if steps > n {
                        return Err(Error::CyclicHeads);
                    }
                }
            }
            if roots == 0 {
                return Err(Error::NoRoot);
            }
        }
        Ok(Self { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// 1-based index of the root token.
    pub fn root(&self) -> Option<usize> {
        self.tokens.iter().find(|t| t.head == 0).map(|t| t.index)
    }

    /// Children lists indexed by 0-based token position.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.tokens.len()];
        for t in &self.tokens {
            if t.head > 0 {
                ch[t.head - 1].push(t.index);
            }
        }
        ch
    }

    /// Depth of every token (root = 0), indexed by 0-based position.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.tokens.len()];
        for start in 0..self.tokens.len() {
            let mut path = Vec::new();
            let mut cur = start + 1;
            let mut base = 0;
            while cur != 0 {
                if depth[cur - 1] != usize::MAX {
                    base = depth[cur - 1] + 1;
                    break;
                }
                path.push(cur);
                cur = self.tokens[cur - 1].head;
            }
            // `path` ends at the root or right below an already-resolved token.
            let top = if cur == 0 { 0 } else { base };
            for (k, &node) in path.iter().rev().enumerate() {
                depth[node - 1] = top + k;
            }
        }
        depth
    }

    /// Size of the subtree rooted at each token, indexed by 0-based position.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let depth = self.depths();
        let mut order: Vec<usize> = (0..self.tokens.len()).collect();
        order.sort_by(|&a, &b| depth[b].cmp(&depth[a]));
        let mut size = vec![1usize; self.tokens.len()];
        for i in order {
            let h = self.tokens[i].head;
            if h > 0 {
                size[h - 1] += size[i];
            }
        }
        size
    }
}

/// Phrase-structure tree. Preterminals carry the word in `leaf_form` and
/// have no children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituencyTree {
    pub label: String,
    pub children: Vec<ConstituencyTree>,
    pub leaf_form: Option<String>,
}

impl ConstituencyTree {
    pub fn leaf(label: impl Into<String>, form: impl Into<String>) -> Self {
        Self { label: label.into(), children: Vec::new(), leaf_form: Some(form.into()) }
    }

    pub fn node(label: impl Into<String>, children: Vec<ConstituencyTree>) -> Self {
        Self { label: label.into(), children, leaf_form: None }
    }

    pub fn is_leaf(&self) -> bool {
        self.leaf_form.is_some()
    }

    /// Leaf words, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.leaf_form {
            Some(f) => out.push(f),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }
}

impl fmt::Display for ConstituencyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_bracketed(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityType {
    Person,
    Org,
    Loc,
    Date,
    Other,
}

impl EntityType {
    /// Maps toolkit-specific labels (spaCy, Stanza, CoNLL) onto the five coarse types.
    pub fn from_label(label: &str) -> Self {
        match label.to_ascii_uppercase().as_str() {
            "PERSON" | "PER" => Self::Person,
            "ORG" | "ORGANIZATION" | "NORP" => Self::Org,
            "LOC" | "GPE" | "LOCATION" | "FAC" => Self::Loc,
            "DATE" | "TIME" => Self::Date,
            _ => Self::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub text: String,
    #[serde(rename = "type", deserialize_with = "de_entity_type")]
    pub etype: EntityType,
    /// 0-based token offsets, end exclusive, over all syntactic words of the query.
    pub start: usize,
    pub end: usize,
}

fn de_entity_type<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<EntityType, D::Error> {
    let s = String::deserialize(d)?;
    Ok(EntityType::from_label(&s))
}

/// All parse layers for one query. Multi-sentence queries carry one
/// dependency tree per sentence and a single constituency tree whose
/// `ROOT` has one child per sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedQuery {
    pub query_id: String,
    pub dep: Vec<DependencyTree>,
    pub con: ConstituencyTree,
    pub entities: Vec<EntitySpan>,
}

impl ParsedQuery {
    pub fn word_count(&self) -> usize {
        self.dep.iter().map(|d| d.len()).sum()
    }
}

/// One line of `parses.jsonl`. Failed records carry `error` instead of parses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conllu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constituency: Option<String>,
    #[serde(default)]
    pub entities: Vec<EntitySpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ParseRecord {
    pub fn to_parsed(&self) -> Result<ParsedQuery> {
        if let Some(err) = &self.error {
            return Err(Error::MissingParse(format!("{}: {err}", self.id)));
        }
        let (Some(conllu), Some(tree)) = (&self.conllu, &self.constituency) else {
            return Err(Error::MissingParse(self.id.clone()));
        };
        let dep = read_conllu_sentences(conllu)?;
        let forest = read_bracketed_forest(tree)?;
        let con = merge_roots(forest);
        let words: usize = dep.iter().map(|d| d.len()).sum();
        for e in &self.entities {
            if e.start > e.end || e.end > words {
                return Err(Error::InvalidArgument(format!(
                    "entity {:?} spans [{}, {}) outside {} tokens",
                    e.text, e.start, e.end, words
                )));
            }
        }
        Ok(ParsedQuery { query_id: self.id.clone(), dep, con, entities: self.entities.clone() })
    }
}

/// Joins several sentence trees under one `ROOT`.
fn merge_roots(mut forest: Vec<ConstituencyTree>) -> ConstituencyTree {
    if forest.len() == 1 {
        return forest.pop().unwrap();
    }
    let children = forest.into_iter().flat_map(|t| if t.label == "ROOT" { t.children } else { vec![t] }).collect();
    ConstituencyTree::node("ROOT", children)
}

pub fn load_parses(path: impl AsRef<Path>) -> Result<Vec<ParseRecord>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    crate::corpus::parse_jsonl(&std::fs::read_to_string(path)?)
}

pub fn write_parses(path: impl AsRef<Path>, records: &[ParseRecord]) -> Result<()> {
    crate::corpus::write_jsonl(path.as_ref(), records)
}
