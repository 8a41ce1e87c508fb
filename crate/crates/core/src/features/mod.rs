//! Query featurizer: syntactic units and ratios, dependency statistics,
//! lexical/semantic signals, tree shape and interaction terms, followed by
//! mutual-information selection and z-scoring.

pub mod dependency;
pub mod lexical;
pub mod pattern;
pub mod select;
pub mod units;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parse::ParsedQuery;

pub use dependency::{dependency_features, tree_structure_features};
pub use lexical::lexical_semantic_features;
pub use select::{fit_standardizer, mutual_information, select_features, standardize};
pub use units::{count_units, ratio_features, UnitCounts};

/// Ordered `(name, value)` pairs.
pub type Named = Vec<(&'static str, f64)>;

/// Division that yields 0 for a zero denominator.
pub(crate) fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

fn lookup(f: &Named, name: &str) -> f64 {
    f.iter().find(|(k, _)| *k == name).map_or(0.0, |(_, v)| *v)
}

/// Cross-category terms. `prior` must hold the lexical, dependency and
/// tree-shape features already computed for the query.
pub fn interaction_features(u: &UnitCounts, prior: &Named) -> Named {
    let w = u.w as f64;
    let c = u.c as f64;
    let entities = lookup(prior, "entity_total");
    let connectors = lookup(prior, "marker_coordination") + lookup(prior, "marker_subordination");
    vec![
        ("tokens_per_clause", safe_div(w, c)),
        ("entities_per_token", safe_div(entities, w)),
        ("depth_per_token", safe_div(lookup(prior, "max_depth"), w)),
        ("connectors_per_clause", safe_div(connectors, c)),
        ("entities_per_clause", safe_div(entities, c)),
        ("modifiers_per_token", safe_div(lookup(prior, "rel_modifier"), w)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

/// Builds the full raw vector. Order: unit counts, ratios, phrase
/// inventory, dependency, lexical/semantic, tree shape, interactions.
pub fn assemble_raw(pq: &ParsedQuery) -> Result<RawFeatureVector> {
    let u = count_units(&pq.con)?;
    let mut all: Named = units::unit_features(&u);
    all.extend(ratio_features(&u));
    all.extend(units::phrase_features(&pq.con));
    all.extend(dependency_features(&pq.dep));
    all.extend(lexical_semantic_features(&pq.dep, &pq.entities));
    all.extend(tree_structure_features(&pq.dep));
    let inter = interaction_features(&u, &all);
    all.extend(inter);
    let (names, values) = all.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
    Ok(RawFeatureVector { names, values })
}

/// Names of the raw features in assembly order.
pub fn raw_feature_names() -> Vec<String> {
    use crate::parse::{ConstituencyTree, DependencyTree, Token};
    let dep = DependencyTree::new(vec![Token {
        index: 1,
        form: "x".into(),
        lemma: "x".into(),
        upos: "X".into(),
        head: 0,
        deprel: "root".into(),
    }])
    .expect("single-token tree is valid");
    let pq = ParsedQuery {
        query_id: String::new(),
        dep: vec![dep],
        con: ConstituencyTree::node("ROOT", vec![ConstituencyTree::leaf("X", "x")]),
        entities: vec![],
    };
    assemble_raw(&pq).expect("trivial parse featurizes").names
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

/// Selected raw-feature indices with their standardization statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    /// Full raw feature name list the indices refer to.
    pub raw_names: Vec<String>,
    pub selected: Vec<usize>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl FeatureSchema {
    /// Selects the top `k` columns by mutual information (k is capped at the
    /// raw dimension) and fits mean/std on those columns.
    pub fn fit(raw: &[RawFeatureVector], y: &[u8], k: usize) -> Result<Self> {
        let first = raw.first().ok_or(Error::EmptyTrainingSet)?;
        let x: Vec<Vec<f64>> = raw.iter().map(|r| r.values.clone()).collect();
        let k = k.min(first.values.len());
        let selected = select_features(&x, y, k)?;
        let projected: Vec<Vec<f64>> = x.iter().map(|row| selected.iter().map(|&j| row[j]).collect()).collect();
        let (mu, sigma) = fit_standardizer(&projected)?;
        Ok(Self { raw_names: first.names.clone(), selected, mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.selected.len()
    }

    pub fn selected_names(&self) -> Vec<&str> {
        self.selected.iter().map(|&j| self.raw_names[j].as_str()).collect()
    }

    /// Projects a raw vector onto the selected columns and z-scores it.
    pub fn apply(&self, raw: &RawFeatureVector) -> Result<FeatureVector> {
        if raw.values.len() != self.raw_names.len() {
            return Err(Error::DimMismatch { expected: self.raw_names.len(), got: raw.values.len() });
        }
        let x: Vec<f64> = self.selected.iter().map(|&j| raw.values[j]).collect();
        Ok(FeatureVector { values: standardize(&x, &self.mu, &self.sigma)? })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// Raw features → selected columns → z-scores.
pub fn featurize(pq: &ParsedQuery, schema: &FeatureSchema) -> Result<FeatureVector> {
    schema.apply(&assemble_raw(pq)?)
}

/// Writes a CSV with a `query_id` column followed by one column per raw feature.
pub fn write_feature_csv<W: Write>(mut out: W, rows: &[(String, RawFeatureVector)]) -> Result<()> {
    let names = match rows.first() {
        Some((_, r)) => r.names.clone(),
        None => raw_feature_names(),
    };
    writeln!(out, "query_id,{}", names.iter().map(|n| csv_field(n)).collect::<Vec<_>>().join(","))?;
    for (id, r) in rows {
        let vals: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{},{}", csv_field(id), vals.join(","))?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
