//! Dependency-distance, relation-group and tree-shape features.
//!
//! All functions accept the sentence list of a query; a single-sentence
//! query is a one-element slice.

use super::{safe_div, Named};
use crate::parse::DependencyTree;

/// Relation groups by deprel label. Both UD v2 and ClearNLP/spaCy labels are listed.
pub const SUBJECT_VERB: &[&str] = &["nsubj", "nsubj:pass", "nsubjpass", "csubj", "csubj:pass", "csubjpass"];
pub const OBJECT_VERB: &[&str] = &["obj", "dobj", "iobj", "dative"];
pub const MODIFIER: &[&str] = &[
    "amod",
    "advmod",
    "nmod",
    "nmod:poss",
    "nmod:tmod",
    "nmod:npmod",
    "obl",
    "obl:tmod",
    "obl:npmod",
    "nummod",
    "npadvmod",
    "poss",
    "appos",
    "acl",
    "acl:relcl",
    "relcl",
    "quantmod",
];
pub const COORDINATION: &[&str] = &["cc", "cc:preconj", "preconj", "conj"];
pub const SUBORDINATION: &[&str] = &["mark", "advcl", "ccomp", "xcomp"];

pub(crate) fn in_group(deprel: &str, group: &[&str]) -> bool {
    let rel = deprel.to_ascii_lowercase();
    group.contains(&rel.as_str())
}

/// Arcs longer than this count as long-range.
pub const LONG_RANGE: usize = 5;

/// Distances `|index - head|` over non-root, non-punctuation tokens, then
/// relation-group counts and root-child imbalance.
pub fn dependency_features(sents: &[DependencyTree]) -> Named {
    let mut dists = Vec::new();
    let mut head_right = 0usize;
    let mut groups = [0usize; 5];
    let mut labels = std::collections::BTreeSet::new();
    let mut imbalance_sum = 0.0;
    let mut root_pos_sum = 0.0;
    for tree in sents {
        for t in tree.tokens() {
            if t.head != 0 && !t.is_punct() {
                dists.push(t.index.abs_diff(t.head) as f64);
                if t.head > t.index {
                    head_right += 1;
                }
            }
            for (g, set) in [SUBJECT_VERB, OBJECT_VERB, MODIFIER, COORDINATION, SUBORDINATION].iter().enumerate() {
                if in_group(&t.deprel, set) {
                    groups[g] += 1;
                }
            }
            labels.insert(t.deprel.to_ascii_lowercase());
        }
        imbalance_sum += tree_imbalance(tree);
        if let Some(r) = tree.root() {
            root_pos_sum += safe_div(r as f64, tree.len() as f64);
        }
    }
    let n = dists.len() as f64;
    let max = dists.iter().copied().fold(0.0, f64::max);
    let avg = safe_div(dists.iter().sum(), n);
    let var = safe_div(dists.iter().map(|d| (d - avg) * (d - avg)).sum(), n);
    let long = dists.iter().filter(|&&d| d > LONG_RANGE as f64).count() as f64;
    let sent_n = sents.len() as f64;
    vec![
        ("max_dep_dist", max),
        ("avg_dep_dist", avg),
        ("std_dep_dist", var.sqrt()),
        ("long_range_count", long),
        ("long_range_ratio", safe_div(long, n)),
        ("head_final_ratio", safe_div(head_right as f64, n)),
        ("rel_subject_verb", groups[0] as f64),
        ("rel_object_verb", groups[1] as f64),
        ("rel_modifier", groups[2] as f64),
        ("rel_coordination", groups[3] as f64),
        ("rel_subordination", groups[4] as f64),
        ("distinct_deprels", labels.len() as f64),
        ("tree_imbalance", safe_div(imbalance_sum, sent_n)),
        ("root_position", safe_div(root_pos_sum, sent_n)),
    ]
}

/// (largest − smallest subtree among the root's children) / token count;
/// 0 when the root has fewer than two children.
pub fn tree_imbalance(tree: &DependencyTree) -> f64 {
    let Some(root) = tree.root() else { return 0.0 };
    let sizes = tree.subtree_sizes();
    let kids: Vec<usize> = tree.children()[root - 1].iter().map(|&c| sizes[c - 1]).collect();
    if kids.len() < 2 {
        return 0.0;
    }
    let max = *kids.iter().max().unwrap();
    let min = *kids.iter().min().unwrap();
    (max - min) as f64 / tree.len() as f64
}

/// Depth/width shape of the dependency tree (root depth 0).
pub fn tree_structure_features(sents: &[DependencyTree]) -> Named {
    let mut max_depth = 0usize;
    let mut max_width = 0usize;
    let mut leaves = 0usize;
    let mut internal = 0usize;
    let mut child_total = 0usize;
    let mut max_branch = 0usize;
    for tree in sents {
        let depths = tree.depths();
        let mut width = vec![0usize; tree.len() + 1];
        for &d in &depths {
            width[d] += 1;
        }
        max_depth = max_depth.max(depths.iter().copied().max().unwrap_or(0));
        max_width = max_width.max(width.iter().copied().max().unwrap_or(0));
        for ch in tree.children() {
            if ch.is_empty() {
                leaves += 1;
            } else {
                internal += 1;
                child_total += ch.len();
                max_branch = max_branch.max(ch.len());
            }
        }
    }
    vec![
        ("max_depth", max_depth as f64),
        ("max_width", max_width as f64),
        ("leaf_count", leaves as f64),
        ("leaf_ratio", safe_div(leaves as f64, internal as f64)),
        ("avg_branching", safe_div(child_total as f64, internal as f64)),
        ("max_branching", max_branch as f64),
        ("depth_width_ratio", safe_div(max_depth as f64, max_width as f64)),
    ]
}
