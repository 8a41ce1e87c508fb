//! Entity, role, lexical-diversity, question-type and marker features.

use std::collections::HashSet;

use super::dependency::{in_group, OBJECT_VERB, SUBJECT_VERB, SUBORDINATION};
use super::{safe_div, Named};
use crate::parse::{DependencyTree, EntitySpan, EntityType};

const CONTENT_UPOS: &[&str] = &["NOUN", "VERB", "ADJ", "ADV", "PROPN"];
const COUNTED_UPOS: &[&str] = &["NOUN", "VERB", "ADJ", "ADV", "PROPN", "NUM", "ADP", "DET", "PRON", "AUX"];

pub const QUESTION_TYPES: [&str; 8] = ["what", "who", "when", "where", "which", "how", "why", "other"];

/// Question type from the first interrogative word of the query.
pub fn question_type(sents: &[DependencyTree]) -> &'static str {
    for t in sents.iter().flat_map(|s| s.tokens()) {
        let w = t.form.to_lowercase();
        let qt = match w.as_str() {
            "what" => "what",
            "who" | "whom" | "whose" => "who",
            "when" => "when",
            "where" => "where",
            "which" => "which",
            "how" => "how",
            "why" => "why",
            _ => continue,
        };
        return qt;
    }
    "other"
}

/// Named-entity, semantic-role, diversity, density, question-type and
/// complexity-marker features. Punctuation is excluded from every
/// per-token denominator.
pub fn lexical_semantic_features(sents: &[DependencyTree], ents: &[EntitySpan]) -> Named {
    let words: Vec<_> = sents.iter().flat_map(|s| s.tokens()).filter(|t| !t.is_punct()).collect();
    let w = words.len() as f64;

    let count_type = |ty: EntityType| ents.iter().filter(|e| e.etype == ty).count() as f64;
    let entity_total = ents.len() as f64;

    let agents = words.iter().filter(|t| in_group(&t.deprel, SUBJECT_VERB)).count() as f64;
    let patients = words.iter().filter(|t| in_group(&t.deprel, OBJECT_VERB)).count() as f64;
    let tmod = words.iter().filter(|t| t.deprel.to_ascii_lowercase().ends_with("tmod")).count() as f64;
    let temporal = count_type(EntityType::Date) + tmod;
    let locative = count_type(EntityType::Loc);

    let distinct: HashSet<String> = words.iter().map(|t| t.form.to_lowercase()).collect();
    let content = words.iter().filter(|t| CONTENT_UPOS.contains(&t.upos.as_str())).count() as f64;
    let function = w - content;
    let avg_len = safe_div(words.iter().map(|t| t.form.chars().count() as f64).sum(), w);

    let coord = words
        .iter()
        .filter(|t| matches!(t.deprel.to_ascii_lowercase().as_str(), "cc" | "cc:preconj" | "preconj"))
        .count() as f64;
    let subord = words.iter().filter(|t| in_group(&t.deprel, SUBORDINATION)).count() as f64;
    let negation = words
        .iter()
        .filter(|t| {
            (t.upos == "PART" && t.lemma.eq_ignore_ascii_case("not")) || t.deprel.to_ascii_lowercase().contains("neg")
        })
        .count() as f64;
    let passive = words.iter().filter(|t| t.deprel.to_ascii_lowercase().contains("pass")).count() as f64;

    let mut out: Named = vec![
        ("entity_total", entity_total),
        ("ent_person", count_type(EntityType::Person)),
        ("ent_org", count_type(EntityType::Org)),
        ("ent_loc", count_type(EntityType::Loc)),
        ("ent_date", count_type(EntityType::Date)),
        ("ent_other", count_type(EntityType::Other)),
        ("entity_density", safe_div(entity_total, w)),
        ("role_agent", agents),
        ("role_patient", patients),
        ("role_temporal", temporal),
        ("role_locative", locative),
        ("token_count", w),
        ("unique_token_ratio", safe_div(distinct.len() as f64, w)),
        ("content_function_ratio", safe_div(content, function)),
        ("info_density", safe_div(content, w)),
        ("avg_word_length", avg_len),
    ];
    const UPOS_NAMES: [&str; 10] = [
        "upos_noun",
        "upos_verb",
        "upos_adj",
        "upos_adv",
        "upos_propn",
        "upos_num",
        "upos_adp",
        "upos_det",
        "upos_pron",
        "upos_aux",
    ];
    for (name, tag) in UPOS_NAMES.iter().zip(COUNTED_UPOS) {
        out.push((name, words.iter().filter(|t| t.upos == *tag).count() as f64));
    }
    let qt = question_type(sents);
    const QT_NAMES: [&str; 8] = [
        "qtype_what",
        "qtype_who",
        "qtype_when",
        "qtype_where",
        "qtype_which",
        "qtype_how",
        "qtype_why",
        "qtype_other",
    ];
    for (name, ty) in QT_NAMES.iter().zip(QUESTION_TYPES) {
        out.push((name, if ty == qt { 1.0 } else { 0.0 }));
    }
    out.extend([
        ("marker_coordination", coord),
        ("marker_subordination", subord),
        ("marker_negation", negation),
        ("marker_passive", passive),
    ]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::Token;

    fn flat(words: &[(&str, &str, &str)]) -> DependencyTree {
        // every token attaches to the last one
        let n = words.len();
        DependencyTree::new(
            words
                .iter()
                .enumerate()
                .map(|(i, (form, upos, rel))| Token {
                    index: i + 1,
                    form: form.to_string(),
                    lemma: form.to_lowercase(),
                    upos: upos.to_string(),
                    head: if i + 1 == n { 0 } else { n },
                    deprel: rel.to_string(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn get(f: &Named, name: &str) -> f64 {
        f.iter().find(|(k, _)| *k == name).unwrap().1
    }

    #[test]
    fn entity_density_excludes_punct() {
        let words: Vec<(&str, &str, &str)> = vec![
            ("When", "ADV", "advmod"),
            ("did", "AUX", "aux"),
            ("the", "DET", "det"),
            ("war", "NOUN", "nsubj"),
            ("end", "VERB", "dep"),
            ("in", "ADP", "case"),
            ("Europe", "PROPN", "obl"),
            ("?", "PUNCT", "punct"),
            ("ok", "INTJ", "root"),
        ];
        let ents = vec![EntitySpan { text: "1945".into(), etype: EntityType::Date, start: 0, end: 1 }];
        let f = lexical_semantic_features(&[flat(&words)], &ents);
        assert_eq!(get(&f, "token_count"), 8.0);
        assert_eq!(get(&f, "entity_density"), 0.125);
        assert_eq!(get(&f, "role_temporal"), 1.0);
        assert_eq!(get(&f, "qtype_when"), 1.0);
    }

    #[test]
    fn what_question() {
        let t = flat(&[
            ("What", "PRON", "nsubj"),
            ("is", "AUX", "cop"),
            ("the", "DET", "det"),
            ("capital", "NOUN", "dep"),
            ("of", "ADP", "case"),
            ("France", "PROPN", "nmod"),
            ("?", "PUNCT", "punct"),
            ("x", "X", "root"),
        ]);
        let f = lexical_semantic_features(&[t], &[]);
        assert_eq!(get(&f, "qtype_what"), 1.0);
        let hot: f64 = f.iter().filter(|(k, _)| k.starts_with("qtype_")).map(|(_, v)| v).sum();
        assert_eq!(hot, 1.0);
    }

    #[test]
    fn distinct_tokens() {
        let t = flat(&[("a", "X", "dep"), ("b", "X", "dep"), ("c", "X", "dep"), ("d", "X", "dep"), ("e", "X", "root")]);
        let f = lexical_semantic_features(&[t], &[]);
        assert_eq!(get(&f, "unique_token_ratio"), 1.0);
    }

    #[test]
    fn markers() {
        let t = flat(&[
            ("He", "PRON", "nsubjpass"),
            ("was", "AUX", "auxpass"),
            ("not", "PART", "neg"),
            ("seen", "VERB", "dep"),
            ("and", "CCONJ", "cc"),
            ("left", "VERB", "root"),
        ]);
        let f = lexical_semantic_features(&[t], &[]);
        assert_eq!(get(&f, "marker_passive"), 2.0);
        assert_eq!(get(&f, "marker_negation"), 1.0);
        assert_eq!(get(&f, "marker_coordination"), 1.0);
        assert_eq!(get(&f, "qtype_other"), 1.0);
    }
}
