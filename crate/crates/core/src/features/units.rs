//! Clause, T-unit and phrase counts plus the fourteen length/ratio measures.
//!
//! Counting follows the L2 Syntactic Complexity Analyzer tree patterns.
//! Head-child constraints (`<#`) are approximated by immediate-child tests,
//! which is exact for the verb-headed VP and SQ nodes these patterns probe.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::pattern::*;
use super::{safe_div, Named};
use crate::error::{Error, Result};
use crate::parse::ConstituencyTree;

const FINITE: &[&str] = &["MD", "VBZ", "VBP", "VBD"];
const CLAUSE: &[&str] = &["S", "SINV", "SQ"];
const TUNIT: &[&str] = &["S", "SBARQ", "SINV", "SQ"];
const ROOT: &[&str] = &["ROOT"];

/// Penn Treebank punctuation tags; leaves with these tags are not words.
pub const PUNCT_TAGS: &[&str] =
    &[".", ",", ":", "``", "''", "-LRB-", "-RRB-", "-LSB-", "-RSB-", "-LCB-", "-RCB-", "HYPH", "NFP", "PUNCT"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitCounts {
    /// words
    pub w: usize,
    /// sentences
    pub s: usize,
    /// clauses
    pub c: usize,
    /// dependent clauses
    pub dc: usize,
    /// T-units
    pub t: usize,
    /// complex T-units
    pub ct: usize,
    /// coordinate phrases
    pub cp: usize,
    /// complex nominals
    pub cn: usize,
    /// verb phrases
    pub vp: usize,
}

struct Patterns {
    clause: Pat,
    dependent_clause: Pat,
    t_unit: Pat,
    fragment_t_unit: Pat,
    complex_t_unit: Pat,
    coordinate_phrase: Pat,
    complex_nominal: Pat,
    verb_phrase: Pat,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| {
        // VP headed by a finite verb, or a coordination of such VPs.
        let finite_vp = and(vec![
            label(&["VP"]),
            or(vec![
                child(label(FINITE)),
                and(vec![child(label(&["CC"])), child(and(vec![label(&["VP"]), child(label(FINITE))]))]),
            ]),
        ]);
        let finite_core = or(vec![child(label(FINITE)), child(finite_vp)]);
        let clause = and(vec![
            label(CLAUSE),
            or(vec![
                // root-level imperative: (ROOT (S (VP (VB Go) ...)))
                and(vec![parent(label(ROOT)), first_child(and(vec![label(&["VP"]), child(label(&["VB"]))]))]),
                finite_core.clone(),
            ]),
        ]);
        let dependent_clause = and(vec![label(&["SBAR"]), child(and(vec![label(CLAUSE), finite_core]))]);
        let t_unit = and(vec![
            label(TUNIT),
            or(vec![parent(label(ROOT)), and(vec![preceded_by(label(TUNIT)), not(ancestor(label(&["SBAR", "VP"])))])]),
        ]);
        let fragment_t_unit = and(vec![label(&["FRAG"]), parent(label(ROOT)), not(desc(clause.clone()))]);
        let complex_t_unit = and(vec![t_unit.clone(), desc(dependent_clause.clone())]);
        let coordinate_phrase = and(vec![label(&["ADJP", "ADVP", "NP", "VP"]), child(label(&["CC"]))]);
        let complex_nominal = or(vec![
            and(vec![
                label(&["NP"]),
                not(parent(label(&["NP"]))),
                or(vec![
                    desc(label(&["JJ", "POS", "PP", "S", "VBG"])),
                    desc(and(vec![label(&["NP"]), followed_by(label(&["NP"])), not(next_sibling(label(&["CC"])))])),
                ]),
            ]),
            and(vec![
                label(&["SBAR"]),
                or(vec![
                    child(label(&["WHNP"])),
                    child(and(vec![label(&["IN"]), word(&["that", "for"])])),
                    first_child(label(&["S"])),
                ]),
                or(vec![next_sibling(label(&["VP"])), parent(label(&["VP"]))]),
            ]),
            and(vec![
                label(&["S"]),
                child(and(vec![label(&["VP"]), child(label(&["VBG", "TO"]))])),
                next_sibling(label(&["VP"])),
            ]),
        ]);
        let verb_phrase = or(vec![
            and(vec![label(&["VP"]), parent(label(CLAUSE))]),
            and(vec![label(FINITE), parent(and(vec![label(&["SQ"]), not(child(label(&["VP"])))]))]),
        ]);
        Patterns {
            clause,
            dependent_clause,
            t_unit,
            fragment_t_unit,
            complex_t_unit,
            coordinate_phrase,
            complex_nominal,
            verb_phrase,
        }
    })
}

/// Counts the nine units on a constituency tree.
pub fn count_units(con: &ConstituencyTree) -> Result<UnitCounts> {
    if con.leaves().is_empty() {
        return Err(Error::EmptyTree);
    }
    let ix = TreeIndex::new(con);
    let p = patterns();
    let w = (0..ix.len()).filter(|&n| ix.word(n).is_some() && !PUNCT_TAGS.contains(&ix.label(n))).count();
    let s = if con.label == "ROOT" { con.children.len().max(1) } else { 1 };
    Ok(UnitCounts {
        w,
        s,
        c: ix.count(&p.clause),
        dc: ix.count(&p.dependent_clause),
        t: ix.count(&p.t_unit) + ix.count(&p.fragment_t_unit),
        ct: ix.count(&p.complex_t_unit),
        cp: ix.count(&p.coordinate_phrase),
        cn: ix.count(&p.complex_nominal),
        vp: ix.count(&p.verb_phrase),
    })
}

pub const RATIO_NAMES: [&str; 14] =
    ["MLS", "MLT", "MLC", "C/S", "C/T", "CT/T", "DC/C", "DC/T", "CP/C", "CP/T", "T/S", "CN/C", "CN/T", "VP/T"];

/// The fourteen mean-length and ratio measures; zero denominators give 0.
pub fn ratio_features(u: &UnitCounts) -> Named {
    let f = |a: usize, b: usize| safe_div(a as f64, b as f64);
    let vals = [
        f(u.w, u.s),
        f(u.w, u.t),
        f(u.w, u.c),
        f(u.c, u.s),
        f(u.c, u.t),
        f(u.ct, u.t),
        f(u.dc, u.c),
        f(u.dc, u.t),
        f(u.cp, u.c),
        f(u.cp, u.t),
        f(u.t, u.s),
        f(u.cn, u.c),
        f(u.cn, u.t),
        f(u.vp, u.t),
    ];
    RATIO_NAMES.iter().copied().zip(vals).collect()
}

pub const UNIT_NAMES: [&str; 9] = ["W", "S", "C", "DC", "T", "CT", "CP", "CN", "VP"];

pub fn unit_features(u: &UnitCounts) -> Named {
    let vals = [u.w, u.s, u.c, u.dc, u.t, u.ct, u.cp, u.cn, u.vp];
    UNIT_NAMES.iter().copied().zip(vals.map(|v| v as f64)).collect()
}

/// Phrase inventory and shape of the constituency tree.
pub fn phrase_features(con: &ConstituencyTree) -> Named {
    let ix = TreeIndex::new(con);
    let count = |ls: &'static [&'static str]| ix.count(&label(ls)) as f64;
    let internal = (0..ix.len()).filter(|&n| ix.word(n).is_none()).count() as f64;
    vec![
        ("con_height", ix.height() as f64),
        ("con_internal_nodes", internal),
        ("np_count", count(&["NP"])),
        ("pp_count", count(&["PP"])),
        ("sbar_count", count(&["SBAR"])),
        ("wh_phrase_count", count(&["WHNP", "WHADVP", "WHPP", "WHADJP"])),
        ("adjp_count", count(&["ADJP"])),
        ("advp_count", count(&["ADVP"])),
    ]
}
