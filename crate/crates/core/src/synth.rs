//! Synthetic corpora and query workloads with template parses, and the
//! two-question case-study fixture.
//!
//! A generated world holds three passage kinds:
//! - film articles: director, two actors and a filming city
//! - director bios: death date and birth city
//! - notes: an entity-free answer sentence, `"the <a> <b> is kept in the <c> <d>."`,
//!   followed by a provenance sentence naming a city and an actor
//!
//! Lookup questions about a note share its vocabulary but name no entity, so
//! graph seeding has nothing to anchor on and only dense search finds it. Death-date questions name the
//! film; the bio holding the answer shares no entity with the question and
//! is reached through the film → director hop.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Passage, Query};
use crate::error::{Error, Result};
use crate::eval::ParseMap;
use crate::parse::{EntitySpan, EntityType, ParseRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_people: usize,
    pub films_per_person: usize,
    pub n_notes: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { n_people: 40, films_per_person: 4, n_notes: 60, seed: 0 }
    }
}

impl SynthConfig {
    /// Sizes giving `n` passages (for `n ≥ 10`), half of them film or bio pages.
    pub fn with_passages(n: usize, seed: u64) -> Self {
        let n_people = (n / 10).max(1);
        Self { n_people, films_per_person: 4, n_notes: n.saturating_sub(5 * n_people), seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueryKind {
    Lookup,
    MultiHop,
}

#[derive(Debug, Clone)]
struct Person {
    name: [String; 2],
    death: String,
    bio_id: String,
}

#[derive(Debug, Clone)]
struct Film {
    name: [String; 2],
    director: usize,
}

#[derive(Debug, Clone)]
struct Note {
    subject: [String; 2],
    place: String,
    id: String,
}

const MONTHS: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

// generated words must not hide inside template words
const TEMPLATE_WORDS: &str = "what where when was is the date of death director directed film filmed \
    star kept born and in given";

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Unique pseudo-words built from consonant-vowel syllables.
struct WordGen {
    rng: ChaCha8Rng,
    used: HashSet<String>,
}

impl WordGen {
    fn word(&mut self, syllables: usize) -> String {
        loop {
            let w: String = (0..syllables)
                .flat_map(|_| {
                    [
                        CONSONANTS[self.rng.gen_range(0..CONSONANTS.len())] as char,
                        VOWELS[self.rng.gen_range(0..VOWELS.len())] as char,
                    ]
                })
                .collect();
            if !TEMPLATE_WORDS.contains(&w) && self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn name(&mut self, a: usize, b: usize) -> [String; 2] {
        [capitalize(&self.word(a)), capitalize(&self.word(b))]
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
}

/// A generated corpus and the facts behind it.
#[derive(Debug, Clone)]
pub struct World {
    pub corpus: Corpus,
    people: Vec<Person>,
    films: Vec<Film>,
    notes: Vec<Note>,
}

/// Queries with gold data and their parse records.
#[derive(Debug, Clone, Default)]
pub struct Workload {
    pub queries: Vec<Query>,
    pub kinds: Vec<QueryKind>,
    pub parses: Vec<ParseRecord>,
}

impl Workload {
    pub fn parse_map(&self) -> Result<ParseMap> {
        parse_map(&self.parses)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

pub fn parse_map(records: &[ParseRecord]) -> Result<ParseMap> {
    records.iter().map(|r| Ok((r.id.clone(), r.to_parsed()?))).collect()
}

impl World {
    pub fn generate(cfg: &SynthConfig) -> Result<Self> {
        if cfg.n_people == 0 || cfg.films_per_person == 0 {
            return Err(Error::InvalidArgument("synthetic world needs people and films".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut words = WordGen { rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed), used: HashSet::new() };
        let mut dates = HashSet::new();
        let cities: Vec<String> = (0..(cfg.n_people / 5).max(3)).map(|_| capitalize(&words.word(3))).collect();
        let actors: Vec<[String; 2]> = (0..(cfg.n_people * 2).max(2)).map(|_| words.name(2, 2)).collect();
        let mut passages = Vec::new();
        let mut people = Vec::with_capacity(cfg.n_people);
        for i in 0..cfg.n_people {
            let name = words.name(2, 3);
            // month and day are entities, keep them unique so bios stay unlinked
            let (m, d) = loop {
                let md = (rng.gen_range(0..12), rng.gen_range(1..=28));
                if dates.insert(md) || dates.len() >= 12 * 28 {
                    break md;
                }
            };
            let death = format!("{} {}, {}", MONTHS[m], d, rng.gen_range(1950..2020));
            let bio_id = format!("bio-{i:04}");
            passages.push(Passage {
                id: bio_id.clone(),
                title: name.join(" "),
                text: format!(
                    "The date of death of film director {0} is {death}. {0} was born in {1}.",
                    name.join(" "),
                    cities[rng.gen_range(0..cities.len())]
                ),
            });
            people.push(Person { name, death, bio_id });
        }
        let mut films = Vec::new();
        for (p, person) in people.iter().enumerate() {
            for _ in 0..cfg.films_per_person {
                let name = words.name(2, 2);
                let id = format!("film-{:04}", films.len());
                let a = rng.gen_range(0..actors.len());
                let b = (a + rng.gen_range(1..actors.len().max(2))) % actors.len();
                passages.push(Passage {
                    id,
                    title: name.join(" "),
                    text: format!(
                        "{0} is a {1} film directed by {2}. {3} and {4} star in {0}. {0} was filmed in {5}.",
                        name.join(" "),
                        rng.gen_range(1930..2000),
                        person.name.join(" "),
                        actors[a].join(" "),
                        actors[b].join(" "),
                        cities[rng.gen_range(0..cities.len())]
                    ),
                });
                films.push(Film { name, director: p });
            }
        }
        let mut notes = Vec::with_capacity(cfg.n_notes);
        for i in 0..cfg.n_notes {
            let subject = [words.word(3), words.word(3)];
            let place = format!("{} {}", words.word(3), words.word(3));
            let id = format!("note-{i:04}");
            passages.push(Passage {
                id: id.clone(),
                title: subject.join(" "),
                text: format!(
                    "the {} is kept in the {place}. It was given to {} by {}.",
                    subject.join(" "),
                    cities[rng.gen_range(0..cities.len())],
                    actors[rng.gen_range(0..actors.len())].join(" ")
                ),
            });
            notes.push(Note { subject, place, id });
        }
        Ok(Self { corpus: Corpus::new(passages)?, people, films, notes })
    }

    /// `n` queries, a `multi_hop_fraction` share of them death-date
    /// questions, in shuffled order.
    pub fn workload(&self, n: usize, multi_hop_fraction: f64, seed: u64) -> Result<Workload> {
        if self.notes.is_empty() && multi_hop_fraction < 1.0 {
            return Err(Error::InvalidArgument("lookup queries need notes".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_multi = (n as f64 * multi_hop_fraction.clamp(0.0, 1.0)).round() as usize;
        let mut kinds: Vec<QueryKind> =
            (0..n).map(|i| if i < n_multi { QueryKind::MultiHop } else { QueryKind::Lookup }).collect();
        kinds.shuffle(&mut rng);
        let mut w = Workload::default();
        for (i, &kind) in kinds.iter().enumerate() {
            let id = format!("q{i:04}");
            let past = rng.gen_bool(0.5);
            let (q, rec) = match kind {
                QueryKind::Lookup => {
                    let note = &self.notes[rng.gen_range(0..self.notes.len())];
                    let q = Query {
                        id: id.clone(),
                        text: lookup_text(&note.subject, past),
                        gold_answers: vec![note.place.clone()],
                        gold_passage_ids: vec![note.id.clone()],
                    };
                    (q, lookup_parse(&id, &note.subject, past))
                }
                QueryKind::MultiHop => {
                    let film = &self.films[rng.gen_range(0..self.films.len())];
                    let person = &self.people[film.director];
                    let q = Query {
                        id: id.clone(),
                        text: death_date_text(&film.name, past),
                        gold_answers: vec![person.death.clone()],
                        gold_passage_ids: vec![person.bio_id.clone()],
                    };
                    (q, death_date_parse(&id, &film.name, past))
                }
            };
            w.queries.push(q);
            w.parses.push(rec);
        }
        w.kinds = kinds;
        Ok(w)
    }
}

fn cop(past: bool) -> &'static str {
    if past {
        "was"
    } else {
        "is"
    }
}

fn cop_tag(past: bool) -> &'static str {
    if past {
        "VBD"
    } else {
        "VBZ"
    }
}

fn conllu(rows: &[(&str, &str, &str, &str, usize, &str)]) -> String {
    rows.iter()
        .enumerate()
        .map(|(i, (form, lemma, upos, xpos, head, rel))| {
            format!("{}\t{form}\t{lemma}\t{upos}\t{xpos}\t_\t{head}\t{rel}\t_\t_\n", i + 1)
        })
        .collect()
}

fn lookup_text(subject: &[String; 2], past: bool) -> String {
    format!("Where {} the {} {} kept?", cop(past), subject[0], subject[1])
}

fn lookup_parse(id: &str, subject: &[String; 2], past: bool) -> ParseRecord {
    let (a, b) = (subject[0].as_str(), subject[1].as_str());
    let rows = [
        ("Where", "where", "ADV", "WRB", 6, "advmod"),
        (cop(past), "be", "AUX", cop_tag(past), 6, "aux:pass"),
        ("the", "the", "DET", "DT", 5, "det"),
        (a, a, "NOUN", "NN", 5, "compound"),
        (b, b, "NOUN", "NN", 6, "nsubj:pass"),
        ("kept", "keep", "VERB", "VBN", 0, "root"),
        ("?", "?", "PUNCT", ".", 6, "punct"),
    ];
    let tree = format!(
        "(ROOT (SBARQ (WHADVP (WRB Where)) (SQ ({} {}) (NP (DT the) (NN {a}) (NN {b})) (VP (VBN kept))) (. ?)))",
        cop_tag(past),
        cop(past)
    );
    ParseRecord {
        id: id.to_string(),
        conllu: Some(conllu(&rows)),
        constituency: Some(tree),
        entities: vec![],
        error: None,
    }
}

fn death_date_text(film: &[String; 2], past: bool) -> String {
    format!("What {} the date of death of the director of film {} {}?", cop(past), film[0], film[1])
}

/// Shared by the synthetic death-date questions and the case-study query.
/// `film` carries each title word with its UPOS and PTB tags.
fn death_date_record(id: &str, film: [(&str, &str, &str); 2], past: bool) -> ParseRecord {
    let [(a, a_upos, a_tag), (b, _, _)] = film;
    let a_rel = if a_upos == "DET" { "det" } else { "compound" };
    let rows = [
        ("What", "what", "PRON", "WP", 4, "nsubj"),
        (cop(past), "be", "AUX", cop_tag(past), 4, "cop"),
        ("the", "the", "DET", "DT", 4, "det"),
        ("date", "date", "NOUN", "NN", 0, "root"),
        ("of", "of", "ADP", "IN", 6, "case"),
        ("death", "death", "NOUN", "NN", 4, "nmod"),
        ("of", "of", "ADP", "IN", 9, "case"),
        ("the", "the", "DET", "DT", 9, "det"),
        ("director", "director", "NOUN", "NN", 6, "nmod"),
        ("of", "of", "ADP", "IN", 13, "case"),
        ("film", "film", "NOUN", "NN", 13, "compound"),
        (a, a, a_upos, a_tag, 13, a_rel),
        (b, b, "PROPN", "NNP", 9, "nmod"),
        ("?", "?", "PUNCT", ".", 4, "punct"),
    ];
    let tree = format!(
        "(ROOT (SBARQ (WHNP (WP What)) (SQ ({} {}) (NP (NP (DT the) (NN date)) (PP (IN of) (NP (NP (NN death)) \
         (PP (IN of) (NP (NP (DT the) (NN director)) (PP (IN of) (NP (NN film) ({a_tag} {a}) (NNP {b}))))))))) (. ?)))",
        cop_tag(past),
        cop(past)
    );
    ParseRecord {
        id: id.to_string(),
        conllu: Some(conllu(&rows)),
        constituency: Some(tree),
        entities: vec![EntitySpan { text: format!("{a} {b}"), etype: EntityType::Other, start: 11, end: 13 }],
        error: None,
    }
}

fn death_date_parse(id: &str, film: &[String; 2], past: bool) -> ParseRecord {
    death_date_record(id, [(&film[0], "PROPN", "NNP"), (&film[1], "PROPN", "NNP")], past)
}

/// Two questions over a small hand-written corpus: a single-hop factoid
/// answered by one passage, and a film → director → death-date chain
/// surrounded by director bios that match the question's wording better
/// than the answer does.
pub fn case_study() -> Result<Workload> {
    Ok(Workload {
        queries: case_study_queries(),
        kinds: vec![QueryKind::Lookup, QueryKind::MultiHop],
        parses: vec![
            case_study_got_parse(),
            death_date_record("multi", [("The", "DET", "DT"), ("Organization", "PROPN", "NNP")], false),
        ],
    })
}

pub fn case_study_queries() -> Vec<Query> {
    vec![
        Query {
            id: "single".into(),
            text: "When is season 8 for game of thrones?".into(),
            gold_answers: vec!["April 2019".into()],
            gold_passage_ids: vec!["got-s8".into()],
        },
        Query {
            id: "multi".into(),
            text: "What is the date of death of the director of film The Organization?".into(),
            gold_answers: vec!["December 12, 2012".into()],
            gold_passage_ids: vec!["don-medford".into()],
        },
    ]
}

fn case_study_got_parse() -> ParseRecord {
    let rows = [
        ("When", "when", "ADV", "WRB", 3, "advmod"),
        ("is", "be", "AUX", "VBZ", 3, "cop"),
        ("season", "season", "NOUN", "NN", 0, "root"),
        ("8", "8", "NUM", "CD", 3, "nummod"),
        ("for", "for", "ADP", "IN", 6, "case"),
        ("game", "game", "NOUN", "NN", 3, "nmod"),
        ("of", "of", "ADP", "IN", 8, "case"),
        ("thrones", "throne", "NOUN", "NNS", 6, "nmod"),
        ("?", "?", "PUNCT", ".", 3, "punct"),
    ];
    ParseRecord {
        id: "single".into(),
        conllu: Some(conllu(&rows)),
        constituency: Some(
            "(ROOT (SBARQ (WHADVP (WRB When)) (SQ (VBZ is) (NP (NP (NN season) (CD 8)) (PP (IN for) \
             (NP (NP (NN game)) (PP (IN of) (NP (NNS thrones))))))) (. ?)))"
                .into(),
        ),
        entities: vec![EntitySpan { text: "game of thrones".into(), etype: EntityType::Other, start: 5, end: 8 }],
        error: None,
    }
}

const CASE_PASSAGES: &[(&str, &str, &str)] = &[
    (
        "got-s8",
        "Game of Thrones (season 8)",
        "Season 8 of Game of Thrones is scheduled to premiere in April 2019. Ramin Djawadi returns as composer.",
    ),
    ("got", "Game of Thrones", "Game of Thrones is an American fantasy drama television series."),
    (
        "the-organization",
        "The Organization (film)",
        "The Organization is a 1971 American crime thriller film starring Sidney Poitier as Virgil Tibbs and directed by Don Medford.",
    ),
    ("don-medford", "Don Medford", "Don Medford was an American film director who died on December 12, 2012."),
    ("hunters", "Hunters Are for Killing", "Hunters Are for Killing is a 1970 television film directed by Don Medford."),
    ("hunting-party", "The Hunting Party (1971 film)", "The Hunting Party is a 1971 western film directed by Don Medford."),
    ("virgil-tibbs", "Virgil Tibbs", "Virgil Tibbs is a detective first played by Sidney Poitier in 1967."),
    (
        "lino-brocka",
        "Lino Brocka",
        "Lino Brocka was a Filipino film director whose date of death is May 22, 1991.",
    ),
    (
        "satyajit-ray",
        "Satyajit Ray",
        "Satyajit Ray was an Indian film director whose date of death is April 23, 1992.",
    ),
    ("jean-vigo", "Jean Vigo", "Jean Vigo was a French film director whose date of death is October 5, 1934."),
    ("ida-lupino", "Ida Lupino", "Ida Lupino was a British film director whose date of death is August 3, 1995."),
    (
        "maya-deren",
        "Maya Deren",
        "Maya Deren was a Ukrainian film director whose date of death is October 13, 1961.",
    ),
];

pub fn case_study_corpus() -> Result<Corpus> {
    Corpus::new(
        CASE_PASSAGES
            .iter()
            .map(|(id, title, text)| Passage { id: id.to_string(), title: title.to_string(), text: text.to_string() })
            .collect(),
    )
}

/// Number of queries of each kind.
pub fn kind_counts(kinds: &[QueryKind]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for k in kinds {
        *m.entry(match k {
            QueryKind::Lookup => "lookup",
            QueryKind::MultiHop => "multi_hop",
        })
        .or_default() += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{extract_all, MockOpenIe};

    #[test]
    fn world_shape() {
        let w = World::generate(&SynthConfig::default()).unwrap();
        assert_eq!(w.corpus.len(), 40 + 160 + 60);
        assert_eq!(World::generate(&SynthConfig::with_passages(1000, 1)).unwrap().corpus.len(), 1000);
        let facts = extract_all(&w.corpus, &MockOpenIe).unwrap();
        assert_eq!(facts.len(), 40 * 2 + 160 * 4 + 60);
    }

    #[test]
    fn workload_parses_and_golds() {
        let w = World::generate(&SynthConfig::default()).unwrap();
        let wl = w.workload(40, 0.25, 3).unwrap();
        assert_eq!(kind_counts(&wl.kinds)["multi_hop"], 10);
        let pm = wl.parse_map().unwrap();
        for q in &wl.queries {
            let pq = &pm[&q.id];
            let words: Vec<&str> = pq.dep[0].tokens().iter().map(|t| t.form.as_str()).collect();
            assert_eq!(words.join(" ").replace(" ?", "?"), q.text);
            assert_eq!(pq.con.leaves().join(" ").replace(" ?", "?"), q.text);
            let gold = w.corpus.get(&q.gold_passage_ids[0]).unwrap();
            assert!(gold.text.contains(&q.gold_answers[0]));
        }
        let again = w.workload(40, 0.25, 3).unwrap();
        assert_eq!(again.queries, wl.queries);
    }

    #[test]
    fn case_study_fixture_is_consistent() {
        let c = case_study_corpus().unwrap();
        let wl = case_study().unwrap();
        let pm = wl.parse_map().unwrap();
        for q in &wl.queries {
            let words: Vec<&str> = pm[&q.id].dep[0].tokens().iter().map(|t| t.form.as_str()).collect();
            assert_eq!(words.join(" ").replace(" ?", "?"), q.text);
            assert!(c.get(&q.gold_passage_ids[0]).unwrap().text.contains(&q.gold_answers[0]));
        }
    }
}
