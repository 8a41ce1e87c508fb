use super::{DependencyTree, Token};
use crate::error::{Error, Result};

/// Reads a single-sentence CoNLL-U block.
///
/// Only ID, FORM, LEMMA, UPOS, HEAD and DEPREL are kept. Multi-word token
/// ranges (`3-4`) and empty nodes (`5.1`) are skipped.
pub fn read_conllu(text: &str) -> Result<DependencyTree> {
    let mut tokens = Vec::new();
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::MalformedColumnCount(line.to_string()));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0].parse().map_err(|_| Error::MalformedToken(format!("bad ID {:?}", cols[0])))?;
        let head: usize = cols[6].parse().map_err(|_| Error::MalformedToken(format!("bad HEAD {:?}", cols[6])))?;
        tokens.push(Token {
            index,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
    }
    DependencyTree::new(tokens)
}

/// Splits on blank lines and reads each sentence block.
pub fn read_conllu_sentences(text: &str) -> Result<Vec<DependencyTree>> {
    let mut out = Vec::new();
    let mut block = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if has_tokens(&block) {
                out.push(read_conllu(&block)?);
            }
            block.clear();
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    if has_tokens(&block) {
        out.push(read_conllu(&block)?);
    }
    Ok(out)
}

fn has_tokens(block: &str) -> bool {
    block.lines().any(|l| !l.starts_with('#') && !l.trim().is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(id: usize, form: &str, upos: &str, head: usize, rel: &str) -> String {
        format!("{id}\t{form}\t{}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_\n", form.to_lowercase())
    }

    #[test]
    fn two_token_block() {
        let text =
            format!("# text = Dogs bark\n{}{}", row(1, "Dogs", "NOUN", 2, "nsubj"), row(2, "bark", "VERB", 0, "root"));
        let t = read_conllu(&text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.root(), Some(2));
        assert_eq!(t.tokens()[0].deprel, "nsubj");
        assert_eq!(t.tokens()[0].lemma, "dogs");
    }

    #[test]
    fn cycle_rejected() {
        let text = format!("{}{}", row(1, "a", "X", 2, "dep"), row(2, "b", "X", 1, "dep"));
        assert!(matches!(read_conllu(&text), Err(Error::CyclicHeads)));
    }

    #[test]
    fn two_roots_rejected() {
        let text = format!("{}{}", row(1, "a", "X", 0, "root"), row(2, "b", "X", 0, "root"));
        assert!(matches!(read_conllu(&text), Err(Error::MultipleRoots)));
    }

    #[test]
    fn wrong_column_count() {
        assert!(matches!(read_conllu("1\tDogs\tdog\n"), Err(Error::MalformedColumnCount(_))));
    }

    #[test]
    fn ranges_and_empty_nodes_skipped() {
        let text = format!(
            "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n{}{}2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n",
            row(1, "do", "AUX", 2, "aux"),
            row(2, "n't", "PART", 0, "root")
        );
        assert_eq!(read_conllu(&text).unwrap().len(), 2);
    }

    #[test]
    fn multi_sentence_split() {
        let text = format!(
            "{}\n{}{}\n\n",
            row(1, "Hi", "INTJ", 0, "root"),
            row(1, "Dogs", "NOUN", 2, "nsubj"),
            row(2, "bark", "VERB", 0, "root")
        );
        let ts = read_conllu_sentences(&text).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1].len(), 2);
    }

    proptest! {
        // A permutation-derived head array where every token points at another
        // token (no root) always contains a cycle.
        #[test]
        fn rootless_heads_always_cyclic(perm in Just((1..=8usize).collect::<Vec<_>>()).prop_shuffle(), n in 2usize..8) {
            let ids: Vec<usize> = perm.into_iter().filter(|&i| i <= n).collect();
            // successor in the shuffled order, wrapping around: a single n-cycle
            let mut heads = vec![0; n];
            for k in 0..n {
                heads[ids[k] - 1] = ids[(k + 1) % n];
            }
            let text: String = (1..=n).map(|i| row(i, "w", "X", heads[i - 1], "dep")).collect();
            prop_assert!(matches!(read_conllu(&text), Err(Error::CyclicHeads)));
        }

        #[test]
        fn rooted_cycle_still_rejected(n in 3usize..9, a in 0usize..8, b in 0usize..8) {
            // chain to a root at token 1, then splice in a 2-cycle between two other tokens
            let a = 2 + a % (n - 1);
            let b = 2 + b % (n - 1);
            prop_assume!(a != b);
            let mut heads: Vec<usize> = (0..n).map(|i| if i == 0 { 0 } else { i }).collect();
            heads[a - 1] = b;
            heads[b - 1] = a;
            let text: String = (1..=n).map(|i| row(i, "w", "X", heads[i - 1], "dep")).collect();
            prop_assert!(matches!(read_conllu(&text), Err(Error::CyclicHeads)));
        }
    }
}
