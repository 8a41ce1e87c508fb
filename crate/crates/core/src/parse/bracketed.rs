use super::ConstituencyTree;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(&'a str, usize),
}

fn tokenize(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push(Tok::Open(i));
                i += 1;
            }
            b')' => {
                out.push(Tok::Close(i));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                out.push(Tok::Atom(&text[start..i], start));
            }
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn parse_node(&mut self) -> Result<ConstituencyTree> {
        let open_at = match self.toks.get(self.pos) {
            Some(Tok::Open(p)) => *p,
            Some(Tok::Close(p)) | Some(Tok::Atom(_, p)) => return Err(Error::UnbalancedParens(*p)),
            None => return Err(Error::UnbalancedParens(self.len)),
        };
        self.pos += 1;
        // PTB files often wrap the tree in an unlabeled outer bracket: "( (S ...) )".
        let label = match self.toks.get(self.pos) {
            Some(Tok::Atom(s, _)) => {
                self.pos += 1;
                Some(s.to_string())
            }
            Some(Tok::Open(_)) => None,
            Some(Tok::Close(_)) => return Err(Error::EmptyNode),
            None => return Err(Error::UnbalancedParens(open_at)),
        };
        match self.toks.get(self.pos) {
            Some(Tok::Atom(word, _)) => {
                let word = word.to_string();
                self.pos += 1;
                self.expect_close(open_at)?;
                let label = label.ok_or(Error::EmptyNode)?;
                Ok(ConstituencyTree::leaf(label, word))
            }
            Some(Tok::Close(_)) => Err(Error::EmptyNode),
            Some(Tok::Open(_)) => {
                let mut children = Vec::new();
                while let Some(Tok::Open(_)) = self.toks.get(self.pos) {
                    children.push(self.parse_node()?);
                }
                self.expect_close(open_at)?;
                match label {
                    Some(l) => Ok(ConstituencyTree::node(l, children)),
                    None if children.len() == 1 => Ok(children.pop().unwrap()),
                    None => Ok(ConstituencyTree::node("ROOT", children)),
                }
            }
            None => Err(Error::UnbalancedParens(open_at)),
        }
    }

    fn expect_close(&mut self, open_at: usize) -> Result<()> {
        match self.toks.get(self.pos) {
            Some(Tok::Close(_)) => {
                self.pos += 1;
                Ok(())
            }
            Some(Tok::Atom(_, p)) => Err(Error::UnbalancedParens(*p)),
            _ => Err(Error::UnbalancedParens(open_at)),
        }
    }
}

/// Reads every top-level bracketed tree in `text`.
pub fn read_bracketed_forest(text: &str) -> Result<Vec<ConstituencyTree>> {
    let toks = tokenize(text);
    let mut p = Parser { toks, pos: 0, len: text.len() };
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        out.push(p.parse_node()?);
    }
    if out.is_empty() {
        return Err(Error::EmptyTree);
    }
    Ok(out)
}

/// Reads a single PTB-style tree such as `(ROOT (S (NP (NNS Dogs)) (VP (VBZ bark))))`.
pub fn read_bracketed(text: &str) -> Result<ConstituencyTree> {
    let mut forest = read_bracketed_forest(text)?;
    if forest.len() > 1 {
        // Trailing material after a complete tree means an extra closing or opening bracket.
        let toks = tokenize(text);
        let mut depth = 0i64;
        for t in toks {
            match t {
                Tok::Open(_) => depth += 1,
                Tok::Close(p) => {
                    depth -= 1;
                    if depth == 0 {
                        return Err(Error::UnbalancedParens(p + 1));
                    }
                }
                Tok::Atom(..) => {}
            }
        }
    }
    Ok(forest.remove(0))
}

pub fn print_bracketed(tree: &ConstituencyTree) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(t: &ConstituencyTree, out: &mut String) {
    out.push('(');
    out.push_str(&t.label);
    if let Some(w) = &t.leaf_form {
        out.push(' ');
        out.push_str(w);
    }
    for c in &t.children {
        out.push(' ');
        write_node(c, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dogs_bark() {
        let t = read_bracketed("(ROOT (S (NP (NNS Dogs)) (VP (VBZ bark))))").unwrap();
        assert_eq!(t.leaves(), vec!["Dogs", "bark"]);
        assert_eq!(t.label, "ROOT");
        assert_eq!(t.children[0].children[1].label, "VP");
    }

    #[test]
    fn whitespace_insensitive() {
        let a = read_bracketed("(ROOT(S(NP(NNS Dogs))(VP(VBZ bark))))").unwrap();
        let b = read_bracketed("(ROOT\n  (S\n    (NP (NNS Dogs))\n    (VP (VBZ bark))))").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unbalanced() {
        assert!(matches!(read_bracketed("(NP (NN cat)"), Err(Error::UnbalancedParens(_))));
        assert!(matches!(read_bracketed("(NP (NN cat)))"), Err(Error::UnbalancedParens(_))));
    }

    #[test]
    fn empty_node() {
        assert!(matches!(read_bracketed("(NP )"), Err(Error::EmptyNode)));
        assert!(matches!(read_bracketed("()"), Err(Error::EmptyNode)));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(read_bracketed("   "), Err(Error::EmptyTree)));
    }

    #[test]
    fn unlabeled_outer_bracket() {
        let t = read_bracketed("( (S (NP (PRP I)) (VP (VBP run))) )").unwrap();
        assert_eq!(t.label, "S");
    }

    #[test]
    fn forest_of_roots() {
        let f = read_bracketed_forest("(ROOT (FRAG (UH Hi))) (ROOT (S (VP (VB Go))))").unwrap();
        assert_eq!(f.len(), 2);
    }

    fn label() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["S", "NP", "VP", "PP", "SBAR", "ADJP", "NN", "VBZ", "DT", "."])
            .prop_map(str::to_string)
    }

    fn word() -> impl Strategy<Value = String> {
        "[A-Za-z0-9,.?'-]{1,8}"
    }

    fn tree() -> impl Strategy<Value = ConstituencyTree> {
        let leaf = (label(), word()).prop_map(|(l, w)| ConstituencyTree::leaf(l, w));
        leaf.prop_recursive(4, 32, 4, |inner| {
            (label(), prop::collection::vec(inner, 1..4)).prop_map(|(l, ch)| ConstituencyTree::node(l, ch))
        })
    }

    proptest! {
        #[test]
        fn print_read_roundtrip(t in tree()) {
            let printed = print_bracketed(&t);
            prop_assert_eq!(read_bracketed(&printed).unwrap(), t.clone());
            // extra whitespace does not matter
            let spaced = printed.replace('(', " ( ").replace(')', " ) ");
            prop_assert_eq!(read_bracketed(&spaced).unwrap(), t);
        }
    }
}
