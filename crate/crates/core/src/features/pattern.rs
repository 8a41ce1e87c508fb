//! A small structural matcher over constituency trees.
//!
//! Supports the relations needed for clause, T-unit and phrase counting:
//! label sets, parent/child, ancestor/descendant, first child, and
//! preceding/following sibling constraints, combined with and/or/not.

use crate::parse::ConstituencyTree;

#[derive(Debug)]
struct Node<'a> {
    label: &'a str,
    word: Option<&'a str>,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// Flattened tree with parent links, preorder numbered.
#[derive(Debug)]
pub struct TreeIndex<'a> {
    nodes: Vec<Node<'a>>,
}

impl<'a> TreeIndex<'a> {
    pub fn new(tree: &'a ConstituencyTree) -> Self {
        let mut nodes = Vec::new();
        Self::push(tree, None, &mut nodes);
        Self { nodes }
    }

    fn push(t: &'a ConstituencyTree, parent: Option<usize>, nodes: &mut Vec<Node<'a>>) -> usize {
        let id = nodes.len();
        nodes.push(Node { label: &t.label, word: t.leaf_form.as_deref(), parent, children: Vec::new() });
        for c in &t.children {
            let cid = Self::push(c, Some(id), nodes);
            nodes[id].children.push(cid);
        }
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self, n: usize) -> &str {
        self.nodes[n].label
    }

    pub fn word(&self, n: usize) -> Option<&str> {
        self.nodes[n].word
    }

    pub fn parent(&self, n: usize) -> Option<usize> {
        self.nodes[n].parent
    }

    pub fn children(&self, n: usize) -> &[usize] {
        &self.nodes[n].children
    }

    fn siblings(&self, n: usize) -> (&[usize], usize) {
        match self.nodes[n].parent {
            Some(p) => {
                let ch = &self.nodes[p].children;
                let pos = ch.iter().position(|&c| c == n).unwrap();
                (ch, pos)
            }
            None => (&[], 0),
        }
    }

    fn descendants(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.nodes[n].children.iter().rev().copied().collect();
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x].children.iter().rev());
        }
        out
    }

    /// Number of nodes satisfying `pat`.
    pub fn count(&self, pat: &Pat) -> usize {
        (0..self.len()).filter(|&n| pat.matches(self, n)).count()
    }

    pub fn height(&self) -> usize {
        fn h(ix: &TreeIndex<'_>, n: usize) -> usize {
            ix.children(n).iter().map(|&c| 1 + h(ix, c)).max().unwrap_or(0)
        }
        h(self, 0)
    }
}

/// Node predicate.
#[derive(Debug, Clone)]
pub enum Pat {
    Any,
    Label(&'static [&'static str]),
    /// Leaf word, case-insensitive.
    Word(&'static [&'static str]),
    And(Vec<Pat>),
    Or(Vec<Pat>),
    Not(Box<Pat>),
    /// Some immediate child matches.
    Child(Box<Pat>),
    /// Some proper descendant matches.
    Descendant(Box<Pat>),
    Parent(Box<Pat>),
    /// Some proper ancestor matches.
    Ancestor(Box<Pat>),
    /// The first child matches.
    FirstChild(Box<Pat>),
    /// Some earlier sibling matches.
    PrecededBy(Box<Pat>),
    /// The immediately following sibling matches.
    ImmediatelyFollowedBy(Box<Pat>),
    /// Some later sibling matches.
    FollowedBy(Box<Pat>),
}

pub fn label(ls: &'static [&'static str]) -> Pat {
    Pat::Label(ls)
}
pub fn word(ws: &'static [&'static str]) -> Pat {
    Pat::Word(ws)
}
pub fn child(p: Pat) -> Pat {
    Pat::Child(Box::new(p))
}
pub fn desc(p: Pat) -> Pat {
    Pat::Descendant(Box::new(p))
}
pub fn parent(p: Pat) -> Pat {
    Pat::Parent(Box::new(p))
}
pub fn ancestor(p: Pat) -> Pat {
    Pat::Ancestor(Box::new(p))
}
pub fn first_child(p: Pat) -> Pat {
    Pat::FirstChild(Box::new(p))
}
pub fn preceded_by(p: Pat) -> Pat {
    Pat::PrecededBy(Box::new(p))
}
pub fn next_sibling(p: Pat) -> Pat {
    Pat::ImmediatelyFollowedBy(Box::new(p))
}
pub fn followed_by(p: Pat) -> Pat {
    Pat::FollowedBy(Box::new(p))
}
pub fn not(p: Pat) -> Pat {
    Pat::Not(Box::new(p))
}
pub fn and(ps: Vec<Pat>) -> Pat {
    Pat::And(ps)
}
pub fn or(ps: Vec<Pat>) -> Pat {
    Pat::Or(ps)
}

impl Pat {
    pub fn matches(&self, ix: &TreeIndex<'_>, n: usize) -> bool {
        match self {
            Pat::Any => true,
            Pat::Label(ls) => ls.contains(&ix.label(n)),
            Pat::Word(ws) => ix.word(n).is_some_and(|w| ws.iter().any(|x| x.eq_ignore_ascii_case(w))),
            Pat::And(ps) => ps.iter().all(|p| p.matches(ix, n)),
            Pat::Or(ps) => ps.iter().any(|p| p.matches(ix, n)),
            Pat::Not(p) => !p.matches(ix, n),
            Pat::Child(p) => ix.children(n).iter().any(|&c| p.matches(ix, c)),
            Pat::Descendant(p) => ix.descendants(n).into_iter().any(|d| p.matches(ix, d)),
            Pat::Parent(p) => ix.parent(n).is_some_and(|q| p.matches(ix, q)),
            Pat::Ancestor(p) => {
                let mut cur = ix.parent(n);
                while let Some(a) = cur {
                    if p.matches(ix, a) {
                        return true;
                    }
                    cur = ix.parent(a);
                }
                false
            }
            Pat::FirstChild(p) => ix.children(n).first().is_some_and(|&c| p.matches(ix, c)),
            Pat::PrecededBy(p) => {
                let (sib, pos) = ix.siblings(n);
                sib[..pos].iter().any(|&s| p.matches(ix, s))
            }
            Pat::ImmediatelyFollowedBy(p) => {
                let (sib, pos) = ix.siblings(n);
                sib.get(pos + 1).is_some_and(|&s| p.matches(ix, s))
            }
            Pat::FollowedBy(p) => {
                let (sib, pos) = ix.siblings(n);
                sib.iter().skip(pos + 1).any(|&s| p.matches(ix, s))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::read_bracketed;

    #[test]
    fn relations() {
        let t = read_bracketed("(ROOT (S (NP (DT the) (NN dog)) (VP (VBZ barks)) (. .)))").unwrap();
        let ix = TreeIndex::new(&t);
        assert_eq!(ix.count(&label(&["NN", "DT"])), 2);
        assert_eq!(ix.count(&and(vec![label(&["S"]), parent(label(&["ROOT"]))])), 1);
        assert_eq!(ix.count(&and(vec![label(&["VP"]), preceded_by(label(&["NP"]))])), 1);
        assert_eq!(ix.count(&and(vec![label(&["NP"]), next_sibling(label(&["VP"]))])), 1);
        assert_eq!(ix.count(&and(vec![label(&["NN"]), ancestor(label(&["S"]))])), 1);
        assert_eq!(ix.count(&and(vec![label(&["S"]), first_child(label(&["NP"]))])), 1);
        assert_eq!(ix.count(&word(&["DOG"])), 1);
        assert_eq!(ix.height(), 3);
    }
}
