//! Trees over a ranked alphabet, optionally with state-labeled leaves.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::fta::State;
use crate::Error;

/// An element of T_Σ(Q).
///
/// Children are shared, so cloning is cheap and enumerating large sets of
/// trees stores each subtree once. Equality and ordering are structural;
/// symbols compare by name because alphabets keep them sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Node {
        symbol: Symbol,
        children: Arc<[Tree]>,
    },
    State(State),
}

impl Tree {
    pub fn leaf(symbol: Symbol) -> Tree {
        Tree::Node {
            symbol,
            children: Arc::from(Vec::new()),
        }
    }

    pub fn node(symbol: Symbol, children: Vec<Tree>) -> Tree {
        Tree::Node {
            symbol,
            children: Arc::from(children),
        }
    }

    pub fn state(q: u32) -> Tree {
        Tree::State(State(q))
    }

    /// Height with leaves at height 0.
    pub fn height(&self) -> usize {
        match self {
            Tree::Node { children, .. } => {
                children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
            }
            Tree::State(_) => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::size).sum::<usize>(),
            Tree::State(_) => 1,
        }
    }

    /// True if the tree has no state leaves (it lies in T_Σ).
    pub fn is_ground(&self) -> bool {
        match self {
            Tree::Node { children, .. } => children.iter().all(Tree::is_ground),
            Tree::State(_) => false,
        }
    }

    /// Checks symbol membership and arities against `alphabet`.
    pub fn validate(&self, alphabet: &RankedAlphabet) -> Result<(), Error> {
        match self {
            Tree::Node { symbol, children } => {
                if !alphabet.contains(*symbol) {
                    return Err(Error::UnknownSymbol(alloc::format!("#{}", symbol.0)));
                }
                let rank = alphabet.rank(*symbol);
                if rank != children.len() {
                    return Err(Error::Arity {
                        symbol: alphabet.name(*symbol).to_string(),
                        rank,
                        given: children.len(),
                    });
                }
                children.iter().try_for_each(|c| c.validate(alphabet))
            }
            Tree::State(_) => Ok(()),
        }
    }

    /// Parses `sigma(sigma(alpha, alpha), 3)`; bare integers are state leaves.
    pub fn parse(alphabet: &RankedAlphabet, text: &str) -> Result<Tree, Error> {
        let mut p = Parser {
            text,
            pos: 0,
            alphabet,
        };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> impl fmt::Display + 'a {
        DisplayTree {
            tree: self,
            alphabet,
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Node { symbol, children } => {
                write!(f, "#{}", symbol.0)?;
                if !children.is_empty() {
                    f.debug_list().entries(children.iter()).finish()?;
                }
                Ok(())
            }
            Tree::State(q) => write!(f, "{}", q.0),
        }
    }
}

struct DisplayTree<'a> {
    tree: &'a Tree,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for DisplayTree<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tree {
            Tree::Node { symbol, children } => {
                f.write_str(self.alphabet.name(*symbol))?;
                if !children.is_empty() {
                    f.write_str("(")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", c.display(self.alphabet))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Tree::State(q) => write!(f, "{}", q.0),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: &'a RankedAlphabet,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::TreeSyntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn tree(&mut self) -> Result<Tree, Error> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected a symbol or a state"));
        }
        let word = &rest[..len];
        self.pos += len;
        if let Ok(q) = word.parse::<u32>() {
            return Ok(Tree::state(q));
        }
        let symbol = self
            .alphabet
            .lookup(word)
            .ok_or_else(|| Error::UnknownSymbol(word.to_string()))?;
        let mut children = Vec::new();
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                children.push(self.tree()?);
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        let rank = self.alphabet.rank(symbol);
        if rank != children.len() {
            return Err(Error::Arity {
                symbol: word.to_string(),
                rank,
                given: children.len(),
            });
        }
        Ok(Tree::node(symbol, children))
    }
}
