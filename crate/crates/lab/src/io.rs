//! Plain-text automaton documents.
//!
//! ```text
//! # M_ex
//! states 0..3
//! finals 3
//! alphabet alpha/0 sigma/2
//! alpha -> 0
//! alpha -> 2
//! sigma(0,0) -> 1
//! sigma(1,3) -> 3
//! ```
//!
//! The three header lines come first, in any order. `states N` declares
//! `1..=N`, `states a..b` declares `a..=b` and `states {0, 2, 5}` lists
//! states explicitly. `finals` takes a possibly empty list of states.
//! Every other non-blank line is one transition. `#` starts a comment.
//!
//! Symbol names consist of letters, digits, `_` and non-ASCII characters.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use fta_core::{Fta, RankedAlphabet, State, StateSet, Symbol, Transition};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("`{0}` is declared twice")]
    DuplicateHeader(&'static str),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has rank {rank} but {given} argument(s) were given")]
    Arity {
        symbol: String,
        rank: usize,
        given: usize,
    },
    #[error("state {0} is not declared")]
    UndeclaredState(u32),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error(transparent)]
    Model(#[from] fta_core::Error),
}

/// Reads a document.
pub fn parse_fta(text: &str) -> Result<Fta, ParseError> {
    let mut header = Header::default();
    let mut transitions: Vec<Transition> = Vec::new();
    let mut seen: BTreeSet<Transition> = BTreeSet::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(content, line_no);
        cur.skip_ws();
        let keyword = matches!(
            content.split_whitespace().next(),
            Some("states" | "finals" | "alphabet")
        );
        if keyword && !content.contains("->") {
            if !transitions.is_empty() {
                return Err(cur.error(ParseErrorKind::Syntax(
                    "header lines must precede transitions".into(),
                )));
            }
            header.line(&mut cur)?;
            continue;
        }
        let (alphabet, states) = header.complete(&cur)?;
        let start = cur.pos;
        let t = transition(&mut cur, alphabet, states)?;
        if !seen.insert(t.clone()) {
            let shown = t.display(alphabet).to_string();
            return Err(cur.error_at(start, ParseErrorKind::DuplicateTransition(shown)));
        }
        transitions.push(t);
    }
    let end = Cursor::new("", last_line + 1);
    header.complete(&end)?;
    let Header {
        states,
        finals,
        alphabet,
    } = header;
    let (states, _) = states.expect("checked above");
    let (finals, _) = finals.expect("checked above");
    let alphabet = alphabet.expect("checked above");
    Fta::new(Arc::new(alphabet), states, finals, transitions).map_err(|e| end.error(e.into()))
}

/// Writes a document that [`parse_fta`] reads back to the same automaton.
/// Transitions appear in the automaton's sorted order.
pub fn format_fta(fta: &Fta) -> String {
    let mut out = String::new();
    let states: Vec<u32> = fta.states().iter().map(|q| q.0).collect();
    let contiguous = states.windows(2).all(|w| w[1] == w[0] + 1);
    match (states.first(), states.last()) {
        (Some(1), Some(&last)) if contiguous => writeln!(out, "states {last}"),
        (Some(&first), Some(&last)) if contiguous => writeln!(out, "states {first}..{last}"),
        (None, _) => writeln!(out, "states {{}}"),
        _ => writeln!(out, "states {{{}}}", join(&states, ", ")),
    }
    .expect("writing to a String");
    let finals: Vec<u32> = fta.finals().iter().map(|q| q.0).collect();
    if finals.is_empty() {
        out.push_str("finals\n");
    } else {
        let _ = writeln!(out, "finals {}", join(&finals, " "));
    }
    let alphabet = fta.alphabet();
    let symbols: Vec<String> = alphabet
        .symbols()
        .map(|s| format!("{}/{}", alphabet.name(s), alphabet.rank(s)))
        .collect();
    let _ = writeln!(out, "alphabet {}", symbols.join(" "));
    for t in fta.transitions() {
        let _ = writeln!(out, "{}", t.display(alphabet));
    }
    out
}

fn join(xs: &[u32], sep: &str) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Default)]
struct Header {
    states: Option<(StateSet, usize)>,
    finals: Option<(StateSet, usize)>,
    alphabet: Option<RankedAlphabet>,
}

impl Header {
    fn line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let start = cur.pos;
        let word = cur.name();
        cur.skip_ws();
        match word {
            "states" => {
                if self.states.is_some() {
                    return Err(cur.error_at(start, ParseErrorKind::DuplicateHeader("states")));
                }
                self.states = Some((state_decl(cur)?, cur.line));
            }
            "finals" => {
                if self.finals.is_some() {
                    return Err(cur.error_at(start, ParseErrorKind::DuplicateHeader("finals")));
                }
                let mut finals = StateSet::new();
                while !cur.at_end() {
                    finals.insert(State(cur.number()?));
                    cur.skip_ws();
                }
                self.finals = Some((finals, cur.line));
            }
            "alphabet" => {
                if self.alphabet.is_some() {
                    return Err(cur.error_at(start, ParseErrorKind::DuplicateHeader("alphabet")));
                }
                let mut symbols = Vec::new();
                while !cur.at_end() {
                    let name = cur.name();
                    if name.is_empty() {
                        return Err(
                            cur.error(ParseErrorKind::Syntax("expected a symbol name".into()))
                        );
                    }
                    cur.expect('/')?;
                    symbols.push((name.to_string(), cur.number()? as usize));
                    cur.skip_ws();
                }
                let alphabet =
                    RankedAlphabet::new(symbols).map_err(|e| cur.error_at(start, e.into()))?;
                self.alphabet = Some(alphabet);
            }
            _ => unreachable!("only called on header keywords"),
        }
        cur.end()
    }

    fn complete(&self, cur: &Cursor) -> Result<(&RankedAlphabet, &StateSet), ParseError> {
        let (states, _) = self
            .states
            .as_ref()
            .ok_or_else(|| cur.error_at(0, ParseErrorKind::MissingHeader("states")))?;
        let (finals, finals_line) = self
            .finals
            .as_ref()
            .ok_or_else(|| cur.error_at(0, ParseErrorKind::MissingHeader("finals")))?;
        let alphabet = self
            .alphabet
            .as_ref()
            .ok_or_else(|| cur.error_at(0, ParseErrorKind::MissingHeader("alphabet")))?;
        if let Some(q) = finals.difference(states).iter().next() {
            return Err(ParseError {
                line: *finals_line,
                column: 1,
                kind: ParseErrorKind::UndeclaredState(q.0),
            });
        }
        Ok((alphabet, states))
    }
}

fn state_decl(cur: &mut Cursor) -> Result<StateSet, ParseError> {
    if cur.eat('{') {
        let mut set = StateSet::new();
        cur.skip_ws();
        if cur.eat('}') {
            return Ok(set);
        }
        loop {
            cur.skip_ws();
            set.insert(State(cur.number()?));
            cur.skip_ws();
            if cur.eat('}') {
                return Ok(set);
            }
            cur.expect(',')?;
        }
    }
    let first = cur.number()?;
    if cur.eat_str("..") {
        let last = cur.number()?;
        if last < first {
            return Err(cur.error(ParseErrorKind::Syntax(format!(
                "empty state range {first}..{last}"
            ))));
        }
        Ok(StateSet::range(first, last - first + 1))
    } else {
        Ok(StateSet::range(1, first))
    }
}

fn transition(
    cur: &mut Cursor,
    alphabet: &RankedAlphabet,
    states: &StateSet,
) -> Result<Transition, ParseError> {
    let start = cur.pos;
    let name = cur.name();
    if name.is_empty() {
        return Err(cur.error(ParseErrorKind::Syntax("expected a symbol name".into())));
    }
    let symbol: Symbol = alphabet
        .lookup(name)
        .ok_or_else(|| cur.error_at(start, ParseErrorKind::UnknownSymbol(name.to_string())))?;
    let mut args = Vec::new();
    cur.skip_ws();
    if cur.eat('(') {
        cur.skip_ws();
        if !cur.eat(')') {
            loop {
                cur.skip_ws();
                args.push(state_ref(cur, states)?);
                cur.skip_ws();
                if cur.eat(')') {
                    break;
                }
                cur.expect(',')?;
            }
        }
    }
    let rank = alphabet.rank(symbol);
    if rank != args.len() {
        return Err(cur.error_at(
            start,
            ParseErrorKind::Arity {
                symbol: name.to_string(),
                rank,
                given: args.len(),
            },
        ));
    }
    cur.skip_ws();
    if !cur.eat_str("->") {
        return Err(cur.error(ParseErrorKind::Syntax("expected `->`".into())));
    }
    cur.skip_ws();
    let target = state_ref(cur, states)?;
    cur.end()?;
    Ok(Transition::new(symbol, &args, target))
}

fn state_ref(cur: &mut Cursor, states: &StateSet) -> Result<u32, ParseError> {
    let start = cur.pos;
    let q = cur.number()?;
    if !states.contains(State(q)) {
        return Err(cur.error_at(start, ParseErrorKind::UndeclaredState(q)));
    }
    Ok(q)
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Self { text, pos: 0, line }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.rest().trim().is_empty()
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(ParseErrorKind::Syntax(format!("expected `{c}`"))))
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos == self.text.len() {
            Ok(())
        } else {
            Err(self.error(ParseErrorKind::Syntax("unexpected trailing input".into())))
        }
    }

    fn name(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest
            .find(|c: char| {
                !(c.is_alphanumeric() || c == '_' || !c.is_ascii()) || c.is_whitespace()
            })
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        let rest = self.rest();
        let len = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error(ParseErrorKind::Syntax("expected a number".into())));
        }
        let n = rest[..len]
            .parse()
            .map_err(|_| self.error(ParseErrorKind::Syntax("number out of range".into())))?;
        self.pos += len;
        Ok(n)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        self.error_at(self.pos, kind)
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.text[..pos.min(self.text.len())].chars().count() + 1,
            kind,
        }
    }
}
