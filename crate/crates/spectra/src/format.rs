//! Text formats for models and tests.
//!
//! ```text
//! nplts coin          # header: `nplts NAME` (models) or `npt NAME` (tests)
//! alphabet a b c      # optional; defaults to the labels in use
//! state idle          # optional; declares states never mentioned otherwise
//! trans s0 a -> s1:1/2, s2:1/2
//! root o              # tests only
//! ```
//!
//! Probabilities are exact: an integer or `INT/INT`. Decimals are rejected.

use std::fmt::Write as _;

use spectra_core::model::RawTransition;
use spectra_core::testing::{Npt, OMEGA};
use spectra_core::{Nplts, RawModel, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] spectra_core::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Arrow,
    Comma,
    Colon,
}

struct Line<'a> {
    number: usize,
    toks: Vec<(usize, Tok<'a>)>,
    end: usize,
}

impl<'a> Line<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { line: self.number, column, message: message.into() }
    }
}

fn is_name_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, ',' | ':' | '#'))
}

/// Splits one line into tokens; columns count characters from 1.
fn lex(number: usize, text: &str) -> Result<Line<'_>, FormatError> {
    let code = text.split('#').next().unwrap_or("");
    let column_of = |i: usize| code[..i].chars().count() + 1;
    let mut toks = Vec::new();
    let mut chars = code.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        let column = column_of(i);
        match c {
            ',' => toks.push((column, Tok::Comma)),
            ':' => toks.push((column, Tok::Colon)),
            '-' if code[i..].starts_with("->") => {
                chars.next();
                toks.push((column, Tok::Arrow));
            }
            _ => {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if !is_name_char(d) || code[j..].starts_with("->") {
                        break;
                    }
                    end = j + d.len_utf8();
                    chars.next();
                }
                toks.push((column, Tok::Word(&code[i..end])));
            }
        }
    }
    Ok(Line { number, toks, end: column_of(code.len()) })
}

struct Cursor<'l, 'a> {
    line: &'l Line<'a>,
    pos: usize,
}

impl<'l, 'a> Cursor<'l, 'a> {
    fn column(&self) -> usize {
        self.line.toks.get(self.pos).map_or(self.line.end, |t| t.0)
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.line.toks.get(self.pos).map(|t| t.1)
    }

    fn word(&mut self, what: &str) -> Result<&'a str, FormatError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.line.error(self.column(), format!("expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok<'_>, what: &str) -> Result<(), FormatError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.line.error(self.column(), format!("expected {what}")))
        }
    }

    fn rational(&mut self) -> Result<Rational, FormatError> {
        let column = self.column();
        let w = self.word("probability")?;
        Rational::parse(w).ok_or_else(|| {
            let hint = if w.contains('.') { " (decimals are not allowed; write a fraction)" } else { "" };
            self.line.error(column, format!("invalid probability `{w}`{hint}"))
        })
    }

    fn done(&self) -> Result<(), FormatError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.line.error(self.column(), "unexpected trailing input")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Header {
    Model,
    Test,
}

struct Parsed {
    raw: RawModel,
    root: Option<String>,
}

fn parse(text: &str, header: Header, first_line: usize) -> Result<Parsed, FormatError> {
    let keyword = match header {
        Header::Model => "nplts",
        Header::Test => "npt",
    };
    let mut raw: Option<RawModel> = None;
    let mut root = None;
    let mut alphabet: Vec<String> = Vec::new();
    let mut declared = false;
    for (i, text) in text.lines().enumerate() {
        let line = lex(first_line + i, text)?;
        if line.toks.is_empty() {
            continue;
        }
        let mut c = Cursor { line: &line, pos: 0 };
        let column = c.column();
        let key = c.word("keyword")?;
        let Some(model) = raw.as_mut() else {
            if key != keyword {
                return Err(line.error(column, format!("expected header `{keyword} NAME`")));
            }
            raw = Some(RawModel::new(c.word("model name")?));
            c.done()?;
            continue;
        };
        match key {
            "alphabet" => {
                alphabet.push(c.word("action")?.to_string());
                while let Some(Tok::Word(w)) = c.peek() {
                    alphabet.push(w.to_string());
                    c.pos += 1;
                }
                declared = true;
            }
            "state" => {
                model.states.push(c.word("state")?.to_string());
                while let Some(Tok::Word(w)) = c.peek() {
                    model.states.push(w.to_string());
                    c.pos += 1;
                }
            }
            "trans" => {
                let source = c.word("source state")?.to_string();
                let label = c.word("action")?.to_string();
                c.expect(Tok::Arrow, "`->`")?;
                let mut target = Vec::new();
                loop {
                    let state = c.word("target state")?.to_string();
                    c.expect(Tok::Colon, "`:`")?;
                    target.push((state, c.rational()?));
                    if c.peek() == Some(Tok::Comma) {
                        c.pos += 1;
                    } else {
                        break;
                    }
                }
                model.transitions.push(RawTransition { source, label, target });
            }
            "root" if header == Header::Test => {
                if root.is_some() {
                    return Err(line.error(column, "duplicate `root` line"));
                }
                root = Some(c.word("root state")?.to_string());
            }
            "nplts" | "npt" => return Err(line.error(column, "duplicate header")),
            other => return Err(line.error(column, format!("unknown keyword `{other}`"))),
        }
        c.done()?;
    }
    let Some(mut raw) = raw else {
        return Err(FormatError::Syntax { line: first_line, column: 1, message: format!("missing header `{keyword} NAME`") });
    };
    if declared {
        raw.alphabet = Some(alphabet);
    }
    Ok(Parsed { raw, root })
}

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<Nplts, FormatError> {
    parse_model_at(text, 1)
}

/// Like [`parse_model`], numbering lines from `first_line`.
pub fn parse_model_at(text: &str, first_line: usize) -> Result<Nplts, FormatError> {
    Ok(parse(text, Header::Model, first_line)?.raw.build()?)
}

/// Parses and validates a test. The success state is `omega`.
pub fn parse_test(text: &str) -> Result<Npt, FormatError> {
    let parsed = parse(text, Header::Test, 1)?;
    let Some(root) = parsed.root else {
        return Err(FormatError::Syntax { line: 1, column: 1, message: "missing `root` line".into() });
    };
    let mut raw = parsed.raw;
    if !raw.states.iter().any(|s| *s == root) && !raw.transitions.iter().any(|t| t.source == root) {
        raw.states.push(root.clone());
    }
    Ok(Npt::new(raw.build()?, &root)?)
}

/// States in the order implicit declaration would produce.
fn order_by_use(m: &Nplts) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for t in m.transitions() {
        for s in std::iter::once(t.source).chain(t.target.support()) {
            let name = m.state_name(s);
            if !out.contains(&name) {
                out.push(name);
            }
        }
    }
    out
}

fn write_body(out: &mut String, m: &Nplts) {
    if !m.actions().is_empty() {
        let _ = writeln!(out, "alphabet {}", m.actions().join(" "));
    }
    let names: Vec<&str> = m.state_ids().map(|s| m.state_name(s)).collect();
    if order_by_use(m) != names {
        let _ = writeln!(out, "state {}", names.join(" "));
    }
    for t in m.transitions() {
        let target: Vec<String> =
            t.target.entries().iter().map(|&(s, p)| format!("{}:{}", m.state_name(s), p)).collect();
        let _ = writeln!(out, "trans {} {} -> {}", m.state_name(t.source), m.action_name(t.label), target.join(", "));
    }
}

/// Serializes a model; [`parse_model`] reads it back to an identical model.
pub fn write_model(m: &Nplts) -> String {
    let mut out = format!("nplts {}\n", m.name());
    write_body(&mut out, m);
    out
}

/// Serializes a test; [`parse_test`] reads it back to an identical test.
pub fn write_test(t: &Npt) -> String {
    let m = t.model();
    let mut out = format!("npt {}\nroot {}\n", m.name(), m.state_name(t.initial()));
    write_body(&mut out, m);
    debug_assert!(m.state(OMEGA).is_ok());
    out
}
