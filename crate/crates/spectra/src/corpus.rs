//! Witness files: a model, two of its states, and a claim that one
//! equivalence tells them apart while another identifies them.
//!
//! ```text
//! witness ctr-over-tr
//! separates pctr ptr
//! left l.s0
//! right r.s0
//! tests depth=2,branching=2,transitions=2,grid=1,1/2   # optional
//! note free text, any number of lines
//! nplts pair
//! trans l.s0 a -> l.s1:1
//! ...
//! ```
//!
//! Everything from the `nplts` line on is the model.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use spectra_core::spectrum::{decide, verify};
use spectra_core::testing::{generate_tests, TestBounds, TestFamily};
use spectra_core::{Budget, EquivalenceId, Nplts, Options, Rational, StateId};

use crate::format::{parse_model_at, write_model, FormatError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFile {
    pub name: String,
    /// Equivalence expected to distinguish the states.
    pub distinguishing: EquivalenceId,
    /// Equivalence expected to identify them.
    pub equating: EquivalenceId,
    pub left: String,
    pub right: String,
    pub tests: Option<TestBounds>,
    pub notes: Vec<String>,
    pub model: Nplts,
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, column: 1, message: message.into() }
}

/// Parses `depth=D,branching=B,transitions=K,grid=P,P,...`. Omitted keys
/// keep their defaults.
pub fn parse_bounds(text: &str) -> Result<TestBounds, String> {
    let mut b = TestBounds::default();
    let mut grid: Option<Vec<Rational>> = None;
    let mut in_grid = false;
    for item in text.split(',').map(str::trim) {
        let number = |v: &str| v.parse::<usize>().map_err(|_| format!("invalid number `{v}`"));
        match item.split_once('=') {
            Some(("depth", v)) => (b.max_depth, in_grid) = (number(v)?, false),
            Some(("branching", v)) => (b.max_branching, in_grid) = (number(v)?, false),
            Some(("transitions", v)) => (b.max_transitions, in_grid) = (number(v)?, false),
            Some(("grid", v)) => {
                grid = Some(vec![Rational::parse(v).ok_or_else(|| format!("invalid probability `{v}`"))?]);
                in_grid = true;
            }
            Some((k, _)) => return Err(format!("unknown key `{k}`")),
            None if in_grid => {
                let p = Rational::parse(item).ok_or_else(|| format!("invalid probability `{item}`"))?;
                grid.as_mut().expect("in grid").push(p);
            }
            None => return Err(format!("expected key=value, found `{item}`")),
        }
    }
    if let Some(g) = grid {
        b.grid = g;
    }
    Ok(b)
}

pub fn render_bounds(b: &TestBounds) -> String {
    let grid: Vec<String> = b.grid.iter().map(Rational::to_string).collect();
    format!(
        "depth={},branching={},transitions={},grid={}",
        b.max_depth,
        b.max_branching,
        b.max_transitions,
        grid.join(",")
    )
}

pub fn parse_witness(text: &str) -> Result<WitnessFile, FormatError> {
    let mut name = None;
    let mut claim = None;
    let (mut left, mut right, mut tests) = (None, None, None);
    let mut notes = Vec::new();
    let mut offset = 0;
    let mut model_start = None;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let n = i + 1;
        let start = offset;
        offset += line.len();
        let code = line.split('#').next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        let (key, rest) = code.split_once(char::is_whitespace).unwrap_or((code, ""));
        let rest = rest.trim();
        match key {
            "witness" => name = Some(rest.to_string()),
            "separates" => {
                let ids: Vec<&str> = rest.split_whitespace().collect();
                let [a, b] = ids[..] else { return Err(syntax(n, "expected `separates FINER COARSER`")) };
                let parse = |s: &str| s.parse::<EquivalenceId>().map_err(|e| syntax(n, e.to_string()));
                claim = Some((parse(a)?, parse(b)?));
            }
            "left" => left = Some(rest.to_string()),
            "right" => right = Some(rest.to_string()),
            "tests" => tests = Some(parse_bounds(rest).map_err(|e| syntax(n, e))?),
            "note" => notes.push(rest.to_string()),
            "nplts" => {
                model_start = Some((n, start));
                break;
            }
            other => return Err(syntax(n, format!("unknown keyword `{other}`"))),
        }
    }
    let Some((line, at)) = model_start else { return Err(syntax(1, "missing model")) };
    let model = parse_model_at(&text[at..], line)?;
    let (distinguishing, equating) = claim.ok_or_else(|| syntax(1, "missing `separates` line"))?;
    Ok(WitnessFile {
        name: name.ok_or_else(|| syntax(1, "missing `witness` line"))?,
        distinguishing,
        equating,
        left: left.ok_or_else(|| syntax(1, "missing `left` line"))?,
        right: right.ok_or_else(|| syntax(1, "missing `right` line"))?,
        tests,
        notes,
        model,
    })
}

pub fn write_witness(w: &WitnessFile) -> String {
    let mut out = format!("witness {}\nseparates {} {}\nleft {}\nright {}\n", w.name, w.distinguishing, w.equating, w.left, w.right);
    if let Some(b) = &w.tests {
        let _ = writeln!(out, "tests {}", render_bounds(b));
    }
    for n in &w.notes {
        let _ = writeln!(out, "note {n}");
    }
    out.push_str(&write_model(&w.model));
    out
}

/// Family used for the testing equivalences of a pair: generated over the
/// actions the two states can perform.
pub fn family_for(m: &Nplts, s1: StateId, s2: StateId, bounds: &TestBounds, budget: &Budget) -> spectra_core::Result<TestFamily> {
    let alphabet: Vec<String> = m.relevant_actions(&[s1, s2]).iter().map(|a| m.action_name(a).to_string()).collect();
    generate_tests(&alphabet, bounds, budget)
}

/// Outcome of re-checking one witness file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Verified,
    Failed(String),
}

fn needs_family(w: &WitnessFile) -> bool {
    w.distinguishing.is_family_relative() || w.equating.is_family_relative()
}

/// Re-decides both equivalences and re-verifies the distinguishing witness.
pub fn check_witness(w: &WitnessFile, opts: &Options) -> spectra_core::Result<Check> {
    let m = &w.model;
    let (Ok(s1), Ok(s2)) = (m.state(&w.left), m.state(&w.right)) else {
        return Ok(Check::Failed("unknown state".into()));
    };
    let family = if needs_family(w) {
        Some(family_for(m, s1, s2, w.tests.as_ref().unwrap_or(&TestBounds::default()), &opts.budget)?)
    } else {
        None
    };
    let f = family.as_ref();
    let d = decide(w.distinguishing, m, s1, s2, f, opts)?;
    if d.is_equivalent() {
        return Ok(Check::Failed(format!("{} does not distinguish the states", w.distinguishing)));
    }
    if !verify(w.distinguishing, m, s1, s2, f, &d, opts)? {
        return Ok(Check::Failed(format!("{} witness does not re-verify", w.distinguishing)));
    }
    if !decide(w.equating, m, s1, s2, f, opts)?.is_equivalent() {
        return Ok(Check::Failed(format!("{} does not identify the states", w.equating)));
    }
    Ok(Check::Verified)
}

/// Witness files of a directory, sorted by file name.
pub fn witness_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "wit"))
        .collect();
    files.sort();
    Ok(files)
}
