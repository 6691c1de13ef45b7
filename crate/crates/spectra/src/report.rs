//! Line-oriented reports.
//!
//! ```text
//! pair p-vs-q
//! verdict ptr equivalent
//! verdict pf distinguished w1
//! witness w1 values event=FailurePair(a,{b}) left={0} right={0,1}
//! violation pb-dis=>pte-tbt-dis bisim-testing
//! ```
//!
//! Witness lines use the model's names and the rational syntax of the model
//! format, so they can be re-checked by other tools.

use std::fmt::Write as _;

use spectra_core::model::ActionId;
use spectra_core::spectrum::{Edge, Evaluation};
use spectra_core::testing::TestFamily;
use spectra_core::verdict::{BisimWitness, TestDetail};
use spectra_core::{EquivalenceId, Nplts, Rational, StateId, Verdict, Witness};

fn set(values: &[Rational]) -> String {
    let items: Vec<String> = values.iter().map(Rational::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn pair((sup, inf): (Rational, Rational)) -> String {
    format!("(sup={sup},inf={inf})")
}

fn word(m: &Nplts, t: &[ActionId]) -> String {
    if t.is_empty() {
        "ε".into()
    } else {
        t.iter().map(|&a| m.action_name(a)).collect::<Vec<_>>().join(".")
    }
}

fn states(m: &Nplts, s: &[StateId]) -> String {
    format!("{{{}}}", s.iter().map(|&x| m.state_name(x)).collect::<Vec<_>>().join(","))
}

/// One-line rendering of a witness, without the `witness <ref>` prefix.
pub fn render_witness(m: &Nplts, w: &Witness, family: Option<&TestFamily>) -> String {
    match w {
        Witness::UnmatchedProfile { side, kind, resolution, profile } => {
            let entries: Vec<String> =
                profile.entries().iter().map(|(e, p)| format!("{}:{}", e.render(m), p)).collect();
            format!(
                "unmatched-profile side={} kind={} resolution={} profile=[{}]",
                side.as_str(),
                kind.as_str(),
                resolution,
                entries.join(" ")
            )
        }
        Witness::ValueSets { event, left, right } => {
            format!("values event={} left={} right={}", event.render(m), set(left), set(right))
        }
        Witness::Extrema { event, left, right } => {
            format!("extrema event={} left={} right={}", event.render(m), pair(*left), pair(*right))
        }
        Witness::Test { test, detail } => {
            let name = family.and_then(|f| f.tests().get(*test)).map_or("?", |t| t.name());
            let detail = match detail {
                TestDetail::SuccessExtrema { left, right } => {
                    format!("success-extrema left={} right={}", pair(*left), pair(*right))
                }
                TestDetail::SuccessValues { left, right } => {
                    format!("success-values left={} right={}", set(left), set(right))
                }
                TestDetail::UnmatchedResolution { side, resolution } => {
                    format!("unmatched-resolution side={} resolution={}", side.as_str(), resolution)
                }
                TestDetail::TraceValues { trace, left, right } => {
                    format!("trace-values trace={} left={} right={}", word(m, trace), set(left), set(right))
                }
                TestDetail::TraceExtrema { trace, left, right } => {
                    let opt = |x: &Option<(Rational, Rational)>| x.map_or("none".to_string(), pair);
                    format!("trace-extrema trace={} left={} right={}", word(m, trace), opt(left), opt(right))
                }
            };
            format!("test index={test} name={name} {detail}")
        }
        Witness::Bisim(b) => match b {
            BisimWitness::Enabled { action, side } => {
                format!("enabled action={} side={}", m.action_name(*action), side.as_str())
            }
            BisimWitness::UnmatchedTransition { side, transition, blocks } => {
                let t = m.transition(*transition);
                let target: Vec<String> =
                    t.target.entries().iter().map(|&(s, p)| format!("{}:{}", m.state_name(s), p)).collect();
                let blocks: Vec<String> = blocks.iter().map(|b| states(m, b)).collect();
                format!(
                    "unmatched-transition side={} transition={}-{}->[{}] blocks=[{}]",
                    side.as_str(),
                    m.state_name(t.source),
                    m.action_name(t.label),
                    target.join(","),
                    blocks.join(" ")
                )
            }
            BisimWitness::GroupValues { action, group, left, right } => format!(
                "group-values action={} group={} left={} right={}",
                m.action_name(*action),
                states(m, group),
                set(left),
                set(right)
            ),
            BisimWitness::GroupExtrema { action, group, left, right } => format!(
                "group-extrema action={} group={} left={} right={}",
                m.action_name(*action),
                states(m, group),
                pair(*left),
                pair(*right)
            ),
        },
    }
}

/// The `verdict` line for one equivalence, plus its witness line when
/// distinguished. `next` numbers witness references.
pub fn render_verdict(
    out: &mut String,
    m: &Nplts,
    id: EquivalenceId,
    v: &Verdict,
    family: Option<&TestFamily>,
    next: &mut usize,
) {
    match &v.witness {
        None => {
            let _ = writeln!(out, "verdict {id} {}", v.outcome.as_str());
        }
        Some(w) => {
            *next += 1;
            let _ = writeln!(out, "verdict {id} {} w{next}", v.outcome.as_str());
            let _ = writeln!(out, "witness w{next} {}", render_witness(m, w, family));
        }
    }
}

/// Full report of one pair: verdicts in fixed order, errors, witnesses and
/// contradicted edges.
pub fn render_evaluation(
    name: &str,
    m: &Nplts,
    e: &Evaluation,
    violations: &[Edge],
    family: Option<&TestFamily>,
) -> String {
    let mut out = format!("pair {name}\n");
    let c = &e.class;
    let _ = writeln!(
        out,
        "class fully-nondeterministic={} fully-probabilistic={} depth={}",
        c.fully_nondeterministic, c.fully_probabilistic, c.depth
    );
    if let Some(f) = family {
        let _ = writeln!(out, "tests {} {}", f.len(), f.provenance());
    }
    let mut next = 0;
    for (id, r) in &e.results {
        match r {
            Ok(v) => render_verdict(&mut out, m, *id, v, family, &mut next),
            Err(err) => {
                let _ = writeln!(out, "error {id} {err}");
            }
        }
    }
    for edge in violations {
        let _ = writeln!(out, "violation {edge} {}", edge.tag);
    }
    out
}
