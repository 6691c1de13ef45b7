//! Decorated-trace events and their probabilities in a resolution.
//!
//! Compatibility always consults the transitions of the original model
//! through the state correspondence, never the (possibly stopped) structure of
//! the resolution itself.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{ActionId, ActionSet, Nplts, StateId};
use crate::resolution::{for_each_path, Resolution};
use crate::tree::TreeModel;
use crate::{Budget, Error, Rational, Result};

/// What an event may look at in a state of the model being resolved.
pub trait Observer {
    /// Labels of the transitions leaving `s` in the model.
    fn enabled(&self, s: StateId) -> ActionSet;

    /// Whether `s` is a successful configuration. Plain models have none.
    fn successful(&self, _s: StateId) -> bool {
        false
    }
}

impl Observer for Nplts {
    fn enabled(&self, s: StateId) -> ActionSet {
        self.enabled_actions(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Trace,
    CompletedTrace,
    FailurePair,
    FailureTrace,
    ReadyPair,
    ReadyTrace,
    SuccessAlong,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Trace => "trace",
            EventKind::CompletedTrace => "completed-trace",
            EventKind::FailurePair => "failure-pair",
            EventKind::FailureTrace => "failure-trace",
            EventKind::ReadyPair => "ready-pair",
            EventKind::ReadyTrace => "ready-trace",
            EventKind::SuccessAlong => "success-along",
        }
    }
}

/// A decorated-trace observable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Trace(Vec<ActionId>),
    CompletedTrace(Vec<ActionId>),
    /// Trace followed by refusal of every action in the set.
    FailurePair(Vec<ActionId>, ActionSet),
    /// Each step followed by refusal of its set.
    FailureTrace(Vec<(ActionId, ActionSet)>),
    /// Trace ending in a state whose enabled actions are exactly the set.
    ReadyPair(Vec<ActionId>, ActionSet),
    ReadyTrace(Vec<(ActionId, ActionSet)>),
    /// Successful computation labeled with the trace (interaction systems only).
    SuccessAlong(Vec<ActionId>),
}

impl Event {
    pub fn kind(&self) -> EventKind {
        match self {
            Event::Trace(_) => EventKind::Trace,
            Event::CompletedTrace(_) => EventKind::CompletedTrace,
            Event::FailurePair(..) => EventKind::FailurePair,
            Event::FailureTrace(_) => EventKind::FailureTrace,
            Event::ReadyPair(..) => EventKind::ReadyPair,
            Event::ReadyTrace(_) => EventKind::ReadyTrace,
            Event::SuccessAlong(_) => EventKind::SuccessAlong,
        }
    }

    /// The underlying action sequence.
    pub fn trace(&self) -> Vec<ActionId> {
        match self {
            Event::Trace(t)
            | Event::CompletedTrace(t)
            | Event::FailurePair(t, _)
            | Event::ReadyPair(t, _)
            | Event::SuccessAlong(t) => t.clone(),
            Event::FailureTrace(steps) | Event::ReadyTrace(steps) => steps.iter().map(|&(a, _)| a).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Event::Trace(t)
            | Event::CompletedTrace(t)
            | Event::FailurePair(t, _)
            | Event::ReadyPair(t, _)
            | Event::SuccessAlong(t) => t.len(),
            Event::FailureTrace(steps) | Event::ReadyTrace(steps) => steps.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether a computation with these labels, visiting these model states
    /// (`states[0]` is the start), is compatible with the event.
    pub fn accepts<O: Observer + ?Sized>(&self, obs: &O, labels: &[ActionId], states: &[StateId]) -> bool {
        debug_assert_eq!(states.len(), labels.len() + 1);
        let last = *states.last().unwrap();
        match self {
            Event::Trace(t) => t.as_slice() == labels,
            Event::CompletedTrace(t) => t.as_slice() == labels && obs.enabled(last).is_empty(),
            Event::FailurePair(t, f) => t.as_slice() == labels && obs.enabled(last).intersection(*f).is_empty(),
            Event::ReadyPair(t, r) => t.as_slice() == labels && obs.enabled(last) == *r,
            Event::SuccessAlong(t) => t.as_slice() == labels && obs.successful(last),
            Event::FailureTrace(steps) => {
                steps.len() == labels.len()
                    && steps.iter().zip(labels).zip(&states[1..]).all(|((&(a, f), &l), &s)| {
                        a == l && obs.enabled(s).intersection(f).is_empty()
                    })
            }
            Event::ReadyTrace(steps) => {
                steps.len() == labels.len()
                    && steps
                        .iter()
                        .zip(labels)
                        .zip(&states[1..])
                        .all(|((&(a, r), &l), &s)| a == l && obs.enabled(s) == r)
            }
        }
    }

    /// Human- and machine-readable rendering, e.g. `FailurePair(a,{c})`.
    pub fn render(&self, m: &Nplts) -> String {
        let word = |t: &[ActionId]| -> String {
            if t.is_empty() {
                String::from("ε")
            } else {
                t.iter().map(|&a| m.action_name(a)).collect::<Vec<_>>().join(".")
            }
        };
        let set = |s: ActionSet| format!("{{{}}}", s.iter().map(|a| m.action_name(a)).collect::<Vec<_>>().join(","));
        let steps = |st: &[(ActionId, ActionSet)]| -> String {
            st.iter().map(|&(a, s)| format!("({},{})", m.action_name(a), set(s))).collect::<Vec<_>>().join(";")
        };
        match self {
            Event::Trace(t) => format!("Trace({})", word(t)),
            Event::CompletedTrace(t) => format!("CompletedTrace({})", word(t)),
            Event::FailurePair(t, f) => format!("FailurePair({},{})", word(t), set(*f)),
            Event::ReadyPair(t, r) => format!("ReadyPair({},{})", word(t), set(*r)),
            Event::FailureTrace(st) => format!("FailureTrace({})", steps(st)),
            Event::ReadyTrace(st) => format!("ReadyTrace({})", steps(st)),
            Event::SuccessAlong(t) => format!("SuccessAlong({})", word(t)),
        }
    }
}

/// Calls `emit` with every event of `kind` compatible with the computation.
/// Failure decorations range over subsets of `lattice`.
pub(crate) fn compatible_events<O: Observer + ?Sized>(
    obs: &O,
    kind: EventKind,
    lattice: ActionSet,
    labels: &[ActionId],
    states: &[StateId],
    emit: &mut dyn FnMut(Event),
) {
    let last = *states.last().unwrap();
    let trace = || labels.to_vec();
    match kind {
        EventKind::Trace => emit(Event::Trace(trace())),
        EventKind::CompletedTrace => {
            if obs.enabled(last).is_empty() {
                emit(Event::CompletedTrace(trace()))
            }
        }
        EventKind::SuccessAlong => {
            if obs.successful(last) {
                emit(Event::SuccessAlong(trace()))
            }
        }
        EventKind::FailurePair => {
            for f in lattice.difference(obs.enabled(last)).subsets() {
                emit(Event::FailurePair(trace(), f));
            }
        }
        EventKind::ReadyPair => emit(Event::ReadyPair(trace(), obs.enabled(last))),
        EventKind::ReadyTrace => emit(Event::ReadyTrace(
            labels.iter().zip(&states[1..]).map(|(&a, &s)| (a, obs.enabled(s))).collect(),
        )),
        EventKind::FailureTrace => {
            fn go<O: Observer + ?Sized>(
                obs: &O,
                lattice: ActionSet,
                labels: &[ActionId],
                states: &[StateId],
                acc: &mut Vec<(ActionId, ActionSet)>,
                emit: &mut dyn FnMut(Event),
            ) {
                let i = acc.len();
                if i == labels.len() {
                    emit(Event::FailureTrace(acc.clone()));
                    return;
                }
                for f in lattice.difference(obs.enabled(states[i + 1])).subsets() {
                    acc.push((labels[i], f));
                    go(obs, lattice, labels, states, acc, emit);
                    acc.pop();
                }
            }
            go(obs, lattice, labels, states, &mut Vec::new(), emit);
        }
    }
}

/// Probability of the set of `e`-compatible computations of `z`. All such
/// computations have length `|e|`, so the set is prefix-free.
pub fn compatible_probability<O: Observer + ?Sized>(obs: &O, tree: &TreeModel, z: &Resolution, e: &Event) -> Rational {
    let len = e.len();
    let mut total = Rational::ZERO;
    let mut states = Vec::new();
    for_each_path(tree, z, |p| {
        if p.labels.len() == len {
            states.clear();
            states.extend(p.nodes.iter().map(|&n| tree.corr(n)));
            if e.accepts(obs, p.labels, &states) {
                total += p.probability;
            }
        }
    });
    total
}

/// Probabilities of all events of one kind in one resolution. Events that are
/// absent have probability zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventProfile {
    kind: EventKind,
    entries: BTreeMap<Event, Rational>,
}

impl EventProfile {
    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn get(&self, e: &Event) -> Rational {
        self.entries.get(e).copied().unwrap_or(Rational::ZERO)
    }

    pub fn entries(&self) -> &BTreeMap<Event, Rational> {
        &self.entries
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.entries.keys()
    }
}

/// The profile of `z` for `kind`. Failure decorations are drawn from subsets
/// of `lattice`; an action outside every enabled set is refused everywhere, so
/// leaving it out of the lattice never changes a comparison.
pub fn event_profile<O: Observer + ?Sized>(
    obs: &O,
    tree: &TreeModel,
    z: &Resolution,
    kind: EventKind,
    lattice: ActionSet,
) -> EventProfile {
    let mut entries: BTreeMap<Event, Rational> = BTreeMap::new();
    let mut states = Vec::new();
    for_each_path(tree, z, |p| {
        states.clear();
        states.extend(p.nodes.iter().map(|&n| tree.corr(n)));
        let prob = p.probability;
        compatible_events(obs, kind, lattice, p.labels, &states, &mut |e| {
            *entries.entry(e).or_insert(Rational::ZERO) += prob;
        });
    });
    EventProfile { kind, entries }
}

/// The finite universe of `kind` events for comparing `s1` and `s2`: every
/// event compatible with some computation of the model from either state.
/// Any other event has probability zero in every resolution of both.
pub fn event_universe(m: &Nplts, s1: StateId, s2: StateId, kind: EventKind, budget: &Budget) -> Result<BTreeSet<Event>> {
    let lattice = m.relevant_actions(&[s1, s2]);
    let mut universe = BTreeSet::new();
    let mut overflow = false;
    for root in [s1, s2] {
        for_each_model_path(m, root, &mut |labels, states| {
            if overflow {
                return;
            }
            compatible_events(m, kind, lattice, labels, states, &mut |e| {
                universe.insert(e);
            });
            overflow = universe.len() > budget.max_universe;
        });
    }
    if overflow {
        return Err(Error::UniverseTooLarge { limit: budget.max_universe });
    }
    Ok(universe)
}

/// Visits every computation of the model from `root` (labels and states).
pub(crate) fn for_each_model_path(m: &Nplts, root: StateId, f: &mut dyn FnMut(&[ActionId], &[StateId])) {
    fn go(m: &Nplts, labels: &mut Vec<ActionId>, states: &mut Vec<StateId>, f: &mut dyn FnMut(&[ActionId], &[StateId])) {
        f(labels, states);
        let s = *states.last().unwrap();
        for &ti in m.outgoing(s) {
            let t = m.transition(ti);
            labels.push(t.label);
            for u in t.target.support() {
                states.push(u);
                go(m, labels, states, f);
                states.pop();
            }
            labels.pop();
        }
    }
    go(m, &mut Vec::new(), &mut alloc::vec![root], f);
}
