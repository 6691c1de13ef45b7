//! The eighteen trace-based equivalences: six decorated-trace semantics, each
//! under three ways of matching resolutions.
//!
//! * `dis`: every resolution of one state has a resolution of the other with
//!   the same full event profile, and vice versa.
//! * `single`: the same, one event at a time. Two states are related iff for
//!   every event the sets of achievable probabilities coincide.
//! * `supinf`: for every event, the supremum and infimum of its probability
//!   over `Res_α` coincide, where `α` is the trace of the event.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::event::{compatible_probability, event_profile, event_universe, Event, EventKind, EventProfile};
use crate::model::{ActionId, ActionSet, Nplts, StateId};
use crate::resolution::{enumerate_resolutions, in_res_alpha, Choice, ResolutionSpace, SchedulerMode};
use crate::tree::{unfold_to_tree, NodeId, TreeModel};
use crate::verdict::{Verdict, Witness};
use crate::{Options, Outcome, Rational, Result, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Semantics {
    Tr,
    CTr,
    F,
    FTr,
    R,
    RTr,
}

impl Semantics {
    pub const ALL: [Semantics; 6] = [Semantics::Tr, Semantics::CTr, Semantics::F, Semantics::FTr, Semantics::R, Semantics::RTr];

    /// Event kinds compared, each matched independently of the others.
    pub fn kinds(self) -> &'static [EventKind] {
        match self {
            Semantics::Tr => &[EventKind::Trace],
            Semantics::CTr => &[EventKind::Trace, EventKind::CompletedTrace],
            Semantics::F => &[EventKind::FailurePair],
            Semantics::FTr => &[EventKind::FailureTrace],
            Semantics::R => &[EventKind::ReadyPair],
            Semantics::RTr => &[EventKind::ReadyTrace],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Tr => "tr",
            Semantics::CTr => "ctr",
            Semantics::F => "f",
            Semantics::FTr => "ftr",
            Semantics::R => "r",
            Semantics::RTr => "rtr",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Approach {
    Dis,
    Single,
    SupInf,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::Dis, Approach::Single, Approach::SupInf];
}

/// Which resolutions an achievable value set ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Res,
    ResAlpha,
}

/// The resolutions and event profiles of two states, computed once and shared
/// by every trace-based decision on the pair.
pub struct TraceAnalysis<'m> {
    model: &'m Nplts,
    states: [StateId; 2],
    lattice: ActionSet,
    spaces: [ResolutionSpace; 2],
    profiles: BTreeMap<EventKind, [Vec<EventProfile>; 2]>,
    // per side and trace: membership of each resolution in Res_α
    members: [BTreeMap<Vec<ActionId>, Vec<bool>>; 2],
}

impl<'m> TraceAnalysis<'m> {
    pub fn new(m: &'m Nplts, s1: StateId, s2: StateId, opts: &Options) -> Result<Self> {
        let left = enumerate_resolutions(m, s1, opts.mode, &opts.budget)?;
        let right = enumerate_resolutions(m, s2, opts.mode, &opts.budget)?;
        Ok(TraceAnalysis {
            model: m,
            states: [s1, s2],
            lattice: m.relevant_actions(&[s1, s2]),
            spaces: [left, right],
            profiles: BTreeMap::new(),
            members: [BTreeMap::new(), BTreeMap::new()],
        })
    }

    pub fn space(&self, side: Side) -> &ResolutionSpace {
        &self.spaces[side_index(side)]
    }

    /// Profiles of every resolution of both sides for one event kind.
    pub fn profiles(&mut self, kind: EventKind) -> &[Vec<EventProfile>; 2] {
        let (m, lattice, spaces) = (self.model, self.lattice, &self.spaces);
        self.profiles.entry(kind).or_insert_with(|| {
            [0, 1].map(|i| spaces[i].iter().map(|z| event_profile(m, spaces[i].tree(), z, kind, lattice)).collect())
        })
    }

    pub fn decide(&mut self, sem: Semantics, app: Approach) -> Verdict {
        for &kind in sem.kinds() {
            let witness = match app {
                Approach::Dis => self.dis(kind),
                Approach::Single => self.single(kind),
                Approach::SupInf => self.supinf(kind),
            };
            if let Some(w) = witness {
                return Verdict::distinguished(w);
            }
        }
        Verdict::equivalent()
    }

    fn dis(&mut self, kind: EventKind) -> Option<Witness> {
        let profiles = self.profiles(kind);
        let sets = [0, 1].map(|i| profiles[i].iter().collect::<BTreeSet<_>>());
        for (i, side) in [(0, Side::Left), (1, Side::Right)] {
            if let Some((resolution, p)) = profiles[i].iter().enumerate().find(|(_, p)| !sets[1 - i].contains(p)) {
                return Some(Witness::UnmatchedProfile { side, kind, resolution, profile: p.clone() });
            }
        }
        None
    }

    fn single(&mut self, kind: EventKind) -> Option<Witness> {
        let profiles = self.profiles(kind);
        for e in support_union(profiles) {
            let [left, right] = [0, 1].map(|i| profiles[i].iter().map(|p| p.get(e)).collect::<BTreeSet<_>>());
            if left != right {
                return Some(Witness::ValueSets {
                    event: e.clone(),
                    left: left.into_iter().collect(),
                    right: right.into_iter().collect(),
                });
            }
        }
        None
    }

    fn supinf(&mut self, kind: EventKind) -> Option<Witness> {
        self.profiles(kind);
        let profiles = &self.profiles[&kind];
        for e in support_union(profiles) {
            let alpha = e.trace();
            let [left, right] = [0, 1].map(|i| {
                let space = &self.spaces[i];
                let members = self.members[i]
                    .entry(alpha.clone())
                    .or_insert_with(|| space.iter().map(|z| in_res_alpha(self.model, space.tree(), z, &alpha)).collect());
                extrema(profiles[i].iter().zip(members.iter()).filter(|(_, &member)| member).map(|(p, _)| p.get(e)))
            });
            if left != right {
                return Some(Witness::Extrema { event: e.clone(), left, right });
            }
        }
        None
    }

    pub fn states(&self) -> [StateId; 2] {
        self.states
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Events with a nonzero probability in some resolution of either side. Any
/// other event has value zero everywhere, so it can never tell the sides apart.
fn support_union(profiles: &[Vec<EventProfile>; 2]) -> BTreeSet<&Event> {
    profiles.iter().flatten().flat_map(|p| p.events()).collect()
}

/// `(sup, inf)` with the convention that both are zero for an empty set.
fn extrema(values: impl Iterator<Item = Rational>) -> (Rational, Rational) {
    values.fold(None, |acc: Option<(Rational, Rational)>, v| match acc {
        None => Some((v, v)),
        Some((hi, lo)) => Some((hi.max(v), lo.min(v))),
    })
    .unwrap_or((Rational::ZERO, Rational::ZERO))
}

/// Decides one of the eighteen trace-based equivalences between two states
/// of the same model.
pub fn decide_trace_equivalence(
    m: &Nplts,
    s1: StateId,
    s2: StateId,
    sem: Semantics,
    app: Approach,
    opts: &Options,
) -> Result<Verdict> {
    Ok(TraceAnalysis::new(m, s1, s2, opts)?.decide(sem, app))
}

/// `{ compatible_probability(z, e) : z in the domain }`.
pub fn achievable_value_set(m: &Nplts, s: StateId, e: &Event, domain: Domain, opts: &Options) -> Result<BTreeSet<Rational>> {
    let space = enumerate_resolutions(m, s, opts.mode, &opts.budget)?;
    let alpha = e.trace();
    Ok(space
        .iter()
        .filter(|z| domain == Domain::Res || in_res_alpha(m, space.tree(), z, &alpha))
        .map(|z| compatible_probability(m, space.tree(), z, e))
        .collect())
}

/// `(sup, inf)` of the probability of `e` over `Res_α(s)`.
///
/// In tree mode scheduler choices at different nodes are independent, so the
/// extrema are computed bottom-up on the unfolding without enumerating
/// resolutions. In memoryless mode they are computed by enumeration.
pub fn supinf_value(m: &Nplts, s: StateId, e: &Event, opts: &Options) -> Result<(Rational, Rational)> {
    match opts.mode {
        SchedulerMode::Tree => {
            let tree = unfold_to_tree(m, s, &opts.budget)?;
            let alpha = e.trace();
            Ok(SupInf { m, tree: &tree, e, alpha: &alpha }.best(tree.root(), 0))
        }
        SchedulerMode::Memoryless => supinf_value_enumerated(m, s, e, opts),
    }
}

/// Reference computation of [`supinf_value`] by exhaustive enumeration.
pub fn supinf_value_enumerated(m: &Nplts, s: StateId, e: &Event, opts: &Options) -> Result<(Rational, Rational)> {
    Ok(extrema(achievable_value_set(m, s, e, Domain::ResAlpha, opts)?.into_iter()))
}

struct SupInf<'a> {
    m: &'a Nplts,
    tree: &'a TreeModel,
    e: &'a Event,
    alpha: &'a [ActionId],
}

impl SupInf<'_> {
    /// Extrema at node `n`, reached by reading `alpha[..k]`.
    fn best(&self, n: NodeId, k: usize) -> (Rational, Rational) {
        let state = self.tree.corr(n);
        let enabled = self.m.enabled_actions(state);
        let step_ok = k == 0
            || match self.e {
                Event::FailureTrace(steps) => enabled.intersection(steps[k - 1].1).is_empty(),
                Event::ReadyTrace(steps) => enabled == steps[k - 1].1,
                _ => true,
            };
        if !step_ok {
            return (Rational::ZERO, Rational::ZERO);
        }
        if k == self.alpha.len() {
            let ok = match self.e {
                Event::CompletedTrace(_) => enabled.is_empty(),
                Event::FailurePair(_, f) => enabled.intersection(*f).is_empty(),
                Event::ReadyPair(_, r) => enabled == *r,
                Event::SuccessAlong(_) => false,
                _ => true,
            };
            let v = if ok { Rational::ONE } else { Rational::ZERO };
            return (v, v);
        }
        let node = self.tree.node(n);
        let mut options = Vec::with_capacity(node.branches.len() + 1);
        if !self.m.can_read(state, &self.alpha[k..]) {
            options.push((Rational::ZERO, Rational::ZERO));
        }
        for b in &node.branches {
            if b.label != self.alpha[k] {
                options.push((Rational::ZERO, Rational::ZERO));
            } else {
                let (mut hi, mut lo) = (Rational::ZERO, Rational::ZERO);
                for &(c, p) in &b.children {
                    let (h, l) = self.best(c, k + 1);
                    hi += p * h;
                    lo += p * l;
                }
                options.push((hi, lo));
            }
        }
        let hi = options.iter().map(|o| o.0).max().unwrap();
        let lo = options.iter().map(|o| o.1).min().unwrap();
        (hi, lo)
    }
}

/// Reference implementation of the single-event approach that follows the
/// two-sided "for each resolution there exists a resolution" pattern
/// literally, event by event over the finite universe.
pub fn decide_single_literal(m: &Nplts, s1: StateId, s2: StateId, sem: Semantics, opts: &Options) -> Result<Outcome> {
    let spaces = [
        enumerate_resolutions(m, s1, opts.mode, &opts.budget)?,
        enumerate_resolutions(m, s2, opts.mode, &opts.budget)?,
    ];
    for &kind in sem.kinds() {
        for e in event_universe(m, s1, s2, kind, &opts.budget)? {
            let values = spaces
                .each_ref()
                .map(|sp| sp.iter().map(|z| compatible_probability(m, sp.tree(), z, &e)).collect::<Vec<_>>());
            let covered = |from: &[Rational], to: &[Rational]| from.iter().all(|v| to.iter().any(|w| w == v));
            if !covered(&values[0], &values[1]) || !covered(&values[1], &values[0]) {
                return Ok(Outcome::Distinguished);
            }
        }
    }
    Ok(Outcome::Equivalent)
}

/// Re-checks a witness produced by a trace-based decision from scratch.
pub fn verify_trace_witness(
    m: &Nplts,
    s1: StateId,
    s2: StateId,
    sem: Semantics,
    app: Approach,
    w: &Witness,
    opts: &Options,
) -> Result<bool> {
    let states = [s1, s2];
    Ok(match (app, w) {
        (Approach::Dis, Witness::UnmatchedProfile { side, kind, resolution, profile }) => {
            if !sem.kinds().contains(kind) {
                return Ok(false);
            }
            let i = side_index(*side);
            let lattice = m.relevant_actions(&states);
            let own = enumerate_resolutions(m, states[i], opts.mode, &opts.budget)?;
            let other = enumerate_resolutions(m, states[1 - i], opts.mode, &opts.budget)?;
            let Some(z) = own.resolutions().get(*resolution) else { return Ok(false) };
            event_profile(m, own.tree(), z, *kind, lattice) == *profile
                && other.iter().all(|z| event_profile(m, other.tree(), z, *kind, lattice) != *profile)
        }
        (Approach::Single, Witness::ValueSets { event, left, right }) => {
            let l = achievable_value_set(m, s1, event, Domain::Res, opts)?;
            let r = achievable_value_set(m, s2, event, Domain::Res, opts)?;
            sem.kinds().contains(&event.kind())
                && l.iter().eq(left.iter())
                && r.iter().eq(right.iter())
                && l != r
        }
        (Approach::SupInf, Witness::Extrema { event, left, right }) => {
            sem.kinds().contains(&event.kind())
                && supinf_value_enumerated(m, s1, event, opts)? == *left
                && supinf_value_enumerated(m, s2, event, opts)? == *right
                && left != right
        }
        _ => false,
    })
}

/// Whether a resolution chooses the same way at every occurrence of a state.
pub fn is_memoryless(tree: &TreeModel, choices: &[Choice]) -> bool {
    let mut seen: BTreeMap<StateId, Choice> = BTreeMap::new();
    tree.nodes().all(|(n, node)| match choices[n.index()] {
        Choice::Unreached => true,
        c => *seen.entry(node.state).or_insert(c) == c,
    })
}
