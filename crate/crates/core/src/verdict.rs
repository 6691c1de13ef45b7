//! Verdicts and the witnesses attached to distinguished outcomes.

use alloc::vec::Vec;

use crate::event::{Event, EventKind, EventProfile};
use crate::model::{ActionId, StateId};
use crate::{Outcome, Rational, Side};

/// Result of one equivalence check. Distinguished verdicts always carry a
/// witness that can be re-verified independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn equivalent() -> Verdict {
        Verdict { outcome: Outcome::Equivalent, witness: None }
    }

    pub fn distinguished(w: Witness) -> Verdict {
        Verdict { outcome: Outcome::Distinguished, witness: Some(w) }
    }

    pub fn is_equivalent(&self) -> bool {
        self.outcome.is_equivalent()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A resolution of one side whose full profile no resolution of the
    /// other side reproduces.
    UnmatchedProfile {
        side: Side,
        kind: EventKind,
        resolution: usize,
        profile: EventProfile,
    },
    /// An event whose achievable probabilities differ.
    ValueSets {
        event: Event,
        left: Vec<Rational>,
        right: Vec<Rational>,
    },
    /// An event whose extremal probabilities over `Res_α` differ, as
    /// `(sup, inf)`.
    Extrema {
        event: Event,
        left: (Rational, Rational),
        right: (Rational, Rational),
    },
    /// A test of the family that tells the states apart.
    Test { test: usize, detail: TestDetail },
    /// A violated transfer condition at the final partition.
    Bisim(BisimWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestDetail {
    /// Extremal success probabilities over maximal resolutions, `(sup, inf)`.
    SuccessExtrema {
        left: (Rational, Rational),
        right: (Rational, Rational),
    },
    /// Achievable success probabilities over maximal resolutions.
    SuccessValues { left: Vec<Rational>, right: Vec<Rational> },
    /// A maximal resolution of the interaction on one side that no resolution
    /// on the other side matches trace by trace.
    UnmatchedResolution { side: Side, resolution: usize },
    /// Success probabilities along a trace over resolutions with a completed
    /// computation for that trace.
    TraceValues {
        trace: Vec<ActionId>,
        left: Vec<Rational>,
        right: Vec<Rational>,
    },
    /// Extremal success probabilities along a trace; `None` when no maximal
    /// resolution completes the trace.
    TraceExtrema {
        trace: Vec<ActionId>,
        left: Option<(Rational, Rational)>,
        right: Option<(Rational, Rational)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimWitness {
    /// One side can perform the action and the other cannot.
    Enabled { action: ActionId, side: Side },
    /// A transition of one side with no transition of the other side that
    /// agrees on every block of the partition.
    UnmatchedTransition {
        side: Side,
        transition: usize,
        blocks: Vec<Vec<StateId>>,
    },
    /// Group masses reachable with the action differ as sets.
    GroupValues {
        action: ActionId,
        group: Vec<StateId>,
        left: Vec<Rational>,
        right: Vec<Rational>,
    },
    /// Group masses reachable with the action differ in `(sup, inf)`.
    GroupExtrema {
        action: ActionId,
        group: Vec<StateId>,
        left: (Rational, Rational),
        right: (Rational, Rational),
    },
}
