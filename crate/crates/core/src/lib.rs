//! Exact checking of strong behavioral equivalences on finite acyclic
//! nondeterministic and probabilistic labeled transition systems (NPLTS).
//!
//! The crate covers eighteen trace-based equivalences (six decorated-trace
//! semantics, each under three ways of matching resolutions), five testing
//! equivalences and three group-based bisimilarities. Every probability is an
//! exact rational, so verdicts never depend on a floating-point tolerance.
//!
//! Nondeterminism is resolved by deterministic schedulers enumerated on the
//! tree unfolding of a model. Because the models are finite and acyclic, all
//! quantifications over resolutions, events and groups are exhaustive.
//!
//! The crate is `no_std` and only needs `alloc`; parsing, reports and the
//! command line live in the companion `spectra` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bisim;
mod budget;
mod error;
pub mod event;
pub mod model;
mod rational;
pub mod resolution;
pub mod spectrum;
pub mod testing;
pub mod trace;
pub mod tree;
pub mod verdict;

pub use budget::Budget;
pub use error::{Error, Result};
pub use event::{Event, EventKind, EventProfile, Observer};
pub use model::{ActionId, ActionSet, Distribution, ModelClass, Nplts, RawModel, StateId, Transition};
pub use rational::Rational;
pub use resolution::{Resolution, ResolutionSpace, SchedulerMode};
pub use spectrum::EquivalenceId;
pub use tree::{NodeId, TreeModel};
pub use verdict::{Verdict, Witness};

/// Outcome of comparing two states under one equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Equivalent,
    Distinguished,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Equivalent => "equivalent",
            Outcome::Distinguished => "distinguished",
        }
    }

    pub fn is_equivalent(self) -> bool {
        self == Outcome::Equivalent
    }
}

/// Which of the two compared states a piece of witness data belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Settings shared by every decision procedure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub mode: SchedulerMode,
    pub budget: Budget,
}
