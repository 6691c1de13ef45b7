use alloc::string::String;
use alloc::vec::Vec;

use crate::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("model has no states")]
    EmptyModel,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("action `{0}` is not in the declared alphabet")]
    UnknownAction(String),
    #[error("distribution of {from} -{label}-> sums to {sum}, not 1")]
    DistributionNotNormalized {
        from: String,
        label: String,
        sum: Rational,
    },
    #[error("distribution of {from} -{label}-> gives probability {probability} to `{state}`")]
    InvalidProbability {
        from: String,
        label: String,
        state: String,
        probability: Rational,
    },
    #[error("distribution of {from} -{label}-> lists `{state}` twice")]
    DuplicateSupportState {
        from: String,
        label: String,
        state: String,
    },
    #[error("model is cyclic: {}", .cycle.join(" -> "))]
    CyclicModel { cycle: Vec<String> },
    #[error("alphabet has {0} actions; at most 64 are supported")]
    AlphabetTooLarge(usize),
    #[error("more than {limit} resolutions; shrink the model or raise the budget")]
    ResolutionSpaceTooLarge { limit: u64 },
    #[error("tree unfolding exceeds {limit} nodes")]
    TreeTooLarge { limit: usize },
    #[error("event universe exceeds {limit} events")]
    UniverseTooLarge { limit: usize },
    #[error("{blocks} blocks exceed the group enumeration limit of {limit}")]
    GroupSpaceTooLarge { blocks: usize, limit: usize },
    #[error("computation set is not prefix-free")]
    NotPrefixFree,
    #[error("computation is not a path of the resolution")]
    NotAComputation,
    #[error("invalid test: {0}")]
    InvalidTest(String),
    #[error("test family is empty")]
    EmptyFamily,
    #[error("test family exceeds {limit} tests")]
    FamilyTooLarge { limit: usize },
    #[error("invalid probability grid: {0}")]
    InvalidGrid(String),
    #[error("witness search exhausted after {attempts} candidates")]
    SearchExhausted { attempts: u64 },
}

impl Error {
    /// Errors caused by an exhausted budget rather than by bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::ResolutionSpaceTooLarge { .. }
                | Error::TreeTooLarge { .. }
                | Error::UniverseTooLarge { .. }
                | Error::GroupSpaceTooLarge { .. }
                | Error::FamilyTooLarge { .. }
                | Error::SearchExhausted { .. }
        )
    }
}
