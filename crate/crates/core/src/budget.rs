/// Hard limits on the exhaustive enumerations performed by the deciders.
///
/// Exceeding a limit is always reported as an error, never silently
/// truncated: a truncated quantifier would make "equivalent" unsound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of resolutions enumerated from one state.
    pub max_resolutions: u64,
    /// Maximum number of nodes in a tree unfolding.
    pub max_tree_nodes: usize,
    /// Maximum size of an event universe.
    pub max_universe: usize,
    /// Maximum number of blocks whose groups are enumerated exhaustively.
    pub max_group_blocks: usize,
    /// Maximum number of tests produced by the test generator.
    pub max_family: usize,
}

impl Budget {
    pub const DEFAULT_RESOLUTIONS: u64 = 10_000_000;

    pub fn with_resolutions(mut self, max_resolutions: u64) -> Self {
        self.max_resolutions = max_resolutions;
        self
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_resolutions: Self::DEFAULT_RESOLUTIONS,
            max_tree_nodes: 1_000_000,
            max_universe: 1_000_000,
            max_group_blocks: 20,
            max_family: 20_000,
        }
    }
}
