//! Resolutions of nondeterminism obtained via deterministic schedulers.
//!
//! A resolution is represented as a choice per node of the tree unfolding:
//! either one branch, an explicit stop, or "unreached" for nodes that the
//! scheduler never visits. Stopping is allowed at every node, so `Res(s)`
//! contains the non-maximal resolutions as well.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ActionId, Nplts, StateId};
use crate::tree::{unfold_to_tree, NodeId, TreeModel};
use crate::{Budget, Error, Rational, Result};

/// How a scheduler may depend on the history.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SchedulerMode {
    /// One choice per node of the tree unfolding (history-dependent).
    #[default]
    Tree,
    /// One choice per model state, reused at every occurrence of the state.
    Memoryless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    Unreached,
    Stop,
    /// Index into the node's branches.
    Take(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Resolution {
    choices: Vec<Choice>,
    maximal: bool,
}

impl Resolution {
    pub fn choice(&self, n: NodeId) -> Choice {
        self.choices[n.index()]
    }

    pub fn choices(&self) -> &[Choice] {
        &self.choices
    }

    /// True iff the scheduler never stops where the model could continue.
    pub fn is_maximal(&self) -> bool {
        self.maximal
    }

    pub fn is_reached(&self, n: NodeId) -> bool {
        self.choices[n.index()] != Choice::Unreached
    }

    /// Nodes of the resolution, in preorder.
    pub fn nodes(&self, tree: &TreeModel) -> Vec<NodeId> {
        let mut out = Vec::new();
        for_each_path(tree, self, |p| out.push(p.last()));
        out
    }

    /// All finite computations from the root, the empty one included.
    pub fn computations(&self, tree: &TreeModel) -> Vec<Computation> {
        let mut out = Vec::new();
        for_each_path(tree, self, |p| {
            out.push(Computation { nodes: p.nodes.to_vec(), labels: p.labels.to_vec(), probability: p.probability })
        });
        out
    }

    /// Computations that cannot be extended inside the resolution.
    pub fn maximal_computations(&self, tree: &TreeModel) -> Vec<Computation> {
        self.computations(tree)
            .into_iter()
            .filter(|c| !matches!(self.choice(*c.nodes.last().unwrap()), Choice::Take(_)))
            .collect()
    }
}

/// A computation of a resolution: a root path with its probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Computation {
    pub nodes: Vec<NodeId>,
    pub labels: Vec<ActionId>,
    pub probability: Rational,
}

impl Computation {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }
}

/// Borrowed view of a root path handed out during resolution walks.
pub(crate) struct PathView<'a> {
    pub nodes: &'a [NodeId],
    pub labels: &'a [ActionId],
    pub probability: Rational,
}

impl PathView<'_> {
    pub fn last(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }
}

/// Calls `f` once per computation of `z` (every reached node ends exactly one).
pub(crate) fn for_each_path(tree: &TreeModel, z: &Resolution, mut f: impl FnMut(&PathView<'_>)) {
    fn go(
        tree: &TreeModel,
        z: &Resolution,
        nodes: &mut Vec<NodeId>,
        labels: &mut Vec<ActionId>,
        probability: Rational,
        f: &mut dyn FnMut(&PathView<'_>),
    ) {
        f(&PathView { nodes, labels, probability });
        let n = *nodes.last().unwrap();
        if let Choice::Take(b) = z.choice(n) {
            let branch = &tree.node(n).branches[b as usize];
            labels.push(branch.label);
            for &(c, p) in &branch.children {
                nodes.push(c);
                go(tree, z, nodes, labels, probability * p, f);
                nodes.pop();
            }
            labels.pop();
        }
    }
    let mut nodes = vec![tree.root()];
    let mut labels = Vec::new();
    go(tree, z, &mut nodes, &mut labels, Rational::ONE, &mut f);
}

/// The resolutions of one state together with the tree they live on.
#[derive(Clone, Debug)]
pub struct ResolutionSpace {
    root: StateId,
    tree: TreeModel,
    mode: SchedulerMode,
    resolutions: Vec<Resolution>,
}

impl ResolutionSpace {
    pub fn root_state(&self) -> StateId {
        self.root
    }

    pub fn tree(&self) -> &TreeModel {
        &self.tree
    }

    pub fn mode(&self) -> SchedulerMode {
        self.mode
    }

    pub fn resolutions(&self) -> &[Resolution] {
        &self.resolutions
    }

    pub fn len(&self) -> usize {
        self.resolutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resolutions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Resolution> {
        self.resolutions.iter()
    }

    pub fn maximal(&self) -> impl Iterator<Item = &Resolution> {
        self.resolutions.iter().filter(|z| z.is_maximal())
    }
}

/// Number of tree-mode resolutions of the tree: `1 + Σ_b Π_child count(child)`
/// per node, saturating.
pub fn count_resolutions(tree: &TreeModel, only_maximal: bool) -> u128 {
    let mut counts = vec![0u128; tree.len()];
    for i in (0..tree.len()).rev() {
        let node = tree.node(NodeId(i as u32));
        let stop = u128::from(!only_maximal || node.branches.is_empty());
        counts[i] = node.branches.iter().fold(stop, |acc, b| {
            let product = b.children.iter().fold(1u128, |p, &(c, _)| p.saturating_mul(counts[c.index()]));
            acc.saturating_add(product)
        });
    }
    counts[0]
}

struct Enumerator<'a> {
    tree: &'a TreeModel,
    mode: SchedulerMode,
    only_maximal: bool,
    limit: u64,
    choices: Vec<Choice>,
    // memoryless mode: the choice already made for a model state
    fixed: Vec<Option<Choice>>,
    premature_stops: usize,
    pending: Vec<NodeId>,
    out: Vec<Resolution>,
}

impl Enumerator<'_> {
    fn run(&mut self) -> Result<()> {
        let Some(n) = self.pending.pop() else {
            if self.out.len() as u64 >= self.limit {
                return Err(Error::ResolutionSpaceTooLarge { limit: self.limit });
            }
            self.out.push(Resolution { choices: self.choices.clone(), maximal: self.premature_stops == 0 });
            return Ok(());
        };
        let node = self.tree.node(n);
        let state = node.state.index();
        let options: Vec<Choice> = match (self.mode, self.fixed.get(state).copied().flatten()) {
            (SchedulerMode::Memoryless, Some(c)) => vec![c],
            _ => {
                let mut options = Vec::with_capacity(node.branches.len() + 1);
                if !self.only_maximal || node.branches.is_empty() {
                    options.push(Choice::Stop);
                }
                options.extend((0..node.branches.len() as u32).map(Choice::Take));
                options
            }
        };
        let decides = self.mode == SchedulerMode::Memoryless && self.fixed[state].is_none();
        for choice in options {
            self.choices[n.index()] = choice;
            if decides {
                self.fixed[state] = Some(choice);
            }
            let premature = choice == Choice::Stop && !node.branches.is_empty();
            self.premature_stops += usize::from(premature);
            let pushed = match choice {
                Choice::Take(b) => {
                    let children = &node.branches[b as usize].children;
                    self.pending.extend(children.iter().rev().map(|&(c, _)| c));
                    children.len()
                }
                _ => 0,
            };
            // on error the state is abandoned, so no cleanup is needed
            self.run()?;
            self.pending.truncate(self.pending.len() - pushed);
            self.premature_stops -= usize::from(premature);
        }
        self.choices[n.index()] = Choice::Unreached;
        if decides {
            self.fixed[state] = None;
        }
        self.pending.push(n);
        Ok(())
    }
}

fn enumerate(m: &Nplts, s: StateId, mode: SchedulerMode, only_maximal: bool, budget: &Budget) -> Result<ResolutionSpace> {
    let tree = unfold_to_tree(m, s, budget)?;
    if mode == SchedulerMode::Tree && count_resolutions(&tree, only_maximal) > u128::from(budget.max_resolutions) {
        return Err(Error::ResolutionSpaceTooLarge { limit: budget.max_resolutions });
    }
    let mut e = Enumerator {
        tree: &tree,
        mode,
        only_maximal,
        limit: budget.max_resolutions,
        choices: vec![Choice::Unreached; tree.len()],
        fixed: vec![None; m.num_states()],
        premature_stops: 0,
        pending: vec![tree.root()],
        out: Vec::new(),
    };
    e.run()?;
    let resolutions = e.out;
    Ok(ResolutionSpace { root: s, tree, mode, resolutions })
}

/// All resolutions of `s`: one per deterministic scheduler, including the
/// one that stops immediately. The order is deterministic.
pub fn enumerate_resolutions(m: &Nplts, s: StateId, mode: SchedulerMode, budget: &Budget) -> Result<ResolutionSpace> {
    enumerate(m, s, mode, false, budget)
}

/// The maximal resolutions of `s`.
pub fn enumerate_max_resolutions(m: &Nplts, s: StateId, mode: SchedulerMode, budget: &Budget) -> Result<ResolutionSpace> {
    enumerate(m, s, mode, true, budget)
}

/// Membership in `Res_α`.
///
/// Reading used: a resolution belongs to `Res_α` iff none of its maximal
/// computations corresponds to a proper prefix of an α-compatible computation
/// of the model. Concretely, a stopped node whose path reads `α[..k]` with
/// `k < |α|` is forbidden when its model state can still read `α[k..]`.
/// Choosing a transition with a different label is allowed.
pub fn in_res_alpha(m: &Nplts, tree: &TreeModel, z: &Resolution, alpha: &[ActionId]) -> bool {
    fn ok(m: &Nplts, tree: &TreeModel, z: &Resolution, n: NodeId, rest: &[ActionId]) -> bool {
        let Some((&a, tail)) = rest.split_first() else { return true };
        match z.choice(n) {
            Choice::Take(b) => {
                let branch = &tree.node(n).branches[b as usize];
                branch.label != a || branch.children.iter().all(|&(c, _)| ok(m, tree, z, c, tail))
            }
            _ => !m.can_read(tree.corr(n), rest),
        }
    }
    ok(m, tree, z, tree.root(), alpha)
}

/// The members of `Res_α(s)` within a resolution space.
pub fn restrict_res_alpha<'a>(m: &Nplts, space: &'a ResolutionSpace, alpha: &[ActionId]) -> Vec<&'a Resolution> {
    space.iter().filter(|z| in_res_alpha(m, space.tree(), z, alpha)).collect()
}

/// Probability of a prefix-free set of computations of `z`.
pub fn computation_set_probability(tree: &TreeModel, z: &Resolution, cs: &[Computation]) -> Result<Rational> {
    for c in cs {
        let contiguous = c.nodes.first() == Some(&tree.root())
            && c.nodes.len() == c.labels.len() + 1
            && c.nodes.windows(2).zip(&c.labels).all(|(w, &label)| match z.choice(w[0]) {
                Choice::Take(b) => {
                    let branch = &tree.node(w[0]).branches[b as usize];
                    branch.label == label && branch.children.iter().any(|&(child, _)| child == w[1])
                }
                _ => false,
            });
        if !contiguous {
            return Err(Error::NotAComputation);
        }
    }
    for (i, c) in cs.iter().enumerate() {
        for (j, d) in cs.iter().enumerate() {
            if i != j && c.nodes.len() < d.nodes.len() && d.nodes.starts_with(&c.nodes) {
                return Err(Error::NotPrefixFree);
            }
        }
    }
    Ok(cs
        .iter()
        .map(|c| {
            c.nodes
                .windows(2)
                .map(|w| {
                    let Choice::Take(b) = z.choice(w[0]) else { unreachable!() };
                    tree.node(w[0]).branches[b as usize]
                        .children
                        .iter()
                        .find(|&&(child, _)| child == w[1])
                        .map(|&(_, p)| p)
                        .unwrap()
                })
                .fold(Rational::ONE, |acc, p| acc * p)
        })
        .sum())
}

/// Checks a resolution against the definition of a resolution obtained via a
/// deterministic scheduler: the root corresponds to the state, every chosen
/// transition is a transition of the corresponding model state with the same
/// label and a distribution that agrees through the correspondence, and there
/// is at most one transition per node. Also checks the maximality flag.
pub fn validate_resolution(m: &Nplts, space: &ResolutionSpace, z: &Resolution) -> core::result::Result<(), String> {
    let tree = space.tree();
    if tree.corr(tree.root()) != space.root_state() {
        return Err("root does not correspond to the resolved state".into());
    }
    if z.choices.len() != tree.len() {
        return Err("choice vector does not cover the tree".into());
    }
    let reached: BTreeSet<NodeId> = z.nodes(tree).into_iter().collect();
    let mut maximal = true;
    for (n, node) in tree.nodes() {
        let choice = z.choice(n);
        if reached.contains(&n) == (choice == Choice::Unreached) {
            return Err(format!("node {} has inconsistent reachability", n.0));
        }
        match choice {
            Choice::Unreached => {}
            Choice::Stop => maximal &= m.is_deadlocked(node.state),
            Choice::Take(b) => {
                let Some(branch) = node.branches.get(b as usize) else {
                    return Err(format!("node {} takes a missing branch", n.0));
                };
                let t = m.transition(branch.transition);
                if t.source != node.state || t.label != branch.label {
                    return Err(format!("node {} takes a transition of another state", n.0));
                }
                let mut seen = BTreeSet::new();
                for &(c, p) in &branch.children {
                    let s = tree.corr(c);
                    if !seen.insert(s) || t.target.probability(s) != p {
                        return Err(format!("node {} has a distribution that disagrees with the model", n.0));
                    }
                }
                if seen.len() != t.target.entries().len() {
                    return Err(format!("node {} drops part of the support", n.0));
                }
            }
        }
    }
    if maximal != z.is_maximal() {
        return Err("maximality flag is wrong".into());
    }
    if space.mode() == SchedulerMode::Memoryless {
        let mut by_state: Vec<Option<Choice>> = vec![None; m.num_states()];
        for &n in &reached {
            let slot = &mut by_state[tree.corr(n).index()];
            match slot {
                Some(c) if *c != z.choice(n) => return Err("memoryless scheduler depends on history".into()),
                _ => *slot = Some(z.choice(n)),
            }
        }
    }
    Ok(())
}
