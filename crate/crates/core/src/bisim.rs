//! The three group-based bisimilarities, decided by partition refinement.
//!
//! Refinement starts from the partition with a single block and splits
//! blocks until every pair of states sharing a block satisfies the transfer
//! condition of the chosen variant. To compare states of two models, run it
//! on their disjoint union.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ActionId, Distribution, Nplts, StateId};
use crate::verdict::{BisimWitness, Verdict, Witness};
use crate::{Budget, Error, Rational, Result, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BisimVariant {
    /// One matching transition agreeing on every group.
    Dis,
    /// Per group, possibly different matching transitions.
    Group,
    /// Per action and group, equal extremal masses.
    SupInf,
}

impl BisimVariant {
    pub const ALL: [BisimVariant; 3] = [BisimVariant::Dis, BisimVariant::Group, BisimVariant::SupInf];
}

/// How groups of blocks are enumerated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Groups {
    /// Every subset of every block. Used as a reference.
    Exhaustive,
    /// Only subsets of the blocks touched by the transitions being compared;
    /// the other blocks never change a group's mass.
    #[default]
    Pruned,
}

/// An equivalence relation over the states of a model, as disjoint blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// The partition with a single block.
    pub fn universal(m: &Nplts) -> Partition {
        Partition::from_blocks(m.num_states(), vec![m.state_ids().collect()])
    }

    /// Builds a partition; blocks are sorted and ordered by least member.
    ///
    /// Panics if the blocks are not a partition of `0..num_states`.
    pub fn from_blocks(num_states: usize, mut blocks: Vec<Vec<StateId>>) -> Partition {
        for b in &mut blocks {
            b.sort();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        let mut block_of = vec![usize::MAX; num_states];
        for (i, b) in blocks.iter().enumerate() {
            for &s in b {
                assert_eq!(block_of[s.index()], usize::MAX, "state in two blocks");
                block_of[s.index()] = i;
            }
        }
        assert!(block_of.iter().all(|&b| b != usize::MAX), "blocks do not cover the states");
        Partition { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s.index()]
    }

    pub fn same_block(&self, s: StateId, t: StateId) -> bool {
        self.block_of(s) == self.block_of(t)
    }

    /// Mass of `d` on every block, indexed by block.
    fn block_masses(&self, d: &Distribution) -> Vec<Rational> {
        let mut out = vec![Rational::ZERO; self.len()];
        for &(s, p) in d.entries() {
            out[self.block_of(s)] += p;
        }
        out
    }

    /// The states of the union of a group of blocks.
    pub fn union_states(&self, group: &[usize]) -> Vec<StateId> {
        let mut out: Vec<StateId> = group.iter().flat_map(|&b| self.blocks[b].iter().copied()).collect();
        out.sort();
        out
    }
}

/// Probability that `d` assigns to the union of the given blocks.
pub fn group_mass(d: &Distribution, p: &Partition, group: &[usize]) -> Rational {
    d.mass(|s| group.contains(&p.block_of(s)))
}

/// Transfer condition for `x` and `y` under `p`, with pruned groups.
pub fn transfer_holds(m: &Nplts, x: StateId, y: StateId, p: &Partition, variant: BisimVariant, budget: &Budget) -> Result<bool> {
    Ok(violation(m, x, y, p, variant, Groups::Pruned, budget)?.is_none())
}

/// Transfer condition with an explicit group enumeration strategy.
pub fn transfer_holds_with(
    m: &Nplts,
    x: StateId,
    y: StateId,
    p: &Partition,
    variant: BisimVariant,
    groups: Groups,
    budget: &Budget,
) -> Result<bool> {
    Ok(violation(m, x, y, p, variant, groups, budget)?.is_none())
}

fn by_label(m: &Nplts, s: StateId, a: ActionId) -> impl Iterator<Item = usize> + '_ {
    m.outgoing(s).iter().copied().filter(move |&t| m.transition(t).label == a)
}

/// Block masses of every `a`-transition of `s`, with transition indices.
fn vectors(m: &Nplts, s: StateId, a: ActionId, p: &Partition) -> Vec<(usize, Vec<Rational>)> {
    by_label(m, s, a).map(|t| (t, p.block_masses(&m.transition(t).target))).collect()
}

/// Calls `f` with every group of blocks that can change a mass, as a list
/// of block indices, until it returns `Some`.
fn for_each_group<T>(
    p: &Partition,
    touched: &[&[(usize, Vec<Rational>)]],
    groups: Groups,
    budget: &Budget,
    mut f: impl FnMut(&[usize]) -> Option<T>,
) -> Result<Option<T>> {
    let pool: Vec<usize> = match groups {
        Groups::Exhaustive => (0..p.len()).collect(),
        Groups::Pruned => {
            let mut used = BTreeSet::new();
            for vs in touched {
                for (_, v) in vs.iter() {
                    used.extend(v.iter().enumerate().filter(|(_, q)| !q.is_zero()).map(|(b, _)| b));
                }
            }
            used.into_iter().collect()
        }
    };
    if pool.len() > budget.max_group_blocks {
        return Err(Error::GroupSpaceTooLarge { blocks: pool.len(), limit: budget.max_group_blocks });
    }
    let mut group = Vec::with_capacity(pool.len());
    for mask in 0u64..(1u64 << pool.len()) {
        group.clear();
        group.extend(pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &b)| b));
        if let Some(found) = f(&group) {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn mass_on(v: &[Rational], group: &[usize]) -> Rational {
    group.iter().map(|&b| v[b]).fold(Rational::ZERO, |acc, q| acc + q)
}

fn values(vs: &[(usize, Vec<Rational>)], group: &[usize]) -> BTreeSet<Rational> {
    vs.iter().map(|(_, v)| mass_on(v, group)).collect()
}

fn extrema(set: &BTreeSet<Rational>) -> (Rational, Rational) {
    match (set.last(), set.first()) {
        (Some(&hi), Some(&lo)) => (hi, lo),
        _ => (Rational::ZERO, Rational::ZERO),
    }
}

/// The first violated clause of the transfer condition, if any.
pub fn violation(
    m: &Nplts,
    x: StateId,
    y: StateId,
    p: &Partition,
    variant: BisimVariant,
    groups: Groups,
    budget: &Budget,
) -> Result<Option<BisimWitness>> {
    let (ex, ey) = (m.enabled_actions(x), m.enabled_actions(y));
    for a in ex.union(ey).iter() {
        if variant != BisimVariant::Group && ex.contains(a) != ey.contains(a) {
            let side = if ex.contains(a) { Side::Left } else { Side::Right };
            return Ok(Some(BisimWitness::Enabled { action: a, side }));
        }
        let (vx, vy) = (vectors(m, x, a, p), vectors(m, y, a, p));
        let found = match variant {
            BisimVariant::Dis => dis_violation(p, &vx, &vy, groups, budget)?,
            BisimVariant::Group => for_each_group(p, &[&vx, &vy], groups, budget, |g| {
                let (l, r) = (values(&vx, g), values(&vy, g));
                (l != r).then(|| BisimWitness::GroupValues {
                    action: a,
                    group: p.union_states(g),
                    left: l.into_iter().collect(),
                    right: r.into_iter().collect(),
                })
            })?,
            BisimVariant::SupInf => for_each_group(p, &[&vx, &vy], groups, budget, |g| {
                let (l, r) = (extrema(&values(&vx, g)), extrema(&values(&vy, g)));
                (l != r).then(|| BisimWitness::GroupExtrema { action: a, group: p.union_states(g), left: l, right: r })
            })?,
        };
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn dis_violation(
    p: &Partition,
    vx: &[(usize, Vec<Rational>)],
    vy: &[(usize, Vec<Rational>)],
    groups: Groups,
    budget: &Budget,
) -> Result<Option<BisimWitness>> {
    for (side, own, other) in [(Side::Left, vx, vy), (Side::Right, vy, vx)] {
        for (t, v1) in own {
            let mut matched = false;
            for (_, v2) in other {
                let equal = match groups {
                    // additivity: equal on every block iff equal on every group
                    Groups::Pruned => v1 == v2,
                    Groups::Exhaustive => for_each_group(p, &[], groups, budget, |g| {
                        (mass_on(v1, g) != mass_on(v2, g)).then_some(())
                    })?
                    .is_none(),
                };
                if equal {
                    matched = true;
                    break;
                }
            }
            if !matched {
                return Ok(Some(BisimWitness::UnmatchedTransition {
                    side,
                    transition: *t,
                    blocks: p.blocks().to_vec(),
                }));
            }
        }
    }
    Ok(None)
}

/// Verdict together with the largest bisimulation found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimOutcome {
    pub verdict: Verdict,
    pub partition: Partition,
    /// Number of refinement rounds that split at least one block.
    pub rounds: usize,
}

/// Largest bisimulation of the chosen kind over the whole model.
pub fn largest_bisimulation(m: &Nplts, variant: BisimVariant, groups: Groups, budget: &Budget) -> Result<(Partition, usize)> {
    let mut p = Partition::universal(m);
    let mut rounds = 0;
    loop {
        let mut next: Vec<Vec<StateId>> = Vec::new();
        for block in p.blocks() {
            let first = next.len();
            for &s in block {
                let mut placed = false;
                for class in &mut next[first..] {
                    if violation(m, class[0], s, &p, variant, groups, budget)?.is_none() {
                        class.push(s);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    next.push(vec![s]);
                }
            }
        }
        if next.len() == p.len() {
            return Ok((p, rounds));
        }
        rounds += 1;
        p = Partition::from_blocks(m.num_states(), next);
    }
}

/// Decides whether `s1` and `s2` are bisimilar. A distinguished verdict
/// carries the transfer clause that fails at the final partition.
pub fn decide_bisimilarity(m: &Nplts, s1: StateId, s2: StateId, variant: BisimVariant, budget: &Budget) -> Result<BisimOutcome> {
    let (partition, rounds) = largest_bisimulation(m, variant, Groups::Pruned, budget)?;
    let verdict = if partition.same_block(s1, s2) {
        Verdict::equivalent()
    } else {
        // refinement is monotone, so the clause that split them still fails
        let w = violation(m, s1, s2, &partition, variant, Groups::Pruned, budget)?
            .expect("states in different blocks violate the transfer condition");
        Verdict::distinguished(Witness::Bisim(w))
    };
    Ok(BisimOutcome { verdict, partition, rounds })
}

/// Whether every pair of states sharing a block satisfies the transfer
/// condition, i.e. whether `p` is a bisimulation of the chosen kind.
pub fn is_bisimulation(m: &Nplts, p: &Partition, variant: BisimVariant, budget: &Budget) -> Result<bool> {
    for block in p.blocks() {
        for (i, &x) in block.iter().enumerate() {
            for &y in &block[i + 1..] {
                if violation(m, x, y, p, variant, Groups::Exhaustive, budget)?.is_some() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Whether no two blocks of `p` can be merged into a bisimulation.
pub fn no_mergeable_blocks(m: &Nplts, p: &Partition, variant: BisimVariant, budget: &Budget) -> Result<bool> {
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let mut blocks = p.blocks().to_vec();
            let merged = blocks.remove(j);
            blocks[i].extend(merged);
            if is_bisimulation(m, &Partition::from_blocks(m.num_states(), blocks), variant, budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Re-checks a bisimulation witness: the partition must be a bisimulation
/// separating the states, and the named clause must fail under it.
pub fn verify_bisim_witness(
    m: &Nplts,
    s1: StateId,
    s2: StateId,
    variant: BisimVariant,
    p: &Partition,
    w: &Witness,
    budget: &Budget,
) -> Result<bool> {
    let Witness::Bisim(w) = w else { return Ok(false) };
    if p.same_block(s1, s2) || !is_bisimulation(m, p, variant, budget)? {
        return Ok(false);
    }
    let (e1, e2) = (m.enabled_actions(s1), m.enabled_actions(s2));
    let masses = |s: StateId, a: ActionId, group: &[StateId]| -> BTreeSet<Rational> {
        by_label(m, s, a).map(|t| m.transition(t).target.mass(|u| group.contains(&u))).collect()
    };
    Ok(match w {
        BisimWitness::Enabled { action, side } => {
            let (own, other) = if *side == Side::Left { (e1, e2) } else { (e2, e1) };
            own.contains(*action) && !other.contains(*action)
        }
        BisimWitness::UnmatchedTransition { side, transition, .. } => {
            let (own, other) = if *side == Side::Left { (s1, s2) } else { (s2, s1) };
            let t = m.transition(*transition);
            t.source == own
                && !by_label(m, other, t.label)
                    .any(|u| p.block_masses(&m.transition(u).target) == p.block_masses(&t.target))
        }
        BisimWitness::GroupValues { action, group, left, right } => {
            let l: Vec<_> = masses(s1, *action, group).into_iter().collect();
            let r: Vec<_> = masses(s2, *action, group).into_iter().collect();
            is_union_of_blocks(p, group) && l == *left && r == *right && l != r
        }
        BisimWitness::GroupExtrema { action, group, left, right } => {
            let l = extrema(&masses(s1, *action, group));
            let r = extrema(&masses(s2, *action, group));
            is_union_of_blocks(p, group) && l == *left && r == *right && l != r
        }
    })
}

fn is_union_of_blocks(p: &Partition, states: &[StateId]) -> bool {
    states.iter().all(|&s| p.blocks()[p.block_of(s)].iter().all(|t| states.contains(t)))
}
