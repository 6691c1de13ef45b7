//! Validated NPLTS models, their classification and synchronous composition.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of actions of one model, stored as a bit mask over action ids.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSet(u64);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ActionSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(a: ActionId) -> Self {
        ActionSet(1 << a.0)
    }

    pub fn contains(self, a: ActionId) -> bool {
        self.0 & (1 << a.0) != 0
    }

    pub fn insert(&mut self, a: ActionId) {
        self.0 |= 1 << a.0;
    }

    pub fn union(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 & other.0)
    }

    pub fn difference(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ActionSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = ActionId> {
        (0..64u32).filter(move |i| self.0 & (1 << i) != 0).map(ActionId)
    }

    /// All subsets of `self`, in increasing bit-mask order.
    pub fn subsets(self) -> impl Iterator<Item = ActionSet> {
        let full = self.0;
        let mut next = Some(0u64);
        core::iter::from_fn(move || {
            let current = next?;
            next = if current == full { None } else { Some((current.wrapping_sub(full)) & full) };
            Some(ActionSet(current))
        })
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|a| a.0)).finish()
    }
}

/// A probability distribution with exact rational weights. Only the support
/// is stored: every weight is positive and the weights sum to one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution {
    entries: Vec<(StateId, Rational)>,
}

impl Distribution {
    pub fn dirac(s: StateId) -> Self {
        Distribution { entries: vec![(s, Rational::ONE)] }
    }

    /// Builds a distribution from entries that are already known to be valid.
    pub(crate) fn from_sorted(entries: Vec<(StateId, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Distribution { entries }
    }

    pub fn entries(&self) -> &[(StateId, Rational)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.iter().map(|&(s, _)| s)
    }

    pub fn probability(&self, s: StateId) -> Rational {
        self.entries
            .binary_search_by_key(&s, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(Rational::ZERO)
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }

    /// Total probability of the states selected by `member`.
    pub fn mass(&self, mut member: impl FnMut(StateId) -> bool) -> Rational {
        self.entries.iter().filter(|&&(s, _)| member(s)).map(|&(_, p)| p).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: StateId,
    pub label: ActionId,
    pub target: Distribution,
}

/// An unvalidated model description, as produced by a parser or a builder.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawModel {
    pub name: String,
    pub alphabet: Option<Vec<String>>,
    pub states: Vec<String>,
    pub transitions: Vec<RawTransition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTransition {
    pub source: String,
    pub label: String,
    pub target: Vec<(String, Rational)>,
}

impl RawModel {
    pub fn new(name: impl Into<String>) -> Self {
        RawModel { name: name.into(), ..RawModel::default() }
    }

    pub fn alphabet<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.alphabet.get_or_insert_with(Vec::new).extend(labels.into_iter().map(Into::into));
        self
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn trans(mut self, source: &str, label: &str, target: &[(&str, Rational)]) -> Self {
        self.transitions.push(RawTransition {
            source: source.into(),
            label: label.into(),
            target: target.iter().map(|&(s, p)| (s.into(), p)).collect(),
        });
        self
    }

    /// Adds a transition to a Dirac distribution.
    pub fn step(self, source: &str, label: &str, target: &str) -> Self {
        self.trans(source, label, &[(target, Rational::ONE)])
    }

    pub fn build(&self) -> Result<Nplts> {
        validate_model(self)
    }
}

/// A validated, finite, acyclic NPLTS. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nplts {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    enabled: Vec<ActionSet>,
    heights: Vec<u32>,
}

/// Structural classification of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelClass {
    pub fully_nondeterministic: bool,
    pub fully_probabilistic: bool,
    pub depth: u32,
}

/// Checks a raw description and produces a validated model.
///
/// States are declared by use; the alphabet is the declared one when present,
/// otherwise the labels in order of first use. Identical transitions are
/// merged, since the transition relation is a set.
pub fn validate_model(raw: &RawModel) -> Result<Nplts> {
    let mut state_index: BTreeMap<&str, StateId> = BTreeMap::new();
    let mut states: Vec<String> = Vec::new();
    fn intern<'a>(index: &mut BTreeMap<&'a str, StateId>, states: &mut Vec<String>, name: &'a str) -> StateId {
        *index.entry(name).or_insert_with(|| {
            states.push(name.to_string());
            StateId(states.len() as u32 - 1)
        })
    }
    for s in &raw.states {
        intern(&mut state_index, &mut states, s);
    }
    for t in &raw.transitions {
        intern(&mut state_index, &mut states, &t.source);
        for (s, _) in &t.target {
            intern(&mut state_index, &mut states, s);
        }
    }
    if states.is_empty() {
        return Err(Error::EmptyModel);
    }

    let mut actions: Vec<String> = Vec::new();
    let declared = raw.alphabet.is_some();
    if let Some(alphabet) = &raw.alphabet {
        for a in alphabet {
            if !actions.contains(a) {
                actions.push(a.clone());
            }
        }
    }

    let mut transitions: Vec<Transition> = Vec::new();
    for t in &raw.transitions {
        let label = match actions.iter().position(|a| *a == t.label) {
            Some(i) => ActionId(i as u32),
            None if declared => return Err(Error::UnknownAction(t.label.clone())),
            None => {
                actions.push(t.label.clone());
                ActionId(actions.len() as u32 - 1)
            }
        };
        let source = state_index[t.source.as_str()];
        let mut entries: Vec<(StateId, Rational)> = Vec::with_capacity(t.target.len());
        for (name, p) in &t.target {
            if *p <= Rational::ZERO || *p > Rational::ONE {
                return Err(Error::InvalidProbability {
                    from: t.source.clone(),
                    label: t.label.clone(),
                    state: name.clone(),
                    probability: *p,
                });
            }
            let s = state_index[name.as_str()];
            if entries.iter().any(|&(u, _)| u == s) {
                return Err(Error::DuplicateSupportState {
                    from: t.source.clone(),
                    label: t.label.clone(),
                    state: name.clone(),
                });
            }
            entries.push((s, *p));
        }
        let sum: Rational = entries.iter().map(|&(_, p)| p).sum();
        if sum != Rational::ONE {
            return Err(Error::DistributionNotNormalized {
                from: t.source.clone(),
                label: t.label.clone(),
                sum,
            });
        }
        entries.sort_by_key(|&(s, _)| s);
        let transition = Transition { source, label, target: Distribution::from_sorted(entries) };
        if !transitions.contains(&transition) {
            transitions.push(transition);
        }
    }
    if actions.len() > 64 {
        return Err(Error::AlphabetTooLarge(actions.len()));
    }

    Nplts::assemble(raw.name.clone(), states, actions, transitions)
}

impl Nplts {
    fn assemble(
        name: String,
        states: Vec<String>,
        actions: Vec<String>,
        transitions: Vec<Transition>,
    ) -> Result<Nplts> {
        let mut outgoing = vec![Vec::new(); states.len()];
        let mut enabled = vec![ActionSet::EMPTY; states.len()];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.source.index()].push(i);
            enabled[t.source.index()].insert(t.label);
        }
        let mut model = Nplts { name, states, actions, transitions, outgoing, enabled, heights: Vec::new() };
        let order = model.topological_order()?;
        let mut heights = vec![0u32; model.states.len()];
        for &s in order.iter().rev() {
            heights[s.index()] = model
                .successors(s)
                .map(|t| heights[t.index()] + 1)
                .max()
                .unwrap_or(0);
        }
        model.heights = heights;
        Ok(model)
    }

    /// Kahn's algorithm; on failure reports one concrete cycle.
    fn topological_order(&self) -> Result<Vec<StateId>> {
        let n = self.states.len();
        let mut indegree = vec![0usize; n];
        for s in self.state_ids() {
            for t in self.successors(s) {
                indegree[t.index()] += 1;
            }
        }
        let mut queue: VecDeque<StateId> = self.state_ids().filter(|s| indegree[s.index()] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for t in self.successors(s) {
                indegree[t.index()] -= 1;
                if indegree[t.index()] == 0 {
                    queue.push_back(t);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        Err(Error::CyclicModel { cycle: self.find_cycle(&indegree) })
    }

    /// Walks backwards-free states left over by Kahn's algorithm until a state repeats.
    fn find_cycle(&self, indegree: &[usize]) -> Vec<String> {
        let start = self.state_ids().find(|s| indegree[s.index()] > 0).expect("cyclic remainder");
        let mut path = vec![start];
        let mut current = start;
        loop {
            let next = self
                .successors(current)
                .find(|t| indegree[t.index()] > 0)
                .expect("every state on a cycle remainder has a cyclic successor");
            if let Some(pos) = path.iter().position(|&s| s == next) {
                let mut cycle: Vec<String> = path[pos..].iter().map(|&s| self.state_name(s).to_string()).collect();
                cycle.push(self.state_name(next).to_string());
                return cycle;
            }
            path.push(next);
            current = next;
        }
    }

    /// Distinct successor states of `s`, in first-seen order.
    pub fn successors(&self, s: StateId) -> impl Iterator<Item = StateId> + '_ {
        let mut seen = BTreeSet::new();
        self.outgoing[s.index()]
            .iter()
            .flat_map(move |&i| self.transitions[i].target.support())
            .filter(move |t| seen.insert(*t))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + Clone {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.index()]
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()]
    }

    pub fn action(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(|i| ActionId(i as u32))
    }

    pub fn alphabet(&self) -> ActionSet {
        match self.actions.len() {
            64 => ActionSet(u64::MAX),
            n => ActionSet((1u64 << n) - 1),
        }
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, index: usize) -> &Transition {
        &self.transitions[index]
    }

    /// Indices of the transitions leaving `s`, in declaration order.
    pub fn outgoing(&self, s: StateId) -> &[usize] {
        &self.outgoing[s.index()]
    }

    /// The labels of the transitions leaving `s`.
    pub fn enabled_actions(&self, s: StateId) -> ActionSet {
        self.enabled[s.index()]
    }

    pub fn is_deadlocked(&self, s: StateId) -> bool {
        self.outgoing[s.index()].is_empty()
    }

    /// Length of the longest computation starting in `s`.
    pub fn height(&self, s: StateId) -> u32 {
        self.heights[s.index()]
    }

    pub fn classify(&self) -> ModelClass {
        ModelClass {
            fully_nondeterministic: self.transitions.iter().all(|t| t.target.is_dirac()),
            fully_probabilistic: self.outgoing.iter().all(|out| out.len() <= 1),
            depth: self.heights.iter().copied().max().unwrap_or(0),
        }
    }

    /// States reachable from any of `roots` (roots included), in BFS order.
    pub fn reachable(&self, roots: &[StateId]) -> Vec<StateId> {
        let mut seen = vec![false; self.states.len()];
        let mut order = Vec::new();
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &r in roots {
            if !seen[r.index()] {
                seen[r.index()] = true;
                queue.push_back(r);
            }
        }
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for t in self.successors(s) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Actions enabled in some state reachable from `roots`.
    pub fn relevant_actions(&self, roots: &[StateId]) -> ActionSet {
        self.reachable(roots)
            .into_iter()
            .fold(ActionSet::EMPTY, |acc, s| acc.union(self.enabled_actions(s)))
    }

    /// Whether some computation from `s` is labeled exactly `trace`.
    pub fn can_read(&self, s: StateId, trace: &[ActionId]) -> bool {
        match trace.split_first() {
            None => true,
            Some((&a, rest)) => self.outgoing[s.index()].iter().any(|&i| {
                let t = &self.transitions[i];
                t.label == a && t.target.support().any(|u| self.can_read(u, rest))
            }),
        }
    }

    /// Re-expresses the model as a raw description (states listed explicitly).
    pub fn to_raw(&self) -> RawModel {
        RawModel {
            name: self.name.clone(),
            alphabet: Some(self.actions.clone()),
            states: self.states.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| RawTransition {
                    source: self.state_name(t.source).to_string(),
                    label: self.action_name(t.label).to_string(),
                    target: t
                        .target
                        .entries()
                        .iter()
                        .map(|&(s, p)| (self.state_name(s).to_string(), p))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Restricts the model to the states reachable from `roots`.
    pub fn restrict(&self, roots: &[StateId]) -> Nplts {
        let keep = self.reachable(roots);
        let mut raw = RawModel::new(self.name.clone());
        raw.alphabet = Some(self.actions.clone());
        let mut sorted = keep.clone();
        sorted.sort();
        raw.states = sorted.iter().map(|&s| self.state_name(s).to_string()).collect();
        raw.transitions = self
            .to_raw()
            .transitions
            .into_iter()
            .zip(&self.transitions)
            .filter(|(_, t)| sorted.binary_search(&t.source).is_ok())
            .map(|(r, _)| r)
            .collect();
        validate_model(&raw).expect("restriction of a valid model is valid")
    }
}

/// Enabled actions of a state: exactly the labels of its outgoing transitions.
pub fn enabled_actions(m: &Nplts, s: StateId) -> ActionSet {
    m.enabled_actions(s)
}

pub fn classify(m: &Nplts) -> ModelClass {
    m.classify()
}

/// Fully synchronous parallel composition restricted to the product states
/// reachable from `(root1, root2)`. Actions synchronise by name; the target
/// distribution is the product of the two factor distributions.
///
/// Product states are named `(s1,s2)`. Returns the composed model and its root.
pub fn parallel_compose(m1: &Nplts, root1: StateId, m2: &Nplts, root2: StateId) -> (Nplts, StateId) {
    let (model, root, _) = parallel_compose_tracked(m1, root1, m2, root2);
    (model, root)
}

/// [`parallel_compose`], also returning the pair of factor states behind each
/// product state.
pub fn parallel_compose_tracked(
    m1: &Nplts,
    root1: StateId,
    m2: &Nplts,
    root2: StateId,
) -> (Nplts, StateId, Vec<(StateId, StateId)>) {
    let mut actions: Vec<String> = m1.actions.clone();
    for a in &m2.actions {
        if !actions.contains(a) {
            actions.push(a.clone());
        }
    }
    let action_of = |name: &str| ActionId(actions.iter().position(|a| a == name).unwrap() as u32);
    // label of m2's action in m1, if any
    let partner: Vec<Option<ActionId>> = m2.actions.iter().map(|a| m1.action(a)).collect();

    let mut index: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut queue: VecDeque<(StateId, StateId)> = VecDeque::new();
    index.insert((root1, root2), StateId(0));
    pairs.push((root1, root2));
    queue.push_back((root1, root2));
    let mut transitions = Vec::new();
    while let Some((s1, s2)) = queue.pop_front() {
        let source = index[&(s1, s2)];
        for &i1 in m1.outgoing(s1) {
            let t1 = m1.transition(i1);
            for &i2 in m2.outgoing(s2) {
                let t2 = m2.transition(i2);
                if partner[t2.label.index()] != Some(t1.label) {
                    continue;
                }
                let mut entries = Vec::new();
                for &(u1, p1) in t1.target.entries() {
                    for &(u2, p2) in t2.target.entries() {
                        let next = StateId(index.len() as u32);
                        let id = *index.entry((u1, u2)).or_insert_with(|| {
                            pairs.push((u1, u2));
                            queue.push_back((u1, u2));
                            next
                        });
                        entries.push((id, p1 * p2));
                    }
                }
                entries.sort_by_key(|&(s, _)| s);
                transitions.push(Transition {
                    source,
                    label: action_of(m1.action_name(t1.label)),
                    target: Distribution::from_sorted(entries),
                });
            }
        }
    }
    let states = pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", m1.state_name(a), m2.state_name(b)))
        .collect();
    let name = format!("{}||{}", m1.name, m2.name);
    let model = Nplts::assemble(name, states, actions, transitions).expect("product of acyclic models is acyclic");
    (model, StateId(0), pairs)
}

/// Places two models side by side in one model, so that a single partition or
/// a single pair of states can relate them. States are renamed `l.<s>` and
/// `r.<s>`; actions are shared by name. Returns the union and the offset of
/// the right model's states.
pub fn disjoint_union(left: &Nplts, right: &Nplts) -> (Nplts, u32) {
    let mut actions = left.actions.clone();
    for a in &right.actions {
        if !actions.contains(a) {
            actions.push(a.clone());
        }
    }
    let offset = left.num_states() as u32;
    let mut states: Vec<String> = left.states.iter().map(|s| format!("l.{s}")).collect();
    states.extend(right.states.iter().map(|s| format!("r.{s}")));
    let relabel = |m: &Nplts, a: ActionId| ActionId(actions.iter().position(|x| x == m.action_name(a)).unwrap() as u32);
    let mut transitions: Vec<Transition> = left
        .transitions
        .iter()
        .map(|t| Transition { source: t.source, label: relabel(left, t.label), target: t.target.clone() })
        .collect();
    transitions.extend(right.transitions.iter().map(|t| Transition {
        source: StateId(t.source.0 + offset),
        label: relabel(right, t.label),
        target: Distribution::from_sorted(t.target.entries().iter().map(|&(s, p)| (StateId(s.0 + offset), p)).collect()),
    }));
    let name = format!("{}+{}", left.name, right.name);
    let model = Nplts::assemble(name, states, actions, transitions).expect("union of acyclic models is acyclic");
    (model, offset)
}
