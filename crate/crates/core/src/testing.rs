//! Tests with a success state, interaction systems and the five testing
//! equivalences.
//!
//! Quantification over all tests is replaced by a finite [`TestFamily`]. A
//! distinguished verdict is therefore always sound, while an equivalent
//! verdict only means that no test of the family tells the states apart.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::event::Observer;
use crate::model::{parallel_compose_tracked, ActionId, ActionSet, Nplts, RawModel, StateId};
use crate::resolution::{enumerate_max_resolutions, for_each_path, Choice, ResolutionSpace};
use crate::verdict::{TestDetail, Verdict, Witness};
use crate::{Budget, Error, Options, Rational, Result, Side};

/// Reserved name of the success state.
pub const OMEGA: &str = "omega";

/// A finite acyclic test with initial state and success state `omega`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Npt {
    model: Nplts,
    initial: StateId,
    omega: StateId,
}

impl Npt {
    /// Wraps a model as a test. A missing `omega` state is added; an `omega`
    /// with outgoing transitions is rejected.
    pub fn new(model: Nplts, initial: &str) -> Result<Npt> {
        let model = if model.state(OMEGA).is_ok() {
            model
        } else {
            let mut raw = model.to_raw();
            raw.states.push(OMEGA.to_string());
            raw.build()?
        };
        let initial = model.state(initial)?;
        let omega = model.state(OMEGA)?;
        if !model.is_deadlocked(omega) {
            return Err(Error::InvalidTest(format!("`{OMEGA}` has outgoing transitions")));
        }
        Ok(Npt { model, initial, omega })
    }

    /// The test whose initial state is already successful.
    pub fn trivial() -> Npt {
        let model = RawModel::new("trivial").state(OMEGA).build().expect("single state is valid");
        Npt { model, initial: StateId(0), omega: StateId(0) }
    }

    pub fn model(&self) -> &Nplts {
        &self.model
    }

    pub fn name(&self) -> &str {
        self.model.name()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn omega(&self) -> StateId {
        self.omega
    }
}

/// The composition of a process state with a test, rooted at `(s, o)`.
#[derive(Clone, Debug)]
pub struct InteractionSystem {
    model: Nplts,
    root: StateId,
    success: Vec<bool>,
}

impl InteractionSystem {
    pub fn model(&self) -> &Nplts {
        &self.model
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn is_successful(&self, s: StateId) -> bool {
        self.success[s.index()]
    }
}

impl Observer for InteractionSystem {
    fn enabled(&self, s: StateId) -> ActionSet {
        self.model.enabled_actions(s)
    }

    fn successful(&self, s: StateId) -> bool {
        self.success[s.index()]
    }
}

/// `I(L, T)` from configuration `(s, o)`: a configuration is successful iff
/// its test component is `omega`.
pub fn interaction(m: &Nplts, s: StateId, t: &Npt) -> InteractionSystem {
    let (model, root, pairs) = parallel_compose_tracked(m, s, &t.model, t.initial);
    let success = pairs.iter().map(|&(_, o)| o == t.omega).collect();
    InteractionSystem { model, root, success }
}

/// What the testing variants need from one maximal resolution of an
/// interaction system.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Record {
    /// Probability of the successful computations.
    total: Rational,
    /// Probability of the successful computations per trace (nonzero only).
    along: BTreeMap<Vec<ActionId>, Rational>,
    /// Traces of the completed computations.
    completed: BTreeSet<Vec<ActionId>>,
}

fn records(sys: &InteractionSystem, opts: &Options) -> Result<(ResolutionSpace, Vec<Record>)> {
    let space = enumerate_max_resolutions(&sys.model, sys.root, opts.mode, &opts.budget)?;
    let tree = space.tree();
    let records = space
        .iter()
        .map(|z| {
            let mut r = Record { total: Rational::ZERO, along: BTreeMap::new(), completed: BTreeSet::new() };
            for_each_path(tree, z, |p| {
                let last = p.last();
                if matches!(z.choice(last), Choice::Take(_)) {
                    return;
                }
                // a leaf of a maximal resolution is a deadlocked configuration
                r.completed.insert(p.labels.to_vec());
                if sys.is_successful(tree.corr(last)) {
                    r.total += p.probability;
                    *r.along.entry(p.labels.to_vec()).or_insert(Rational::ZERO) += p.probability;
                }
            });
            r
        })
        .collect();
    Ok((space, records))
}

/// `(sup, inf)` of the success probability over the maximal resolutions of
/// the interaction of `s` with `t`.
pub fn success_extrema(m: &Nplts, s: StateId, t: &Npt, opts: &Options) -> Result<(Rational, Rational)> {
    let (_, recs) = records(&interaction(m, s, t), opts)?;
    Ok(extrema(recs.iter().map(|r| r.total)).expect("Res_max is never empty"))
}

fn extrema(values: impl Iterator<Item = Rational>) -> Option<(Rational, Rational)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((hi, lo)) => Some((Rational::max(hi, v), Rational::min(lo, v))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TestingVariant {
    /// Extremal success probabilities.
    SupInf,
    /// Every maximal resolution matched by one with the same success probability.
    AllExists,
    /// Resolutions matched on their success probability along every trace.
    TbtDis,
    /// Success probabilities along each trace, over resolutions completing it.
    Tbt,
    /// Extremal success probabilities along each trace.
    TbtSupInf,
}

impl TestingVariant {
    pub const ALL: [TestingVariant; 5] = [
        TestingVariant::SupInf,
        TestingVariant::AllExists,
        TestingVariant::TbtDis,
        TestingVariant::Tbt,
        TestingVariant::TbtSupInf,
    ];
}

/// A finite set of tests standing in for "every test".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFamily {
    tests: Vec<Npt>,
    provenance: String,
}

impl TestFamily {
    pub fn new(tests: Vec<Npt>, provenance: impl Into<String>) -> Result<TestFamily> {
        if tests.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(TestFamily { tests, provenance: provenance.into() })
    }

    pub fn tests(&self) -> &[Npt] {
        &self.tests
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// Interaction records of two states against every test of a family,
/// computed once and shared by the five variants.
pub struct TestingAnalysis {
    // per test: records of the left and right interaction
    records: Vec<[Vec<Record>; 2]>,
}

impl TestingAnalysis {
    pub fn new(m: &Nplts, s1: StateId, s2: StateId, family: &TestFamily, opts: &Options) -> Result<TestingAnalysis> {
        let mut out = Vec::with_capacity(family.len());
        for t in family.tests() {
            let left = records(&interaction(m, s1, t), opts)?.1;
            let right = if s1 == s2 { left.clone() } else { records(&interaction(m, s2, t), opts)?.1 };
            out.push([left, right]);
        }
        Ok(TestingAnalysis { records: out })
    }

    pub fn decide(&self, variant: TestingVariant) -> Verdict {
        for (test, [left, right]) in self.records.iter().enumerate() {
            let detail = match variant {
                TestingVariant::SupInf => sup_inf(left, right),
                TestingVariant::AllExists => all_exists(left, right),
                TestingVariant::TbtDis => tbt_dis(left, right),
                TestingVariant::Tbt => tbt(left, right),
                TestingVariant::TbtSupInf => tbt_sup_inf(left, right),
            };
            if let Some(detail) = detail {
                return Verdict::distinguished(Witness::Test { test, detail });
            }
        }
        Verdict::equivalent()
    }
}

fn sup_inf(left: &[Record], right: &[Record]) -> Option<TestDetail> {
    let l = extrema(left.iter().map(|r| r.total)).expect("Res_max is never empty");
    let r = extrema(right.iter().map(|r| r.total)).expect("Res_max is never empty");
    (l != r).then_some(TestDetail::SuccessExtrema { left: l, right: r })
}

fn all_exists(left: &[Record], right: &[Record]) -> Option<TestDetail> {
    let l: BTreeSet<Rational> = left.iter().map(|r| r.total).collect();
    let r: BTreeSet<Rational> = right.iter().map(|r| r.total).collect();
    (l != r).then(|| TestDetail::SuccessValues { left: l.into_iter().collect(), right: r.into_iter().collect() })
}

/// `z2` answers `z1`: every trace completed by `z1` is completed by `z2`,
/// and success probabilities agree on every trace.
fn answers(z1: &Record, z2: &Record) -> bool {
    z1.along == z2.along && z1.completed.is_subset(&z2.completed)
}

fn tbt_dis(left: &[Record], right: &[Record]) -> Option<TestDetail> {
    for (side, own, other) in [(Side::Left, left, right), (Side::Right, right, left)] {
        if let Some(resolution) = own.iter().position(|z1| !other.iter().any(|z2| answers(z1, z2))) {
            return Some(TestDetail::UnmatchedResolution { side, resolution });
        }
    }
    None
}

/// Success probabilities along `alpha` over the resolutions completing it.
fn along_values(recs: &[Record], alpha: &[ActionId]) -> BTreeSet<Rational> {
    recs.iter()
        .filter(|r| r.completed.contains(alpha))
        .map(|r| r.along.get(alpha).copied().unwrap_or(Rational::ZERO))
        .collect()
}

fn completed_union<'a>(left: &'a [Record], right: &'a [Record]) -> BTreeSet<&'a Vec<ActionId>> {
    left.iter().chain(right).flat_map(|r| r.completed.iter()).collect()
}

fn tbt(left: &[Record], right: &[Record]) -> Option<TestDetail> {
    for alpha in completed_union(left, right) {
        let l = along_values(left, alpha);
        let r = along_values(right, alpha);
        if l != r {
            return Some(TestDetail::TraceValues {
                trace: alpha.clone(),
                left: l.into_iter().collect(),
                right: r.into_iter().collect(),
            });
        }
    }
    None
}

fn tbt_sup_inf(left: &[Record], right: &[Record]) -> Option<TestDetail> {
    for alpha in completed_union(left, right) {
        let l = extrema(along_values(left, alpha).into_iter());
        let r = extrema(along_values(right, alpha).into_iter());
        if l != r {
            return Some(TestDetail::TraceExtrema { trace: alpha.clone(), left: l, right: r });
        }
    }
    None
}

/// Decides one testing equivalence relative to a test family.
pub fn decide_testing_equivalence(
    m: &Nplts,
    s1: StateId,
    s2: StateId,
    variant: TestingVariant,
    family: &TestFamily,
    opts: &Options,
) -> Result<Verdict> {
    Ok(TestingAnalysis::new(m, s1, s2, family, opts)?.decide(variant))
}

/// Re-checks a testing witness by recomputing the single test it names.
pub fn verify_testing_witness(
    m: &Nplts,
    s1: StateId,
    s2: StateId,
    variant: TestingVariant,
    family: &TestFamily,
    w: &Witness,
    opts: &Options,
) -> Result<bool> {
    let Witness::Test { test, detail } = w else { return Ok(false) };
    let Some(t) = family.tests().get(*test) else { return Ok(false) };
    let left = records(&interaction(m, s1, t), opts)?.1;
    let right = records(&interaction(m, s2, t), opts)?.1;
    let again = match variant {
        TestingVariant::SupInf => sup_inf(&left, &right),
        TestingVariant::AllExists => all_exists(&left, &right),
        TestingVariant::TbtDis => tbt_dis(&left, &right),
        TestingVariant::Tbt => {
            let (TestDetail::TraceValues { trace, .. } | TestDetail::TraceExtrema { trace, .. }) = detail else {
                return Ok(false);
            };
            let (l, r) = (along_values(&left, trace), along_values(&right, trace));
            (l != r).then(|| TestDetail::TraceValues {
                trace: trace.clone(),
                left: l.into_iter().collect(),
                right: r.into_iter().collect(),
            })
        }
        TestingVariant::TbtSupInf => {
            let (TestDetail::TraceValues { trace, .. } | TestDetail::TraceExtrema { trace, .. }) = detail else {
                return Ok(false);
            };
            let (l, r) = (extrema(along_values(&left, trace).into_iter()), extrema(along_values(&right, trace).into_iter()));
            (l != r).then(|| TestDetail::TraceExtrema { trace: trace.clone(), left: l, right: r })
        }
    };
    Ok(again.as_ref() == Some(detail))
}

/// Bounds for [`generate_tests`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestBounds {
    /// Longest path from the initial state.
    pub max_depth: usize,
    /// Most transitions leaving one test state.
    pub max_branching: usize,
    /// Probabilities from which target distributions are composed.
    pub grid: Vec<Rational>,
    /// Most transitions in one test.
    pub max_transitions: usize,
}

impl Default for TestBounds {
    fn default() -> Self {
        TestBounds {
            max_depth: 3,
            max_branching: 2,
            grid: vec![Rational::ONE, Rational::new(1, 2), Rational::new(1, 3), Rational::new(2, 3)],
            max_transitions: 3,
        }
    }
}

/// Canonical form of a tree-shaped test. `Dead` is a non-successful state
/// without transitions and only appears next to other outcomes of a
/// probabilistic choice.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Omega,
    Dead,
    Node(Vec<Edge>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Edge {
    label: usize,
    target: Vec<(Rational, Shape)>,
}

impl Shape {
    fn transitions(&self) -> usize {
        match self {
            Shape::Node(edges) => edges.iter().map(|e| 1 + e.target.iter().map(|(_, c)| c.transitions()).sum::<usize>()).sum(),
            _ => 0,
        }
    }
}

struct Generator<'a> {
    labels: usize,
    bounds: &'a TestBounds,
    // multisets of grid values summing to one, each sorted
    splits: Vec<Vec<Rational>>,
    nodes: BTreeMap<(usize, usize), Vec<Shape>>,
    edges: BTreeMap<(usize, usize), Vec<Edge>>,
}

impl Generator<'_> {
    /// Internal nodes of height at most `d` with exactly `k` transitions.
    fn nodes(&mut self, d: usize, k: usize) -> Vec<Shape> {
        if let Some(v) = self.nodes.get(&(d, k)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if d > 0 && k > 0 {
            // candidate edges by size, then pick strictly increasing sets
            let mut candidates: Vec<(usize, Edge)> = Vec::new();
            for size in 1..=k {
                candidates.extend(self.edges(d, size).into_iter().map(|e| (size, e)));
            }
            candidates.sort_by(|a, b| a.1.cmp(&b.1));
            let mut chosen = Vec::new();
            pick(&candidates, 0, k, self.bounds.max_branching, &mut chosen, &mut out);
        }
        self.nodes.insert((d, k), out.clone());
        out
    }

    /// Edges whose targets have height below `d`, with `k` transitions in
    /// total counting the edge itself.
    fn edges(&mut self, d: usize, k: usize) -> Vec<Edge> {
        if let Some(v) = self.edges.get(&(d, k)) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        for split in self.splits.clone() {
            let mut targets = Vec::new();
            self.fill(d - 1, &split, 0, k - 1, &mut Vec::new(), &mut targets);
            for target in targets {
                for label in 0..self.labels {
                    out.insert(Edge { label, target: target.clone() });
                }
            }
        }
        let out: Vec<Edge> = out.into_iter().collect();
        self.edges.insert((d, k), out.clone());
        out
    }

    /// Assigns a child to each probability of `split`, using `k` transitions.
    fn fill(
        &mut self,
        d: usize,
        split: &[Rational],
        i: usize,
        k: usize,
        acc: &mut Vec<(Rational, Shape)>,
        out: &mut Vec<Vec<(Rational, Shape)>>,
    ) {
        if i == split.len() {
            if k == 0 {
                let mut entries = acc.clone();
                entries.sort();
                let omegas = entries.iter().filter(|(_, c)| *c == Shape::Omega).count();
                let deads = entries.iter().filter(|(_, c)| *c == Shape::Dead).count();
                let dirac_dead = entries.len() == 1 && deads == 1;
                if omegas <= 1 && deads <= 1 && !dirac_dead && !out.contains(&entries) {
                    out.push(entries);
                }
            }
            return;
        }
        let p = split[i];
        for leaf in [Shape::Omega, Shape::Dead] {
            acc.push((p, leaf));
            self.fill(d, split, i + 1, k, acc, out);
            acc.pop();
        }
        for used in 1..=k {
            for child in self.nodes(d, used) {
                acc.push((p, child));
                self.fill(d, split, i + 1, k - used, acc, out);
                acc.pop();
            }
        }
    }
}

fn pick(candidates: &[(usize, Edge)], from: usize, k: usize, room: usize, chosen: &mut Vec<Edge>, out: &mut Vec<Shape>) {
    if k == 0 {
        out.push(Shape::Node(chosen.clone()));
        return;
    }
    if room == 0 {
        return;
    }
    for i in from..candidates.len() {
        let (size, ref edge) = candidates[i];
        if size <= k {
            chosen.push(edge.clone());
            pick(candidates, i + 1, k - size, room - 1, chosen, out);
            chosen.pop();
        }
    }
}

/// Multisets of grid values summing to one.
pub(crate) fn splits(grid: &[Rational]) -> Vec<Vec<Rational>> {
    let mut grid: Vec<Rational> = grid.iter().copied().filter(|p| !p.is_zero() && *p <= Rational::ONE).collect();
    grid.sort();
    grid.dedup();
    let mut out = Vec::new();
    fn go(grid: &[Rational], from: usize, left: Rational, acc: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        if left.is_zero() {
            out.push(acc.clone());
            return;
        }
        for (i, &p) in grid.iter().enumerate().skip(from) {
            if p <= left {
                acc.push(p);
                go(grid, i, left - p, acc, out);
                acc.pop();
            }
        }
    }
    go(&grid, 0, Rational::ONE, &mut Vec::new(), &mut out);
    out
}

/// All structurally distinct tree-shaped tests over `alphabet` within the
/// bounds, up to isomorphism, starting with the trivial test. The order is
/// deterministic: by number of transitions, then by canonical form.
pub fn generate_tests(alphabet: &[String], bounds: &TestBounds, budget: &Budget) -> Result<TestFamily> {
    if bounds.grid.iter().any(|p| p.is_zero() || *p > Rational::ONE) {
        return Err(Error::InvalidGrid("probabilities must lie in (0, 1]".into()));
    }
    let mut g = Generator {
        labels: alphabet.len(),
        bounds,
        splits: splits(&bounds.grid),
        nodes: BTreeMap::new(),
        edges: BTreeMap::new(),
    };
    let mut tests = vec![Npt::trivial()];
    for k in 1..=bounds.max_transitions {
        for shape in g.nodes(bounds.max_depth, k) {
            debug_assert_eq!(shape.transitions(), k);
            if tests.len() >= budget.max_family {
                return Err(Error::FamilyTooLarge { limit: budget.max_family });
            }
            tests.push(realize(&shape, alphabet, tests.len()));
        }
    }
    let provenance = format!(
        "generated depth={} branching={} transitions={} grid={}",
        bounds.max_depth,
        bounds.max_branching,
        bounds.max_transitions,
        bounds.grid.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    );
    TestFamily::new(tests, provenance)
}

fn realize(shape: &Shape, alphabet: &[String], index: usize) -> Npt {
    fn go(shape: &Shape, name: String, alphabet: &[String], next: &mut usize, raw: &mut RawModel) {
        let Shape::Node(edges) = shape else { return };
        for e in edges {
            let mut target = Vec::new();
            for (p, child) in &e.target {
                let child_name = match child {
                    Shape::Omega => OMEGA.to_string(),
                    Shape::Dead => "dead".to_string(),
                    Shape::Node(_) => {
                        *next += 1;
                        let n = format!("o{next}");
                        go(child, n.clone(), alphabet, next, raw);
                        n
                    }
                };
                target.push((child_name, *p));
            }
            raw.transitions.push(crate::model::RawTransition {
                source: name.clone(),
                label: alphabet[e.label].clone(),
                target,
            });
        }
    }
    let mut raw = RawModel::new(format!("t{index}")).alphabet(alphabet.iter().cloned()).state("o");
    go(shape, "o".to_string(), alphabet, &mut 0, &mut raw);
    let model = raw.build().expect("generated tests are valid");
    Npt::new(model, "o").expect("generated tests are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RawModel;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn opts() -> Options {
        Options::default()
    }

    fn npt(raw: RawModel) -> Npt {
        Npt::new(raw.build().unwrap(), "o").unwrap()
    }

    #[test]
    fn trivial_test_always_succeeds() {
        let m = RawModel::new("m").step("s", "a", "u").build().unwrap();
        let s = m.state("s").unwrap();
        assert_eq!(success_extrema(&m, s, &Npt::trivial(), &opts()).unwrap(), (Rational::ONE, Rational::ONE));
    }

    #[test]
    fn interaction_with_probabilistic_process() {
        let m = RawModel::new("m").trans("s", "a", &[("u", r(1, 2)), ("v", r(1, 2))]).build().unwrap();
        let t = npt(RawModel::new("t").step("o", "a", "omega"));
        let sys = interaction(&m, m.state("s").unwrap(), &t);
        let i = sys.model();
        assert_eq!(i.transitions().len(), 1);
        let d = &i.transition(0).target;
        assert_eq!(d.entries().len(), 2);
        assert!(d.support().all(|c| sys.is_successful(c)));
        assert_eq!(i.state_name(d.entries()[0].0), "(u,omega)");
    }

    #[test]
    fn extrema_examples() {
        let t = npt(RawModel::new("t").step("o", "a", "o1").step("o1", "b", "omega"));
        let coin = RawModel::new("m").trans("s", "a", &[("u", r(1, 2)), ("v", r(1, 2))]).step("u", "b", "w").build().unwrap();
        assert_eq!(success_extrema(&coin, StateId(0), &t, &opts()).unwrap(), (r(1, 2), r(1, 2)));
        let choice = RawModel::new("m").step("s", "a", "u").step("s", "a", "v").step("u", "b", "w").build().unwrap();
        assert_eq!(success_extrema(&choice, StateId(0), &t, &opts()).unwrap(), (Rational::ONE, Rational::ZERO));
    }

    #[test]
    fn omega_must_be_final() {
        let raw = RawModel::new("t").step("o", "a", "omega").step("omega", "a", "x");
        assert!(matches!(Npt::new(raw.build().unwrap(), "o"), Err(Error::InvalidTest(_))));
    }

    #[test]
    fn empty_family_is_rejected() {
        assert_eq!(TestFamily::new(Vec::new(), "none"), Err(Error::EmptyFamily));
    }

    fn names(f: &TestFamily) -> Vec<String> {
        use alloc::string::ToString;
        f.tests()
            .iter()
            .map(|t| {
                let m = t.model();
                let mut lines: Vec<String> = m
                    .transitions()
                    .iter()
                    .map(|tr| {
                        let target: Vec<String> = tr
                            .target
                            .entries()
                            .iter()
                            .map(|&(s, p)| format!("{}:{}", m.state_name(s), p))
                            .collect();
                        format!("{} {} {}", m.state_name(tr.source), m.action_name(tr.label), target.join(","))
                    })
                    .collect();
                lines.sort();
                if lines.is_empty() {
                    "trivial".to_string()
                } else {
                    lines.join("; ")
                }
            })
            .collect()
    }

    #[test]
    fn generator_smallest_families() {
        let a = ["a".to_string()];
        let b = |grid: Vec<Rational>| TestBounds { max_depth: 1, max_branching: 1, grid, max_transitions: 3 };
        let f = generate_tests(&a, &b(vec![Rational::ONE]), &Budget::default()).unwrap();
        assert_eq!(names(&f), vec!["trivial", "o a omega:1"]);
        let f = generate_tests(&a, &b(vec![r(1, 2)]), &Budget::default()).unwrap();
        assert_eq!(names(&f), vec!["trivial", "o a omega:1/2,dead:1/2"]);
    }

    #[test]
    fn generator_depth_two() {
        let ab = ["a".to_string(), "b".to_string()];
        let bounds = TestBounds { max_depth: 2, max_branching: 2, grid: vec![Rational::ONE], max_transitions: 3 };
        let f = generate_tests(&ab, &bounds, &Budget::default()).unwrap();
        let n = names(&f);
        assert!(n.contains(&"o a o1:1; o1 b omega:1".to_string()), "{n:?}");
        assert!(n.contains(&"o a o1:1; o a omega:1; o1 b omega:1".to_string()), "{n:?}");
        let unique: BTreeSet<_> = n.iter().collect();
        assert_eq!(unique.len(), n.len());
    }

    #[test]
    fn generator_respects_budget() {
        let abc = ["a".to_string(), "b".to_string(), "c".to_string()];
        let tight = Budget { max_family: 5, ..Budget::default() };
        assert_eq!(generate_tests(&abc, &TestBounds::default(), &tight), Err(Error::FamilyTooLarge { limit: 5 }));
    }

    #[test]
    fn grid_must_hold_probabilities() {
        let bounds = TestBounds { grid: vec![r(3, 2)], ..TestBounds::default() };
        assert!(matches!(generate_tests(&["a".into()], &bounds, &Budget::default()), Err(Error::InvalidGrid(_))));
    }

    /// Tests that observe through a probabilistic choice can tell a
    /// probabilistic split from a nondeterministic one.
    #[test]
    fn variants_on_split_versus_choice() {
        let m = RawModel::new("m")
            .trans("p", "a", &[("x", r(1, 2)), ("y", r(1, 2))])
            .step("x", "b", "x1")
            .step("y", "c", "y1")
            .step("q", "a", "u")
            .step("q", "a", "v")
            .step("u", "b", "u1")
            .step("v", "c", "v1")
            .build()
            .unwrap();
        let (p, q) = (m.state("p").unwrap(), m.state("q").unwrap());
        let t = npt(RawModel::new("t").step("o", "a", "o1").step("o1", "b", "omega"));
        let family = TestFamily::new(vec![t], "hand").unwrap();
        let analysis = TestingAnalysis::new(&m, p, q, &family, &opts()).unwrap();
        for v in TestingVariant::ALL {
            let verdict = analysis.decide(v);
            assert!(!verdict.is_equivalent(), "{v:?}");
            assert!(verify_testing_witness(&m, p, q, v, &family, verdict.witness.as_ref().unwrap(), &opts()).unwrap());
        }
    }

    #[test]
    fn reflexive_over_generated_family() {
        let m = RawModel::new("m").step("s", "a", "u").trans("s", "a", &[("u", r(1, 3)), ("v", r(2, 3))]).step("v", "b", "w").build().unwrap();
        let family = generate_tests(&["a".into(), "b".into()], &TestBounds { max_depth: 2, ..TestBounds::default() }, &Budget::default()).unwrap();
        for s in m.state_ids() {
            let analysis = TestingAnalysis::new(&m, s, s, &family, &opts()).unwrap();
            for v in TestingVariant::ALL {
                assert!(analysis.decide(v).is_equivalent());
            }
        }
    }
}
