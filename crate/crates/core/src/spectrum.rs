//! All twenty-six equivalences side by side: evaluation, the expected
//! relationships among them, random models and witness search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bisim::{decide_bisimilarity, verify_bisim_witness, BisimVariant};
use crate::model::{disjoint_union, ModelClass, Nplts, RawModel, RawTransition, StateId};
use crate::testing::{splits, verify_testing_witness, TestFamily, TestingAnalysis, TestingVariant};
use crate::trace::{verify_trace_witness, Approach, Semantics, TraceAnalysis};
use crate::verdict::Verdict;
use crate::{Error, Options, Rational, Result};

/// Which family an equivalence belongs to and its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Trace(Semantics, Approach),
    Testing(TestingVariant),
    Bisim(BisimVariant),
}

macro_rules! equivalences {
    ($($variant:ident = $name:literal => $kind:expr),* $(,)?) => {
        /// The twenty-six equivalences, in report order.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum EquivalenceId {
            $($variant),*
        }

        impl EquivalenceId {
            pub const ALL: [EquivalenceId; 26] = [$(EquivalenceId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(EquivalenceId::$variant => $name),*
                }
            }

            pub fn kind(self) -> Kind {
                use Approach::*;
                use Semantics::*;
                match self {
                    $(EquivalenceId::$variant => $kind),*
                }
            }
        }
    };
}

equivalences! {
    PtrDis = "ptr-dis" => Kind::Trace(Tr, Dis),
    Ptr = "ptr" => Kind::Trace(Tr, Single),
    PtrSupInf = "ptr-supinf" => Kind::Trace(Tr, SupInf),
    PctrDis = "pctr-dis" => Kind::Trace(CTr, Dis),
    Pctr = "pctr" => Kind::Trace(CTr, Single),
    PctrSupInf = "pctr-supinf" => Kind::Trace(CTr, SupInf),
    PfDis = "pf-dis" => Kind::Trace(F, Dis),
    Pf = "pf" => Kind::Trace(F, Single),
    PfSupInf = "pf-supinf" => Kind::Trace(F, SupInf),
    PftrDis = "pftr-dis" => Kind::Trace(FTr, Dis),
    Pftr = "pftr" => Kind::Trace(FTr, Single),
    PftrSupInf = "pftr-supinf" => Kind::Trace(FTr, SupInf),
    PrDis = "pr-dis" => Kind::Trace(R, Dis),
    Pr = "pr" => Kind::Trace(R, Single),
    PrSupInf = "pr-supinf" => Kind::Trace(R, SupInf),
    PrtrDis = "prtr-dis" => Kind::Trace(RTr, Dis),
    Prtr = "prtr" => Kind::Trace(RTr, Single),
    PrtrSupInf = "prtr-supinf" => Kind::Trace(RTr, SupInf),
    PteSupInf = "pte-supinf" => Kind::Testing(TestingVariant::SupInf),
    PteAe = "pte-ae" => Kind::Testing(TestingVariant::AllExists),
    PteTbtDis = "pte-tbt-dis" => Kind::Testing(TestingVariant::TbtDis),
    PteTbt = "pte-tbt" => Kind::Testing(TestingVariant::Tbt),
    PteTbtSupInf = "pte-tbt-supinf" => Kind::Testing(TestingVariant::TbtSupInf),
    PbDis = "pb-dis" => Kind::Bisim(BisimVariant::Dis),
    Pb = "pb" => Kind::Bisim(BisimVariant::Group),
    PbSupInf = "pb-supinf" => Kind::Bisim(BisimVariant::SupInf),
}

impl EquivalenceId {
    pub fn trace(sem: Semantics, app: Approach) -> EquivalenceId {
        EquivalenceId::ALL.into_iter().find(|id| id.kind() == Kind::Trace(sem, app)).expect("every pair is listed")
    }

    /// Testing verdicts only speak for the test family they were computed with.
    pub fn is_family_relative(self) -> bool {
        matches!(self.kind(), Kind::Testing(_))
    }
}

impl fmt::Display for EquivalenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for an unknown equivalence identifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownEquivalence(pub String);

impl fmt::Display for UnknownEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown equivalence `{}`", self.0)
    }
}

impl FromStr for EquivalenceId {
    type Err = UnknownEquivalence;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        EquivalenceId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| UnknownEquivalence(s.to_string()))
    }
}

/// Decides one equivalence. Testing equivalences need a family.
pub fn decide(id: EquivalenceId, m: &Nplts, s1: StateId, s2: StateId, family: Option<&TestFamily>, opts: &Options) -> Result<Verdict> {
    match id.kind() {
        Kind::Trace(sem, app) => Ok(TraceAnalysis::new(m, s1, s2, opts)?.decide(sem, app)),
        Kind::Testing(v) => {
            let family = family.ok_or(Error::EmptyFamily)?;
            Ok(TestingAnalysis::new(m, s1, s2, family, opts)?.decide(v))
        }
        Kind::Bisim(v) => Ok(decide_bisimilarity(m, s1, s2, v, &opts.budget)?.verdict),
    }
}

/// Re-checks the witness of a distinguished verdict from scratch.
/// Equivalent verdicts carry nothing to check and verify trivially.
pub fn verify(
    id: EquivalenceId,
    m: &Nplts,
    s1: StateId,
    s2: StateId,
    family: Option<&TestFamily>,
    verdict: &Verdict,
    opts: &Options,
) -> Result<bool> {
    let Some(w) = &verdict.witness else { return Ok(verdict.is_equivalent()) };
    match id.kind() {
        Kind::Trace(sem, app) => verify_trace_witness(m, s1, s2, sem, app, w, opts),
        Kind::Testing(v) => verify_testing_witness(m, s1, s2, v, family.ok_or(Error::EmptyFamily)?, w, opts),
        Kind::Bisim(v) => {
            let out = decide_bisimilarity(m, s1, s2, v, &opts.budget)?;
            verify_bisim_witness(m, s1, s2, v, &out.partition, w, &opts.budget)
        }
    }
}

/// Verdicts of all equivalences on one pair, in report order. Budget
/// errors are kept per equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub results: BTreeMap<EquivalenceId, core::result::Result<Verdict, Error>>,
    /// Class of the part of the model reachable from the pair.
    pub class: ModelClass,
}

impl Evaluation {
    pub fn verdict(&self, id: EquivalenceId) -> Option<&Verdict> {
        self.results.get(&id).and_then(|r| r.as_ref().ok())
    }

    pub fn is_equivalent(&self, id: EquivalenceId) -> Option<bool> {
        self.verdict(id).map(Verdict::is_equivalent)
    }
}

/// Runs all twenty-six equivalences. Without a family, the testing
/// equivalences report [`Error::EmptyFamily`].
pub fn evaluate_all(m: &Nplts, s1: StateId, s2: StateId, family: Option<&TestFamily>, opts: &Options) -> Evaluation {
    let mut results = BTreeMap::new();
    match TraceAnalysis::new(m, s1, s2, opts) {
        Ok(mut analysis) => {
            for sem in Semantics::ALL {
                for app in Approach::ALL {
                    results.insert(EquivalenceId::trace(sem, app), Ok(analysis.decide(sem, app)));
                }
            }
        }
        Err(e) => {
            for sem in Semantics::ALL {
                for app in Approach::ALL {
                    results.insert(EquivalenceId::trace(sem, app), Err(e.clone()));
                }
            }
        }
    }
    let testing = match family {
        Some(f) => TestingAnalysis::new(m, s1, s2, f, opts),
        None => Err(Error::EmptyFamily),
    };
    for id in EquivalenceId::ALL {
        match id.kind() {
            Kind::Testing(v) => {
                results.insert(id, testing.as_ref().map(|a| a.decide(v)).map_err(Clone::clone));
            }
            Kind::Bisim(v) => {
                results.insert(id, decide_bisimilarity(m, s1, s2, v, &opts.budget).map(|o| o.verdict));
            }
            Kind::Trace(..) => {}
        }
    }
    Evaluation { results, class: m.restrict(&[s1, s2]).classify() }
}

/// Model class an edge is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Any,
    FullyNondeterministic,
    FullyProbabilistic,
}

impl Scope {
    pub fn applies(self, class: &ModelClass) -> bool {
        match self {
            Scope::Any => true,
            Scope::FullyNondeterministic => class.fully_nondeterministic,
            Scope::FullyProbabilistic => class.fully_probabilistic,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Any => "any",
            Scope::FullyNondeterministic => "fnd",
            Scope::FullyProbabilistic => "fpr",
        }
    }
}

/// "`finer` equivalent implies `coarser` equivalent" on models in `scope`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub finer: EquivalenceId,
    pub coarser: EquivalenceId,
    pub scope: Scope,
    /// Whether the edge is one direction of a coincidence.
    pub equality: bool,
    /// Whether a violation counts even though testing verdicts are only
    /// relative to a finite family.
    pub binding: bool,
    pub tag: &'static str,
}

impl Edge {
    /// `false` exactly when the verdicts contradict the edge.
    pub fn holds(&self, e: &Evaluation) -> bool {
        !(e.is_equivalent(self.finer) == Some(true) && e.is_equivalent(self.coarser) == Some(false))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=>{}", self.finer, self.coarser)
    }
}

/// The expected relationships among the equivalences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumExpectation {
    pub edges: Vec<Edge>,
    /// Pairs expected to be incomparable; checked through witnesses only.
    pub incomparable: Vec<(EquivalenceId, EquivalenceId)>,
}

/// Whether "`finer` equivalent on every test implies `coarser` equivalent
/// on that same test", so that the edge also holds relative to any family.
fn per_test(finer: TestingVariant, coarser: TestingVariant) -> bool {
    use TestingVariant::*;
    matches!(
        (finer, coarser),
        (AllExists, SupInf) | (TbtDis, AllExists) | (TbtDis, Tbt) | (Tbt, TbtSupInf) | (TbtDis, TbtSupInf)
    )
}

fn binding(finer: EquivalenceId, coarser: EquivalenceId) -> bool {
    match (finer.kind(), coarser.kind()) {
        (Kind::Testing(a), Kind::Testing(b)) => per_test(a, b),
        (Kind::Testing(_), _) => false,
        _ => true,
    }
}

impl Default for SpectrumExpectation {
    fn default() -> Self {
        use EquivalenceId::*;
        let mut edges = Vec::new();
        let mut imply = |finer, coarser, scope, tag| {
            edges.push(Edge { finer, coarser, scope, equality: false, binding: binding(finer, coarser), tag });
        };
        let trio = |sem| [Approach::Dis, Approach::Single, Approach::SupInf].map(|a| EquivalenceId::trace(sem, a));
        for sem in Semantics::ALL {
            let [d, s, x] = trio(sem);
            imply(d, s, Scope::Any, "approach-order");
            imply(s, x, Scope::Any, "approach-order");
        }
        for (app, tag) in [
            (Approach::Dis, "semantics-order-dis"),
            (Approach::Single, "semantics-order"),
            (Approach::SupInf, "semantics-order-supinf"),
        ] {
            let chain = [Semantics::FTr, Semantics::F, Semantics::CTr, Semantics::Tr].map(|s| EquivalenceId::trace(s, app));
            for w in chain.windows(2) {
                imply(w[0], w[1], Scope::Any, tag);
            }
        }
        imply(PteAe, PteSupInf, Scope::Any, "testing-supinf-order");
        imply(PteSupInf, PteTbtSupInf, Scope::Any, "testing-supinf-order");
        imply(PteTbtDis, PteTbt, Scope::Any, "testing-tbt-order");
        imply(PteTbt, PteTbtSupInf, Scope::Any, "testing-tbt-order");
        imply(PteTbtDis, PrtrDis, Scope::Any, "testing-ready-trace");
        imply(Pf, PteTbt, Scope::Any, "testing-failure");
        imply(PteTbt, Ptr, Scope::Any, "testing-failure");
        imply(PfSupInf, PteTbtSupInf, Scope::Any, "testing-failure-supinf");
        imply(PteTbtSupInf, PtrSupInf, Scope::Any, "testing-failure-supinf");
        imply(PbDis, Pb, Scope::Any, "bisim-order");
        imply(Pb, PbSupInf, Scope::Any, "bisim-order");
        imply(PbDis, PteTbtDis, Scope::Any, "bisim-testing");

        let mut equal = |a: EquivalenceId, b: EquivalenceId, scope, tag| {
            edges.push(Edge { finer: a, coarser: b, scope, equality: true, binding: binding(a, b), tag });
            edges.push(Edge { finer: b, coarser: a, scope, equality: true, binding: binding(b, a), tag });
        };
        equal(PrtrDis, PftrDis, Scope::Any, "ready-failure-trace-dis");
        equal(PrDis, PfDis, Scope::Any, "ready-failure-dis");
        equal(PteAe, PteTbtDis, Scope::Any, "testing-tbt-order");
        for (scope, suffix) in [(Scope::FullyNondeterministic, "fnd"), (Scope::FullyProbabilistic, "fpr")] {
            let trace_tag = if suffix == "fnd" { "trace-fnd" } else { "trace-fpr" };
            for sem in Semantics::ALL {
                let [d, s, x] = trio(sem);
                equal(d, s, scope, trace_tag);
                equal(s, x, scope, trace_tag);
            }
            let bisim_tag = if suffix == "fnd" { "bisim-fnd" } else { "bisim-fpr" };
            equal(PbDis, Pb, scope, bisim_tag);
            equal(Pb, PbSupInf, scope, bisim_tag);
        }
        equal(PteTbt, PteTbtSupInf, Scope::FullyNondeterministic, "testing-fnd");
        for w in [PteSupInf, PteAe, PteTbtDis, PteTbt, PteTbtSupInf].windows(2) {
            equal(w[0], w[1], Scope::FullyProbabilistic, "testing-fpr");
        }

        let incomparable = vec![(Pb, Ptr), (Pr, Pf), (PteSupInf, Pf)];
        SpectrumExpectation { edges, incomparable }
    }
}

impl SpectrumExpectation {
    /// Edges in scope for a model class.
    pub fn edges_for<'a>(&'a self, class: &'a ModelClass) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.scope.applies(class))
    }
}

/// Binding edges in scope that the verdicts contradict. Equivalences that
/// ended in an error never count.
pub fn check_consistency(e: &Evaluation, expectation: &SpectrumExpectation) -> Vec<Edge> {
    expectation.edges_for(&e.class).filter(|edge| edge.binding && !edge.holds(e)).copied().collect()
}

/// Edges in scope that the verdicts contradict, binding or not.
pub fn all_contradictions(e: &Evaluation, expectation: &SpectrumExpectation) -> Vec<Edge> {
    expectation.edges_for(&e.class).filter(|edge| !edge.holds(e)).copied().collect()
}

/// Implications observed on a corpus: `(a, b)` such that every pair that is
/// `a`-equivalent is also `b`-equivalent, after transitive reduction.
pub fn observed_implications(evaluations: &[Evaluation]) -> Vec<(EquivalenceId, EquivalenceId)> {
    let ids = EquivalenceId::ALL;
    let implies = |a: EquivalenceId, b: EquivalenceId| {
        evaluations.iter().all(|e| e.is_equivalent(a) != Some(true) || e.is_equivalent(b) != Some(false))
    };
    let mut rel = BTreeSet::new();
    for a in ids {
        for b in ids {
            if a != b && implies(a, b) {
                rel.insert((a, b));
            }
        }
    }
    // drop edges implied by a path through an intermediate relation that is
    // not equivalent to either end
    let mut reduced = Vec::new();
    for &(a, b) in &rel {
        let mutual = |x, y| rel.contains(&(x, y)) && rel.contains(&(y, x));
        let via = ids.iter().any(|&c| {
            c != a && c != b && rel.contains(&(a, c)) && rel.contains(&(c, b)) && !mutual(a, c) && !mutual(c, b)
        });
        if !via {
            reduced.push((a, b));
        }
    }
    reduced
}

/// Constraint on the shape of generated models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassConstraint {
    Any,
    /// Only Dirac targets.
    FullyNondeterministic,
    /// At most one transition per state.
    FullyProbabilistic,
}

/// Parameters of [`random_model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Most states in a model; the actual count is drawn from `1..=states`.
    pub states: usize,
    pub max_out_degree: usize,
    pub max_support: usize,
    pub grid: Vec<Rational>,
    pub alphabet: Vec<String>,
    pub class: ClassConstraint,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            states: 5,
            max_out_degree: 2,
            max_support: 2,
            grid: vec![Rational::ONE, Rational::new(1, 2), Rational::new(1, 3), Rational::new(2, 3)],
            alphabet: vec!["a".into(), "b".into()],
            class: ClassConstraint::Any,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig { seed, ..self.clone() }
    }
}

/// A random acyclic model with initial state `s0`, restricted to the states
/// reachable from it. Deterministic per configuration.
pub fn random_model(cfg: &GenConfig) -> Nplts {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = rng.gen_range(1..=cfg.states.max(1));
    generate(cfg, n, &mut rng).restrict(&[StateId(0)])
}

/// Random acyclic model over states `s0..s{n-1}`; transitions only go from
/// lower to higher indices.
fn generate(cfg: &GenConfig, n: usize, rng: &mut ChaCha8Rng) -> Nplts {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let splits = splits(&cfg.grid);
    let mut raw = RawModel::new(format!("random{}", cfg.seed)).alphabet(cfg.alphabet.iter().cloned());
    for name in &names {
        raw = raw.state(name.clone());
    }
    let max_out = match cfg.class {
        ClassConstraint::FullyProbabilistic => cfg.max_out_degree.min(1),
        _ => cfg.max_out_degree,
    };
    let max_support = match cfg.class {
        ClassConstraint::FullyNondeterministic => 1,
        _ => cfg.max_support.max(1),
    };
    let mut seen = BTreeSet::new();
    for i in 0..n.saturating_sub(1) {
        let later = n - 1 - i;
        // most states get at least one transition, so models are not trivial
        let least = usize::from(max_out > 0 && rng.gen_bool(0.75));
        for _ in 0..rng.gen_range(least..=max_out) {
            if cfg.alphabet.is_empty() {
                break;
            }
            let label = cfg.alphabet[rng.gen_range(0..cfg.alphabet.len())].clone();
            let usable: Vec<&Vec<Rational>> = splits.iter().filter(|s| s.len() <= max_support.min(later)).collect();
            let Some(split) = usable.choose(rng) else { continue };
            let mut targets: Vec<usize> = (i + 1..n).collect();
            targets.shuffle(rng);
            let mut target: Vec<(String, Rational)> =
                split.iter().zip(&targets).map(|(&p, &t)| (names[t].clone(), p)).collect();
            target.sort();
            if seen.insert((i, label.clone(), target.clone())) {
                raw.transitions.push(RawTransition { source: names[i].clone(), label, target });
            }
        }
    }
    raw.build().expect("generated models are valid")
}

fn fresh(raw: &RawModel, stem: &str) -> String {
    (0..).map(|k| format!("{stem}{k}")).find(|n| !raw.states.contains(n)).expect("names are unbounded")
}

/// A small edit of a model that often keeps coarse equivalences and breaks
/// finer ones. Tries a few edits and falls back to an unchanged copy when
/// none applies within the class constraint.
fn mutate(m: &Nplts, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Nplts {
    for _ in 0..8 {
        let mut raw = m.to_raw();
        if !edit(&mut raw, rng) {
            continue;
        }
        raw.transitions.sort_by(|a, b| (&a.source, &a.label, &a.target).cmp(&(&b.source, &b.label, &b.target)));
        raw.transitions.dedup();
        if let Ok(out) = raw.build() {
            let out = out.restrict(&[StateId(0)]);
            if fits(&out, cfg.class) && out.to_raw().transitions != m.to_raw().transitions {
                return out;
            }
        }
    }
    m.clone()
}

fn dirac(state: &str) -> Vec<(String, Rational)> {
    vec![(state.to_string(), Rational::ONE)]
}

fn edit(raw: &mut RawModel, rng: &mut ChaCha8Rng) -> bool {
    let ts = raw.transitions.clone();
    let outgoing = |s: &str| ts.iter().filter(|u| u.source == s).count();
    match rng.gen_range(0..6) {
        // an extra branch into a deadlock under an action already offered
        0 => {
            let Some(t) = ts.choose(rng) else { return false };
            let d = fresh(raw, "d");
            raw.states.push(d.clone());
            raw.transitions.push(RawTransition { source: t.source.clone(), label: t.label.clone(), target: dirac(&d) });
        }
        // resolve a probabilistic choice nondeterministically as well
        1 => {
            let mixed: Vec<&RawTransition> = ts.iter().filter(|t| t.target.len() > 1).collect();
            let Some(t) = mixed.choose(rng) else { return false };
            for (x, _) in &t.target {
                raw.transitions.push(RawTransition { source: t.source.clone(), label: t.label.clone(), target: dirac(x) });
            }
        }
        // a.(b + c) becomes a.b + a.c
        2 => {
            let spread: Vec<usize> =
                (0..ts.len()).filter(|&i| ts[i].target.len() == 1 && outgoing(&ts[i].target[0].0) > 1).collect();
            let Some(&i) = spread.choose(rng) else { return false };
            let t = raw.transitions.remove(i);
            for u in ts.iter().filter(|u| u.source == t.target[0].0) {
                let copy = fresh(raw, "c");
                raw.states.push(copy.clone());
                raw.transitions.push(RawTransition { source: copy.clone(), ..u.clone() });
                raw.transitions.push(RawTransition { source: t.source.clone(), label: t.label.clone(), target: dirac(&copy) });
            }
        }
        // a.b + a.c becomes a.(b + c)
        3 => {
            let pairs = same_label_dirac_pairs(&ts);
            let Some(&(i, j)) = pairs.choose(rng) else { return false };
            let u = fresh(raw, "u");
            raw.states.push(u.clone());
            for k in [i, j] {
                for v in ts.iter().filter(|v| v.source == ts[k].target[0].0) {
                    raw.transitions.push(RawTransition { source: u.clone(), ..v.clone() });
                }
            }
            raw.transitions.retain(|t| *t != ts[i] && *t != ts[j]);
            raw.transitions.push(RawTransition { source: ts[i].source.clone(), label: ts[i].label.clone(), target: dirac(&u) });
        }
        // two equally labeled choices become also a fair coin between them
        4 => {
            let pairs = same_label_dirac_pairs(&ts);
            let Some(&(i, j)) = pairs.choose(rng) else { return false };
            let half = Rational::new(1, 2);
            let mut target = vec![(ts[i].target[0].0.clone(), half), (ts[j].target[0].0.clone(), half)];
            target.sort();
            raw.transitions.push(RawTransition { source: ts[i].source.clone(), label: ts[i].label.clone(), target });
        }
        // a.(b.x (+) b.y) becomes a.b.x (+) a.b.y: the coin moves up one step
        _ => {
            let liftable: Vec<usize> = (0..ts.len())
                .filter(|&i| {
                    ts[i].target.len() == 1 && {
                        let mid = &ts[i].target[0].0;
                        outgoing(mid) == 1 && ts.iter().any(|u| &u.source == mid && u.target.len() > 1)
                    }
                })
                .collect();
            let Some(&i) = liftable.choose(rng) else { return false };
            let t = raw.transitions.remove(i);
            let inner = ts.iter().find(|u| u.source == t.target[0].0).expect("checked").clone();
            let mut target = Vec::new();
            for (x, p) in &inner.target {
                let mid = fresh(raw, "l");
                raw.states.push(mid.clone());
                raw.transitions.push(RawTransition { source: mid.clone(), label: inner.label.clone(), target: dirac(x) });
                target.push((mid, *p));
            }
            raw.transitions.push(RawTransition { source: t.source.clone(), label: t.label.clone(), target });
        }
    }
    true
}

fn same_label_dirac_pairs(ts: &[RawTransition]) -> Vec<(usize, usize)> {
    (0..ts.len())
        .flat_map(|i| (i + 1..ts.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            ts[i].source == ts[j].source
                && ts[i].label == ts[j].label
                && ts[i].target.len() == 1
                && ts[j].target.len() == 1
                && ts[i].target[0].0 != ts[j].target[0].0
        })
        .collect()
}

fn fits(m: &Nplts, class: ClassConstraint) -> bool {
    let c = m.classify();
    match class {
        ClassConstraint::Any => true,
        ClassConstraint::FullyNondeterministic => c.fully_nondeterministic,
        ClassConstraint::FullyProbabilistic => c.fully_probabilistic,
    }
}

/// Two states to compare, in one model. Depending on the seed the states
/// are the roots of two independent random models, two roots sharing their
/// successors, or a random model and an edited copy of it.
pub fn random_pair(cfg: &GenConfig) -> (Nplts, StateId, StateId) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0f_9a1f);
    match rng.gen_range(0..3) {
        0 => {
            let left = random_model(&cfg.with_seed(cfg.seed.wrapping_mul(2)));
            let right = random_model(&cfg.with_seed(cfg.seed.wrapping_mul(2).wrapping_add(1)));
            let (m, offset) = disjoint_union(&left, &right);
            (m, StateId(0), StateId(offset))
        }
        1 => {
            let n = rng.gen_range(2..=cfg.states.max(2) + 1);
            let m = generate(cfg, n, &mut rng).restrict(&[StateId(0), StateId(1)]);
            let (s0, s1) = (m.state("s0").expect("kept"), m.state("s1").expect("kept"));
            (m, s0, s1)
        }
        _ => {
            let left = random_model(cfg);
            let mut right = mutate(&left, cfg, &mut rng);
            if rng.gen_bool(0.5) {
                right = mutate(&right, cfg, &mut rng);
            }
            let (m, offset) = disjoint_union(&left, &right);
            (m, StateId(0), StateId(offset))
        }
    }
}

/// A pair separating two equivalences, with both verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub model: Nplts,
    pub left: StateId,
    pub right: StateId,
    /// Verdict of the finer equivalence, with its witness.
    pub finer: Verdict,
    pub seed: u64,
    pub attempts: u64,
}

/// Searches random pairs for one that is `coarser`-equivalent but
/// `finer`-distinguished. Seeds `cfg.seed, cfg.seed + 1, ...` are tried in
/// order; pairs exceeding a budget are skipped.
pub fn search_witness(
    finer: EquivalenceId,
    coarser: EquivalenceId,
    cfg: &GenConfig,
    attempts: u64,
    family: Option<&TestFamily>,
    opts: &Options,
) -> Result<Separation> {
    for i in 0..attempts {
        let seed = cfg.seed.wrapping_add(i);
        let (m, s1, s2) = random_pair(&cfg.with_seed(seed));
        let Ok(c) = decide(coarser, &m, s1, s2, family, opts) else { continue };
        if !c.is_equivalent() {
            continue;
        }
        let Ok(f) = decide(finer, &m, s1, s2, family, opts) else { continue };
        if f.is_equivalent() || !verify(finer, &m, s1, s2, family, &f, opts)? {
            continue;
        }
        return Ok(Separation { model: m, left: s1, right: s2, finer: f, seed, attempts: i + 1 });
    }
    Err(Error::SearchExhausted { attempts })
}
