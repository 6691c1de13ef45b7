//! Reference semantics written against the model API only: path enumeration
//! for fully nondeterministic models, direct probability propagation for
//! fully probabilistic ones, and naive fixed points for bisimulation.

use std::collections::{BTreeMap, BTreeSet};

use spectra_core::testing::{Npt, OMEGA};
use spectra_core::{ActionId, ActionSet, Nplts, Rational, StateId};

pub type Word = Vec<ActionId>;
pub type Decorated = Vec<(ActionId, ActionSet)>;

/// One maximal-or-not path: its labels and the states it visits.
struct Path {
    labels: Word,
    states: Vec<StateId>,
}

/// Every finite path from `s`, including the empty one.
fn paths(m: &Nplts, s: StateId) -> Vec<Path> {
    let mut out = Vec::new();
    let mut stack = vec![Path { labels: vec![], states: vec![s] }];
    while let Some(p) = stack.pop() {
        let last = *p.states.last().unwrap();
        for &i in m.outgoing(last) {
            let t = m.transition(i);
            for (next, _) in t.target.entries() {
                let mut q = Path { labels: p.labels.clone(), states: p.states.clone() };
                q.labels.push(t.label);
                q.states.push(*next);
                stack.push(q);
            }
        }
        out.push(p);
    }
    out
}

fn subsets(universe: ActionSet) -> Vec<ActionSet> {
    let items: Vec<ActionId> = universe.iter().collect();
    (0..1u64 << items.len())
        .map(|mask| {
            let mut s = ActionSet::default();
            for (i, &a) in items.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.insert(a);
                }
            }
            s
        })
        .collect()
}

/// Refusable subsets of `universe` at a state.
fn refusals(m: &Nplts, s: StateId, universe: ActionSet) -> Vec<ActionSet> {
    let enabled = m.enabled_actions(s);
    subsets(universe).into_iter().filter(|f| f.intersection(enabled).is_empty()).collect()
}

fn decorations(m: &Nplts, p: &Path, universe: ActionSet, ready: bool) -> Vec<Decorated> {
    let mut acc: Vec<Decorated> = vec![vec![]];
    for (i, &a) in p.labels.iter().enumerate() {
        let s = p.states[i + 1];
        let options = if ready { vec![m.enabled_actions(s)] } else { refusals(m, s, universe) };
        acc = acc
            .into_iter()
            .flat_map(|d| {
                options.iter().map(move |&x| {
                    let mut d = d.clone();
                    d.push((a, x));
                    d
                })
            })
            .collect();
    }
    acc
}

/// Classical decorated-trace sets of a fully nondeterministic state.
#[derive(Debug, PartialEq, Eq)]
pub struct Classical {
    pub traces: BTreeSet<Word>,
    pub completed: BTreeSet<Word>,
    pub failures: BTreeSet<(Word, ActionSet)>,
    pub failure_traces: BTreeSet<Decorated>,
    pub readies: BTreeSet<(Word, ActionSet)>,
    pub ready_traces: BTreeSet<Decorated>,
}

pub fn classical(m: &Nplts, s: StateId, universe: ActionSet) -> Classical {
    let mut c = Classical {
        traces: BTreeSet::new(),
        completed: BTreeSet::new(),
        failures: BTreeSet::new(),
        failure_traces: BTreeSet::new(),
        readies: BTreeSet::new(),
        ready_traces: BTreeSet::new(),
    };
    for p in paths(m, s) {
        let last = *p.states.last().unwrap();
        c.traces.insert(p.labels.clone());
        if m.is_deadlocked(last) {
            c.completed.insert(p.labels.clone());
        }
        for f in refusals(m, last, universe) {
            c.failures.insert((p.labels.clone(), f));
        }
        c.readies.insert((p.labels.clone(), m.enabled_actions(last)));
        c.failure_traces.extend(decorations(m, &p, universe, false));
        c.ready_traces.extend(decorations(m, &p, universe, true));
    }
    c
}

/// Strong bisimilarity of an LTS (Dirac targets), by removing pairs from
/// the full relation until nothing changes.
pub fn lts_bisimilar(m: &Nplts, x: StateId, y: StateId) -> bool {
    let n = m.num_states();
    let mut rel = vec![vec![true; n]; n];
    let moves = |s: StateId| -> Vec<(ActionId, StateId)> {
        m.outgoing(s).iter().map(|&i| (m.transition(i).label, m.transition(i).target.entries()[0].0)).collect()
    };
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !rel[a][b] {
                    continue;
                }
                let (ma, mb) = (moves(StateId(a as u32)), moves(StateId(b as u32)));
                let covers = |from: &[(ActionId, StateId)], to: &[(ActionId, StateId)], flip: bool| {
                    from.iter().all(|&(l, s)| {
                        to.iter().any(|&(k, t)| {
                            k == l && if flip { rel[t.index()][s.index()] } else { rel[s.index()][t.index()] }
                        })
                    })
                };
                if !(covers(&ma, &mb, false) && covers(&mb, &ma, true)) {
                    rel[a][b] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel[x.index()][y.index()];
        }
    }
}

/// May and must passing of a test with Dirac targets by a fully
/// nondeterministic process, by exploring the synchronous product.
pub fn may_must(m: &Nplts, s: StateId, test: &Npt) -> (bool, bool) {
    let tm = test.model();
    let omega = tm.state(OMEGA).ok();
    fn go(m: &Nplts, tm: &Nplts, omega: Option<StateId>, s: StateId, t: StateId) -> (bool, bool) {
        if Some(t) == omega {
            return (true, true);
        }
        let mut moves = Vec::new();
        for &i in m.outgoing(s) {
            let pt = m.transition(i);
            for &j in tm.outgoing(t) {
                let tt = tm.transition(j);
                if m.action_name(pt.label) == tm.action_name(tt.label) {
                    moves.push((pt.target.entries()[0].0, tt.target.entries()[0].0));
                }
            }
        }
        if moves.is_empty() {
            return (false, false);
        }
        let results: Vec<(bool, bool)> = moves.into_iter().map(|(s2, t2)| go(m, tm, omega, s2, t2)).collect();
        (results.iter().any(|r| r.0), results.iter().all(|r| r.1))
    }
    go(m, tm, omega, s, test.initial())
}

/// Whether every state has at most one transition and every target is Dirac.
pub fn is_dirac_test(t: &Npt) -> bool {
    t.model().transitions().iter().all(|tr| tr.target.entries().len() == 1)
}

pub fn is_probabilistic_test(t: &Npt) -> bool {
    let m = t.model();
    m.state_ids().all(|s| m.outgoing(s).len() <= 1)
}

/// Decorated-trace distributions of a fully probabilistic state, computed by
/// pushing probability mass along the unique maximal resolution.
#[derive(Debug, PartialEq, Eq)]
pub struct Distributions {
    pub traces: BTreeMap<Word, Rational>,
    pub completed: BTreeMap<Word, Rational>,
    pub failures: BTreeMap<(Word, ActionSet), Rational>,
    pub failure_traces: BTreeMap<Decorated, Rational>,
    pub readies: BTreeMap<(Word, ActionSet), Rational>,
    pub ready_traces: BTreeMap<Decorated, Rational>,
}

fn add<K: Ord>(map: &mut BTreeMap<K, Rational>, k: K, p: Rational) {
    let e = map.entry(k).or_insert(Rational::ZERO);
    *e = *e + p;
}

pub fn distributions(m: &Nplts, s: StateId, universe: ActionSet) -> Distributions {
    let mut d = Distributions {
        traces: BTreeMap::new(),
        completed: BTreeMap::new(),
        failures: BTreeMap::new(),
        failure_traces: BTreeMap::new(),
        readies: BTreeMap::new(),
        ready_traces: BTreeMap::new(),
    };
    // (probability, labels, visited states)
    let mut stack = vec![(Rational::ONE, Vec::new(), vec![s])];
    while let Some((p, labels, states)) = stack.pop() {
        let last: StateId = *states.last().unwrap();
        let path = Path { labels: labels.clone(), states: states.clone() };
        add(&mut d.traces, labels.clone(), p);
        if m.is_deadlocked(last) {
            add(&mut d.completed, labels.clone(), p);
        }
        for f in refusals(m, last, universe) {
            add(&mut d.failures, (labels.clone(), f), p);
        }
        add(&mut d.readies, (labels.clone(), m.enabled_actions(last)), p);
        for f in decorations(m, &path, universe, false) {
            add(&mut d.failure_traces, f, p);
        }
        for r in decorations(m, &path, universe, true) {
            add(&mut d.ready_traces, r, p);
        }
        if let Some(&i) = m.outgoing(last).first() {
            let t = m.transition(i);
            for &(next, q) in t.target.entries() {
                let mut labels = labels.clone();
                labels.push(t.label);
                let mut states = states.clone();
                states.push(next);
                stack.push((p * q, labels, states));
            }
        }
    }
    d
}

/// Probabilistic bisimilarity of a fully probabilistic model: refine the
/// universal partition by (action, block-distribution) signatures.
pub fn fpr_bisimilar(m: &Nplts, x: StateId, y: StateId) -> bool {
    let n = m.num_states();
    let mut block = vec![0usize; n];
    loop {
        let signature = |s: usize| -> (usize, Option<(ActionId, BTreeMap<usize, Rational>)>) {
            let sig = m.outgoing(StateId(s as u32)).first().map(|&i| {
                let t = m.transition(i);
                let mut mass = BTreeMap::new();
                for &(u, p) in t.target.entries() {
                    add(&mut mass, block[u.index()], p);
                }
                (t.label, mass)
            });
            (block[s], sig)
        };
        let mut ids = BTreeMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let k = ids.len();
                *ids.entry(signature(s)).or_insert(k)
            })
            .collect();
        let count = |b: &[usize]| b.iter().collect::<BTreeSet<_>>().len();
        if count(&next) == count(&block) {
            return block[x.index()] == block[y.index()];
        }
        block = next;
    }
}

/// Success probability of a fully probabilistic test against a fully
/// probabilistic process.
pub fn success_probability(m: &Nplts, s: StateId, test: &Npt) -> Rational {
    let tm = test.model();
    let omega = tm.state(OMEGA).ok();
    fn go(m: &Nplts, tm: &Nplts, omega: Option<StateId>, s: StateId, t: StateId) -> Rational {
        if Some(t) == omega {
            return Rational::ONE;
        }
        let (Some(&i), Some(&j)) = (m.outgoing(s).first(), tm.outgoing(t).first()) else { return Rational::ZERO };
        let (pt, tt) = (m.transition(i), tm.transition(j));
        if m.action_name(pt.label) != tm.action_name(tt.label) {
            return Rational::ZERO;
        }
        let mut total = Rational::ZERO;
        for &(s2, p) in pt.target.entries() {
            for &(t2, q) in tt.target.entries() {
                total = total + p * q * go(m, tm, omega, s2, t2);
            }
        }
        total
    }
    go(m, tm, omega, s, test.initial())
}
