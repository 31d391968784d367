//! Decision procedures for condition (I), condition (*), irreducibility and
//! aperiodicity in past equivalence, and the gauge-invariant ideal lattice.
//!
//! Every check is run at the stabilized level `l0`. Past classes only get finer
//! as `l` grows and stop changing at `l0`, so a property of the form "for
//! every `l`" that is inherited by coarser levels holds for all `l` exactly
//! when it holds at `l0`. Certificates name points as `prefix cycle cycle ...`.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::pastsets::{PastSetError, PreClosure, RelationMonoid, TSet};
use crate::presentations::{Alphabet, Word};
use crate::tower::{Tower, TowerError};

/// Upper bound on the number of lattice elements enumerated by [`ideal_lattice`].
pub const LATTICE_CAP: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error(transparent)]
    PastSet(#[from] PastSetError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("the tower did not stabilize within {0} levels")]
    NotStabilized(usize),
    #[error("the ideal lattice has more than {0} elements")]
    LatticeTooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "star")]
    Star,
    #[serde(rename = "aperiodic")]
    Aperiodic,
    #[serde(rename = "irreducible")]
    Irreducible,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::I => "I",
            Condition::Star => "star",
            Condition::Aperiodic => "aperiodic",
            Condition::Irreducible => "irreducible",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    /// Only levels `0..=bound` were examined.
    BoundedSearch(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub prefix: Word,
    pub cycle: Word,
}

impl EventuallyPeriodic {
    pub fn format(&self, alphabet: &Alphabet) -> String {
        format!("{}({})^inf", alphabet.format_word(&self.prefix), alphabet.format_word(&self.cycle))
    }

    /// The first `n` symbols.
    pub fn take(&self, n: usize) -> Word {
        let mut out: Vec<usize> = self.prefix.symbols().iter().copied().take(n).collect();
        while out.len() < n {
            let need = n - out.len();
            out.extend(self.cycle.symbols().iter().copied().take(need));
        }
        Word::new(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Two distinct points in every class of the stabilized level.
    ClassPoints { level: usize, classes: Vec<(usize, [EventuallyPeriodic; 2])> },
    /// A class with exactly one point.
    UniquePoint { level: usize, class: usize, point: EventuallyPeriodic },
    /// For every infinite word class, an example word and a point class with the same past.
    WordClassesMatched { level: usize, matches: Vec<(Word, usize)> },
    /// A word whose past class is infinite and shared by no point.
    UnmatchedWordClass { level: usize, word: Word },
    /// Every class is reached from every point with words of length at most `bound`.
    Reachable { level: usize, bound: usize },
    /// No word sends `from` into class `to_class`.
    Unreachable { level: usize, from: EventuallyPeriodic, to_class: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub condition: Condition,
    pub status: Status,
    pub method: Method,
    pub certificate: Certificate,
}

impl Verdict {
    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let word = |w: &Word| alphabet.format_word(w);
        let point = |p: &EventuallyPeriodic| json!({"prefix": word(&p.prefix), "cycle": word(&p.cycle)});
        let certificate = match &self.certificate {
            Certificate::ClassPoints { level, classes } => json!({
                "kind": "class_points",
                "level": level,
                "classes": classes.iter().map(|(c, [x, y])| json!({"class": c, "points": [point(x), point(y)]})).collect::<Vec<_>>(),
            }),
            Certificate::UniquePoint { level, class, point: p } => json!({
                "kind": "unique_point", "level": level, "class": class, "point": point(p),
            }),
            Certificate::WordClassesMatched { level, matches } => json!({
                "kind": "word_classes_matched",
                "level": level,
                "matches": matches.iter().map(|(w, c)| json!({"word": word(w), "class": c})).collect::<Vec<_>>(),
            }),
            Certificate::UnmatchedWordClass { level, word: w } => json!({
                "kind": "unmatched_word_class", "level": level, "word": word(w),
            }),
            Certificate::Reachable { level, bound } => json!({
                "kind": "reachable", "level": level, "bound": bound,
            }),
            Certificate::Unreachable { level, from, to_class } => json!({
                "kind": "unreachable", "level": level, "from": point(from), "to_class": to_class,
            }),
        };
        let method = match self.method {
            Method::Exact => json!("exact"),
            Method::BoundedSearch(bound) => json!({"bounded_search": bound}),
        };
        json!({
            "condition": self.condition,
            "status": self.status,
            "method": method,
            "certificate": certificate,
        })
    }
}

fn tset_index(tower: &Tower, t: &TSet) -> usize {
    tower.tsets().binary_search(t).expect("T-set not realized")
}

/// Points whose T-set is `d`: either exactly one (returned as `Err`), or two
/// distinct witnesses.
fn points_with_tset(monoid: &RelationMonoid, d: &BitSet) -> Result<[EventuallyPeriodic; 2], EventuallyPeriodic> {
    let n = monoid.len();
    let is_final = |e: usize| monoid.on_cycle(e) && monoid.domain(e) == d;
    // good: an infinite path with eventual domain d starts here
    let mut preds = vec![Vec::new(); n];
    for e in 0..n {
        for a in 0..monoid.symbol_count() {
            if let Some(t) = monoid.step(e, a) {
                preds[t].push(e);
            }
        }
    }
    let mut good = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&e| is_final(e)).collect();
    for &e in &queue {
        good[e] = true;
    }
    while let Some(e) = queue.pop_front() {
        for &p in &preds[e] {
            if !good[p] {
                good[p] = true;
                queue.push_back(p);
            }
        }
    }
    assert!(good[0], "T-set is not realized");

    let good_symbols = |e: usize| -> Vec<usize> {
        (0..monoid.symbol_count())
            .filter(|&a| monoid.step(e, a).is_some_and(|t| good[t]))
            .collect()
    };
    // complete a point through good elements only
    let finish = |e: usize| -> (Word, Word) {
        let (end, path) = monoid.path_to(e, |x| good[x], is_final).expect("good element reaches a final one");
        (path, monoid.cycle_at(end).expect("final element is on a cycle"))
    };

    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(e) = queue.pop_front() {
        let symbols = good_symbols(e);
        if symbols.len() >= 2 {
            let prefix = monoid.word_to(e);
            let mut points = symbols[..2].iter().map(|&a| {
                let (path, cycle) = finish(monoid.step(e, a).unwrap());
                EventuallyPeriodic {
                    prefix: prefix.append(a).concat(&path),
                    cycle,
                }
            });
            return Ok([points.next().unwrap(), points.next().unwrap()]);
        }
        for a in symbols {
            let t = monoid.step(e, a).unwrap();
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }

    // a single good path from the identity: follow it until it repeats
    let mut order = vec![0usize];
    let mut position = HashMap::from([(0usize, 0usize)]);
    let mut symbols = Vec::new();
    loop {
        let e = *order.last().unwrap();
        let a = good_symbols(e)[0];
        symbols.push(a);
        let t = monoid.step(e, a).unwrap();
        if let Some(&i) = position.get(&t) {
            return Err(EventuallyPeriodic {
                prefix: Word::new(symbols[..i].to_vec()),
                cycle: Word::new(symbols[i..].to_vec()),
            });
        }
        position.insert(t, order.len());
        order.push(t);
    }
}

/// Condition (I): every past class contains at least two points.
pub fn condition_i(tower: &Tower) -> Result<Verdict, ConditionError> {
    condition_i_at(tower, tower.working_level())
}

/// Condition (I) read at one level only.
pub fn condition_i_at(tower: &Tower, level: usize) -> Result<Verdict, ConditionError> {
    let tower = &at_level(tower, level);
    let monoid = RelationMonoid::explore(tower.graph(), tower.monoid_cap())?;
    let mut witnesses = Vec::new();
    for (class, members) in tower.classes(level)?.into_iter().enumerate() {
        let points = if members.len() >= 2 {
            let p = |i: usize| {
                let (prefix, cycle) = monoid.witness_point(&tower.tsets()[members[i]]).unwrap();
                EventuallyPeriodic { prefix, cycle }
            };
            [p(0), p(1)]
        } else {
            match points_with_tset(&monoid, tower.tsets()[members[0]].vertices()) {
                Ok(points) => points,
                Err(point) => {
                    return Ok(Verdict {
                        condition: Condition::I,
                        status: Status::Fails,
                        method: Method::Exact,
                        certificate: Certificate::UniquePoint { level, class, point },
                    })
                }
            }
        };
        witnesses.push((class, points));
    }
    Ok(Verdict {
        condition: Condition::I,
        status: Status::Holds,
        method: exactness(tower, level),
        certificate: Certificate::ClassPoints {
            level,
            classes: witnesses,
        },
    })
}

fn exactness(tower: &Tower, level: usize) -> Method {
    match tower.stabilized_at() {
        Some(l0) if level >= l0 => Method::Exact,
        _ => Method::BoundedSearch(level),
    }
}

fn at_level(tower: &Tower, level: usize) -> Cow<'_, Tower> {
    if level <= tower.top_level() {
        Cow::Borrowed(tower)
    } else {
        let mut t = tower.clone();
        t.extend_to(level);
        Cow::Owned(t)
    }
}

/// Condition (*): every word class of infinite cardinality shares its past
/// with some point.
///
/// Words are tracked through the vertex set `Pre_u(V)` they can be read from,
/// and points through their T-set; both live in the `Pre`-closure of
/// `{V} ∪ T-sets`, which is partitioned by past sets exactly like the tower.
/// A word state has infinitely many words exactly when it is reached from `V`
/// along a path through a cycle.
pub fn condition_star(tower: &Tower) -> Result<Verdict, ConditionError> {
    star(tower, None)
}

/// Condition (*) read at one level only.
pub fn condition_star_at(tower: &Tower, level: usize) -> Result<Verdict, ConditionError> {
    star(tower, Some(level))
}

fn star(tower: &Tower, fixed: Option<usize>) -> Result<Verdict, ConditionError> {
    let g = tower.graph();
    let seeds = std::iter::once(g.all_vertices()).chain(tower.tsets().iter().map(|t| t.vertices().clone()));
    let closure = PreClosure::build(g, seeds, tower.monoid_cap())?;
    let n = closure.len();
    let sigma = g.symbol_count();

    // refine the combined partition until it stops changing
    let mut class = vec![0usize; n];
    let mut count = 1;
    let mut level = 0;
    let mut stable = false;
    while level < fixed.unwrap_or(tower.max_level()) {
        let keys: Vec<(usize, Vec<Option<usize>>)> = (0..n)
            .map(|s| (class[s], (0..sigma).map(|a| closure.pre(s, a).map(|p| class[p])).collect()))
            .collect();
        let mut distinct = keys.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = keys.iter().map(|k| distinct.binary_search(k).unwrap()).collect();
        if distinct.len() == count {
            stable = true;
            if fixed.is_none() {
                break;
            }
        }
        count = distinct.len();
        class = next;
        level += 1;
    }

    // word states reachable from V (state 0), with a shortest word for each
    let mut example: Vec<Option<Word>> = vec![None; n];
    example[0] = Some(Word::empty());
    let mut queue = VecDeque::from([0usize]);
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    for _ in 0..n {
        graph.add_node(());
    }
    while let Some(s) = queue.pop_front() {
        for a in 0..sigma {
            let Some(p) = closure.pre(s, a) else { continue };
            graph.add_edge(NodeIndex::new(s), NodeIndex::new(p), ());
            if example[p].is_none() {
                example[p] = Some(example[s].as_ref().unwrap().prepend(a));
                queue.push_back(p);
            }
        }
    }
    let mut pumped = vec![false; n];
    for scc in tarjan_scc(&graph) {
        let s = scc[0].index();
        let on_cycle = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if on_cycle && example[s].is_some() {
            for v in scc {
                pumped[v.index()] = true;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&s| pumped[s]).collect();
    while let Some(s) = queue.pop_front() {
        for a in 0..sigma {
            if let Some(p) = closure.pre(s, a) {
                if !pumped[p] {
                    pumped[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }

    // combined class -> tower class at the same level
    let mut t = tower.clone();
    t.extend_to(level);
    let mut point_class: HashMap<usize, usize> = HashMap::new();
    for (i, ts) in tower.tsets().iter().enumerate() {
        let s = closure.find(ts.vertices()).unwrap();
        point_class.insert(class[s], t.class_of(level, i)?);
    }

    let method = match fixed {
        Some(level) => exactness(&t, level),
        None if stable => Method::Exact,
        None => Method::BoundedSearch(level),
    };
    let mut matches: Vec<(Word, usize)> = Vec::new();
    let mut done = BTreeSet::new();
    for s in (0..n).filter(|&s| pumped[s]) {
        if !done.insert(class[s]) {
            continue;
        }
        let word = example[s].clone().unwrap();
        match point_class.get(&class[s]) {
            Some(&c) => matches.push((word, c)),
            None => {
                return Ok(Verdict {
                    condition: Condition::Star,
                    status: Status::Fails,
                    method: Method::Exact,
                    certificate: Certificate::UnmatchedWordClass { level, word },
                })
            }
        }
    }
    matches.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(Verdict {
        condition: Condition::Star,
        status: Status::Holds,
        method,
        certificate: Certificate::WordClassesMatched { level, matches },
    })
}

/// Shortest distances (in symbols prepended) from T-set `from` to every T-set.
fn distances(tower: &Tower, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; tower.tsets().len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(t) = queue.pop_front() {
        let d = dist[t].unwrap();
        for a in 0..tower.symbol_count() {
            if let Some(p) = tower.pre_index(t, a) {
                if dist[p].is_none() {
                    dist[p] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }
    }
    dist
}

// Ok(largest shortest distance) or Err((source T-set, unreachable class))
fn class_reachability(tower: &Tower, level: usize) -> Result<Result<usize, (usize, usize)>, TowerError> {
    let m = tower.m(level)?;
    let mut bound = 0;
    for from in 0..tower.tsets().len() {
        let dist = distances(tower, from);
        let mut best: Vec<Option<usize>> = vec![None; m];
        for (t, d) in dist.iter().enumerate() {
            if let Some(d) = *d {
                let c = tower.class_of(level, t)?;
                best[c] = Some(best[c].map_or(d, |b: usize| b.min(d)));
            }
        }
        for (c, b) in best.iter().enumerate() {
            match b {
                Some(b) => bound = bound.max(*b),
                None => return Ok(Err((from, c))),
            }
        }
    }
    Ok(Ok(bound))
}

fn reachability_verdict(tower: &Tower, level: usize, condition: Condition) -> Result<Verdict, ConditionError> {
    let tower = &at_level(tower, level);
    let (status, certificate, method) = match class_reachability(tower, level)? {
        Ok(bound) => (
            Status::Holds,
            Certificate::Reachable {
                level,
                bound: bound.max(1),
            },
            exactness(tower, level),
        ),
        Err((from, to_class)) => {
            let monoid = RelationMonoid::explore(tower.graph(), tower.monoid_cap())?;
            let (prefix, cycle) = monoid.witness_point(&tower.tsets()[from]).unwrap();
            (
                Status::Fails,
                Certificate::Unreachable {
                    level,
                    from: EventuallyPeriodic { prefix, cycle },
                    to_class,
                },
                Method::Exact,
            )
        }
    };
    Ok(Verdict {
        condition,
        status,
        method,
        certificate,
    })
}

/// Aperiodicity in past equivalence: one length bound `N` such that every
/// class is reached from every point by prepending a word of length at most
/// `N`. The empty word counts, so the reported `N` is at least 1.
pub fn aperiodic_past(tower: &Tower) -> Result<Verdict, ConditionError> {
    reachability_verdict(tower, tower.working_level(), Condition::Aperiodic)
}

pub fn aperiodic_past_at(tower: &Tower, level: usize) -> Result<Verdict, ConditionError> {
    reachability_verdict(tower, level, Condition::Aperiodic)
}

/// Irreducibility in past equivalence. Constant sequences `x_n = x` are
/// admissible in the definition, so it holds exactly when every class is
/// reached from every point by some prepended word; since there are finitely
/// many T-sets, "some word" and "some word of bounded length" agree and the
/// check coincides with the aperiodicity search.
pub fn irreducible_past(tower: &Tower) -> Result<Verdict, ConditionError> {
    reachability_verdict(tower, tower.working_level(), Condition::Irreducible)
}

pub fn irreducible_past_at(tower: &Tower, level: usize) -> Result<Verdict, ConditionError> {
    reachability_verdict(tower, level, Condition::Irreducible)
}

/// Lattice of unions of stabilized classes closed under the shift map, with
/// its Hasse diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealLatticeReport {
    pub level: usize,
    pub elements: Vec<Vec<usize>>,
    /// `(i, j)`: element `i` is covered by element `j`.
    pub order: Vec<(usize, usize)>,
}

pub fn ideal_lattice(tower: &Tower) -> Result<IdealLatticeReport, ConditionError> {
    let level = tower
        .stabilized_at()
        .ok_or(ConditionError::NotStabilized(tower.max_level()))?;
    let m = tower.m(level)?;
    // class c -> class of σ x for points x in c: T(σ x) = t' with Pre_a(t') = T(x)
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    for _ in 0..m {
        graph.add_node(());
    }
    for t2 in 0..tower.tsets().len() {
        for a in 0..tower.symbol_count() {
            if let Some(t) = tower.pre_index(t2, a) {
                let (from, to) = (tower.class_of(level, t)?, tower.class_of(level, t2)?);
                graph.update_edge(NodeIndex::new(from), NodeIndex::new(to), ());
            }
        }
    }
    let sccs: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
            v.sort();
            v
        })
        .collect();
    let closure = |mut set: BTreeSet<usize>| -> BTreeSet<usize> {
        let mut queue: Vec<usize> = set.iter().copied().collect();
        while let Some(c) = queue.pop() {
            for n in graph.neighbors(NodeIndex::new(c)) {
                if set.insert(n.index()) {
                    queue.push(n.index());
                }
            }
        }
        set
    };

    let mut elements: BTreeSet<BTreeSet<usize>> = BTreeSet::from([BTreeSet::new()]);
    let mut queue = vec![BTreeSet::new()];
    while let Some(s) = queue.pop() {
        for scc in &sccs {
            if s.contains(&scc[0]) {
                continue;
            }
            let mut bigger = s.clone();
            bigger.extend(scc.iter().copied());
            let bigger = closure(bigger);
            if !elements.contains(&bigger) {
                if elements.len() >= LATTICE_CAP {
                    return Err(ConditionError::LatticeTooLarge(LATTICE_CAP));
                }
                elements.insert(bigger.clone());
                queue.push(bigger);
            }
        }
    }
    let mut elements: Vec<Vec<usize>> = elements.into_iter().map(|s| s.into_iter().collect()).collect();
    elements.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    let index: HashMap<&Vec<usize>, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();

    // S covers S \ C when C is a component of S that no other class of S leads into
    let mut order = Vec::new();
    for (j, s) in elements.iter().enumerate() {
        for scc in &sccs {
            if !s.contains(&scc[0]) {
                continue;
            }
            let entered = s.iter().filter(|c| !scc.contains(c)).any(|&c| {
                graph
                    .neighbors(NodeIndex::new(c))
                    .any(|n| scc.contains(&n.index()))
            });
            if !entered {
                let smaller: Vec<usize> = s.iter().copied().filter(|c| !scc.contains(c)).collect();
                order.push((index[&smaller], j));
            }
        }
    }
    order.sort();
    Ok(IdealLatticeReport { level, elements, order })
}

/// Index of the tower class of a point given by its T-set.
pub fn class_of_tset(tower: &Tower, level: usize, t: &TSet) -> Result<usize, TowerError> {
    tower.class_of(level, tset_index(tower, t))
}
