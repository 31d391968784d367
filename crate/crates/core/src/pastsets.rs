//! Word relations, T-sets and past sets.
//!
//! For a point `x` of the presented shift, `T(x)` is the set of graph vertices
//! from which a path labeled `x` starts. A word `u` may precede `x` exactly when
//! `Pre_u(T(x))` is nonempty, and `T(u x) = Pre_u(T(x))`, so the past set
//! `P_l(x)` is a function of `T(x)` alone. There are finitely many T-sets, which
//! turns past equivalence into a finite computation.
//!
//! The realized T-sets are found on the reachable relation monoid `{R_u}`:
//! `dom(R_u)` can only shrink as `u` grows, so along a point it settles on a
//! final value, and that value is `T(x)`. A vertex set `D` is realized exactly
//! when some reachable relation with domain `D` lies on a cycle of the step
//! graph `r -> r . E_a` (all relations on such a cycle share one domain).

use std::collections::{HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::presentations::{LabeledGraph, Word};

pub const DEFAULT_MONOID_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PastSetError {
    #[error("relation monoid exceeded {0} elements")]
    MonoidBudgetExceeded(usize),
    #[error("word is not in the language")]
    WordNotInLanguage,
}

/// Boolean `V x V` path relation of a word: `(v, w)` is present when a path
/// labeled by the word runs from `v` to `w`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<BitSet>,
}

impl Relation {
    pub fn identity(n: usize) -> Self {
        Relation {
            rows: (0..n).map(|v| BitSet::from_indices(n, [v])).collect(),
        }
    }

    pub fn of_symbol(g: &LabeledGraph, a: usize) -> Self {
        Relation {
            rows: (0..g.vertex_count()).map(|v| g.successors_of(v, a).clone()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: usize, w: usize) -> bool {
        self.rows[v].contains(w)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(BitSet::is_empty)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(v, row)| row.iter().map(move |w| (v, w)))
            .collect()
    }

    /// Boolean product: first `self`, then `other`.
    pub fn then(&self, other: &Relation) -> Relation {
        let n = self.rows.len();
        Relation {
            rows: self
                .rows
                .iter()
                .map(|row| {
                    let mut out = BitSet::new(n);
                    for u in row.iter() {
                        out.union_with(&other.rows[u]);
                    }
                    out
                })
                .collect(),
        }
    }

    /// `self` followed by one `a`-edge.
    pub fn then_symbol(&self, g: &LabeledGraph, a: usize) -> Relation {
        let n = self.rows.len();
        Relation {
            rows: self
                .rows
                .iter()
                .map(|row| {
                    let mut out = BitSet::new(n);
                    for u in row.iter() {
                        out.union_with(g.successors_of(u, a));
                    }
                    out
                })
                .collect(),
        }
    }

    /// Vertices with at least one outgoing pair.
    pub fn domain(&self) -> BitSet {
        let mut d = BitSet::new(self.rows.len());
        for (v, row) in self.rows.iter().enumerate() {
            if !row.is_empty() {
                d.insert(v);
            }
        }
        d
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

pub fn word_relation(g: &LabeledGraph, u: &Word) -> Relation {
    u.symbols()
        .iter()
        .fold(Relation::identity(g.vertex_count()), |r, &a| r.then_symbol(g, a))
}

/// Set of vertices from which a given infinite label sequence can be read.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TSet(BitSet);

impl TSet {
    pub fn new(vertices: BitSet) -> Self {
        TSet(vertices)
    }

    pub fn vertices(&self) -> &BitSet {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for TSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{:?}", self.0)
    }
}

/// `T(a x)` from `T(x)`; empty when `a x` is not a point.
pub fn pre(g: &LabeledGraph, t: &TSet, a: usize) -> TSet {
    TSet(g.predecessors(&t.0, a))
}

/// Words of length at most `level` that may precede a point (or a word),
/// stored per exact length. Always contains the empty word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PastSet {
    level: usize,
    by_length: Vec<Vec<Word>>,
}

impl PastSet {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Words of exactly `k` symbols, sorted.
    pub fn of_length(&self, k: usize) -> &[Word] {
        self.by_length.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.of_length(w.len()).binary_search(w).is_ok()
    }

    pub fn len(&self) -> usize {
        self.by_length.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length-major, then lexicographic.
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.by_length.iter().flatten()
    }
}

/// All `u` with `|u| <= level` and `Pre_u(start)` nonempty.
pub fn past_words(g: &LabeledGraph, start: &BitSet, level: usize) -> PastSet {
    let mut by_length = vec![vec![Word::empty()]];
    let mut frontier = vec![(Word::empty(), start.clone())];
    for _ in 0..level {
        let mut next = Vec::new();
        for (w, s) in &frontier {
            for a in 0..g.symbol_count() {
                let p = g.predecessors(s, a);
                if !p.is_empty() {
                    next.push((w.prepend(a), p));
                }
            }
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        by_length.push(next.iter().map(|(w, _)| w.clone()).collect());
        frontier = next;
    }
    PastSet { level, by_length }
}

/// Like [`past_words`], but stops once more than `cap` words have been
/// produced. The flag reports whether the returned set is complete.
pub fn past_words_capped(g: &LabeledGraph, start: &BitSet, level: usize, cap: usize) -> (PastSet, bool) {
    let mut by_length = vec![vec![Word::empty()]];
    let mut total = 1;
    let mut frontier = vec![(Word::empty(), start.clone())];
    for _ in 0..level {
        let mut next = Vec::new();
        for (w, s) in &frontier {
            for a in 0..g.symbol_count() {
                let p = g.predecessors(s, a);
                if !p.is_empty() {
                    next.push((w.prepend(a), p));
                }
            }
        }
        total += next.len();
        if total > cap {
            return (PastSet { level, by_length }, false);
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        by_length.push(next.iter().map(|(w, _)| w.clone()).collect());
        frontier = next;
    }
    (PastSet { level, by_length }, true)
}

/// Number of words of each length `0..=level` in the past of `start`,
/// saturating at `u64::MAX`.
pub fn past_word_counts(g: &LabeledGraph, start: &BitSet, level: usize) -> Vec<u64> {
    let mut counts = vec![1u64];
    let mut frontier: HashMap<BitSet, u64> = HashMap::from([(start.clone(), 1)]);
    for _ in 0..level {
        let mut next: HashMap<BitSet, u64> = HashMap::new();
        for (s, &c) in &frontier {
            for a in 0..g.symbol_count() {
                let p = g.predecessors(s, a);
                if !p.is_empty() {
                    let slot = next.entry(p).or_insert(0);
                    *slot = slot.saturating_add(c);
                }
            }
        }
        counts.push(next.values().fold(0u64, |acc, &c| acc.saturating_add(c)));
        frontier = next;
    }
    counts
}

pub fn point_past_set(g: &LabeledGraph, t: &TSet, level: usize) -> PastSet {
    past_words(g, &t.0, level)
}

pub fn word_past_set(g: &LabeledGraph, u: &Word, level: usize) -> Result<PastSet, PastSetError> {
    let rel = word_relation(g, u);
    if rel.is_empty() {
        return Err(PastSetError::WordNotInLanguage);
    }
    Ok(past_words(g, &rel.domain(), level))
}

/// The reachable relation monoid `{R_u : u in L}` with its one-step graph.
/// Element 0 is the identity `R_ε`.
pub struct RelationMonoid {
    elements: Vec<Relation>,
    domains: Vec<BitSet>,
    step: Vec<Vec<Option<usize>>>,
    parent: Vec<Option<(usize, usize)>>,
    component: Vec<usize>,
    cyclic: Vec<bool>,
}

impl RelationMonoid {
    pub fn explore(g: &LabeledGraph, cap: usize) -> Result<Self, PastSetError> {
        let identity = Relation::identity(g.vertex_count());
        let mut index: HashMap<Relation, usize> = HashMap::new();
        index.insert(identity.clone(), 0);
        let mut elements = vec![identity];
        let mut parent = vec![None];
        let mut step: Vec<Vec<Option<usize>>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            let mut row = vec![None; g.symbol_count()];
            for (a, slot) in row.iter_mut().enumerate() {
                let next = elements[e].then_symbol(g, a);
                if next.is_empty() {
                    continue;
                }
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if elements.len() >= cap {
                            return Err(PastSetError::MonoidBudgetExceeded(cap));
                        }
                        let id = elements.len();
                        index.insert(next.clone(), id);
                        elements.push(next);
                        parent.push(Some((e, a)));
                        queue.push_back(id);
                        id
                    }
                };
                *slot = Some(id);
            }
            if step.len() <= e {
                step.resize(e + 1, Vec::new());
            }
            step[e] = row;
        }
        let domains = elements.iter().map(Relation::domain).collect();

        let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(elements.len(), elements.len());
        for _ in 0..elements.len() {
            graph.add_node(());
        }
        for (e, row) in step.iter().enumerate() {
            for t in row.iter().flatten() {
                graph.add_edge(NodeIndex::new(e), NodeIndex::new(*t), ());
            }
        }
        let mut component = vec![0; elements.len()];
        let mut cyclic = vec![false; elements.len()];
        for (c, scc) in tarjan_scc(&graph).into_iter().enumerate() {
            let on_cycle = scc.len() > 1 || {
                let e = scc[0].index();
                step[e].iter().flatten().any(|&t| t == e)
            };
            for n in scc {
                component[n.index()] = c;
                cyclic[n.index()] = on_cycle;
            }
        }

        Ok(RelationMonoid {
            elements,
            domains,
            step,
            parent,
            component,
            cyclic,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, e: usize) -> &Relation {
        &self.elements[e]
    }

    pub fn domain(&self, e: usize) -> &BitSet {
        &self.domains[e]
    }

    /// `R_u` to `R_{ua}`, or `None` when `ua` is not in the language.
    pub fn step(&self, e: usize, a: usize) -> Option<usize> {
        self.step[e][a]
    }

    pub fn symbol_count(&self) -> usize {
        self.step.first().map(Vec::len).unwrap_or(0)
    }

    pub fn on_cycle(&self, e: usize) -> bool {
        self.cyclic[e]
    }

    pub fn component(&self, e: usize) -> usize {
        self.component[e]
    }

    /// Shortest word reaching element `e` from the identity.
    pub fn word_to(&self, mut e: usize) -> Word {
        let mut symbols = Vec::new();
        while let Some((p, a)) = self.parent[e] {
            symbols.push(a);
            e = p;
        }
        symbols.reverse();
        Word::new(symbols)
    }

    pub fn realized_tsets(&self) -> Vec<TSet> {
        let mut out: Vec<TSet> = (0..self.len())
            .filter(|&e| self.cyclic[e])
            .map(|e| TSet(self.domains[e].clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// An eventually periodic point `prefix cycle cycle ...` whose T-set is `t`.
    pub fn witness_point(&self, t: &TSet) -> Option<(Word, Word)> {
        let start = (0..self.len()).find(|&e| self.cyclic[e] && self.domains[e] == t.0)?;
        Some((self.word_to(start), self.cycle_at(start)?))
    }

    /// Shortest nonempty word leading from `e` back to `e`.
    pub fn cycle_at(&self, e: usize) -> Option<Word> {
        let comp = self.component[e];
        let mut best: Option<Word> = None;
        for a in 0..self.symbol_count() {
            let Some(n) = self.step[e][a] else { continue };
            if self.component[n] != comp {
                continue;
            }
            let (_, rest) = self.path_to(n, |x| self.component[x] == comp, |x| x == e)?;
            let w = rest.prepend(a);
            if best.as_ref().is_none_or(|b| w.len() < b.len()) {
                best = Some(w);
            }
        }
        best
    }

    /// Shortest word leading from `from` to an element satisfying `target`,
    /// visiting only elements satisfying `allowed` on the way. Returns the
    /// element reached together with the word.
    pub fn path_to(
        &self,
        from: usize,
        allowed: impl Fn(usize) -> bool,
        target: impl Fn(usize) -> bool,
    ) -> Option<(usize, Word)> {
        let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut seen = vec![false; self.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(e) = queue.pop_front() {
            if target(e) {
                let mut symbols = Vec::new();
                let mut cur = e;
                while cur != from {
                    let (p, a) = prev[&cur];
                    symbols.push(a);
                    cur = p;
                }
                symbols.reverse();
                return Some((e, Word::new(symbols)));
            }
            for a in 0..self.symbol_count() {
                let Some(n) = self.step[e][a] else { continue };
                if !seen[n] && allowed(n) {
                    seen[n] = true;
                    prev.insert(n, (e, a));
                    queue.push_back(n);
                }
            }
        }
        None
    }
}

pub fn realized_tsets(g: &LabeledGraph, cap: usize) -> Result<Vec<TSet>, PastSetError> {
    Ok(RelationMonoid::explore(g, cap)?.realized_tsets())
}

/// A family of vertex sets closed under nonempty predecessor steps, with the
/// transition table `state x symbol -> state` (`None` for an empty result).
#[derive(Clone, Debug)]
pub struct PreClosure {
    states: Vec<BitSet>,
    index: HashMap<BitSet, usize>,
    pre: Vec<Vec<Option<usize>>>,
}

impl PreClosure {
    /// Seeds keep their order as states `0..seeds.len()`; newly discovered
    /// sets follow in discovery order.
    pub fn build(g: &LabeledGraph, seeds: impl IntoIterator<Item = BitSet>, cap: usize) -> Result<Self, PastSetError> {
        let mut states = Vec::new();
        let mut index = HashMap::new();
        for s in seeds {
            if !index.contains_key(&s) {
                index.insert(s.clone(), states.len());
                states.push(s);
            }
        }
        let mut pre = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = vec![None; g.symbol_count()];
            for (a, slot) in row.iter_mut().enumerate() {
                let p = g.predecessors(&states[i], a);
                if p.is_empty() {
                    continue;
                }
                let id = match index.get(&p) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= cap {
                            return Err(PastSetError::MonoidBudgetExceeded(cap));
                        }
                        index.insert(p.clone(), states.len());
                        states.push(p);
                        states.len() - 1
                    }
                };
                *slot = Some(id);
            }
            pre.push(row);
            i += 1;
        }
        Ok(PreClosure { states, index, pre })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &BitSet {
        &self.states[i]
    }

    pub fn find(&self, set: &BitSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn pre(&self, i: usize, a: usize) -> Option<usize> {
        self.pre[i][a]
    }

    pub fn table(&self) -> &[Vec<Option<usize>>] {
        &self.pre
    }
}
