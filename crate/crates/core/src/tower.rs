//! The l-past equivalence tower.
//!
//! Level `l` partitions the realized T-sets by their past set `P_l`. Level 0
//! is a single class, and level `l + 1` splits a level-`l` class by the
//! level-`l` classes of `Pre_a(t)` for each symbol (an empty `Pre_a(t)` counts
//! as its own value), since `P_{l+1}(x)` is determined by the pairs
//! `(a, [a x]_l)` with `a x` a point.
//!
//! Classes of level `l + 1` are ordered by their refinement key: first the
//! parent class, then the per-symbol targets with "no target" first. Once two
//! consecutive levels have the same class count, the partition never changes
//! again and this ordering makes `I_l` the identity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::IntMatrix;
use crate::pastsets::{self, PastSet, PastSetError, PreClosure, RelationMonoid, TSet, DEFAULT_MONOID_CAP};
use crate::presentations::{Alphabet, LabeledGraph};

/// Largest number of past words written per class in a tower dump.
pub const DUMP_WORD_CAP: usize = 4096;

pub const DUMP_FORMAT: &str = "shiftca-tower-v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error(transparent)]
    PastSet(#[from] PastSetError),
    #[error("level {0} has not been built")]
    LevelMissing(usize),
    #[error("past lengths are only constant on classes for k <= l, got k = {k}, l = {l}")]
    FiltrationOutOfRange { k: usize, l: usize },
    #[error("class {class} of level {level} is sent by symbol {symbol} into several classes")]
    IllDefinedTransition { level: usize, class: usize, symbol: usize },
}

#[derive(Clone, Debug)]
pub struct Tower {
    graph: LabeledGraph,
    tsets: Vec<TSet>,
    // [tset][symbol] -> index of Pre_a(t) among the realized T-sets
    pre: Vec<Vec<Option<usize>>>,
    // levels[l][t] = class of T-set t at level l
    levels: Vec<Vec<usize>>,
    counts: Vec<usize>,
    stabilized_at: Option<usize>,
    max_level: usize,
    monoid_cap: usize,
}

pub fn build_tower(g: &LabeledGraph, max_level: usize) -> Result<Tower, TowerError> {
    Tower::build(g, max_level, DEFAULT_MONOID_CAP)
}

impl Tower {
    /// Builds levels `0..=l0 + 1` when the partition stabilizes at `l0` with
    /// `l0 + 1 <= max_level`, and `0..=max_level` otherwise. A stabilized tower
    /// always carries at least levels `0..=2`, since `B^l` needs `l >= 1`.
    pub fn build(g: &LabeledGraph, max_level: usize, monoid_cap: usize) -> Result<Tower, TowerError> {
        let monoid = RelationMonoid::explore(g, monoid_cap)?;
        let tsets = monoid.realized_tsets();
        let closure = PreClosure::build(g, tsets.iter().map(|t| t.vertices().clone()), monoid_cap)?;
        assert_eq!(closure.len(), tsets.len(), "realized T-sets are not closed under Pre");
        let pre = closure.table().to_vec();

        let mut tower = Tower {
            graph: g.clone(),
            counts: vec![1],
            levels: vec![vec![0; tsets.len()]],
            tsets,
            pre,
            stabilized_at: None,
            max_level,
            monoid_cap,
        };
        while tower.top_level() < max_level {
            tower.push_level();
            let l = tower.top_level();
            if tower.counts[l] == tower.counts[l - 1] {
                tower.stabilized_at = Some(l - 1);
                break;
            }
        }
        if tower.stabilized_at.is_some() {
            tower.extend_to(2);
        }
        Ok(tower)
    }

    fn push_level(&mut self) {
        let prev = self.levels.last().unwrap();
        let keys: Vec<(usize, Vec<Option<usize>>)> = (0..self.tsets.len())
            .map(|t| {
                let targets = self.pre[t].iter().map(|p| p.map(|s| prev[s])).collect();
                (prev[t], targets)
            })
            .collect();
        let mut distinct = keys.clone();
        distinct.sort();
        distinct.dedup();
        let next = keys
            .iter()
            .map(|k| distinct.binary_search(k).unwrap())
            .collect();
        self.counts.push(distinct.len());
        self.levels.push(next);
    }

    /// Builds further levels up to `level`. Past the stabilization level this
    /// is exact, otherwise it extends the approximation.
    pub fn extend_to(&mut self, level: usize) {
        while self.top_level() < level {
            self.push_level();
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn tsets(&self) -> &[TSet] {
        &self.tsets
    }

    /// Index of `T(a x)` when `T(x)` is T-set `t`, or `None` if `a x` is not a point.
    pub fn pre_index(&self, t: usize, a: usize) -> Option<usize> {
        self.pre[t][a]
    }

    pub fn symbol_count(&self) -> usize {
        self.graph.symbol_count()
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Cap on relation-monoid size used to build this tower.
    pub fn monoid_cap(&self) -> usize {
        self.monoid_cap
    }

    pub fn stabilized_at(&self) -> Option<usize> {
        self.stabilized_at
    }

    /// The level invariants are read from: the stabilization level, or the
    /// last level that has a successor when the tower has not stabilized.
    pub fn working_level(&self) -> usize {
        self.stabilized_at.unwrap_or(self.top_level().saturating_sub(1))
    }

    fn check_level(&self, l: usize) -> Result<(), TowerError> {
        if l > self.top_level() {
            Err(TowerError::LevelMissing(l))
        } else {
            Ok(())
        }
    }

    /// Number of classes `m(l)`.
    pub fn m(&self, l: usize) -> Result<usize, TowerError> {
        self.check_level(l)?;
        Ok(self.counts[l])
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn class_of(&self, l: usize, t: usize) -> Result<usize, TowerError> {
        self.check_level(l)?;
        Ok(self.levels[l][t])
    }

    /// Member T-set indices of every class of level `l`.
    pub fn classes(&self, l: usize) -> Result<Vec<Vec<usize>>, TowerError> {
        self.check_level(l)?;
        let mut out = vec![Vec::new(); self.counts[l]];
        for (t, &c) in self.levels[l].iter().enumerate() {
            out[c].push(t);
        }
        Ok(out)
    }

    pub fn past_set(&self, l: usize, class: usize) -> Result<PastSet, TowerError> {
        let t = self.classes(l)?[class][0];
        Ok(pastsets::point_past_set(&self.graph, &self.tsets[t], l))
    }

    /// `I_l(i, j) = 1` iff class `i` of level `l + 1` lies in class `j` of level `l`.
    pub fn matrix_i(&self, l: usize) -> Result<IntMatrix, TowerError> {
        self.check_level(l + 1)?;
        let mut m = IntMatrix::zeros(self.counts[l + 1], self.counts[l]);
        for t in 0..self.tsets.len() {
            m.set(self.levels[l + 1][t], self.levels[l][t], 1);
        }
        Ok(m)
    }

    /// `A_l(., ., a)` for every symbol `a`: entry `(i, j)` is 1 iff
    /// `a E_i^{l+1}` is nonempty and contained in `E_j^l`.
    pub fn matrix_a_by_symbol(&self, l: usize) -> Result<Vec<IntMatrix>, TowerError> {
        self.check_level(l + 1)?;
        let (rows, cols) = (self.counts[l + 1], self.counts[l]);
        let mut out = Vec::with_capacity(self.symbol_count());
        for a in 0..self.symbol_count() {
            let mut target: Vec<Option<usize>> = vec![None; rows];
            for t in 0..self.tsets.len() {
                let Some(s) = self.pre[t][a] else { continue };
                let i = self.levels[l + 1][t];
                let j = self.levels[l][s];
                match target[i] {
                    Some(old) if old != j => {
                        return Err(TowerError::IllDefinedTransition {
                            level: l + 1,
                            class: i,
                            symbol: a,
                        })
                    }
                    _ => target[i] = Some(j),
                }
            }
            let mut m = IntMatrix::zeros(rows, cols);
            for (i, j) in target.iter().enumerate() {
                if let Some(j) = j {
                    m.set(i, *j, 1);
                }
            }
            out.push(m);
        }
        Ok(out)
    }

    /// `Σ_a A_l(., ., a)`.
    pub fn matrix_sum_a(&self, l: usize) -> Result<IntMatrix, TowerError> {
        let parts = self.matrix_a_by_symbol(l)?;
        let mut sum = IntMatrix::zeros(self.counts[l + 1], self.counts[l]);
        for p in &parts {
            sum = sum.add(p);
        }
        Ok(sum)
    }

    /// `M_k^l = {i : P_k(E_i^l) nonempty}`. Past sets contain the empty word,
    /// so this is every class of level `l`, for every `k`.
    pub fn filtration_m(&self, _k: usize, l: usize) -> Result<Vec<usize>, TowerError> {
        self.check_level(l)?;
        Ok((0..self.counts[l]).collect())
    }

    /// Classes of level `l` whose points have a predecessor word of exact
    /// length `k` (`k <= l`, where the answer is constant on classes).
    pub fn with_past_of_length(&self, k: usize, l: usize) -> Result<Vec<usize>, TowerError> {
        self.check_level(l)?;
        if k > l {
            return Err(TowerError::FiltrationOutOfRange { k, l });
        }
        let alive = self.alive(k);
        let mut members = vec![false; self.counts[l]];
        for (t, &ok) in alive.iter().enumerate() {
            if ok {
                members[self.levels[l][t]] = true;
            }
        }
        debug_assert!((0..self.tsets.len()).all(|t| alive[t] == members[self.levels[l][t]]));
        Ok((0..self.counts[l]).filter(|&i| members[i]).collect())
    }

    // alive[t]: some word of length exactly k precedes points with T-set t
    fn alive(&self, k: usize) -> Vec<bool> {
        let mut alive = vec![true; self.tsets.len()];
        for _ in 0..k {
            alive = (0..self.tsets.len())
                .map(|t| self.pre[t].iter().flatten().any(|&s| alive[s]))
                .collect();
        }
        alive
    }

    /// `B^l = I_l - Σ_a A_l` on the columns `M_1^l`.
    pub fn matrix_b(&self, l: usize) -> Result<IntMatrix, TowerError> {
        let diff = self.matrix_i(l)?.sub(&self.matrix_sum_a(l)?);
        let rows: Vec<usize> = (0..diff.rows()).collect();
        Ok(diff.select(&rows, &self.filtration_m(1, l)?))
    }

    /// `I_k^l : Z^{M_k^l} -> Z^{M_k^{l+1}}`.
    pub fn map_i(&self, k: usize, l: usize) -> Result<IntMatrix, TowerError> {
        let i = self.matrix_i(l)?;
        Ok(i.select(&self.filtration_m(k, l + 1)?, &self.filtration_m(k, l)?))
    }

    /// `A_k^l : Z^{M_k^l} -> Z^{M_{k+1}^{l+1}}`.
    pub fn map_a(&self, k: usize, l: usize) -> Result<IntMatrix, TowerError> {
        let a = self.matrix_sum_a(l)?;
        Ok(a.select(&self.filtration_m(k + 1, l + 1)?, &self.filtration_m(k, l)?))
    }

    /// `δ_k^l : Z^{M_k^l} -> Z^{M_{k+1}^l}`, keeping the coordinates of `M_{k+1}^l`.
    pub fn map_delta(&self, k: usize, l: usize) -> Result<IntMatrix, TowerError> {
        let from = self.filtration_m(k, l)?;
        let to = self.filtration_m(k + 1, l)?;
        let mut m = IntMatrix::zeros(to.len(), from.len());
        for (r, i) in to.iter().enumerate() {
            if let Ok(c) = from.binary_search(i) {
                m.set(r, c, 1);
            }
        }
        Ok(m)
    }

    /// Evaluates every commuting-diagram identity that the built levels allow.
    pub fn check_diagrams(&self) -> Result<DiagramReport, TowerError> {
        let top = self.top_level();
        let mut report = DiagramReport::default();
        for l in 0..=top {
            for k in 0..=l {
                if l + 2 <= top {
                    // A_k^{l+1} I_k^l = I_{k+1}^{l+1} A_k^l
                    let lhs = self.map_a(k, l + 1)?.mul(&self.map_i(k, l)?);
                    let rhs = self.map_i(k + 1, l + 1)?.mul(&self.map_a(k, l)?);
                    report.lemma.push(DiagramCheck { k, l, holds: lhs == rhs });
                }
                if k < l && l < top {
                    // I_{k+1}^l δ_k^l = δ_k^{l+1} I_k^l
                    let lhs = self.map_i(k + 1, l)?.mul(&self.map_delta(k, l)?);
                    let rhs = self.map_delta(k, l + 1)?.mul(&self.map_i(k, l)?);
                    report.delta.push(DiagramCheck { k, l, holds: lhs == rhs });
                    // A_{k+1}^l δ_k^l = δ_{k+1}^{l+1} A_k^l
                    let lhs = self.map_a(k + 1, l)?.mul(&self.map_delta(k, l)?);
                    let rhs = self.map_delta(k + 1, l + 1)?.mul(&self.map_a(k, l)?);
                    report.delta_a.push(DiagramCheck { k, l, holds: lhs == rhs });
                }
            }
            if l + 2 <= top {
                // I_0^{l+1} B^l = B^{l+1} I_1^l
                let lhs = self.map_i(0, l + 1)?.mul(&self.matrix_b(l)?);
                let rhs = self.matrix_b(l + 1)?.mul(&self.map_i(1, l)?);
                report.b.push(DiagramCheck { k: 1, l, holds: lhs == rhs });
            }
        }
        Ok(report)
    }

    /// Serializable summary of every built level.
    pub fn dump(&self, alphabet: &Alphabet) -> Result<TowerDump, TowerError> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for l in 0..=self.top_level() {
            let mut classes = Vec::new();
            for (index, members) in self.classes(l)?.into_iter().enumerate() {
                let start = self.tsets[members[0]].vertices();
                let (past, complete) = pastsets::past_words_capped(&self.graph, start, l, DUMP_WORD_CAP);
                let past_size = pastsets::past_word_counts(&self.graph, start, l)
                    .into_iter()
                    .fold(0u64, u64::saturating_add);
                classes.push(ClassDump {
                    index,
                    tsets: members
                        .iter()
                        .map(|&t| self.tsets[t].vertices().iter().collect())
                        .collect(),
                    past: past.words().map(|w| alphabet.format_word(w)).collect(),
                    past_complete: complete,
                    past_size,
                });
            }
            let filtration = (0..=l).map(|k| self.filtration_m(k, l)).collect::<Result<_, _>>()?;
            let has_next = l < self.top_level();
            levels.push(LevelDump {
                level: l,
                m: self.counts[l],
                classes,
                filtration,
                i: if has_next { self.matrix_i(l)?.to_i64_rows() } else { None },
                sum_a: if has_next { self.matrix_sum_a(l)?.to_i64_rows() } else { None },
                b: if has_next { self.matrix_b(l)?.to_i64_rows() } else { None },
            });
        }
        Ok(TowerDump {
            format: DUMP_FORMAT.to_string(),
            max_level: self.max_level,
            stabilized_at: self.stabilized_at,
            levels,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramCheck {
    pub k: usize,
    pub l: usize,
    pub holds: bool,
}

/// Outcomes of the commuting-diagram identities, one family per field.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    /// `A_k^{l+1} I_k^l = I_{k+1}^{l+1} A_k^l`
    pub lemma: Vec<DiagramCheck>,
    /// `I_{k+1}^l δ_k^l = δ_k^{l+1} I_k^l`
    pub delta: Vec<DiagramCheck>,
    /// `A_{k+1}^l δ_k^l = δ_{k+1}^{l+1} A_k^l`
    pub delta_a: Vec<DiagramCheck>,
    /// `I_0^{l+1} B^l = B^{l+1} I_1^l`
    pub b: Vec<DiagramCheck>,
}

impl DiagramReport {
    pub fn all_hold(&self) -> bool {
        [&self.lemma, &self.delta, &self.delta_a, &self.b]
            .iter()
            .all(|family| family.iter().all(|c| c.holds))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDump {
    pub format: String,
    pub max_level: usize,
    pub stabilized_at: Option<usize>,
    pub levels: Vec<LevelDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDump {
    pub level: usize,
    pub m: usize,
    pub classes: Vec<ClassDump>,
    /// `M_k^l` for `k = 0..=l`.
    pub filtration: Vec<Vec<usize>>,
    pub i: Option<Vec<Vec<i64>>>,
    pub sum_a: Option<Vec<Vec<i64>>>,
    pub b: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDump {
    pub index: usize,
    /// Member T-sets as vertex lists.
    pub tsets: Vec<Vec<usize>>,
    /// Past words, length-major; cut short when `past_complete` is false.
    pub past: Vec<String>,
    pub past_complete: bool,
    pub past_size: u64,
}
