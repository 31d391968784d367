//! Finite truncations of the representation `s_u e_x = e_{ux}` on `l²(X)`.
//!
//! Points are replaced by the words of length at most `N`. The operator `s_u`
//! sends `e_w` to `e_{uw}` when `uw` is a word of length at most `N`, and to 0
//! otherwise, so every `s_u` stays a partial isometry. Every operator that
//! occurs in the relations is a partial injection of the basis, which is how
//! they are stored; sums only ever appear between diagonal projections.

use std::collections::HashMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::presentations::{Alphabet, LabeledGraph, Word};

pub const DEFAULT_BASIS_CAP: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("the truncation at depth {depth} has more than {cap} basis words")]
    DepthTooLarge { depth: usize, cap: usize },
    #[error("Cuntz-Krieger relations need a transition-matrix presentation")]
    WrongKind,
    #[error("transition matrix is {matrix}x{matrix} but the alphabet has {symbols} symbols")]
    MatrixSize { matrix: usize, symbols: usize },
}

/// A partial injection of basis indices, i.e. a 0-1 matrix with at most one
/// 1 in each row and column. `map[j] = Some(i)` means `e_j ↦ e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap {
    map: Vec<Option<usize>>,
}

impl PartialMap {
    pub fn identity(n: usize) -> Self {
        PartialMap {
            map: (0..n).map(Some).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, j: usize) -> Option<usize> {
        self.map[j]
    }

    /// `self ∘ other`, i.e. the matrix product `self · other`.
    pub fn after(&self, other: &PartialMap) -> PartialMap {
        PartialMap {
            map: other.map.iter().map(|j| j.and_then(|j| self.map[j])).collect(),
        }
    }

    pub fn transpose(&self) -> PartialMap {
        let mut map = vec![None; self.map.len()];
        for (j, i) in self.map.iter().enumerate() {
            if let Some(i) = *i {
                assert!(map[i].is_none(), "not a partial injection");
                map[i] = Some(j);
            }
        }
        PartialMap { map }
    }

    /// Diagonal entries, if the map is a diagonal projection.
    pub fn diagonal(&self) -> Option<Vec<u8>> {
        self.map
            .iter()
            .enumerate()
            .map(|(j, i)| match i {
                None => Some(0),
                Some(i) if *i == j => Some(1),
                Some(_) => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedRep {
    depth: usize,
    basis: Vec<Word>,
    index: HashMap<Word, usize>,
    symbols: usize,
}

/// Basis of all words of `L(X)` of length `0..=depth`, shortest first and
/// lexicographic within a length.
pub fn build_truncation(g: &LabeledGraph, depth: usize) -> Result<TruncatedRep, RepError> {
    build_truncation_capped(g, depth, DEFAULT_BASIS_CAP)
}

pub fn build_truncation_capped(g: &LabeledGraph, depth: usize, cap: usize) -> Result<TruncatedRep, RepError> {
    if depth == 0 {
        return Err(RepError::ZeroDepth);
    }
    let too_large = RepError::DepthTooLarge { depth, cap };
    // reach = vertices where a path labeled by the word ends
    let mut layer = vec![(Word::empty(), g.all_vertices())];
    let mut basis = vec![Word::empty()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, reach) in &layer {
            for a in 0..g.symbol_count() {
                let r = g.image(reach, a);
                if !r.is_empty() {
                    next.push((w.append(a), r));
                }
            }
        }
        if basis.len() + next.len() > cap {
            return Err(too_large);
        }
        basis.extend(next.iter().map(|(w, _)| w.clone()));
        layer = next;
    }
    let index = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(TruncatedRep {
        depth,
        basis,
        index,
        symbols: g.symbol_count(),
    })
}

impl TruncatedRep {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Membership in `L(X)` for words of length at most the depth.
    pub fn in_language(&self, w: &Word) -> bool {
        debug_assert!(w.len() <= self.depth);
        self.index.contains_key(w)
    }

    pub fn op(&self, u: &Word) -> PartialMap {
        PartialMap {
            map: self.basis.iter().map(|w| self.index_of(&u.concat(w))).collect(),
        }
    }

    /// Basis indices of the words of length at most `max_len`.
    fn interior(&self, max_len: usize) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().take_while(move |w| w.len() <= max_len).enumerate().map(|(i, _)| i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `s_u s_v = s_{uv}`
    Product,
    /// `1_{C(u,v)} = s_v s_u* s_u s_v*`
    Diagonal,
    /// `Σ_j s_j s_j* = 1`
    CkSum,
    /// `s_i* s_i = Σ_j A(i,j) s_j s_j*`
    CkRange,
    /// degree-0 words in the generators preserve word length
    Grading,
}

impl Relation {
    pub fn id(self) -> &'static str {
        match self {
            Relation::Product => "product",
            Relation::Diagonal => "diagonal",
            Relation::CkSum => "ck_sum",
            Relation::CkRange => "ck_range",
            Relation::Grading => "grading",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub relation: Relation,
    pub params: Vec<Word>,
    /// Number of basis vectors the identity was compared on.
    pub interior: usize,
    /// First basis word where the two sides differ.
    pub witness: Option<Word>,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub checked: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checked.iter().all(RelationCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checked.iter().filter(|c| !c.passed())
    }

    pub fn count(&self, relation: Relation) -> usize {
        self.checked.iter().filter(|c| c.relation == relation).count()
    }

    pub fn extend(&mut self, other: RelationReport) {
        self.checked.extend(other.checked);
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let mut summary = serde_json::Map::new();
        for r in [Relation::Product, Relation::Diagonal, Relation::CkSum, Relation::CkRange, Relation::Grading] {
            let n = self.count(r);
            if n > 0 {
                let failed = self.checked.iter().filter(|c| c.relation == r && !c.passed()).count();
                summary.insert(r.id().into(), json!({"checked": n, "failed": failed}));
            }
        }
        let failures: Vec<Value> = self
            .failures()
            .map(|c| {
                json!({
                    "relation": c.relation.id(),
                    "params": c.params.iter().map(|w| alphabet.format_word(w)).collect::<Vec<_>>(),
                    "interior": c.interior,
                    "witness": c.witness.as_ref().map(|w| alphabet.format_word(w)),
                })
            })
            .collect();
        json!({"all_pass": self.all_pass(), "summary": summary, "failures": failures})
    }
}

/// All words over `symbols` letters of length at most `max_len`.
fn all_words(symbols: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|w| (0..symbols).map(move |a| w.append(a))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Relations `s_u s_v = s_{uv}` and `1_{C(u,v)} = s_v s_u* s_u s_v*` for all
/// words with `|u| + |v| ≤ budget`, on basis words of length at most `N − |uv|`.
pub fn check_universal_relations(r: &TruncatedRep, budget: usize) -> RelationReport {
    let words = all_words(r.symbols, budget);
    let ops: Vec<PartialMap> = words.iter().map(|w| r.op(w)).collect();
    let mut report = RelationReport::default();
    for (iu, u) in words.iter().enumerate() {
        for (iv, v) in words.iter().enumerate() {
            if u.len() + v.len() > budget {
                continue;
            }
            let uv = u.concat(v);
            let interior_len = r.depth.saturating_sub(uv.len());
            let interior: Vec<usize> = if uv.len() <= r.depth { r.interior(interior_len).collect() } else { Vec::new() };

            let lhs = ops[iu].after(&ops[iv]);
            let rhs = r.op(&uv);
            let witness = interior.iter().find(|&&j| lhs.apply(j) != rhs.apply(j)).map(|&j| r.basis[j].clone());
            report.checked.push(RelationCheck {
                relation: Relation::Product,
                params: vec![u.clone(), v.clone()],
                interior: interior.len(),
                witness,
            });

            let projection = ops[iv].after(&ops[iu].transpose()).after(&ops[iu]).after(&ops[iv].transpose());
            let in_c = |w: &Word| w.strip_prefix(v).is_some_and(|rest| r.in_language(&u.concat(&rest)));
            let witness = interior
                .iter()
                .find(|&&j| {
                    let expected = in_c(&r.basis[j]).then_some(j);
                    projection.apply(j) != expected
                })
                .map(|&j| r.basis[j].clone());
            report.checked.push(RelationCheck {
                relation: Relation::Diagonal,
                params: vec![u.clone(), v.clone()],
                interior: interior.len(),
                witness,
            });
        }
    }
    report
}

/// `Σ_j s_j s_j* = 1` and `s_i* s_i = Σ_j A(i,j) s_j s_j*` on nonempty basis
/// words of length at most `N − 1`.
pub fn check_ck_relations(r: &TruncatedRep, matrix: &[Vec<u8>]) -> Result<RelationReport, RepError> {
    if matrix.len() != r.symbols {
        return Err(RepError::MatrixSize {
            matrix: matrix.len(),
            symbols: r.symbols,
        });
    }
    let interior: Vec<usize> = r.interior(r.depth - 1).skip(1).collect();
    let ranges: Vec<Vec<u8>> = (0..r.symbols)
        .map(|j| {
            let s = r.op(&Word::new(vec![j]));
            s.after(&s.transpose()).diagonal().expect("range projection is diagonal")
        })
        .collect();
    let mut report = RelationReport::default();

    let witness = interior
        .iter()
        .find(|&&k| ranges.iter().map(|d| d[k] as u32).sum::<u32>() != 1)
        .map(|&k| r.basis[k].clone());
    report.checked.push(RelationCheck {
        relation: Relation::CkSum,
        params: Vec::new(),
        interior: interior.len(),
        witness,
    });

    for (i, row) in matrix.iter().enumerate() {
        let s = r.op(&Word::new(vec![i]));
        let lhs = s.transpose().after(&s).diagonal().expect("source projection is diagonal");
        let witness = interior
            .iter()
            .find(|&&k| {
                let rhs: u32 = (0..r.symbols).map(|j| row[j] as u32 * ranges[j][k] as u32).sum();
                lhs[k] as u32 != rhs
            })
            .map(|&k| r.basis[k].clone());
        report.checked.push(RelationCheck {
            relation: Relation::CkRange,
            params: vec![Word::new(vec![i])],
            interior: interior.len(),
            witness,
        });
    }
    Ok(report)
}

/// Products of two generators `s_v s_u* s_u s_w*` with `|v| = |w|` must
/// again preserve word length. Generators use words with `|u| + |v| + |w| ≤ budget`.
pub fn check_grading(r: &TruncatedRep, budget: usize) -> RelationReport {
    let words = all_words(r.symbols, budget);
    let mut generators = Vec::new();
    for u in &words {
        for v in &words {
            for w in words.iter().filter(|w| w.len() == v.len()) {
                if u.len() + v.len() + w.len() > budget {
                    continue;
                }
                let (su, sv, sw) = (r.op(u), r.op(v), r.op(w));
                let g = sv.after(&su.transpose()).after(&su).after(&sw.transpose());
                generators.push((vec![u.clone(), v.clone(), w.clone()], g, u.len() + v.len()));
            }
        }
    }
    let mut report = RelationReport::default();
    for (p, g, lg) in &generators {
        for (q, h, lh) in &generators {
            let interior: Vec<usize> = r.interior(r.depth.saturating_sub(lg + lh)).collect();
            let product = g.after(h);
            let witness = interior
                .iter()
                .find(|&&j| product.apply(j).is_some_and(|i| r.basis[i].len() != r.basis[j].len()))
                .map(|&j| r.basis[j].clone());
            report.checked.push(RelationCheck {
                relation: Relation::Grading,
                params: p.iter().chain(q).cloned().collect(),
                interior: interior.len(),
                witness,
            });
        }
    }
    report
}
