//! K-groups, dimension group, Bowen–Franks group, and the Cuntz–Krieger oracle.
//!
//! `K_0 = Z^{m(l+1)} / B^l Z^{M_1^l}` and `K_1 = ker B^l`, read at the
//! stabilization level where the inclusion maps `I_l` are identities.

use serde::Serialize;
use thiserror::Error;

use crate::intlinalg::{cokernel, kernel, AbelianGroup, IntMatrix};
use crate::presentations::Presentation;
use crate::tower::{Tower, TowerDump, TowerError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("the tower needs at least levels 0..=2, only 0..={0} were built")]
    TowerTooShallow(usize),
    #[error("the tower did not stabilize within {0} levels")]
    NotStabilized(usize),
    #[error("this invariant needs an sft matrix presentation, got {0}")]
    WrongKind(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KGroupsReport {
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
    pub exact: bool,
    #[serde(rename = "level")]
    pub level_used: usize,
}

impl KGroupsReport {
    fn from_b(b: &IntMatrix, level_used: usize, exact: bool) -> Self {
        KGroupsReport {
            k0: cokernel(b),
            k1: kernel(b),
            exact,
            level_used,
        }
    }
}

// (level whose B is used, level reported, exact)
fn k_level(stabilized_at: Option<usize>, top: usize) -> Result<(usize, usize, bool), InvariantError> {
    match stabilized_at {
        Some(l0) => Ok((l0, l0, true)),
        None if top >= 1 => Ok((top - 1, top - 1, false)),
        None => Err(InvariantError::TowerTooShallow(top)),
    }
}

pub fn k_groups(tower: &Tower) -> Result<KGroupsReport, InvariantError> {
    let (l, level, exact) = k_level(tower.stabilized_at(), tower.top_level())?;
    Ok(KGroupsReport::from_b(&tower.matrix_b(l)?, level, exact))
}

/// Same as [`k_groups`], from a stored tower dump.
pub fn k_groups_from_dump(dump: &TowerDump) -> Result<KGroupsReport, InvariantError> {
    let top = dump.levels.len().saturating_sub(1);
    let (l, level, exact) = k_level(dump.stabilized_at, top)?;
    let b = dump.levels[l].b.as_ref().ok_or(TowerError::LevelMissing(l + 1))?;
    let b = if b.is_empty() {
        // no rows: the column count is |M_1^l|
        IntMatrix::zeros(0, dump.levels[l].filtration[1].len())
    } else {
        IntMatrix::from_rows(b)
    };
    Ok(KGroupsReport::from_b(&b, level, exact))
}

/// One stage `Z^{M_k} --A_k--> Z^{M_{k+1}}` of the dimension group, with the
/// shift map `δ_k : Z^{M_k} -> Z^{M_{k+1}}`. The
/// positive cone of each stage is the coordinatewise one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StationarySystem {
    pub k: usize,
    /// Class indices making up `M_k` at the stabilized level.
    pub classes: Vec<usize>,
    pub group_rank: usize,
    pub next_classes: Vec<usize>,
    pub map: IntMatrix,
    pub delta: IntMatrix,
    /// Whether `A_{k+1} δ_k = δ_{k+1} A_k`.
    pub delta_commutes: bool,
}

pub fn dimension_group(tower: &Tower, k_max: usize) -> Result<Vec<StationarySystem>, InvariantError> {
    let l0 = tower
        .stabilized_at()
        .ok_or(InvariantError::NotStabilized(tower.max_level()))?;
    let l = l0.max(k_max + 1);
    let mut t = tower.clone();
    t.extend_to(l + 2);
    (0..=k_max)
        .map(|k| {
            let map = t.map_a(k, l)?;
            let delta = t.map_delta(k, l)?;
            let lhs = t.map_a(k + 1, l)?.mul(&delta);
            let rhs = t.map_delta(k + 1, l + 1)?.mul(&map);
            let classes = t.filtration_m(k, l)?;
            Ok(StationarySystem {
                k,
                group_rank: classes.len(),
                classes,
                next_classes: t.filtration_m(k + 1, l)?,
                map,
                delta,
                delta_commutes: lhs == rhs,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BowenFranks {
    pub group: AbelianGroup,
    pub from_matrix: Vec<Vec<u8>>,
}

fn sft_matrix(p: &Presentation) -> Result<&[Vec<u8>], InvariantError> {
    p.sft_matrix().ok_or(InvariantError::WrongKind(p.kind().tag()))
}

fn identity_minus(a: &[Vec<i64>], transpose: bool) -> IntMatrix {
    let n = a.len();
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = if transpose { a[j][i] } else { a[i][j] };
            m.set(i, j, i64::from(i == j) - x);
        }
    }
    m
}

fn widen(a: &[Vec<u8>]) -> Vec<Vec<i64>> {
    a.iter().map(|r| r.iter().map(|&x| i64::from(x)).collect()).collect()
}

/// `coker(I - A)`.
pub fn bowen_franks(p: &Presentation) -> Result<BowenFranks, InvariantError> {
    let a = sft_matrix(p)?;
    Ok(BowenFranks {
        group: cokernel(&identity_minus(&widen(a), false)),
        from_matrix: a.to_vec(),
    })
}

/// Merges symbols whose columns in `A` agree. Groups are ordered by their
/// first symbol; entry `(J, I)` counts the symbols `a` in `J` with
/// `A(a, i) = 1` for any `i` in `I`.
pub fn collapse_columns(a: &[Vec<u8>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let column = |j: usize| -> Vec<u8> { a.iter().map(|r| r[j]).collect() };
    let mut groups: Vec<(Vec<u8>, Vec<usize>)> = Vec::new();
    for j in 0..n {
        let c = column(j);
        match groups.iter_mut().find(|(col, _)| *col == c) {
            Some((_, members)) => members.push(j),
            None => groups.push((c, vec![j])),
        }
    }
    groups
        .iter()
        .map(|(_, row_group)| {
            groups
                .iter()
                .map(|(_, col_group)| {
                    let i = col_group[0];
                    row_group.iter().map(|&s| i64::from(a[s][i])).sum()
                })
                .collect()
        })
        .collect()
}

/// Cuntz–Krieger groups `coker(I - Ãᵀ)`, `ker(I - Ãᵀ)` of the column-collapsed
/// matrix `Ã`, computed without the tower.
pub fn ck_oracle(p: &Presentation) -> Result<KGroupsReport, InvariantError> {
    let a = collapse_columns(sft_matrix(p)?);
    Ok(KGroupsReport::from_b(&identity_minus(&a, true), 0, true))
}

/// Same as [`ck_oracle`] on the matrix as given, without collapsing columns.
pub fn ck_oracle_uncollapsed(p: &Presentation) -> Result<KGroupsReport, InvariantError> {
    let a = widen(sft_matrix(p)?);
    Ok(KGroupsReport::from_b(&identity_minus(&a, true), 0, true))
}
