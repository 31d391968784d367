//! Finite presentations of one-sided shift spaces.
//!
//! Three input kinds are accepted: a 0-1 transition matrix (a one-step shift of
//! finite type), a finite list of forbidden words, and a labeled graph (sofic).
//! Every presentation is validated and converted into an essential
//! [`LabeledGraph`] at construction, which is what the rest of the crate works on.

mod alphabet;
mod graph;
mod input;

use std::collections::HashMap;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::pastsets::{self, DEFAULT_MONOID_CAP};

pub use alphabet::{Alphabet, Word};
pub use graph::{Edge, LabeledGraph};
pub use input::{RawEdge, RawPresentation, FORMAT_TAG};

/// Upper bound on the number of blocks in a higher-block recoding.
pub const MAX_BLOCKS: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("symbol names must be nonempty")]
    EmptySymbolName,
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("symbol index {0} out of range")]
    SymbolOutOfRange(usize),
    #[error("matrix must be {expected}x{expected}, got a row of length {got}")]
    NotSquare { expected: usize, got: usize },
    #[error("matrix entry ({row},{col}) = {value} is not 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },
    #[error("row {0} of the transition matrix is zero")]
    ZeroRow(usize),
    #[error("forbidden words must be nonempty")]
    EmptyForbiddenWord,
    #[error("edge {from}->{to} leaves the vertex range 0..{vertices}")]
    DanglingEdge {
        from: usize,
        to: usize,
        vertices: usize,
    },
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("the presented shift space is empty")]
    EmptyShift,
    #[error("higher-block recoding needs more than {0} blocks")]
    BlockBudgetExceeded(usize),
    #[error("relation monoid exceeded {0} elements")]
    MonoidBudgetExceeded(usize),
    #[error("unsupported format tag {0:?}")]
    UnknownFormat(String),
    #[error("unknown presentation kind {0:?}")]
    UnknownKind(String),
    #[error("field {field:?} is required for kind {kind:?}")]
    MissingField { kind: String, field: &'static str },
    #[error("field {field:?} is not allowed for kind {kind:?}")]
    UnexpectedField { kind: String, field: &'static str },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationKind {
    SftMatrix(Vec<Vec<u8>>),
    ForbiddenWords(Vec<Word>),
    LabeledGraph(LabeledGraph),
}

impl PresentationKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PresentationKind::SftMatrix(_) => "sft",
            PresentationKind::ForbiddenWords(_) => "forbidden_words",
            PresentationKind::LabeledGraph(_) => "labeled_graph",
        }
    }
}

/// A validated presentation together with its essential labeled graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    kind: PresentationKind,
    graph: LabeledGraph,
}

impl Presentation {
    pub fn sft(alphabet: Alphabet, matrix: Vec<Vec<u8>>) -> Result<Self, PresentationError> {
        let n = alphabet.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(PresentationError::NotSquare {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if x > 1 {
                    return Err(PresentationError::NonBinaryEntry {
                        row: i,
                        col: j,
                        value: x as i64,
                    });
                }
            }
            if row.iter().all(|&x| x == 0) {
                return Err(PresentationError::ZeroRow(i));
            }
        }
        if matrix.len() != n {
            return Err(PresentationError::NotSquare {
                expected: n,
                got: matrix.len(),
            });
        }
        let graph = sft_graph(&matrix)?;
        Ok(Presentation {
            alphabet,
            kind: PresentationKind::SftMatrix(matrix),
            graph,
        })
    }

    pub fn forbidden_words(alphabet: Alphabet, words: Vec<Word>) -> Result<Self, PresentationError> {
        for w in &words {
            if w.is_empty() {
                return Err(PresentationError::EmptyForbiddenWord);
            }
            if let Some(&s) = w.symbols().iter().find(|&&s| s >= alphabet.len()) {
                return Err(PresentationError::SymbolOutOfRange(s));
            }
        }
        let graph = block_graph(alphabet.len(), &words)?;
        Ok(Presentation {
            alphabet,
            kind: PresentationKind::ForbiddenWords(words),
            graph,
        })
    }

    pub fn labeled_graph(
        alphabet: Alphabet,
        vertex_count: usize,
        edges: Vec<Edge>,
    ) -> Result<Self, PresentationError> {
        if vertex_count == 0 {
            return Err(PresentationError::NoVertices);
        }
        let graph = LabeledGraph::new(vertex_count, alphabet.len(), edges)?.essentialize()?;
        Ok(Presentation {
            alphabet,
            kind: PresentationKind::LabeledGraph(graph.clone()),
            graph,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> &PresentationKind {
        &self.kind
    }

    /// The essential labeled graph presenting this shift.
    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn sft_matrix(&self) -> Option<&[Vec<u8>]> {
        match &self.kind {
            PresentationKind::SftMatrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn to_labeled_graph(&self) -> Presentation {
        Presentation {
            alphabet: self.alphabet.clone(),
            kind: PresentationKind::LabeledGraph(self.graph.clone()),
            graph: self.graph.clone(),
        }
    }

    pub fn is_in_language(&self, word: &Word) -> bool {
        let mut reach = self.graph.all_vertices();
        for &a in word.symbols() {
            reach = self.graph.image(&reach, a);
            if reach.is_empty() {
                return false;
            }
        }
        true
    }

    /// All words of length exactly `k` in the language, in lexicographic order.
    pub fn language(&self, k: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(k);
        self.extend_words(&self.graph.all_vertices(), k, &mut prefix, &mut out);
        out
    }

    fn extend_words(&self, reach: &BitSet, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word::new(prefix.clone()));
            return;
        }
        for a in 0..self.alphabet.len() {
            let next = self.graph.image(reach, a);
            if !next.is_empty() {
                prefix.push(a);
                self.extend_words(&next, remaining - 1, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Canonical JSON-level form, used for hashing and round trips.
    pub fn to_raw(&self) -> RawPresentation {
        input::to_raw(self)
    }

    pub fn from_json(text: &str) -> Result<Self, PresentationError> {
        let raw: RawPresentation = serde_json::from_str(text)?;
        raw.validate()
    }
}

/// Vertex-per-symbol graph with edge `i -> j` labeled `j` whenever `A(i,j) = 1`.
/// Symbols with a zero column cannot be read as a first symbol from any vertex,
/// so in that case a start vertex with an edge `start -> j` labeled `j` for
/// every `j` is appended.
fn sft_graph(matrix: &[Vec<u8>]) -> Result<LabeledGraph, PresentationError> {
    let n = matrix.len();
    let mut edges = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x == 1 {
                edges.push(Edge { from: i, to: j, symbol: j });
            }
        }
    }
    let zero_column = (0..n).any(|j| matrix.iter().all(|row| row[j] == 0));
    let vertex_count = if zero_column {
        edges.extend((0..n).map(|j| Edge { from: n, to: j, symbol: j }));
        n + 1
    } else {
        n
    };
    LabeledGraph::new(vertex_count, n, edges)?.essentialize()
}

fn has_forbidden_suffix(word: &[usize], forbidden: &[Word]) -> bool {
    forbidden.iter().any(|f| word.ends_with(f.symbols()))
}

/// Higher-block recoding. Vertices are the allowed blocks of length
/// `max(m - 1, 1)` (with `m` the longest forbidden word), with an edge
/// `b -> (b a) minus its first symbol` labeled `a` when `b a` is allowed. A
/// prefix tree of shorter allowed words reads points that have no allowed
/// left extension; it is dropped again when every point is readable from a
/// block vertex.
fn block_graph(symbols: usize, forbidden: &[Word]) -> Result<LabeledGraph, PresentationError> {
    let max_len = forbidden.iter().map(Word::len).max().unwrap_or(1);
    let k = max_len.saturating_sub(1).max(1);

    // allowed words of each length 0..=k, each checked incrementally
    let mut layers: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
    for _ in 0..k {
        let prev = layers.last().unwrap();
        let mut next = Vec::new();
        for w in prev {
            for a in 0..symbols {
                let mut x = w.clone();
                x.push(a);
                if !has_forbidden_suffix(&x, forbidden) {
                    next.push(x);
                }
            }
            if next.len() > MAX_BLOCKS {
                return Err(PresentationError::BlockBudgetExceeded(MAX_BLOCKS));
            }
        }
        layers.push(next);
    }

    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let blocks = &layers[k];
    for b in blocks {
        let id = ids.len();
        ids.insert(b.clone(), id);
    }
    let block_count = blocks.len();
    // prefix-tree vertices come after the blocks
    let mut prefix_ids = HashMap::new();
    for layer in &layers[..k] {
        for p in layer {
            prefix_ids.insert(p.clone(), block_count + prefix_ids.len());
        }
    }
    let vertex_count = block_count + prefix_ids.len();

    let mut edges = Vec::new();
    for b in blocks {
        for a in 0..symbols {
            let mut ba = b.clone();
            ba.push(a);
            if has_forbidden_suffix(&ba, forbidden) {
                continue;
            }
            if let Some(&to) = ids.get(&ba[1..]) {
                edges.push(Edge { from: ids[b], to, symbol: a });
            }
        }
    }
    for (p, &from) in &prefix_ids {
        for a in 0..symbols {
            let mut pa = p.clone();
            pa.push(a);
            let target = if pa.len() == k { ids.get(&pa) } else { prefix_ids.get(&pa) };
            if let Some(&to) = target {
                edges.push(Edge { from, to, symbol: a });
            }
        }
    }
    let full = LabeledGraph::new(vertex_count, symbols, edges)?;
    let alive = full.essential_mask();
    let ess = full.restrict(&alive)?;
    let is_block: Vec<bool> = (0..vertex_count)
        .filter(|&v| alive[v])
        .map(|v| v < block_count)
        .collect();

    let tsets = pastsets::realized_tsets(&ess, DEFAULT_MONOID_CAP).map_err(|e| match e {
        pastsets::PastSetError::MonoidBudgetExceeded(cap) => PresentationError::MonoidBudgetExceeded(cap),
        other => unreachable!("realized_tsets: {other}"),
    })?;
    let needs_prefix_tree = tsets
        .iter()
        .any(|t| t.vertices().iter().all(|v| !is_block[v]));
    if needs_prefix_tree {
        Ok(ess)
    } else {
        ess.restrict(&is_block)?.essentialize()
    }
}
