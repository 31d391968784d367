use std::collections::BTreeSet;

use serde::Serialize;

use super::PresentationError;
use crate::bitset::BitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub symbol: usize,
}

/// A finite directed graph with symbol-labeled edges. The shift it presents is
/// the set of label sequences of right-infinite paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    vertex_count: usize,
    symbol_count: usize,
    edges: Vec<Edge>,
    // [symbol][vertex] -> targets / sources
    succ: Vec<Vec<BitSet>>,
    pred: Vec<Vec<BitSet>>,
}

impl LabeledGraph {
    pub fn new(
        vertex_count: usize,
        symbol_count: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, PresentationError> {
        let mut set = BTreeSet::new();
        for e in edges {
            if e.from >= vertex_count || e.to >= vertex_count {
                return Err(PresentationError::DanglingEdge {
                    from: e.from,
                    to: e.to,
                    vertices: vertex_count,
                });
            }
            if e.symbol >= symbol_count {
                return Err(PresentationError::SymbolOutOfRange(e.symbol));
            }
            set.insert(e);
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut succ = vec![vec![BitSet::new(vertex_count); vertex_count]; symbol_count];
        let mut pred = vec![vec![BitSet::new(vertex_count); vertex_count]; symbol_count];
        for e in &edges {
            succ[e.symbol][e.from].insert(e.to);
            pred[e.symbol][e.to].insert(e.from);
        }
        Ok(LabeledGraph {
            vertex_count,
            symbol_count,
            edges,
            succ,
            pred,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn all_vertices(&self) -> BitSet {
        BitSet::full(self.vertex_count)
    }

    /// Targets of `symbol`-edges leaving `v`.
    pub fn successors_of(&self, v: usize, symbol: usize) -> &BitSet {
        &self.succ[symbol][v]
    }

    /// Vertices with a `symbol`-edge into `set`.
    pub fn predecessors(&self, set: &BitSet, symbol: usize) -> BitSet {
        let mut out = BitSet::new(self.vertex_count);
        for w in set.iter() {
            out.union_with(&self.pred[symbol][w]);
        }
        out
    }

    /// Vertices reached from `set` by one `symbol`-edge.
    pub fn image(&self, set: &BitSet, symbol: usize) -> BitSet {
        let mut out = BitSet::new(self.vertex_count);
        for v in set.iter() {
            out.union_with(&self.succ[symbol][v]);
        }
        out
    }

    pub fn out_degree(&self, v: usize) -> usize {
        (0..self.symbol_count).map(|a| self.succ[a][v].count()).sum()
    }

    /// Deletes vertices without an infinite outgoing path, repeating until every
    /// remaining vertex has an outgoing edge. Surviving vertices keep their
    /// relative order.
    pub fn essentialize(&self) -> Result<LabeledGraph, PresentationError> {
        self.restrict(&self.essential_mask())
    }

    /// `true` for vertices that start an infinite path.
    pub fn essential_mask(&self) -> Vec<bool> {
        let mut alive = vec![true; self.vertex_count];
        loop {
            let mut changed = false;
            for v in 0..self.vertex_count {
                if alive[v] && !self.edges.iter().any(|e| e.from == v && alive[e.to]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    /// Induced subgraph on the vertices flagged in `keep`.
    pub(crate) fn restrict(&self, keep: &[bool]) -> Result<LabeledGraph, PresentationError> {
        let mut renumber = vec![usize::MAX; self.vertex_count];
        let mut n = 0;
        for v in 0..self.vertex_count {
            if keep[v] {
                renumber[v] = n;
                n += 1;
            }
        }
        if n == 0 {
            return Err(PresentationError::EmptyShift);
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.from] && keep[e.to])
            .map(|e| Edge {
                from: renumber[e.from],
                to: renumber[e.to],
                symbol: e.symbol,
            });
        LabeledGraph::new(n, self.symbol_count, edges)
    }

    pub fn is_essential(&self) -> bool {
        (0..self.vertex_count).all(|v| self.out_degree(v) > 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(from: usize, to: usize, symbol: usize) -> Edge {
        Edge { from, to, symbol }
    }

    #[test]
    fn essentialize_removes_dead_chains() {
        // 0 -> 1 -> 2 (dead end), 0 loops
        let g = LabeledGraph::new(3, 1, [e(0, 0, 0), e(0, 1, 0), e(1, 2, 0)]).unwrap();
        let ess = g.essentialize().unwrap();
        assert_eq!(ess.vertex_count(), 1);
        assert_eq!(ess.edges(), &[e(0, 0, 0)]);
    }

    #[test]
    fn single_vertex_without_edges_is_empty() {
        let g = LabeledGraph::new(1, 1, []).unwrap();
        assert!(matches!(g.essentialize(), Err(PresentationError::EmptyShift)));
    }

    #[test]
    fn dangling_edge_rejected() {
        assert!(matches!(
            LabeledGraph::new(2, 1, [e(0, 2, 0)]),
            Err(PresentationError::DanglingEdge { .. })
        ));
    }

    #[test]
    fn predecessor_and_image() {
        // even shift: v0 -0-> v0, v0 -1-> v1, v1 -1-> v0
        let g = LabeledGraph::new(2, 2, [e(0, 0, 0), e(0, 1, 1), e(1, 0, 1)]).unwrap();
        let v0 = BitSet::from_indices(2, [0]);
        assert_eq!(g.predecessors(&v0, 1), BitSet::from_indices(2, [1]));
        assert_eq!(g.predecessors(&v0, 0), BitSet::from_indices(2, [0]));
        assert_eq!(g.image(&v0, 1), BitSet::from_indices(2, [1]));
    }
}
