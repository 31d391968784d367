#![allow(dead_code)]

use shiftca::bitset::BitSet;
use shiftca::presentations::{Alphabet, Edge, LabeledGraph, Presentation, Word};

pub fn sft(matrix: Vec<Vec<u8>>) -> Presentation {
    let names: Vec<String> = (0..matrix.len()).map(|i| i.to_string()).collect();
    Presentation::sft(Alphabet::new(names).unwrap(), matrix).unwrap()
}

pub fn full(n: usize) -> Presentation {
    sft(vec![vec![1; n]; n])
}

pub fn golden() -> Presentation {
    sft(vec![vec![1, 1], vec![1, 0]])
}

pub fn even() -> Presentation {
    let edges = [(0, 0, 0), (0, 1, 1), (1, 0, 1)].map(|(from, to, symbol)| Edge { from, to, symbol });
    Presentation::labeled_graph(Alphabet::new(["0", "1"]).unwrap(), 2, edges.to_vec()).unwrap()
}

pub fn graph(n: usize, symbols: usize, edges: &[(usize, usize, usize)]) -> Option<LabeledGraph> {
    LabeledGraph::new(n, symbols, edges.iter().map(|&(from, to, symbol)| Edge { from, to, symbol })).ok()
}

fn pre_word(g: &LabeledGraph, set: &BitSet, word: &[usize]) -> BitSet {
    word.iter().rev().fold(set.clone(), |s, &a| g.predecessors(&s, a))
}

/// Vertices from which `prefix cycle cycle ...` can be read, by a greatest
/// fixed point over the cycle.
pub fn brute_tset(g: &LabeledGraph, prefix: &[usize], cycle: &[usize]) -> BitSet {
    let mut s = g.all_vertices();
    loop {
        let next = pre_word(g, &s, cycle);
        if next == s {
            break;
        }
        s = next;
    }
    pre_word(g, &s, prefix)
}

/// `{u : |u| <= l, u prefix cycle^∞ ∈ X}` by trying every word.
pub fn brute_past(g: &LabeledGraph, prefix: &[usize], cycle: &[usize], l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for len in 0..=l {
        for u in &layer {
            let mut p = u.clone();
            p.extend_from_slice(prefix);
            if !brute_tset(g, &p, cycle).is_empty() {
                out.push(u.clone());
            }
        }
        if len < l {
            layer = layer
                .iter()
                .flat_map(|u| (0..g.symbol_count()).map(move |a| [u.as_slice(), &[a]].concat()))
                .collect();
        }
    }
    out
}

pub fn word(symbols: &[usize]) -> Word {
    Word::new(symbols.to_vec())
}
