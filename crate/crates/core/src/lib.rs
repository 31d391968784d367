//! Past-equivalence invariants for one-sided shift spaces.

pub mod bitset;
pub mod cli;
pub mod conditions;
pub mod intlinalg;
pub mod invariants;
pub mod pastsets;
pub mod presentations;
pub mod repcheck;
pub mod tower;
