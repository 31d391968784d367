//! The Cuntz-Krieger K-theory formula with and without merging equal columns.

use shiftca::invariants::{ck_oracle, ck_oracle_uncollapsed};
use shiftca::presentations::{Alphabet, Presentation};

fn main() {
    for m in [vec![vec![1, 1], vec![1, 1]], vec![vec![1, 0], vec![1, 0]], vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]] {
        let names = (0..m.len()).map(|i| i.to_string()).collect::<Vec<_>>();
        let p = Presentation::sft(Alphabet::new(names).unwrap(), m.clone()).unwrap();
        let a = ck_oracle(&p).unwrap();
        let b = ck_oracle_uncollapsed(&p).unwrap();
        println!("{m:?}: K0 = {}, K1 = {} (uncollapsed K0 = {}, K1 = {})", a.k0, a.k1, b.k0, b.k1);
    }
}
