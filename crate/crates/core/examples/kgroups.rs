//! K-groups from the tower, next to the Cuntz-Krieger formula.

use shiftca::invariants::{ck_oracle, k_groups};
use shiftca::presentations::Presentation;
use shiftca::tower::build_tower;

fn main() {
    for name in ["full2", "full3", "gm", "point", "zero_column"] {
        let text = std::fs::read_to_string(format!("{}/examples/data/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap();
        let p = Presentation::from_json(&text).unwrap();
        let r = k_groups(&build_tower(p.graph(), 64).unwrap()).unwrap();
        let o = ck_oracle(&p).unwrap();
        println!("{name:12} K0 = {:8} K1 = {:8} oracle K0 = {:8} K1 = {}", r.k0.to_string(), r.k1.to_string(), o.k0.to_string(), o.k1);
    }
}
