//! Condition (I), condition (*), aperiodicity and irreducibility for the even shift.

use shiftca::conditions::{aperiodic_past, condition_i, condition_star, irreducible_past};
use shiftca::presentations::Presentation;
use shiftca::tower::build_tower;

fn main() {
    let p = Presentation::from_json(include_str!("data/even.json")).unwrap();
    let t = build_tower(p.graph(), 64).unwrap();
    for v in [condition_i(&t), condition_star(&t), aperiodic_past(&t), irreducible_past(&t)] {
        let v = v.unwrap();
        println!("{}", serde_json::to_string(&v.to_json(p.alphabet())).unwrap());
    }
}
