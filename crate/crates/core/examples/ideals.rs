//! Shift-invariant unions of classes for two fixed points and for a
//! non-simple shift.

use shiftca::conditions::ideal_lattice;
use shiftca::presentations::Presentation;
use shiftca::tower::build_tower;

fn main() {
    let two = Presentation::from_json(include_str!("data/two_points.json")).unwrap();
    let names = ["0", "1"].map(String::from).to_vec();
    let chain = Presentation::sft(shiftca::presentations::Alphabet::new(names).unwrap(), vec![vec![1, 1], vec![0, 1]]).unwrap();
    for (name, p) in [("two fixed points", two), ("[[1,1],[0,1]]", chain)] {
        let r = ideal_lattice(&build_tower(p.graph(), 64).unwrap()).unwrap();
        println!("{name}: {} ideals at level {}: {:?}", r.elements.len(), r.level, r.elements);
    }
}
