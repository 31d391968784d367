//! First stages of the dimension group of the golden mean shift.

use shiftca::invariants::dimension_group;
use shiftca::presentations::Presentation;
use shiftca::tower::build_tower;

fn main() {
    let p = Presentation::from_json(include_str!("data/gm.json")).unwrap();
    let t = build_tower(p.graph(), 64).unwrap();
    for s in dimension_group(&t, 2).unwrap() {
        println!("k = {}: Z^{} -> Z^{}, A = {:?}", s.k, s.group_rank, s.next_classes.len(), s.map.to_i64_rows().unwrap());
    }
}
