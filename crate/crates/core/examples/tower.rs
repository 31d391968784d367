//! Past-equivalence classes of the even shift, level by level.

use shiftca::presentations::Presentation;
use shiftca::tower::build_tower;

fn main() {
    let p = Presentation::from_json(include_str!("data/even.json")).unwrap();
    let t = build_tower(p.graph(), 16).unwrap();
    println!("stabilized at {:?}", t.stabilized_at());
    for l in 0..=t.top_level() {
        println!("level {l}: {} classes", t.m(l).unwrap());
        for c in 0..t.m(l).unwrap() {
            let past = t.past_set(l, c).unwrap();
            let words: Vec<_> = past
                .words()
                .map(|w| if w.is_empty() { "ε".to_string() } else { p.alphabet().format_word(w) })
                .collect();
            println!("  class {c}: P_{l} = {{{}}}", words.join(", "));
        }
    }
    println!("diagrams commute: {}", t.check_diagrams().unwrap().all_hold());
}
