//! Bowen-Franks groups of a few shifts of finite type.

use shiftca::invariants::bowen_franks;
use shiftca::presentations::Presentation;

fn main() {
    for text in [include_str!("data/full2.json"), include_str!("data/full3.json"), include_str!("data/gm.json")] {
        let p = Presentation::from_json(text).unwrap();
        let bf = bowen_franks(&p).unwrap();
        println!("{:?}: BF = {}", bf.from_matrix, bf.group);
    }
}
