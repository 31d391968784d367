//! Operator relations on the truncated representation of the golden mean shift.

use shiftca::presentations::Presentation;
use shiftca::repcheck::{build_truncation, check_ck_relations, check_grading, check_universal_relations};

fn main() {
    let p = Presentation::from_json(include_str!("data/gm.json")).unwrap();
    let r = build_truncation(p.graph(), 6).unwrap();
    let mut report = check_universal_relations(&r, 4);
    report.extend(check_ck_relations(&r, p.sft_matrix().unwrap()).unwrap());
    report.extend(check_grading(&r, 2));
    println!("basis of {} words, {} checks, all pass: {}", r.dim(), report.checked.len(), report.all_pass());
}
