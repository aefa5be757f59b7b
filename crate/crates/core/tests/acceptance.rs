//! Acceptance suite: one pass/fail line per criterion.

use modfront_core::acceptance::{criteria, run};

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for c in criteria() {
        let r = run(&c);
        println!("{r}");
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
