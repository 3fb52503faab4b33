//! One line per acceptance criterion, on the seed-1 synthetic corpus.
//! Criteria run sequentially in a single test so the timing criteria are not
//! measured against other tests running in parallel.

use std::sync::Arc;

use atelier_core::corpus::generate_synthetic_corpus;

#[test]
fn primary_criteria() {
    let index = Arc::new(generate_synthetic_corpus(1, 64).expect("seed-1 corpus"));
    let mut failed = Vec::new();
    for (name, suite) in atelier_eval::suites::ALL {
        let r = suite(&index);
        println!("{r}");
        if !r.passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
