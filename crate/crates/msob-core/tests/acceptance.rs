//! Full acceptance battery, one printed line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to watch the lines land.

use msob_core::verify::{run_verify, VerifyConfig};

#[test]
fn acceptance_battery() {
    let cfg = VerifyConfig::default();
    let report = run_verify(&cfg);
    print!("{}", report.render());

    // every id exactly once, in order
    let ids: Vec<u32> = report.results.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=15).collect::<Vec<u32>>());

    let failing: Vec<String> = report
        .results
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({})", c.id, c.name))
        .collect();
    assert!(failing.is_empty(), "failing criteria: {}", failing.join(", "));
}
