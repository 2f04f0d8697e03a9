//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use degenfrac::verify::{run_suite_with, VerifyOptions, ACCEPTANCE_CRITERIA};

fn main() {
    let opts = VerifyOptions { criteria: ACCEPTANCE_CRITERIA.collect(), ..Default::default() };
    let mut failed = 0;
    let outcomes = run_suite_with(&opts, |_| {});
    for o in &outcomes {
        let status = if o.pass() { "PASS" } else { "FAIL" };
        let detail = match o.worst() {
            None => format!("{} checks", o.records.len()),
            Some(r) => match &r.error {
                Some(e) => format!("{}: {e}", r.check),
                None => format!(
                    "{}{}: observed {:e} vs {} {:e}",
                    r.check,
                    r.model.as_deref().map(|m| format!(" [{m}]")).unwrap_or_default(),
                    r.observed,
                    if r.relation == degenfrac::report::Relation::AtMost { "<=" } else { ">=" },
                    r.tolerance
                ),
            },
        };
        println!("criterion {:>2} {status} {} ({:.2}s) {detail}", o.id, o.title, o.seconds);
        if !o.pass() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
