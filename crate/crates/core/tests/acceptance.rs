//! One line per acceptance criterion, run at full scale.

use ginoe_core::verify::{run_check, Scale, CHECKS};

fn main() {
    let mut failed = Vec::new();
    for (id, _) in CHECKS {
        let c = run_check(id, Scale::Full);
        println!(
            "[{}] {:>2} {:<28} {:>8.2}s  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.seconds,
            c.detail
        );
        if !c.passed {
            failed.push(c.id);
        }
    }
    println!("acceptance: {}/{} passed", CHECKS.len() - failed.len(), CHECKS.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
