//! Acceptance checks, one PASS/FAIL line each.

mod determinism;
mod invariants;
mod oracles;
mod total_probability;
mod worked_examples;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Check = fn() -> Result<String, String>;

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = e.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = e.downcast_ref::<String>() {
        s.clone()
    } else {
        "panicked".into()
    }
}

fn main() {
    let checks: [(&str, Check); 6] = [
        ("oracle equivalence", oracles::run),
        (
            "hand-derived examples and step clamps",
            worked_examples::run,
        ),
        ("synthetic two-protocol reproduction", end_to_end::run),
        (
            "total probability filters noise-only states",
            total_probability::run,
        ),
        ("determinism", determinism::run),
        ("randomized invariants", invariants::run),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| Err(panic_message(e)));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[{}] {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[{}] {name}: FAIL ({why}; {secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
