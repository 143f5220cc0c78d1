//! Scaled-down acceptance run for quick local iteration.

fn main() {
    let scale: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let outcome = euler_crm_cli::accept::run_acceptance_scaled(20260824, true, scale);
    for line in &outcome.lines {
        println!("{line}");
    }
    println!("all_passed = {}", outcome.all_passed);
    for c in &outcome.results.criteria {
        if c.verdict != "pass" {
            println!("--- criterion {} details ---\n{:#}", c.id, c.details);
        }
    }
}
