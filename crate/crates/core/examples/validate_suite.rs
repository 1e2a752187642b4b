//! Run the property checks with a reduced sample count.
//!
//! `cargo run --release --example validate_suite`

use clftraj::validate::{run_suite, SuiteConfig};

fn main() {
    let cfg = SuiteConfig {
        seed: 2024,
        spd_draws: 200,
        gradient_states: 20,
        ..SuiteConfig::default()
    };
    let reports = run_suite(&cfg);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    std::process::exit(i32::from(failed > 0));
}
