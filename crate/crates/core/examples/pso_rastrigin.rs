//! The generic swarm optimizer on the sphere and Rastrigin functions.
//!
//! `cargo run --release --example pso_rastrigin`

use clftraj::optimize::{pso, PsoConfig};

fn main() -> clftraj::Result<()> {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let rastrigin = |x: &[f64]| {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (std::f64::consts::TAU * v).cos())
                .sum::<f64>()
    };

    let cfg = PsoConfig::new(50, 50, 1, vec![-5.12; 4], vec![5.12; 4]);
    let res = pso(sphere, &cfg)?;
    println!("sphere:    f = {:.3e} at {:.4?}", res.best_value, res.best_x);

    let cfg = PsoConfig {
        max_iterations: 200,
        ..cfg
    };
    let res = pso(rastrigin, &cfg)?;
    println!("rastrigin: f = {:.3e} at {:.4?}", res.best_value, res.best_x);
    let marks: Vec<String> = res.history.iter().step_by(25).map(|v| format!("{v:.3}")).collect();
    println!("global best every 25 iterations: {}", marks.join(" "));
    Ok(())
}
