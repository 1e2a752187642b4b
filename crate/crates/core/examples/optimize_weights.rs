//! Tune the weighting matrix of one case with the swarm.
//!
//! `cargo run --release --example optimize_weights -- C full 0`
//!
//! Arguments: case letter, `diagonal` or `full`, seed. Catalog swarm sizes are
//! used, so Case C finishes in well under a minute.

use clftraj::bench::load_case;
use clftraj::optimize::{pso_minimize, Mode, PsoConfig};
use clftraj::propagate::PropagationConfig;

fn main() -> clftraj::Result<()> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "C".into()).parse()?;
    let mode: Mode = args.next().unwrap_or_else(|| "full".into()).parse()?;
    let seed = args.next().map_or(Ok(0), |s| s.parse()).map_err(|e| clftraj::Error::Argument(format!("seed: {e}")))?;

    let case = load_case(id);
    let cfg = PsoConfig::for_case(&case, mode, seed);
    let prop = PropagationConfig::with_horizon_days(&case.body.units(), case.horizon_days);
    let rec = pso_minimize(&case, mode, &cfg, &prop)?;

    println!("case {id}, {mode} matrix, seed {seed}: {:.4} days (converged: {})", rec.best_tof_days, rec.converged);
    println!("decision vector {:.4?}", rec.best_x);
    for row in rec.weight_matrix()?.to_rows() {
        println!("  {row:>10.4?}");
    }
    Ok(())
}
