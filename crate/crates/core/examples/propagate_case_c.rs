//! Closed-loop propagation of Case C until insertion, with the time history
//! written as CSV.
//!
//! `cargo run --release --example propagate_case_c -- [trajectory.csv]`

use clftraj::astrodyn::{canonicalize, CaseId};
use clftraj::bench::load_case;
use clftraj::guidance::ClfLaw;
use clftraj::propagate::{propagate_case, PropagationConfig};
use clftraj::spdparam::WeightMatrix;

fn main() -> clftraj::Result<()> {
    let case = load_case(CaseId::C);
    let sc = canonicalize(&case)?;
    let law = ClfLaw::for_case(&sc, WeightMatrix::identity(2))?;
    let cfg = PropagationConfig::with_horizon_days(&sc.units, case.horizon_days);
    let tr = propagate_case(&sc, &law, &cfg)?;

    println!("termination: {:?} after {} accepted steps", tr.termination, tr.times.len() - 1);
    if let Some(t) = tr.time_of_flight {
        println!("time of flight: {:.6} days", sc.units.tu_to_days(t));
    }
    let last = tr.states.last().expect("initial state is always logged");
    println!("final mass: {:.3} kg, final w: {:?}", last.m, tr.errors.last().unwrap());

    let path = std::env::args().nth(1).unwrap_or_else(|| "case_c_trajectory.csv".into());
    tr.write_csv(path.as_ref(), &sc.units, sc.mu)?;
    println!("history written to {path}");
    Ok(())
}
