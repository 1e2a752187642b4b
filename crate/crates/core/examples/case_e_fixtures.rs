//! Propagate Case E with the two printed optimum weighting matrices.
//!
//! `cargo run --release --example case_e_fixtures`

use clftraj::astrodyn::{canonicalize, CaseId};
use clftraj::bench::load_case;
use clftraj::guidance::ClfLaw;
use clftraj::propagate::{propagate_case, PropagationConfig};
use clftraj::spdparam::WeightMatrix;
use clftraj::validate::{CASE_E_K1_DIAGONAL, CASE_E_K2};
use nalgebra::DMatrix;

fn main() -> clftraj::Result<()> {
    let case = load_case(CaseId::E);
    let sc = canonicalize(&case)?;
    let cfg = PropagationConfig::with_horizon_days(&sc.units, case.horizon_days);
    let k1 = WeightMatrix::diagonal(&CASE_E_K1_DIAGONAL)?;
    let k2 = WeightMatrix::new(DMatrix::from_fn(6, 6, |i, j| CASE_E_K2[i][j]))?;
    println!("K2 smallest eigenvalue: {:.4}", k2.min_eigenvalue());
    for (label, k) in [("K1 (diagonal)", k1), ("K2 (full)", k2)] {
        let law = ClfLaw::for_case(&sc, k)?;
        let tr = propagate_case(&sc, &law, &cfg)?;
        let last = tr.states.last().expect("at least the initial state");
        match tr.time_of_flight {
            Some(t) => println!(
                "{label}: inserted after {:.4} days, final mass {:.2} kg",
                sc.units.tu_to_days(t),
                last.m
            ),
            None => println!(
                "{label}: no insertion ({:?}) after {:.2} days, |w|_inf = {:.3e}",
                tr.termination,
                sc.units.tu_to_days(*tr.times.last().unwrap()),
                tr.errors.last().unwrap().iter().fold(0.0f64, |a, x| a.max(x.abs()))
            ),
        }
    }
    Ok(())
}
