//! The pointwise-optimal thrust direction and the CLF rate it produces,
//! compared with a sweep of other directions.
//!
//! `cargo run --example steering_law`

use clftraj::astrodyn::{canonicalize, CaseId};
use clftraj::bench::load_case;
use clftraj::guidance::ClfLaw;
use clftraj::spdparam::WeightMatrix;

fn main() -> clftraj::Result<()> {
    let sc = canonicalize(&load_case(CaseId::A))?;
    let law = ClfLaw::for_case(&sc, WeightMatrix::diagonal(&[37.9855, 100.0])?)?;
    let s = sc.initial;
    let thrust = sc.spacecraft.thrust;

    let alpha = law.steering_direction(&s)?;
    let best = law.clf_time_derivative(&s, &alpha, thrust)?;
    println!("w = {:?}, V = {:.6}", law.error_vector(&s)?.values(), law.clf_value(&s)?);
    println!("alpha* = {alpha:.6?}, Vdot = {best:.6e}");

    for deg in (0..360).step_by(45) {
        let th = f64::from(deg).to_radians();
        let u = [th.cos(), th.sin(), 0.0];
        let vdot = law.clf_time_derivative(&s, &u, thrust)?;
        println!("  in-plane {deg:>3} deg: Vdot = {vdot:.6e} (excess {:.3e})", vdot - best);
    }
    Ok(())
}
