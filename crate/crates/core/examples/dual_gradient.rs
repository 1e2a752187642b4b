//! Forward-mode dual numbers: exact derivatives of `|h|` and of the CLF with
//! respect to velocity, compared with central differences.
//!
//! `cargo run --example dual_gradient`

use clftraj::astrodyn::{canonicalize, CaseId};
use clftraj::bench::load_case;
use clftraj::diffnum::{constant_vector, cross, lift_vector, norm, Dual};
use clftraj::guidance::ClfLaw;
use clftraj::spdparam::WeightMatrix;

fn main() -> clftraj::Result<()> {
    let r = [1.1, 0.2, -0.1];
    let v = [0.05, 0.93, 0.12];

    // |r x v| with velocity as the three seeded directions
    let rd = constant_vector::<Dual<3>>(r);
    let vd = lift_vector(v);
    let h = norm(&cross(&rd, &vd))?;
    println!("|h| = {:.12}, d|h|/dv = {:?}", h.value, h.partials);

    let sc = canonicalize(&load_case(CaseId::C))?;
    let law = ClfLaw::for_case(&sc, WeightMatrix::diagonal(&[3.0, 40.0])?)?;
    let s = sc.initial;
    let eval = law.evaluate(&s.r, &s.v)?;
    println!("Case C departure: V = {:.6e}, w = {:?}", eval.value, eval.w.values());
    println!("dual dV/dv        = {:?}", eval.grad_v);

    let step = 1e-6;
    let fd: Vec<f64> = (0..3)
        .map(|k| {
            let mut p = s;
            let mut m = s;
            p.v[k] += step;
            m.v[k] -= step;
            (law.clf_value(&p).unwrap() - law.clf_value(&m).unwrap()) / (2.0 * step)
        })
        .collect();
    println!("central diff dV/dv = {fd:?}");
    Ok(())
}
