//! Canonical units and element/state conversion for the five catalog cases.
//!
//! `cargo run --example orbital_elements`

use clftraj::astrodyn::{canonicalize, elements_from_state, CaseId};
use clftraj::bench::load_case;

fn main() -> clftraj::Result<()> {
    for id in CaseId::ALL {
        let case = load_case(id);
        let sc = canonicalize(&case)?;
        let u = sc.units;
        println!(
            "case {id} ({:?}): DU = {} km, TU = {:.4} s, T = {:.4e} kg DU/TU^2, mdot = {:.4e} kg/TU",
            case.body, u.distance_unit, u.time_unit, sc.spacecraft.thrust, sc.spacecraft.mass_flow
        );
        let s = sc.initial;
        println!("  r = {:?} DU, v = {:?} DU/TU", s.r, s.v);
        let el = elements_from_state(&s, sc.mu)?;
        println!(
            "  back to elements: a = {:.4} km, e = {:.6}, i = {:.4} deg, raan = {:.4} deg, aop = {:.4} deg, ta = {:.4} deg",
            u.du_to_km(el.sma),
            el.ecc,
            el.inc.to_degrees(),
            el.raan.to_degrees(),
            el.aop.to_degrees(),
            el.ta.to_degrees()
        );
    }
    Ok(())
}
