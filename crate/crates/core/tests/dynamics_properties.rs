use std::f64::consts::TAU;

use proptest::prelude::*;

use clftraj::astrodyn::{
    canonicalize, momentum_and_eccentricity_vectors, state_from_elements, CartesianState, CaseId, OrbitalElements,
    ScaledCase,
};
use clftraj::bench::load_case;
use clftraj::diffnum::{dot, Dual};
use clftraj::guidance::ClfLaw;
use clftraj::optimize::Mode;
use clftraj::validate::element_mismatch;

fn case_strategy() -> impl Strategy<Value = CaseId> {
    prop::sample::select(CaseId::ALL.to_vec())
}

fn orbit() -> impl Strategy<Value = OrbitalElements> {
    (
        1.2f64..8.0,
        0.02f64..0.8,
        10f64.to_radians()..170f64.to_radians(),
        0.0f64..TAU,
        0.0f64..TAU,
        0.0f64..TAU,
    )
        .prop_map(|(sma, ecc, inc, raan, aop, ta)| OrbitalElements { sma, ecc, inc, raan, aop, ta })
}

fn decision(case: CaseId, mode: Mode) -> impl Strategy<Value = Vec<f64>> {
    let n = case.error_dim();
    let (lo, hi) = mode.bounds(n);
    lo.into_iter()
        .zip(hi)
        .enumerate()
        .map(move |(i, (l, h))| if i < n { (0.1f64..h).boxed() } else { (l..h).boxed() })
        .collect::<Vec<_>>()
}

fn scaled(case: CaseId) -> ScaledCase {
    canonicalize(&load_case(case)).unwrap()
}

fn law_strategy() -> impl Strategy<Value = (ScaledCase, ClfLaw)> {
    (case_strategy(), prop::sample::select(Mode::BOTH.to_vec())).prop_flat_map(|(case, mode)| {
        decision(case, mode).prop_map(move |x| {
            let sc = scaled(case);
            let k = mode.weight_matrix(case.error_dim(), &x).unwrap();
            let law = ClfLaw::for_case(&sc, k).unwrap();
            (sc, law)
        })
    })
}

/// Central differences with the fixed step `h = 1e-6`.
fn central(f: impl Fn([f64; 3]) -> f64, x: [f64; 3]) -> [f64; 3] {
    let h = 1e-6;
    std::array::from_fn(|k| {
        let (mut p, mut m) = (x, x);
        p[k] += h;
        m[k] -= h;
        (f(p) - f(m)) / (2.0 * h)
    })
}

fn close(ad: &[f64; 3], fd: &[f64; 3]) -> bool {
    let d: [f64; 3] = std::array::from_fn(|k| ad[k] - fd[k]);
    dot(&d, &d).sqrt() <= (1e-6 * dot(ad, ad).sqrt()).max(1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn clf_gradients_match_central_differences((sc, law) in law_strategy(), el in orbit()) {
        let s = state_from_elements(&el, sc.mu, 100.0).unwrap();
        let v_of = |r: [f64; 3], v: [f64; 3]| law.clf_value(&CartesianState { r, v, m: s.m }).unwrap();
        let gv = law.clf_velocity_gradient(&s).unwrap();
        let gr = law.clf_position_gradient(&s).unwrap();
        let fv = central(|v| v_of(s.r, v), s.v);
        let fr = central(|r| v_of(r, s.v), s.r);
        prop_assert!(close(&gv, &fv), "dV/dv {gv:?} vs {fv:?}");
        prop_assert!(close(&gr, &fr), "dV/dr {gr:?} vs {fr:?}");
    }

    #[test]
    fn steering_minimizes_clf_rate(
        (sc, law) in law_strategy(),
        el in orbit(),
        u in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let n = dot(&u, &u).sqrt();
        prop_assume!(n > 1e-3);
        let u = u.map(|x| x / n);
        let s = state_from_elements(&el, sc.mu, 100.0).unwrap();
        let t = sc.spacecraft.thrust;
        let alpha = law.steering_direction(&s).unwrap();
        let best = law.clf_time_derivative(&s, &alpha, t).unwrap();
        let other = law.clf_time_derivative(&s, &u, t).unwrap();
        prop_assert!(best <= other + 1e-12);
        // the gap is (T/m)(|g| + g.u)
        let g = law.clf_velocity_gradient(&s).unwrap();
        let gap = t / s.m * (dot(&g, &g).sqrt() + dot(&g, &u));
        prop_assert!(((other - best) - gap).abs() <= 1e-12 * (1.0 + gap.abs() + best.abs()));
    }

    #[test]
    fn clf_is_non_negative((sc, law) in law_strategy(), el in orbit()) {
        let s = state_from_elements(&el, sc.mu, 100.0).unwrap();
        prop_assert!(law.clf_value(&s).unwrap() >= 0.0);
    }

    #[test]
    fn eccentricity_is_perpendicular_to_momentum(el in orbit()) {
        let s = state_from_elements(&el, 1.0, 1.0).unwrap();
        let (h, e) = momentum_and_eccentricity_vectors::<f64>(&s.r, &s.v, 1.0).unwrap();
        let bound = 1e-12 * dot(&e, &e).sqrt() * dot(&h, &h).sqrt() + 1e-15;
        prop_assert!(dot(&e, &h).abs() <= bound);
    }

    #[test]
    fn element_round_trip(
        sma in 0.5f64..10.0,
        ecc in 1e-4f64..0.9,
        inc in 0.1f64.to_radians()..179f64.to_radians(),
        raan in 0.0f64..TAU,
        aop in 0.0f64..TAU,
        ta in 0.0f64..TAU,
    ) {
        let el = OrbitalElements { sma, ecc, inc, raan, aop, ta };
        let err = element_mismatch(&el);
        prop_assert!(err <= 1e-9, "{el:?}: {err:e}");
    }

    #[test]
    fn error_vector_vanishes_on_target(case in case_strategy(), ta in 0.0f64..TAU, free in prop::array::uniform3(0.0f64..TAU)) {
        let c = load_case(case);
        let sc = scaled(case);
        let t = &c.target;
        let el = OrbitalElements {
            sma: sc.units.km_to_du(t.sma_km),
            ecc: t.ecc,
            inc: t.inc_deg.map_or(0.2 + free[0] / 10.0, f64::to_radians),
            raan: t.raan_deg.map_or(free[1], f64::to_radians),
            aop: t.aop_deg.map_or(free[2], f64::to_radians),
            ta,
        };
        let s = state_from_elements(&el, 1.0, 10.0).unwrap();
        let law = ClfLaw::for_case(&sc, clftraj::spdparam::WeightMatrix::identity(case.error_dim())).unwrap();
        let w = law.error_vector(&s).unwrap();
        prop_assert!(w.inf_norm() <= 1e-10, "{case}: {:?}", w.values());
    }

    #[test]
    fn constant_duals_match_reals(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        let (x, y) = (Dual::<3>::constant(a), Dual::<3>::constant(b));
        prop_assert_eq!((x + y).value.to_bits(), (a + b).to_bits());
        prop_assert_eq!((x - y).value.to_bits(), (a - b).to_bits());
        prop_assert_eq!((x * y).value.to_bits(), (a * b).to_bits());
        prop_assert_eq!((x * y).partials, [0.0; 3]);
    }
}
