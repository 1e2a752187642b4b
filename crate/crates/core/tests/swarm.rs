use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use proptest::prelude::*;

use clftraj::astrodyn::CaseId;
use clftraj::bench::{emit_report, run_campaign, CampaignOptions, PsoOverrides};
use clftraj::optimize::{pso, Mode, Objective, PsoConfig};
use clftraj::bench::load_case;

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (std::f64::consts::TAU * v).cos())
            .sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn particles_stay_in_bounds_and_best_never_rises(
        seed in any::<u64>(),
        lo in prop::collection::vec(-10.0f64..0.0, 1..5),
        width in 0.1f64..20.0,
    ) {
        let hi: Vec<f64> = lo.iter().map(|l| l + width).collect();
        let cfg = PsoConfig::new(12, 15, seed, lo.clone(), hi.clone());
        let escaped = AtomicBool::new(false);
        let calls = AtomicUsize::new(0);
        let res = pso(
            |x| {
                calls.fetch_add(1, Ordering::Relaxed);
                if x.iter().zip(&lo).zip(&hi).any(|((v, l), h)| v < l || v > h) {
                    escaped.store(true, Ordering::Relaxed);
                }
                rastrigin(x)
            },
            &cfg,
        )
        .unwrap();
        prop_assert!(!escaped.load(Ordering::Relaxed));
        prop_assert_eq!(calls.load(Ordering::Relaxed), 12 * 16);
        prop_assert!(res.history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*res.history.last().unwrap(), res.best_value);
        prop_assert_eq!(rastrigin(&res.best_x), res.best_value);
    }
}

#[test]
fn sphere_reaches_zero() {
    let cfg = PsoConfig::new(50, 50, 42, vec![-10.0; 5], vec![10.0; 5]);
    let res = pso(|x| x.iter().map(|v| v * v).sum(), &cfg).unwrap();
    assert!(res.best_value < 1e-3);
}

#[test]
fn result_does_not_depend_on_thread_count() {
    let cfg = PsoConfig::new(20, 20, 9, vec![-5.12; 3], vec![5.12; 3]);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| pso(rastrigin, &cfg).unwrap());
    let b = four.install(|| pso(rastrigin, &cfg).unwrap());
    assert_eq!(a, b);
}

#[test]
fn objective_is_finite_at_the_eigenvalue_floor() {
    let case = load_case(CaseId::C);
    for mode in Mode::BOTH {
        let obj = Objective::for_case(&case, mode).unwrap();
        let (lo, hi) = mode.bounds(2);
        for x in [lo.clone(), hi.clone()] {
            let v = obj.value(&x);
            assert!(v.is_finite() && v > 0.0, "{mode} {x:?}: {v}");
        }
    }
}

#[test]
fn full_mode_contains_diagonal_mode() {
    let case = load_case(CaseId::C);
    let diag = Objective::for_case(&case, Mode::Diagonal).unwrap();
    let full = Objective::for_case(&case, Mode::Full).unwrap();
    let w = [2.5, 4.0];
    assert_eq!(diag.value(&w), full.value(&[2.5, 4.0, 0.0]));
}

#[test]
fn same_seed_gives_identical_report_bytes() {
    let opts = CampaignOptions {
        runs: 2,
        base_seed: 3,
        pso: PsoOverrides {
            swarm_size: Some(5),
            max_iterations: Some(3),
            ..PsoOverrides::default()
        },
        ..CampaignOptions::default()
    };
    let render = || {
        let dir = tempfile::tempdir().unwrap();
        let opts = CampaignOptions {
            out_dir: Some(dir.path().to_path_buf()),
            ..opts.clone()
        };
        let mut recs = run_campaign(CaseId::C, Mode::Diagonal, &opts).unwrap().records;
        recs.extend(run_campaign(CaseId::C, Mode::Full, &opts).unwrap().records);
        let rep = emit_report(&recs, Some(dir.path())).unwrap();
        let csv = std::fs::read(dir.path().join("summary.csv")).unwrap();
        let json = std::fs::read(dir.path().join("C/full/run2.json")).unwrap();
        (rep.table, csv, json)
    };
    assert_eq!(render(), render());
}
