//! Acceptance gate. Every criterion prints one `PASS`/`FAIL` line on stdout
//! (bypassing the test harness capture) before asserting.
//!
//! Criteria 10, 11 and the B/D/E part of 12 are long campaigns and are
//! `#[ignore]`d; run them with `cargo test --release --test acceptance -- --ignored`.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use clftraj::astrodyn::CaseId;
use clftraj::bench::{run_campaign, Campaign, CampaignOptions};
use clftraj::optimize::Mode;
use clftraj::validate::{self, CheckReport};

const BASE_SEED: u64 = 0;
const RUNS: usize = 5;

fn report(id: &str, pass: bool, detail: impl AsRef<str>) {
    let line = format!(
        "[acceptance] criterion {id:<3} {} {}\n",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn checks(id: &str, reports: &[CheckReport], elapsed: Option<(Duration, Duration)>) {
    let mut pass = reports.iter().all(CheckReport::passed);
    let mut detail: Vec<String> = reports
        .iter()
        .map(|r| format!("{}: {}/{} ok, worst {:.2e} <= {:.0e}", r.name, r.trials - r.failures, r.trials, r.worst, r.tolerance))
        .collect();
    if let Some((took, limit)) = elapsed {
        pass &= took < limit;
        detail.push(format!("runtime {:.2?} < {:?}", took, limit));
    }
    report(id, pass, detail.join("; "));
    assert!(pass, "criterion {id} failed: {reports:?}");
}

#[test]
fn criterion_01_spd_parameterization() {
    let t0 = Instant::now();
    let reps = [
        validate::spd_orthonormality(1000, BASE_SEED),
        validate::spd_symmetry(1000, BASE_SEED),
        validate::spd_eigenvalues(1000, BASE_SEED),
    ];
    checks("1", &reps, Some((t0.elapsed(), Duration::from_secs(10))));
}

#[test]
fn criterion_02_parameter_count() {
    checks("2", &[validate::parameter_counts()], None);
}

#[test]
fn criterion_03_gradients_match_finite_differences() {
    let t0 = Instant::now();
    let rep = validate::clf_gradients(100, BASE_SEED);
    checks("3", &[rep], Some((t0.elapsed(), Duration::from_secs(30))));
}

#[test]
fn criterion_04_pointwise_minimality() {
    checks("4", &[validate::pointwise_minimality(50, 100, BASE_SEED)], None);
}

#[test]
fn criterion_05_zero_thrust_conservation() {
    checks("5", &[validate::zero_thrust_conservation(100)], None);
}

#[test]
fn criterion_06_element_round_trip() {
    checks("6", &[validate::element_round_trip(1000, BASE_SEED)], None);
}

#[test]
fn criterion_07_case_e_fixtures() {
    checks("7", &[validate::case_e_fixtures()], None);
}

struct Pair {
    diagonal: Campaign,
    full: Campaign,
}

fn campaign_pair(id: CaseId) -> &'static Pair {
    static CELLS: [OnceLock<Pair>; 5] = [const { OnceLock::new() }; 5];
    let idx = CaseId::ALL.iter().position(|c| *c == id).unwrap();
    CELLS[idx].get_or_init(|| {
        let opts = CampaignOptions {
            runs: RUNS,
            base_seed: BASE_SEED,
            ..CampaignOptions::default()
        };
        let t0 = Instant::now();
        let diagonal = run_campaign(id, Mode::Diagonal, &opts).expect("diagonal campaign");
        let full = run_campaign(id, Mode::Full, &opts).expect("full campaign");
        let mut out = std::io::stdout().lock();
        let _ = writeln!(
            out,
            "[acceptance] case {id} campaigns done in {:.1?}: diagonal runs {:?}, full runs {:?}",
            t0.elapsed(),
            diagonal.summary.runs,
            full.summary.runs
        );
        Pair { diagonal, full }
    })
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    ((value - target) / target).abs() <= rel
}

fn best_of_five(id: &str, case: CaseId, diag_target: f64, full_target: f64, rel: f64) {
    let p = campaign_pair(case);
    let (d, f) = (p.diagonal.summary.best, p.full.summary.best);
    let ok_d = within(d, diag_target, rel);
    let ok_f = within(f, full_target, rel);
    let ordered = f < d;
    let pass = ok_d && ok_f && ordered;
    report(
        id,
        pass,
        format!(
            "case {case}: best diagonal {d:.4} d (target {diag_target} +/- {:.0}%: {}), best full {f:.4} d (target {full_target} +/- {:.0}%: {}), full < diagonal: {ordered}",
            rel * 100.0,
            ok_d,
            rel * 100.0,
            ok_f
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_case_c_best_of_five() {
    best_of_five("8", CaseId::C, 1.5102, 1.4918, 0.01);
}

#[test]
fn criterion_09_case_a_best_of_five() {
    best_of_five("9", CaseId::A, 14.5700, 14.4748, 0.01);
}

fn averages_ordered(id: &str, cases: &[CaseId]) {
    let mut pass = true;
    let mut parts = Vec::new();
    for &c in cases {
        let p = campaign_pair(c);
        let (d, f) = (p.diagonal.summary.average, p.full.summary.average);
        pass &= f < d;
        parts.push(format!("{c}: avg full {f:.4} d < avg diagonal {d:.4} d: {}", f < d));
    }
    report(id, pass, parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_12_average_ordering_a_c() {
    averages_ordered("12", &[CaseId::A, CaseId::C]);
}

#[test]
#[ignore = "extended suite: hours of PSO on cases B and D"]
fn criterion_10_cases_b_d_full_beats_diagonal() {
    best_of_five("10", CaseId::B, 142.2285, 139.0203, 0.02);
    best_of_five("10", CaseId::D, 24.9903, 24.6992, 0.02);
}

#[test]
#[ignore = "extended suite: swarm 100 x 300 iterations on case E"]
fn criterion_11_case_e_average_ordering() {
    averages_ordered("11", &[CaseId::E]);
}

#[test]
#[ignore = "extended suite: requires the B, D and E campaigns"]
fn criterion_12_average_ordering_b_d_e() {
    averages_ordered("12", &[CaseId::B, CaseId::D, CaseId::E]);
}
