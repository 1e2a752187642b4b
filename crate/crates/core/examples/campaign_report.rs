//! A small multi-run campaign on Case C, persisted and summarized.
//!
//! `cargo run --release --example campaign_report -- [out_dir]`

use clftraj::astrodyn::CaseId;
use clftraj::bench::{emit_report, load_records, run_campaign, CampaignOptions, PsoOverrides};
use clftraj::optimize::Mode;

fn main() -> clftraj::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "results_demo".into());
    let opts = CampaignOptions {
        runs: 3,
        base_seed: 42,
        pso: PsoOverrides {
            swarm_size: Some(20),
            max_iterations: Some(10),
            ..PsoOverrides::default()
        },
        out_dir: Some(out.clone().into()),
        ..CampaignOptions::default()
    };
    for mode in Mode::BOTH {
        let camp = run_campaign(CaseId::C, mode, &opts)?;
        println!("{mode}: runs {:.4?}", camp.summary.runs);
    }
    let records = load_records(out.as_ref())?;
    let report = emit_report(&records, Some(out.as_ref()))?;
    print!("{}", report.table);
    println!("run records, histories and summary.csv are in {out}/");
    Ok(())
}
