//! The five benchmark transfers and the multi-run campaign protocol.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::astrodyn::{canonicalize, CaseId, UnitSystem};
use crate::error::{Error, Result};
use crate::guidance::ClfLaw;
use crate::optimize::{pso_minimize, summarize, Mode, PsoConfig, RunRecord, SummaryRow};
use crate::propagate::{propagate_case, PropagationConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralBody {
    Earth,
    Vesta,
}

impl CentralBody {
    pub fn units(self) -> UnitSystem {
        match self {
            CentralBody::Earth => UnitSystem::earth(),
            CentralBody::Vesta => UnitSystem::vesta(),
        }
    }
}

/// Fully specified departure orbit (km, degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialElements {
    pub sma_km: f64,
    pub ecc: f64,
    pub inc_deg: f64,
    pub aop_deg: f64,
    pub raan_deg: f64,
    pub ta_deg: f64,
}

/// Target orbit; `None` marks a free element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetElements {
    pub sma_km: f64,
    pub ecc: f64,
    pub inc_deg: Option<f64>,
    pub aop_deg: Option<f64>,
    pub raan_deg: Option<f64>,
}

/// A catalog transfer in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferCase {
    pub id: CaseId,
    pub initial: InitialElements,
    pub target: TargetElements,
    pub thrust_n: f64,
    pub mass_kg: f64,
    pub isp_s: f64,
    pub body: CentralBody,
    pub swarm_size: usize,
    pub max_iterations: usize,
    /// Integration cap used as the default horizon.
    pub horizon_days: f64,
}

impl TransferCase {
    pub fn error_dim(&self) -> usize {
        self.id.error_dim()
    }
}

/// Catalog entry for `id`. The departure true anomaly is zero for every case.
pub fn load_case(id: CaseId) -> TransferCase {
    let earth = CentralBody::Earth;
    match id {
        CaseId::A => TransferCase {
            id,
            initial: initial(7000.0, 0.01, 0.05, 0.0, 0.0),
            target: TargetElements {
                sma_km: 42000.0,
                ecc: 0.01,
                inc_deg: None,
                aop_deg: None,
                raan_deg: None,
            },
            thrust_n: 1.0,
            mass_kg: 300.0,
            isp_s: 3100.0,
            body: earth,
            swarm_size: 50,
            max_iterations: 50,
            horizon_days: 30.0,
        },
        CaseId::B => TransferCase {
            id,
            initial: initial(24505.9, 0.725, 7.05, 0.0, 0.0),
            target: TargetElements {
                sma_km: 42165.0,
                ecc: 0.001,
                inc_deg: Some(0.05),
                aop_deg: None,
                raan_deg: None,
            },
            thrust_n: 0.350,
            mass_kg: 2000.0,
            isp_s: 2000.0,
            body: earth,
            swarm_size: 50,
            max_iterations: 50,
            horizon_days: 300.0,
        },
        CaseId::C => TransferCase {
            id,
            initial: initial(9222.7, 0.2, 0.573, 0.0, 0.0),
            target: TargetElements {
                sma_km: 30000.0,
                ecc: 0.7,
                inc_deg: None,
                aop_deg: None,
                raan_deg: None,
            },
            thrust_n: 9.3,
            mass_kg: 300.0,
            isp_s: 3100.0,
            body: earth,
            swarm_size: 50,
            max_iterations: 50,
            horizon_days: 4.0,
        },
        CaseId::D => TransferCase {
            id,
            initial: initial(944.64, 0.015, 90.06, 156.90, -24.60),
            target: TargetElements {
                sma_km: 401.72,
                ecc: 0.012,
                inc_deg: Some(90.01),
                aop_deg: None,
                raan_deg: Some(-40.73),
            },
            thrust_n: 0.045,
            mass_kg: 950.0,
            isp_s: 3045.0,
            body: CentralBody::Vesta,
            swarm_size: 50,
            max_iterations: 50,
            horizon_days: 60.0,
        },
        CaseId::E => TransferCase {
            id,
            initial: initial(24505.9, 0.725, 0.06, 0.0, 0.0),
            target: TargetElements {
                sma_km: 26500.0,
                ecc: 0.7,
                inc_deg: Some(116.0),
                aop_deg: Some(270.0),
                raan_deg: Some(180.0),
            },
            thrust_n: 2.0,
            mass_kg: 2000.0,
            isp_s: 2000.0,
            body: earth,
            swarm_size: 100,
            max_iterations: 300,
            horizon_days: 250.0,
        },
    }
}

fn initial(sma_km: f64, ecc: f64, inc_deg: f64, aop_deg: f64, raan_deg: f64) -> InitialElements {
    InitialElements {
        sma_km,
        ecc,
        inc_deg,
        aop_deg,
        raan_deg,
        ta_deg: 0.0,
    }
}

/// Optional replacements for the default propagation settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationOverrides {
    pub epsilon: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub horizon_days: Option<f64>,
    pub max_steps: Option<usize>,
}

impl PropagationOverrides {
    pub fn apply(&self, case: &TransferCase) -> PropagationConfig {
        let units = case.body.units();
        let days = self.horizon_days.unwrap_or(case.horizon_days);
        let mut cfg = PropagationConfig::with_horizon_days(&units, days);
        if let Some(x) = self.epsilon {
            cfg.epsilon = x;
        }
        if let Some(x) = self.rel_tol {
            cfg.rel_tol = x;
        }
        if let Some(x) = self.abs_tol {
            cfg.abs_tol = x;
        }
        if let Some(x) = self.max_steps {
            cfg.max_steps = x;
        }
        cfg
    }
}

/// Optional replacements for the swarm settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PsoOverrides {
    pub swarm_size: Option<usize>,
    pub max_iterations: Option<usize>,
    pub inertia: Option<f64>,
    pub cognitive: Option<f64>,
    pub social: Option<f64>,
    pub velocity_clamp: Option<f64>,
}

impl PsoOverrides {
    pub fn apply(&self, case: &TransferCase, mode: Mode, seed: u64) -> PsoConfig {
        let mut cfg = PsoConfig::for_case(case, mode, seed);
        if let Some(x) = self.swarm_size {
            cfg.swarm_size = x;
        }
        if let Some(x) = self.max_iterations {
            cfg.max_iterations = x;
        }
        if let Some(x) = self.inertia {
            cfg.inertia = x;
        }
        if let Some(x) = self.cognitive {
            cfg.cognitive = x;
        }
        if let Some(x) = self.social {
            cfg.social = x;
        }
        if let Some(x) = self.velocity_clamp {
            cfg.velocity_clamp = x;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOptions {
    pub runs: usize,
    pub base_seed: u64,
    pub propagation: PropagationOverrides,
    pub pso: PsoOverrides,
    /// Root of the results tree; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        Self {
            runs: 5,
            base_seed: 0,
            propagation: PropagationOverrides::default(),
            pso: PsoOverrides::default(),
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub records: Vec<RunRecord>,
    pub summary: SummaryRow,
}

/// Directory holding the runs of one case and mode.
pub fn run_dir(root: &Path, case: CaseId, mode: Mode) -> PathBuf {
    root.join(case.to_string()).join(mode.as_str())
}

/// Run `opts.runs` independent swarms with seeds `base_seed, base_seed + 1, ...`.
///
/// With an output directory, each run is saved as `run<k>.json` together with
/// the trajectory of its best weighting matrix in `run<k>_history.csv`.
pub fn run_campaign(id: CaseId, mode: Mode, opts: &CampaignOptions) -> Result<Campaign> {
    if opts.runs == 0 {
        return Err(Error::Argument("a campaign needs at least one run".into()));
    }
    let case = load_case(id);
    let prop = opts.propagation.apply(&case);
    let mut records = Vec::with_capacity(opts.runs);
    for k in 0..opts.runs {
        let seed = opts.base_seed + k as u64;
        let cfg = opts.pso.apply(&case, mode, seed);
        let mut rec = pso_minimize(&case, mode, &cfg, &prop)?;
        rec.run_index = k + 1;
        if let Some(root) = &opts.out_dir {
            save_run(root, &rec)?;
        }
        records.push(rec);
    }
    let summary = summarize(&records)?;
    Ok(Campaign { records, summary })
}

fn save_run(root: &Path, rec: &RunRecord) -> Result<()> {
    let dir = run_dir(root, rec.case, rec.mode);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let json = dir.join(format!("run{}.json", rec.run_index));
    let text = serde_json::to_string_pretty(rec).map_err(|e| Error::ser(&json, e))?;
    std::fs::write(&json, text + "\n").map_err(|e| Error::io(&json, e))?;
    write_history(rec, &dir.join(format!("run{}_history.csv", rec.run_index)))?;
    Ok(())
}

/// Re-propagate the best matrix of `rec` and write its time history.
pub fn write_history(rec: &RunRecord, path: &Path) -> Result<Trajectory> {
    let case = canonicalize(&load_case(rec.case))?;
    let law = ClfLaw::for_case(&case, rec.weight_matrix()?)?;
    let traj = propagate_case(&case, &law, &rec.config.propagation)?;
    traj.write_csv(path, &case.units, case.mu)?;
    Ok(traj)
}

/// Load every `run<k>.json` below `root` (layout `<case>/<mode>/`).
pub fn load_records(root: &Path) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for case in CaseId::ALL {
        for mode in Mode::BOTH {
            let dir = run_dir(root, case, mode);
            let Ok(entries) = std::fs::read_dir(&dir) else {
                continue;
            };
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.extension().is_some_and(|x| x == "json")
                        && p.file_name()
                            .and_then(|n| n.to_str())
                            .is_some_and(|n| n.starts_with("run"))
                })
                .collect();
            paths.sort();
            for p in paths {
                let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                let rec: RunRecord = serde_json::from_str(&text).map_err(|e| Error::ser(&p, e))?;
                out.push(rec);
            }
        }
    }
    out.sort_by_key(|r| (r.case, r.mode, r.run_index));
    Ok(out)
}

/// Rendered results table plus its per-row summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<SummaryRow>,
    pub table: String,
}

/// Group records by case and mode and summarize each group.
pub fn summary_rows(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::Argument("no run records to report".into()));
    }
    let mut groups: BTreeMap<(CaseId, Mode), Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.case, r.mode)).or_default().push(r.clone());
    }
    groups.values().map(|g| summarize(g)).collect()
}

/// Text table in days: one row per case and matrix form, best run marked `*`.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let n_runs = rows.iter().map(|r| r.runs.len()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = write!(out, "{:<5}{:<10}", "Case", "Matrix");
    for k in 1..=n_runs {
        let _ = write!(out, "{:>13}", format!("Run {k}"));
    }
    let _ = writeln!(out, "{:>13}", "Average");
    for r in rows {
        let label = match r.mode {
            Mode::Diagonal => "K1 diag",
            Mode::Full => "K2 full",
        };
        let _ = write!(out, "{:<5}{:<10}", r.case.to_string(), label);
        for k in 0..n_runs {
            let cell = match r.runs.get(k) {
                Some(v) if k == r.best_index => format!("{v:.4}*"),
                Some(v) => format!("{v:.4} "),
                None => "- ".to_string(),
            };
            let _ = write!(out, "{cell:>13}");
        }
        let _ = writeln!(out, "{:>12.4}", r.average);
    }
    out
}

/// Summarize `records`, and with `out_dir` write `summary.csv` and `summary.json`.
pub fn emit_report(records: &[RunRecord], out_dir: Option<&Path>) -> Result<Report> {
    let rows = summary_rows(records)?;
    let table = render_table(&rows);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_summary_csv(&rows, &dir.join("summary.csv"))?;
        let json = dir.join("summary.json");
        let text = serde_json::to_string_pretty(&rows).map_err(|e| Error::ser(&json, e))?;
        std::fs::write(&json, text + "\n").map_err(|e| Error::io(&json, e))?;
    }
    Ok(Report { rows, table })
}

fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let n_runs = rows.iter().map(|r| r.runs.len()).max().unwrap_or(0);
    let mut wtr = csv::Writer::from_path(path).map_err(|e| Error::ser(path, e))?;
    let mut header = vec!["case".to_string(), "mode".to_string()];
    header.extend((1..=n_runs).map(|k| format!("run{k}_days")));
    header.extend(["average_days", "best_days", "best_run"].map(String::from));
    wtr.write_record(&header).map_err(|e| Error::ser(path, e))?;
    for r in rows {
        let mut rec = vec![r.case.to_string(), r.mode.to_string()];
        rec.extend((0..n_runs).map(|k| r.runs.get(k).map_or(String::new(), |v| format!("{v:.6}"))));
        rec.push(format!("{:.6}", r.average));
        rec.push(format!("{:.6}", r.best));
        rec.push((r.best_index + 1).to_string());
        wtr.write_record(&rec).map_err(|e| Error::ser(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}
