//! Command-line front end: `run`, `report` and `validate`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::astrodyn::CaseId;
use crate::bench::{emit_report, load_records, run_campaign, CampaignOptions, PropagationOverrides, PsoOverrides};
use crate::optimize::{Mode, PsoConfig};
use crate::validate::{run_suite, SuiteConfig};

/// Exit status for usage errors (unknown case, bad flag values).
pub const EXIT_USAGE: i32 = 2;
/// Exit status for I/O, configuration or failed validation.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "clftraj",
    version,
    about = "Lyapunov-guided low-thrust transfers with swarm-tuned weighting matrices"
)]
pub struct Cli {
    /// Worker threads for objective evaluations (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize weighting matrices for the selected cases and write results.
    Run(RunArgs),
    /// Summarize saved runs into a table, summary.csv and summary.json.
    Report(ReportArgs),
    /// Run the built-in property checks and print pass/fail counts.
    Validate(ValidateArgs),
}

/// Case selection: one letter or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseSelection {
    One(CaseId),
    All,
}

impl CaseSelection {
    pub fn cases(self) -> Vec<CaseId> {
        match self {
            CaseSelection::One(c) => vec![c],
            CaseSelection::All => CaseId::ALL.to_vec(),
        }
    }
}

fn parse_case(s: &str) -> Result<CaseSelection, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(CaseSelection::All);
    }
    CaseId::from_str(s)
        .map(CaseSelection::One)
        .map_err(|_| format!("unknown case '{s}' (expected A, B, C, D, E or all)"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeSelection {
    Diagonal,
    Full,
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeSelection::Diagonal => vec![Mode::Diagonal],
            ModeSelection::Full => vec![Mode::Full],
            ModeSelection::Both => Mode::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Results directory.
    #[arg(long, env = "CLFTRAJ_OUT", default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Transfer case: A, B, C, D, E or all.
    #[arg(long, value_parser = parse_case)]
    pub case: CaseSelection,

    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeSelection,

    /// Independent runs per case and mode.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,

    /// Seed of the first run; run k uses seed + k - 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub out: OutArg,

    /// Insertion threshold on |w|_inf [default: 1e-4].
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Integrator relative tolerance [default: 1e-10].
    #[arg(long)]
    pub rel_tol: Option<f64>,

    /// Integrator absolute tolerance, canonical units [default: 1e-12].
    #[arg(long)]
    pub abs_tol: Option<f64>,

    /// Propagation horizon in days [default: per case, A 30, B 300, C 4, D 60, E 250].
    #[arg(long)]
    pub horizon_days: Option<f64>,

    /// Integrator step budget per propagation [default: 300000].
    #[arg(long)]
    pub max_steps: Option<usize>,

    /// Particles per swarm [default: per case, 50 or 100 for E].
    #[arg(long)]
    pub swarm_size: Option<usize>,

    /// Swarm iterations [default: per case, 50 or 300 for E].
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Inertia weight [default: 0.7298].
    #[arg(long)]
    pub inertia: Option<f64>,

    /// Cognitive coefficient [default: 1.49618].
    #[arg(long)]
    pub cognitive: Option<f64>,

    /// Social coefficient [default: 1.49618].
    #[arg(long)]
    pub social: Option<f64>,

    /// Velocity limit as a fraction of each variable's range [default: 0.2].
    #[arg(long)]
    pub velocity_clamp: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunArgs {
    fn campaign_options(&self) -> CampaignOptions {
        CampaignOptions {
            runs: self.runs,
            base_seed: self.seed,
            propagation: PropagationOverrides {
                epsilon: self.epsilon,
                rel_tol: self.rel_tol,
                abs_tol: self.abs_tol,
                horizon_days: self.horizon_days,
                max_steps: self.max_steps,
            },
            pso: PsoOverrides {
                swarm_size: self.swarm_size,
                max_iterations: self.iterations,
                inertia: self.inertia,
                cognitive: self.cognitive,
                social: self.social,
                velocity_clamp: self.velocity_clamp,
            },
            out_dir: Some(self.out.out.clone()),
        }
    }
}

/// Parse `args` (including the program name) and execute; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // only the first configuration in a process takes effect
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let opts = a.campaign_options();
    // reject bad knobs before any work is done
    for case in a.case.cases() {
        let c = crate::bench::load_case(case);
        opts.propagation.apply(&c).validate()?;
        for mode in a.mode.modes() {
            let cfg: PsoConfig = opts.pso.apply(&c, mode, opts.base_seed);
            cfg.validate()?;
        }
    }
    for case in a.case.cases() {
        for mode in a.mode.modes() {
            let camp = run_campaign(case, mode, &opts)?;
            let _ = writeln!(
                out,
                "case {case} {mode}: best {:.4} d, average {:.4} d over {} runs",
                camp.summary.best,
                camp.summary.average,
                camp.records.len()
            );
        }
    }
    let records = load_records(&a.out.out)?;
    let rep = emit_report(&records, Some(&a.out.out))?;
    let _ = write!(out, "\n{}", rep.table);
    let _ = writeln!(out, "summary written to {}", a.out.out.join("summary.csv").display());
    Ok(0)
}

fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let records = load_records(&a.out.out)?;
    let rep = emit_report(&records, Some(&a.out.out))?;
    let _ = write!(out, "{}", rep.table);
    Ok(0)
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let cfg = SuiteConfig {
        seed: a.seed,
        ..SuiteConfig::default()
    };
    let reports = run_suite(&cfg);
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{passed} passed, {} failed", reports.len() - passed);
    Ok(if passed == reports.len() { 0 } else { EXIT_FAILURE })
}
