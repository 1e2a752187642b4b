//! Particle swarm search over weighting matrices.
//!
//! Two parameterizations are searched. `Diagonal` uses `N` positive weights.
//! `Full` uses `N` eigenvalues followed by `N(N-1)/2` rotation angles, turned
//! into a full SPD matrix by [`crate::spdparam::build_spd`]. The objective is
//! the time of flight in days, with a graded penalty for particles that never
//! reach the insertion threshold.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::astrodyn::{canonicalize, CartesianState, CaseId, ScaledCase};
use crate::bench::TransferCase;
use crate::error::{Error, Result};
use crate::guidance::ClfLaw;
use crate::propagate::{propagate_terminal, PropagationConfig};
use crate::spdparam::{angle_count, build_spd, parameter_count, SpdParameters, WeightMatrix};

pub const EIGENVALUE_MIN: f64 = 1e-3;
pub const EIGENVALUE_MAX: f64 = 100.0;
/// Multiplier on `|w(t_end)|_inf` in the non-convergence penalty.
pub const PENALTY_SLOPE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Diagonal,
    Full,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Diagonal, Mode::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Diagonal => "diagonal",
            Mode::Full => "full",
        }
    }

    /// Length of the decision vector for an `n`-dimensional error vector.
    pub fn decision_len(self, n: usize) -> usize {
        match self {
            Mode::Diagonal => n,
            Mode::Full => parameter_count(n),
        }
    }

    /// Box bounds `(lower, upper)` for every decision variable.
    pub fn bounds(self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![EIGENVALUE_MIN; n];
        let mut hi = vec![EIGENVALUE_MAX; n];
        if self == Mode::Full {
            lo.extend(std::iter::repeat_n(0.0, angle_count(n)));
            hi.extend(std::iter::repeat_n(TAU, angle_count(n)));
        }
        (lo, hi)
    }

    /// Weighting matrix encoded by `x`.
    pub fn weight_matrix(self, n: usize, x: &[f64]) -> Result<WeightMatrix> {
        if x.len() != self.decision_len(n) {
            return Err(Error::Contract(format!(
                "{} mode with N = {n} needs {} variables, got {}",
                self,
                self.decision_len(n),
                x.len()
            )));
        }
        match self {
            Mode::Diagonal => WeightMatrix::diagonal(x),
            Mode::Full => build_spd(&SpdParameters::from_flat(n, x)?),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diagonal" | "diag" => Ok(Mode::Diagonal),
            "full" => Ok(Mode::Full),
            other => Err(Error::Argument(format!("unknown mode '{other}'"))),
        }
    }
}

/// Swarm settings and search box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of each variable's range.
    pub velocity_clamp: f64,
    pub rng_seed: u64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl PsoConfig {
    pub const INERTIA: f64 = 0.7298;
    pub const ACCELERATION: f64 = 1.49618;
    pub const VELOCITY_CLAMP: f64 = 0.2;

    /// Default coefficients on the box `[lower, upper]`.
    pub fn new(swarm_size: usize, max_iterations: usize, seed: u64, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            swarm_size,
            max_iterations,
            inertia: Self::INERTIA,
            cognitive: Self::ACCELERATION,
            social: Self::ACCELERATION,
            velocity_clamp: Self::VELOCITY_CLAMP,
            rng_seed: seed,
            lower,
            upper,
        }
    }

    /// Catalog swarm size and iteration count with the bounds for `mode`.
    pub fn for_case(case: &TransferCase, mode: Mode, seed: u64) -> Self {
        let (lo, hi) = mode.bounds(case.error_dim());
        Self::new(case.swarm_size, case.max_iterations, seed, lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size == 0 || self.max_iterations == 0 {
            return Err(Error::Argument(
                "swarm size and iteration count must be positive".into(),
            ));
        }
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return Err(Error::Argument("bounds must be non-empty and paired".into()));
        }
        if let Some(i) = (0..self.dim()).find(|&i| !(self.lower[i] < self.upper[i])) {
            return Err(Error::Argument(format!(
                "variable {i}: lower bound {} is not below upper bound {}",
                self.lower[i], self.upper[i]
            )));
        }
        let coeffs = [self.inertia, self.cognitive, self.social, self.velocity_clamp];
        if !coeffs.iter().all(|c| c.is_finite() && *c >= 0.0) || self.velocity_clamp == 0.0 {
            return Err(Error::Argument("PSO coefficients must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Outcome of a generic swarm search.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    /// Global best after initialization and after every iteration.
    pub history: Vec<f64>,
}

/// Synchronous global-best PSO minimizing `f` over the configured box.
///
/// Random draws come from a single seeded stream consumed in particle order,
/// and the swarm bests are updated only after a whole iteration has been
/// evaluated, so the result does not depend on the number of worker threads.
/// Non-finite objective values are treated as `+inf`.
pub fn pso<F>(f: F, cfg: &PsoConfig) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let d = cfg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let vmax: Vec<f64> = (0..d)
        .map(|k| cfg.velocity_clamp * (cfg.upper[k] - cfg.lower[k]))
        .collect();

    let mut pos: Vec<Vec<f64>> = (0..cfg.swarm_size)
        .map(|_| (0..d).map(|k| rng.random_range(cfg.lower[k]..cfg.upper[k])).collect())
        .collect();
    let mut vel: Vec<Vec<f64>> = (0..cfg.swarm_size)
        .map(|_| (0..d).map(|k| rng.random_range(-vmax[k]..=vmax[k])).collect())
        .collect();

    let evaluate = |pos: &[Vec<f64>]| -> Vec<f64> {
        pos.par_iter()
            .map(|x| {
                let v = f(x);
                if v.is_nan() { f64::INFINITY } else { v }
            })
            .collect()
    };

    let mut val = evaluate(&pos);
    let mut pbest = pos.clone();
    let mut pbest_val = val.clone();
    let mut g = argmin(&pbest_val);
    let mut gbest = pbest[g].clone();
    let mut gbest_val = pbest_val[g];
    let mut history = Vec::with_capacity(cfg.max_iterations + 1);
    history.push(gbest_val);

    for _ in 0..cfg.max_iterations {
        for p in 0..cfg.swarm_size {
            for k in 0..d {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let x = pos[p][k];
                let mut v = cfg.inertia * vel[p][k]
                    + cfg.cognitive * r1 * (pbest[p][k] - x)
                    + cfg.social * r2 * (gbest[k] - x);
                v = v.clamp(-vmax[k], vmax[k]);
                let mut nx = x + v;
                if nx < cfg.lower[k] {
                    nx = cfg.lower[k];
                    v = 0.0;
                } else if nx > cfg.upper[k] {
                    nx = cfg.upper[k];
                    v = 0.0;
                }
                pos[p][k] = nx;
                vel[p][k] = v;
            }
        }
        val = evaluate(&pos);
        for p in 0..cfg.swarm_size {
            if val[p] < pbest_val[p] {
                pbest_val[p] = val[p];
                pbest[p].clone_from(&pos[p]);
            }
        }
        g = argmin(&pbest_val);
        if pbest_val[g] < gbest_val {
            gbest_val = pbest_val[g];
            gbest.clone_from(&pbest[g]);
        }
        history.push(gbest_val);
    }

    Ok(PsoResult {
        best_x: gbest,
        best_value: gbest_val,
        history,
    })
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

/// Time-of-flight objective for one case and parameterization.
#[derive(Debug, Clone)]
pub struct Objective {
    pub case: ScaledCase,
    pub mode: Mode,
    pub propagation: PropagationConfig,
}

/// Detailed result of one objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value_days: f64,
    pub converged: bool,
    pub final_error_inf: f64,
}

impl Objective {
    pub fn new(case: &TransferCase, mode: Mode, propagation: PropagationConfig) -> Result<Self> {
        propagation.validate()?;
        Ok(Self {
            case: canonicalize(case)?,
            mode,
            propagation,
        })
    }

    /// Catalog case with its default horizon.
    pub fn for_case(case: &TransferCase, mode: Mode) -> Result<Self> {
        let units = case.body.units();
        Self::new(case, mode, PropagationConfig::with_horizon_days(&units, case.horizon_days))
    }

    pub fn horizon_days(&self) -> f64 {
        self.case.units.tu_to_days(self.propagation.max_horizon)
    }

    pub fn dim(&self) -> usize {
        self.case.error_dim()
    }

    fn penalty(&self, w_inf: f64) -> f64 {
        let w = if w_inf.is_finite() { w_inf } else { 1e3 };
        self.horizon_days() + PENALTY_SLOPE * w
    }

    /// Evaluate `x`; never fails, every error maps to a penalty.
    pub fn evaluate(&self, x: &[f64]) -> Evaluation {
        let n = self.dim();
        let law = match self
            .mode
            .weight_matrix(n, x)
            .and_then(|k| ClfLaw::for_case(&self.case, k))
        {
            Ok(law) => law,
            Err(_) => {
                let w0 = self.error_inf(&self.case.initial);
                return self.failed(w0);
            }
        };
        let sc = &self.case;
        match propagate_terminal(&sc.initial, &law, &sc.spacecraft, &self.propagation) {
            Ok(out) if out.converged => Evaluation {
                value_days: sc.units.tu_to_days(out.final_time),
                converged: true,
                final_error_inf: out.final_error_inf,
            },
            Ok(out) => self.failed(out.final_error_inf),
            Err(Error::Propagation { state, .. }) => {
                let w = self.error_inf(&CartesianState::from_array(&state));
                self.failed(w)
            }
            Err(_) => self.failed(f64::INFINITY),
        }
    }

    fn failed(&self, w_inf: f64) -> Evaluation {
        Evaluation {
            value_days: self.penalty(w_inf),
            converged: false,
            final_error_inf: w_inf,
        }
    }

    fn error_inf(&self, state: &CartesianState) -> f64 {
        crate::astrodyn::error_vector::<f64>(
            self.case.id,
            &state.r,
            &state.v,
            &self.case.target,
            self.case.mu,
        )
        .map(|w| w.inf_norm())
        .unwrap_or(f64::INFINITY)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x).value_days
    }
}

/// Stand-alone objective in days.
pub fn objective(x: &[f64], case: &TransferCase, mode: Mode, propagation: &PropagationConfig) -> Result<f64> {
    Ok(Objective::new(case, mode, *propagation)?.value(x))
}

/// Settings recorded alongside each run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub pso: PsoConfig,
    pub propagation: PropagationConfig,
}

/// One optimization run as persisted to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub case: CaseId,
    pub mode: Mode,
    /// 1-based position within the campaign.
    pub run_index: usize,
    pub seed: u64,
    pub config: RunConfig,
    pub best_x: Vec<f64>,
    pub best_tof_days: f64,
    pub converged: bool,
    /// Best objective after initialization and after each iteration.
    pub history: Vec<f64>,
}

impl RunRecord {
    pub fn weight_matrix(&self) -> Result<WeightMatrix> {
        self.mode.weight_matrix(self.case.error_dim(), &self.best_x)
    }
}

/// Optimize the weighting matrix for `case` in `mode`.
pub fn pso_minimize(
    case: &TransferCase,
    mode: Mode,
    config: &PsoConfig,
    propagation: &PropagationConfig,
) -> Result<RunRecord> {
    let obj = Objective::new(case, mode, *propagation)?;
    let n = case.error_dim();
    if config.dim() != mode.decision_len(n) {
        return Err(Error::Argument(format!(
            "bounds have {} variables, {mode} mode for case {} needs {}",
            config.dim(),
            case.id,
            mode.decision_len(n)
        )));
    }
    let res = pso(|x| obj.value(x), config)?;
    let converged = obj.evaluate(&res.best_x).converged;
    Ok(RunRecord {
        case: case.id,
        mode,
        run_index: 1,
        seed: config.rng_seed,
        config: RunConfig {
            pso: config.clone(),
            propagation: *propagation,
        },
        best_x: res.best_x,
        best_tof_days: res.best_value,
        converged,
        history: res.history,
    })
}

/// One row of the results table: a set of runs of one case and mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub case: CaseId,
    pub mode: Mode,
    pub runs: Vec<f64>,
    pub average: f64,
    pub best: f64,
    /// Index into `runs` of the best value (first on ties).
    pub best_index: usize,
}

/// Average and best of a set of runs sharing case and mode.
pub fn summarize(records: &[RunRecord]) -> Result<SummaryRow> {
    let first = records
        .first()
        .ok_or_else(|| Error::Argument("no run records to summarize".into()))?;
    if let Some(r) = records
        .iter()
        .find(|r| r.case != first.case || r.mode != first.mode)
    {
        return Err(Error::Argument(format!(
            "mixed records: {}/{} and {}/{}",
            first.case, first.mode, r.case, r.mode
        )));
    }
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.run_index);
    let runs: Vec<f64> = sorted.iter().map(|r| r.best_tof_days).collect();
    Ok(summary_from_values(first.case, first.mode, runs))
}

pub(crate) fn summary_from_values(case: CaseId, mode: Mode, runs: Vec<f64>) -> SummaryRow {
    let best_index = argmin(&runs);
    SummaryRow {
        case,
        mode,
        average: runs.iter().sum::<f64>() / runs.len() as f64,
        best: runs[best_index],
        best_index,
        runs,
    }
}
