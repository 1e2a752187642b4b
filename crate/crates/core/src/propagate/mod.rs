//! Closed-loop propagation of the thrusting spacecraft until orbit insertion.
//!
//! The state `[r, v, m]` follows two-body gravity plus full thrust along the
//! CLF steering direction, re-evaluated at every integrator stage. After each
//! accepted step the insertion function `g = |w|_inf - epsilon` is checked;
//! a sign change is located on the dense output by bisection followed by one
//! secant update.

pub mod dopri5;

use std::cell::Cell;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::astrodyn::{elements_from_state, CartesianState, ScaledCase, Spacecraft, UnitSystem};
use crate::diffnum::dot;
use crate::error::{Error, Result};
use crate::guidance::{steering_from_gradient, ClfLaw};

use dopri5::{DenseSegment, Dopri5, Tolerances};

/// Propagation stops (non-converged) once the mass would drop below this [kg].
pub const DRY_MASS_FLOOR: f64 = 1.0;

/// Width of the final event bracket [TU].
pub const EVENT_TIME_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Insertion threshold on `|w|_inf`.
    pub epsilon: f64,
    /// Integration cap [TU].
    pub max_horizon: f64,
    pub max_steps: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            epsilon: 1e-4,
            max_horizon: 1e4,
            max_steps: 300_000,
        }
    }
}

impl PropagationConfig {
    /// Defaults with the horizon set from days in the case's time unit.
    pub fn with_horizon_days(units: &UnitSystem, days: f64) -> Self {
        Self {
            max_horizon: units.days_to_tu(days),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.epsilon > 0.0) {
            return Err(Error::Argument(
                "tolerances and epsilon must be positive".into(),
            ));
        }
        if !(self.max_horizon > 0.0) || self.max_steps == 0 {
            return Err(Error::Argument(
                "horizon and step budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Inserted,
    Horizon,
    MaxSteps,
    PropellantExhausted,
}

/// Time derivative of `[r, v, m]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub r_dot: [f64; 3],
    pub v_dot: [f64; 3],
    pub m_dot: f64,
    /// Steering direction used for the thrust term.
    pub alpha: [f64; 3],
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.r_dot[0],
            self.r_dot[1],
            self.r_dot[2],
            self.v_dot[0],
            self.v_dot[1],
            self.v_dot[2],
            self.m_dot,
        ]
    }
}

/// Equations of motion under the CLF steering law.
///
/// When the CLF gradient vanishes the steering direction falls back to
/// `hold` (the previous direction) or, failing that, the velocity direction.
pub fn dynamics(
    state: &CartesianState,
    law: &ClfLaw,
    craft: &Spacecraft,
    hold: Option<[f64; 3]>,
) -> Result<StateDerivative> {
    if !(state.m > DRY_MASS_FLOOR) {
        return Err(Error::Propagation {
            t: f64::NAN,
            reason: format!("propellant exhausted (m = {} kg)", state.m),
            state: state.to_array(),
        });
    }
    let alpha = if craft.thrust > 0.0 {
        let eval = law.evaluate(&state.r, &state.v)?;
        steering_or_fallback(&eval.grad_v, hold, &state.v)
    } else {
        hold.unwrap_or([1.0, 0.0, 0.0])
    };
    Ok(derivative(state, law.mu(), craft, alpha))
}

fn derivative(state: &CartesianState, mu: f64, craft: &Spacecraft, alpha: [f64; 3]) -> StateDerivative {
    let r2 = dot(&state.r, &state.r);
    let grav = -mu / (r2 * r2.sqrt());
    let accel = craft.thrust / state.m;
    StateDerivative {
        r_dot: state.v,
        v_dot: std::array::from_fn(|k| grav * state.r[k] + accel * alpha[k]),
        m_dot: -craft.mass_flow,
        alpha,
    }
}

fn steering_or_fallback(grad_v: &[f64; 3], hold: Option<[f64; 3]>, v: &[f64; 3]) -> [f64; 3] {
    match steering_from_gradient(grad_v) {
        Ok(a) => a,
        Err(_) => hold.unwrap_or_else(|| {
            let n = dot(v, v).sqrt();
            if n > 0.0 {
                v.map(|x| x / n)
            } else {
                [1.0, 0.0, 0.0]
            }
        }),
    }
}

/// Time histories of one propagation; every accepted step is logged.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CartesianState>,
    pub clf: Vec<f64>,
    pub clf_rate: Vec<f64>,
    pub errors: Vec<Vec<f64>>,
    pub converged: bool,
    /// Insertion time [TU] when converged.
    pub time_of_flight: Option<f64>,
    pub termination: Termination,
}

/// Result of a propagation without history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub converged: bool,
    pub time_of_flight: Option<f64>,
    pub final_time: f64,
    pub final_state: CartesianState,
    pub final_error_inf: f64,
    pub termination: Termination,
    pub steps: usize,
}

struct Recorder<'a> {
    law: &'a ClfLaw,
    craft: &'a Spacecraft,
    traj: Trajectory,
}

impl Recorder<'_> {
    fn push(&mut self, t: f64, y: &[f64; 7], hold: Option<[f64; 3]>) -> Result<()> {
        let state = CartesianState::from_array(y);
        let eval = self.law.evaluate(&state.r, &state.v)?;
        let alpha = steering_or_fallback(&eval.grad_v, hold, &state.v);
        let rate = self
            .law
            .clf_time_derivative(&state, &alpha, self.craft.thrust)?;
        self.traj.times.push(t);
        self.traj.states.push(state);
        self.traj.clf.push(eval.value);
        self.traj.clf_rate.push(rate);
        self.traj.errors.push(eval.w.values());
        Ok(())
    }
}

/// Propagate and log every accepted step.
pub fn propagate_until_insertion(
    initial: &CartesianState,
    law: &ClfLaw,
    craft: &Spacecraft,
    config: &PropagationConfig,
) -> Result<Trajectory> {
    let mut rec = Recorder {
        law,
        craft,
        traj: Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            clf: Vec::new(),
            clf_rate: Vec::new(),
            errors: Vec::new(),
            converged: false,
            time_of_flight: None,
            termination: Termination::Horizon,
        },
    };
    let outcome = run(initial, law, craft, config, Some(&mut rec))?;
    let mut traj = rec.traj;
    traj.converged = outcome.converged;
    traj.time_of_flight = outcome.time_of_flight;
    traj.termination = outcome.termination;
    Ok(traj)
}

/// Propagate without logging; used as the optimization objective.
pub fn propagate_terminal(
    initial: &CartesianState,
    law: &ClfLaw,
    craft: &Spacecraft,
    config: &PropagationConfig,
) -> Result<Outcome> {
    run(initial, law, craft, config, None)
}

/// Propagate a catalog case from its departure state.
pub fn propagate_case(case: &ScaledCase, law: &ClfLaw, config: &PropagationConfig) -> Result<Trajectory> {
    propagate_until_insertion(&case.initial, law, &case.spacecraft, config)
}

fn run(
    initial: &CartesianState,
    law: &ClfLaw,
    craft: &Spacecraft,
    config: &PropagationConfig,
    mut rec: Option<&mut Recorder<'_>>,
) -> Result<Outcome> {
    config.validate()?;
    initial.validate()?;
    let eps = config.epsilon;
    let g = |y: &[f64; 7]| -> Result<f64> {
        let s = CartesianState::from_array(y);
        Ok(law.error_vector(&s)?.inf_norm() - eps)
    };

    let y0 = initial.to_array();
    let g0 = g(&y0)?;
    let mut hold: Option<[f64; 3]> = None;
    if let Some(r) = rec.as_deref_mut() {
        r.push(0.0, &y0, hold)?;
    }
    if g0 <= 0.0 {
        return Ok(Outcome {
            converged: true,
            time_of_flight: Some(0.0),
            final_time: 0.0,
            final_state: *initial,
            final_error_inf: g0 + eps,
            termination: Termination::Inserted,
            steps: 0,
        });
    }

    // Mass is linear in time, so the floor translates into a time cap.
    let t_dry = if craft.mass_flow > 0.0 {
        (initial.m - DRY_MASS_FLOOR) / craft.mass_flow
    } else {
        f64::INFINITY
    };
    let (t_end, end_reason) = if t_dry < config.max_horizon {
        (t_dry, Termination::PropellantExhausted)
    } else {
        (config.max_horizon, Termination::Horizon)
    };

    // Last stage evaluation: (steering, |w|_inf). The final DOPRI stage is
    // evaluated at the new step end, so after an accepted step this holds
    // the values at that point.
    let last = Cell::new(None::<([f64; 3], f64)>);
    let hold_cell = Cell::new(hold);
    let mut rhs = |_t: f64, y: &[f64; 7]| -> Result<[f64; 7]> {
        let state = CartesianState::from_array(y);
        if !(state.m > 0.0) {
            return Err(Error::Propagation {
                t: _t,
                reason: "non-positive mass".into(),
                state: *y,
            });
        }
        let eval = law.evaluate(&state.r, &state.v)?;
        let alpha = steering_or_fallback(&eval.grad_v, hold_cell.get(), &state.v);
        last.set(Some((alpha, eval.w.inf_norm())));
        Ok(derivative(&state, law.mu(), craft, alpha).to_array())
    };

    let tol = Tolerances {
        rel: config.rel_tol,
        abs: config.abs_tol,
    };
    let mut ig = Dopri5::new(&mut rhs, 0.0, y0, tol)?;
    let mut g_prev = g0;
    let mut steps = 0usize;

    loop {
        if steps >= config.max_steps {
            return Ok(unconverged(&ig, law, Termination::MaxSteps, steps));
        }
        let seg = match ig.step(&mut rhs, t_end) {
            Ok(seg) => seg,
            Err(Error::Propagation { t, reason, state }) => {
                return Err(Error::Propagation { t, reason, state });
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        let (alpha_end, w_end) = last.get().expect("stage evaluated");
        hold = Some(alpha_end);
        hold_cell.set(hold);
        let g_end = w_end - eps;

        if g_end <= 0.0 {
            let (t_hit, y_hit) = locate_event(&seg, g_prev, g_end, &g)?;
            if let Some(r) = rec.as_deref_mut() {
                r.push(t_hit, &y_hit, hold)?;
            }
            let state = CartesianState::from_array(&y_hit);
            let w_inf = g(&y_hit)? + eps;
            return Ok(Outcome {
                converged: true,
                time_of_flight: Some(t_hit),
                final_time: t_hit,
                final_state: state,
                final_error_inf: w_inf,
                termination: Termination::Inserted,
                steps,
            });
        }
        if let Some(r) = rec.as_deref_mut() {
            r.push(ig.t(), ig.y(), hold)?;
        }
        g_prev = g_end;
        if ig.t() >= t_end {
            return Ok(unconverged(&ig, law, end_reason, steps));
        }
    }
}

fn unconverged(ig: &Dopri5<7>, law: &ClfLaw, termination: Termination, steps: usize) -> Outcome {
    let state = CartesianState::from_array(ig.y());
    let w = law
        .error_vector(&state)
        .map(|w| w.inf_norm())
        .unwrap_or(f64::INFINITY);
    Outcome {
        converged: false,
        time_of_flight: None,
        final_time: ig.t(),
        final_state: state,
        final_error_inf: w,
        termination,
        steps,
    }
}

/// Bisection to `EVENT_TIME_TOL` on the dense output, then a secant update.
fn locate_event<G>(
    seg: &DenseSegment<7>,
    g_start: f64,
    g_end: f64,
    g: &G,
) -> Result<(f64, [f64; 7])>
where
    G: Fn(&[f64; 7]) -> Result<f64>,
{
    let (mut a, mut b) = (seg.t0, seg.t1());
    let (mut ga, mut gb) = (g_start, g_end);
    if ga <= 0.0 {
        // should not happen: the previous step ended outside the threshold
        return Ok((a, seg.start()));
    }
    while b - a > EVENT_TIME_TOL {
        let m = 0.5 * (a + b);
        let gm = g(&seg.eval(m))?;
        if gm > 0.0 {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    let mut t = b;
    if ga != gb {
        let ts = b - gb * (b - a) / (gb - ga);
        if ts > a && ts < b {
            let ys = seg.eval(ts);
            // keep the polished point only if it is still inside the threshold
            if g(&ys)? <= 0.0 || (ts - b).abs() <= EVENT_TIME_TOL {
                t = ts;
            }
        }
    }
    let y = if t == seg.t1() { seg.end() } else { seg.eval(t) };
    Ok((t, y))
}

impl Trajectory {
    /// Write the figure-data CSV: times, state, CLF and its rate, error
    /// components and classical elements (km, degrees).
    pub fn write_csv(&self, path: &Path, units: &UnitSystem, mu: f64) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
        let n_w = self.errors.first().map_or(0, Vec::len);
        let mut header: Vec<String> = [
            "t_tu", "t_days", "rx", "ry", "rz", "vx", "vy", "vz", "m_kg", "V", "Vdot",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=n_w).map(|k| format!("w{k}")));
        header.extend(
            ["a_km", "e", "i_deg", "raan_deg", "aop_deg"]
                .iter()
                .map(|s| s.to_string()),
        );
        wtr.write_record(&header).map_err(|e| Error::ser(path, e))?;

        for (k, t) in self.times.iter().enumerate() {
            let s = &self.states[k];
            let el = elements_from_state(s, mu)?;
            let mut row: Vec<f64> = vec![*t, units.tu_to_days(*t)];
            row.extend_from_slice(&s.r);
            row.extend_from_slice(&s.v);
            row.push(s.m);
            row.push(self.clf[k]);
            row.push(self.clf_rate[k]);
            row.extend_from_slice(&self.errors[k]);
            row.extend_from_slice(&[
                units.du_to_km(el.sma),
                el.ecc,
                el.inc.to_degrees(),
                el.raan.to_degrees(),
                el.aop.to_degrees(),
            ]);
            wtr.write_record(row.iter().map(|x| format!("{x:.12e}")))
                .map_err(|e| Error::ser(path, e))?;
        }
        wtr.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astrodyn::{canonicalize, CaseId, TargetSpec};
    use crate::bench::load_case;
    use crate::spdparam::WeightMatrix;

    fn coast_law() -> ClfLaw {
        let target = TargetSpec::from_elements(2.0, 0.1, None, None, None, 1.0).unwrap();
        ClfLaw::new(CaseId::A, WeightMatrix::identity(2), target, 1.0).unwrap()
    }

    #[test]
    fn circular_gravity_only() {
        let s = CartesianState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 100.0).unwrap();
        let craft = Spacecraft {
            thrust: 0.0,
            mass_flow: 0.0,
        };
        let d = dynamics(&s, &coast_law(), &craft, None).unwrap();
        assert_eq!(d.v_dot, [-1.0, 0.0, 0.0]);
        assert_eq!(d.r_dot, [0.0, 1.0, 0.0]);
        assert_eq!(d.m_dot, 0.0);
    }

    #[test]
    fn case_a_mass_flow() {
        let sc = canonicalize(&load_case(CaseId::A)).unwrap();
        let kg_per_s = sc.spacecraft.mass_flow / sc.units.time_unit;
        // 1 N / (3100 s * 9.80665 m/s^2)
        assert!((kg_per_s - 3.289407e-5).abs() < 5e-12, "{kg_per_s:e}");
    }

    #[test]
    fn mass_floor_is_an_error() {
        let s = CartesianState::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.5).unwrap();
        let craft = Spacecraft {
            thrust: 1e-3,
            mass_flow: 1e-3,
        };
        assert!(matches!(
            dynamics(&s, &coast_law(), &craft, None),
            Err(Error::Propagation { .. })
        ));
    }

    #[test]
    fn already_on_target_converges_at_zero() {
        let sc = canonicalize(&load_case(CaseId::C)).unwrap();
        let el = crate::astrodyn::OrbitalElements {
            sma: sc.units.km_to_du(30000.0),
            ecc: 0.7,
            inc: 0.01,
            raan: 0.0,
            aop: 0.0,
            ta: 0.3,
        };
        let s = crate::astrodyn::state_from_elements(&el, 1.0, 300.0).unwrap();
        let law = ClfLaw::for_case(&sc, WeightMatrix::identity(2)).unwrap();
        let traj = propagate_until_insertion(&s, &law, &sc.spacecraft, &PropagationConfig::default()).unwrap();
        assert!(traj.converged);
        assert_eq!(traj.time_of_flight, Some(0.0));
        assert_eq!(traj.times.len(), 1);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = PropagationConfig {
            epsilon: 0.0,
            ..PropagationConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
