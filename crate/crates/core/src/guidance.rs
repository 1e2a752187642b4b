//! Quadratic control-Lyapunov function `V = 1/2 w^T K w` and the steering
//! direction that makes its time derivative as negative as possible.
//!
//! Gradients with respect to velocity (and, for diagnostics, position) are
//! obtained with three-direction dual numbers.

use crate::astrodyn::{error_vector, CartesianState, CaseId, ErrorVector, ScaledCase, TargetSpec};
use crate::diffnum::{constant_vector, dot, lift_vector, Dual, Real};
use crate::error::{Error, Result};
use crate::spdparam::WeightMatrix;

/// Gradient norms below this leave the steering direction undefined.
pub const DEGENERATE_GRADIENT: f64 = 1e-14;

/// An immutable CLF: case, weighting matrix and target.
#[derive(Debug, Clone)]
pub struct ClfLaw {
    case: CaseId,
    k: WeightMatrix,
    dense: [[f64; 6]; 6],
    target: TargetSpec,
    mu: f64,
}

/// Value, velocity gradient and error vector from one dual pass.
#[derive(Debug, Clone, Copy)]
pub struct ClfEval {
    pub value: f64,
    pub grad_v: [f64; 3],
    pub w: ErrorVector<f64>,
}

impl ClfLaw {
    pub fn new(case: CaseId, k: WeightMatrix, target: TargetSpec, mu: f64) -> Result<Self> {
        let n = case.error_dim();
        if k.dim() != n {
            return Err(Error::Contract(format!(
                "case {case} needs a {n}x{n} weighting matrix, got {0}x{0}",
                k.dim()
            )));
        }
        let mut dense = [[0.0; 6]; 6];
        for (i, row) in dense.iter_mut().enumerate().take(n) {
            for (j, x) in row.iter_mut().enumerate().take(n) {
                *x = k.matrix()[(i, j)];
            }
        }
        Ok(Self {
            case,
            k,
            dense,
            target,
            mu,
        })
    }

    pub fn for_case(case: &ScaledCase, k: WeightMatrix) -> Result<Self> {
        Self::new(case.id, k, case.target, case.mu)
    }

    pub fn case(&self) -> CaseId {
        self.case
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.k
    }

    pub fn target(&self) -> &TargetSpec {
        &self.target
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn quadratic<S: Real>(&self, w: &ErrorVector<S>) -> S {
        let w = w.as_slice();
        let mut acc = S::constant(0.0);
        for (i, wi) in w.iter().enumerate() {
            let row = &self.dense[i];
            let mut kw = *wi * row[i];
            for (j, wj) in w.iter().enumerate() {
                if j != i {
                    kw = kw + *wj * row[j];
                }
            }
            acc = acc + *wi * kw;
        }
        acc * 0.5
    }

    pub fn error_vector(&self, state: &CartesianState) -> Result<ErrorVector<f64>> {
        error_vector(self.case, &state.r, &state.v, &self.target, self.mu)
    }

    pub fn clf_value(&self, state: &CartesianState) -> Result<f64> {
        Ok(self.quadratic(&self.error_vector(state)?))
    }

    /// Value, `dV/dv` and `w` at `(r, v)`.
    pub fn evaluate(&self, r: &[f64; 3], v: &[f64; 3]) -> Result<ClfEval> {
        let rd = constant_vector::<Dual<3>>(*r);
        let vd = lift_vector(*v);
        let w = error_vector(self.case, &rd, &vd, &self.target, self.mu)?;
        let value = self.quadratic(&w);
        Ok(ClfEval {
            value: value.value,
            grad_v: value.partials,
            w: w.to_real(),
        })
    }

    pub fn clf_velocity_gradient(&self, state: &CartesianState) -> Result<[f64; 3]> {
        Ok(self.evaluate(&state.r, &state.v)?.grad_v)
    }

    pub fn clf_position_gradient(&self, state: &CartesianState) -> Result<[f64; 3]> {
        let rd = lift_vector(state.r);
        let vd = constant_vector::<Dual<3>>(state.v);
        let w = error_vector(self.case, &rd, &vd, &self.target, self.mu)?;
        Ok(self.quadratic(&w).partials)
    }

    /// `-dV/dv / |dV/dv|`.
    pub fn steering_direction(&self, state: &CartesianState) -> Result<[f64; 3]> {
        steering_from_gradient(&self.clf_velocity_gradient(state)?)
    }

    /// `dV/dt = dV/dr . v + dV/dv . (-mu r / r^3 + (T/m) alpha)`.
    pub fn clf_time_derivative(
        &self,
        state: &CartesianState,
        alpha: &[f64; 3],
        thrust: f64,
    ) -> Result<f64> {
        let an = dot(alpha, alpha).sqrt();
        if (an - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!(
                "steering vector has norm {an}, expected unit"
            )));
        }
        let gr = self.clf_position_gradient(state)?;
        let gv = self.clf_velocity_gradient(state)?;
        let r = state.radius();
        let grav = -self.mu / (r * r * r);
        let accel = thrust / state.m;
        let mut vdot = dot(&gr, &state.v);
        for k in 0..3 {
            vdot += gv[k] * (grav * state.r[k] + accel * alpha[k]);
        }
        Ok(vdot)
    }
}

/// Unit vector opposing the gradient.
pub fn steering_from_gradient(grad_v: &[f64; 3]) -> Result<[f64; 3]> {
    let n = dot(grad_v, grad_v).sqrt();
    if !(n >= DEGENERATE_GRADIENT) {
        return Err(Error::DegenerateGradient { norm: n });
    }
    Ok(grad_v.map(|g| -g / n))
}
