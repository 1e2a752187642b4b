//! Dormand-Prince 5(4) with PI step-size control and fourth-order dense output.
//!
//! Coefficients follow Hairer, Norsett and Wanner's DOPRI5. The integrator is
//! driven one accepted step at a time so that callers can inspect every step
//! (event detection, logging) through the returned [`DenseSegment`].

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// error estimate: b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment<const D: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; D]; 5],
}

impl<const D: usize> DenseSegment<D> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; D] {
        self.cont[0]
    }

    pub fn end(&self) -> [f64; D] {
        std::array::from_fn(|i| self.cont[0][i] + self.cont[1][i])
    }

    /// Interpolated state at `t` within the step.
    pub fn eval(&self, t: f64) -> [f64; D] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        std::array::from_fn(|i| {
            c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])))
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Stepping state of the integrator.
#[derive(Debug, Clone)]
pub struct Dopri5<const D: usize> {
    t: f64,
    y: [f64; D],
    f: [f64; D],
    h: f64,
    err_old: f64,
    tol: Tolerances,
    pub stats: Stats,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        y[i] + h * acc
    })
}

impl<const D: usize> Dopri5<D> {
    /// Start at `(t0, y0)`. The initial step is chosen automatically.
    pub fn new<F>(rhs: &mut F, t0: f64, y0: [f64; D], tol: Tolerances) -> Result<Self>
    where
        F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
    {
        if !(tol.rel > 0.0 && tol.abs > 0.0) {
            return Err(Error::Argument("tolerances must be positive".into()));
        }
        let f0 = rhs(t0, &y0)?;
        let mut me = Self {
            t: t0,
            y: y0,
            f: f0,
            h: 0.0,
            err_old: 1e-4,
            tol,
            stats: Stats {
                evaluations: 1,
                ..Stats::default()
            },
        };
        me.h = me.initial_step(rhs)?;
        Ok(me)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; D] {
        &self.y
    }

    /// Derivative at the current point (first-same-as-last stage).
    pub fn derivative(&self) -> &[f64; D] {
        &self.f
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.tol.abs + self.tol.rel * a.abs().max(b.abs())
    }

    fn initial_step<F>(&mut self, rhs: &mut F) -> Result<f64>
    where
        F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
    {
        let rms = |v: &dyn Fn(usize) -> f64| -> f64 {
            ((0..D).map(|i| v(i).powi(2)).sum::<f64>() / D as f64).sqrt()
        };
        let d0 = rms(&|i| self.y[i] / self.scale(self.y[i], self.y[i]));
        let d1 = rms(&|i| self.f[i] / self.scale(self.y[i], self.y[i]));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(&self.y, h0, &[(1.0, &self.f)]);
        let f1 = rhs(self.t + h0, &y1)?;
        self.stats.evaluations += 1;
        let d2 = rms(&|i| (f1[i] - self.f[i]) / self.scale(self.y[i], self.y[i])) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dmax).powf(0.2)
        };
        Ok((100.0 * h0).min(h1))
    }

    /// Take one accepted step, never passing `t_max`.
    pub fn step<F>(&mut self, rhs: &mut F, t_max: f64) -> Result<DenseSegment<D>>
    where
        F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
    {
        loop {
            let remaining = t_max - self.t;
            if remaining <= 0.0 {
                return Err(Error::Argument("integrator already at t_max".into()));
            }
            let mut h = self.h.min(remaining);
            // avoid leaving a sliver before t_max
            if remaining - h < 1e-10 * remaining.max(1.0) {
                h = remaining;
            }
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::Propagation {
                    t: self.t,
                    reason: format!("step size underflow (h = {h:e})"),
                    state: pad7(&self.y),
                });
            }

            let t = self.t;
            let y = &self.y;
            let k1 = &self.f;
            let k2 = rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
            let k3 = rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
            let k4 = rhs(
                t + C4 * h,
                &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
            )?;
            let k5 = rhs(
                t + C5 * h,
                &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            )?;
            let k6 = rhs(
                t + h,
                &axpy(
                    y,
                    h,
                    &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            )?;
            let y_new = axpy(
                y,
                h,
                &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let t_new = if h == remaining { t_max } else { t + h };
            let k7 = rhs(t_new, &y_new)?;
            self.stats.evaluations += 6;

            let mut err2 = 0.0;
            for i in 0..D {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = self.scale(y[i], y_new[i]);
                err2 += (e / sc).powi(2);
            }
            let err = (err2 / D as f64).sqrt();
            if !err.is_finite() {
                self.stats.rejected += 1;
                self.h = h * FAC_MIN;
                continue;
            }

            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                let fac = (fac11 / self.err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.err_old = err.max(1e-4);

                let mut cont = [[0.0; D]; 5];
                for i in 0..D {
                    let ydiff = y_new[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k7[i] - bspl;
                    cont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                let seg = DenseSegment {
                    t0: t,
                    h: t_new - t,
                    cont,
                };
                self.t = t_new;
                self.y = y_new;
                self.f = k7;
                self.h = h / fac;
                self.stats.accepted += 1;
                return Ok(seg);
            }
            self.stats.rejected += 1;
            self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
}

fn pad7<const D: usize>(y: &[f64; D]) -> [f64; 7] {
    let mut out = [f64::NAN; 7];
    for (o, x) in out.iter_mut().zip(y) {
        *o = *x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut rhs = |_t: f64, y: &[f64; 1]| Ok([-y[0]]);
        let tol = Tolerances {
            rel: 1e-10,
            abs: 1e-12,
        };
        let mut ig = Dopri5::new(&mut rhs, 0.0, [1.0], tol).unwrap();
        let mut mid = None;
        while ig.t() < 2.0 {
            let seg = ig.step(&mut rhs, 2.0).unwrap();
            if seg.t0 <= 1.0 && 1.0 <= seg.t1() {
                mid = Some(seg.eval(1.0)[0]);
            }
        }
        assert_eq!(ig.t(), 2.0);
        assert!((ig.y()[0] - (-2.0_f64).exp()).abs() < 1e-10);
        assert!((mid.unwrap() - (-1.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let mut rhs = |_t: f64, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let tol = Tolerances {
            rel: 1e-10,
            abs: 1e-12,
        };
        let mut ig = Dopri5::new(&mut rhs, 0.0, [1.0, 0.0], tol).unwrap();
        let mut worst: f64 = 0.0;
        while ig.t() < 10.0 {
            let seg = ig.step(&mut rhs, 10.0).unwrap();
            for k in 1..4 {
                let t = seg.t0 + seg.h * f64::from(k) / 4.0;
                worst = worst.max((seg.eval(t)[0] - t.cos()).abs());
            }
            assert_eq!(seg.end(), *ig.y());
        }
        assert!(worst < 1e-8, "dense output error {worst:e}");
    }

    #[test]
    fn rejects_bad_tolerances() {
        let mut rhs = |_t: f64, y: &[f64; 1]| Ok([y[0]]);
        let tol = Tolerances { rel: 0.0, abs: 1.0 };
        assert!(Dopri5::new(&mut rhs, 0.0, [1.0], tol).is_err());
    }
}
