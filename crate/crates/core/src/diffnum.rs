//! Forward-mode automatic differentiation with multi-direction dual numbers.
//!
//! A [`Dual<N>`] carries a value together with `N` directional sensitivities.
//! Arithmetic propagates the sensitivities by the chain rule, so evaluating a
//! function on lifted inputs yields its value and gradient in one pass. The
//! guidance law uses `N = 3` to differentiate the CLF with respect to the
//! velocity (or position) components.
//!
//! Operations that can leave their domain (`sqrt`, `acos`, division) come in
//! fallible `try_*` forms returning [`Error::NumericDomain`]. The operator
//! impls (`+ - * /`) follow plain IEEE semantics.
//!
//! The [`Real`] trait abstracts over `f64` and `Dual<N>` so orbital quantities
//! can be written once and evaluated in either arithmetic.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Inputs to `acos` within this distance outside `[-1, 1]` are clamped.
pub const ACOS_CLAMP_TOL: f64 = 1e-12;

/// Scalar arithmetic shared by `f64` and [`Dual`].
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(x: f64) -> Self;
    fn value(&self) -> f64;
    fn try_sqrt(self) -> Result<Self>;
    fn try_acos(self) -> Result<Self>;
    fn try_div(self, rhs: Self) -> Result<Self>;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

fn clamp_unit(x: f64, op: &'static str) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + ACOS_CLAMP_TOL {
        return Err(Error::NumericDomain { op, value: x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

impl Real for f64 {
    #[inline]
    fn constant(x: f64) -> Self {
        x
    }

    #[inline]
    fn value(&self) -> f64 {
        *self
    }

    fn try_sqrt(self) -> Result<Self> {
        if !(self >= 0.0) {
            return Err(Error::NumericDomain {
                op: "sqrt",
                value: self,
            });
        }
        Ok(self.sqrt())
    }

    fn try_acos(self) -> Result<Self> {
        Ok(clamp_unit(self, "acos")?.acos())
    }

    fn try_div(self, rhs: Self) -> Result<Self> {
        if rhs == 0.0 {
            return Err(Error::NumericDomain {
                op: "div",
                value: rhs,
            });
        }
        Ok(self / rhs)
    }

    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }

    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

/// A value with `N` first-order partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<const N: usize> {
    pub value: f64,
    pub partials: [f64; N],
}

impl<const N: usize> Dual<N> {
    /// A constant: all partials zero.
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            partials: [0.0; N],
        }
    }

    /// Seed an independent variable along direction `direction`.
    pub fn variable(value: f64, direction: usize) -> Result<Self> {
        if direction >= N {
            return Err(Error::Argument(format!(
                "direction index {direction} out of range for {N} directions"
            )));
        }
        let mut partials = [0.0; N];
        partials[direction] = 1.0;
        Ok(Self { value, partials })
    }

    /// Apply a scalar function with known value `f` and derivative `df`.
    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        let mut partials = self.partials;
        for p in &mut partials {
            *p *= df;
        }
        Self { value: f, partials }
    }

    pub fn sqrt(self) -> Result<Self> {
        if !(self.value > 0.0) {
            return Err(Error::NumericDomain {
                op: "sqrt",
                value: self.value,
            });
        }
        let s = self.value.sqrt();
        Ok(self.chain(s, 0.5 / s))
    }

    pub fn powi(self, n: i32) -> Self {
        let df = if n == 0 {
            0.0
        } else {
            f64::from(n) * self.value.powi(n - 1)
        };
        self.chain(self.value.powi(n), df)
    }

    pub fn powf(self, p: f64) -> Result<Self> {
        if !(self.value > 0.0) {
            return Err(Error::NumericDomain {
                op: "powf",
                value: self.value,
            });
        }
        let f = self.value.powf(p);
        Ok(self.chain(f, p * f / self.value))
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Result<Self> {
        if !(self.value > 0.0) {
            return Err(Error::NumericDomain {
                op: "ln",
                value: self.value,
            });
        }
        Ok(self.chain(self.value.ln(), 1.0 / self.value))
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        self.chain(t, 1.0 + t * t)
    }

    pub fn asin(self) -> Result<Self> {
        let x = clamp_unit(self.value, "asin")?;
        let xd = boundary_safe(x);
        Ok(self.chain(x.asin(), 1.0 / (1.0 - xd * xd).sqrt()))
    }

    /// Inverse cosine with the boundary clamp policy.
    ///
    /// Inputs within [`ACOS_CLAMP_TOL`] of `±1` are clamped; at exactly `±1`
    /// the derivative is taken at `±(1 - 1e-12)` so it stays finite.
    pub fn acos(self) -> Result<Self> {
        let x = clamp_unit(self.value, "acos")?;
        let xd = boundary_safe(x);
        Ok(self.chain(x.acos(), -1.0 / (1.0 - xd * xd).sqrt()))
    }

    pub fn atan(self) -> Self {
        self.chain(self.value.atan(), 1.0 / (1.0 + self.value * self.value))
    }

    /// Four-quadrant arctangent of `self / x`.
    pub fn atan2(self, x: Self) -> Result<Self> {
        let r2 = self.value * self.value + x.value * x.value;
        if r2 == 0.0 {
            return Err(Error::NumericDomain {
                op: "atan2",
                value: 0.0,
            });
        }
        let mut partials = [0.0; N];
        for (k, p) in partials.iter_mut().enumerate() {
            *p = (x.value * self.partials[k] - self.value * x.partials[k]) / r2;
        }
        Ok(Self {
            value: self.value.atan2(x.value),
            partials,
        })
    }

    pub fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn try_div(self, rhs: Self) -> Result<Self> {
        if rhs.value == 0.0 {
            return Err(Error::NumericDomain {
                op: "div",
                value: rhs.value,
            });
        }
        Ok(self / rhs)
    }
}

#[inline]
fn boundary_safe(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        x.signum() * (1.0 - ACOS_CLAMP_TOL)
    } else {
        x
    }
}

impl<const N: usize> Real for Dual<N> {
    #[inline]
    fn constant(x: f64) -> Self {
        Dual::constant(x)
    }

    #[inline]
    fn value(&self) -> f64 {
        self.value
    }

    fn try_sqrt(self) -> Result<Self> {
        self.sqrt()
    }

    fn try_acos(self) -> Result<Self> {
        self.acos()
    }

    fn try_div(self, rhs: Self) -> Result<Self> {
        Dual::try_div(self, rhs)
    }

    fn sin(self) -> Self {
        Dual::sin(self)
    }

    fn cos(self) -> Self {
        Dual::cos(self)
    }
}

impl<const N: usize> From<f64> for Dual<N> {
    fn from(value: f64) -> Self {
        Dual::constant(value)
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (p, q) in self.partials.iter_mut().zip(rhs.partials) {
            *p += q;
        }
        self
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (p, q) in self.partials.iter_mut().zip(rhs.partials) {
            *p -= q;
        }
        self
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut partials = [0.0; N];
        for (k, p) in partials.iter_mut().enumerate() {
            *p = self.partials[k] * rhs.value + self.value * rhs.partials[k];
        }
        Self {
            value: self.value * rhs.value,
            partials,
        }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        let mut partials = [0.0; N];
        for (k, p) in partials.iter_mut().enumerate() {
            *p = (self.partials[k] - value * rhs.partials[k]) * inv;
        }
        Self { value, partials }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        self.value = -self.value;
        for p in &mut self.partials {
            *p = -*p;
        }
        self
    }
}

impl<const N: usize> Add<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(mut self, rhs: f64) -> Self {
        self.value *= rhs;
        for p in &mut self.partials {
            *p *= rhs;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(mut self, rhs: f64) -> Self {
        self.value /= rhs;
        for p in &mut self.partials {
            *p /= rhs;
        }
        self
    }
}

impl<const N: usize> Mul<Dual<N>> for f64 {
    type Output = Dual<N>;
    #[inline]
    fn mul(self, rhs: Dual<N>) -> Dual<N> {
        rhs * self
    }
}

impl<const N: usize> AddAssign for Dual<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> SubAssign for Dual<N> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const N: usize> MulAssign for Dual<N> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Lift a real 3-vector into dual numbers seeded along directions 0, 1, 2.
pub fn lift_vector(v: [f64; 3]) -> [Dual<3>; 3] {
    [
        Dual {
            value: v[0],
            partials: [1.0, 0.0, 0.0],
        },
        Dual {
            value: v[1],
            partials: [0.0, 1.0, 0.0],
        },
        Dual {
            value: v[2],
            partials: [0.0, 0.0, 1.0],
        },
    ]
}

pub fn constant_vector<S: Real>(v: [f64; 3]) -> [S; 3] {
    [S::constant(v[0]), S::constant(v[1]), S::constant(v[2])]
}

#[inline]
pub fn dot<S: Real>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<S: Real>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm<S: Real>(a: &[S; 3]) -> Result<S> {
    dot(a, a).try_sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn lift_variable_seeds_unit_direction() {
        let a = Dual::<3>::variable(2.0, 0).unwrap();
        assert_eq!(a.value, 2.0);
        assert_eq!(a.partials, [1.0, 0.0, 0.0]);
        let b = Dual::<3>::variable(0.0, 2).unwrap();
        assert_eq!(b.partials, [0.0, 0.0, 1.0]);
        assert!(matches!(
            Dual::<3>::variable(1.0, 3),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn square_has_derivative_two_x() {
        let x = Dual::<3>::variable(3.0, 1).unwrap();
        let y = x * x;
        assert_eq!(y.value, 9.0);
        assert_eq!(y.partials, [0.0, 6.0, 0.0]);
    }

    #[test]
    fn sin_at_zero() {
        let s = Dual::<1>::variable(0.0, 0).unwrap().sin();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.partials[0], 1.0);
    }

    #[test]
    fn pythagorean_norm() {
        let x = Dual::<3>::variable(3.0, 0).unwrap();
        let v = [x, Dual::constant(4.0), Dual::constant(0.0)];
        let n = norm(&v).unwrap();
        assert_eq!(n.value, 5.0);
        assert!((n.partials[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        let x0 = 0.37;
        let x = Dual::<1>::variable(x0, 0).unwrap();
        let cases: Vec<(Dual<1>, fn(f64) -> f64)> = vec![
            (x.sqrt().unwrap(), f64::sqrt),
            (x.powi(3), |t| t.powi(3)),
            (x.powf(2.5).unwrap(), |t| t.powf(2.5)),
            (x.exp(), f64::exp),
            (x.ln().unwrap(), f64::ln),
            (x.cos(), f64::cos),
            (x.tan(), f64::tan),
            (x.asin().unwrap(), f64::asin),
            (x.acos().unwrap(), f64::acos),
            (x.atan(), f64::atan),
            (x / (x + 1.0), |t| t / (t + 1.0)),
        ];
        for (d, f) in cases {
            assert!((d.value - f(x0)).abs() < 1e-15);
            let g = fd(f, x0);
            assert!((d.partials[0] - g).abs() < 1e-8 * g.abs().max(1.0));
        }
        let y = Dual::<1>::constant(-0.8);
        let a = x.atan2(y).unwrap();
        assert!((a.value - x0.atan2(-0.8)).abs() < 1e-15);
        assert!((a.partials[0] - fd(|t| t.atan2(-0.8), x0)).abs() < 1e-8);
    }

    #[test]
    fn domain_errors_name_the_operation() {
        let neg = Dual::<3>::constant(-1.0);
        match neg.sqrt() {
            Err(Error::NumericDomain { op, .. }) => assert_eq!(op, "sqrt"),
            other => panic!("{other:?}"),
        }
        match Dual::<3>::constant(1.1).acos() {
            Err(Error::NumericDomain { op, .. }) => assert_eq!(op, "acos"),
            other => panic!("{other:?}"),
        }
        assert!(Dual::<3>::constant(1.0)
            .try_div(Dual::constant(0.0))
            .is_err());
        assert!(Real::try_sqrt(-1e-300_f64).is_err());
    }

    #[test]
    fn acos_clamps_near_boundary() {
        let x = Dual::<1> {
            value: 1.0 + 5e-13,
            partials: [1.0],
        };
        let a = x.acos().unwrap();
        assert_eq!(a.value, 0.0);
        assert!(a.partials[0].is_finite());
        let expected = -1.0 / (1.0 - (1.0 - 1e-12_f64).powi(2)).sqrt();
        assert_eq!(a.partials[0], expected);
        assert_eq!(Real::try_acos(-1.0 - 5e-13_f64).unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn constant_arithmetic_is_bitwise_real() {
        let (a, b) = (0.1_f64, 0.7_f64);
        let (da, db) = (Dual::<3>::constant(a), Dual::<3>::constant(b));
        assert_eq!((da + db).value.to_bits(), (a + b).to_bits());
        assert_eq!((da - db).value.to_bits(), (a - b).to_bits());
        assert_eq!((da * db).value.to_bits(), (a * b).to_bits());
        assert_eq!((da * db).partials, [0.0; 3]);
    }

    #[test]
    fn acos_through_cross_product_matches_fd() {
        // inclination-like quantity: acos(h_z / |h|), h = r x v
        let r = [1.1, -0.3, 0.2];
        let v0 = [0.1, 0.9, 0.25];
        let f = |v: [f64; 3]| -> f64 {
            let h = cross(&r, &v);
            (h[2] / norm(&h).unwrap()).acos()
        };
        let vd = lift_vector(v0);
        let rd = constant_vector::<Dual<3>>(r);
        let h = cross(&rd, &vd);
        let inc = (h[2] / norm(&h).unwrap()).acos().unwrap();
        for k in 0..3 {
            let step = 1e-6;
            let mut vp = v0;
            let mut vm = v0;
            vp[k] += step;
            vm[k] -= step;
            let g = (f(vp) - f(vm)) / (2.0 * step);
            assert!((inc.partials[k] - g).abs() <= 1e-7 * g.abs().max(1e-3));
        }
    }
}
