//! First-order dual numbers `a + b·ε`, `ε² = 0`.
//!
//! Used to take exact directional derivatives of polynomial maps on jet
//! coordinates (for brackets of prolonged vector fields).

use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, Zero};

use crate::scalar::{Scalar, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    pub fn constant(re: T) -> Self {
        Self { re, eps: T::zero() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = self.re.clone() * rhs.eps + self.eps * rhs.re.clone();
        Self::new(self.re * rhs.re, eps)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let denom = rhs.re.clone() * rhs.re.clone();
        let eps = (self.eps * rhs.re.clone() - self.re.clone() * rhs.eps) / denom;
        Self::new(self.re / rhs.re, eps)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_rational(q: &Q) -> Self {
        Self::constant(T::from_rational(q))
    }

    fn magnitude(&self) -> f64 {
        self.re.magnitude()
    }

    fn to_float(&self) -> f64 {
        self.re.to_float()
    }

    fn render(&self) -> String {
        format!("{}+{}ε", self.re.render(), self.eps.render())
    }
}
