//! Gaussian rationals: complex numbers with rational real and imaginary parts.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

/// A complex number `re + i im` with exact rational parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactComplex {
    pub re: Rational64,
    pub im: Rational64,
}

impl ExactComplex {
    pub const ZERO: Self = Self::from_ints(0, 0);
    pub const ONE: Self = Self::from_ints(1, 0);
    pub const I: Self = Self::from_ints(0, 1);

    pub const fn new(re: Rational64, im: Rational64) -> Self {
        Self { re, im }
    }

    pub const fn from_ints(re: i64, im: i64) -> Self {
        Self {
            re: Rational64::new_raw(re, 1),
            im: Rational64::new_raw(im, 1),
        }
    }

    /// `num/den` on the real axis.
    pub fn real(num: i64, den: i64) -> Self {
        Self::new(Rational64::new(num, den), Rational64::zero())
    }

    /// `i num/den`.
    pub fn imag(num: i64, den: i64) -> Self {
        Self::new(Rational64::zero(), Rational64::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(self) -> Rational64 {
        self.re * self.re + self.im * self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(Self::new(self.re / d, -self.im / d))
    }

    pub fn to_complex64(self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl From<i64> for ExactComplex {
    fn from(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
}

impl From<Rational64> for ExactComplex {
    fn from(v: Rational64) -> Self {
        Self::new(v, Rational64::zero())
    }
}

impl Add for ExactComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for ExactComplex {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for ExactComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ExactComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for ExactComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Div for ExactComplex {
    type Output = Self;
    /// Panics on division by zero, like the rational parts do.
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero ExactComplex")
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im < Rational64::zero() => {
                write!(f, "{}-{}i", self.re, -self.im)
            }
            (false, false) => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}
