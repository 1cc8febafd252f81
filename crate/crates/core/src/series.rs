//! Truncated formal power series.
//!
//! A [`Series`] holds the coefficients `c_0..=c_N` of `Σ c_n z^n + O(z^{N+1})`.
//! Coefficients live in one scalar domain chosen by the type parameter:
//! exact [`Rational`]s for certification, [`Complex64`] for numerics.
//! Binary operations require equal truncation orders; nothing is resized
//! implicitly.

use std::fmt;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{to_f64, Rational};

/// Truncation order used when the caller has no reason to pick another.
pub const DEFAULT_ORDER: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("series has a zero constant term and is not invertible")]
    ZeroConstantTerm,
    #[error("series must have a zero constant term for {0}")]
    NonzeroConstantTerm(&'static str),
    #[error("polynomial of degree {degree} does not fit truncation order {order}")]
    DegreeExceedsOrder { degree: usize, order: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
}

/// Scalar domain of a [`Series`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Send
    + Sync
{
    fn from_usize(n: usize) -> Self;

    /// Multiplicative inverse; `None` for zero.
    fn checked_recip(&self) -> Option<Self>;

    /// Value as a complex double. Only called at evaluation time.
    fn to_complex(&self) -> Complex64;
}

impl Coeff for Rational {
    fn from_usize(n: usize) -> Self {
        Rational::from_integer(n.into())
    }

    fn checked_recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(to_f64(self), 0.0)
    }
}

impl Coeff for Complex64 {
    fn from_usize(n: usize) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn checked_recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

fn product<T: Coeff>(a: &T, b: &T) -> T {
    let mut t = a.clone();
    t *= b;
    t
}

#[derive(Clone, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(N={}) {:?}", self.coeffs.len() - 1, self.coeffs)
    }
}

impl<T: Coeff> Series<T> {
    /// Takes `c_0..=c_N`; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<T>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { coeffs })
    }

    /// Pads a polynomial with zeros up to `order`.
    pub fn from_polynomial(poly: Vec<T>, order: usize) -> Result<Self, SeriesError> {
        if poly.len() > order + 1 {
            let degree = poly.len() - 1;
            if poly[order + 1..].iter().any(|c| !c.is_zero()) {
                return Err(SeriesError::DegreeExceedsOrder { degree, order });
            }
        }
        let mut coeffs = poly;
        coeffs.resize(order + 1, T::zero());
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    /// The series `z` (zero when `order == 0`).
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &T {
        &self.coeffs[n]
    }

    fn same_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().cloned().map(Neg::neg).collect(),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| product(c, k)).collect(),
        }
    }

    /// Truncated Cauchy product `c_n = Σ_{k≤n} a_k b_{n-k}`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_order(other)?;
        let n_max = self.order();
        let mut out = vec![T::zero(); n_max + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n_max - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &product(a, b);
                }
            }
        }
        Ok(Self { coeffs: out })
    }

    /// `r` with `a·r = 1 + O(z^{N+1})`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let inv0 = self.coeffs[0]
            .checked_recip()
            .ok_or(SeriesError::ZeroConstantTerm)?;
        let n_max = self.order();
        let mut r: Vec<T> = Vec::with_capacity(n_max + 1);
        r.push(inv0.clone());
        for n in 1..=n_max {
            let mut acc = T::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &product(&self.coeffs[k], &r[n - k]);
                }
            }
            r.push(-product(&acc, &inv0));
        }
        Ok(Self { coeffs: r })
    }

    /// `exp(g)` for `g_0 = 0`, from `h' = g'h`:
    /// `(n+1) h_{n+1} = Σ_{k=0..n} (k+1) g_{k+1} h_{n-k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm("exp"));
        }
        let n_max = self.order();
        // (k+1) g_{k+1}, the coefficients of g'
        let deriv: Vec<T> = (0..n_max)
            .map(|k| product(&T::from_usize(k + 1), &self.coeffs[k + 1]))
            .collect();
        let mut h: Vec<T> = Vec::with_capacity(n_max + 1);
        h.push(T::one());
        for n in 0..n_max {
            let mut acc = T::zero();
            for k in 0..=n {
                if !deriv[k].is_zero() {
                    acc += &product(&deriv[k], &h[n - k]);
                }
            }
            let inv = T::from_usize(n + 1).checked_recip().expect("n + 1 > 0");
            h.push(product(&acc, &inv));
        }
        Ok(Self { coeffs: h })
    }

    /// `self^m` by binary exponentiation.
    pub fn pow(&self, mut m: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = result.mul(&base).expect("orders agree");
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base).expect("orders agree");
            }
        }
        result
    }

    /// `outer(inner(z))`, Horner's scheme. Needs `inner_0 = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.same_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm("composition"));
        }
        let n_max = self.order();
        let mut acc = Self::constant(self.coeffs[n_max].clone(), n_max);
        for c in self.coeffs[..n_max].iter().rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Horner evaluation of the truncated polynomial at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c.to_complex())
    }
}
