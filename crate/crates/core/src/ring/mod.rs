//! Exact differential coefficient rings.
//!
//! A [`DiffRing`] is a commutative ring over the rationals with a derivation
//! `derive`, an optional right inverse `antiderive`, and an optional linear
//! functional `integrate` that kills derivatives. Three concrete rings are
//! provided:
//!
//! * [`Fourier`]: trigonometric polynomials `sum c_n e^{inx}` over `Q(i)`,
//!   with `integrate` returning the mean.
//! * [`Poly`]: `Q[x]` with `d/dx`; antiderivatives always exist, no integral.
//! * [`ZSeries`]: truncated power series `sum z^m a_m` over another ring, with
//!   every operation applied componentwise in `z`.

mod fourier;
mod poly;
mod zseries;

use alloc::string::String;
use core::fmt;

pub use fourier::Fourier;
pub use poly::Poly;
pub use zseries::{ZScalar, ZSeries, Z_EXACT};

use crate::error::Error;
use crate::rational::{GaussRational, Rational};

/// Values of the integration functional (the trace codomain).
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn mul(&self, other: &Self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Scalar for GaussRational {
    fn zero() -> Self {
        GaussRational::zero()
    }
    fn is_zero(&self) -> bool {
        GaussRational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        GaussRational::scale(self, c)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// A commutative differential ring with exact arithmetic.
///
/// Elements are immutable values in canonical form; `PartialEq` is
/// structural on that form (truncated series compare up to the common
/// truncation order).
pub trait DiffRing: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Scalar: Scalar;

    /// Ring tag used in file formats (`"fourier"`, `"poly"`, `"fourier-z"`, ...).
    fn tag() -> String;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(c: &Rational) -> Self;
    fn is_zero(&self) -> bool;

    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;

    fn derive(&self) -> Self;

    /// Right inverse of [`derive`](Self::derive) with integration constant 0.
    fn antiderive(&self) -> Result<Self, Error>;

    /// The functional `I` with `I(derive(u)) = 0`.
    fn integrate(&self) -> Result<Self::Scalar, Error>;

    /// Multiplicative inverse, or [`Error::NotAUnit`].
    fn inverse(&self) -> Result<Self, Error>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn derive_n(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = out.derive();
        }
        out
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn integration_by_parts_fourier() {
        let a = Fourier::from_modes([(1, r(1, 2).into()), (-2, GaussRational::i())]);
        let b = Fourier::from_modes([(2, r(3, 1).into()), (-1, r(-1, 5).into()), (0, r(7, 1).into())]);
        let lhs = a.derive().mul(&b).integrate().unwrap();
        let rhs = a.mul(&b.derive()).integrate().unwrap();
        assert_eq!(lhs, Scalar::neg(&rhs));
    }

    #[test]
    fn zseries_componentwise_integrate() {
        // I(z (2 + e^{ix})) = 2z
        let inner = Fourier::constant(r(2, 1)).add(&Fourier::mode(1, GaussRational::one()));
        let z = ZSeries::new(2, [(1, inner)]);
        let got = z.integrate().unwrap();
        assert_eq!(got, ZScalar::new(2, [(1, GaussRational::real(r(2, 1)))]));
    }
}
