use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{DiffRing, Scalar};
use crate::error::Error;
use crate::rational::Rational;

/// Truncation marker for elements that are exact constants in `z`.
pub const Z_EXACT: u32 = u32::MAX;

fn normalize<T>(z_max: u32, items: Vec<(u32, T)>, add: impl Fn(&mut T, T), is_zero: impl Fn(&T) -> bool) -> Vec<(u32, T)> {
    let mut v = items;
    v.retain(|(m, _)| *m <= z_max);
    v.sort_by_key(|(m, _)| *m);
    let mut out: Vec<(u32, T)> = Vec::with_capacity(v.len());
    for (m, c) in v {
        match out.last_mut() {
            Some((p, acc)) if *p == m => add(acc, c),
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !is_zero(c));
    out
}

fn eq_upto<T: PartialEq>(a: &[(u32, T)], b: &[(u32, T)], z_max: u32) -> bool {
    let a = a.iter().take_while(|(m, _)| *m <= z_max);
    let b = b.iter().take_while(|(m, _)| *m <= z_max);
    a.eq(b)
}

/// Truncated series `sum_{m <= z_max} z^m a_m` over a base ring.
///
/// `z_max` is the highest power carried. Operations on two operands keep
/// the smaller truncation; constants built from rationals are exact
/// ([`Z_EXACT`]) and adopt the truncation of whatever they meet.
#[derive(Clone, Debug)]
pub struct ZSeries<R> {
    z_max: u32,
    terms: Vec<(u32, R)>,
}

impl<R: DiffRing> ZSeries<R> {
    pub fn new<I: IntoIterator<Item = (u32, R)>>(z_max: u32, terms: I) -> Self {
        let terms = normalize(z_max, terms.into_iter().collect(), |a, b| a.add_assign(&b), R::is_zero);
        ZSeries { z_max, terms }
    }

    /// Embeds a base-ring element as an exact `z`-constant.
    pub fn constant(a: R) -> Self {
        Self::new(Z_EXACT, [(0, a)])
    }

    pub fn z_max(&self) -> u32 {
        self.z_max
    }

    pub fn terms(&self) -> &[(u32, R)] {
        &self.terms
    }

    pub fn coeff(&self, m: u32) -> R {
        self.terms
            .binary_search_by_key(&m, |(p, _)| *p)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| R::zero())
    }

    fn map(&self, f: impl Fn(&R) -> R) -> Self {
        Self::new(self.z_max, self.terms.iter().map(|(m, a)| (*m, f(a))))
    }

    fn try_map(&self, f: impl Fn(&R) -> Result<R, Error>) -> Result<Self, Error> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, a) in &self.terms {
            out.push((*m, f(a)?));
        }
        Ok(Self::new(self.z_max, out))
    }
}

impl<R: DiffRing> PartialEq for ZSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        eq_upto(&self.terms, &other.terms, self.z_max.min(other.z_max))
    }
}

impl<R: DiffRing> DiffRing for ZSeries<R> {
    type Scalar = ZScalar<R::Scalar>;

    fn tag() -> String {
        let mut t = R::tag();
        t.push_str("-z");
        t
    }

    fn zero() -> Self {
        ZSeries { z_max: Z_EXACT, terms: Vec::new() }
    }

    fn one() -> Self {
        Self::constant(R::one())
    }

    fn from_rational(c: &Rational) -> Self {
        Self::constant(R::from_rational(c))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let z_max = self.z_max.min(other.z_max);
        Self::new(z_max, self.terms.iter().chain(other.terms.iter()).cloned())
    }

    fn neg(&self) -> Self {
        self.map(R::neg)
    }

    fn mul(&self, other: &Self) -> Self {
        let z_max = self.z_max.min(other.z_max);
        let mut prod = Vec::new();
        for (m, a) in &self.terms {
            for (p, b) in &other.terms {
                if let Some(s) = m.checked_add(*p).filter(|s| *s <= z_max) {
                    prod.push((s, a.mul(b)));
                }
            }
        }
        Self::new(z_max, prod)
    }

    fn scale(&self, c: &Rational) -> Self {
        self.map(|a| a.scale(c))
    }

    fn derive(&self) -> Self {
        self.map(R::derive)
    }

    fn antiderive(&self) -> Result<Self, Error> {
        self.try_map(R::antiderive)
    }

    fn integrate(&self) -> Result<ZScalar<R::Scalar>, Error> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, a) in &self.terms {
            out.push((*m, a.integrate()?));
        }
        Ok(ZScalar::new(self.z_max, out))
    }

    fn inverse(&self) -> Result<Self, Error> {
        let head = self.coeff(0);
        let b0 = head.inverse()?;
        if self.z_max == Z_EXACT {
            return if self.terms.len() == 1 { Ok(Self::constant(b0)) } else { Err(Error::NotAUnit) };
        }
        // b_m = -b_0 sum_{j=1..m} a_j b_{m-j}
        let n = self.z_max as usize;
        let mut b: Vec<R> = Vec::with_capacity(n + 1);
        b.push(b0.clone());
        for m in 1..=n {
            let mut acc = R::zero();
            for (j, a) in self.terms.iter().filter(|(j, _)| *j >= 1 && (*j as usize) <= m) {
                acc.add_assign(&a.mul(&b[m - *j as usize]));
            }
            b.push(b0.mul(&acc).neg());
        }
        Ok(Self::new(self.z_max, b.into_iter().enumerate().map(|(m, c)| (m as u32, c))))
    }
}

/// Scalar-valued truncated `z`-polynomial (the trace codomain over a `z`-ring).
#[derive(Clone, Debug)]
pub struct ZScalar<S> {
    z_max: u32,
    terms: Vec<(u32, S)>,
}

impl<S: Scalar> ZScalar<S> {
    pub fn new<I: IntoIterator<Item = (u32, S)>>(z_max: u32, terms: I) -> Self {
        let terms = normalize(z_max, terms.into_iter().collect(), |a, b| *a = a.add(&b), S::is_zero);
        ZScalar { z_max, terms }
    }

    pub fn z_max(&self) -> u32 {
        self.z_max
    }

    pub fn terms(&self) -> &[(u32, S)] {
        &self.terms
    }
}

impl<S: Scalar> PartialEq for ZScalar<S> {
    fn eq(&self, other: &Self) -> bool {
        eq_upto(&self.terms, &other.terms, self.z_max.min(other.z_max))
    }
}

impl<S: Scalar> fmt::Display for ZScalar<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match m {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{m}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Scalar for ZScalar<S> {
    fn zero() -> Self {
        ZScalar { z_max: Z_EXACT, terms: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        Self::new(self.z_max.min(other.z_max), self.terms.iter().chain(other.terms.iter()).cloned())
    }

    fn neg(&self) -> Self {
        Self::new(self.z_max, self.terms.iter().map(|(m, c)| (*m, c.neg())))
    }

    fn scale(&self, c: &Rational) -> Self {
        Self::new(self.z_max, self.terms.iter().map(|(m, v)| (*m, v.scale(c))))
    }

    fn mul(&self, other: &Self) -> Self {
        let z_max = self.z_max.min(other.z_max);
        let mut prod = Vec::new();
        for (m, a) in &self.terms {
            for (p, b) in &other.terms {
                if let Some(s) = m.checked_add(*p).filter(|s| *s <= z_max) {
                    prod.push((s, a.mul(b)));
                }
            }
        }
        Self::new(z_max, prod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussRational;
    use crate::ring::Fourier;

    fn f(n: i64) -> Fourier {
        Fourier::mode(n, GaussRational::one())
    }

    #[test]
    fn componentwise_add() {
        let a = ZSeries::new(2, [(0, f(1)), (1, f(2))]);
        let b = ZSeries::new(2, [(1, f(3))]);
        assert_eq!(a.add(&b), ZSeries::new(2, [(0, f(1)), (1, f(2).add(&f(3)))]));
    }

    #[test]
    fn truncated_product() {
        // (1 + z a)(1 + z b) = 1 + z (a + b) at z_max = 1
        let a = ZSeries::new(1, [(0, Fourier::one()), (1, f(1))]);
        let b = ZSeries::new(1, [(0, Fourier::one()), (1, f(-2))]);
        assert_eq!(a.mul(&b), ZSeries::new(1, [(0, Fourier::one()), (1, f(1).add(&f(-2)))]));
    }

    #[test]
    fn geometric_inverse() {
        let a = f(1);
        let u = ZSeries::new(2, [(0, Fourier::one()), (1, a.clone())]);
        let inv = u.inverse().unwrap();
        let expect = ZSeries::new(2, [(0, Fourier::one()), (1, a.neg()), (2, a.mul(&a))]);
        assert_eq!(inv, expect);
        assert_eq!(u.mul(&inv), ZSeries::one());
    }

    #[test]
    fn min_truncation_wins() {
        let a = ZSeries::new(3, [(3, f(1))]);
        let b = ZSeries::new(2, [(0, Fourier::one())]);
        let s = a.add(&b);
        assert_eq!(s.z_max(), 2);
        assert_eq!(s.terms().len(), 1);
    }

    #[test]
    fn agrees_with_base_on_constants() {
        let a = ZSeries::constant(f(1).add(&f(-1)));
        let b = ZSeries::constant(f(2));
        assert_eq!(a.mul(&b), ZSeries::constant(f(1).add(&f(-1)).mul(&f(2))));
        assert_eq!(a.derive(), ZSeries::constant(f(1).add(&f(-1)).derive()));
    }
}
