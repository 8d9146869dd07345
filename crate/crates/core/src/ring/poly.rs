use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::DiffRing;
use crate::error::Error;
use crate::rational::Rational;

/// Polynomial in `Q[x]` with the derivation `d/dx`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    /// (degree, coefficient), sorted by degree, no zeros
    terms: Vec<(u32, Rational)>,
}

impl Poly {
    pub fn from_terms<I: IntoIterator<Item = (u32, Rational)>>(terms: I) -> Self {
        let mut v: Vec<(u32, Rational)> = terms.into_iter().collect();
        v.sort_by_key(|(d, _)| *d);
        let mut out: Vec<(u32, Rational)> = Vec::with_capacity(v.len());
        for (d, c) in v {
            match out.last_mut() {
                Some((e, acc)) if *e == d => *acc += &c,
                _ => out.push((d, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn monomial(degree: u32, c: Rational) -> Self {
        Self::from_terms([(degree, c)])
    }

    pub fn x() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn coeff(&self, d: u32) -> Rational {
        self.terms
            .binary_search_by_key(&d, |(e, _)| *e)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }
}

impl DiffRing for Poly {
    type Scalar = Rational;

    fn tag() -> String {
        "poly".to_string()
    }

    fn zero() -> Self {
        Poly::default()
    }

    fn one() -> Self {
        Self::monomial(0, Rational::one())
    }

    fn from_rational(c: &Rational) -> Self {
        Self::monomial(0, c.clone())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect() }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut prod = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (d, c) in &self.terms {
            for (e, f) in &other.terms {
                prod.push((d + e, c * f));
            }
        }
        Self::from_terms(prod)
    }

    fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(d, v)| (*d, v * c)))
    }

    fn derive(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(d, _)| *d > 0)
                .map(|(d, c)| (d - 1, c * &Rational::from_int(*d as i64))),
        )
    }

    fn antiderive(&self) -> Result<Self, Error> {
        Ok(Self::from_terms(
            self.terms.iter().map(|(d, c)| (d + 1, c * &Rational::new(1, *d as i64 + 1))),
        ))
    }

    fn integrate(&self) -> Result<Rational, Error> {
        Err(Error::UnsupportedRing("the integration functional"))
    }

    fn inverse(&self) -> Result<Self, Error> {
        match self.terms.as_slice() {
            [(0, c)] => Ok(Self::monomial(0, c.recip()?)),
            _ => Err(Error::NotAUnit),
        }
    }
}
