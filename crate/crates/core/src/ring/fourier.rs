use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::DiffRing;
use crate::error::Error;
use crate::rational::{GaussRational, Rational};

/// Trigonometric polynomial `sum_n c_n e^{inx}` on the circle.
///
/// Modes are kept sorted by frequency with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fourier {
    modes: Vec<(i64, GaussRational)>,
}

impl Fourier {
    pub fn from_modes<I: IntoIterator<Item = (i64, GaussRational)>>(modes: I) -> Self {
        let mut v: Vec<(i64, GaussRational)> = modes.into_iter().collect();
        v.sort_by_key(|(n, _)| *n);
        let mut out: Vec<(i64, GaussRational)> = Vec::with_capacity(v.len());
        for (n, c) in v {
            match out.last_mut() {
                Some((m, acc)) if *m == n => *acc += &c,
                _ => out.push((n, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Fourier { modes: out }
    }

    pub fn mode(n: i64, c: GaussRational) -> Self {
        Self::from_modes([(n, c)])
    }

    pub fn constant(c: Rational) -> Self {
        Self::mode(0, c.into())
    }

    /// `sin(nx) = (e^{inx} - e^{-inx}) / 2i`.
    pub fn sin(n: i64) -> Self {
        let half = Rational::new(1, 2);
        Self::from_modes([
            (n, GaussRational::new(Rational::zero(), -&half)),
            (-n, GaussRational::new(Rational::zero(), half)),
        ])
    }

    /// `cos(nx) = (e^{inx} + e^{-inx}) / 2`.
    pub fn cos(n: i64) -> Self {
        let half = GaussRational::real(Rational::new(1, 2));
        Self::from_modes([(n, half.clone()), (-n, half)])
    }

    pub fn modes(&self) -> &[(i64, GaussRational)] {
        &self.modes
    }

    pub fn coeff(&self, n: i64) -> GaussRational {
        self.modes
            .binary_search_by_key(&n, |(m, _)| *m)
            .map(|i| self.modes[i].1.clone())
            .unwrap_or_default()
    }

    pub fn mean(&self) -> GaussRational {
        self.coeff(0)
    }

    fn map_coeffs(&self, f: impl Fn(i64, &GaussRational) -> GaussRational) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|(n, c)| (*n, f(*n, c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Fourier { modes }
    }
}

impl DiffRing for Fourier {
    type Scalar = GaussRational;

    fn tag() -> String {
        "fourier".to_string()
    }

    fn zero() -> Self {
        Fourier::default()
    }

    fn one() -> Self {
        Self::constant(Rational::one())
    }

    fn from_rational(c: &Rational) -> Self {
        Self::constant(c.clone())
    }

    fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    fn add_assign(&mut self, other: &Self) {
        if other.modes.is_empty() {
            return;
        }
        if self.modes.is_empty() {
            self.modes = other.modes.clone();
            return;
        }
        let mut merged = Vec::with_capacity(self.modes.len() + other.modes.len());
        let mut a = core::mem::take(&mut self.modes).into_iter().peekable();
        let mut b = other.modes.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((n, _)), Some((m, _))) if n == m => {
                    let (n, mut c) = a.next().unwrap();
                    c += &b.next().unwrap().1;
                    if !c.is_zero() {
                        merged.push((n, c));
                    }
                }
                (Some((n, _)), Some((m, _))) if n < m => merged.push(a.next().unwrap()),
                (Some(_), Some(_)) | (None, Some(_)) => merged.push(b.next().unwrap().clone()),
                (Some(_), None) => merged.push(a.next().unwrap()),
                (None, None) => break,
            }
        }
        self.modes = merged;
    }

    fn neg(&self) -> Self {
        self.map_coeffs(|_, c| -c)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let [(n, c)] = self.modes.as_slice() {
            return Fourier { modes: other.modes.iter().map(|(m, d)| (n + m, c * d)).collect() };
        }
        if let [(n, c)] = other.modes.as_slice() {
            return Fourier { modes: self.modes.iter().map(|(m, d)| (n + m, d * c)).collect() };
        }
        let lo = self.modes[0].0 + other.modes[0].0;
        let hi = self.modes.last().unwrap().0 + other.modes.last().unwrap().0;
        let mut dense = alloc::vec![GaussRational::zero(); (hi - lo + 1) as usize];
        for (n, c) in &self.modes {
            for (m, d) in &other.modes {
                dense[(n + m - lo) as usize] += &(c * d);
            }
        }
        let modes = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64, c))
            .collect();
        Fourier { modes }
    }

    fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        self.map_coeffs(|_, v| v.scale(c))
    }

    fn derive(&self) -> Self {
        self.map_coeffs(|n, c| c.mul_i_int(n))
    }

    fn antiderive(&self) -> Result<Self, Error> {
        let mean = self.mean();
        if !mean.is_zero() {
            return Err(Error::NonZeroMean { mean: mean.to_string() });
        }
        // c e^{inx} -> c/(in) e^{inx} = -i c / n e^{inx}
        Ok(self.map_coeffs(|n, c| c.mul_i_int(-1).scale(&Rational::new(1, n))))
    }

    fn integrate(&self) -> Result<GaussRational, Error> {
        Ok(self.mean())
    }

    fn inverse(&self) -> Result<Self, Error> {
        match self.modes.as_slice() {
            [(n, c)] => Ok(Self::mode(-n, c.recip()?)),
            _ => Err(Error::NotAUnit),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64, d: i64) -> GaussRational {
        GaussRational::real(Rational::new(n, d))
    }

    #[test]
    fn additive_inverse_and_like_terms() {
        let a = Fourier::constant(Rational::one());
        assert!(a.add(&a.neg()).is_zero());
        let h = Fourier::mode(1, g(1, 2));
        assert_eq!(h.add(&h), Fourier::mode(1, g(1, 1)));
    }

    #[test]
    fn frequencies_add() {
        let e = Fourier::mode(1, g(1, 1));
        let f = Fourier::mode(-1, g(1, 1));
        assert_eq!(e.mul(&f), Fourier::one());
    }

    #[test]
    fn eigenfunction_derivatives() {
        let e = Fourier::mode(1, g(1, 1));
        assert_eq!(e.derive(), Fourier::mode(1, GaussRational::i()));
        assert!(Fourier::constant(Rational::new(5, 3)).derive().is_zero());
        // antiderive(e^{ix}) = (1/i) e^{ix} = -i e^{ix}
        let anti = e.antiderive().unwrap();
        assert_eq!(anti, Fourier::mode(1, -&GaussRational::i()));
        assert_eq!(anti.derive(), e);
    }

    #[test]
    fn antiderive_rejects_mean() {
        let err = Fourier::one().antiderive().unwrap_err();
        assert!(matches!(err, Error::NonZeroMean { .. }));
    }

    #[test]
    fn mean_extraction() {
        let a = Fourier::constant(Rational::from_int(3)).add(&Fourier::mode(1, g(1, 1)));
        assert_eq!(a.integrate().unwrap(), g(3, 1));
        assert!(a.derive().integrate().unwrap().is_zero());
    }

    #[test]
    fn single_mode_inverse() {
        assert_eq!(Fourier::constant(Rational::from_int(2)).inverse().unwrap(), Fourier::constant(Rational::new(1, 2)));
        let a = Fourier::mode(3, GaussRational::new(Rational::one(), Rational::one()));
        let b = a.inverse().unwrap();
        assert_eq!(a.mul(&b), Fourier::one());
        assert_eq!(b.modes()[0].0, -3);
        assert_eq!(Fourier::cos(1).inverse(), Err(Error::NotAUnit));
    }

    #[test]
    fn sin_cos_identity() {
        let s = Fourier::sin(1);
        let c = Fourier::cos(1);
        assert_eq!(s.mul(&s).add(&c.mul(&c)), Fourier::one());
        assert_eq!(s.derive(), c);
    }
}
