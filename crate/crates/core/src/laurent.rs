//! Laurent series `sum_{n >= N} a_n X^n` over the rationals, and the Euler
//! products `(1 + X^-1/n)^n` whose coefficients converge degreewise while the
//! order drops without bound.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Error;
use crate::rational::Rational;

/// Element of `Q((X))`, known exactly below degree `prec` (or everywhere).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    terms: BTreeMap<i64, Rational>,
    /// Coefficients of degree `>= prec` are unknown; `None` means exact.
    prec: Option<i64>,
}

impl LaurentSeries {
    pub fn exact<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        Self::build(terms, None)
    }

    pub fn with_precision<I: IntoIterator<Item = (i64, Rational)>>(terms: I, prec: i64) -> Self {
        Self::build(terms, Some(prec))
    }

    fn build<I: IntoIterator<Item = (i64, Rational)>>(terms: I, prec: Option<i64>) -> Self {
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (d, c) in terms {
            if prec.is_some_and(|p| d >= p) {
                continue;
            }
            *map.entry(d).or_default() += &c;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentSeries { terms: map, prec }
    }

    pub fn one() -> Self {
        Self::exact([(0, Rational::one())])
    }

    /// `X^d`.
    pub fn x_pow(d: i64) -> Self {
        Self::exact([(d, Rational::one())])
    }

    pub fn coeff(&self, d: i64) -> Rational {
        self.terms.get(&d).cloned().unwrap_or_default()
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn lowest_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = match (self.prec, other.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::build(self.terms.iter().chain(other.terms.iter()).map(|(d, c)| (*d, c.clone())), prec)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::build(self.terms.iter().map(|(d, v)| (*d, v * c)), self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut prec: Option<i64> = None;
        let mut cap = |p: Option<i64>, low: Option<i64>| {
            if let Some(p) = p {
                let bound = p + low.unwrap_or(0);
                prec = Some(prec.map_or(bound, |q: i64| q.min(bound)));
            }
        };
        cap(self.prec, other.lowest_degree().or(other.prec));
        cap(other.prec, self.lowest_degree().or(self.prec));
        let mut out = Vec::new();
        for (d, a) in &self.terms {
            for (e, b) in &other.terms {
                out.push((d + e, a * b));
            }
        }
        Self::build(out, prec)
    }

    /// Multiplicative inverse known below degree `prec`.
    ///
    /// With `a = sum_{k >= N} a_k X^k`: `b_{-N} = 1/a_N` and
    /// `b_{-N+p} = -a_N^{-1} sum_{i=1..p} a_{N+i} b_{-N+p-i}`.
    pub fn inverse(&self, prec: i64) -> Result<Self, Error> {
        let n = self.lowest_degree().ok_or(Error::NotAUnit)?;
        let lead_inv = self.terms[&n].recip()?;
        let prec = match self.prec {
            Some(pa) => prec.min(pa - 2 * n),
            None => prec,
        };
        let count = (prec + n).max(0) as usize;
        let mut b: Vec<Rational> = Vec::with_capacity(count);
        for p in 0..count {
            if p == 0 {
                b.push(lead_inv.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for i in 1..=p {
                if let Some(a) = self.terms.get(&(n + i as i64)) {
                    acc += &(a * &b[p - i]);
                }
            }
            b.push(-&(&lead_inv * &acc));
        }
        Ok(Self::with_precision(b.into_iter().enumerate().map(|(p, c)| (p as i64 - n, c)), prec))
    }
}

/// `(1 + X^-1/n)^n` restricted to degrees `-m_max ..= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerProduct {
    pub n: u64,
    /// `(degree, coefficient)` for degrees `-m_max ..= 0`, highest first.
    pub window: Vec<(i64, Rational)>,
    /// Lowest degree of the whole product.
    pub lowest_degree: i64,
}

/// Coefficient of `X^-m` in `(1 + X^-1/n)^n`: `C(n, m) / n^m`.
pub fn euler_coefficient(n: u64, m: u64) -> Rational {
    &Rational::binomial(n, m) * &Rational::from_int(n as i64).pow(m as u32).recip().expect("n >= 1")
}

pub fn euler_step_product(n: u64, m_max: u64) -> EulerProduct {
    assert!(n >= 1, "Euler product needs n >= 1");
    let window = (0..=m_max).map(|m| (-(m as i64), euler_coefficient(n, m))).collect();
    EulerProduct { n, window, lowest_degree: -(n as i64) }
}

/// The full product as a Laurent series, by repeated multiplication.
pub fn euler_product_series(n: u64) -> LaurentSeries {
    let step = LaurentSeries::exact([(0, Rational::one()), (-1, Rational::new(1, n as i64))]);
    let mut acc = LaurentSeries::one();
    for _ in 0..n {
        acc = acc.mul(&step);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitCheck {
    pub m: u64,
    pub n: u64,
    /// `C(n, m) / n^m`
    pub value: Rational,
    /// `value * m!`
    pub scaled: Rational,
    /// `1 - m(m-1)/(2n)`
    pub lower: Rational,
    /// `lower <= scaled <= 1`
    pub holds: bool,
}

/// Checks `1 - m(m-1)/(2n) <= C(n,m) m! / n^m <= 1` exactly (`m <= n`).
pub fn coefficient_limit_check(m: u64, n: u64) -> LimitCheck {
    assert!(m <= n, "need m <= n");
    let value = euler_coefficient(n, m);
    let scaled = &value * &Rational::factorial(m);
    let lower = &Rational::one() - &Rational::new((m * m.saturating_sub(1)) as i64, 2 * n as i64);
    let holds = lower <= scaled && scaled <= Rational::one();
    LimitCheck { m, n, value, scaled, lower, holds }
}

pub const DIVERGENCE_VERDICT: &str = "pointwise convergent, order-unbounded";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceReport {
    pub products: Vec<EulerProduct>,
    pub checks: Vec<LimitCheck>,
    /// Lowest degree equals `-n` and strictly decreases along increasing `n`.
    pub order_unbounded: bool,
    /// Every sandwich holds and `C(n,m) m!/n^m` is nondecreasing in `n`.
    pub pointwise_convergent: bool,
    pub verdict: Option<&'static str>,
}

/// Evidence that the Euler products have no limit in `Q((X))`.
pub fn divergence_witness(n_list: &[u64], m_max: u64) -> DivergenceReport {
    let mut ns: Vec<u64> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let products: Vec<EulerProduct> = ns.iter().map(|&n| euler_step_product(n, m_max)).collect();
    let order_unbounded = products.iter().all(|p| p.lowest_degree == -(p.n as i64))
        && products.windows(2).all(|w| w[1].lowest_degree < w[0].lowest_degree);

    let mut checks = Vec::new();
    let mut monotone = true;
    for m in 0..=m_max {
        let mut prev: Option<Rational> = None;
        for &n in ns.iter().filter(|&&n| n >= m) {
            let c = coefficient_limit_check(m, n);
            if prev.as_ref().is_some_and(|p| *p > c.scaled) {
                monotone = false;
            }
            prev = Some(c.scaled.clone());
            checks.push(c);
        }
    }
    let pointwise_convergent = monotone && checks.iter().all(|c| c.holds);
    let verdict = (order_unbounded && pointwise_convergent).then_some(DIVERGENCE_VERDICT);
    DivergenceReport { products, checks, order_unbounded, pointwise_convergent, verdict }
}
