//! Formal pseudo-differential operators `sum a_alpha d^alpha`.
//!
//! A [`PsiOp`] stores finitely many coefficients keyed by order together with
//! a `depth`. Two regimes:
//!
//! * exact: the stored terms are the whole operator; `depth` is only the
//!   default floor below which products are truncated.
//! * truncated: coefficients at orders `>= depth` are exact, orders below are
//!   unknown.
//!
//! Every operation propagates both pieces of information conservatively, so
//! a coefficient reported at an order `>= depth` never changes when inputs
//! are recomputed more deeply.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Error;
use crate::rational::Rational;
use crate::ring::DiffRing;

/// Default truncation floor for exact operators built without one.
pub const DEFAULT_DEPTH: i64 = -8;

#[derive(Clone, Debug)]
pub struct PsiOp<R> {
    terms: BTreeMap<i64, R>,
    depth: i64,
    exact: bool,
}

impl<R: DiffRing> PsiOp<R> {
    /// An exact operator from `(order, coefficient)` pairs.
    pub fn exact<I: IntoIterator<Item = (i64, R)>>(terms: I) -> Self {
        Self::build(terms, DEFAULT_DEPTH, true)
    }

    /// An operator known only at orders `>= depth`; terms below are discarded.
    pub fn truncated<I: IntoIterator<Item = (i64, R)>>(terms: I, depth: i64) -> Self {
        Self::build(terms, depth, false)
    }

    fn build<I: IntoIterator<Item = (i64, R)>>(terms: I, depth: i64, exact: bool) -> Self {
        let mut map: BTreeMap<i64, R> = BTreeMap::new();
        for (a, c) in terms {
            if !exact && a < depth {
                continue;
            }
            match map.get_mut(&a) {
                Some(acc) => acc.add_assign(&c),
                None => {
                    map.insert(a, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        PsiOp { terms: map, depth, exact }
    }

    pub fn zero() -> Self {
        Self::exact([])
    }

    pub fn one() -> Self {
        Self::monomial(0, R::one())
    }

    /// `c d^order`.
    pub fn monomial(order: i64, c: R) -> Self {
        Self::exact([(order, c)])
    }

    /// `d^n` for any integer `n`.
    pub fn d_pow(n: i64) -> Self {
        Self::monomial(n, R::one())
    }

    /// Multiplication by a ring element (order 0).
    pub fn scalar(c: R) -> Self {
        Self::monomial(0, c)
    }

    /// Same operator with a different default floor (exact) or the same
    /// operator truncated further (truncated).
    pub fn with_floor(mut self, floor: i64) -> Self {
        if self.exact {
            self.depth = floor;
            self
        } else {
            self.truncate(floor)
        }
    }

    /// Forget everything below `depth`.
    ///
    /// An exact operator with no terms below `depth` stays exact.
    pub fn truncate(&self, depth: i64) -> Self {
        if self.exact {
            if self.terms.keys().next().is_none_or(|lo| *lo >= depth) {
                return PsiOp { terms: self.terms.clone(), depth, exact: true };
            }
            return Self::build(self.terms.iter().map(|(a, c)| (*a, c.clone())), depth, false);
        }
        let depth = depth.max(self.depth);
        Self::build(self.terms.range(depth..).map(|(a, c)| (*a, c.clone())), depth, false)
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Floor for exact operators, reliable depth for truncated ones.
    pub fn depth(&self) -> i64 {
        self.depth
    }

    /// Depth below which coefficients are unknown, `None` if exact.
    pub fn reliable_depth(&self) -> Option<i64> {
        (!self.exact).then_some(self.depth)
    }

    /// No nonzero coefficient at any known order.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(R::is_one)
    }

    /// Highest order with a nonzero known coefficient.
    pub fn order(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest order with a nonzero known coefficient.
    pub fn low_order(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Upper bound on the order, accounting for the unknown tail.
    fn order_bound(&self) -> Option<i64> {
        let known = self.order();
        if self.exact {
            known
        } else {
            Some(known.map_or(self.depth - 1, |n| n.max(self.depth - 1)))
        }
    }

    pub fn coeff(&self, order: i64) -> R {
        self.terms.get(&order).cloned().unwrap_or_else(R::zero)
    }

    pub fn get(&self, order: i64) -> Option<&R> {
        self.terms.get(&order)
    }

    /// Terms in increasing order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &R)> + '_ {
        self.terms.iter().map(|(a, c)| (*a, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn combine_depth(&self, other: &Self) -> (i64, bool) {
        match (self.exact, other.exact) {
            (true, true) => (self.depth.min(other.depth), true),
            (false, true) => (self.depth, false),
            (true, false) => (other.depth, false),
            (false, false) => (self.depth.max(other.depth), false),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        let (depth, exact) = self.combine_depth(other);
        if !exact && depth > self.depth {
            self.terms = self.terms.split_off(&depth);
        }
        for (a, c) in other.terms.range(if exact { i64::MIN } else { depth }..) {
            match self.terms.get_mut(a) {
                Some(acc) => {
                    acc.add_assign(c);
                    if acc.is_zero() {
                        self.terms.remove(a);
                    }
                }
                None => {
                    self.terms.insert(*a, c.clone());
                }
            }
        }
        self.depth = depth;
        self.exact = exact;
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(R::neg)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_coeffs(|a| a.scale(c))
    }

    /// Applies `f` to every coefficient, keeping depth and exactness.
    pub fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        let mut terms = BTreeMap::new();
        for (a, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                terms.insert(*a, v);
            }
        }
        PsiOp { terms, depth: self.depth, exact: self.exact }
    }

    /// Product with the default floor `min(depth P, depth Q)`.
    pub fn compose(&self, other: &Self) -> Self {
        self.compose_to(other, self.depth.min(other.depth))
    }

    /// Product `P o Q`, computed at orders `>= floor`.
    ///
    /// `(PQ)_alpha = sum_{k >= 0, beta + gamma - k = alpha} fall(beta, k)/k! a_beta d^k(b_gamma)`.
    /// The result depth is the larger of `floor` and the order below which
    /// unknown tails of the operands can contribute.
    pub fn compose_to(&self, other: &Self, floor: i64) -> Self {
        let mut bound: Option<i64> = None;
        let mut raise = |d: i64, n: Option<i64>| {
            if let Some(n) = n {
                bound = Some(bound.map_or(d + n, |b: i64| b.max(d + n)));
            }
        };
        if !self.exact {
            raise(self.depth, other.order_bound());
        }
        if !other.exact {
            raise(other.depth, self.order_bound());
        }
        let floor = bound.map_or(floor, |b| b.max(floor));
        let mut exact = self.exact && other.exact;

        let mut derivs: Vec<Vec<R>> = other.terms.values().map(|b| alloc::vec![b.clone()]).collect();
        let mut out: BTreeMap<i64, R> = BTreeMap::new();
        for (&beta, a) in self.terms.iter().rev() {
            for (j, &gamma) in other.terms.keys().enumerate() {
                let top = beta + gamma;
                if top < floor {
                    exact = false;
                    continue;
                }
                let span = (top - floor) as u64;
                let kmax = if beta >= 0 { span.min(beta as u64) } else { span };
                for k in 0..=kmax {
                    let db = nth_derivative(&mut derivs[j], k as usize);
                    if db.is_zero() {
                        break;
                    }
                    let c = Rational::falling_binomial(beta, k);
                    let term = a.mul(db).scale(&c);
                    match out.get_mut(&(top - k as i64)) {
                        Some(acc) => acc.add_assign(&term),
                        None => {
                            out.insert(top - k as i64, term);
                        }
                    }
                }
                if exact {
                    let k0 = span + 1;
                    if (beta < 0 || k0 <= beta as u64) && !nth_derivative(&mut derivs[j], k0 as usize).is_zero() {
                        exact = false;
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        PsiOp { terms: out, depth: floor, exact }
    }

    /// `PQ - QP`.
    pub fn bracket(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn bracket_to(&self, other: &Self, floor: i64) -> Self {
        self.compose_to(other, floor).sub(&other.compose_to(self, floor))
    }

    /// `[P+, Q+] - [P-, Q-]`.
    pub fn r_bracket(&self, other: &Self) -> Self {
        let plus = self.proj_plus().bracket(&other.proj_plus());
        let minus = self.proj_minus().bracket(&other.proj_minus());
        plus.sub(&minus)
    }

    /// Orders `>= 0`. Exact whenever all nonnegative orders are known.
    pub fn proj_plus(&self) -> Self {
        let terms = self.terms.range(0..).map(|(a, c)| (*a, c.clone()));
        if self.exact || self.depth <= 0 {
            let mut out = Self::build(terms, self.depth, true);
            out.depth = self.depth.min(0);
            out
        } else {
            Self::build(terms, self.depth, false)
        }
    }

    /// Orders `<= -1`.
    pub fn proj_minus(&self) -> Self {
        let terms = self.terms.range(..0).map(|(a, c)| (*a, c.clone()));
        Self::build(terms, self.depth.min(0), self.exact)
    }

    /// Inverse computed down to `depth`.
    ///
    /// Writes `P = a_N d^N (1 + K)` with `order K <= -1`, inverts the monomial
    /// exactly and `1 + K` by the Neumann series, which terminates at `depth`.
    pub fn inverse(&self, depth: i64) -> Result<Self, Error> {
        let n = self.order().ok_or(Error::NotAUnit)?;
        let lead_inv = self.terms[&n].inverse()?;
        let mono_inv = Self::d_pow(-n).compose_to(&Self::scalar(lead_inv), depth);
        let inner_floor = depth + n;
        let k = mono_inv.compose_to(self, inner_floor).sub(&Self::one());
        debug_assert!(k.order().is_none_or(|o| o <= -1));
        let minus_k = k.neg();
        let mut sum = Self::one().with_floor(inner_floor);
        let mut term = Self::one().with_floor(inner_floor);
        loop {
            term = term.compose_to(&minus_k, inner_floor);
            if term.is_zero() {
                if !term.exact {
                    sum.add_assign(&term);
                }
                break;
            }
            sum.add_assign(&term);
        }
        Ok(sum.compose_to(&mono_inv, depth))
    }

    /// `P^k`, with intermediate floors lowered so the result reaches the
    /// operator's own floor when `P` is exact.
    pub fn power(&self, k: u32) -> Self {
        self.power_to(k, self.depth)
    }

    pub fn power_to(&self, k: u32, floor: i64) -> Self {
        if k == 0 {
            return Self::one().with_floor(floor);
        }
        let n = self.order().unwrap_or(0).max(0);
        let mut acc = self.clone();
        for j in 2..=k {
            let f = floor - n * (k - j) as i64;
            acc = acc.compose_to(self, f);
        }
        acc
    }

    /// Coefficient at order -1.
    pub fn residue(&self) -> Result<R, Error> {
        if !self.exact && self.depth > -1 {
            return Err(Error::InsufficientDepth { needed: -1, reliable: self.depth });
        }
        Ok(self.coeff(-1))
    }

    /// `I(res P)`.
    pub fn trace(&self) -> Result<R::Scalar, Error> {
        self.residue()?.integrate()
    }

    /// `<P, Q> = Trace(PQ)`.
    pub fn pairing(&self, other: &Self) -> Result<R::Scalar, Error> {
        self.compose_to(other, self.depth.min(other.depth).min(-1)).trace()
    }

    /// Equality on the orders known for both operands.
    pub fn eq_reliable(&self, other: &Self) -> bool {
        let from = match (self.reliable_depth(), other.reliable_depth()) {
            (None, None) => i64::MIN,
            (Some(d), None) | (None, Some(d)) => d,
            (Some(d), Some(e)) => d.max(e),
        };
        self.terms.range(from..).eq(other.terms.range(from..))
    }
}

fn nth_derivative<R: DiffRing>(chain: &mut Vec<R>, k: usize) -> &R {
    while chain.len() <= k {
        let last = chain.last().unwrap();
        let next = if last.is_zero() { R::zero() } else { last.derive() };
        chain.push(next);
    }
    &chain[k]
}

impl<R: DiffRing> PartialEq for PsiOp<R> {
    fn eq(&self, other: &Self) -> bool {
        self.eq_reliable(other)
    }
}
