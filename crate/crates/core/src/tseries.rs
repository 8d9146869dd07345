//! Multi-time graded series `sum_t U_t t^t` with operator coefficients.
//!
//! Time monomials `t = t_1^{n_1} t_2^{n_2} ...` carry the valuation
//! `|t| = sum i n_i`; a [`TSeries`] keeps all monomials with `|t| <= v_max`.
//! Each slice is a [`PsiOp`] with its own reliable depth; a missing slice is
//! exactly zero.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::Error;
use crate::psido::PsiOp;
use crate::rational::Rational;
use crate::ring::DiffRing;

/// Element of the free commutative monoid on `t_1, t_2, ...`.
///
/// Ordered canonically: by valuation, then lexicographically on exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    /// `exps[i - 1] = n_i`, without trailing zeros
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// The variable `t_i`, `i >= 1`.
    pub fn var(i: u32) -> Self {
        Self::from_exponents([(i, 1)])
    }

    /// From `(index, exponent)` pairs; repeated indices add up.
    pub fn from_exponents<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut exps: Vec<u32> = Vec::new();
        for (i, n) in pairs {
            assert!(i >= 1, "time indices start at 1");
            let idx = (i - 1) as usize;
            if exps.len() <= idx {
                exps.resize(idx + 1, 0);
            }
            exps[idx] += n;
        }
        let mut m = Monomial { exps };
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.exps.last() == Some(&0) {
            self.exps.pop();
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, i: u32) -> u32 {
        self.exps.get((i as usize).wrapping_sub(1)).copied().unwrap_or(0)
    }

    /// Nonzero `(index, exponent)` pairs in increasing index.
    pub fn exponents(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.exps.iter().enumerate().filter(|(_, n)| **n > 0).map(|(i, n)| (i as u32 + 1, *n))
    }

    pub fn valuation(&self) -> u32 {
        self.exps.iter().enumerate().map(|(i, n)| (i as u32 + 1) * n).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let len = self.exps.len().max(other.exps.len());
        let exps = (0..len)
            .map(|i| self.exps.get(i).unwrap_or(&0) + other.exps.get(i).unwrap_or(&0))
            .collect();
        Monomial { exps }
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.exps.len() > self.exps.len() {
            return None;
        }
        let mut exps = self.exps.clone();
        for (i, n) in other.exps.iter().enumerate() {
            exps[i] = exps[i].checked_sub(*n)?;
        }
        let mut m = Monomial { exps };
        m.trim();
        Some(m)
    }

    /// `(n_i, t / t_i)` when `n_i > 0`.
    pub fn lower(&self, i: u32) -> Option<(u32, Self)> {
        let n = self.exponent(i);
        (n > 0).then(|| (n, self.div(&Self::var(i)).unwrap()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.valuation().cmp(&other.valuation()).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, (i, n)) in self.exponents().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if n == 1 {
                write!(f, "t{i}")?;
            } else {
                write!(f, "t{i}^{n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// All monomials of valuation at most `v_max` in the variables `t_1..t_k_max`.
pub fn monomials_upto(k_max: u32, v_max: u32) -> Vec<Monomial> {
    let mut out = alloc::vec![Monomial::one()];
    for i in 1..=k_max.min(v_max) {
        let mut next = Vec::new();
        for m in &out {
            let mut e = 0;
            while m.valuation() + e * i <= v_max {
                next.push(m.mul(&Monomial::from_exponents([(i, e)])));
                e += 1;
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// `1 + Psi^{-1}` membership for a single operator.
pub fn is_unipotent<R: DiffRing>(op: &PsiOp<R>) -> bool {
    (op.is_exact() || op.depth() <= 0) && op.terms().rev().take_while(|(a, _)| *a >= 0).map(|(a, c)| (a, c.is_one())).eq([(0, true)])
}

/// Series `sum_{|t| <= v_max} U_t t^t` with operator coefficients.
#[derive(Clone, Debug)]
pub struct TSeries<R> {
    v_max: u32,
    floor: i64,
    barred: bool,
    slices: BTreeMap<Monomial, PsiOp<R>>,
}

impl<R: DiffRing> TSeries<R> {
    pub fn zero(v_max: u32, floor: i64) -> Self {
        TSeries { v_max, floor, barred: true, slices: BTreeMap::new() }
    }

    pub fn one(v_max: u32, floor: i64) -> Self {
        Self::constant(PsiOp::one().with_floor(floor), v_max)
    }

    /// The `t`-independent series with slice `op` at `t = 1`.
    pub fn constant(op: PsiOp<R>, v_max: u32) -> Self {
        let floor = op.depth();
        Self::from_slices(v_max, floor, [(Monomial::one(), op)])
    }

    /// Builds a series, dropping monomials above `v_max` and exact zero slices.
    /// The barred flag is set iff the predicate holds.
    pub fn from_slices<I: IntoIterator<Item = (Monomial, PsiOp<R>)>>(v_max: u32, floor: i64, slices: I) -> Self {
        let mut s = Self::zero(v_max, floor);
        for (t, op) in slices {
            s.add_slice(t, &op);
        }
        s.barred = s.is_barred();
        s
    }

    /// Adds `op t^t`; ignored when `|t| > v_max`.
    pub fn add_slice(&mut self, t: Monomial, op: &PsiOp<R>) {
        if t.valuation() > self.v_max {
            return;
        }
        match self.slices.get_mut(&t) {
            Some(acc) => {
                acc.add_assign(op);
                if acc.is_zero() && acc.is_exact() {
                    self.slices.remove(&t);
                }
            }
            None => {
                if !(op.is_zero() && op.is_exact()) {
                    self.slices.insert(t, op.clone());
                }
            }
        }
    }

    pub fn v_max(&self) -> u32 {
        self.v_max
    }

    /// Working floor used for products.
    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn with_floor(mut self, floor: i64) -> Self {
        self.floor = floor;
        for op in self.slices.values_mut() {
            if op.is_exact() {
                *op = op.clone().with_floor(floor);
            }
        }
        self
    }

    /// Whether the barred predicate was asserted for this series.
    pub fn barred_flag(&self) -> bool {
        self.barred
    }

    /// Asserts the barred predicate, failing if it does not hold.
    pub fn assert_barred(mut self) -> Result<Self, Error> {
        if let Some((t, op)) = self.barred_violation() {
            return Err(Error::PredicateViolation(format!(
                "slice {t} has order {} > valuation {}",
                op.order().unwrap_or_default(),
                t.valuation()
            )));
        }
        self.barred = true;
        Ok(self)
    }

    pub fn clear_barred(mut self) -> Self {
        self.barred = false;
        self
    }

    fn barred_violation(&self) -> Option<(&Monomial, &PsiOp<R>)> {
        self.slices.iter().find(|(t, op)| op.order().is_some_and(|o| o > t.valuation() as i64))
    }

    /// Every slice at `t` has order `<= |t|`.
    pub fn is_barred(&self) -> bool {
        self.barred_violation().is_none()
    }

    pub fn slice(&self, t: &Monomial) -> PsiOp<R> {
        self.slices.get(t).cloned().unwrap_or_else(|| PsiOp::zero().with_floor(self.floor))
    }

    pub fn get(&self, t: &Monomial) -> Option<&PsiOp<R>> {
        self.slices.get(t)
    }

    /// The `t = 0` slice.
    pub fn at_zero(&self) -> PsiOp<R> {
        self.slice(&Monomial::one())
    }

    pub fn slices(&self) -> impl Iterator<Item = (&Monomial, &PsiOp<R>)> {
        self.slices.iter()
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// No nonzero coefficient in any known slot.
    pub fn is_zero(&self) -> bool {
        self.slices.values().all(PsiOp::is_zero)
    }

    /// Number of nonzero `(monomial, order)` slots.
    pub fn nonzero_slots(&self) -> usize {
        self.slices.values().map(PsiOp::len).sum()
    }

    /// Largest reliable depth among truncated slices, `None` if all are exact.
    pub fn reliable_depth(&self) -> Option<i64> {
        self.slices.values().filter_map(PsiOp::reliable_depth).max()
    }

    /// Keeps only monomials with `|t| <= v`.
    pub fn truncate_valuation(&self, v: u32) -> Self {
        let v = v.min(self.v_max);
        TSeries {
            v_max: v,
            floor: self.floor,
            barred: self.barred,
            slices: self.slices.iter().filter(|(t, _)| t.valuation() <= v).map(|(t, o)| (t.clone(), o.clone())).collect(),
        }
    }

    /// Applies `f` slicewise, dropping exact zero results.
    pub fn map_slices(&self, f: impl Fn(&PsiOp<R>) -> PsiOp<R>) -> Self {
        let mut out = Self::zero(self.v_max, self.floor);
        out.barred = false;
        for (t, op) in &self.slices {
            out.add_slice(t.clone(), &f(op));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate_valuation(self.v_max.min(other.v_max));
        out.floor = self.floor.min(other.floor);
        for (t, op) in &other.slices {
            out.add_slice(t.clone(), op);
        }
        out.barred = self.barred && other.barred;
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.map_slices(PsiOp::neg);
        out.barred = self.barred;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.map_slices(|op| op.scale(c));
        out.barred = self.barred;
        out
    }

    /// Convolution product `[UW]_t = sum_{t't'' = t} U_{t'} o W_{t''}`.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_to(other, self.floor.min(other.floor))
    }

    pub fn mul_to(&self, other: &Self, floor: i64) -> Self {
        let v_max = self.v_max.min(other.v_max);
        let mut out = Self::zero(v_max, floor);
        for (t1, a) in &self.slices {
            let v1 = t1.valuation();
            if v1 > v_max {
                break;
            }
            for (t2, b) in &other.slices {
                if v1 + t2.valuation() > v_max {
                    break;
                }
                out.add_slice(t1.mul(t2), &a.compose_to(b, floor));
            }
        }
        out.barred = self.barred && other.barred;
        out
    }

    /// `UW - WU`.
    pub fn bracket(&self, other: &Self) -> Self {
        let floor = self.floor.min(other.floor);
        let mut out = self.mul_to(other, floor).sub(&other.mul_to(self, floor));
        out.barred = self.barred && other.barred;
        out
    }

    pub fn power(&self, k: u32) -> Self {
        let mut acc = Self::one(self.v_max, self.floor);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn proj_plus(&self) -> Self {
        let mut out = self.map_slices(PsiOp::proj_plus);
        out.barred = self.barred;
        out
    }

    pub fn proj_minus(&self) -> Self {
        let mut out = self.map_slices(PsiOp::proj_minus);
        out.barred = self.barred;
        out
    }

    /// Inverse for the convolution product.
    ///
    /// `[U^-1]_0 = (U_0)^-1` and `[U^-1]_t = -U_0^-1 sum_{t't'' = t, t' != 1} U_{t'} [U^-1]_{t''}`.
    pub fn inverse(&self) -> Result<Self, Error> {
        let floor = self.floor;
        let head = self.slices.get(&Monomial::one()).ok_or(Error::NotInvertibleAtZero)?;
        let head_inv = head.inverse(floor).map_err(|_| Error::NotInvertibleAtZero)?;
        let gens: Vec<(&Monomial, &PsiOp<R>)> = self.slices.iter().filter(|(t, _)| !t.is_one()).collect();

        let mut support: BTreeSet<Monomial> = BTreeSet::new();
        support.insert(Monomial::one());
        let mut frontier = alloc::vec![Monomial::one()];
        while let Some(m) = frontier.pop() {
            for (g, _) in &gens {
                let p = m.mul(g);
                if p.valuation() <= self.v_max && support.insert(p.clone()) {
                    frontier.push(p);
                }
            }
        }

        let mut out = Self::zero(self.v_max, floor);
        out.add_slice(Monomial::one(), &head_inv);
        for t in support.iter().skip(1) {
            let mut acc = PsiOp::zero().with_floor(floor);
            for (g, u) in &gens {
                if let Some(rest) = t.div(g) {
                    if let Some(r) = out.slices.get(&rest) {
                        acc.add_assign(&u.compose_to(r, floor));
                    }
                }
            }
            let slice = head_inv.compose_to(&acc, floor).neg();
            out.add_slice(t.clone(), &slice);
        }
        out.barred = self.barred;
        Ok(out)
    }

    /// Formal derivative in `t_k`; the valuation window shrinks by `k`.
    ///
    /// Panics if `k > v_max` (the window would be empty).
    pub fn dt(&self, k: u32) -> Self {
        assert!(k >= 1, "time indices start at 1");
        assert!(k <= self.v_max, "d/dt_{k} of a series known only to valuation {}", self.v_max);
        let mut out = Self::zero(self.v_max - k, self.floor);
        out.barred = false;
        for (t, op) in &self.slices {
            if let Some((n, rest)) = t.lower(k) {
                out.add_slice(rest, &op.scale(&Rational::from_int(n as i64)));
            }
        }
        out
    }

    /// `exp(sum_i t_i P_i)` truncated at valuation `v_max`; `gens[i - 1] = P_i`.
    ///
    /// Requires `order(P_i) <= i`, which makes the result barred.
    pub fn exp_t(gens: &[PsiOp<R>], v_max: u32) -> Result<Self, Error> {
        for (i, p) in gens.iter().enumerate() {
            let index = i as u32 + 1;
            if let Some(o) = p.order() {
                if o > index as i64 {
                    return Err(Error::OrderViolation { index, order: o });
                }
            }
        }
        let floor = gens.iter().map(PsiOp::depth).min().unwrap_or(crate::psido::DEFAULT_DEPTH);
        let x = Self::from_slices(v_max, floor, gens.iter().enumerate().map(|(i, p)| (Monomial::var(i as u32 + 1), p.clone())));
        let mut sum = Self::one(v_max, floor);
        let mut term = sum.clone();
        for n in 1..=v_max {
            term = term.mul(&x).scale(&Rational::new(1, n as i64));
            if term.is_empty() {
                break;
            }
            sum = sum.add(&term);
        }
        sum.barred = true;
        Ok(sum)
    }

    /// Scales `t_n -> q^n t_n`, then sets every `t_n = 1`.
    pub fn q_scale(&self, q_max: u32) -> QSeries<R> {
        let q_max = q_max.min(self.v_max);
        let mut out = QSeries::zero(q_max, self.floor);
        for (t, op) in &self.slices {
            out.add_term(t.valuation(), op);
        }
        out
    }

    /// `U_0` in `1 + Psi^{-1}` (and barred).
    pub fn in_group_psi_bar(&self) -> bool {
        self.is_barred() && is_unipotent(&self.at_zero())
    }

    /// Barred, purely differential, `U_0 = 1`.
    pub fn in_differential_units(&self) -> bool {
        self.is_barred()
            && self.at_zero().is_one()
            && self.slices.values().all(|op| op.is_exact() && op.low_order().is_none_or(|lo| lo >= 0))
    }

    /// `U_0` in `1 + Psi^{-1}`, other slices of order `<= -1`.
    pub fn in_g_at(&self) -> bool {
        is_unipotent(&self.at_zero())
            && self.slices.iter().filter(|(t, _)| !t.is_one()).all(|(_, op)| {
                (op.is_exact() || op.depth() <= 0) && op.order().is_none_or(|o| o <= -1)
            })
    }
}

impl<R: DiffRing> PartialEq for TSeries<R> {
    /// Slotwise on the common valuation window and the common reliable orders.
    fn eq(&self, other: &Self) -> bool {
        let v = self.v_max.min(other.v_max);
        let keys: BTreeSet<&Monomial> = self.slices.keys().chain(other.slices.keys()).filter(|t| t.valuation() <= v).collect();
        keys.into_iter().all(|t| match (self.slices.get(t), other.slices.get(t)) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
            (None, None) => true,
        })
    }
}

/// Series `sum_{m <= q_max} q^m A_m` in one scaling variable.
#[derive(Clone, Debug)]
pub struct QSeries<R> {
    q_max: u32,
    floor: i64,
    terms: BTreeMap<u32, PsiOp<R>>,
}

impl<R: DiffRing> QSeries<R> {
    pub fn zero(q_max: u32, floor: i64) -> Self {
        QSeries { q_max, floor, terms: BTreeMap::new() }
    }

    pub fn monomial(m: u32, op: PsiOp<R>, q_max: u32) -> Self {
        let mut s = Self::zero(q_max, op.depth());
        s.add_term(m, &op);
        s
    }

    pub fn add_term(&mut self, m: u32, op: &PsiOp<R>) {
        if m > self.q_max {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(acc) => {
                acc.add_assign(op);
                if acc.is_zero() && acc.is_exact() {
                    self.terms.remove(&m);
                }
            }
            None => {
                if !(op.is_zero() && op.is_exact()) {
                    self.terms.insert(m, op.clone());
                }
            }
        }
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    pub fn coeff(&self, m: u32) -> PsiOp<R> {
        self.terms.get(&m).cloned().unwrap_or_else(PsiOp::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &PsiOp<R>)> {
        self.terms.iter().map(|(m, o)| (*m, o))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(PsiOp::is_zero)
    }

    fn map(&self, f: impl Fn(&PsiOp<R>) -> PsiOp<R>) -> Self {
        let mut out = Self::zero(self.q_max, self.floor);
        for (m, op) in &self.terms {
            out.add_term(*m, &f(op));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.q_max.min(other.q_max), self.floor.min(other.floor));
        for (m, op) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*m, op);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.map(PsiOp::neg))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|op| op.scale(c))
    }

    /// Multiplication by `q^j`; the known window grows by `j`.
    pub fn shift(&self, j: u32) -> Self {
        let mut out = Self::zero(self.q_max + j, self.floor);
        for (m, op) in &self.terms {
            out.add_term(m + j, op);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let floor = self.floor.min(other.floor);
        let mut out = Self::zero(self.q_max.min(other.q_max), floor);
        for (m, a) in &self.terms {
            for (p, b) in &other.terms {
                if m + p <= out.q_max {
                    out.add_term(m + p, &a.compose_to(b, floor));
                }
            }
        }
        out
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn power(&self, k: u32) -> Self {
        let mut acc = Self::monomial(0, PsiOp::one().with_floor(self.floor), self.q_max);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn proj_plus(&self) -> Self {
        self.map(PsiOp::proj_plus)
    }

    /// `val_q(a_alpha) >= alpha` for every coefficient.
    pub fn satisfies_valuation_bound(&self) -> bool {
        self.terms.iter().all(|(m, op)| op.order().is_none_or(|o| o <= *m as i64))
    }
}

impl<R: DiffRing> PartialEq for QSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        let q = self.q_max.min(other.q_max);
        (0..=q).all(|m| match (self.terms.get(&m), other.terms.get(&m)) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
            (None, None) => true,
        })
    }
}

/// Series `sum_t v_t t^t` with values in a ring or scalar type.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<V> {
    pub v_max: u32,
    pub terms: BTreeMap<Monomial, V>,
}

impl<V> Series<V> {
    pub fn new(v_max: u32) -> Self {
        Series { v_max, terms: BTreeMap::new() }
    }
}

impl<R: DiffRing> Series<R> {
    pub fn insert_add(&mut self, t: Monomial, v: &R) {
        if t.valuation() > self.v_max || v.is_zero() {
            return;
        }
        match self.terms.get_mut(&t) {
            Some(acc) => {
                acc.add_assign(v);
                if acc.is_zero() {
                    self.terms.remove(&t);
                }
            }
            None => {
                self.terms.insert(t, v.clone());
            }
        }
    }

    pub fn coeff(&self, t: &Monomial) -> R {
        self.terms.get(t).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Series::new(self.v_max.min(other.v_max));
        for (t, v) in self.terms.iter().chain(other.terms.iter()) {
            out.insert_add(t.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.map(R::neg))
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        let mut out = Series::new(self.v_max);
        for (t, v) in &self.terms {
            out.insert_add(t.clone(), &f(v));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|v| v.scale(c))
    }

    /// `x`-derivative of every coefficient.
    pub fn derive(&self) -> Self {
        self.map(R::derive)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Series::new(self.v_max.min(other.v_max));
        for (t1, a) in &self.terms {
            for (t2, b) in &other.terms {
                out.insert_add(t1.mul(t2), &a.mul(b));
            }
        }
        out
    }

    /// Panics if `k > v_max`.
    pub fn dt(&self, k: u32) -> Self {
        assert!(k <= self.v_max, "d/dt_{k} of a series known only to valuation {}", self.v_max);
        let mut out = Series::new(self.v_max - k);
        for (t, v) in &self.terms {
            if let Some((n, rest)) = t.lower(k) {
                out.insert_add(rest, &v.scale(&Rational::from_int(n as i64)));
            }
        }
        out
    }

    pub fn truncate_valuation(&self, v: u32) -> Self {
        let mut out = Series::new(v.min(self.v_max));
        for (t, c) in &self.terms {
            out.insert_add(t.clone(), c);
        }
        out
    }
}
