//! KP hierarchy at finite truncation.
//!
//! [`kp_solve`] builds `U = exp(sum_k t_k L0^k)`, factorizes `U = S^-1 Y` and
//! returns `L = Y L0 Y^-1`. The remaining functions are residuals that vanish
//! identically on a solution: Lax flows, zero curvature, log-derivatives of
//! the factors, conserved Hamiltonians and the KP-I scalar equation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::mulase::{factorize, FactorPair};
use crate::psido::PsiOp;
use crate::rational::Rational;
use crate::ring::{DiffRing, Scalar};
use crate::tseries::{Monomial, QSeries, Series, TSeries};

/// Checks `L0 = d + sum_{alpha <= -1} u_alpha d^alpha`.
pub fn check_lax_shape<R: DiffRing>(l0: &PsiOp<R>) -> Result<(), Error> {
    let lead_ok = l0.order() == Some(1) && l0.coeff(1).is_one();
    let no_zero = l0.get(0).is_none() && (l0.is_exact() || l0.depth() <= 0);
    if lead_ok && no_zero {
        Ok(())
    } else {
        Err(Error::PredicateViolation("initial datum is not of the form d + Psi^-1".into()))
    }
}

#[derive(Clone, Debug)]
pub struct KpSolution<R> {
    pub l0: PsiOp<R>,
    pub k_max: u32,
    pub v_max: u32,
    /// Requested depth; every check is reliable down to it.
    pub depth: i64,
    /// `exp(sum_k t_k L0^k)`.
    pub u: TSeries<R>,
    pub factors: FactorPair<R>,
    /// `Y L0 Y^-1`, reliable to `depth - k_max`.
    pub l: TSeries<R>,
}

/// Solves the Cauchy problem for the first `k_max` flows with initial datum `l0`.
///
/// Also asserts `S L0 S^-1 = Y L0 Y^-1` and `L - d` of order `<= -1`.
pub fn kp_solve<R: DiffRing>(l0: &PsiOp<R>, k_max: u32, v_max: u32, depth: i64) -> Result<KpSolution<R>, Error> {
    check_lax_shape(l0)?;
    let l_floor = depth - k_max as i64;
    let working = l_floor - v_max as i64;
    let gens: Vec<PsiOp<R>> = (1..=k_max).map(|k| l0.power_to(k, working)).collect();
    let u = TSeries::exp_t(&gens, v_max)?.with_floor(working);
    let factors = factorize(&u, l_floor)?;

    let l0_series = TSeries::constant(l0.clone().with_floor(l_floor), v_max);
    let y = factors.y.clone().with_floor(l_floor);
    let l = y.mul(&l0_series).mul(&y.inverse()?);

    let s = &factors.s;
    let l_via_s = s.mul_to(&l0_series, working).mul_to(&s.inverse()?, working);
    if l_via_s != l {
        return Err(Error::PredicateViolation("S L0 S^-1 differs from Y L0 Y^-1".into()));
    }
    let sol = KpSolution { l0: l0.clone(), k_max, v_max, depth, u, factors, l };
    if !shape_holds(&sol.l) {
        return Err(Error::PredicateViolation("L - d has nonnegative orders".into()));
    }
    Ok(sol)
}

impl<R: DiffRing> KpSolution<R> {
    /// `S L0 S^-1`, computed from the `S` factor alone.
    pub fn l_via_s(&self) -> Result<TSeries<R>, Error> {
        let s = &self.factors.s;
        let floor = s.floor();
        let l0 = TSeries::constant(self.l0.clone().with_floor(floor), self.v_max);
        Ok(s.mul_to(&l0, floor).mul_to(&s.inverse()?, floor))
    }
}

/// `L - d` has all known orders `<= -1` in every slice.
pub fn shape_holds<R: DiffRing>(l: &TSeries<R>) -> bool {
    let minus_d = TSeries::constant(PsiOp::d_pow(1), l.v_max());
    l.sub(&minus_d).slices().all(|(_, op)| op.order().is_none_or(|o| o <= -1))
}

/// `dL/dt_k - [(L^k)_+, L]`, on valuations `<= v_max - k`.
///
/// Panics if `k > v_max`; see [`check_window`].
pub fn lax_residual<R: DiffRing>(l: &TSeries<R>, k: u32) -> TSeries<R> {
    let b = l.power(k).proj_plus();
    l.dt(k).sub(&b.bracket(l)).truncate_valuation(l.v_max() - k)
}

/// `d(L^i)_+/dt_j - d(L^j)_+/dt_i + [(L^i)_+, (L^j)_+]`, on valuations
/// `<= v_max - max(i, j)`.
pub fn zs_residual<R: DiffRing>(l: &TSeries<R>, i: u32, j: u32) -> TSeries<R> {
    let bi = l.power(i).proj_plus();
    let bj = l.power(j).proj_plus();
    bi.dt(j).sub(&bj.dt(i)).add(&bi.bracket(&bj))
}

/// `(dY/dt_k Y^-1 - (L^k)_+,  dS/dt_k S^-1 + (L^k)_-)`.
pub fn log_deriv_residual<R: DiffRing>(f: &FactorPair<R>, l: &TSeries<R>, k: u32) -> Result<(TSeries<R>, TSeries<R>), Error> {
    let lk = l.power(k);
    let plus = f.y.dt(k).mul(&f.y.inverse()?).sub(&lk.proj_plus());
    let minus = f.s.dt(k).mul(&f.s.inverse()?).add(&lk.proj_minus());
    Ok((plus, minus))
}

/// `H_k(L) = Trace(L^{k+1}) / k`.
pub fn hamiltonian<R: DiffRing>(l: &PsiOp<R>, k: u32) -> Result<R::Scalar, Error> {
    Ok(l.power_to(k + 1, l.depth()).trace()?.scale(&Rational::new(1, k as i64)))
}

/// `H_k` applied slicewise to a series.
pub fn hamiltonian_series<R: DiffRing>(l: &TSeries<R>, k: u32) -> Result<Series<R::Scalar>, Error> {
    let p = l.power(k + 1);
    let c = Rational::new(1, k as i64);
    let mut out = Series::new(l.v_max());
    for (t, op) in p.slices() {
        let v = op.trace()?.scale(&c);
        if !v.is_zero() {
            out.terms.insert(t.clone(), v);
        }
    }
    Ok(out)
}

/// `f(P) = sum_k a_k Trace(P^k)` with `coeffs[k] = a_k`.
pub fn trace_polynomial<R: DiffRing>(coeffs: &[Rational], p: &PsiOp<R>) -> Result<R::Scalar, Error> {
    let mut acc = R::Scalar::zero();
    for (k, a) in coeffs.iter().enumerate() {
        if !a.is_zero() {
            acc = acc.add(&p.power(k as u32).trace()?.scale(a));
        }
    }
    Ok(acc)
}

/// Gradient of [`trace_polynomial`]: `sum_k a_k k P^{k-1}`.
pub fn functional_derivative<R: DiffRing>(coeffs: &[Rational], p: &PsiOp<R>) -> PsiOp<R> {
    let mut acc = PsiOp::zero().with_floor(p.depth());
    for (k, a) in coeffs.iter().enumerate().skip(1) {
        if !a.is_zero() {
            acc.add_assign(&p.power((k - 1) as u32).scale(&(a * &Rational::from_int(k as i64))));
        }
    }
    acc
}

/// Dressing operator `S0 = 1 + sum_n s_{-n} d^{-n}` with `L0 = S0 d S0^-1`,
/// down to `depth`.
///
/// Order `-n` of `L0 S0 = S0 d` gives `d(s_{-n}) = -[(L0 - d) S0]_{-n}`, whose
/// right-hand side involves only `s_{-1}, ..., s_{-n+1}`.
pub fn dressing<R: DiffRing>(l0: &PsiOp<R>, depth: i64) -> Result<PsiOp<R>, Error> {
    check_lax_shape(l0)?;
    if !l0.is_exact() && l0.depth() > depth + 1 {
        return Err(Error::InsufficientDepth { needed: depth + 1, reliable: l0.depth() });
    }
    let tail = l0.sub(&PsiOp::d_pow(1));
    let mut coeffs: Vec<(i64, R)> = alloc::vec![(0, R::one())];
    for n in 1..=(-depth) {
        let s0 = PsiOp::exact(coeffs.iter().cloned());
        let rhs = tail.compose_to(&s0, -n).coeff(-n).neg();
        let s = rhs.antiderive().map_err(|e| match e {
            Error::NonZeroMean { mean } => Error::DressingObstruction { step: n as usize, mean },
            other => other,
        })?;
        coeffs.push((-n, s));
    }
    Ok(PsiOp::truncated(coeffs, depth))
}

/// The order `-1` coefficient of every slice.
pub fn kp_field<R: DiffRing>(l: &TSeries<R>) -> Result<Series<R>, Error> {
    let mut u = Series::new(l.v_max());
    for (t, op) in l.slices() {
        u.insert_add(t.clone(), &op.residue()?);
    }
    Ok(u)
}

/// `(3/4) u_{t2 t2} - d(u_{t3} - (1/4) u_xxx - 3 u_x u)` for `u = res L`.
///
/// Two `t_2` derivatives leave valuations `<= v_max - 4`.
pub fn kp1_residual<R: DiffRing>(l: &TSeries<R>, k_max: u32) -> Result<Series<R>, Error> {
    if k_max < 3 {
        return Err(Error::InsufficientKMax { needed: 3, got: k_max });
    }
    let u = kp_field(l)?;
    kp1_residual_of(&u)
}

/// The KP-I expression for a given field series.
pub fn kp1_residual_of<R: DiffRing>(u: &Series<R>) -> Result<Series<R>, Error> {
    check_window(u.v_max, 4)?;
    let ux = u.derive();
    let uxxx = ux.derive().derive();
    let inner = u.dt(3).sub(&uxxx.scale(&Rational::new(1, 4))).sub(&ux.mul(u).scale(&Rational::from_int(3)));
    let out = u.dt(2).dt(2).scale(&Rational::new(3, 4)).sub(&inner.derive());
    Ok(out.truncate_valuation(u.v_max - 4))
}

/// `q^{n+1} qScale(dL/dt_n) - [(L~^n)_+, L~]` with `L~ = q qScale(L)`.
///
/// The rescaled Lax equation, slotwise in `q` through `q^{v_max + 1}`.
pub fn q_lax_residual<R: DiffRing>(l: &TSeries<R>, n: u32) -> QSeries<R> {
    let v = l.v_max();
    let lt = l.q_scale(v).shift(1);
    let lhs = l.dt(n).q_scale(v).shift(n + 1);
    let rhs = lt.power(n).proj_plus().bracket(&lt);
    lhs.sub(&rhs)
}

/// Every residual check available for a solution.
pub fn all_residuals<R: DiffRing>(sol: &KpSolution<R>) -> Result<BTreeMap<alloc::string::String, TSeries<R>>, Error> {
    check_window(sol.v_max, sol.k_max)?;
    let mut out = BTreeMap::new();
    for k in 1..=sol.k_max {
        out.insert(format!("lax_{k}"), lax_residual(&sol.l, k));
        let (p, m) = log_deriv_residual(&sol.factors, &sol.l, k)?;
        out.insert(format!("logderiv_plus_{k}"), p);
        out.insert(format!("logderiv_minus_{k}"), m);
    }
    for i in 1..=sol.k_max {
        for j in (i + 1)..=sol.k_max {
            out.insert(format!("zs_{i}_{j}"), zs_residual(&sol.l, i, j));
        }
    }
    Ok(out)
}

/// A check that differentiates `loss` times in valuation needs `v_max >= loss`.
pub fn check_window(v_max: u32, loss: u32) -> Result<(), Error> {
    if v_max >= loss {
        Ok(())
    } else {
        Err(Error::ValuationWindow { needed: loss, v_max })
    }
}

/// Monomials of positive valuation where `H_k` is nonzero.
pub fn conservation_violations<S: Scalar>(h: &Series<S>) -> Vec<Monomial> {
    h.terms.keys().filter(|t| !t.is_one()).cloned().collect()
}
