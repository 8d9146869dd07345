#![allow(dead_code)]

pub mod strat;

use kpflow_core::kp::lax_residual;
use kpflow_core::tseries::Series;
use kpflow_core::{DiffRing, Fourier, GaussRational, Monomial, PsiOp, Rational, TSeries};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Op = PsiOp<Fourier>;
pub type TS = TSeries<Fourier>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

pub fn gauss(rng: &mut impl Rng) -> GaussRational {
    GaussRational::new(rational(rng), rational(rng))
}

/// Up to `modes` Fourier modes with frequencies in `-2..=2`.
pub fn fourier(rng: &mut impl Rng, modes: usize) -> Fourier {
    let n = rng.gen_range(1..=modes);
    Fourier::from_modes((0..n).map(|_| (rng.gen_range(-2..=2), gauss(rng))))
}

pub fn nonzero_fourier(rng: &mut impl Rng, modes: usize) -> Fourier {
    loop {
        let f = fourier(rng, modes);
        if !f.is_zero() {
            return f;
        }
    }
}

/// Exact operator with leading order exactly `order` and a few lower terms down to `low`.
pub fn exact_op(rng: &mut impl Rng, order: i64, low: i64, terms: usize) -> Op {
    let mut out = vec![(order, nonzero_fourier(rng, 2))];
    for _ in 0..terms {
        out.push((rng.gen_range(low..=order), fourier(rng, 2)));
    }
    let op = Op::exact(out);
    if op.order() == Some(order) {
        op
    } else {
        exact_op(rng, order, low, terms)
    }
}

/// `L0 = d + u0 d^-1` with `u0 = e^{ix} + e^{-ix} + i e^{2ix}`: three modes, zero mean.
pub fn u0() -> Fourier {
    let re = |n: i64| GaussRational::real(Rational::from_int(n));
    Fourier::from_modes([(1, re(1)), (-1, re(1)), (2, GaussRational::i())])
}

pub fn lax_datum<R: DiffRing>(u: R) -> PsiOp<R> {
    PsiOp::exact([(1, R::one()), (-1, u)])
}

/// Random member of `G(Psi-bar)`: `U_0 in 1 + Psi^-1`, other slices of order `<= |t|`.
pub fn group_member(rng: &mut impl Rng, v_max: u32, floor: i64) -> TS {
    let mut slices = vec![(Monomial::one(), {
        let mut terms = vec![(0, Fourier::one())];
        for a in 1..=2 {
            terms.push((-a, fourier(rng, 2)));
        }
        Op::exact(terms)
    })];
    for t in kpflow_core::tseries::monomials_upto(3, v_max).into_iter().skip(1) {
        if rng.gen_bool(0.6) {
            let top = t.valuation() as i64;
            let order = rng.gen_range(-2..=top.min(2));
            slices.push((t, exact_op(rng, order, order - 2, 1)));
        }
    }
    TS::from_slices(v_max, floor, slices)
}

/// Random `L` with `L - d` of order `<= -1` in every slice; not a KP solution.
pub fn lax_shaped(seed: u64, v_max: u32) -> TS {
    let mut rng = rng(seed);
    let floor = -8;
    let mut slices = vec![(Monomial::one(), {
        let mut t = vec![(1, Fourier::one())];
        for a in 1..=3 {
            t.push((-a, fourier(&mut rng, 2)));
        }
        Op::exact(t)
    })];
    for t in kpflow_core::tseries::monomials_upto(3, v_max).into_iter().skip(1) {
        if rng.gen_bool(0.7) {
            let terms: Vec<(i64, Fourier)> = (1..=3).map(|a| (-a, fourier(&mut rng, 2))).collect();
            slices.push((t, Op::exact(terms)));
        }
    }
    TS::from_slices(v_max, floor, slices)
}

/// Brute-force Picard integration of `dL/dt_k = [(L^k)_+, L]`.
///
/// Slices are filled in increasing valuation; for `t` with smallest occupied
/// variable `k`, `L_t = (1/n_k) [(L^k)_+, L]_{t - e_k}`, which involves only
/// slices of lower valuation. Uses operator composition only.
pub fn picard<R: DiffRing>(l0: &PsiOp<R>, k_max: u32, v_max: u32, floor: i64) -> TSeries<R> {
    let mut l = TSeries::from_slices(v_max, floor, [(Monomial::one(), l0.clone().with_floor(floor))]);
    for t in kpflow_core::tseries::monomials_upto(k_max, v_max).into_iter().skip(1) {
        let (k, n_k) = t.exponents().next().unwrap();
        let rest = t.div(&Monomial::var(k)).unwrap();
        let known = l.truncate_valuation(rest.valuation());
        let rhs = power_plus_at(&known, k, floor);
        let mut slot = PsiOp::zero().with_floor(floor);
        for (a, la) in known.slices() {
            for (b, lb) in rhs.iter() {
                if a.mul(b) == rest {
                    slot.add_assign(&lb.compose_to(la, floor));
                    slot = slot.sub(&la.compose_to(lb, floor));
                }
            }
        }
        l.add_slice(t, &slot.scale(&Rational::new(1, n_k as i64)));
    }
    l
}

/// Slices of `(L^k)_+` computed by direct expansion of the product of slices.
fn power_plus_at<R: DiffRing>(l: &TSeries<R>, k: u32, floor: i64) -> Vec<(Monomial, PsiOp<R>)> {
    let v = l.v_max();
    let mut acc: Vec<(Monomial, PsiOp<R>)> = vec![(Monomial::one(), PsiOp::one().with_floor(floor))];
    for _ in 0..k {
        let mut next: Vec<(Monomial, PsiOp<R>)> = Vec::new();
        for (a, pa) in &acc {
            for (b, lb) in l.slices() {
                let m = a.mul(b);
                if m.valuation() > v {
                    continue;
                }
                let prod = pa.compose_to(lb, floor);
                match next.iter_mut().find(|(t, _)| *t == m) {
                    Some((_, op)) => op.add_assign(&prod),
                    None => next.push((m, prod)),
                }
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(t, op)| (t, op.proj_plus())).collect()
}

/// Slicewise equality of every coefficient of order `>= depth`.
pub fn agree_to<R: DiffRing>(a: &TSeries<R>, b: &TSeries<R>, depth: i64) -> bool {
    let v = a.v_max().min(b.v_max());
    kpflow_core::tseries::monomials_upto(8, v).iter().all(|t| {
        let (x, y) = (a.slice(t), b.slice(t));
        let reliable = |op: &PsiOp<R>| op.reliable_depth().is_none_or(|d| d <= depth);
        reliable(&x) && reliable(&y) && x.terms().filter(|(o, _)| *o >= depth).eq(y.terms().filter(|(o, _)| *o >= depth))
    })
}

/// The KP-I residual rebuilt from the zero-curvature identity `Z = zs(L, 2, 3)`:
/// with `E1`, `E0` the order 1 and 0 coefficients of `Z`,
/// `KP = -1/2 (d E0 - 1/2 (d^2 E1 - d_{t2} E1))`.
///
/// `Z` is known through valuation `v_max - 3` and `d_{t2} E1` through `v_max - 5`.
pub fn kp1_from_zero_curvature<R: DiffRing>(l: &TSeries<R>) -> Series<R> {
    let z = kpflow_core::kp::zs_residual(l, 2, 3);
    let mut e1 = Series::new(z.v_max());
    let mut e0 = Series::new(z.v_max());
    for (t, op) in z.slices() {
        e1.insert_add(t.clone(), &op.coeff(1));
        e0.insert_add(t.clone(), &op.coeff(0));
    }
    let half = Rational::new(1, 2);
    let inner = e1.derive().derive().sub(&e1.dt(2)).scale(&half);
    e0.derive().sub(&inner).scale(&-&half)
}

/// Every Lax residual of `l` vanishes for `k <= k_max`.
pub fn lax_holds<R: DiffRing>(l: &TSeries<R>, k_max: u32) -> bool {
    (1..=k_max).all(|k| lax_residual(l, k).is_zero())
}
