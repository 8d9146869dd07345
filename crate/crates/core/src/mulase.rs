//! Factorization `U = S^-1 Y` of barred group elements.
//!
//! `S` has `S_0 in 1 + Psi^{-1}` and all other slices of order `<= -1`; `Y` is
//! purely differential with `Y_0 = 1`. The solver works slice by slice in the
//! canonical monomial order: `S_0 = U_0^-1`, and for `t != 1`
//!
//! ```text
//! S_t = -(R_t)_- o S_0,   R_t = sum_{t't'' = t, t'' != 1} S_{t'} o U_{t''},
//! ```
//!
//! which is `(SU)_t- = 0` solved for the one unknown slice. The residual is
//! then recomputed with the plain series product.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::psido::PsiOp;
use crate::ring::DiffRing;
use crate::tseries::{Monomial, TSeries};

#[derive(Clone, Debug)]
pub struct FactorPair<R> {
    pub s: TSeries<R>,
    pub y: TSeries<R>,
}

impl<R: DiffRing> PartialEq for FactorPair<R> {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.y == other.y
    }
}

impl<R: DiffRing> FactorPair<R> {
    pub fn identity(v_max: u32, floor: i64) -> Self {
        FactorPair { s: TSeries::one(v_max, floor), y: TSeries::one(v_max, floor) }
    }

    /// `S` in `G_{A_t}` and `Y` in the barred differential units.
    pub fn is_valid(&self) -> bool {
        self.s.in_g_at() && self.y.in_differential_units()
    }
}

/// Solves `(SU)_- = 0` with `S` reliable down to `depth`.
///
/// Internally works at floor `depth - v_max`; fails with
/// [`Error::InsufficientDepth`] if `U` is not known deeply enough for that.
pub fn factorize<R: DiffRing>(u: &TSeries<R>, depth: i64) -> Result<FactorPair<R>, Error> {
    if !u.in_group_psi_bar() {
        return Err(Error::PredicateViolation(format!(
            "input is not in G(Psi-bar): {}",
            if u.is_barred() { "t = 0 slice is not in 1 + Psi^-1" } else { "barred predicate fails" }
        )));
    }
    let v_max = u.v_max();
    let floor = depth - v_max as i64;

    let head_inv = u.at_zero().inverse(floor)?;
    let gens: Vec<(&Monomial, &PsiOp<R>)> = u.slices().filter(|(t, _)| !t.is_one()).collect();
    let mut support: BTreeSet<Monomial> = BTreeSet::new();
    support.insert(Monomial::one());
    let mut frontier = alloc::vec![Monomial::one()];
    while let Some(m) = frontier.pop() {
        for (g, _) in &gens {
            let p = m.mul(g);
            if p.valuation() <= v_max && support.insert(p.clone()) {
                frontier.push(p);
            }
        }
    }

    let mut s = TSeries::zero(v_max, floor);
    s.add_slice(Monomial::one(), &head_inv);
    for t in support.iter().skip(1) {
        let mut r = PsiOp::zero().with_floor(floor);
        for (g, ug) in &gens {
            if let Some(rest) = t.div(g) {
                if let Some(sr) = s.get(&rest) {
                    r.add_assign(&sr.compose_to(ug, floor));
                }
            }
        }
        let slice = r.proj_minus().compose_to(&head_inv, floor).neg();
        s.add_slice(t.clone(), &slice);
    }

    if let Some(d) = s.reliable_depth() {
        if d > depth {
            return Err(Error::InsufficientDepth { needed: depth, reliable: d });
        }
    }

    let su = s.mul_to(u, floor);
    let residual = su.proj_minus();
    if !residual.is_zero() {
        return Err(Error::PredicateViolation("(SU)_- does not vanish".into()));
    }
    let y = su.proj_plus();
    if let Some((t, op)) = y.slices().find(|(_, op)| !op.is_exact()) {
        return Err(Error::InsufficientDepth { needed: 0, reliable: op.depth().max(t.valuation() as i64) });
    }
    let s = s.assert_barred()?;
    let y = y.assert_barred()?;
    Ok(FactorPair { s, y })
}

/// `S^-1 Y`.
pub fn recompose<R: DiffRing>(f: &FactorPair<R>) -> Result<TSeries<R>, Error> {
    let floor = f.s.floor().min(f.y.floor());
    Ok(f.s.clone().with_floor(floor).inverse()?.mul_to(&f.y, floor))
}

/// `(SU)_-`, slicewise.
pub fn residual<R: DiffRing>(f: &FactorPair<R>, u: &TSeries<R>) -> TSeries<R> {
    f.s.mul_to(u, f.s.floor().min(u.floor())).proj_minus()
}
