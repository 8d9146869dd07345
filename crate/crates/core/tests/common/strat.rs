use kpflow_core::{DiffRing, Fourier, GaussRational, Monomial, Poly, PsiOp, Rational, TSeries, ZSeries};
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Rational::new(n, d))
}

pub fn gauss() -> impl Strategy<Value = GaussRational> {
    (rational(), rational()).prop_map(|(a, b)| GaussRational::new(a, b))
}

pub fn fourier() -> impl Strategy<Value = Fourier> {
    prop::collection::vec((-3i64..=3, gauss()), 0..4).prop_map(Fourier::from_modes)
}

pub fn zero_mean_fourier() -> impl Strategy<Value = Fourier> {
    prop::collection::vec((prop_oneof![-3i64..=-1, 1i64..=3], gauss()), 0..4).prop_map(Fourier::from_modes)
}

pub fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u32..=4, rational()), 0..4).prop_map(Poly::from_terms)
}

pub fn fourier_z(z_max: u32) -> impl Strategy<Value = ZSeries<Fourier>> {
    prop::collection::vec((0..=z_max, fourier()), 0..3).prop_map(move |t| ZSeries::new(z_max, t))
}

/// Exact operator with orders in `[lo, hi]`.
pub fn op<R: DiffRing + 'static>(coeff: impl Strategy<Value = R> + 'static, lo: i64, hi: i64) -> impl Strategy<Value = PsiOp<R>> {
    prop::collection::vec((lo..=hi, coeff), 0..4).prop_map(PsiOp::exact)
}

/// `1 + Psi^-1` with up to three lower orders.
pub fn unipotent() -> impl Strategy<Value = PsiOp<Fourier>> {
    prop::collection::vec((-3i64..=-1, fourier()), 0..3).prop_map(|t| PsiOp::exact(std::iter::once((0, Fourier::one())).chain(t)))
}

pub fn monomial(k_max: u32, v_max: u32) -> impl Strategy<Value = Monomial> {
    let all = kpflow_core::tseries::monomials_upto(k_max, v_max);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

/// Barred series: slice at `t` has order `<= min(|t|, 2)`.
pub fn barred_series(v_max: u32, floor: i64) -> impl Strategy<Value = TSeries<Fourier>> {
    (unipotent(), prop::collection::vec((monomial(3, v_max), -2i64..=2, prop::collection::vec((0i64..=2, fourier()), 1..3)), 0..4)).prop_map(
        move |(head, rest)| {
            let mut slices = vec![(Monomial::one(), head)];
            for (t, top, terms) in rest {
                if t.is_one() {
                    continue;
                }
                let top = top.min(t.valuation() as i64);
                slices.push((t, PsiOp::exact(terms.into_iter().map(|(drop, c)| (top - drop, c)))));
            }
            TSeries::from_slices(v_max, floor, slices)
        },
    )
}
