mod common;

use common::strat::*;
use kpflow_core::{DiffRing, Fourier, Rational, Scalar};
use proptest::prelude::*;

fn ring_axioms<R: DiffRing>(a: &R, b: &R, c: &R) {
    assert_eq!(a.add(b), b.add(a));
    assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
    assert_eq!(a.mul(b), b.mul(a));
    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
    assert_eq!(a.mul(&R::one()), *a);
    assert!(a.sub(a).is_zero());
    assert_eq!(a.add(&R::zero()), *a);
}

fn leibniz<R: DiffRing>(a: &R, b: &R) {
    assert_eq!(a.mul(b).derive(), a.derive().mul(b).add(&a.mul(&b.derive())));
    assert!(R::from_rational(&Rational::new(7, 3)).derive().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
        }
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn fourier_ring(a in fourier(), b in fourier(), c in fourier()) {
        ring_axioms(&a, &b, &c);
        leibniz(&a, &b);
    }

    #[test]
    fn poly_ring(a in poly(), b in poly(), c in poly()) {
        ring_axioms(&a, &b, &c);
        leibniz(&a, &b);
        prop_assert_eq!(a.antiderive().unwrap().derive(), a);
    }

    #[test]
    fn fourier_z_ring(a in fourier_z(2), b in fourier_z(2), c in fourier_z(2)) {
        ring_axioms(&a, &b, &c);
        leibniz(&a, &b);
    }

    #[test]
    fn integration_kills_derivatives(a in fourier(), b in fourier_z(2)) {
        prop_assert!(a.derive().integrate().unwrap().is_zero());
        prop_assert!(b.derive().integrate().unwrap().is_zero());
    }

    #[test]
    fn antiderivative_on_zero_mean(a in zero_mean_fourier()) {
        let prim = a.antiderive().unwrap();
        prop_assert_eq!(prim.derive(), a);
        prop_assert!(prim.mean().is_zero());
    }

    #[test]
    fn nonzero_mean_has_no_antiderivative(a in zero_mean_fourier(), c in 1i64..5) {
        let shifted = a.add(&Fourier::constant(Rational::from_int(c)));
        prop_assert!(shifted.antiderive().is_err());
    }

    #[test]
    fn fourier_z_units(a in fourier_z(2)) {
        let u = kpflow_core::ZSeries::<Fourier>::one().add(&a.mul(&kpflow_core::ZSeries::new(2, [(1, Fourier::one())])));
        prop_assert!(u.mul(&u.inverse().unwrap()).is_one());
    }
}
