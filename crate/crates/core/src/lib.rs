//! Exact formal pseudo-differential operators over differential rings,
//! truncated multi-time series, the factorization `U = S^-1 Y`, and a KP
//! hierarchy solver with its verification battery.
//!
//! Everything is exact rational arithmetic; `no_std` with `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod kp;
pub mod laurent;
pub mod mulase;
pub mod rational;
pub mod psido;
pub mod ring;
pub mod tseries;

pub use error::Error;
pub use mulase::{factorize, recompose, FactorPair};
pub use rational::{GaussRational, Rational};
pub use psido::PsiOp;
pub use ring::{DiffRing, Fourier, Poly, Scalar, ZScalar, ZSeries};
pub use tseries::{Monomial, QSeries, Series, TSeries};
