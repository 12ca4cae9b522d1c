//! Exact tools for varieties of maximum likelihood degree one.
//!
//! The central object is the Horn map `Psi(u) = d ∘ (B u)^B` ([`horn`]):
//! a variety has ML degree one exactly when it is the closure of the image
//! of such a map, and then `Psi` is its maximum likelihood estimator.
//! Around it sit exact integer lattice algebra ([`linalg`]), polynomial
//! arithmetic and resultants ([`poly`]), monomial maps ([`monomial`]),
//! Gale duality ([`gale`]), A-discriminants ([`adisc`]), a numeric
//! ML-degree computer for plane curves ([`mldeg`]) and estimators on
//! count data ([`mle`]).
//!
//! All exact computations use arbitrary-precision rationals; every
//! randomized routine takes an explicit seed.

pub mod adisc;
pub mod cert;
pub mod error;
pub mod fixtures;
pub mod gale;
pub mod horn;
pub mod linalg;
pub mod mldeg;
pub mod mle;
pub mod monomial;
pub mod poly;
pub mod random;

pub use cert::{Certificate, Check};
pub use error::{Error, Result};
pub use horn::{FactoredMap, HornMap};
pub use linalg::{Int, IntMatrix, Rat, RatVector};
pub use poly::MultiPoly;
