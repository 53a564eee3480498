//! Certified lower bounds on the dimension gap of harmonic measure.
//!
//! The crate has two halves. The analytic half ([`rigor`], [`estimate`],
//! [`bound`], [`search`]) evaluates the estimate constant alpha, certifies
//! parameter tuples (eta, h, d), and searches the parameter grid for the
//! best provable bound; every inequality there is decided on directed-rounded
//! enclosures. The geometric half ([`net`]) computes exact m-adic net
//! contents of digital sets and the constant-1 mass construction, in exact
//! radical arithmetic.

pub mod bound;
pub mod error;
pub mod estimate;
pub mod net;
pub mod rigor;
pub mod search;

pub use bound::{certify, BoundCertificate, EtaParam, ParameterTuple};
pub use error::{Error, Result};
pub use rigor::{Decimal, DirectedValue};
