//! Permutation quadrinomials over finite fields.
//!
//! The crate decides when `X^r A(X^{q-1})`, with `A = aX^{Q+1} + bX^Q + cX + d`, permutes
//! `F_{q^2}`. It evaluates the closed-form criterion, enumerates the explicit families, checks
//! against brute-force oracles and verifies the supporting polynomial identities.

pub mod field;
pub mod poly;
pub mod criteria;
pub mod rng;
pub mod oracle;
pub mod families;
pub mod identities;
pub mod conjectures;
pub mod sweep;
pub mod cli;
