//! Fractional top trading cycles (FTTC) for housing markets with fractional
//! endowments.
//!
//! Everything here is exact: quantities are arbitrary-precision rationals and
//! the axiom checkers in [`verify`] certify their verdicts with an exact
//! rational simplex ([`lp`]). The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classical;
pub mod engine;
pub mod lp;
pub mod market;
pub mod preference;
pub mod random;
pub mod rational;
pub mod verify;

pub use engine::{fttc, fttc_traced, FttcRun, TieBreak, TraceEvent};
pub use market::{Assignment, AssignmentError, HousingMarket, MarketError, Violation};
pub use preference::{Comparison, Preference};
pub use rational::Rational;
