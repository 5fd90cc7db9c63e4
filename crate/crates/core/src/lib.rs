//! Single-call reduction from monotone allocation rules to truthful-in-expectation
//! mechanisms.
//!
//! The mechanism resamples every bid with a self-resampling procedure and calls
//! the allocation rule exactly once on the resampled bids. Each agent is charged
//! its reported value minus a randomized rebate whose expectation is the Myerson
//! integral, so no payment is ever computed explicitly.
//!
//! The crate is `no_std` (with `alloc`) and contains only the algorithms:
//!
//! - [`resampling`]: the canonical procedure in recursive and explicit form and
//!   its `h`-canonical extension to arbitrary supports. The single-sample
//!   integral estimator lives here too.
//! - [`mechanism`]: the transformation with its outcomes, plus a
//!   quadrature-based Myerson payment oracle used for verification.
//! - [`offline`]: single-item, k-unit and shortest-path procurement rules.
//! - [`bandit`]: reward realizations, UCB1 induced rules, NewCB, regret.
//!
//! Statistical checks, file formats and the command line live in the
//! `alloc2mech` crate.
#![no_std]

extern crate alloc;

pub mod bandit;
pub mod error;
pub mod interval;
pub mod mechanism;
pub mod offline;
pub mod quadrature;
pub mod resampling;
pub mod seed;

pub use error::{Error, Result};
pub use interval::Interval;
pub use mechanism::{
    alloc_to_mech, AllocationRule, BidProfile, DirectMechanism, Mechanism, Outcome, RuleSeeds,
    RunSeeds, Settlement,
};
pub use resampling::{ResamplePair, SelfResampler};
pub use seed::{ResampleSeed, ResampleSource};
