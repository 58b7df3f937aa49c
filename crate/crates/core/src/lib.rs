//! Exact solver for Bayesian persuasion in multi-phase trials.
//!
//! A trial is a tree of binary- or n-ary-outcome experiments, some fixed
//! in advance and some designed by a sender who commits before the state
//! of the world is drawn. The receiver observes the realized outcome
//! sequence and guesses the state; the sender is paid whenever the
//! receiver guesses state 1. This crate computes the sender's optimal
//! commitment and value curve by backward induction over exact
//! piecewise-linear value functions, provides closed-form machinery for
//! two-phase trials, brute-force verification oracles, and receiver-side
//! maximin experiment selection. All arithmetic is exact rational; no
//! floating point touches the solver path.

pub mod curve;
pub mod dp;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod receiver;
pub mod twophase;

pub use error::{Error, Result};
pub use rational::Rat;
