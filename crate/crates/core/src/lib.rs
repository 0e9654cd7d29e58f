//! Reward-machine reinforcement learning under labelling-function noise.
//!
//! * [`rm`]: reward machines, their text format and the two builtin machines.
//! * [`grid`]: CookieWorld and SymbolWorld grid environments.
//! * [`qrm`]: tabular Q-learning for reward machines with counterfactual
//!   updates.
//! * [`noise`]: random tampering of labelling-function outputs.
//! * [`rollout`] and [`metrics`]: greedy evaluation episodes and the pooled
//!   robustness statistics.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod env;
pub mod grid;
pub mod label;
pub mod metrics;
pub mod noise;
pub mod qrm;
pub mod rm;
pub mod rollout;
pub mod seed;

pub use env::{Action, EnvError, Environment, ObsKey, Status, StepOutcome};
pub use grid::{Domain, GridEnv, GridMap};
pub use label::{Alphabet, LabelSet, Proposition};
pub use rm::{RewardMachine, RmError, RmStep, StateId};
