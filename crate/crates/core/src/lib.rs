//! Reaching environment for modular serial-chain robots, two PPO trainer
//! variants, and the experiment harness that sweeps trajectory execution
//! time.

pub mod env;
pub mod error;
pub mod harness;
pub mod nn;
pub mod par;
pub mod ppo;
pub mod robot;

pub use error::{Error, Result};
pub use par::Exec;
