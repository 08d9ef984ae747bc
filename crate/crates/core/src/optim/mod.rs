//! Optimizers: one- and two-step projected gradient methods for the
//! differentiable objectives, and a real-coded genetic algorithm for the
//! max-type objectives.

mod ga;
mod gpm;

pub use ga::{ga_minimize, GaConfig, GaResult, GaTrial};
pub use gpm::{gpm1, gpm2, GpmConfig, GpmResult, IterationRecord, StopReason};
