//! Switching linear plants, output delay, and state-delay integration.

mod bank;
mod delay_line;
mod runtime;
mod system;

pub use bank::{
    builtin_bank, builtin_catalog, BankEntry, Signature, S1, S1TD, S2, S2TD, S3, S4, S5, S6, S7,
    S8, TAU1, TAU2, TAU3,
};
pub use delay_line::DelayLine;
pub use runtime::{PlantRuntime, DIVERGENCE_BOUND};
pub use system::{StateDelay, StateSpaceSystem};
