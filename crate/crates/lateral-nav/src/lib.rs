//! The lateralized maze agent: local-viewpoint code paths and
//! world-viewpoint policies layered over the rule-learning substrate.
//! State versions give identical-looking cells distinct identities, so
//! aliased states stop confounding the learned behaviour.

mod agent;
mod checkpoint;
mod policy;
mod state;

pub use agent::{HetroAgent, LateralParams};
pub use checkpoint::CheckpointError;
pub use policy::{Policy, PolicyStep, splice};
pub use state::{Branch, CodePath, StateVersion};
