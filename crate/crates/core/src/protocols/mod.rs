//! Multi-party protocol runs.
//!
//! Parties are plain structs that own their secrets; a run is a deterministic
//! sequential loop that moves [`Message`]s between them and records each one
//! in a [`Transcript`].

pub mod bb84;
pub mod blind_search;
pub mod clifford_eval;
pub mod table2;
pub mod transcript;

pub use bb84::{bb84_exchange, Bb84Outcome};
pub use blind_search::{run_protocol1, Protocol1Config, Protocol1Result};
pub use clifford_eval::{
    amplify_key_pair, build_kappa_prime, dave_key_search, grover_iterations, run_protocol2,
    DaveOutcome, Protocol2Result,
};
pub use transcript::{Message, Party, Payload, Transcript};
