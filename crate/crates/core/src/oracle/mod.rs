//! First-principles checkers for the pair-approximation matrices and for
//! the stochastic simulator.
//!
//! Nothing here reads the transcribed coefficient tables in
//! [`crate::pair::tables`]; the update rules are re-derived from the game's
//! verbal definition so that agreement is meaningful.

pub mod enumerate;
pub mod markov;
pub mod rules;

pub use enumerate::{
    correspondence_matrix, direct_matrix, enumerate_events, enumerate_rhs, related_matrix,
    CommunicationEvent, OpinionChange,
};
pub use markov::{exact_expected_consensus_time, MAX_EXACT_NODES};
