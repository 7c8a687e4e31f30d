//! Mutation-driven evaluation of LLM-generated test suites.
//!
//! The pipeline ingests seed programs, generates a baseline suite per
//! program, injects semantic-altering (SAC) and semantic-preserving (SPC)
//! changes, regenerates suites for every variant and measures how they
//! degrade, what their failures are attributable to, and how much they churn.

pub mod analysis;
pub mod corpus;
pub mod execution;
pub mod generation;
pub mod mutation;
pub mod par;
pub mod pipeline;
pub mod python;
pub mod util;
