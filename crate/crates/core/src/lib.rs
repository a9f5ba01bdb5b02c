//! Horospherical ratio ergodic averages for free groups.
//!
//! The crate covers reduced-word arithmetic ([`free_group`]), the boundary with
//! its Markov measure and horoballs ([`boundary`]), the abstract
//! subset-function machinery with exact finite-model oracles
//! ([`relation_engine`]), non-singular actions usable as skew-product fibers
//! ([`actions`]) and the experiment runner behind the CLI ([`harness`]).

pub mod actions;
pub mod boundary;
pub mod error;
pub mod free_group;
pub mod harness;
pub mod relation_engine;

pub use error::{Error, Result};
