//! Simulation and verification harness for controlled dense coding on
//! tripartite/quadripartite qubit registers and a tripartite qutrit register.
//!
//! The crate is organized bottom-up:
//!
//! * [`qcore`] — dense state vectors and gate matrices over mixed
//!   qubit/qutrit registers,
//! * [`states`] — the catalog of named channel states,
//! * [`measure`] — parameterized controller measurements as branch
//!   decompositions,
//! * [`concentrate`] — the transcribed concentration matrices with their
//!   validity domains, plus a generic concentrator that is unitary
//!   everywhere,
//! * [`entangle`] — Wootters concurrence alongside the raw-branch and
//!   closed-form conventions,
//! * [`protocol`] — end-to-end dense coding runs with transcripts,
//! * [`sweep`] — CSV regeneration of every figure and table.
//!
//! The `qdense` binary exposes `list-states`, `run`, `sweep`, `verify` and
//! `roundtrip` on top of the library.

pub mod concentrate;
pub mod entangle;
pub mod error;
pub mod measure;
pub mod protocol;
pub mod qcore;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
