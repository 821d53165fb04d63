//! Executable semantics, Hoare-logic embeddings and checkable proof
//! certificates for a small While language with `break` and `continue`.
//!
//! Everything is decided by enumeration over a finite [`lang::Footprint`]:
//! a list of program variables whose values are residues modulo `M`.

pub mod assertions;
pub mod bigstep;
pub mod cli;
pub mod error;
pub mod extended;
pub mod fuzz;
pub mod lang;
pub mod proof;
pub mod simulation;
pub mod smallstep;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
