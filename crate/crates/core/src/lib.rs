//! Two qubits coupled with unequal strengths to a single cavity mode:
//! closed-system spectra and dynamics, the dispersive effective model, and
//! driven-dissipative Lindblad evolution and steady states, together with
//! entanglement measures and canned numerical experiments.

// `!(x > y)` checks in this crate are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed;
pub mod density;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod measures;
pub mod model;
pub mod numerics;
pub mod open;

pub use error::{Error, Result};
