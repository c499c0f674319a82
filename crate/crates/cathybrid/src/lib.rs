//! Truncated Fock-space simulator for a family of even/odd displaced-state
//! superpositions and the deterministic generation of hybrid entanglement.
//!
//! The pieces, bottom up:
//!
//! * [`fock`] — single- and two-mode truncated state vectors, projections.
//! * [`displacement`] — displaced-number-state amplitudes and tables.
//! * [`states`] — the even/odd family, finite superpositions, truncated
//!   variants, closed-form overlaps.
//! * [`nonclassicality`] — Wigner function, quadrature distributions and
//!   deviations, Fano factor.
//! * [`entangler`] — beam-splitter mixing with a delocalized photon and
//!   photon-number heralding, via direct evolution and via the closed-form
//!   coefficient layer.
//! * [`negativity`] — entanglement negativity, closed form and
//!   partial-transpose spectrum.
//! * [`sweep`] — (beta, t) parameter sweeps and the maximal-negativity
//!   search.
//! * [`io`] — deterministic CSV/JSON emission.
//!
//! Everything is deterministic; grid evaluations parallelize with rayon when
//! the default `parallel` feature is enabled and fall back to sequential
//! loops without it.

pub mod displacement;
pub mod entangler;
pub mod error;
pub mod fock;
pub mod io;
pub mod negativity;
pub mod nonclassicality;
mod par;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub use fock::{Parity, DEFAULT_CUTOFF, DEFAULT_TAIL_TOL};
