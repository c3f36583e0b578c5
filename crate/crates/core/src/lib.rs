//! Pseudo-spectral laboratory on periodic grids.
//!
//! The crate covers three connected experiments:
//!
//! * 2D vorticity dynamics: Biot-Savart velocity recovery, the mild
//!   (Duhamel) formulation solved by Picard iteration, and an independent
//!   integrating-factor time stepper used as an oracle.
//! * Critical Sobolev-type ratio suites: velocity norms against `L^1` norms
//!   of vorticity derivatives, measured on seeded random families and checked
//!   for stability under grid refinement.
//! * The magnetic-field wave equation `B_tt - Delta B = curl j` with an exact
//!   per-mode propagator, Strichartz exponent admissibility and mixed
//!   space-time norm ratios.
//!
//! Everything lives on a periodic torus of side `L`, which stands in for the
//! whole plane or space; experiments pick `L` so fields decay well inside the
//! box.

pub mod biot_savart;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod heat;
pub mod io;
pub mod mild;
pub mod oseen;
pub mod random;
pub mod ratio_lab;
pub mod stats;
pub mod stepper;
pub mod trajectory;
pub mod wave;

mod par;

pub use error::{LabError, Result};
pub use field::{NormReport, ScalarField, Spectrum, VectorField};
pub use grid::Grid;
pub use trajectory::Trajectory;
