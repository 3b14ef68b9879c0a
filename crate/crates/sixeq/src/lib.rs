//! Finite-volume solvers for the six-equation single-velocity two-phase flow
//! model with stiffened-gas thermodynamics.
//!
//! The crate provides:
//!
//! * the model algebra: stiffened-gas EOS ([`eos`]), conserved/primitive
//!   states and mixture diagnostics ([`state`]);
//! * Rusanov and HLLC approximate Riemann solvers with the phasic-energy
//!   closure for the middle states ([`fluxes`]);
//! * several discretizations of the non-conservative products
//!   ([`noncons`]) and an HLLC wave-propagation scheme that absorbs them
//!   into the fluctuations ([`waveprop`]);
//! * instantaneous mechanical (pressure) relaxation that drives the phasic
//!   pressures to equilibrium after each hyperbolic step ([`relaxation`]),
//!   recovering the pressure-equilibrium five-equation dynamics;
//! * first-order time marching on uniform 1D/2D grids with conservation
//!   accounting ([`solver`]);
//! * the bundled shock-tube benchmarks ([`cases`]), an exact single-phase
//!   Riemann solver for scoring quasi-pure runs ([`euler`]), and config/CSV
//!   I/O for the CLI ([`io`]).

pub mod cases;
pub mod eos;
pub mod error;
pub mod euler;
pub mod fluxes;
pub mod io;
pub mod noncons;
pub mod relaxation;
pub mod solver;
pub mod state;
pub mod waveprop;

pub use error::{Error, Result};
