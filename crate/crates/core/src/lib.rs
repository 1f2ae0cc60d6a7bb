//! Limit-cycle amplitudes and orbits of the Rayleigh and Van der Pol
//! oscillators, computed by direct integration, the homotopy analysis
//! method, perturbative renormalization-group flow and its nonlinear-time
//! closed forms, plus arc/segment geometry of the cycles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod trigpoly;
pub mod oscillators;
pub mod curve;
pub mod format;
pub mod integrator;
pub mod roots;
pub mod ham;
pub mod rgflow;
pub mod irgm;
pub mod geometry;
