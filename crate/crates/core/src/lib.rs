//! Exact series generation, linear ODE guessing and Fuchsian analysis for the
//! three-particle contribution to the square-lattice Ising susceptibility.

pub mod desing;
pub mod diffop;
pub mod exactalg;
pub mod frobenius;
pub mod guesser;
pub mod lattice;
