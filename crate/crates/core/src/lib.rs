//! Twist-deformed two-dimensional quantum harmonic oscillator.
//!
//! The crate evaluates the closed-form results for the oscillator living on
//! the phase space `[x̄₁, x̄₂] = i f_κ(t)` and checks them against two
//! independent numerical routes: explicit operator matrices on a truncated
//! two-mode Fock basis ([`fock`]) and a finite-difference solve of the radial
//! equation in polar coordinates ([`radial`]).

pub mod coherent;
pub mod error;
pub mod fock;
pub mod oscillator;
pub mod radial;
pub mod twist;
pub mod verify;

pub use coherent::{
    coherent_moments, coherent_vector, cutoff_for_tolerance, CoherentAmplitudes, CoherentReport,
};
pub use error::{Error, Result};
pub use fock::{FockBasis, FockOperator, ObservableSet, StateVector};
pub use oscillator::{
    allowed_azimuthal, angular_momentum_eigenvalue, effective_params,
    eigenstate_uncertainty_product, energy_modes, energy_nl, EffectiveParams, ModeOccupation,
    OscillatorParams, QuantumNumbers,
};
pub use radial::{
    fd_levels, fd_spectrum, fd_spectrum_extrapolated, RadialGrid, RadialLevel, RadialSolution,
    RichardsonEstimate,
};
pub use twist::{TwistFamily, TwistFunction};
pub use verify::{run_checks, Check, Fault, Snapshot, VerifyOptions};

pub use num_complex::Complex64;
