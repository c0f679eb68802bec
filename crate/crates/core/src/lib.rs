//! Numerical and exact-algebra core for probing the chiral U(1) anomaly
//! at one loop with momentum-space (Pauli-Villars type) regulators.
//!
//! The crate is organised around three layers:
//!
//! * exact algebra: Gaussian-rational arithmetic ([`exact`]), the Euclidean
//!   Dirac algebra ([`clifford`]) and a finite Grassmann algebra with
//!   determinants ([`grassmann`]);
//! * deterministic adaptive quadrature over Feynman-parameter simplices and
//!   over momentum space ([`quadrature`]);
//! * the physics built on top: the regularized three-photon amplitude and its
//!   scans ([`loop_amplitudes`]), its invariant decomposition
//!   ([`tensor_basis`]) and the violated Slavnov-Taylor relations ([`vsti`]).
//!
//! Everything here is `no_std`-compatible (with `alloc`); IO, file formats
//! and the command line live in the companion `anomaly-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod clifford;
pub mod exact;
pub mod fmath;
pub mod grassmann;
pub mod kinematics;
pub mod loop_amplitudes;
pub mod quadrature;
pub mod tensor;
pub mod tensor_basis;
pub mod vsti;

pub use kinematics::{CutoffPair, Kinematics};
pub use quadrature::IntegralResult;
pub use tensor::{Rank2Tensor, Rank3Tensor, Vec4};
