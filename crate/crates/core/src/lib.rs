//! Exact-arithmetic tree amplitudes as minimal model brackets.
//!
//! The crate builds two differential graded Lie algebras with a momentum
//! grading (a gauge theory over an internal Lie algebra and a gravity
//! quotient algebra), retracts them onto their on-shell homology with
//! explicitly constructed contractions and homotopies, and evaluates tree
//! scattering amplitudes as sums over trivalent trees — all over the
//! Gaussian rationals, with no floating point anywhere.
//!
//! The pipeline is organized bottom-up:
//! - [`scalar`], [`poly`]: the ground field and rational-function fits,
//! - [`linalg`]: dense exact solvers and contraction construction,
//! - [`gamma`]: the helicity complexes and their frozen state vectors,
//! - [`dgla`]: the two graded Lie algebras and their quotient structure,
//! - [`kinematics`]: spinor samples, divisors, and one-parameter pencils,
//! - [`homotopy`]: perturbation, optimal homotopies, zig-zag transports,
//! - [`trees`]: trivalent tree enumeration and decorated evaluation,
//! - [`amplitudes`]: helicity states and the full amplitude evaluator,
//! - [`residues`]: residue extraction and factorization checks,
//! - [`suite`]: the acceptance battery run by tests and the CLI.

pub mod error;
pub mod scalar;
pub mod poly;
pub mod momentum;
pub mod linalg;
pub mod polymat;
pub mod exterior;
pub mod gamma;
pub mod dgla;
pub mod kinematics;
pub mod homotopy;
pub mod trees;
pub mod amplitudes;
pub mod residues;
pub mod suite;

pub use error::{Error, Result};
pub use scalar::Gq;
