//! Builds Deutsch's three-qubit gate out of replicas of one two-qubit gate
//! `A(φ, α, θ)` and measures how close every stage of the construction gets.
//!
//! * [`matcore`]: small dense complex matrices and the phase-invariant
//!   distance used throughout.
//! * [`gates`]: the exact matrices (`A`, `V`, `V̄`, `P`, `Q`, `R_z`, `D`),
//!   controlled embeddings and Bloch decomposition.
//! * [`approx`]: powers of `A` and the torus search for the power that hits a
//!   target `(α₁, θ₁)`.
//! * [`synth`]: the networks, their lowering onto `A`, evaluation,
//!   convergence studies and the end-to-end compiler.
//! * [`netdsl`]: the `.unet` netlist format.
//! * [`verify`]: a seeded self-check of all exact identities.

pub mod approx;
mod error;
pub mod gates;
pub mod matcore;
pub mod netdsl;
pub mod synth;
pub mod verify;

pub use approx::{find_power, inverse_params, power_params, torus_dist, ApproxQuery, ApproxResult};
pub use error::{Error, Result};
pub use gates::{BlochDecomp, GateParams, Placement};
pub use matcore::{CMat, Complex, StateVec};
pub use netdsl::{Document, ParseError, ParseErrorKind};
pub use synth::{CompileReport, ConvergenceSample, EvalMode, GateKind, NetOp, Network};
pub use verify::VerifyReport;
