//! Quantum correlation measures for small bipartite states and the
//! quantum-correlating power (QCP) of local channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex matrices, density matrices, entropies and seeded
//!   random sampling.
//! - [`states`]: classical-quantum, classical-classical and rank-2
//!   quantum-classical families, Bloch-ball geometry and purification.
//! - [`channels`]: Kraus channels, the amplitude- and phase-damping families
//!   and the rank-1 channels that reach maximal QCP.
//! - [`correlations`]: quantum discord and one-way deficit minimised over
//!   projective measurements, concurrence, entanglement of formation and the
//!   Koashi-Winter shortcut.
//! - [`qcp`]: the nested optimisation for QCP, closed forms for the
//!   amplitude-damping channel and the maximum-QCP search.
//! - [`superact`]: the four-qubit phase-damping super-activation scenario.
//!
//! All entropies are in bits.

pub mod channels;
pub mod correlations;
mod error;
pub mod optimize;
pub mod qcore;
pub mod qcp;
pub mod states;
pub mod superact;

pub use channels::KrausChannel;
pub use correlations::{InnerOptions, Measure, MeasurementResult};
pub use error::{Error, Result};
pub use qcore::{binary_h, BlochVector, ComplexMatrix, DensityMatrix, C64};
pub use qcp::{QcpOptions, QcpResult};
pub use states::{CCInput, ProjectiveBasis, Rank2QCParams};
pub use superact::SuperactReport;
