//! Weak-measurement-induced phases of a qubit.
//!
//! A qubit prepared on the parallel of polar angle `theta` is subjected to a
//! quasicontinuous sequence of `N` generalized measurements whose axes step
//! around that parallel, closed by a projective postselection onto the
//! initial state. In the scaling limit the back-action per step is controlled
//! by a strength `C >= 0` and an asymmetry `A` (the non-Hermitian part of the
//! null-readout Kraus operator). This crate computes, for that protocol:
//!
//! * the postselected amplitude `sqrt(P) e^{i chi}` for the all-zeros readout
//!   sequence, in closed form (`N -> oo`) and by exact finite-`N` products
//!   ([`postselected`]);
//! * the readout-averaged object `e^{2i chibar - alpha}` via a 4x4 transfer
//!   matrix and its generator ([`averaged`]);
//! * continuous phase branches over `theta` and their integer winding
//!   numbers ([`curve`], [`postselected`], [`averaged`]);
//! * explicit state trajectories, Bloch coordinates, and the split of the
//!   phase into Pancharatnam (geometric) and dynamical parts
//!   ([`trajectories`]);
//! * the limiting expansions `A -> oo`, `C -> oo`, `C = 0` and the
//!   finite-detector scaling study ([`limits`]);
//! * critical lines where the relevant amplitude vanishes and the winding
//!   number jumps ([`critical`]);
//! * Monte Carlo sampling of readout sequences and the estimator of the
//!   averaged phase factor ([`montecarlo`]);
//! * detector-screen intensities of the two interferometric setups and the
//!   mirrored-arm conjugation identity ([`interferometer`]).
//!
//! All computations are pure functions of their inputs; every value type is
//! immutable and `Send + Sync`.

pub mod averaged;
pub mod critical;
pub mod curve;
mod error;
pub mod interferometer;
pub mod limits;
pub mod measurement;
pub mod montecarlo;
pub mod numerics;
pub mod postselected;
pub mod trajectories;

pub use averaged::AveragedResult;
pub use critical::{CriticalBranch, CriticalPoint};
pub use curve::PhaseCurve;
pub use error::{Error, Result};
pub use interferometer::IntensityPair;
pub use limits::ExpansionResult;
pub use measurement::{
    DetectorParams, Direction, MeasurementAxis, ProtocolParams, QubitState, Readout, Steps,
};
pub use montecarlo::McEstimate;
pub use numerics::{CMat2, CMat4, Complex64};
pub use postselected::PhaseResult;
pub use trajectories::{ReadoutSequence, Trajectory};

/// Which of the two protocols a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// All readouts postselected to zero.
    Postselected,
    /// Sum of `P e^{2i chi}` over all readout sequences.
    Averaged,
}
