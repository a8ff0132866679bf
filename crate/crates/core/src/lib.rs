//! Numerical toolbox for the resource theories of genuine and full quantum
//! incoherence.
//!
//! The crate is organized around a fixed incoherent (computational) basis:
//!
//! * [`numerics`] — dense complex matrices with an explicit tolerance policy;
//! * [`states`] — density matrices, pure states, dephasing, coherence rank;
//! * [`channels`] — Kraus, Schur and Choi channel representations;
//! * [`families`] — membership tests for GIO/SGIO/FIO/MIO/DIO/TIO and the
//!   witness channels used to separate them;
//! * [`measures`] — genuine-coherence quantifiers and a monotonicity harness;
//! * [`transforms`] — feasibility and optimal-probability planning for state
//!   conversions;
//! * [`structure`] — extremality tests and mixed-unitary decompositions of
//!   Schur channels;
//! * [`fileio`] — the JSON state/channel file formats shared with the CLI.

pub mod channels;
pub mod error;
pub mod families;
pub mod fileio;
pub mod measures;
pub mod numerics;
pub mod states;
pub mod structure;
pub mod transforms;

pub use channels::{ChoiMatrix, Completeness, KrausChannel, SchurMap};
pub use error::{Error, Result};
pub use families::{ClassificationReport, Family, Verdict};
pub use measures::MeasureResult;
pub use numerics::{ComplexMatrix, Scalar, ToleranceConfig};
pub use states::{CoherenceSet, DensityMatrix, PureState};
pub use structure::MixedUnitaryDecomposition;
pub use transforms::{TransformPlan, TransformVerdict};
