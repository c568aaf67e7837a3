//! Exact stationary scattering through one-dimensional piecewise constant
//! potentials.
//!
//! Interface transfer matrices are held as Pauli vectors and chained by
//! pairwise composition, which keeps the cost linear in the number of
//! interfaces and lets the magnitude of deep-tunneling products be carried
//! as a separate logarithm. On top of the solver sit resonance location and
//! counting for multi-barrier trains, parameter scans, and file output.
//!
//! Units are natural throughout: `2m/ħ² = 1`, so `E = κ²` in the leads.

// `!(a > b)` comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod pauli;
pub mod potential;
pub mod resonance;
pub mod scan;
pub mod scattering;

pub use pauli::{ComplexMatrix2, PauliError, PauliVector, ScaledPauliVector};
pub use potential::{build_mbp, discretize, MbpSpec, PiecewiseConstantPotential, PotentialError, PotentialFile};
pub use scattering::{solve, transmission, wavefunction, Incidence, ScatteringError, ScatteringSolution, Transmission};
pub use resonance::{alias_audit, find_peaks, AliasReport, Peak, PeakKind, PeakSearch, ResonanceCatalog, ResonanceError};
pub use scan::{spectrum, GridAxis, GridScan, ScanError, SpectrumRow};
