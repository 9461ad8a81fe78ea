//! Simulation and analysis of nested Mach-Zehnder "which path" experiments.
//!
//! Two independent routes describe the same experiment:
//!
//! * [`tsvf`] computes weak values of the mirror projectors from forward and
//!   backward amplitudes over an [`network::OpticalNetwork`];
//! * [`beam`] superposes shifted Gaussian beams on a quad-cell detector and
//!   samples the up-minus-down signal, which [`spectrum`] turns into a
//!   smoothed power spectrum.
//!
//! Peaks in the spectrum appear exactly at the frequencies of mirrors with a
//! nonzero real weak value, with sizes set by `|overlap|² · Re(P_X)_w`.

pub mod beam;
pub mod error;
pub mod format;
pub mod network;
pub mod plot;
pub mod run;
pub mod scenario;
pub mod spectrum;
pub mod tsvf;

pub use beam::{DetectorTimeSeries, GaussianBeam, SamplingSpec, VibrationSpec};
pub use error::ScenarioError;
pub use network::{OpticalNetwork, OpticalPath, PathTerm};
pub use run::{run, RunArtifacts, RunOptions};
pub use scenario::{builtin, builtin_scenarios, Scenario};
pub use spectrum::PowerSpectrum;
pub use tsvf::{TwoStateVector, WeakValueReport};
