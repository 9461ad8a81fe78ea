//! Classical quad-cell signal of superposed, vertically shifted Gaussian
//! beams.
//!
//! The field on the detector is `Ψ(x, y) = 𝒜 Σ_p a_p exp(-(x² + (y - d_p)²) / 2Δ²)`.
//! Each pair of terms multiplies to a Gaussian of width `Δ/√2` centred at
//! `(d_p + d_q)/2` with weight `exp(-(d_p - d_q)² / 4Δ²)`, so
//!
//! ```text
//! P = 𝒜² π Δ² Σ_pq Re(a_p a_q*) exp(-(d_p - d_q)²/4Δ²)
//! S = 𝒜² π Δ² Σ_pq Re(a_p a_q*) exp(-(d_p - d_q)²/4Δ²) erf((d_p + d_q)/2Δ)
//! ```
//!
//! Waists are in millimetres, mirror displacements in micrometres.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::network::PathTerm;

pub const DEFAULT_WAIST_MM: f64 = 1.2;
pub const DEFAULT_DISPLACEMENT_UM: f64 = 0.6;
pub const DEFAULT_RATE_HZ: f64 = 2500.0;
pub const DEFAULT_DURATION_S: f64 = 1.0;

/// Displacement-to-waist ratio above which the first-order picture is
/// questionable.
pub const WEAK_REGIME_LIMIT: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamError {
    #[error("beam waist must be positive, got {0} mm")]
    Waist(f64),
    #[error("{field} must be {requirement}, got {value}")]
    Invalid { field: &'static str, requirement: &'static str, value: f64 },
    #[error("rate × duration = {0} is not a positive whole number of samples")]
    SampleCount(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeam {
    pub amplitude: f64,
    pub waist_mm: f64,
}

impl Default for GaussianBeam {
    fn default() -> Self {
        Self { amplitude: 1.0, waist_mm: DEFAULT_WAIST_MM }
    }
}

impl GaussianBeam {
    pub fn new(amplitude: f64, waist_mm: f64) -> Result<Self, BeamError> {
        let beam = Self { amplitude, waist_mm };
        beam.check()?;
        Ok(beam)
    }

    pub fn check(&self) -> Result<(), BeamError> {
        if !(self.waist_mm > 0.0 && self.waist_mm.is_finite()) {
            return Err(BeamError::Waist(self.waist_mm));
        }
        if !self.amplitude.is_finite() {
            return Err(BeamError::Invalid { field: "amplitude", requirement: "finite", value: self.amplitude });
        }
        Ok(())
    }

    /// `𝒜² π Δ²`: power of a single unshifted unit-amplitude path.
    pub fn unit_power(&self) -> f64 {
        self.amplitude * self.amplitude * PI * self.waist_mm * self.waist_mm
    }

    /// `dS/dd` of a single unit-amplitude path at zero shift, `2𝒜²√π Δ`
    /// (signal units per millimetre).
    pub fn first_order_gain(&self) -> f64 {
        2.0 * self.amplitude * self.amplitude * PI.sqrt() * self.waist_mm
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibrationSpec {
    pub frequency_hz: f64,
    pub displacement_um: f64,
    /// Phase offset of the sinusoid, radians.
    pub phase_rad: f64,
}

impl VibrationSpec {
    pub fn new(frequency_hz: f64, displacement_um: f64) -> Self {
        Self { frequency_hz, displacement_um, phase_rad: 0.0 }
    }

    /// Displacement from a tilt of `angle_rad` seen over `lever_arm_m`.
    pub fn from_tilt(frequency_hz: f64, angle_rad: f64, lever_arm_m: f64) -> Self {
        Self::new(frequency_hz, angle_rad * lever_arm_m * 1e6)
    }

    pub fn displacement_mm(&self) -> f64 {
        self.displacement_um * 1e-3
    }

    pub fn check(&self) -> Result<(), BeamError> {
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(BeamError::Invalid {
                field: "freq_hz",
                requirement: "positive",
                value: self.frequency_hz,
            });
        }
        if !(self.displacement_um >= 0.0 && self.displacement_um.is_finite()) {
            return Err(BeamError::Invalid {
                field: "displacement_um",
                requirement: "non-negative",
                value: self.displacement_um,
            });
        }
        if !self.phase_rad.is_finite() {
            return Err(BeamError::Invalid { field: "vib_phase_rad", requirement: "finite", value: self.phase_rad });
        }
        Ok(())
    }

    /// True when `δ/Δ` exceeds [`WEAK_REGIME_LIMIT`].
    pub fn beyond_weak_regime(&self, beam: &GaussianBeam) -> bool {
        self.displacement_mm() / beam.waist_mm > WEAK_REGIME_LIMIT
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec {
    pub rate_hz: f64,
    pub duration_s: f64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self { rate_hz: DEFAULT_RATE_HZ, duration_s: DEFAULT_DURATION_S }
    }
}

impl SamplingSpec {
    pub fn sample_count(&self) -> Result<usize, BeamError> {
        let n = self.rate_hz * self.duration_s;
        let rounded = n.round();
        if !(self.rate_hz > 0.0 && self.duration_s > 0.0)
            || !n.is_finite()
            || rounded < 1.0
            || (n - rounded).abs() > 1e-9 * rounded
        {
            return Err(BeamError::SampleCount(n));
        }
        Ok(rounded as usize)
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 / self.rate_hz
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTimeSeries {
    pub sampling: SamplingSpec,
    pub samples: Vec<f64>,
}

impl DetectorTimeSeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(|n| self.sampling.time(n))
    }
}

/// `δ sin(2π f t + φ)`, micrometres.
pub fn mirror_displacement(vib: &VibrationSpec, t: f64) -> f64 {
    vib.displacement_um * (2.0 * PI * vib.frequency_hz * t + vib.phase_rad).sin()
}

/// Total vertical shift of one path, micrometres. Mirrors without a
/// vibration entry stay still.
pub fn path_displacement(mirrors: &[String], vibrations: &BTreeMap<String, VibrationSpec>, t: f64) -> f64 {
    mirrors
        .iter()
        .filter_map(|m| vibrations.get(m))
        .map(|v| mirror_displacement(v, t))
        .sum()
}

/// Pairwise Gaussian-product terms shared by the power and signal formulas.
/// Displacements in micrometres.
fn pair_sum(amplitudes: &[Complex64], displacements_um: &[f64], beam: &GaussianBeam, signed: bool) -> f64 {
    assert_eq!(amplitudes.len(), displacements_um.len());
    let waist_um = beam.waist_mm * 1e3;
    let mut total = 0.0;
    for (p, (ap, dp)) in amplitudes.iter().zip(displacements_um).enumerate() {
        let diag = ap.norm_sqr();
        total += if signed { diag * libm::erf(dp / waist_um) } else { diag };
        for (aq, dq) in amplitudes[p + 1..].iter().zip(&displacements_um[p + 1..]) {
            let weight = 2.0 * (ap * aq.conj()).re;
            if weight == 0.0 {
                continue;
            }
            let sep = (dp - dq) / waist_um;
            let overlap = (-sep * sep / 4.0).exp();
            total += if signed {
                weight * overlap * libm::erf((dp + dq) / (2.0 * waist_um))
            } else {
                weight * overlap
            };
        }
    }
    total * beam.unit_power()
}

/// Upper-minus-lower half-plane intensity for the given per-path shifts.
pub fn quadcell_signal_at(amplitudes: &[Complex64], displacements_um: &[f64], beam: &GaussianBeam) -> f64 {
    pair_sum(amplitudes, displacements_um, beam, true)
}

/// Total detected power for the given per-path shifts.
pub fn total_power_at(amplitudes: &[Complex64], displacements_um: &[f64], beam: &GaussianBeam) -> f64 {
    pair_sum(amplitudes, displacements_um, beam, false)
}

/// Linearization of [`quadcell_signal_at`] about zero shift:
/// `2𝒜²√πΔ Σ_p d_p Re(a_p · overlap*)`.
pub fn first_order_signal_at(amplitudes: &[Complex64], displacements_um: &[f64], beam: &GaussianBeam) -> f64 {
    let overlap: Complex64 = amplitudes.iter().sum();
    let slope: f64 = amplitudes
        .iter()
        .zip(displacements_um)
        .map(|(a, d)| d * 1e-3 * (a * overlap.conj()).re)
        .sum();
    beam.first_order_gain() * slope
}

fn split(paths: &[PathTerm], vibrations: &BTreeMap<String, VibrationSpec>, t: f64) -> (Vec<Complex64>, Vec<f64>) {
    paths
        .iter()
        .map(|p| (p.amplitude, path_displacement(&p.mirrors, vibrations, t)))
        .unzip()
}

pub fn quadcell_signal(
    paths: &[PathTerm],
    beam: &GaussianBeam,
    vibrations: &BTreeMap<String, VibrationSpec>,
    t: f64,
) -> f64 {
    let (a, d) = split(paths, vibrations, t);
    quadcell_signal_at(&a, &d, beam)
}

pub fn first_order_signal(
    paths: &[PathTerm],
    beam: &GaussianBeam,
    vibrations: &BTreeMap<String, VibrationSpec>,
    t: f64,
) -> f64 {
    let (a, d) = split(paths, vibrations, t);
    first_order_signal_at(&a, &d, beam)
}

pub fn total_power(
    paths: &[PathTerm],
    beam: &GaussianBeam,
    vibrations: &BTreeMap<String, VibrationSpec>,
    t: f64,
) -> f64 {
    let (a, d) = split(paths, vibrations, t);
    total_power_at(&a, &d, beam)
}

/// Sample the quad-cell signal at `n / rate` for every sample index.
pub fn simulate_paths(
    paths: &[PathTerm],
    beam: &GaussianBeam,
    vibrations: &BTreeMap<String, VibrationSpec>,
    sampling: SamplingSpec,
) -> Result<DetectorTimeSeries, BeamError> {
    beam.check()?;
    let n = sampling.sample_count()?;
    let samples = (0..n)
        .map(|k| quadcell_signal(paths, beam, vibrations, sampling.time(k)))
        .collect();
    Ok(DetectorTimeSeries { sampling, samples })
}

/// Add zero-mean Gaussian noise of standard deviation `sigma`, reproducible
/// from `seed`.
pub fn add_white_noise(series: &mut DetectorTimeSeries, sigma: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma.abs()).expect("finite sigma");
    for s in &mut series.samples {
        *s += normal.sample(&mut rng);
    }
}
