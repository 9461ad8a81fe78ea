//! End-to-end pipeline: simulate, take the smoothed spectrum, report the
//! peaks at each mirror's frequency, and compute weak values independently.

use std::fmt::Write as _;

use crate::beam::{self, DetectorTimeSeries};
use crate::error::ScenarioError;
use crate::plot;
use crate::scenario::{self, Scenario};
use crate::spectrum::{self, PeakComparison, PowerSpectrum, DEFAULT_PEAK_HALF_WIDTH, DEFAULT_SMOOTHING_WINDOW};
use crate::tsvf::WeakValueReport;

/// Peaks below this fraction of [`Scenario::reference_peak_power`] (scaled
/// by the smoothing window) are reported absent.
pub const DEFAULT_PEAK_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseOptions {
    pub seed: u64,
    /// Noise standard deviation as a fraction of the clean signal's RMS.
    pub relative_level: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub window: usize,
    pub peak_threshold: f64,
    /// Relative deviation at which a simulated/predicted peak ratio is
    /// flagged.
    pub tolerance: f64,
    pub noise: Option<NoiseOptions>,
    pub plot: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_SMOOTHING_WINDOW,
            peak_threshold: DEFAULT_PEAK_THRESHOLD,
            tolerance: 0.05,
            noise: None,
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub mirror: String,
    pub frequency_hz: f64,
    pub power: f64,
    /// `power` over the reference peak power in the same spectrum units.
    pub relative: f64,
    pub present: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub scenario: String,
    pub series: DetectorTimeSeries,
    pub spectrum: PowerSpectrum,
    pub peaks: Vec<PeakReport>,
    pub weak_values: WeakValueReport,
    /// Absent when the weak values are undefined.
    pub comparisons: Option<Vec<PeakComparison>>,
    pub plot: Option<String>,
}

impl RunArtifacts {
    pub fn present_frequencies(&self) -> Vec<f64> {
        self.peaks.iter().filter(|p| p.present).map(|p| p.frequency_hz).collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}", self.scenario);
        let _ = writeln!(out, "{:<8} {:>9} {:>24} {:>12}  present", "mirror", "freq_hz", "peak_power", "relative");
        for p in &self.peaks {
            let _ = writeln!(
                out,
                "{:<8} {:>9.1} {:>24.16e} {:>12.3e}  {}",
                p.mirror, p.frequency_hz, p.power, p.relative, p.present
            );
        }
        if self.weak_values.defined {
            for (m, w) in &self.weak_values.values {
                let _ = writeln!(out, "weak value {m}: {:+.6} {:+.6}i", w.re, w.im);
            }
        } else {
            let _ = writeln!(out, "weak values undefined: orthogonal postselection");
        }
        if let Some(cmp) = &self.comparisons {
            for c in cmp.iter().filter(|c| c.flagged) {
                let _ = writeln!(out, "warning: peak at {} Hz ({}) deviates from prediction, ratio {:?}", c.frequency_hz, c.mirror, c.ratio);
            }
        }
        out
    }
}

pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunArtifacts, ScenarioError> {
    let err = |e: spectrum::SpectrumError| ScenarioError::semantic(None, e.to_string());

    let mut series = scenario::simulate(scenario, scenario.sampling)?;
    if let Some(noise) = options.noise {
        let n = series.samples.len() as f64;
        let rms = (series.samples.iter().map(|s| s * s).sum::<f64>() / n).sqrt();
        beam::add_white_noise(&mut series, noise.relative_level * rms, noise.seed);
    }
    let raw = spectrum::power_spectrum(&series).map_err(err)?;
    let smoothed = spectrum::smooth(&raw, options.window).map_err(err)?;

    let reference = scenario.reference_peak_power() / options.window as f64;
    let mut peaks = Vec::new();
    for (m, settings) in &scenario.mirrors {
        let f = settings.vibration.frequency_hz;
        let power = spectrum::peak_power(&smoothed, f, DEFAULT_PEAK_HALF_WIDTH).map_err(err)?;
        let relative = if reference > 0.0 { power / reference } else { 0.0 };
        peaks.push(PeakReport {
            mirror: m.clone(),
            frequency_hz: f,
            power,
            relative,
            present: relative > options.peak_threshold,
        });
    }

    let weak_values = scenario.weak_values();
    let comparisons = match scenario.predicted_peaks() {
        Ok(pred) => Some(spectrum::compare_to_prediction(&smoothed, &pred, options.tolerance).map_err(err)?),
        Err(_) => None,
    };
    let plot = options.plot.then(|| {
        let fs: Vec<f64> = scenario.mirrors.values().map(|m| m.vibration.frequency_hz).collect();
        let lo = fs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = fs.iter().copied().fold(0.0, f64::max);
        let (lo, hi) = if lo.is_finite() { ((lo - 50.0).max(0.0), (hi + 50.0).min(smoothed.nyquist())) } else { (0.0, smoothed.nyquist()) };
        plot::spectrum_svg(&smoothed, &format!("{} smoothed power spectrum", scenario.name), lo, hi)
    });

    Ok(RunArtifacts {
        scenario: scenario.name.clone(),
        series,
        spectrum: smoothed,
        peaks,
        weak_values,
        comparisons,
        plot,
    })
}
