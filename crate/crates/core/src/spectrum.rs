//! One-sided periodogram of the detector signal, moving-average smoothing,
//! and peak extraction.
//!
//! Normalization: with `X_k` the unnormalized DFT of `N` samples, bin `k`
//! holds `c_k |X_k|² / N²` where `c_k = 1` for DC and (even `N`) Nyquist and
//! `c_k = 2` otherwise, so the bins sum to the mean of `S(t)²`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::beam::DetectorTimeSeries;
use crate::tsvf::PeakPrediction;

pub const DEFAULT_SMOOTHING_WINDOW: usize = 10;
pub const DEFAULT_PEAK_HALF_WIDTH: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("time series is empty")]
    Empty,
    #[error("smoothing window must be at least 1")]
    Window,
    #[error("frequency {frequency} Hz outside [0, {nyquist}] Hz")]
    FrequencyOutOfRange { frequency: f64, nyquist: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub bin_width: f64,
    pub powers: Vec<f64>,
    pub smoothed: bool,
    pub window: usize,
}

impl PowerSpectrum {
    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_width
    }

    pub fn nyquist(&self) -> f64 {
        self.frequency(self.powers.len().saturating_sub(1))
    }

    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { powers: self.powers.iter().map(|p| p * factor).collect(), ..self.clone() }
    }
}

pub fn power_spectrum(series: &DetectorTimeSeries) -> Result<PowerSpectrum, SpectrumError> {
    let n = series.samples.len();
    if n == 0 {
        return Err(SpectrumError::Empty);
    }
    let mut buf: Vec<Complex64> = series.samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let norm = 1.0 / (n as f64 * n as f64);
    let bins = n / 2 + 1;
    let powers = (0..bins)
        .map(|k| {
            let edge = k == 0 || (n.is_multiple_of(2) && k == n / 2);
            let weight = if edge { 1.0 } else { 2.0 };
            weight * buf[k].norm_sqr() * norm
        })
        .collect();
    Ok(PowerSpectrum {
        bin_width: series.sampling.rate_hz / n as f64,
        powers,
        smoothed: false,
        window: 1,
    })
}

/// Centered moving average. Bin `i` averages bins `i - (w-1)/2 ..= i + w/2`,
/// truncated at the ends of the spectrum.
pub fn smooth(spectrum: &PowerSpectrum, window: usize) -> Result<PowerSpectrum, SpectrumError> {
    if window == 0 {
        return Err(SpectrumError::Window);
    }
    let n = spectrum.powers.len();
    let below = (window - 1) / 2;
    let above = window / 2;
    let powers = (0..n)
        .map(|i| {
            if window == 1 {
                return spectrum.powers[i];
            }
            let lo = i.saturating_sub(below);
            let hi = (i + above).min(n - 1);
            spectrum.powers[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    Ok(PowerSpectrum {
        bin_width: spectrum.bin_width,
        powers,
        smoothed: window > 1 || spectrum.smoothed,
        window: if window > 1 { window } else { spectrum.window },
    })
}

/// Largest bin within `half_width` bins of `frequency`.
pub fn peak_power(spectrum: &PowerSpectrum, frequency: f64, half_width: usize) -> Result<f64, SpectrumError> {
    let nyquist = spectrum.nyquist();
    if !(frequency >= 0.0 && frequency <= nyquist) {
        return Err(SpectrumError::FrequencyOutOfRange { frequency, nyquist });
    }
    let center = (frequency / spectrum.bin_width).round() as usize;
    let lo = center.saturating_sub(half_width);
    let hi = (center + half_width).min(spectrum.powers.len() - 1);
    Ok(spectrum.powers[lo..=hi].iter().copied().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakComparison {
    pub mirror: String,
    pub frequency_hz: f64,
    pub simulated: f64,
    /// Predicted power in the spectrum's units (divided by the smoothing
    /// window, which spreads an isolated bin into a plateau).
    pub predicted: f64,
    /// `simulated / predicted`, absent when the prediction is zero.
    pub ratio: Option<f64>,
    pub flagged: bool,
}

/// Simulated over predicted peak power per mirror; a mirror is flagged when
/// its prediction is nonzero and the ratio is off by more than `tolerance`.
pub fn compare_to_prediction(
    spectrum: &PowerSpectrum,
    predicted: &BTreeMap<String, PeakPrediction>,
    tolerance: f64,
) -> Result<Vec<PeakComparison>, SpectrumError> {
    let mut out = Vec::with_capacity(predicted.len());
    for (mirror, pred) in predicted {
        let simulated = peak_power(spectrum, pred.frequency_hz, DEFAULT_PEAK_HALF_WIDTH)?;
        let expected = pred.power / spectrum.window as f64;
        let ratio = (expected > 0.0).then(|| simulated / expected);
        let flagged = matches!(ratio, Some(r) if (r - 1.0).abs() > tolerance);
        out.push(PeakComparison {
            mirror: mirror.clone(),
            frequency_hz: pred.frequency_hz,
            simulated,
            predicted: expected,
            ratio,
            flagged,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::SamplingSpec;
    use std::f64::consts::PI;

    fn series(samples: Vec<f64>) -> DetectorTimeSeries {
        DetectorTimeSeries { sampling: SamplingSpec::default(), samples }
    }

    fn flat(powers: Vec<f64>) -> PowerSpectrum {
        PowerSpectrum { bin_width: 1.0, powers, smoothed: false, window: 1 }
    }

    #[test]
    fn constant_series_lands_in_dc() {
        let s = power_spectrum(&series(vec![2.0; 2500])).unwrap();
        assert_eq!(s.powers.len(), 1251);
        assert!((s.powers[0] - 4.0).abs() < 1e-12);
        assert!(s.powers[1..].iter().all(|p| *p < 1e-20));
    }

    #[test]
    fn unit_sine_on_bin() {
        let samples = (0..2500).map(|n| (2.0 * PI * 282.0 * n as f64 / 2500.0).sin()).collect();
        let s = power_spectrum(&series(samples)).unwrap();
        assert!((s.bin_width - 1.0).abs() < 1e-15);
        assert!((s.powers[282] - 0.5).abs() < 1e-12);
        let rest: f64 = s.powers.iter().enumerate().filter(|(k, _)| *k != 282).map(|(_, p)| p).sum();
        assert!(rest < 1e-20);
    }

    #[test]
    fn odd_length_has_no_nyquist_bin() {
        let samples: Vec<f64> = (0..7).map(|n| (n as f64 * 0.9).cos() + 0.1 * n as f64).collect();
        let ms = samples.iter().map(|x| x * x).sum::<f64>() / 7.0;
        let s = power_spectrum(&DetectorTimeSeries {
            sampling: SamplingSpec { rate_hz: 7.0, duration_s: 1.0 },
            samples,
        })
        .unwrap();
        assert_eq!(s.powers.len(), 4);
        assert!((s.total() - ms).abs() < 1e-12 * ms);
    }

    #[test]
    fn empty_series_is_rejected() {
        assert_eq!(power_spectrum(&series(vec![])), Err(SpectrumError::Empty));
    }

    #[test]
    fn smoothing_identity_plateau_and_flat() {
        let mut powers = vec![0.0; 40];
        powers[20] = 3.0;
        let spec = flat(powers.clone());
        assert_eq!(smooth(&spec, 1).unwrap().powers, powers);

        let sm = smooth(&spec, 10).unwrap();
        assert!(sm.smoothed);
        assert_eq!(sm.window, 10);
        let plateau: Vec<usize> = (0..40).filter(|&i| sm.powers[i] > 0.0).collect();
        assert_eq!(plateau, (15..=24).collect::<Vec<_>>());
        assert!(plateau.iter().all(|&i| (sm.powers[i] - 0.3).abs() < 1e-15));

        let level = flat(vec![1.5; 30]);
        assert!(smooth(&level, 10).unwrap().powers.iter().all(|p| (p - 1.5).abs() < 1e-15));
        assert_eq!(smooth(&level, 0), Err(SpectrumError::Window));
    }

    #[test]
    fn peak_search() {
        let mut powers = vec![0.0; 100];
        powers[47] = 2.0;
        let spec = flat(powers);
        assert_eq!(peak_power(&spec, 50.0, 5).unwrap(), 2.0);
        assert_eq!(peak_power(&spec, 60.0, 5).unwrap(), 0.0);
        assert!(peak_power(&spec, 100.0, 5).is_err());
        assert!(peak_power(&spec, -1.0, 5).is_err());
        assert_eq!(peak_power(&flat(vec![0.0; 10]), 3.0, 5).unwrap(), 0.0);
    }

    #[test]
    fn zero_prediction_is_never_flagged() {
        let mut powers = vec![0.0; 400];
        powers[282] = 1.0;
        let spec = flat(powers);
        let preds = BTreeMap::from([
            ("A".to_string(), PeakPrediction { frequency_hz: 282.0, amplitude: 1.0, power: 0.5 }),
            ("E".to_string(), PeakPrediction { frequency_hz: 318.0, amplitude: 0.0, power: 0.0 }),
        ]);
        let cmp = compare_to_prediction(&spec, &preds, 0.05).unwrap();
        assert_eq!(cmp[0].ratio, Some(2.0));
        assert!(cmp[0].flagged);
        assert_eq!(cmp[1].ratio, None);
        assert!(!cmp[1].flagged);
    }
}
