//! Forward- and backward-evolving amplitudes at each mirror, and weak
//! values of the mirror projectors.
//!
//! The forward amplitude at mirror `X` sums every partial path from the
//! source up to and including the reflection off `X`; the backward amplitude
//! sums every partial path from `X` to the detector. Their product is the sum
//! of the full-path amplitudes through `X`, so the weak value of the projector
//! on `X` is that product divided by the overlap `Σ amplitude(p)`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use thiserror::Error;

use crate::beam::{GaussianBeam, VibrationSpec};
use crate::network::{
    ConnectionId, ElementId, ElementKind, NetworkError, OpticalNetwork, OutPort, PathTerm,
};

/// Overlaps at or below this fraction of `Σ |amplitude(p)|` count as
/// orthogonal postselection.
pub const OVERLAP_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TsvfError {
    #[error("weak values undefined: orthogonal postselection (overlap {overlap})")]
    UndefinedWeakValue { overlap: Complex64 },
    #[error("unknown mirror `{0}`")]
    UnknownMirror(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateVector {
    pub forward: BTreeMap<String, Complex64>,
    pub backward: BTreeMap<String, Complex64>,
    pub overlap: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueReport {
    /// Empty when `defined` is false.
    pub values: BTreeMap<String, Complex64>,
    pub overlap: Complex64,
    pub defined: bool,
}

impl WeakValueReport {
    /// Weak values from a path table: `Σ_{p∋X} a_p / Σ_p a_p` for every
    /// mirror in `mirrors`. Mirrors on no path get weight zero.
    pub fn from_paths<'a>(paths: &[PathTerm], mirrors: impl IntoIterator<Item = &'a str>) -> Self {
        let overlap: Complex64 = paths.iter().map(|p| p.amplitude).sum();
        let scale: f64 = paths.iter().map(|p| p.amplitude.norm()).sum();
        let defined = is_defined(overlap, scale);
        let values = if defined {
            mirrors
                .into_iter()
                .map(|m| {
                    let through: Complex64 = paths.iter().filter(|p| p.passes(m)).map(|p| p.amplitude).sum();
                    (m.to_string(), through / overlap)
                })
                .collect()
        } else {
            BTreeMap::new()
        };
        Self { values, overlap, defined }
    }

    pub fn get(&self, mirror: &str) -> Result<Complex64, TsvfError> {
        if !self.defined {
            return Err(TsvfError::UndefinedWeakValue { overlap: self.overlap });
        }
        self.values
            .get(mirror)
            .copied()
            .ok_or_else(|| TsvfError::UnknownMirror(mirror.to_string()))
    }
}

fn is_defined(overlap: Complex64, scale: f64) -> bool {
    overlap.norm() > OVERLAP_EPSILON * scale
}

struct Propagator<'a> {
    net: &'a OpticalNetwork,
    detector: ElementId,
    arriving: HashMap<ConnectionId, Complex64>,
    remaining: HashMap<ConnectionId, Complex64>,
}

impl<'a> Propagator<'a> {
    /// Amplitude carried by connection `c` from the source.
    fn arriving(&mut self, c: ConnectionId) -> Complex64 {
        if let Some(v) = self.arriving.get(&c) {
            return *v;
        }
        let conn = self.net.connections()[c.0];
        let v = self.leaving(conn.from, conn.from_port);
        self.arriving.insert(c, v);
        v
    }

    /// Amplitude leaving element `id` through `port`, summed over inputs.
    fn leaving(&mut self, id: ElementId, port: OutPort) -> Complex64 {
        if matches!(self.net.element(id).kind, ElementKind::Source) {
            return Complex64::new(1.0, 0.0);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for c in self.net.incoming(id) {
            let in_port = self.net.connections()[c.0].to_port;
            total += self.arriving(c) * self.net.element_factor(id, in_port, port);
        }
        total
    }

    /// Amplitude picked up from entering connection `c`'s destination to the
    /// detector.
    fn remaining(&mut self, c: ConnectionId) -> Complex64 {
        if let Some(v) = self.remaining.get(&c) {
            return *v;
        }
        let conn = self.net.connections()[c.0];
        let v = if conn.to == self.detector {
            Complex64::new(1.0, 0.0)
        } else {
            let mut total = Complex64::new(0.0, 0.0);
            for next in self.net.outgoing(conn.to) {
                let out_port = self.net.connections()[next.0].from_port;
                total += self.net.element_factor(conn.to, conn.to_port, out_port) * self.remaining(next);
            }
            total
        };
        self.remaining.insert(c, v);
        v
    }
}

pub fn two_state_vector(network: &OpticalNetwork) -> Result<TwoStateVector, NetworkError> {
    // enumerate_paths rejects cycles and bad source/detector counts
    let paths = crate::network::enumerate_paths(network)?;
    let detector = network.detector()?;
    let mut prop = Propagator {
        net: network,
        detector,
        arriving: HashMap::new(),
        remaining: HashMap::new(),
    };
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for (i, e) in network.elements().iter().enumerate() {
        if !matches!(e.kind, ElementKind::Mirror { .. }) {
            continue;
        }
        let id = ElementId(i);
        forward.insert(e.label.clone(), prop.leaving(id, OutPort::Out));
        let back: Complex64 = network.outgoing(id).into_iter().map(|c| prop.remaining(c)).sum();
        backward.insert(e.label.clone(), back);
    }
    let overlap = paths.iter().map(|p| p.amplitude).sum();
    Ok(TwoStateVector { forward, backward, overlap })
}

/// Weak values of every mirror projector, computed from the two-state
/// vector. `defined` is false for (numerically) orthogonal postselection.
pub fn weak_values(network: &OpticalNetwork) -> Result<WeakValueReport, NetworkError> {
    let tsv = two_state_vector(network)?;
    let scale: f64 = crate::network::enumerate_paths(network)?
        .iter()
        .map(|p| p.amplitude.norm())
        .sum();
    let defined = is_defined(tsv.overlap, scale);
    let values = if defined {
        tsv.forward
            .iter()
            .map(|(m, f)| (m.clone(), f * tsv.backward[m] / tsv.overlap))
            .collect()
    } else {
        BTreeMap::new()
    };
    Ok(WeakValueReport { values, overlap: tsv.overlap, defined })
}

pub fn weak_value(network: &OpticalNetwork, mirror: &str) -> Result<Complex64, TsvfError> {
    if network.find(mirror).is_none() {
        return Err(TsvfError::UnknownMirror(mirror.to_string()));
    }
    weak_values(network)?.get(mirror)
}

/// Predicted modulation of the quad-cell signal at one mirror's frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakPrediction {
    pub frequency_hz: f64,
    /// Signed amplitude of the sinusoid at `frequency_hz`, in signal units.
    pub amplitude: f64,
    /// Mean-square power of that sinusoid, `amplitude² / 2`, which is the
    /// unsmoothed one-sided spectrum's value at the peak bin.
    pub power: f64,
}

/// First-order peak sizes: `gain · |overlap|² · Re(P_X)_w · δ_X`, where the
/// gain is the beam's linear quad-cell response.
pub fn predict_peak_amplitudes(
    paths: &[PathTerm],
    beam: &GaussianBeam,
    vibrations: &BTreeMap<String, VibrationSpec>,
) -> Result<BTreeMap<String, PeakPrediction>, TsvfError> {
    let report = WeakValueReport::from_paths(paths, vibrations.keys().map(String::as_str));
    if !report.defined {
        return Err(TsvfError::UndefinedWeakValue { overlap: report.overlap });
    }
    let intensity = report.overlap.norm_sqr();
    Ok(vibrations
        .iter()
        .map(|(m, vib)| {
            let amplitude = beam.first_order_gain() * intensity * report.values[m].re * vib.displacement_mm();
            let p = PeakPrediction {
                frequency_hz: vib.frequency_hz,
                amplitude,
                power: amplitude * amplitude / 2.0,
            };
            (m.clone(), p)
        })
        .collect())
}

/// Same as [`predict_peak_amplitudes`] with the path table taken from a
/// network.
pub fn predict_network_peaks(
    network: &OpticalNetwork,
    beam: &GaussianBeam,
    vibrations: &BTreeMap<String, VibrationSpec>,
) -> Result<BTreeMap<String, PeakPrediction>, TsvfError> {
    let paths: Vec<PathTerm> = crate::network::enumerate_paths(network)?.iter().map(|p| p.term()).collect();
    predict_peak_amplitudes(&paths, beam, vibrations)
}
