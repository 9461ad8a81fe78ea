//! Named experimental setups: path table, beam, mirror vibrations and
//! sampling.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::beam::{
    self, BeamError, DetectorTimeSeries, GaussianBeam, SamplingSpec, VibrationSpec, DEFAULT_DISPLACEMENT_UM,
};
use crate::error::ScenarioError;
use crate::network::{self, InPort, NetworkBuilder, OpticalNetwork, OutPort, PathTerm};
use crate::tsvf::{self, PeakPrediction, TsvfError, WeakValueReport};

pub const F_A: f64 = 282.0;
pub const F_B: f64 = 296.0;
pub const F_C: f64 = 307.0;
pub const F_E: f64 = 318.0;
pub const F_F: f64 = 332.0;

pub const BUILTIN_NAMES: [&str; 6] = ["fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fblocked"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSettings {
    pub vibration: VibrationSpec,
    /// Extra phase applied to every path that bounces off this mirror.
    pub static_phase: f64,
}

impl MirrorSettings {
    pub fn vibrating(frequency_hz: f64) -> Self {
        Self { vibration: VibrationSpec::new(frequency_hz, DEFAULT_DISPLACEMENT_UM), static_phase: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub beam: GaussianBeam,
    /// Input power attenuation; path amplitudes are scaled by its square root.
    pub attenuation: f64,
    pub sampling: SamplingSpec,
    pub mirrors: BTreeMap<String, MirrorSettings>,
    /// Path amplitudes before attenuation and mirror static phases.
    pub paths: Vec<PathTerm>,
}

impl Scenario {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Amplitudes reaching the detector: `sqrt(attenuation) · a_p · Π exp(iφ_X)`.
    pub fn effective_paths(&self) -> Vec<PathTerm> {
        let scale = self.attenuation.sqrt();
        self.paths
            .iter()
            .map(|p| {
                let phase: f64 = p
                    .mirrors
                    .iter()
                    .filter_map(|m| self.mirrors.get(m))
                    .map(|s| s.static_phase)
                    .sum();
                let rot = if phase == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::from_polar(1.0, phase) };
                PathTerm { amplitude: p.amplitude * scale * rot, mirrors: p.mirrors.clone() }
            })
            .collect()
    }

    pub fn vibrations(&self) -> BTreeMap<String, VibrationSpec> {
        self.mirrors.iter().map(|(m, s)| (m.clone(), s.vibration)).collect()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let semantic = |e: BeamError| ScenarioError::semantic(None, e.to_string());
        self.beam.check().map_err(semantic)?;
        self.sampling.sample_count().map_err(semantic)?;
        if !(self.attenuation > 0.0 && self.attenuation <= 1.0) {
            return Err(ScenarioError::semantic(
                None,
                format!("attenuation must be in (0, 1], got {}", self.attenuation),
            ));
        }
        for (id, s) in &self.mirrors {
            s.vibration
                .check()
                .map_err(|e| ScenarioError::semantic(None, format!("mirror {id}: {e}")))?;
            if !s.static_phase.is_finite() {
                return Err(ScenarioError::semantic(None, format!("mirror {id}: static_phase_rad must be finite")));
            }
        }
        for (i, p) in self.paths.iter().enumerate() {
            if !(p.amplitude.re.is_finite() && p.amplitude.im.is_finite()) || p.amplitude.norm() > 1.0 + 1e-12 {
                return Err(ScenarioError::semantic(
                    None,
                    format!("path {}: amplitude magnitude must be at most 1", i + 1),
                ));
            }
            for (k, m) in p.mirrors.iter().enumerate() {
                if !self.mirrors.contains_key(m) {
                    return Err(ScenarioError::semantic(None, format!("path {}: unknown mirror `{m}`", i + 1)));
                }
                if p.mirrors[..k].contains(m) {
                    return Err(ScenarioError::semantic(
                        None,
                        format!("path {}: mirror `{m}` appears twice", i + 1),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Non-fatal remarks, such as vibrations too large for the weak regime.
    pub fn warnings(&self) -> Vec<String> {
        let nyquist = self.sampling.rate_hz / 2.0;
        let mut out = Vec::new();
        for (id, s) in &self.mirrors {
            if s.vibration.beyond_weak_regime(&self.beam) {
                out.push(format!("mirror {id}: displacement/waist above {}", beam::WEAK_REGIME_LIMIT));
            }
            if s.vibration.frequency_hz > nyquist {
                out.push(format!("mirror {id}: frequency above Nyquist ({nyquist} Hz)"));
            }
            if !self.paths.iter().any(|p| p.passes(id)) {
                out.push(format!("mirror {id}: on no path"));
            }
        }
        out
    }

    pub fn weak_values(&self) -> WeakValueReport {
        WeakValueReport::from_paths(&self.effective_paths(), self.mirrors.keys().map(String::as_str))
    }

    pub fn predicted_peaks(&self) -> Result<BTreeMap<String, PeakPrediction>, TsvfError> {
        tsvf::predict_peak_amplitudes(&self.effective_paths(), &self.beam, &self.vibrations())
    }

    /// Power of the signal from one full-intensity beam (weak value 1,
    /// detected intensity `𝒜²`) displaced by the largest mirror amplitude.
    /// Run reports measure peaks against this.
    pub fn reference_peak_power(&self) -> f64 {
        let delta = self
            .mirrors
            .values()
            .map(|s| s.vibration.displacement_mm())
            .fold(0.0, f64::max);
        let amp = self.beam.first_order_gain() * delta;
        amp * amp / 2.0
    }
}

pub fn simulate(scenario: &Scenario, sampling: SamplingSpec) -> Result<DetectorTimeSeries, ScenarioError> {
    scenario.validate()?;
    beam::simulate_paths(&scenario.effective_paths(), &scenario.beam, &scenario.vibrations(), sampling)
        .map_err(|e| ScenarioError::semantic(None, e.to_string()))
}

/// Interferometer topologies behind the built-in scenarios.
pub mod setups {
    use super::*;

    /// Two 50/50 splitters around mirrors A (transmitted arm) and B. Static
    /// phases of -π/2 on both mirrors make the two detector paths equal and
    /// real.
    pub fn fig1a() -> OpticalNetwork {
        let mut b = NetworkBuilder::new();
        let s = b.source("source");
        let bs1 = b.splitter("BS1", 0.5);
        let a = b.mirror("A", -FRAC_PI_2);
        let m_b = b.mirror("B", -FRAC_PI_2);
        let bs2 = b.splitter("BS2", 0.5);
        let d = b.detector("D");
        b.connect(s, OutPort::Out, bs1, InPort::A);
        b.connect(bs1, OutPort::T, a, InPort::In);
        b.connect(bs1, OutPort::R, m_b, InPort::In);
        b.connect(a, OutPort::Out, bs2, InPort::A);
        b.connect(m_b, OutPort::Out, bs2, InPort::B);
        b.connect(bs2, OutPort::R, d, InPort::In);
        b.build()
    }

    /// Second splitter removed: B's beam goes straight to the detector and
    /// A's beam leaves the setup.
    pub fn fig1b() -> OpticalNetwork {
        let mut b = NetworkBuilder::new();
        let s = b.source("source");
        let bs1 = b.splitter("BS1", 0.5);
        let a = b.mirror("A", 0.0);
        let m_b = b.mirror("B", 0.0);
        let d = b.detector("D");
        b.connect(s, OutPort::Out, bs1, InPort::A);
        b.connect(bs1, OutPort::T, a, InPort::In);
        b.connect(bs1, OutPort::R, m_b, InPort::In);
        b.link(m_b, d);
        b.build()
    }

    /// Nested interferometer. BS1 sends 1/3 of the power to C and 2/3 to E;
    /// the inner pair BS2/BS3 surrounds A and B; BS4 merges F and C towards
    /// the detector. `phase_b` is the tuning phase on mirror B: 0 gives
    /// destructive interference towards F, π constructive.
    pub fn nested(phase_b: f64) -> OpticalNetwork {
        let mut b = NetworkBuilder::new();
        let s = b.source("source");
        let bs1 = b.splitter("BS1", 2.0 / 3.0);
        let c = b.mirror("C", 0.0);
        let e = b.mirror("E", -FRAC_PI_2);
        let bs2 = b.splitter("BS2", 0.5);
        let a = b.mirror("A", 0.0);
        let m_b = b.mirror("B", phase_b);
        let bs3 = b.splitter("BS3", 0.5);
        let f = b.mirror("F", -FRAC_PI_2);
        let bs4 = b.splitter("BS4", 2.0 / 3.0);
        let d = b.detector("D");
        b.connect(s, OutPort::Out, bs1, InPort::A);
        b.connect(bs1, OutPort::T, c, InPort::In);
        b.connect(bs1, OutPort::R, e, InPort::In);
        b.connect(e, OutPort::Out, bs2, InPort::A);
        b.connect(bs2, OutPort::T, a, InPort::In);
        b.connect(bs2, OutPort::R, m_b, InPort::In);
        b.connect(a, OutPort::Out, bs3, InPort::A);
        b.connect(m_b, OutPort::Out, bs3, InPort::B);
        b.connect(bs3, OutPort::T, f, InPort::In);
        b.connect(f, OutPort::Out, bs4, InPort::A);
        b.connect(c, OutPort::Out, bs4, InPort::B);
        b.connect(bs4, OutPort::R, d, InPort::In);
        b.build()
    }

    pub fn fig2a() -> OpticalNetwork {
        nested(PI)
    }

    pub fn fig2b() -> OpticalNetwork {
        nested(0.0)
    }

    /// Lower arm blocked between C and the last splitter.
    pub fn fig2c() -> OpticalNetwork {
        let net = fig2b();
        let edge = net.connection_from("C", OutPort::Out).expect("C output");
        network::apply_block(&net, edge).expect("edge exists")
    }

    /// Block between F and the last splitter.
    pub fn fblocked() -> OpticalNetwork {
        let net = fig2b();
        let edge = net.connection_from("F", OutPort::Out).expect("F output");
        network::apply_block(&net, edge).expect("edge exists")
    }

    pub fn by_name(name: &str) -> Option<OpticalNetwork> {
        Some(match name {
            "fig1a" => fig1a(),
            "fig1b" => fig1b(),
            "fig2a" => fig2a(),
            "fig2b" => fig2b(),
            "fig2c" => fig2c(),
            "fblocked" => fblocked(),
            _ => return None,
        })
    }
}

fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn scenario(name: &str, mirrors: &[(&str, f64)], paths: Vec<PathTerm>, attenuation: f64) -> Scenario {
    Scenario {
        name: name.to_string(),
        beam: GaussianBeam::default(),
        attenuation,
        sampling: SamplingSpec::default(),
        mirrors: mirrors
            .iter()
            .map(|(m, f)| (m.to_string(), MirrorSettings::vibrating(*f)))
            .collect(),
        paths,
    }
}

fn nested_paths(sign_b: f64) -> Vec<PathTerm> {
    let third = 1.0 / 3.0;
    vec![
        PathTerm::new(real(third), &["C"]),
        PathTerm::new(real(third), &["E", "A", "F"]),
        PathTerm::new(real(sign_b * third), &["E", "B", "F"]),
    ]
}

const NESTED_MIRRORS: [(&str, f64); 5] = [("A", F_A), ("B", F_B), ("C", F_C), ("E", F_E), ("F", F_F)];

pub fn builtin(name: &str) -> Option<Scenario> {
    let third = 1.0 / 3.0;
    let s = match name {
        "fig1a" => scenario(
            name,
            &[("A", F_A), ("B", F_B)],
            vec![PathTerm::new(real(0.5), &["A"]), PathTerm::new(real(0.5), &["B"])],
            1.0,
        ),
        "fig1b" => scenario(
            name,
            &[("A", F_A), ("B", F_B)],
            vec![PathTerm::new(Complex64::new(0.0, FRAC_1_SQRT_2), &["B"])],
            1.0,
        ),
        "fig2a" => scenario(name, &NESTED_MIRRORS, nested_paths(1.0), third),
        "fig2b" => scenario(name, &NESTED_MIRRORS, nested_paths(-1.0), 1.0),
        "fig2c" => scenario(
            name,
            &NESTED_MIRRORS,
            vec![
                PathTerm::new(real(third), &["E", "A", "F"]),
                PathTerm::new(real(-third), &["E", "B", "F"]),
            ],
            1.0,
        ),
        "fblocked" => scenario(name, &NESTED_MIRRORS, vec![PathTerm::new(real(third), &["C"])], 1.0),
        _ => return None,
    };
    Some(s)
}

pub fn builtin_scenarios() -> BTreeMap<String, Scenario> {
    BUILTIN_NAMES
        .iter()
        .map(|n| (n.to_string(), builtin(n).expect("listed builtin")))
        .collect()
}
