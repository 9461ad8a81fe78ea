//! Browser bindings for the nested-interferometer demo page.
//!
//! The plain functions hold the logic and are tested natively; the
//! `#[wasm_bindgen]` exports only convert errors.

use mzi_past::network::enumerate_paths;
use mzi_past::run::{run, RunOptions};
use mzi_past::scenario::{builtin, setups, BUILTIN_NAMES};
use mzi_past::Scenario;
use wasm_bindgen::prelude::*;

/// Mirror order used by every flat array returned here.
pub const MIRRORS: [&str; 5] = ["A", "B", "C", "E", "F"];

/// The nested interferometer with mirror B's static phase set to `phase_b`
/// and mirror B vibrating by `displacement_b_um`.
pub fn nested_scenario(phase_b: f64, displacement_b_um: f64) -> Result<Scenario, String> {
    let mut s = builtin("fig2b").expect("fig2b is built in").named("nested");
    s.paths = enumerate_paths(&setups::nested(phase_b))
        .map_err(|e| e.to_string())?
        .iter()
        .map(|p| p.term())
        .collect();
    s.mirrors.get_mut("B").expect("mirror B").vibration.displacement_um = displacement_b_um;
    s.validate().map_err(|e| e.to_string())?;
    Ok(s)
}

/// `[re, im]` per mirror in [`MIRRORS`] order, then the overlap. Empty when
/// the weak values are undefined.
pub fn weak_values_flat(s: &Scenario) -> Vec<f64> {
    let report = s.weak_values();
    if !report.defined {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(2 * MIRRORS.len() + 2);
    for m in MIRRORS {
        let w = report.values.get(m).copied().unwrap_or_default();
        out.extend([w.re, w.im]);
    }
    out.extend([report.overlap.re, report.overlap.im]);
    out
}

/// Smoothed spectrum bins between `f_lo` and `f_hi` as `[f0, p0, f1, p1, ...]`.
pub fn spectrum_flat(s: &Scenario, window: usize, f_lo: f64, f_hi: f64) -> Result<Vec<f64>, String> {
    let art = run(s, &RunOptions { window, ..Default::default() }).map_err(|e| e.to_string())?;
    let spec = &art.spectrum;
    Ok((0..spec.powers.len())
        .map(|k| (spec.frequency(k), spec.powers[k]))
        .filter(|(f, _)| *f >= f_lo && *f <= f_hi)
        .flat_map(|(f, p)| [f, p])
        .collect())
}

fn lookup(name: &str) -> Result<Scenario, String> {
    builtin(name).ok_or_else(|| format!("unknown scenario `{name}`"))
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
pub fn scenario_names() -> String {
    BUILTIN_NAMES.join(",")
}

#[wasm_bindgen]
pub fn builtin_weak_values(name: &str) -> Result<Vec<f64>, JsError> {
    lookup(name).map(|s| weak_values_flat(&s)).map_err(js)
}

#[wasm_bindgen]
pub fn builtin_spectrum(name: &str, window: usize, f_lo: f64, f_hi: f64) -> Result<Vec<f64>, JsError> {
    lookup(name).and_then(|s| spectrum_flat(&s, window, f_lo, f_hi)).map_err(js)
}

#[wasm_bindgen]
pub fn nested_weak_values(phase_b: f64) -> Result<Vec<f64>, JsError> {
    nested_scenario(phase_b, mzi_past::beam::DEFAULT_DISPLACEMENT_UM)
        .map(|s| weak_values_flat(&s))
        .map_err(js)
}

#[wasm_bindgen]
pub fn nested_spectrum(phase_b: f64, displacement_b_um: f64, window: usize, f_lo: f64, f_hi: f64) -> Result<Vec<f64>, JsError> {
    nested_scenario(phase_b, displacement_b_um)
        .and_then(|s| spectrum_flat(&s, window, f_lo, f_hi))
        .map_err(js)
}
