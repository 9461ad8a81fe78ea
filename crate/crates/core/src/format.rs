//! Text formats: the sectioned scenario file, and the time-series,
//! spectrum and weak-value outputs.
//!
//! ```text
//! # comment
//! [beam]
//! waist_mm = 1.2
//! amplitude = 1
//! attenuation = 1
//!
//! [sampling]
//! rate_hz = 2500
//! duration_s = 1
//!
//! [mirror A]
//! freq_hz = 282
//! displacement_um = 0.6
//! vib_phase_rad = 0
//! static_phase_rad = 0
//!
//! [paths]
//! 0.5 0 : A          # real imag : mirrors in order
//! ```
//!
//! Numbers are written with 17 significant digits so every `f64` survives a
//! write/read cycle unchanged.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::beam::{DetectorTimeSeries, GaussianBeam, SamplingSpec, VibrationSpec, DEFAULT_DISPLACEMENT_UM};
use crate::error::ScenarioError;
use crate::network::PathTerm;
use crate::scenario::{MirrorSettings, Scenario};
use crate::spectrum::PowerSpectrum;
use crate::tsvf::WeakValueReport;

/// Round-trip-exact rendering of a float.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Beam,
    Sampling,
    Mirror,
    Paths,
}

#[derive(Default)]
struct MirrorDraft {
    line: usize,
    freq: Option<f64>,
    displacement: Option<f64>,
    vib_phase: Option<f64>,
    static_phase: Option<f64>,
}

fn is_id_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Column (1-based) of byte offset `at` in `raw`.
fn col(raw: &str, at: usize) -> usize {
    raw[..at].chars().count() + 1
}

fn parse_number(tok: &str, line: usize, column: usize) -> Result<f64, ScenarioError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ScenarioError::syntax(line, column, format!("a finite number, found `{tok}`"))),
    }
}

/// Split `s` on whitespace, keeping each token's byte offset.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(st)) => {
                out.push((st, &s[st..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

fn set_once(slot: &mut Option<f64>, value: f64, key: &str, line: usize) -> Result<(), ScenarioError> {
    if slot.replace(value).is_some() {
        return Err(ScenarioError::semantic(Some(line), format!("duplicate key `{key}`")));
    }
    Ok(())
}

fn require(ok: bool, line: usize, key: &str, requirement: &str, value: f64) -> Result<(), ScenarioError> {
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::semantic(Some(line), format!("`{key}` must be {requirement}, got {value}")))
    }
}

/// Parse a scenario file. The result is named `unnamed`; callers usually
/// rename it after the file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut section: Option<Section> = None;
    let mut seen_sections: BTreeSet<String> = BTreeSet::new();
    let mut current_mirror = String::new();

    let (mut waist, mut amplitude, mut attenuation) = (None, None, None);
    let (mut rate, mut duration) = (None, None);
    let mut mirrors: BTreeMap<String, MirrorDraft> = BTreeMap::new();
    let mut paths: Vec<(usize, PathTerm)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let lead = content.len() - content.trim_start().len();
        let body = content.trim();
        if body.is_empty() {
            continue;
        }

        if body.starts_with('[') {
            let Some(close) = body.find(']') else {
                return Err(ScenarioError::syntax(line, col(raw, lead + body.len()), "`]`"));
            };
            if !body[close + 1..].trim().is_empty() {
                return Err(ScenarioError::syntax(line, col(raw, lead + close + 1), "end of line after `]`"));
            }
            let inner = body[1..close].trim();
            let words: Vec<&str> = inner.split_whitespace().collect();
            let (kind, key) = match words.as_slice() {
                ["beam"] => (Section::Beam, "beam".to_string()),
                ["sampling"] => (Section::Sampling, "sampling".to_string()),
                ["paths"] => (Section::Paths, "paths".to_string()),
                ["mirror", id] if id.chars().all(is_id_char) => {
                    current_mirror = id.to_string();
                    mirrors.insert(id.to_string(), MirrorDraft { line, ..Default::default() });
                    (Section::Mirror, format!("mirror {id}"))
                }
                ["mirror", ..] => {
                    return Err(ScenarioError::syntax(line, col(raw, lead + 1), "`mirror <ID>` with ID of [A-Za-z0-9_-]"))
                }
                _ => {
                    return Err(ScenarioError::syntax(
                        line,
                        col(raw, lead + 1),
                        "section `beam`, `sampling`, `mirror <ID>` or `paths`",
                    ))
                }
            };
            if !seen_sections.insert(key.clone()) {
                return Err(ScenarioError::semantic(Some(line), format!("duplicate section [{key}]")));
            }
            section = Some(kind);
            continue;
        }

        let Some(sec) = section else {
            return Err(ScenarioError::syntax(line, col(raw, lead), "a section header"));
        };

        if sec == Section::Paths {
            let toks = tokens(content);
            if toks.len() < 3 {
                return Err(ScenarioError::syntax(line, col(raw, content.len()), "`RE IM : MIRRORS...`"));
            }
            let re = parse_number(toks[0].1, line, col(raw, toks[0].0))?;
            let im = parse_number(toks[1].1, line, col(raw, toks[1].0))?;
            if toks[2].1 != ":" {
                return Err(ScenarioError::syntax(line, col(raw, toks[2].0), "`:`"));
            }
            let mut ids = Vec::new();
            for (at, t) in &toks[3..] {
                if !t.chars().all(is_id_char) {
                    return Err(ScenarioError::syntax(line, col(raw, *at), "a mirror id"));
                }
                ids.push(t.to_string());
            }
            paths.push((line, PathTerm { amplitude: Complex64::new(re, im), mirrors: ids }));
            continue;
        }

        let Some(eq) = content.find('=') else {
            return Err(ScenarioError::syntax(line, col(raw, content.len()), "`=`"));
        };
        let key = content[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ScenarioError::syntax(line, col(raw, lead), "a key name"));
        }
        let value_str = content[eq + 1..].trim();
        let value_at = eq + 1 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        let value = parse_number(value_str, line, col(raw, value_at))?;

        match (sec, key) {
            (Section::Beam, "waist_mm") => {
                require(value > 0.0, line, key, "positive", value)?;
                set_once(&mut waist, value, key, line)?;
            }
            (Section::Beam, "amplitude") => set_once(&mut amplitude, value, key, line)?,
            (Section::Beam, "attenuation") => {
                require(value > 0.0 && value <= 1.0, line, key, "in (0, 1]", value)?;
                set_once(&mut attenuation, value, key, line)?;
            }
            (Section::Sampling, "rate_hz") => {
                require(value > 0.0, line, key, "positive", value)?;
                set_once(&mut rate, value, key, line)?;
            }
            (Section::Sampling, "duration_s") => {
                require(value > 0.0, line, key, "positive", value)?;
                set_once(&mut duration, value, key, line)?;
            }
            (Section::Mirror, _) => {
                let m = mirrors.get_mut(&current_mirror).expect("current mirror registered");
                match key {
                    "freq_hz" => {
                        require(value > 0.0, line, key, "positive", value)?;
                        set_once(&mut m.freq, value, key, line)?;
                    }
                    "displacement_um" => {
                        require(value >= 0.0, line, key, "non-negative", value)?;
                        set_once(&mut m.displacement, value, key, line)?;
                    }
                    "vib_phase_rad" => set_once(&mut m.vib_phase, value, key, line)?,
                    "static_phase_rad" => set_once(&mut m.static_phase, value, key, line)?,
                    _ => {
                        return Err(ScenarioError::semantic(Some(line), format!("unknown key `{key}` in [mirror]")))
                    }
                }
            }
            (Section::Beam, _) => {
                return Err(ScenarioError::semantic(Some(line), format!("unknown key `{key}` in [beam]")))
            }
            (Section::Sampling, _) => {
                return Err(ScenarioError::semantic(Some(line), format!("unknown key `{key}` in [sampling]")))
            }
            (Section::Paths, _) => unreachable!(),
        }
    }

    let mut settings = BTreeMap::new();
    for (id, d) in mirrors {
        let Some(freq) = d.freq else {
            return Err(ScenarioError::semantic(Some(d.line), format!("mirror {id}: missing `freq_hz`")));
        };
        settings.insert(
            id,
            MirrorSettings {
                vibration: VibrationSpec {
                    frequency_hz: freq,
                    displacement_um: d.displacement.unwrap_or(DEFAULT_DISPLACEMENT_UM),
                    phase_rad: d.vib_phase.unwrap_or(0.0),
                },
                static_phase: d.static_phase.unwrap_or(0.0),
            },
        );
    }
    for (line, p) in &paths {
        if let Some(m) = p.mirrors.iter().find(|m| !settings.contains_key(*m)) {
            return Err(ScenarioError::semantic(Some(*line), format!("unknown mirror `{m}`")));
        }
    }

    let defaults = SamplingSpec::default();
    let beam_defaults = GaussianBeam::default();
    let scenario = Scenario {
        name: "unnamed".to_string(),
        beam: GaussianBeam {
            amplitude: amplitude.unwrap_or(beam_defaults.amplitude),
            waist_mm: waist.unwrap_or(beam_defaults.waist_mm),
        },
        attenuation: attenuation.unwrap_or(1.0),
        sampling: SamplingSpec {
            rate_hz: rate.unwrap_or(defaults.rate_hz),
            duration_s: duration.unwrap_or(defaults.duration_s),
        },
        mirrors: settings,
        paths: paths.into_iter().map(|(_, p)| p).collect(),
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# scenario {}", s.name);
    let _ = writeln!(out, "[beam]");
    let _ = writeln!(out, "waist_mm = {}", num(s.beam.waist_mm));
    let _ = writeln!(out, "amplitude = {}", num(s.beam.amplitude));
    let _ = writeln!(out, "attenuation = {}", num(s.attenuation));
    let _ = writeln!(out, "\n[sampling]");
    let _ = writeln!(out, "rate_hz = {}", num(s.sampling.rate_hz));
    let _ = writeln!(out, "duration_s = {}", num(s.sampling.duration_s));
    for (id, m) in &s.mirrors {
        let _ = writeln!(out, "\n[mirror {id}]");
        let _ = writeln!(out, "freq_hz = {}", num(m.vibration.frequency_hz));
        let _ = writeln!(out, "displacement_um = {}", num(m.vibration.displacement_um));
        let _ = writeln!(out, "vib_phase_rad = {}", num(m.vibration.phase_rad));
        let _ = writeln!(out, "static_phase_rad = {}", num(m.static_phase));
    }
    let _ = writeln!(out, "\n[paths]");
    for p in &s.paths {
        let _ = write!(out, "{} {} :", num(p.amplitude.re), num(p.amplitude.im));
        for m in &p.mirrors {
            let _ = write!(out, " {m}");
        }
        out.push('\n');
    }
    out
}

pub fn write_series_csv(series: &DetectorTimeSeries) -> String {
    let mut out = String::from("t_s,signal\n");
    for (t, s) in series.times().zip(&series.samples) {
        let _ = writeln!(out, "{},{}", num(t), num(*s));
    }
    out
}

pub fn write_spectrum_csv(spectrum: &PowerSpectrum) -> String {
    let mut out = String::from("freq_hz,power\n");
    for (k, p) in spectrum.powers.iter().enumerate() {
        let _ = writeln!(out, "{},{}", num(spectrum.frequency(k)), num(*p));
    }
    out
}

/// Read a two-column CSV written by [`write_series_csv`] or
/// [`write_spectrum_csv`], checking the header.
pub fn read_two_column_csv(text: &str, header: &str) -> Result<Vec<(f64, f64)>, ScenarioError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => return Err(ScenarioError::syntax(1, 1, format!("header `{header}`"))),
    }
    let mut rows = Vec::new();
    for (idx, l) in lines {
        let line = idx + 1;
        if l.trim().is_empty() {
            continue;
        }
        let Some((a, b)) = l.split_once(',') else {
            return Err(ScenarioError::syntax(line, l.len() + 1, "`,`"));
        };
        let x = parse_number(a.trim(), line, 1)?;
        let y = parse_number(b.trim(), line, a.len() + 2)?;
        rows.push((x, y));
    }
    Ok(rows)
}

pub fn write_weak_report(report: &WeakValueReport) -> String {
    let mut out = String::new();
    for (m, w) in &report.values {
        let _ = writeln!(out, "{m} {} {}", num(w.re), num(w.im));
    }
    let _ = writeln!(out, "overlap {} {}", num(report.overlap.re), num(report.overlap.im));
    let _ = writeln!(out, "defined {}", report.defined);
    out
}

pub fn read_weak_report(text: &str) -> Result<WeakValueReport, ScenarioError> {
    let mut values = BTreeMap::new();
    let mut overlap = None;
    let mut defined = None;
    for (idx, l) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(l);
        match toks.as_slice() {
            [] => continue,
            [(_, "defined"), (at, v)] => {
                defined = Some(match *v {
                    "true" => true,
                    "false" => false,
                    _ => return Err(ScenarioError::syntax(line, at + 1, "`true` or `false`")),
                })
            }
            [(_, name), (a, re), (b, im)] => {
                let z = Complex64::new(parse_number(re, line, a + 1)?, parse_number(im, line, b + 1)?);
                if *name == "overlap" {
                    overlap = Some(z);
                } else {
                    values.insert(name.to_string(), z);
                }
            }
            _ => return Err(ScenarioError::syntax(line, 1, "`NAME RE IM` or `defined BOOL`")),
        }
    }
    let overlap = overlap.ok_or_else(|| ScenarioError::semantic(None, "missing `overlap` line"))?;
    let defined = defined.ok_or_else(|| ScenarioError::semantic(None, "missing `defined` line"))?;
    Ok(WeakValueReport { values, overlap, defined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin;

    #[test]
    fn builtin_round_trip() {
        for name in crate::scenario::BUILTIN_NAMES {
            let s = builtin(name).unwrap();
            let text = serialize_scenario(&s);
            let back = parse_scenario(&text).unwrap().named(name);
            assert_eq!(back, s, "{name}");
            assert_eq!(serialize_scenario(&back), text);
        }
    }

    #[test]
    fn defaults_and_comments() {
        let text = "# minimal\n[mirror A]  # the only one\nfreq_hz = 282\n\n[paths]\n1 0 : A\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.beam, GaussianBeam::default());
        assert_eq!(s.sampling, SamplingSpec::default());
        assert_eq!(s.mirrors["A"].vibration.displacement_um, DEFAULT_DISPLACEMENT_UM);
        assert_eq!(s.paths.len(), 1);
    }

    #[test]
    fn negative_frequency_names_field() {
        let text = "[mirror A]\nfreq_hz = -3\n[paths]\n1 0 : A\n";
        match parse_scenario(text) {
            Err(ScenarioError::Semantic { line: Some(2), message }) => assert!(message.contains("freq_hz")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_mirror_section() {
        let text = "[mirror A]\nfreq_hz = 282\n[mirror A]\nfreq_hz = 296\n";
        assert!(matches!(parse_scenario(text), Err(ScenarioError::Semantic { line: Some(3), .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(
            parse_scenario("[beam]\nwaist_mm 1.2\n"),
            Err(ScenarioError::syntax(2, 13, "`=`"))
        );
        assert!(matches!(
            parse_scenario("[beam]\nwaist_mm = abc\n"),
            Err(ScenarioError::Syntax { line: 2, column: 12, .. })
        ));
        assert!(matches!(parse_scenario("[beam\n"), Err(ScenarioError::Syntax { line: 1, .. })));
        assert!(matches!(parse_scenario("[optics]\n"), Err(ScenarioError::Syntax { line: 1, column: 2, .. })));
        assert!(matches!(parse_scenario("waist_mm = 1\n"), Err(ScenarioError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_scenario("[mirror A]\nfreq_hz = 1\n[paths]\n1 0 A\n"),
            Err(ScenarioError::Syntax { line: 4, column: 5, .. })
        ));
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(
            parse_scenario("[beam]\ncolour = 3\n"),
            Err(ScenarioError::Semantic { line: Some(2), .. })
        ));
        assert!(matches!(
            parse_scenario("[mirror A]\nfreq_hz = 1\n[paths]\n1 0 : A B\n"),
            Err(ScenarioError::Semantic { line: Some(4), .. })
        ));
        assert!(matches!(
            parse_scenario("[mirror A]\ndisplacement_um = 1\n"),
            Err(ScenarioError::Semantic { line: Some(1), .. })
        ));
        assert!(matches!(
            parse_scenario("[beam]\nwaist_mm = 1\nwaist_mm = 2\n"),
            Err(ScenarioError::Semantic { line: Some(3), .. })
        ));
        assert!(matches!(
            parse_scenario("[sampling]\nrate_hz = 10\nduration_s = 0.15\n"),
            Err(ScenarioError::Semantic { line: None, .. })
        ));
    }

    #[test]
    fn output_files_round_trip() {
        let series = DetectorTimeSeries {
            sampling: SamplingSpec { rate_hz: 8.0, duration_s: 0.5 },
            samples: vec![0.1, -2.5e-9, 1.0 / 3.0, 0.0],
        };
        let rows = read_two_column_csv(&write_series_csv(&series), "t_s,signal").unwrap();
        assert_eq!(rows.iter().map(|r| r.1).collect::<Vec<_>>(), series.samples);
        assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), series.times().collect::<Vec<_>>());
        assert!(read_two_column_csv("freq_hz,power\n", "t_s,signal").is_err());

        let w = builtin("fig2b").unwrap().weak_values();
        assert_eq!(read_weak_report(&write_weak_report(&w)).unwrap(), w);
        let undefined = builtin("fig2c").unwrap().weak_values();
        let text = write_weak_report(&undefined);
        assert!(text.ends_with("defined false\n"));
        assert_eq!(read_weak_report(&text).unwrap(), undefined);
    }
}
