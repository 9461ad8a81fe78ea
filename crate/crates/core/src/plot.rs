//! Minimal standalone SVG line plot for spectra.

use std::fmt::Write as _;

use crate::spectrum::PowerSpectrum;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
/// Decades shown below the largest bin.
const DECADES: f64 = 12.0;

/// Log-power spectrum between `f_lo` and `f_hi` Hz as an SVG document.
pub fn spectrum_svg(spectrum: &PowerSpectrum, title: &str, f_lo: f64, f_hi: f64) -> String {
    let bins: Vec<(f64, f64)> = spectrum
        .powers
        .iter()
        .enumerate()
        .map(|(k, p)| (spectrum.frequency(k), *p))
        .filter(|(f, _)| *f >= f_lo && *f <= f_hi)
        .collect();
    let top = bins
        .iter()
        .map(|(_, p)| *p)
        .fold(f64::MIN_POSITIVE, f64::max)
        .log10()
        .ceil();
    let bottom = top - DECADES;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x = |f: f64| MARGIN_L + (f - f_lo) / (f_hi - f_lo).max(f64::EPSILON) * plot_w;
    let y = |p: f64| {
        let l = p.max(f64::MIN_POSITIVE).log10().clamp(bottom, top);
        MARGIN_T + (top - l) / (top - bottom) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for d in 0..=(DECADES as i32) {
        if d % 2 != 0 {
            continue;
        }
        let l = bottom + d as f64;
        let yy = y(10f64.powf(l));
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_L}" y1="{yy:.1}" x2="{}" y2="{yy:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">1e{l}</text>"##,
            MARGIN_L + plot_w,
            MARGIN_L - 6.0,
            yy + 4.0
        );
    }
    let ticks = 5;
    for i in 0..=ticks {
        let f = f_lo + (f_hi - f_lo) * i as f64 / ticks as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{f:.0}</text>"#,
            x(f),
            MARGIN_T + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">frequency (Hz)</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">power</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );
    let points: Vec<String> = bins.iter().map(|(f, p)| format!("{:.2},{:.2}", x(*f), y(*p))).collect();
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f5fbf" stroke-width="1.2" points="{}"/>"##,
        points.join(" ")
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
