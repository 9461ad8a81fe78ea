//! Test-only oracles, independent of the library's evaluation paths.
#![allow(dead_code, clippy::excessive_precision)]

use num_complex::Complex64;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth - 1) + rec(f, m, b, tol / 2.0, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

fn field(amp: f64, waist: f64, a: &[Complex64], d: &[f64], x: f64, y: f64) -> Complex64 {
    let mut psi = Complex64::new(0.0, 0.0);
    for (ap, dp) in a.iter().zip(d) {
        let r2 = x * x + (y - dp) * (y - dp);
        psi += ap * (-r2 / (2.0 * waist * waist)).exp();
    }
    psi * amp
}

/// `∫∫ sign(y) |Ψ(x, y)|²` by nested 2-D quadrature, with the upper and
/// lower half-planes folded pointwise. Lengths in one consistent unit.
pub fn quad_signal(amp: f64, waist: f64, a: &[Complex64], d: &[f64]) -> f64 {
    let xmax = 12.0 * waist;
    let ymax = d.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 12.0 * waist;
    let scale = amp * amp * waist * waist;
    let mut outer = |x: f64| {
        let mut inner = |y: f64| field(amp, waist, a, d, x, y).norm_sqr() - field(amp, waist, a, d, x, -y).norm_sqr();
        integrate(&mut inner, 0.0, ymax, 1e-15 * scale)
    };
    integrate(&mut outer, -xmax, xmax, 1e-14 * scale)
}

/// `∫∫ |Ψ(x, y)|²` by nested 2-D quadrature.
pub fn quad_power(amp: f64, waist: f64, a: &[Complex64], d: &[f64]) -> f64 {
    let xmax = 12.0 * waist;
    let ymax = d.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 12.0 * waist;
    let scale = amp * amp * waist * waist;
    let mut outer = |x: f64| {
        let mut inner = |y: f64| field(amp, waist, a, d, x, y).norm_sqr();
        integrate(&mut inner, -ymax, ymax, 1e-15 * scale)
    };
    integrate(&mut outer, -xmax, xmax, 1e-14 * scale)
}

/// Direct O(N²) DFT, `X_k = Σ s_n exp(-2πikn/N)`.
pub fn dft(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let phase = -2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                    Complex64::from_polar(*s, phase)
                })
                .sum()
        })
        .collect()
}

pub fn mean_square(samples: &[f64]) -> f64 {
    samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64
}

/// Every subset of `mirrors` such that each path crosses exactly one member.
pub fn cuts(paths: &[mzi_past::PathTerm], mirrors: &[String]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << mirrors.len()) {
        let set: Vec<String> = (0..mirrors.len()).filter(|i| mask & (1 << i) != 0).map(|i| mirrors[i].clone()).collect();
        if paths.iter().all(|p| p.mirrors.iter().filter(|m| set.contains(m)).count() == 1) {
            out.push(set);
        }
    }
    out
}
