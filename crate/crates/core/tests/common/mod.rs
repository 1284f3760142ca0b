//! Fixed-rule quadrature and waveform helpers for the oracle tests. Kept
//! separate from the library's adaptive integrator on purpose.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Quadrature nodes on [a, b]: panels no wider than `width`, split at every
/// break inside the interval, `order` Gauss points per panel.
pub fn panel_nodes(a: f64, b: f64, breaks: &[f64], width: f64, order: usize) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(order);
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|c| *c > a && *c < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut out = Vec::new();
    for seg in cuts.windows(2) {
        let m = ((seg[1] - seg[0]) / width).ceil().max(1.0) as usize;
        let h = (seg[1] - seg[0]) / m as f64;
        for j in 0..m {
            let lo = seg[0] + h * j as f64;
            for (x, w) in gx.iter().zip(&gw) {
                out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
    }
    out
}

/// Root-raised-cosine amplitude spectrum at T = 1.
pub fn rrc_amplitude(beta: f64, f: f64) -> f64 {
    let f = f.abs();
    let lo = (1.0 - beta) / 2.0;
    let hi = (1.0 + beta) / 2.0;
    if f <= lo {
        1.0
    } else if f >= hi {
        0.0
    } else {
        (PI / (2.0 * beta) * (f - lo)).cos()
    }
}

/// Raised-cosine pulse at T = 1: the autocorrelation of the RRC pulse.
pub fn raised_cosine(beta: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let sinc = (PI * t).sin() / (PI * t);
    let d = 1.0 - (2.0 * beta * t).powi(2);
    if d.abs() < 1e-10 {
        return PI / 4.0 * sinc;
    }
    sinc * (PI * beta * t).cos() / d
}
