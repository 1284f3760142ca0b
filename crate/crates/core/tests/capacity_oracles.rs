use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use ftn_core::{
    db_to_linear, dtft_dll, dtft_g0, dtft_tll, ergodic_se, isi_coefficients, mutual_info_matrix,
    se_no_aliasing, spectral_efficiency, upsilon, ErgodicChannelModel, MultipathChannel, Path, PulseSpec,
};
use num_complex::Complex;

fn rrc(beta: f64) -> PulseSpec<f64> {
    PulseSpec::rrc(beta, 1.0).unwrap()
}

fn three_path_channel() -> MultipathChannel<f64> {
    let g = Complex::new(1.0 / 3f64.sqrt(), 0.0);
    MultipathChannel::new([0.0, 0.2, 0.5].iter().map(|&d| Path { gain: g, delay: d }).collect()).unwrap()
}

/// `Σ_{|k|≤400} c[k] e^{−j2πkfξT}` for a coefficient sequence centred at 400.
fn dtft(c: &[f64], xi: f64, f: f64) -> Complex<f64> {
    let r = (c.len() / 2) as f64;
    c.iter()
        .enumerate()
        .map(|(i, v)| Complex::from_polar(*v, -2.0 * PI * (i as f64 - r) * f * xi))
        .sum()
}

/// Cross-correlation `Σ_m a[m] b[m + k]` for `|k| ≤ 400`, from coefficients
/// computed out to `|m| ≤ 800`.
fn correlate(a: &[f64], b: &[f64]) -> Vec<f64> {
    (-400i64..=400)
        .map(|k| {
            let mut acc = 0.0;
            for (i, av) in a.iter().enumerate() {
                let j = i as i64 + k;
                if j >= 0 && (j as usize) < b.len() {
                    acc += av * b[j as usize];
                }
            }
            acc
        })
        .collect()
}

#[test]
fn g0_matches_coefficient_sum() {
    let p = rrc(0.3);
    let g = isi_coefficients(&p, 0.9, 0.0, 400);
    let direct = dtft(&g, 0.9, 0.5);
    assert_abs_diff_eq!(dtft_g0(&p, 0.9, 0.5).unwrap(), direct.re, epsilon = 1e-6);
    assert_abs_diff_eq!(direct.im, 0.0, epsilon = 1e-9);
}

#[test]
fn dll_matches_correlation_sequence() {
    // d[n] = Σ_m g[m, τ] g[m + n, τ]: the coefficients of G_τᵀ G_τ in the limit.
    let p = rrc(0.3);
    let (xi, tau, f) = (1.0, 0.5, 0.45);
    let g = isi_coefficients(&p, xi, tau, 800);
    let d = correlate(&g, &g);
    let direct = dtft(&d, xi, f).re;
    let h = Complex::new(0.6, 0.8);
    assert_abs_diff_eq!(dtft_dll(&p, xi, h, tau, f).unwrap(), h.norm_sqr() * direct, epsilon = 1e-6);
}

#[test]
fn tll_matches_cross_correlation_sequence() {
    let p = rrc(0.3);
    let (xi, f) = (1.0, 0.3);
    let h1 = Complex::new(1.0 / 2f64.sqrt(), 0.0);
    let h2 = h1;
    let g1 = isi_coefficients(&p, xi, 0.0, 800);
    let g2 = isi_coefficients(&p, xi, 0.2, 800);
    // t[n] = 2ℜ{h₁h₂*} Σ_m g[m, τ₁] g[m + n, τ₂] for real gains.
    let t = correlate(&g1, &g2);
    let direct = 2.0 * (h1 * h2.conj()).re * dtft(&t, xi, f).re;
    assert_abs_diff_eq!(dtft_tll(&p, xi, h1, 0.0, h2, 0.2, f).unwrap(), direct, epsilon = 1e-6);
    assert_eq!(dtft_tll(&p, xi, h1, 0.0, Complex::new(0.0, 0.0), 0.2, f).unwrap(), 0.0);
}

#[test]
fn upsilon_is_assembled_from_pair_terms() {
    let p = rrc(0.3);
    let ch = three_path_channel();
    let (xi, f) = (1.0, 0.25);
    let paths = ch.paths();
    let mut sum = 0.0;
    for (i, a) in paths.iter().enumerate() {
        sum += dtft_dll(&p, xi, a.gain, a.delay, f).unwrap();
        for b in &paths[..i] {
            sum += dtft_tll(&p, xi, a.gain, a.delay, b.gain, b.delay, f).unwrap();
        }
    }
    assert_abs_diff_eq!(upsilon(&p, xi, &ch, f).unwrap(), xi * xi * sum, epsilon = 1e-12);
}

#[test]
fn aliasing_free_paths_agree() {
    let p = rrc(0.3);
    let snr = db_to_linear(15.0);
    let a = spectral_efficiency(&p, 0.75, &three_path_channel(), snr).unwrap();
    let b = se_no_aliasing(&p, 0.75, &three_path_channel(), snr).unwrap();
    assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    let unit = MultipathChannel::single(Complex::new(1.0, 0.0), 0.3).unwrap();
    let r1 = se_no_aliasing(&p, 0.5, &unit, snr).unwrap();
    let r2 = se_no_aliasing(&p, 0.75, &unit, snr).unwrap();
    assert_eq!(r1, r2);
    assert!(se_no_aliasing(&p, 0.9, &unit, snr).is_err());
}

#[test]
fn sinc_block_is_awgn() {
    let p = PulseSpec::sinc(1.0).unwrap();
    let ch = MultipathChannel::single(Complex::new(1.0, 0.0), 0.0).unwrap();
    for n in [2, 17, 64] {
        for snr in [0.5f64, 10.0, 100.0] {
            let r = mutual_info_matrix(&p, 1.0, &ch, snr, n, false).unwrap();
            assert_abs_diff_eq!(r, (1.0 + snr).log2(), epsilon = 1e-9);
        }
    }
    assert!(mutual_info_matrix(&p, 1.0, &ch, 1e-9, 16, false).unwrap() < 1e-8);
}

#[test]
fn szego_at_fixed_block_length() {
    let p = rrc(0.3);
    let snr = db_to_linear(10.0);
    let exact = spectral_efficiency(&p, 1.0, &three_path_channel(), snr).unwrap();
    let block = mutual_info_matrix(&p, 1.0, &three_path_channel(), snr, 256, true).unwrap();
    assert!((block - exact).abs() <= 0.02 * exact);
}

#[test]
fn ergodic_ordering_small() {
    let p = rrc(0.3);
    let model = ErgodicChannelModel::new(3, 2.0).unwrap();
    let snr = db_to_linear(15.0);
    let ftn = ergodic_se(&p, 0.85, &model, snr, 200, 1).unwrap();
    let nyq = ergodic_se(&p, 1.0, &model, snr, 200, 1).unwrap();
    assert!(ftn >= nyq, "{ftn} < {nyq}");
}
