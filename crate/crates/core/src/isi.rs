//! ISI coefficients, Toeplitz channel matrices and the Dirichlet kernel.

use num_complex::Complex;
use rayon::prelude::*;

use crate::pulse::{check_compression, PulseSpec};
use crate::quadrature::Quadrature;
use crate::scalar::{cis, Real};
use crate::Result;

/// Below this `|sin(πxξT)|` the Dirichlet ratio is replaced by its limit.
pub const DIRICHLET_SINGULAR: f64 = 1e-9;

/// `∫ |Hp(f)|² cos(2πft) df`: the pulse autocorrelation at lag `t`.
pub fn pulse_autocorrelation<S: Real>(pulse: &PulseSpec<S>, t: S) -> S {
    let half_band = pulse.bandwidth() * S::lit(0.5);
    let mut q = Quadrature::default();
    if t != S::zero() {
        q = q.max_panel(S::one() / t.abs());
    }
    let breaks: Vec<S> = pulse.spectrum_knots().into_iter().filter(|k| *k > S::zero()).collect();
    let w = S::two_pi() * t;
    let half = q
        .integrate(|f: S| pulse.spectrum_sq(f) * (w * f).cos(), S::zero(), half_band, &breaks)
        .value;
    S::lit(2.0) * half
}

/// `g[k, τ]`, the ISI between symbols `k` FTN periods apart at extra delay `τ`.
pub fn isi_coefficient<S: Real>(pulse: &PulseSpec<S>, xi: S, k: i64, tau: S) -> S {
    pulse_autocorrelation(pulse, S::from_i64_lossy(k) * xi * pulse.period() + tau)
}

/// `g[k, τ]` for `k = -reach ..= reach`, indexed by `k + reach`.
pub fn isi_coefficients<S: Real>(pulse: &PulseSpec<S>, xi: S, tau: S, reach: usize) -> Vec<S> {
    let r = reach as i64;
    (-r..=r)
        .into_par_iter()
        .map(|k| isi_coefficient(pulse, xi, k, tau))
        .collect()
}

/// Square Toeplitz matrix stored by its `2N − 1` diagonals; `entry(n, m)`
/// depends only on `m − n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiMatrix<S> {
    size: usize,
    delay: S,
    diagonals: Vec<S>,
}

impl<S: Real> IsiMatrix<S> {
    /// Builds from `diagonals[k + N − 1] = entry(n, n + k)`.
    pub fn from_diagonals(size: usize, delay: S, diagonals: Vec<S>) -> Self {
        assert!(size >= 1, "matrix size must be at least 1");
        assert_eq!(diagonals.len(), 2 * size - 1, "need 2N - 1 diagonals");
        IsiMatrix { size, delay, diagonals }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn delay(&self) -> S {
        self.delay
    }

    /// Value on diagonal `k = m − n`.
    pub fn diagonal(&self, k: i64) -> S {
        self.diagonals[(k + self.size as i64 - 1) as usize]
    }

    pub fn entry(&self, n: usize, m: usize) -> S {
        self.diagonal(m as i64 - n as i64)
    }

    /// Circulant matrix agreeing with `self` on the diagonals nearest the main
    /// one: first row `c_j = g[j]` for `j ≤ N/2`, `g[j − N]` beyond.
    pub fn circulant_wrap(&self) -> Self {
        let n = self.size as i64;
        let wrapped = |j: i64| -> S {
            if 2 * j <= n {
                self.diagonal(j)
            } else {
                self.diagonal(j - n)
            }
        };
        let diagonals = (1 - n..n).map(|k| wrapped(k.rem_euclid(n))).collect();
        IsiMatrix { size: self.size, delay: self.delay, diagonals }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<S> {
        let n = self.size;
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.entry(r, c));
            }
        }
        out
    }
}

/// `G_τ` with entry `(n, m) = g[m − n, τ]`.
pub fn build_isi_matrix<S: Real>(pulse: &PulseSpec<S>, xi: S, size: usize, tau: S) -> Result<IsiMatrix<S>> {
    check_compression(xi)?;
    if size == 0 {
        return Err(crate::FtnError::param("N", "matrix size must be at least 1"));
    }
    let diagonals = isi_coefficients(pulse, xi, tau, size - 1);
    Ok(IsiMatrix::from_diagonals(size, tau, diagonals))
}

/// `Σ_{n=1}^{N} exp(j2πxnξT)` in closed form.
pub fn dirichlet_kernel<S: Real>(x: S, n: usize, xi_t: S) -> Complex<S> {
    let pi = S::PI();
    let nn = S::from_usize_lossy(n);
    let theta = pi * x * xi_t;
    let phase = cis(theta * (nn + S::one()));
    let s = theta.sin();
    if s.abs() < S::lit(DIRICHLET_SINGULAR) {
        // θ ≈ kπ: sin(Nθ)/sin(θ) → N·(−1)^{k(N−1)}.
        let k = (theta / pi).round().to_i64().unwrap_or(0);
        let odd = (k.rem_euclid(2) == 1) && n.is_multiple_of(2);
        let limit = if odd { -nn } else { nn };
        return phase * limit;
    }
    phase * ((nn * theta).sin() / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rrc(beta: f64) -> PulseSpec<f64> {
        PulseSpec::rrc(beta, 1.0).unwrap()
    }

    #[test]
    fn zero_lag_is_unit_energy() {
        for xi in [0.5, 0.8, 1.0] {
            assert_abs_diff_eq!(isi_coefficient(&rrc(0.3), xi, 0, 0.0), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn nyquist_orthogonality() {
        let p = rrc(0.3);
        for k in 1..20 {
            assert_abs_diff_eq!(isi_coefficient(&p, 1.0, k, 0.0), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn identity_at_nyquist_rate() {
        let m = build_isi_matrix(&rrc(0.3), 1.0, 12, 0.0).unwrap();
        for r in 0..12 {
            for c in 0..12 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(m.entry(r, c), want, epsilon = 1e-9);
            }
        }
        let one = build_isi_matrix(&rrc(0.3), 0.8, 1, 0.0).unwrap();
        assert_eq!(one.to_dense().len(), 1);
        assert_abs_diff_eq!(one.entry(0, 0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn toeplitz_layout() {
        let p = rrc(0.3);
        let m = build_isi_matrix(&p, 0.8, 5, 0.2).unwrap();
        assert_abs_diff_eq!(m.entry(0, 3), isi_coefficient(&p, 0.8, 3, 0.2), epsilon = 1e-15);
        assert_abs_diff_eq!(m.entry(4, 1), isi_coefficient(&p, 0.8, -3, 0.2), epsilon = 1e-15);
        assert_eq!(m.entry(1, 2), m.entry(3, 4));
    }

    #[test]
    fn circulant_wrap_structure() {
        let p = rrc(0.3);
        let m = build_isi_matrix(&p, 0.8, 6, 0.3).unwrap();
        let c = m.circulant_wrap();
        for r in 0..6 {
            for col in 0..6 {
                assert_eq!(c.entry(r, col), c.entry((r + 1) % 6, (col + 1) % 6));
            }
        }
        assert_eq!(c.diagonal(2), m.diagonal(2));
        assert_eq!(c.diagonal(3), m.diagonal(3));
        assert_eq!(c.diagonal(4), m.diagonal(-2));
        assert_eq!(c.diagonal(-2), m.diagonal(-2));
        assert_eq!(c.diagonal(-4), m.diagonal(2));
    }

    #[test]
    fn dirichlet_examples() {
        let d = dirichlet_kernel(0.0, 100, 0.75);
        assert_abs_diff_eq!(d.re, 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-12);
        for n in [1usize, 2, 7, 100] {
            let d = dirichlet_kernel(1.0 / 0.75, n, 0.75);
            assert_abs_diff_eq!(d.re, n as f64, epsilon = 1e-9);
            assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-9);
        }
        let direct: Complex<f64> = (1..=100).map(|k| cis(2.0 * std::f64::consts::PI * 0.013 * k as f64 * 0.75)).sum();
        let d = dirichlet_kernel(0.013, 100, 0.75);
        assert!((d - direct).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn coefficient_symmetry(k in -40i64..40, tau in -3.0f64..3.0, xi in 0.5f64..=1.0) {
            let p = rrc(0.3);
            let a = isi_coefficient(&p, xi, k, tau);
            let b = isi_coefficient(&p, xi, -k, -tau);
            prop_assert!((a - b).abs() < 1e-13);
            prop_assert!(a.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn dirichlet_matches_direct_sum(x in -3.0f64..3.0, n in 1usize..64, xi_t in 0.3f64..1.0) {
            let direct: Complex<f64> = (1..=n).map(|k| cis(2.0 * std::f64::consts::PI * x * k as f64 * xi_t)).sum();
            let d = dirichlet_kernel(x, n, xi_t);
            prop_assert!((d - direct).norm() < 1e-9 * (n as f64));
        }

        #[test]
        fn dirichlet_periodic(x in -1.0f64..1.0, n in 1usize..50, xi_t in 0.4f64..1.0) {
            let a = dirichlet_kernel(x, n, xi_t);
            let b = dirichlet_kernel(x + 1.0 / xi_t, n, xi_t);
            prop_assert!((a - b).norm() < 1e-7 * n as f64);
        }
    }
}
