//! Closed-form ambiguity-function analytics for FTN signals.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FtnError, Result};
use crate::isi::{pulse_autocorrelation, DIRICHLET_SINGULAR};
use crate::pulse::{check_compression, PulseSpec};
use crate::quadrature::Quadrature;
use crate::scalar::{cis, Real};

/// Tolerance on the unit-power and rotational-symmetry moments.
pub const MOMENT_TOL: f64 = 1e-12;

/// Finite complex alphabet with unit power and `E[a] = E[a²] = 0`, or the
/// analytic Gaussian entry which exists only through its kurtosis.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<S> {
    name: String,
    points: Vec<Complex<S>>,
    gaussian: bool,
}

impl<S: Real> Constellation<S> {
    pub fn new(name: impl Into<String>, points: Vec<Complex<S>>) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| FtnError::Constellation { name: name.clone(), reason };
        if points.is_empty() {
            return Err(bad("no points".into()));
        }
        let m = S::from_usize_lossy(points.len());
        let tol = S::lit(MOMENT_TOL).max(S::epsilon() * S::lit(64.0));
        let power = points.iter().map(|p| p.norm_sqr()).sum::<S>() / m;
        if (power - S::one()).abs() > tol {
            return Err(bad(format!("mean power is {power}, expected 1")));
        }
        let mean = points.iter().copied().sum::<Complex<S>>() / m;
        if mean.norm() > tol {
            return Err(bad(format!("mean is {mean}, expected 0")));
        }
        let second = points.iter().map(|p| p * p).sum::<Complex<S>>() / m;
        if second.norm() > tol {
            return Err(bad(format!("E[a^2] is {second}, expected 0")));
        }
        Ok(Constellation { name, points, gaussian: false })
    }

    pub fn qpsk() -> Self {
        Self::psk("qpsk", 4, S::FRAC_PI_4())
    }

    pub fn psk8() -> Self {
        Self::psk("8psk", 8, S::zero())
    }

    fn psk(name: &str, m: usize, offset: S) -> Self {
        let step = S::two_pi() / S::from_usize_lossy(m);
        let points = (0..m).map(|k| cis(offset + step * S::from_usize_lossy(k))).collect();
        Self::new(name, points).expect("PSK satisfies the constellation invariants")
    }

    /// Square `side²`-QAM on odd integer levels, scaled to unit power.
    fn square_qam(name: &str, side: usize) -> Self {
        let levels: Vec<S> = (0..side).map(|k| S::from_usize_lossy(2 * k + 1) - S::from_usize_lossy(side)).collect();
        let power = S::lit(2.0) * levels.iter().map(|l| *l * *l).sum::<S>() / S::from_usize_lossy(side);
        let scale = S::one() / power.sqrt();
        let mut points = Vec::with_capacity(side * side);
        for &re in &levels {
            for &im in &levels {
                points.push(Complex::new(re * scale, im * scale));
            }
        }
        Self::new(name, points).expect("square QAM satisfies the constellation invariants")
    }

    pub fn qam16() -> Self {
        Self::square_qam("16qam", 4)
    }

    pub fn qam64() -> Self {
        Self::square_qam("64qam", 8)
    }

    /// Circularly symmetric Gaussian input; usable only in closed forms.
    pub fn gaussian() -> Self {
        Constellation { name: "gaussian".into(), points: Vec::new(), gaussian: true }
    }

    /// Named alphabets. `bpsk` and `8qam` are recognised but fail the
    /// rotational-symmetry check.
    pub fn by_name(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "qpsk" => Ok(Self::qpsk()),
            "8psk" => Ok(Self::psk8()),
            "16qam" => Ok(Self::qam16()),
            "64qam" => Ok(Self::qam64()),
            "gaussian" => Ok(Self::gaussian()),
            "bpsk" => Self::new("bpsk", vec![Complex::new(S::one(), S::zero()), Complex::new(-S::one(), S::zero())]),
            "8qam" => {
                let s = S::one() / S::lit(6.0).sqrt();
                let mut pts = Vec::new();
                for re in [-3.0, -1.0, 1.0, 3.0] {
                    for im in [-1.0, 1.0] {
                        pts.push(Complex::new(S::lit(re) * s, S::lit(im) * s));
                    }
                }
                Self::new("8qam", pts)
            }
            _ => Err(FtnError::Constellation { name: name.into(), reason: "unknown constellation".into() }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Alphabet points; empty for the Gaussian entry.
    pub fn points(&self) -> &[Complex<S>] {
        &self.points
    }

    pub fn is_gaussian(&self) -> bool {
        self.gaussian
    }

    /// `μ₄ = E[|a|⁴]`.
    pub fn kurtosis(&self) -> S {
        if self.gaussian {
            return S::lit(2.0);
        }
        let m = S::from_usize_lossy(self.points.len());
        self.points.iter().map(|p| p.norm_sqr() * p.norm_sqr()).sum::<S>() / m
    }
}

pub fn kurtosis<S: Real>(c: &Constellation<S>) -> S {
    c.kurtosis()
}

/// `N_FTN = round(N_Nyquist / ξ)`, keeping the frame duration fixed.
pub fn fair_symbol_count<S: Real>(n_nyquist: usize, xi: S) -> usize {
    (S::from_usize_lossy(n_nyquist) / xi).round().to_usize().unwrap_or(n_nyquist).max(1)
}

/// `E_s = PξT`, keeping the power spectral density fixed.
pub fn fair_symbol_energy<S: Real>(power: S, xi: S, period: S) -> S {
    power * xi * period
}

/// `AF_p(τ, ν) = ∫ Hp(f) Hp(f − ν) e^{j2πfτ} df` over the spectral overlap;
/// exactly zero when the shifted supports do not overlap.
pub fn pulse_af<S: Real>(pulse: &PulseSpec<S>, tau: S, nu: S) -> Complex<S> {
    if nu == S::zero() {
        return Complex::new(pulse_autocorrelation(pulse, tau), S::zero());
    }
    let half = pulse.bandwidth() * S::lit(0.5);
    let lo = (-half).max(nu - half);
    let hi = half.min(nu + half);
    if !(lo < hi) {
        return Complex::new(S::zero(), S::zero());
    }
    let mut breaks = pulse.spectrum_knots();
    breaks.extend(pulse.spectrum_knots().into_iter().map(|k| k + nu));
    let mut q = Quadrature::default();
    if tau != S::zero() {
        q = q.max_panel(S::one() / tau.abs());
    }
    let w = S::two_pi() * tau;
    q.integrate(|f: S| cis(w * f) * (pulse.amplitude(f) * pulse.amplitude(f - nu)), lo, hi, &breaks)
        .value
}

/// `sin²(πNΔfξT) / sin²(πΔfξT)`, equal to `N²` at its singular points.
pub fn dirichlet_sq<S: Real>(df: S, n: usize, xi_t: S) -> S {
    let nn = S::from_usize_lossy(n);
    let theta = S::PI() * df * xi_t;
    let s = theta.sin();
    if s.abs() < S::lit(DIRICHLET_SINGULAR) {
        return nn * nn;
    }
    let r = (nn * theta).sin() / s;
    r * r
}

/// `AF_p(mξT − τ, ν)` for `m = 1 − N ..= N − 1`, indexed by `m + N − 1`.
fn lag_table<S: Real>(pulse: &PulseSpec<S>, xi: S, n: usize, tau: S, nu: S) -> Vec<Complex<S>> {
    let xt = xi * pulse.period();
    let r = n as i64 - 1;
    (-r..=r)
        .into_par_iter()
        .map(|m| pulse_af(pulse, S::from_i64_lossy(m) * xt - tau, nu))
        .collect()
}

/// `Σ_{m=1−N}^{N−1} (N − |m|) |t_m|²` over a lag table.
fn weighted_lag_sum<S: Real>(table: &[Complex<S>], n: usize) -> S {
    let r = n as i64 - 1;
    let mut acc = S::zero();
    for (i, v) in table.iter().enumerate() {
        let m = i as i64 - r;
        acc = acc + S::from_i64_lossy(n as i64 - m.abs()) * v.norm_sqr();
    }
    acc
}

fn check_frame<S: Real>(xi: S, n: usize) -> Result<()> {
    check_compression(xi)?;
    if n == 0 {
        return Err(FtnError::param("N", "symbol count must be at least 1"));
    }
    Ok(())
}

fn check_kurtosis<S: Real>(mu4: S) -> Result<()> {
    if mu4 >= S::one() && mu4.is_finite() {
        Ok(())
    } else {
        Err(FtnError::param("mu4", format!("kurtosis must be at least 1, got {mu4}")))
    }
}

/// Components of `E[|AF_s(τ, ν)|²]` before scaling by `E_s²`.
#[derive(Debug, Clone, Copy)]
struct AfTerms<S> {
    n: S,
    mu4: S,
    centre: S,
    dirichlet: S,
    lag_sum: S,
}

impl<S: Real> AfTerms<S> {
    fn compute(pulse: &PulseSpec<S>, xi: S, n: usize, mu4: S, tau: S, nu: S) -> Result<Self> {
        check_frame(xi, n)?;
        check_kurtosis(mu4)?;
        let table = lag_table(pulse, xi, n, tau, nu);
        Ok(AfTerms {
            n: S::from_usize_lossy(n),
            mu4,
            centre: table[n - 1].norm_sqr(),
            dirichlet: dirichlet_sq(nu, n, xi * pulse.period()),
            lag_sum: weighted_lag_sum(&table, n),
        })
    }

    fn mean_sq(&self) -> S {
        self.dirichlet * self.centre
    }

    fn variance(&self) -> S {
        self.n * (self.mu4 - S::lit(2.0)) * self.centre + self.lag_sum
    }
}

/// `E[|AF_s(τ, ν)|²]` over i.i.d. symbols with kurtosis `μ₄`.
pub fn expected_sq_af<S: Real>(pulse: &PulseSpec<S>, xi: S, n: usize, mu4: S, tau: S, nu: S, es: S) -> Result<S> {
    let t = AfTerms::compute(pulse, xi, n, mu4, tau, nu)?;
    Ok(es * es * (t.mean_sq() + t.variance()).max(S::zero()))
}

/// `(|E[AF_s]|², Var[AF_s])`, summing to [`expected_sq_af`].
pub fn iceberg_decomposition<S: Real>(pulse: &PulseSpec<S>, xi: S, n: usize, mu4: S, tau: S, nu: S, es: S) -> Result<(S, S)> {
    let t = AfTerms::compute(pulse, xi, n, mu4, tau, nu)?;
    Ok((es * es * t.mean_sq(), es * es * t.variance()))
}

/// Accumulated ISI `X(τ) = Σ (N − |m|) |AF_p(mξT − τ, 0)|²`.
pub fn accumulated_isi<S: Real>(pulse: &PulseSpec<S>, xi: S, n: usize, tau: S) -> Result<S> {
    check_frame(xi, n)?;
    Ok(weighted_lag_sum(&lag_table(pulse, xi, n, tau, S::zero()), n))
}

/// Doppler-shifted accumulated ISI `X'(ν) = Σ (N − |m|) |AF_p(mξT, ν)|²`.
pub fn doppler_accumulated_isi<S: Real>(pulse: &PulseSpec<S>, xi: S, n: usize, nu: S) -> Result<S> {
    check_frame(xi, n)?;
    Ok(weighted_lag_sum(&lag_table(pulse, xi, n, S::zero(), nu), n))
}

/// Periodic Doppler variation `Y(ν) = A(ν, N, ξ) |AF_p(0, ν)|²`.
pub fn periodic_doppler_variation<S: Real>(pulse: &PulseSpec<S>, xi: S, n: usize, nu: S) -> Result<S> {
    check_frame(xi, n)?;
    Ok(dirichlet_sq(nu, n, xi * pulse.period()) * pulse_af(pulse, S::zero(), nu).norm_sqr())
}

/// Exact `AF_s(τ, ν)` of one symbol block for fixed `(τ, ν)`, with the pulse
/// AF tabulated once per lag so many blocks can be evaluated cheaply.
#[derive(Debug, Clone)]
pub struct SignalAf<S> {
    n: usize,
    es: S,
    // AF_p(dξT + τ, ν) for d = n' − n ∈ [1 − N, N − 1].
    table: Vec<Complex<S>>,
    // e^{−j2πn'νξT} for n' = 1..=N.
    phasors: Vec<Complex<S>>,
}

impl<S: Real> SignalAf<S> {
    pub fn new(pulse: &PulseSpec<S>, xi: S, n: usize, tau: S, nu: S, es: S) -> Result<Self> {
        check_frame(xi, n)?;
        let xt = xi * pulse.period();
        // Delaying the replica by τ shifts every lag by +τ.
        let table = lag_table(pulse, xi, n, -tau, nu);
        let phasors = (1..=n)
            .map(|k| cis(-S::two_pi() * S::from_usize_lossy(k) * nu * xt))
            .collect();
        Ok(SignalAf { n, es, table, phasors })
    }

    pub fn eval(&self, x: &[Complex<S>]) -> Complex<S> {
        assert_eq!(x.len(), self.n, "symbol vector length must equal N");
        let n = self.n;
        let mut acc = Complex::new(S::zero(), S::zero());
        for (jp, xp) in x.iter().enumerate() {
            let mut inner = Complex::new(S::zero(), S::zero());
            for (j, xj) in x.iter().enumerate() {
                inner = inner + *xj * self.table[jp + n - 1 - j];
            }
            acc = acc + xp.conj() * self.phasors[jp] * inner;
        }
        acc * self.es
    }
}

/// `AF_s(τ, ν) = E_s ΣΣ x_n x*_{n'} e^{−j2πn'νξT} AF_p((n' − n)ξT + τ, ν)`.
pub fn signal_af<S: Real>(x: &[Complex<S>], pulse: &PulseSpec<S>, xi: S, tau: S, nu: S, es: S) -> Result<Complex<S>> {
    Ok(SignalAf::new(pulse, xi, x.len(), tau, nu, es)?.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceAxis {
    Delay,
    Doppler,
}

impl SliceAxis {
    /// `(τ, ν)` for offset `x` along this axis.
    pub fn point<S: Real>(self, x: S) -> (S, S) {
        match self {
            SliceAxis::Delay => (x, S::zero()),
            SliceAxis::Doppler => (S::zero(), x),
        }
    }
}

/// Normalized squared AF sampled along one axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfSlice<S> {
    pub axis: SliceAxis,
    pub grid: Vec<S>,
    pub values: Vec<S>,
    pub xi: S,
    pub n: usize,
    pub period: S,
    pub beta: S,
    pub mu4: S,
}

/// `E[|AF_s|²] / E[|AF_s(0, 0)|²]` along `axis`.
pub fn af_slice<S: Real>(
    pulse: &PulseSpec<S>,
    xi: S,
    n: usize,
    constellation: &Constellation<S>,
    axis: SliceAxis,
    grid: &[S],
    es: S,
) -> Result<AfSlice<S>> {
    if grid.is_empty() {
        return Err(FtnError::param("grid", "slice grid is empty"));
    }
    let mu4 = constellation.kurtosis();
    let origin = expected_sq_af(pulse, xi, n, mu4, S::zero(), S::zero(), es)?;
    let values = grid
        .par_iter()
        .map(|&x| {
            let (tau, nu) = axis.point(x);
            expected_sq_af(pulse, xi, n, mu4, tau, nu, es).map(|v| v / origin)
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(AfSlice {
        axis,
        grid: grid.to_vec(),
        values,
        xi,
        n,
        period: pulse.period(),
        beta: pulse.beta(),
        mu4,
    })
}
