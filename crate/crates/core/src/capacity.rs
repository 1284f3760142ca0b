//! Spectral efficiency of FTN signaling over time-invariant multipath
//! channels: Toeplitz-coefficient DTFTs, the integral rate with its
//! folded-spectrum bounds, and the finite-block matrix reference.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FtnError, Result};
use crate::isi::{isi_coefficients, IsiMatrix};
use crate::linalg::{hermitian_logdet, CMatrix};
use crate::pulse::{check_compression, FoldedSpectrumKind, PulseSpec};
use crate::quadrature::Quadrature;
use crate::rng::trial_rng;
use crate::scalar::{cis, Real};

/// Absolute tolerance of the frequency integrals behind every rate.
pub const RATE_TOL: f64 = 1e-11;

/// Minimum separation enforced between randomly drawn path delays, seconds.
pub const DELAY_COLLISION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Path<S> {
    pub gain: Complex<S>,
    pub delay: S,
}

/// `L ≥ 1` resolvable paths with distinct, nonnegative delays.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultipathChannel<S> {
    paths: Vec<Path<S>>,
}

impl<S: Real> MultipathChannel<S> {
    pub fn new(paths: Vec<Path<S>>) -> Result<Self> {
        if paths.is_empty() {
            return Err(FtnError::param("channel", "at least one path is required"));
        }
        for (i, p) in paths.iter().enumerate() {
            if !(p.delay >= S::zero()) || !p.delay.is_finite() {
                return Err(FtnError::param("channel", format!("path {i} has invalid delay {}", p.delay)));
            }
            if !p.gain.re.is_finite() || !p.gain.im.is_finite() {
                return Err(FtnError::param("channel", format!("path {i} has a non-finite gain")));
            }
            if paths[..i].iter().any(|q| q.delay == p.delay) {
                return Err(FtnError::param("channel", format!("path {i} repeats delay {}", p.delay)));
            }
        }
        Ok(MultipathChannel { paths })
    }

    pub fn single(gain: Complex<S>, delay: S) -> Result<Self> {
        Self::new(vec![Path { gain, delay }])
    }

    /// Equal-power paths `h_l = 1/√L` at the given delays.
    pub fn equal_gain(delays: &[S]) -> Result<Self> {
        let g = S::one() / S::from_usize_lossy(delays.len().max(1)).sqrt();
        Self::new(delays.iter().map(|&d| Path { gain: Complex::new(g, S::zero()), delay: d }).collect())
    }

    pub fn paths(&self) -> &[Path<S>] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_power(&self) -> S {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeResult<S> {
    pub snr_db: S,
    pub rate: S,
    pub rate_ub: S,
    pub rate_lb: S,
}

pub fn db_to_linear<S: Real>(db: S) -> S {
    S::lit(10.0).powf(db / S::lit(10.0))
}

fn check_band<S: Real>(pulse: &PulseSpec<S>, xi: S, f: S) -> Result<()> {
    check_compression(xi)?;
    let half = S::lit(0.5) / (xi * pulse.period());
    if f.abs() > half * (S::one() + S::lit(1e-12)) || f.is_nan() {
        return Err(FtnError::OutOfBand { f: f.to_f64_lossy(), half_band: half.to_f64_lossy() });
    }
    Ok(())
}

fn check_snr<S: Real>(snr: S) -> Result<()> {
    if snr >= S::zero() && snr.is_finite() {
        Ok(())
    } else {
        Err(FtnError::param("snr", format!("linear SNR must be finite and nonnegative, got {snr}")))
    }
}

/// Nonzero alias copies `(n, |Hp(f − n/ξT)|²)` at one frequency.
struct Aliases<S> {
    rate: S,
    terms: Vec<(S, S)>,
}

impl<S: Real> Aliases<S> {
    fn at(pulse: &PulseSpec<S>, xi: S, f: S) -> Self {
        let rate = S::one() / (xi * pulse.period());
        let reach = pulse.alias_reach(xi);
        let mut terms = Vec::with_capacity(4);
        for n in -reach..=reach {
            let nn = S::from_i64_lossy(n);
            let v = pulse.spectrum_sq(f - nn * rate);
            if v > S::zero() {
                terms.push((nn, v));
            }
        }
        Aliases { rate, terms }
    }

    fn folded(&self) -> S {
        self.terms.iter().map(|t| t.1).sum()
    }

    fn twisted(&self) -> S {
        self.terms
            .iter()
            .map(|&(n, v)| if n == S::zero() { v } else { -v })
            .sum()
    }

    /// `Σₙ |Hp(f − n/ξT)|² e^{−j2πnτ/ξT}`.
    fn phase_sum(&self, tau: S) -> Complex<S> {
        let w = -S::two_pi() * tau * self.rate;
        self.terms.iter().map(|&(n, v)| cis(w * n) * v).sum()
    }
}

/// DTFT of the coefficients of `G₀` at `ω = 2πfξT`: `|H_fo(f)|²/ξT`.
pub fn dtft_g0<S: Real>(pulse: &PulseSpec<S>, xi: S, f: S) -> Result<S> {
    check_band(pulse, xi, f)?;
    Ok(Aliases::at(pulse, xi, f).folded() / (xi * pulse.period()))
}

/// DTFT of the coefficients of `|h_l|² G_l G_lᵀ`.
pub fn dtft_dll<S: Real>(pulse: &PulseSpec<S>, xi: S, gain: Complex<S>, tau: S, f: S) -> Result<S> {
    check_band(pulse, xi, f)?;
    let xt = xi * pulse.period();
    let s = Aliases::at(pulse, xi, f).phase_sum(tau);
    Ok(gain.norm_sqr() * s.norm_sqr() / (xt * xt))
}

/// DTFT of the cross-path coefficients `t_{l,l'}[n] = d_{l,l'}[n] + d_{l',l}[n]`.
pub fn dtft_tll<S: Real>(
    pulse: &PulseSpec<S>,
    xi: S,
    gain_l: Complex<S>,
    tau_l: S,
    gain_lp: Complex<S>,
    tau_lp: S,
    f: S,
) -> Result<S> {
    check_band(pulse, xi, f)?;
    let xt = xi * pulse.period();
    let a = Aliases::at(pulse, xi, f);
    let z = gain_l * gain_lp.conj() * cis(S::two_pi() * f * (tau_l - tau_lp)) * a.phase_sum(tau_l) * a.phase_sum(tau_lp).conj();
    Ok(S::lit(2.0) * z.re / (xt * xt))
}

fn upsilon_from<S: Real>(a: &Aliases<S>, channel: &MultipathChannel<S>, f: S) -> S {
    let tp = S::two_pi();
    channel
        .paths()
        .iter()
        .map(|p| p.gain * cis(tp * f * p.delay) * a.phase_sum(p.delay))
        .sum::<Complex<S>>()
        .norm_sqr()
}

/// `Υ(f) = (ξT)²·[Σ_l D_{l,l} + Σ_{l'>l''} T_{l',l''}](f)`.
pub fn upsilon<S: Real>(pulse: &PulseSpec<S>, xi: S, channel: &MultipathChannel<S>, f: S) -> Result<S> {
    check_band(pulse, xi, f)?;
    Ok(upsilon_from(&Aliases::at(pulse, xi, f), channel, f))
}

/// Frequencies in `[lo, hi]` where the aliased spectrum changes form.
fn alias_knots<S: Real>(pulse: &PulseSpec<S>, xi: S, lo: S, hi: S) -> Vec<S> {
    let rate = S::one() / (xi * pulse.period());
    let reach = pulse.alias_reach(xi);
    let mut out = vec![S::zero()];
    for n in -reach..=reach {
        for k in pulse.spectrum_knots() {
            let x = k + S::from_i64_lossy(n) * rate;
            if x > lo && x < hi {
                out.push(x);
            }
        }
    }
    out
}

/// Sign changes of `Re{h_l' h_l''* e^{j2πf(τ_l' − τ_l'')}}` in `[lo, hi]`.
fn cross_term_roots<S: Real>(channel: &MultipathChannel<S>, lo: S, hi: S) -> Vec<S> {
    let mut out = Vec::new();
    let ps = channel.paths();
    for i in 0..ps.len() {
        for j in 0..i {
            let c = ps[i].gain * ps[j].gain.conj();
            if c.norm() == S::zero() {
                continue;
            }
            let dtau = ps[i].delay - ps[j].delay;
            let phi = c.arg();
            let w = S::two_pi() * dtau;
            // φ + w f = π/2 + kπ.
            let pi = S::PI();
            let (a, b) = if w > S::zero() { (phi + w * lo, phi + w * hi) } else { (phi + w * hi, phi + w * lo) };
            let k0 = ((a - S::FRAC_PI_2()) / pi).ceil().to_i64().unwrap_or(0);
            let k1 = ((b - S::FRAC_PI_2()) / pi).floor().to_i64().unwrap_or(-1);
            for k in k0..=k1 {
                out.push((S::FRAC_PI_2() + S::from_i64_lossy(k) * pi - phi) / w);
            }
        }
    }
    out
}

fn rate_quadrature<S: Real>() -> Quadrature<S> {
    Quadrature::with_tolerance(S::lit(RATE_TOL), S::lit(RATE_TOL))
}

/// Rate of the asymptotic (Szegő) model in bits/s/Hz, normalized by `W`.
pub fn spectral_efficiency<S: Real>(pulse: &PulseSpec<S>, xi: S, channel: &MultipathChannel<S>, snr: S) -> Result<S> {
    check_compression(xi)?;
    check_snr(snr)?;
    let half = S::lit(0.5) / (xi * pulse.period());
    let knots = alias_knots(pulse, xi, -half, half);
    let integrand = |f: S| {
        let a = Aliases::at(pulse, xi, f);
        let fo = a.folded();
        if fo > S::zero() {
            (S::one() + snr * upsilon_from(&a, channel, f) / fo).log2()
        } else {
            S::zero()
        }
    };
    let v = rate_quadrature().integrate(integrand, -half, half, &knots).value;
    Ok(v / pulse.bandwidth())
}

/// `(Φ_UB(f), Φ_LB(f))` from the folded and twisted folded spectra.
fn phi_bounds<S: Real>(a: &Aliases<S>, channel: &MultipathChannel<S>, f: S) -> (S, S) {
    let fo = a.folded();
    let tw = a.twisted();
    let power = channel.total_power();
    let mut ub = power * fo;
    let mut lb = power * tw;
    let ps = channel.paths();
    let two = S::lit(2.0);
    for i in 0..ps.len() {
        for j in 0..i {
            let re = (ps[i].gain * ps[j].gain.conj() * cis(S::two_pi() * f * (ps[i].delay - ps[j].delay))).re;
            if re >= S::zero() {
                ub = ub + two * re * fo;
                lb = lb + two * re * tw;
            } else {
                ub = ub + two * re * tw;
                lb = lb + two * re * fo;
            }
        }
    }
    (ub, lb.max(S::zero()))
}

/// Upper and lower bounds `(R_UB, R_LB)` built from `Φ_UB` and `Φ_LB`.
pub fn se_bounds<S: Real>(pulse: &PulseSpec<S>, xi: S, channel: &MultipathChannel<S>, snr: S) -> Result<(S, S)> {
    check_compression(xi)?;
    check_snr(snr)?;
    let half = S::lit(0.5) / (xi * pulse.period());
    let mut knots = alias_knots(pulse, xi, -half, half);
    knots.extend(cross_term_roots(channel, -half, half));
    let q = rate_quadrature();
    let ub = q
        .integrate(|f: S| (S::one() + snr * phi_bounds(&Aliases::at(pulse, xi, f), channel, f).0).log2(), -half, half, &knots)
        .value;
    let lb = q
        .integrate(|f: S| (S::one() + snr * phi_bounds(&Aliases::at(pulse, xi, f), channel, f).1).log2(), -half, half, &knots)
        .value;
    let w = pulse.bandwidth();
    Ok((ub / w, lb / w))
}

/// Rate and both bounds at one SNR given in dB.
pub fn se_point<S: Real>(pulse: &PulseSpec<S>, xi: S, channel: &MultipathChannel<S>, snr_db: S) -> Result<SeResult<S>> {
    let snr = db_to_linear(snr_db);
    let rate = spectral_efficiency(pulse, xi, channel, snr)?;
    let (rate_ub, rate_lb) = se_bounds(pulse, xi, channel, snr)?;
    Ok(SeResult { snr_db, rate, rate_ub, rate_lb })
}

/// Closed form valid without aliasing (`ξ ≤ ξ₀`); independent of `ξ`.
pub fn se_no_aliasing<S: Real>(pulse: &PulseSpec<S>, xi: S, channel: &MultipathChannel<S>, snr: S) -> Result<S> {
    check_compression(xi)?;
    check_snr(snr)?;
    let xi0 = pulse.saturation_threshold();
    if xi > xi0 * (S::one() + S::lit(1e-12)) {
        return Err(FtnError::param("xi", format!("{xi} exceeds the saturation threshold {xi0}")));
    }
    let half = pulse.bandwidth() * S::lit(0.5);
    let knots = pulse.spectrum_knots();
    let tp = S::two_pi();
    let integrand = |f: S| {
        let response: Complex<S> = channel.paths().iter().map(|p| p.gain * cis(tp * f * p.delay)).sum();
        (S::one() + snr * response.norm_sqr() * pulse.spectrum_sq(f)).log2()
    };
    let v = rate_quadrature().integrate(integrand, -half, half, &knots).value;
    Ok(v / pulse.bandwidth())
}

/// Finite-size Toeplitz matrices `G₀` and `G_l` for one channel.
#[derive(Debug, Clone)]
pub struct ChannelMatrices<S> {
    pub g0: IsiMatrix<S>,
    pub paths: Vec<(Complex<S>, IsiMatrix<S>)>,
}

impl<S: Real> ChannelMatrices<S> {
    pub fn new(pulse: &PulseSpec<S>, xi: S, channel: &MultipathChannel<S>, size: usize) -> Result<Self> {
        check_compression(xi)?;
        if size < 2 {
            return Err(FtnError::param("N", "block length must be at least 2"));
        }
        let mut delays = vec![S::zero()];
        for p in channel.paths() {
            if !delays.contains(&p.delay) {
                delays.push(p.delay);
            }
        }
        let tables: Vec<IsiMatrix<S>> = delays
            .iter()
            .map(|&d| IsiMatrix::from_diagonals(size, d, isi_coefficients(pulse, xi, d, size - 1)))
            .collect();
        let pick = |d: S| tables[delays.iter().position(|&x| x == d).unwrap_or(0)].clone();
        Ok(ChannelMatrices {
            g0: tables[0].clone(),
            paths: channel.paths().iter().map(|p| (p.gain, pick(p.delay))).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.g0.size()
    }

    /// Leading `size × size` block of every matrix.
    pub fn leading(&self, size: usize) -> Self {
        let cut = |m: &IsiMatrix<S>| {
            let n = m.size() as i64;
            assert!(size as i64 <= n && size >= 1);
            let s = size as i64;
            IsiMatrix::from_diagonals(size, m.delay(), (1 - s..s).map(|k| m.diagonal(k)).collect())
        };
        ChannelMatrices {
            g0: cut(&self.g0),
            paths: self.paths.iter().map(|(h, m)| (*h, cut(m))).collect(),
        }
    }

    pub fn circulant(&self) -> Self {
        ChannelMatrices {
            g0: self.g0.circulant_wrap(),
            paths: self.paths.iter().map(|(h, m)| (*h, m.circulant_wrap())).collect(),
        }
    }
}

/// Factored pieces of `I(y; x)` reusable across SNR values.
#[derive(Debug, Clone)]
pub struct FiniteBlockModel<S> {
    g0: CMatrix<S>,
    gram: CMatrix<S>,
    logdet_g0: S,
    symbol_period: S,
    norm: S,
}

impl<S: Real> FiniteBlockModel<S> {
    pub fn new(pulse: &PulseSpec<S>, xi: S, mats: &ChannelMatrices<S>) -> Result<Self> {
        check_compression(xi)?;
        let n = mats.size();
        let mut g0 = CMatrix::zeros(n);
        g0.add_toeplitz(&mats.g0, Complex::new(S::one(), S::zero()));
        let logdet_g0 = hermitian_logdet(&g0)?;
        let mut h = CMatrix::zeros(n);
        for (gain, m) in &mats.paths {
            h.add_toeplitz(m, *gain);
        }
        let symbol_period = xi * pulse.period();
        let norm = S::LN_2() * S::from_usize_lossy(n) * symbol_period * pulse.bandwidth();
        Ok(FiniteBlockModel { g0, gram: h.gram(), logdet_g0, symbol_period, norm })
    }

    /// `[log det(G₀ + (E_s/N₀)HHᴴ) − log det G₀] / (N ξT W ln 2)` with `E_s = PξT`.
    pub fn rate(&self, snr: S) -> Result<S> {
        check_snr(snr)?;
        let mut m = self.g0.clone();
        m.add_scaled(&self.gram, snr * self.symbol_period);
        Ok((hermitian_logdet(&m)? - self.logdet_g0) / self.norm)
    }
}

/// Normalized finite-block mutual information; `cyclic` swaps every Toeplitz
/// matrix for its circulant wrap.
pub fn mutual_info_matrix<S: Real>(
    pulse: &PulseSpec<S>,
    xi: S,
    channel: &MultipathChannel<S>,
    snr: S,
    size: usize,
    cyclic: bool,
) -> Result<S> {
    let mats = ChannelMatrices::new(pulse, xi, channel, size)?;
    let mats = if cyclic { mats.circulant() } else { mats };
    FiniteBlockModel::new(pulse, xi, &mats)?.rate(snr)
}

/// Random channel law with a uniform power-delay profile: gains
/// `CN(0, 1/L)`, delays i.i.d. uniform on `[0, τ_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicChannelModel<S> {
    pub paths: usize,
    pub max_delay: S,
}

impl<S: Real> ErgodicChannelModel<S> {
    pub fn new(paths: usize, max_delay: S) -> Result<Self> {
        if paths == 0 {
            return Err(FtnError::param("L", "at least one path is required"));
        }
        if !(max_delay >= S::zero()) || !max_delay.is_finite() {
            return Err(FtnError::param("tau_max", format!("must be finite and nonnegative, got {max_delay}")));
        }
        if paths > 1 && max_delay.to_f64_lossy() < DELAY_COLLISION * paths as f64 {
            return Err(FtnError::param("tau_max", "too small to separate the requested number of paths"));
        }
        Ok(ErgodicChannelModel { paths, max_delay })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> MultipathChannel<S> {
        let sigma = (0.5 / self.paths as f64).sqrt();
        let gains: Vec<Complex<S>> = (0..self.paths)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(S::lit(re * sigma), S::lit(im * sigma))
            })
            .collect();
        let tau_max = self.max_delay.to_f64_lossy();
        let delays = loop {
            let d: Vec<f64> = (0..self.paths).map(|_| rng.random::<f64>() * tau_max).collect();
            let separated = (0..d.len()).all(|i| (0..i).all(|j| (d[i] - d[j]).abs() >= DELAY_COLLISION));
            if separated {
                break d;
            }
        };
        let paths = gains
            .into_iter()
            .zip(delays)
            .map(|(gain, d)| Path { gain, delay: S::lit(d) })
            .collect();
        MultipathChannel { paths }
    }
}

/// Per-trial rates in trial order; trial `i` uses stream `i` of `seed`.
pub fn ergodic_se_samples<S: Real>(
    pulse: &PulseSpec<S>,
    xi: S,
    model: &ErgodicChannelModel<S>,
    snr: S,
    trials: usize,
    seed: u64,
) -> Result<Vec<S>> {
    check_compression(xi)?;
    check_snr(snr)?;
    if trials == 0 {
        return Err(FtnError::param("trials", "at least one trial is required"));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let channel = model.draw(&mut trial_rng(seed, i));
            spectral_efficiency(pulse, xi, &channel, snr)
        })
        .collect()
}

/// Sample mean of the rate over random channels, reduced in trial order.
pub fn ergodic_se<S: Real>(
    pulse: &PulseSpec<S>,
    xi: S,
    model: &ErgodicChannelModel<S>,
    snr: S,
    trials: usize,
    seed: u64,
) -> Result<S> {
    let samples = ergodic_se_samples(pulse, xi, model, snr, trials, seed)?;
    let mut acc = S::zero();
    for s in &samples {
        acc = acc + *s;
    }
    Ok(acc / S::from_usize_lossy(samples.len()))
}

/// Folded-spectrum helper exposed for callers that tabulate spectra.
pub fn folded_pair<S: Real>(pulse: &PulseSpec<S>, xi: S, f: S) -> Result<(S, S)> {
    Ok((
        pulse.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Folded)?,
        pulse.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Twisted)?,
    ))
}
