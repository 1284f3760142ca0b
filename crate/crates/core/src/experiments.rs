//! Monte Carlo harnesses: empirical AF slices and two-target Doppler estimation.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{FftNum, FftPlanner};
use serde::Serialize;

use crate::ambiguity::{fair_symbol_count, fair_symbol_energy, pulse_af, AfSlice, Constellation, SliceAxis};
use crate::capacity::db_to_linear;
use crate::error::{FtnError, Result};
use crate::pulse::{check_compression, PulseSpec};
use crate::rng::trial_rng;
use crate::scalar::{cis, Real};

/// Trials per reduction block. Fixed so that sums do not depend on scheduling.
const CHUNK: usize = 64;

/// i.i.d. uniform draws over the constellation points.
pub fn draw_symbols<S: Real, R: Rng + ?Sized>(c: &Constellation<S>, n: usize, rng: &mut R) -> Result<Vec<Complex<S>>> {
    if c.is_gaussian() {
        return Err(FtnError::Constellation {
            name: c.name().into(),
            reason: "the Gaussian entry has no finite alphabet to sample".into(),
        });
    }
    if n == 0 {
        return Err(FtnError::param("N", "symbol count must be at least 1"));
    }
    let pts = c.points();
    Ok((0..n).map(|_| pts[rng.random_range(0..pts.len())]).collect())
}

/// Calls `f` on every sequence in `points^n`, in lexicographic order.
pub fn for_each_sequence<S: Real>(points: &[Complex<S>], n: usize, mut f: impl FnMut(&[Complex<S>])) {
    if points.is_empty() {
        return;
    }
    let mut idx = vec![0usize; n];
    let mut x = vec![points[0]; n];
    loop {
        f(&x);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < points.len() {
                x[k] = points[idx[k]];
                break;
            }
            idx[k] = 0;
            x[k] = points[0];
        }
    }
}

#[derive(Debug, Clone)]
pub struct McConfig<S> {
    pub trials: usize,
    pub seed: u64,
    pub xi: S,
    pub n: usize,
    pub pulse: PulseSpec<S>,
    pub constellation: Constellation<S>,
    pub es: S,
}

impl<S: Real> McConfig<S> {
    /// Frame of `round(n_nyquist / ξ)` symbols at unit power.
    pub fn fair(pulse: PulseSpec<S>, xi: S, n_nyquist: usize, constellation: Constellation<S>, trials: usize, seed: u64) -> Self {
        let es = fair_symbol_energy(S::one(), xi, pulse.period());
        McConfig { trials, seed, xi, n: fair_symbol_count(n_nyquist, xi), pulse, constellation, es }
    }

    fn validate(&self) -> Result<()> {
        check_compression(self.xi)?;
        if self.trials == 0 {
            return Err(FtnError::param("trials", "at least one trial is required"));
        }
        if self.n == 0 {
            return Err(FtnError::param("N", "symbol count must be at least 1"));
        }
        if self.constellation.is_gaussian() {
            return Err(FtnError::Constellation {
                name: "gaussian".into(),
                reason: "Monte Carlo needs a finite alphabet".into(),
            });
        }
        Ok(())
    }
}

/// Phasors `e^{−j2πn'νξT}` for one `ν` and the `(output slot, AF_p(dξT + τ, ν))`
/// tables of every grid point sharing it.
type DopplerGroup<S> = (Vec<Complex<S>>, Vec<(usize, Vec<Complex<S>>)>);

/// Per-point pulse-AF tables grouped by Doppler so each block costs one
/// correlation per distinct `ν`.
struct AfSampler<S> {
    n: usize,
    groups: Vec<DopplerGroup<S>>,
    slots: usize,
}

impl<S: Real> AfSampler<S> {
    /// Slot 0 is always the origin; grid point `i` lands in slot `i + 1`.
    fn new(pulse: &PulseSpec<S>, xi: S, n: usize, points: &[(S, S)]) -> Self {
        let xt = xi * pulse.period();
        let r = n as i64 - 1;
        let mut all = vec![(S::zero(), S::zero())];
        all.extend_from_slice(points);
        let mut groups: Vec<(S, Vec<(usize, S)>)> = Vec::new();
        for (slot, &(tau, nu)) in all.iter().enumerate() {
            match groups.iter_mut().find(|g| g.0 == nu) {
                Some(g) => g.1.push((slot, tau)),
                None => groups.push((nu, vec![(slot, tau)])),
            }
        }
        let groups = groups
            .into_iter()
            .map(|(nu, members)| {
                let phasors = (1..=n)
                    .map(|k| cis(-S::two_pi() * S::from_usize_lossy(k) * nu * xt))
                    .collect();
                let tables = members
                    .into_iter()
                    .map(|(slot, tau)| {
                        let table = (-r..=r)
                            .into_par_iter()
                            .map(|d| pulse_af(pulse, S::from_i64_lossy(d) * xt + tau, nu))
                            .collect();
                        (slot, table)
                    })
                    .collect();
                (phasors, tables)
            })
            .collect();
        AfSampler { n, groups, slots: all.len() }
    }

    /// `|AF_s|²` per slot (up to the common `E_s²`).
    fn sample(&self, x: &[Complex<S>], out: &mut [S], corr: &mut Vec<Complex<S>>) {
        let n = self.n;
        for (phasors, tables) in &self.groups {
            // c_d = Σ_{n'} x*_{n'} e^{−j2πn'νξT} x_{n'−d}.
            corr.clear();
            corr.resize(2 * n - 1, Complex::new(S::zero(), S::zero()));
            for (jp, (xp, ph)) in x.iter().zip(phasors).enumerate() {
                let y = xp.conj() * ph;
                for (j, xj) in x.iter().enumerate() {
                    let slot = &mut corr[jp + n - 1 - j];
                    *slot = *slot + y * xj;
                }
            }
            for (slot, table) in tables {
                let v: Complex<S> = table.iter().zip(corr.iter()).map(|(a, c)| a * c).sum();
                out[*slot] = v.norm_sqr();
            }
        }
    }
}

fn axis_points<S: Real>(axis: SliceAxis, grid: &[S]) -> Vec<(S, S)> {
    grid.iter().map(|&x| axis.point(x)).collect()
}

/// Average of `|AF_s(·)|² / |AF_s(0, 0)|²` over random symbol blocks.
pub fn mc_af_slice<S: Real>(cfg: &McConfig<S>, axis: SliceAxis, grid: &[S]) -> Result<AfSlice<S>> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(FtnError::param("grid", "slice grid is empty"));
    }
    let sampler = AfSampler::new(&cfg.pulse, cfg.xi, cfg.n, &axis_points(axis, grid));
    let chunks = cfg.trials.div_ceil(CHUNK);
    let partials: Vec<Vec<S>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![S::zero(); grid.len()];
            let mut out = vec![S::zero(); sampler.slots];
            let mut corr = Vec::new();
            for t in c * CHUNK..((c + 1) * CHUNK).min(cfg.trials) {
                let mut rng = trial_rng(cfg.seed, t as u64);
                let x = draw_symbols(&cfg.constellation, cfg.n, &mut rng).expect("validated config");
                sampler.sample(&x, &mut out, &mut corr);
                for (a, v) in acc.iter_mut().zip(&out[1..]) {
                    *a = *a + *v / out[0];
                }
            }
            acc
        })
        .collect();
    let total = S::from_usize_lossy(cfg.trials);
    let mut values = vec![S::zero(); grid.len()];
    for p in &partials {
        for (v, a) in values.iter_mut().zip(p) {
            *v = *v + *a;
        }
    }
    for v in &mut values {
        *v = *v / total;
    }
    Ok(slice(cfg, axis, grid, values))
}

/// Exact average over all `M^N` symbol blocks of the normalized squared AF.
pub fn exhaustive_af_slice<S: Real>(cfg: &McConfig<S>, axis: SliceAxis, grid: &[S]) -> Result<AfSlice<S>> {
    cfg.validate()?;
    let m = cfg.constellation.points().len();
    let count = (m as f64).powi(cfg.n as i32);
    if count > 1e8 {
        return Err(FtnError::param("N", format!("{count} sequences is too many to enumerate")));
    }
    let sampler = AfSampler::new(&cfg.pulse, cfg.xi, cfg.n, &axis_points(axis, grid));
    let mut values = vec![S::zero(); grid.len()];
    let mut out = vec![S::zero(); sampler.slots];
    let mut corr = Vec::new();
    for_each_sequence(cfg.constellation.points(), cfg.n, |x| {
        sampler.sample(x, &mut out, &mut corr);
        for (a, v) in values.iter_mut().zip(&out[1..]) {
            *a = *a + *v / out[0];
        }
    });
    let total = S::lit(count);
    for v in &mut values {
        *v = *v / total;
    }
    Ok(slice(cfg, axis, grid, values))
}

fn slice<S: Real>(cfg: &McConfig<S>, axis: SliceAxis, grid: &[S], values: Vec<S>) -> AfSlice<S> {
    AfSlice {
        axis,
        grid: grid.to_vec(),
        values,
        xi: cfg.xi,
        n: cfg.n,
        period: cfg.pulse.period(),
        beta: cfg.pulse.beta(),
        mu4: cfg.constellation.kurtosis(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Target<S> {
    pub reflectivity: S,
    /// Doppler shift in Hz.
    pub doppler: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DopplerScene<S> {
    pub targets: Vec<Target<S>>,
    pub snr_db: Vec<S>,
    pub trials: usize,
    pub seed: u64,
    /// Doppler scored against when set; otherwise the weakest target's.
    pub reference_doppler: Option<S>,
}

impl<S: Real> DopplerScene<S> {
    /// Strong unit target at `νT = 0.5` and a 15% target at `νT = −0.4`.
    pub fn two_target(period: S, snr_db: Vec<S>, trials: usize, seed: u64) -> Self {
        DopplerScene {
            targets: vec![
                Target { reflectivity: S::one(), doppler: S::lit(0.5) / period },
                Target { reflectivity: S::lit(0.15), doppler: S::lit(-0.4) / period },
            ],
            snr_db,
            trials,
            seed,
            reference_doppler: None,
        }
    }

    fn truth(&self) -> Result<S> {
        if let Some(r) = self.reference_doppler {
            return Ok(r);
        }
        let mut weakest: Option<&Target<S>> = None;
        for t in &self.targets {
            if weakest.is_none_or(|w| t.reflectivity <= w.reflectivity) {
                weakest = Some(t);
            }
        }
        weakest
            .map(|t| t.doppler)
            .ok_or_else(|| FtnError::param("targets", "need a target or a reference Doppler"))
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(FtnError::param("trials", "at least one trial is required"));
        }
        if self.snr_db.is_empty() {
            return Err(FtnError::param("snr_db", "SNR grid is empty"));
        }
        for t in &self.targets {
            if !(t.reflectivity > S::zero()) || !t.doppler.is_finite() {
                return Err(FtnError::param("targets", "reflectivity must be positive and Doppler finite"));
            }
        }
        Ok(())
    }
}

/// Matched-filter receiver and waveform-synthesis settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DopplerReceiver<S> {
    /// Symbols per frame at `ξ = 1`; FTN frames use `round(N / ξ)`.
    pub n_nyquist: usize,
    pub samples_per_period: usize,
    /// Pulse tail kept on each side of the frame, in periods.
    pub guard_periods: S,
    /// Doppler grid step is `1 / (oversampling · NξT)`.
    pub grid_oversampling: usize,
    /// Excision half-width around the first peak, in units of `1 / (NξT)`.
    pub excision_lobes: S,
    /// Search window `|ν| ≤ half_width / T`.
    pub search_half_width: S,
    pub power: S,
}

impl<S: Real> Default for DopplerReceiver<S> {
    fn default() -> Self {
        DopplerReceiver {
            n_nyquist: 512,
            samples_per_period: 4,
            guard_periods: S::lit(24.0),
            grid_oversampling: 8,
            excision_lobes: S::lit(4.0),
            search_half_width: S::one(),
            power: S::one(),
        }
    }
}

impl<S: Real> DopplerReceiver<S> {
    fn validate(&self) -> Result<()> {
        if self.n_nyquist == 0 || self.samples_per_period == 0 || self.grid_oversampling == 0 {
            return Err(FtnError::param("receiver", "counts must be positive"));
        }
        if !(self.guard_periods >= S::zero()) || !(self.excision_lobes >= S::zero()) {
            return Err(FtnError::param("receiver", "guard and excision must be nonnegative"));
        }
        if !(self.search_half_width > S::zero()) || !(self.power > S::zero()) {
            return Err(FtnError::param("receiver", "search window and power must be positive"));
        }
        Ok(())
    }
}

/// Sampled transmit pulses and the receiver's Doppler grid for one waveform.
struct Synth<S> {
    n: usize,
    dt: S,
    times: Vec<S>,
    // basis[k * len + i] = p(t_i − (k + 1)ξT).
    basis: Vec<S>,
    fft_len: usize,
    // (Doppler in Hz, FFT bin) inside the search window, sorted by Doppler.
    bins: Vec<(S, usize)>,
    excision: S,
}

impl<S: Real> Synth<S> {
    fn new(pulse: &PulseSpec<S>, xi: S, rx: &DopplerReceiver<S>) -> Self {
        let period = pulse.period();
        let n = fair_symbol_count(rx.n_nyquist, xi);
        let xt = xi * period;
        let dt = period / S::from_usize_lossy(rx.samples_per_period);
        let start = xt - rx.guard_periods * period;
        let stop = S::from_usize_lossy(n) * xt + rx.guard_periods * period;
        let len = ((stop - start) / dt).floor().to_usize().unwrap_or(0) + 1;
        let times: Vec<S> = (0..len).map(|i| start + S::from_usize_lossy(i) * dt).collect();
        let mut basis = vec![S::zero(); n * len];
        basis.par_chunks_mut(len).enumerate().for_each(|(k, row)| {
            let centre = S::from_usize_lossy(k + 1) * xt;
            for (v, &t) in row.iter_mut().zip(&times) {
                *v = pulse.impulse_response(t - centre);
            }
        });
        let frame = S::from_usize_lossy(n) * xt;
        let wanted = (S::from_usize_lossy(rx.grid_oversampling) * frame / dt).round().to_usize().unwrap_or(len);
        let fft_len = wanted.max(len);
        let df = S::one() / (S::from_usize_lossy(fft_len) * dt);
        let limit = rx.search_half_width / period;
        let mut bins: Vec<(S, usize)> = (0..fft_len)
            .map(|k| {
                let signed = if 2 * k <= fft_len { k as i64 } else { k as i64 - fft_len as i64 };
                (S::from_i64_lossy(signed) * df, k)
            })
            .filter(|(nu, _)| nu.abs() <= limit)
            .collect();
        bins.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite grid"));
        Synth { n, dt, times, basis, fft_len, bins, excision: rx.excision_lobes / frame }
    }

    fn transmit(&self, x: &[Complex<S>], amplitude: S) -> Vec<Complex<S>> {
        let len = self.times.len();
        let mut s = vec![Complex::new(S::zero(), S::zero()); len];
        for (k, a) in x.iter().enumerate() {
            let a = *a * amplitude;
            for (v, p) in s.iter_mut().zip(&self.basis[k * len..(k + 1) * len]) {
                *v = *v + a * *p;
            }
        }
        s
    }

    /// Doppler of the strongest bin, and of the strongest bin outside the
    /// excision window around it.
    fn peaks(&self, spectrum: &[Complex<S>]) -> (S, Option<S>) {
        let mag = |k: usize| spectrum[k].norm_sqr();
        let mut first = self.bins[0];
        for b in &self.bins {
            if mag(b.1) > mag(first.1) {
                first = *b;
            }
        }
        let mut second: Option<(S, usize)> = None;
        for b in &self.bins {
            if (b.0 - first.0).abs() < self.excision {
                continue;
            }
            if second.is_none_or(|s| mag(b.1) > mag(s.1)) {
                second = Some(*b);
            }
        }
        (first.0, second.map(|s| s.0))
    }
}

/// Mean squared Doppler error per SNR point with the default receiver.
pub fn doppler_mse<S: Real + FftNum>(
    scene: &DopplerScene<S>,
    pulse: &PulseSpec<S>,
    xi: S,
    constellation: &Constellation<S>,
) -> Result<Vec<S>> {
    doppler_mse_with(scene, &DopplerReceiver::default(), pulse, xi, constellation)
}

/// Mean squared Doppler error per SNR point. Each trial draws one symbol
/// block, target phases and unit noise, reused across the SNR grid.
pub fn doppler_mse_with<S: Real + FftNum>(
    scene: &DopplerScene<S>,
    rx: &DopplerReceiver<S>,
    pulse: &PulseSpec<S>,
    xi: S,
    constellation: &Constellation<S>,
) -> Result<Vec<S>> {
    check_compression(xi)?;
    scene.validate()?;
    rx.validate()?;
    let truth = scene.truth()?;
    if constellation.is_gaussian() {
        return Err(FtnError::Constellation {
            name: "gaussian".into(),
            reason: "Doppler simulation needs a finite alphabet".into(),
        });
    }
    let synth = Synth::new(pulse, xi, rx);
    let fft = FftPlanner::<S>::new().plan_fft_forward(synth.fft_len);
    let es = fair_symbol_energy(rx.power, xi, pulse.period());
    let sigmas: Vec<S> = scene
        .snr_db
        .iter()
        .map(|&db| (rx.power / db_to_linear(db) / synth.dt).sqrt())
        .collect();
    let pick_second = scene.targets.len() >= 2;
    let chunks = scene.trials.div_ceil(CHUNK);
    let partials: Vec<Vec<S>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![S::zero(); sigmas.len()];
            let mut buf = vec![Complex::new(S::zero(), S::zero()); synth.fft_len];
            let mut scratch = vec![Complex::new(S::zero(), S::zero()); fft.get_inplace_scratch_len()];
            for t in c * CHUNK..((c + 1) * CHUNK).min(scene.trials) {
                let mut rng = trial_rng(scene.seed, t as u64);
                let x = draw_symbols(constellation, synth.n, &mut rng).expect("validated constellation");
                let s = synth.transmit(&x, es.sqrt());
                let mut echo = vec![Complex::new(S::zero(), S::zero()); s.len()];
                for tg in &scene.targets {
                    let phase = S::lit(rng.random::<f64>()) * S::two_pi();
                    let w = S::two_pi() * tg.doppler;
                    for ((e, si), &ti) in echo.iter_mut().zip(&s).zip(&synth.times) {
                        *e = *e + *si * cis(w * ti + phase) * tg.reflectivity;
                    }
                }
                let half = S::lit(0.5).sqrt();
                let noise: Vec<Complex<S>> = (0..s.len())
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex::new(S::lit(re), S::lit(im)) * half
                    })
                    .collect();
                for (k, &sigma) in sigmas.iter().enumerate() {
                    for v in buf.iter_mut() {
                        *v = Complex::new(S::zero(), S::zero());
                    }
                    for (i, b) in buf.iter_mut().take(s.len()).enumerate() {
                        *b = (echo[i] + noise[i] * sigma) * s[i].conj();
                    }
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    let (first, second) = synth.peaks(&buf);
                    let est = if pick_second { second.unwrap_or(first) } else { first };
                    let err = est - truth;
                    acc[k] = acc[k] + err * err;
                }
            }
            acc
        })
        .collect();
    let mut mse = vec![S::zero(); sigmas.len()];
    for p in &partials {
        for (m, a) in mse.iter_mut().zip(p) {
            *m = *m + *a;
        }
    }
    let total = S::from_usize_lossy(scene.trials);
    Ok(mse.into_iter().map(|m| m / total).collect())
}

/// Doppler grid step of the receiver for this waveform.
pub fn doppler_grid_step<S: Real>(pulse: &PulseSpec<S>, xi: S, rx: &DopplerReceiver<S>) -> S {
    let n = fair_symbol_count(rx.n_nyquist, xi);
    let dt = pulse.period() / S::from_usize_lossy(rx.samples_per_period);
    let frame = S::from_usize_lossy(n) * xi * pulse.period();
    let len = ((frame + S::lit(2.0) * rx.guard_periods * pulse.period() - xi * pulse.period()) / dt)
        .floor()
        .to_usize()
        .unwrap_or(0)
        + 1;
    let wanted = (S::from_usize_lossy(rx.grid_oversampling) * frame / dt).round().to_usize().unwrap_or(len);
    S::one() / (S::from_usize_lossy(wanted.max(len)) * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::af_slice;
    use approx::assert_abs_diff_eq;

    fn rrc(beta: f64) -> PulseSpec<f64> {
        PulseSpec::rrc(beta, 1.0).unwrap()
    }

    #[test]
    fn symbol_moments() {
        let mut rng = trial_rng(11, 0);
        let x = draw_symbols(&Constellation::<f64>::qpsk(), 100_000, &mut rng).unwrap();
        let p: f64 = x.iter().map(|a| a.norm_sqr()).sum::<f64>() / x.len() as f64;
        let m4: f64 = x.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>() / x.len() as f64;
        assert!((p - 1.0).abs() < 0.01);
        assert_abs_diff_eq!(m4, 1.0, epsilon = 1e-9);
        let x = draw_symbols(&Constellation::<f64>::qam16(), 1_000_000, &mut rng).unwrap();
        let m4: f64 = x.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>() / x.len() as f64;
        assert!((m4 / 1.32 - 1.0).abs() < 0.01, "{m4}");
        assert!(draw_symbols(&Constellation::<f64>::gaussian(), 3, &mut rng).is_err());
    }

    #[test]
    fn enumeration_visits_every_sequence_once() {
        let pts = Constellation::<f64>::qpsk().points().to_vec();
        let mut seen = std::collections::BTreeSet::new();
        let mut count = 0;
        for_each_sequence(&pts, 3, |x| {
            count += 1;
            seen.insert(format!("{x:?}"));
        });
        assert_eq!(count, 64);
        assert_eq!(seen.len(), 64);
    }

    fn cfg(trials: usize, seed: u64) -> McConfig<f64> {
        McConfig { trials, seed, xi: 0.8, n: 3, pulse: rrc(0.3), constellation: Constellation::qpsk(), es: 0.8 }
    }

    #[test]
    fn origin_is_one_and_seed_deterministic() {
        let a = mc_af_slice(&cfg(200, 5), SliceAxis::Delay, &[0.0, 0.5, 1.3]).unwrap();
        let b = mc_af_slice(&cfg(200, 5), SliceAxis::Delay, &[0.0, 0.5, 1.3]).unwrap();
        assert_eq!(a.values[0], 1.0);
        assert_eq!(a, b);
        let c = mc_af_slice(&cfg(200, 6), SliceAxis::Delay, &[0.0, 0.5, 1.3]).unwrap();
        assert_ne!(a.values[1], c.values[1]);
        assert!(mc_af_slice(&cfg(0, 5), SliceAxis::Delay, &[0.0]).is_err());
    }

    #[test]
    fn exhaustive_matches_direct_enumeration() {
        let c = cfg(1, 0);
        let grid = [0.4, 1.1];
        let ex = exhaustive_af_slice(&c, SliceAxis::Doppler, &grid).unwrap();
        for (i, &nu) in grid.iter().enumerate() {
            let af = crate::ambiguity::SignalAf::new(&c.pulse, c.xi, 3, 0.0, nu, c.es).unwrap();
            let af0 = crate::ambiguity::SignalAf::new(&c.pulse, c.xi, 3, 0.0, 0.0, c.es).unwrap();
            let mut acc = 0.0;
            for_each_sequence(c.constellation.points(), 3, |x| {
                acc += af.eval(x).norm_sqr() / af0.eval(x).norm_sqr();
            });
            assert_abs_diff_eq!(ex.values[i], acc / 64.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn converges_toward_closed_form() {
        // At N = 1 the normalized ratio is deterministic, so use a block long
        // enough that the symbol pattern matters.
        let base = McConfig { trials: 1, seed: 17, xi: 0.8, n: 8, pulse: rrc(0.3), constellation: Constellation::qpsk(), es: 0.8 };
        let grid: Vec<f64> = (0..9).map(|i| 0.15 * i as f64).collect();
        let exact = exhaustive_af_slice(&base, SliceAxis::Doppler, &grid).unwrap();
        let sup = |trials: usize| {
            let s = mc_af_slice(&McConfig { trials, ..base.clone() }, SliceAxis::Doppler, &grid).unwrap();
            s.values.iter().zip(&exact.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        assert!(sup(40_000) < sup(2_500));
        let closed = af_slice(&base.pulse, base.xi, base.n, &base.constellation, SliceAxis::Doppler, &grid, base.es).unwrap();
        assert_eq!(closed.values[0], 1.0);
    }

    fn small_rx() -> DopplerReceiver<f64> {
        DopplerReceiver { n_nyquist: 64, guard_periods: 12.0, ..DopplerReceiver::default() }
    }

    #[test]
    fn noiseless_single_target_hits_grid() {
        let p = rrc(0.5);
        let rx = small_rx();
        let scene = DopplerScene {
            targets: vec![Target { reflectivity: 1.0, doppler: 0.5 }],
            snr_db: vec![300.0],
            trials: 4,
            seed: 3,
            reference_doppler: None,
        };
        let mse = doppler_mse_with(&scene, &rx, &p, 0.6, &Constellation::qpsk()).unwrap();
        let step = doppler_grid_step(&p, 0.6, &rx);
        assert!(mse[0] <= step * step, "{} > {}", mse[0], step * step);
    }

    #[test]
    fn doppler_deterministic_and_validated() {
        let p = rrc(0.5);
        let rx = small_rx();
        let scene = DopplerScene::two_target(1.0, vec![0.0, 10.0], 8, 9);
        let a = doppler_mse_with(&scene, &rx, &p, 0.6, &Constellation::qpsk()).unwrap();
        let b = doppler_mse_with(&scene, &rx, &p, 0.6, &Constellation::qpsk()).unwrap();
        assert_eq!(a, b);
        let empty = DopplerScene { targets: vec![], ..scene.clone() };
        assert!(doppler_mse_with(&empty, &rx, &p, 0.6, &Constellation::qpsk()).is_err());
        let bad = DopplerScene { trials: 0, ..scene };
        assert!(doppler_mse_with(&bad, &rx, &p, 0.6, &Constellation::qpsk()).is_err());
    }

    #[test]
    fn pure_noise_is_a_uniform_guess() {
        let p = rrc(0.5);
        let rx = small_rx();
        let scene = DopplerScene {
            targets: vec![],
            snr_db: vec![0.0],
            trials: 400,
            seed: 21,
            reference_doppler: Some(0.0),
        };
        let mse = doppler_mse_with(&scene, &rx, &p, 0.6, &Constellation::qpsk()).unwrap()[0];
        // Uniform over [−1, 1] has variance 1/3.
        let uniform = 1.0 / 3.0;
        assert!(mse > uniform / 2.0 && mse < uniform * 2.0, "{mse}");
    }
}
