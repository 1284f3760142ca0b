//! Band-limited, unit-energy shaping pulses and their folded spectra.

use serde::{Deserialize, Serialize};

use crate::error::{FtnError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseFamily {
    Rrc,
    Sinc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldedSpectrumKind {
    Folded,
    Twisted,
}

/// A shaping pulse described through its energy spectrum `|Hp(f)|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<S> {
    family: PulseFamily,
    beta: S,
    period: S,
}

/// Rejects compression factors outside `(0, 1]`.
pub fn check_compression<S: Real>(xi: S) -> Result<()> {
    if xi > S::zero() && xi <= S::one() {
        Ok(())
    } else {
        Err(FtnError::param("xi", format!("compression factor must lie in (0, 1], got {xi}")))
    }
}

impl<S: Real> PulseSpec<S> {
    /// Root-raised-cosine pulse with roll-off `beta` and Nyquist period `period`.
    pub fn rrc(beta: S, period: S) -> Result<Self> {
        if !(beta >= S::zero() && beta <= S::one()) {
            return Err(FtnError::param("beta", format!("roll-off must lie in [0, 1], got {beta}")));
        }
        Self::check_period(period)?;
        Ok(PulseSpec { family: PulseFamily::Rrc, beta, period })
    }

    /// Ideal sinc pulse, the zero roll-off member of the family.
    pub fn sinc(period: S) -> Result<Self> {
        Self::check_period(period)?;
        Ok(PulseSpec { family: PulseFamily::Sinc, beta: S::zero(), period })
    }

    pub fn new(family: PulseFamily, beta: S, period: S) -> Result<Self> {
        match family {
            PulseFamily::Rrc => Self::rrc(beta, period),
            PulseFamily::Sinc => Self::sinc(period),
        }
    }

    fn check_period(period: S) -> Result<()> {
        if period > S::zero() && period.is_finite() {
            Ok(())
        } else {
            Err(FtnError::param("T", format!("Nyquist period must be positive and finite, got {period}")))
        }
    }

    pub fn family(&self) -> PulseFamily {
        self.family
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn period(&self) -> S {
        self.period
    }

    /// Two-sided bandwidth `W`.
    pub fn bandwidth(&self) -> S {
        (S::one() + self.beta) / self.period
    }

    /// Largest compression factor free of spectral aliasing, `1/(WT)`.
    pub fn saturation_threshold(&self) -> S {
        S::one() / (self.bandwidth() * self.period)
    }

    fn passband_edge(&self) -> S {
        (S::one() - self.beta) / (S::lit(2.0) * self.period)
    }

    fn stopband_edge(&self) -> S {
        (S::one() + self.beta) / (S::lit(2.0) * self.period)
    }

    /// Frequencies where `|Hp|²` changes analytic form, in increasing order.
    pub fn spectrum_knots(&self) -> Vec<S> {
        let lo = self.passband_edge();
        let hi = self.stopband_edge();
        if self.beta == S::zero() {
            vec![-hi, hi]
        } else {
            vec![-hi, -lo, lo, hi]
        }
    }

    /// Amplitude spectrum `|Hp(f)|`; the pulse is real and zero-phase.
    pub fn amplitude(&self, f: S) -> S {
        let a = f.abs();
        let lo = self.passband_edge();
        let hi = self.stopband_edge();
        let peak = self.period.sqrt();
        if self.beta == S::zero() {
            return match a.partial_cmp(&lo) {
                Some(std::cmp::Ordering::Less) => peak,
                Some(std::cmp::Ordering::Equal) => peak * S::FRAC_1_SQRT_2(),
                _ => S::zero(),
            };
        }
        if a <= lo {
            peak
        } else if a >= hi {
            S::zero()
        } else {
            peak * (S::FRAC_PI_2() * self.period / self.beta * (a - lo)).cos()
        }
    }

    /// Energy spectrum `|Hp(f)|²`, exactly zero outside `[-W/2, W/2]`.
    pub fn spectrum_sq(&self, f: S) -> S {
        let h = self.amplitude(f);
        h * h
    }

    /// Number of alias copies on each side that can overlap the principal band.
    pub fn alias_reach(&self, xi: S) -> i64 {
        (self.bandwidth() * xi * self.period).ceil().to_i64().unwrap_or(1) + 1
    }

    /// Folded (`Σₙ |Hp(f − n/ξT)|²`) or twisted folded
    /// (`|Hp(f)|² − Σ_{n≠0} |Hp(f − n/ξT)|²`) spectrum; zero outside
    /// `[-1/(2ξT), 1/(2ξT)]`.
    pub fn folded_spectrum_sq(&self, xi: S, f: S, kind: FoldedSpectrumKind) -> Result<S> {
        check_compression(xi)?;
        Ok(self.folded_unchecked(xi, f, kind))
    }

    pub(crate) fn folded_unchecked(&self, xi: S, f: S, kind: FoldedSpectrumKind) -> S {
        let rate = S::one() / (xi * self.period);
        if f.abs() > rate * S::lit(0.5) {
            return S::zero();
        }
        let reach = self.alias_reach(xi);
        let centre = self.spectrum_sq(f);
        let mut aliases = S::zero();
        for n in 1..=reach {
            let shift = rate * S::from_i64_lossy(n);
            aliases = aliases + self.spectrum_sq(f - shift) + self.spectrum_sq(f + shift);
        }
        match kind {
            FoldedSpectrumKind::Folded => centre + aliases,
            FoldedSpectrumKind::Twisted => centre - aliases,
        }
    }

    /// Time-domain pulse `p(t)`, unit energy.
    pub fn impulse_response(&self, t: S) -> S {
        let tp = self.period;
        let x = t / tp;
        let norm = S::one() / tp.sqrt();
        let pi = S::PI();
        let b = self.beta;
        let small = S::lit(1e-8);
        if b == S::zero() {
            if x.abs() < small {
                return norm;
            }
            return norm * (pi * x).sin() / (pi * x);
        }
        let four = S::lit(4.0);
        if x.abs() < small {
            return norm * (S::one() + b * (four / pi - S::one()));
        }
        if ((four * b * x).abs() - S::one()).abs() < small {
            let two_over_pi = S::lit(2.0) / pi;
            let arg = pi / (four * b);
            return norm * b / S::lit(2.0).sqrt()
                * ((S::one() + two_over_pi) * arg.sin() + (S::one() - two_over_pi) * arg.cos());
        }
        let num = (pi * x * (S::one() - b)).sin() + four * b * x * (pi * x * (S::one() + b)).cos();
        let den = pi * x * (S::one() - (four * b * x).powi(2));
        norm * num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rrc(beta: f64) -> PulseSpec<f64> {
        PulseSpec::rrc(beta, 1.0).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let p = rrc(0.3);
        assert_eq!(p.spectrum_sq(0.0), 1.0);
        assert_abs_diff_eq!(p.spectrum_sq(0.5), 0.5, epsilon = 1e-15);
        assert_eq!(p.spectrum_sq(0.7), 0.0);
        assert_eq!(p.spectrum_sq(0.65), 0.0);
    }

    #[test]
    fn bandwidth_and_threshold() {
        assert_abs_diff_eq!(rrc(0.3).bandwidth(), 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rrc(0.5).bandwidth(), 1.5, epsilon = 1e-15);
        let s = PulseSpec::<f64>::sinc(1.0).unwrap();
        assert_eq!(s.bandwidth(), 1.0);
        assert_eq!(s.saturation_threshold(), 1.0);
        assert_abs_diff_eq!(rrc(0.3).saturation_threshold(), 1.0 / 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rrc(0.5).saturation_threshold(), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn folded_examples() {
        let p = rrc(0.3);
        let fo = p.folded_spectrum_sq(0.75, 0.6, FoldedSpectrumKind::Folded).unwrap();
        assert_eq!(fo, p.spectrum_sq(0.6));
        let fo = p.folded_spectrum_sq(1.0, 0.3, FoldedSpectrumKind::Folded).unwrap();
        assert_abs_diff_eq!(fo, 1.0, epsilon = 1e-14);
        let tw = p.folded_spectrum_sq(1.0, 0.5, FoldedSpectrumKind::Twisted).unwrap();
        assert_abs_diff_eq!(tw, 0.0, epsilon = 1e-15);
        assert!(p.folded_spectrum_sq(0.0, 0.1, FoldedSpectrumKind::Folded).is_err());
        assert!(p.folded_spectrum_sq(1.2, 0.1, FoldedSpectrumKind::Folded).is_err());
        assert_eq!(p.folded_spectrum_sq(0.9, 0.6, FoldedSpectrumKind::Folded).unwrap(), 0.0);
    }

    #[test]
    fn sinc_folds_flat() {
        let s = PulseSpec::<f64>::sinc(1.0).unwrap();
        for f in [-0.5, -0.2, 0.0, 0.3, 0.5] {
            assert_abs_diff_eq!(s.folded_spectrum_sq(1.0, f, FoldedSpectrumKind::Folded).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PulseSpec::rrc(-0.1, 1.0).is_err());
        assert!(PulseSpec::rrc(1.1, 1.0).is_err());
        assert!(PulseSpec::rrc(0.3, 0.0).is_err());
        assert!(PulseSpec::<f64>::sinc(f64::NAN).is_err());
    }

    #[test]
    fn unit_energy() {
        for beta in [0.0, 0.1, 0.3, 0.5, 1.0] {
            for period in [0.5, 1.0, 2.0] {
                let p = PulseSpec::rrc(beta, period).unwrap();
                let e: f64 = integrate(|f| p.spectrum_sq(f), -p.bandwidth(), p.bandwidth(), &p.spectrum_knots());
                assert_abs_diff_eq!(e, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn folded_tiles_unit_energy() {
        let p = rrc(0.3);
        for xi in [0.5, 0.7, 0.8, 0.9, 1.0] {
            let half = 0.5 / xi;
            let mut knots = Vec::new();
            for n in -3..=3 {
                for k in p.spectrum_knots() {
                    knots.push(k + n as f64 / xi);
                }
            }
            let e: f64 = integrate(
                |f| p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Folded).unwrap(),
                -half,
                half,
                &knots,
            );
            assert_abs_diff_eq!(e, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn time_domain_energy_and_special_points() {
        let p = rrc(0.3);
        let dt = 1.0 / 64.0;
        let mut e = 0.0;
        let mut t = -200.0;
        while t <= 200.0 {
            e += p.impulse_response(t).powi(2) * dt;
            t += dt;
        }
        assert_abs_diff_eq!(e, 1.0, epsilon = 2e-4);
        // Continuity across the removable singularities.
        let ts = 1.0 / (4.0 * 0.3);
        assert_abs_diff_eq!(p.impulse_response(ts), p.impulse_response(ts + 1e-6), epsilon = 1e-5);
        assert_abs_diff_eq!(p.impulse_response(0.0), p.impulse_response(1e-6), epsilon = 1e-9);
        // Inverse transform of the amplitude spectrum.
        for t in [0.37, 1.0, 2.5, 7.3] {
            let w = 2.0 * std::f64::consts::PI * t;
            let knots: Vec<f64> = p.spectrum_knots().into_iter().filter(|k| *k > 0.0).collect();
            let v = 2.0 * integrate(|f: f64| p.amplitude(f) * (w * f).cos(), 0.0, 0.65, &knots);
            assert_abs_diff_eq!(p.impulse_response(t), v, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_precision() {
        let p = PulseSpec::<f32>::rrc(0.3, 1.0).unwrap();
        assert!((p.saturation_threshold() - 0.769_230_8).abs() < 1e-6);
        assert_eq!(p.spectrum_sq(0.0), 1.0);
    }

    proptest! {
        #[test]
        fn spectrum_symmetric_and_bounded(beta in 0.0f64..=1.0, f in -2.0f64..2.0, period in 0.2f64..5.0) {
            let p = PulseSpec::rrc(beta, period).unwrap();
            let v = p.spectrum_sq(f);
            prop_assert_eq!(v, p.spectrum_sq(-f));
            prop_assert!(v >= 0.0 && v <= period * (1.0 + 1e-15));
            if f.abs() > p.bandwidth() / 2.0 {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn no_aliasing_below_threshold(beta in 0.05f64..=1.0, frac in 0.05f64..=1.0, f in -1.0f64..1.0) {
            let p = PulseSpec::rrc(beta, 1.0).unwrap();
            let xi = p.saturation_threshold() * frac;
            let f = f * 0.5 / xi;
            let fo = p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Folded).unwrap();
            let tw = p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Twisted).unwrap();
            prop_assert_eq!(fo, p.spectrum_sq(f));
            prop_assert_eq!(tw, p.spectrum_sq(f));
        }

        #[test]
        fn twisted_below_folded(beta in 0.0f64..=1.0, xi in 0.3f64..=1.0, u in -1.0f64..=1.0) {
            let p = PulseSpec::rrc(beta, 1.0).unwrap();
            let f = u * 0.5 / xi;
            let fo = p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Folded).unwrap();
            let tw = p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Twisted).unwrap();
            prop_assert!(tw <= fo);
            let aliased = fo - p.spectrum_sq(f) > 0.0;
            prop_assert_eq!(tw < fo, aliased);
        }
    }
}
