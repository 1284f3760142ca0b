//! Globally adaptive 21-point Gauss–Kronrod integration with caller-supplied
//! breakpoints, for real- and complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

/// Default absolute tolerance for one-dimensional integrals.
pub const ABS_TOL: f64 = 1e-12;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_783_600,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Value type an integrand may return.
pub trait Integrand<S: Real>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<S, Output = Self>
{
    fn magnitude(self) -> S;
}

impl<S: Real> Integrand<S> for S {
    fn magnitude(self) -> S {
        self.abs()
    }
}

impl<S: Real> Integrand<S> for Complex<S> {
    fn magnitude(self) -> S {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<V, S> {
    pub value: V,
    pub error: S,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<S> {
    pub abs_tol: S,
    pub rel_tol: S,
    pub max_intervals: usize,
    /// Upper bound on the width of the initial panels; `None` keeps the
    /// breakpoint partition as is.
    pub max_panel: Option<S>,
}

impl<S: Real> Default for Quadrature<S> {
    fn default() -> Self {
        Quadrature {
            abs_tol: S::lit(ABS_TOL),
            rel_tol: S::lit(1e-12),
            max_intervals: 20_000,
            max_panel: None,
        }
    }
}

struct Panel<V, S> {
    a: S,
    b: S,
    value: V,
    error: S,
    // f64 copy of `error` so the heap can order panels without `Ord` on `S`.
    key: f64,
}

impl<V, S> PartialEq for Panel<V, S> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<V, S> Eq for Panel<V, S> {}
impl<V, S> PartialOrd for Panel<V, S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V, S> Ord for Panel<V, S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn kronrod<S: Real, V: Integrand<S>, F: FnMut(S) -> V>(f: &mut F, a: S, b: S) -> (V, S, bool) {
    let half = (b - a) * S::lit(0.5);
    let center = (a + b) * S::lit(0.5);
    let fc = f(center);
    let mut res_k = fc * S::lit(WGK[10]);
    let mut res_g = V::zero();
    let mut vals = [V::zero(); 21];
    vals[10] = fc;
    for j in 0..10 {
        let dx = half * S::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        vals[j] = f1;
        vals[20 - j] = f2;
        res_k = res_k + (f1 + f2) * S::lit(WGK[j]);
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * S::lit(WG[j / 2]);
        }
    }
    let mean = res_k * S::lit(0.5);
    let mut res_asc = (fc - mean).magnitude() * S::lit(WGK[10]);
    let mut res_abs = fc.magnitude() * S::lit(WGK[10]);
    for j in 0..10 {
        let w = S::lit(WGK[j]);
        res_asc = res_asc + ((vals[j] - mean).magnitude() + (vals[20 - j] - mean).magnitude()) * w;
        res_abs = res_abs + (vals[j].magnitude() + vals[20 - j].magnitude()) * w;
    }
    let scale = half.abs();
    res_asc = res_asc * scale;
    res_abs = res_abs * scale;
    let mut err = ((res_k - res_g) * half).magnitude();
    if res_asc > S::zero() && err > S::zero() {
        let ratio = (S::lit(200.0) * err / res_asc).powf(S::lit(1.5));
        err = res_asc * ratio.min(S::one());
    }
    let roundoff = S::lit(50.0) * S::epsilon() * res_abs;
    let at_floor = err <= roundoff;
    (res_k * half, err.max(roundoff), at_floor)
}

impl<S: Real> Quadrature<S> {
    pub fn with_tolerance(abs_tol: S, rel_tol: S) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn max_panel(mut self, width: S) -> Self {
        self.max_panel = Some(width);
        self
    }

    /// Integrates `f` over `[a, b]`. Points of `breaks` strictly inside the
    /// interval become initial panel boundaries.
    pub fn integrate<V, F>(&self, mut f: F, a: S, b: S, breaks: &[S]) -> QuadResult<V, S>
    where
        V: Integrand<S>,
        F: FnMut(S) -> V,
    {
        if !(b > a) {
            return QuadResult {
                value: V::zero(),
                error: S::zero(),
                converged: a == b,
            };
        }
        let mut knots = vec![a];
        let mut inner: Vec<S> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        inner.dedup();
        knots.extend(inner);
        knots.push(b);

        let mut heap = BinaryHeap::new();
        let mut settled_value = V::zero();
        let mut settled_error = S::zero();
        let min_width = S::lit(64.0) * S::epsilon() * a.abs().max(b.abs()).max(S::one());

        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let pieces = match self.max_panel {
                Some(p) if p > S::zero() => ((hi - lo) / p).ceil().to_usize().unwrap_or(1).clamp(1, self.max_intervals),
                _ => 1,
            };
            let step = (hi - lo) / S::from_usize_lossy(pieces);
            for i in 0..pieces {
                let pa = lo + step * S::from_usize_lossy(i);
                let pb = if i + 1 == pieces { hi } else { pa + step };
                let (value, error, at_floor) = kronrod(&mut f, pa, pb);
                if at_floor || pb - pa <= min_width {
                    settled_value = settled_value + value;
                    settled_error = settled_error + error;
                } else {
                    heap.push(Panel { a: pa, b: pb, value, error, key: error.to_f64_lossy() });
                }
            }
        }

        let mut count = heap.len();
        loop {
            let mut value = settled_value;
            let mut error = settled_error;
            for p in heap.iter() {
                value = value + p.value;
                error = error + p.error;
            }
            let tol = self.abs_tol.max(self.rel_tol * value.magnitude());
            if error <= tol || heap.is_empty() {
                return QuadResult { value, error, converged: true };
            }
            if count >= self.max_intervals {
                return QuadResult { value, error, converged: false };
            }
            // Bisect the worst panels in a batch before re-summing, which keeps
            // the bookkeeping linear in the number of panels.
            let batch = (heap.len() / 8).max(1);
            for _ in 0..batch {
                let Some(worst) = heap.pop() else { break };
                let mid = (worst.a + worst.b) * S::lit(0.5);
                for (pa, pb) in [(worst.a, mid), (mid, worst.b)] {
                    let (value, error, at_floor) = kronrod(&mut f, pa, pb);
                    if at_floor || pb - pa <= min_width {
                        settled_value = settled_value + value;
                        settled_error = settled_error + error;
                    } else {
                        heap.push(Panel { a: pa, b: pb, value, error, key: error.to_f64_lossy() });
                    }
                }
                count += 1;
            }
        }
    }
}

/// Convenience wrapper using the default tolerances.
pub fn integrate<S, V, F>(f: F, a: S, b: S, breaks: &[S]) -> V
where
    S: Real,
    V: Integrand<S>,
    F: FnMut(S) -> V,
{
    Quadrature::default().integrate(f, a, b, breaks).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = Quadrature::<f64>::default().integrate(|x: f64| x.powi(7) - 3.0 * x * x, -1.0, 2.0, &[]);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert_relative_eq!(r.value, exact, epsilon = 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn kink_at_breakpoint() {
        let v: f64 = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &[0.0]);
        assert_relative_eq!(v, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        let t = 300.0;
        let q = Quadrature::<f64>::default().max_panel(1.0 / t);
        let r = q.integrate(|f: f64| Complex::new(0.0, 2.0 * std::f64::consts::PI * f * t).exp(), 0.0, 1.3, &[]);
        let exact = (Complex::new(0.0, 2.0 * std::f64::consts::PI * 1.3 * t).exp() - 1.0)
            / Complex::new(0.0, 2.0 * std::f64::consts::PI * t);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn single_precision_terminates() {
        let r = Quadrature::<f32>::default().integrate(|x: f32| x.cos(), 0.0, 3.0, &[]);
        assert!((r.value - 3f32.sin()).abs() < 1e-5);
    }

    #[test]
    fn empty_interval() {
        let r = Quadrature::<f64>::default().integrate(|x: f64| x, 1.0, 1.0, &[]);
        assert_eq!(r.value, 0.0);
    }
}
