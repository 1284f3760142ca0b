//! Minimal dense complex matrices: just enough for Hermitian log-determinants.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{FtnError, Result};
use crate::isi::IsiMatrix;
use crate::scalar::Real;

/// Square, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<S> {
    n: usize,
    data: Vec<Complex<S>>,
}

impl<S: Real> CMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(S::one(), S::zero());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<S> {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex<S>) {
        self.data[r * self.n + c] = v;
    }

    fn row(&self, r: usize) -> &[Complex<S>] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    /// `self += scale · toeplitz`.
    pub fn add_toeplitz(&mut self, t: &IsiMatrix<S>, scale: Complex<S>) {
        assert_eq!(t.size(), self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                self.data[r * self.n + c] = self.data[r * self.n + c] + scale * t.entry(r, c);
            }
        }
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &CMatrix<S>, scale: S) {
        assert_eq!(other.n, self.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * scale;
        }
    }

    /// `A · Aᴴ`, Hermitian by construction.
    pub fn gram(&self) -> CMatrix<S> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let ri = self.row(i);
            for j in 0..=i {
                let rj = self.row(j);
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc = acc + ri[k] * rj[k].conj();
                }
                out.data[i * n + j] = acc;
                out.data[j * n + i] = acc.conj();
            }
        }
        out
    }
}

/// Natural-log determinant of a Hermitian positive-definite matrix via
/// Cholesky factorization. Only the lower triangle is read.
pub fn hermitian_logdet<S: Real>(a: &CMatrix<S>) -> Result<S> {
    let n = a.n;
    let mut l = vec![Complex::<S>::zero(); n * n];
    let mut logdet = S::zero();
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d = d - l[j * n + k].norm_sqr();
        }
        if !(d > S::zero()) || !d.is_finite() {
            return Err(FtnError::Conditioning { index: j, pivot: d.to_f64_lossy() });
        }
        let ljj = d.sqrt();
        l[j * n + j] = Complex::new(ljj, S::zero());
        logdet = logdet + ljj.ln();
        for i in j + 1..n {
            let (head, tail) = l.split_at(i * n);
            let lj = &head[j * n..j * n + j];
            let li = &tail[..j];
            let mut s = a.get(i, j);
            for k in 0..j {
                s = s - li[k] * lj[k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(logdet * S::lit(2.0))
}
