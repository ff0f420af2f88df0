use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;

/// `int_0^tau cos(c r) dr`.
pub(crate) fn cos_integral<T: Real>(c: T, tau: T) -> T {
    let x = c * tau;
    if x.abs() < T::lit(1e-4) {
        tau * (T::one() - x * x / T::lit(6.0))
    } else {
        x.sin() / c
    }
}

/// `int_0^tau sin(c r) dr`.
pub(crate) fn sin_integral<T: Real>(c: T, tau: T) -> T {
    let x = c * tau;
    if x.abs() < T::lit(1e-4) {
        tau * x / T::lit(2.0) * (T::one() - x * x / T::lit(12.0))
    } else {
        let s = (x / T::lit(2.0)).sin();
        T::lit(2.0) * s * s / c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gramian<T> {
    /// Hermitian entries `b_j conj(b_k) int_0^tau e^{i(w_j - w_k)s} ds`, row-major.
    pub entries: Vec<Complex<T>>,
    pub size: usize,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
}

impl<T: Real> Gramian<T> {
    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.entries[j * self.size + k]
    }
}

/// Finite section of the controllability Gramian for frequencies `omegas`
/// and input couplings `b`.
pub fn gramian<T: Real>(tau: T, omegas: &[T], b: &[T]) -> Result<Gramian<T>> {
    if !(tau > T::zero()) {
        return Err(Error::Argument("horizon must be positive".into()));
    }
    if omegas.len() != b.len() {
        return Err(Error::Argument("frequency and coupling lists differ in length".into()));
    }
    let n = omegas.len();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
    for j in 0..n {
        for k in 0..n {
            let d = omegas[j] - omegas[k];
            entries[j * n + k] = Complex::new(cos_integral(d, tau), sin_integral(d, tau)) * (b[j] * b[k]);
        }
    }
    // realify: [[Re, -Im], [Im, Re]] has each eigenvalue twice
    let mut m = SquareMatrix::zeros(2 * n);
    for j in 0..n {
        for k in 0..n {
            let e = entries[j * n + k];
            m.set(j, k, e.re);
            m.set(j + n, k + n, e.re);
            m.set(j, k + n, -e.im);
            m.set(j + n, k, e.im);
        }
    }
    let ev = m.symmetric_eigenvalues();
    let (min_eigenvalue, max_eigenvalue) = match (ev.first(), ev.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (T::zero(), T::zero()),
    };
    Ok(Gramian { entries, size: n, min_eigenvalue, max_eigenvalue })
}
