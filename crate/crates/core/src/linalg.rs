//! Small linear-algebra kernels: banded LU (real or complex), tridiagonal
//! solves, and dense symmetric routines for Gram matrices.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Scalar field usable by the banded solver.
pub trait Field:
    Copy
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn modulus(&self) -> f64;
}

impl<T: Real> Field for T {
    fn modulus(&self) -> f64 {
        self.abs().as_f64()
    }
}

impl<T: Real> Field for Complex<T> {
    fn modulus(&self) -> f64 {
        self.norm().as_f64()
    }
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix<F> {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<F>,
}

impl<F: Field> BandMatrix<F> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![F::zero(); n * (kl + ku + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.slot(i, j).map_or(F::zero(), |s| self.data[s])
    }

    /// Adds `v` at (i, j). Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: F) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = self.data[s] + v;
    }

    pub fn matvec(&self, x: &[F]) -> Vec<F> {
        let mut y = vec![F::zero(); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut s = F::zero();
            for j in lo..=hi {
                s = s + self.data[i * (self.kl + self.ku + 1) + (j + self.kl - i)] * x[j];
            }
            *yi = s;
        }
        y
    }

    /// `a*self + b*other`, both with the same band structure.
    pub fn combine(&self, a: F, other: &Self, b: F) -> Self {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        let data = self.data.iter().zip(&other.data).map(|(&x, &y)| a * x + b * y).collect();
        Self { n: self.n, kl: self.kl, ku: self.ku, data }
    }

    pub fn map<G: Field>(&self, f: impl Fn(F) -> G) -> BandMatrix<G> {
        BandMatrix { n: self.n, kl: self.kl, ku: self.ku, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// LU factorization with partial pivoting.
    pub fn factor(&self) -> Result<BandLu<F>> {
        BandLu::new(self)
    }
}

/// Banded LU factors (row interchanges applied lazily, as in LAPACK gbtrf).
#[derive(Debug, Clone)]
pub struct BandLu<F> {
    n: usize,
    kl: usize,
    w: usize,
    u: Vec<F>,
    lower: Vec<F>,
    piv: Vec<usize>,
}

impl<F: Field> BandLu<F> {
    fn new(m: &BandMatrix<F>) -> Result<Self> {
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        let w = 2 * kl + ku + 1;
        let at = |i: usize, j: usize| i * w + (j + kl - i);
        let mut u = vec![F::zero(); n * w];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                u[at(i, j)] = m.get(i, j);
            }
        }
        let mut lower = vec![F::zero(); n * kl.max(1)];
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = u[at(k, k)].modulus();
            for r in k + 1..=last {
                let v = u[at(r, k)].modulus();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            piv[k] = p;
            let right = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=right {
                    u.swap(at(k, j), at(p, j));
                }
            }
            let d = u[at(k, k)];
            for i in k + 1..=last {
                let l = u[at(i, k)] / d;
                lower[k * kl + (i - k - 1)] = l;
                u[at(i, k)] = F::zero();
                for j in k + 1..=right {
                    let ukj = u[at(k, j)];
                    u[at(i, j)] = u[at(i, j)] - l * ukj;
                }
            }
        }
        Ok(Self { n, kl, w, u, lower, piv })
    }

    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let (n, kl, w) = (self.n, self.kl, self.w);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] = x[i] - self.lower[k * kl + (i - k - 1)] * xk;
            }
        }
        let ku2 = w - kl - 1;
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + ku2).min(n - 1) {
                s = s - self.u[k * w + (j + kl - k)] * x[j];
            }
            x[k] = s / self.u[k * w + kl];
        }
        x
    }
}

/// Thomas algorithm for a tridiagonal system. `sub[i]` couples row i to
/// i-1 (`sub[0]` unused), `sup[i]` couples row i to i+1.
pub fn solve_tridiagonal<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut beta = diag[0];
    if beta == T::zero() {
        return Err(Error::Singular("tridiagonal pivot 0".into()));
    }
    c[0] = if n > 1 { sup[0] / beta } else { T::zero() };
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i] * c[i - 1];
        if beta == T::zero() || !beta.is_finite() {
            return Err(Error::Singular(format!("tridiagonal pivot {i}")));
        }
        if i + 1 < n {
            c[i] = sup[i] / beta;
        }
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Ok(d)
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Cholesky factor (lower triangular, row-major) of an SPD matrix.
    pub fn cholesky(&self) -> Result<SquareMatrix<T>> {
        let n = self.n;
        let mut l = SquareMatrix::zeros(n);
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d = d - l.get(j, k) * l.get(j, k);
            }
            if d <= T::zero() || !d.is_finite() {
                return Err(Error::Singular(format!("matrix not positive definite at pivot {j}")));
            }
            let d = d.sqrt();
            l.set(j, j, d);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / d);
            }
        }
        Ok(l)
    }

    /// Solves `self x = b` given `self` is the Cholesky factor L.
    pub fn cholesky_solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.get(i, k) * y[k];
            }
            y[i] = s / self.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.get(k, i) * y[k];
            }
            y[i] = s / self.get(i, i);
        }
        y
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.clone();
        let tol = T::epsilon() * T::epsilon();
        for _sweep in 0..100 {
            let mut off = T::zero();
            let mut total = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let v = a.get(i, j) * a.get(i, j);
                    total = total + v;
                    if i != j {
                        off = off + v;
                    }
                }
            }
            if off <= tol * total || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Smallest singular value of a 2x2 matrix `[[a, b], [c, d]]`.
pub fn smallest_singular_value_2x2<T: Real>(a: T, b: T, c: T, d: T) -> T {
    let p = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).abs();
    let disc = (p * p - T::lit(4.0) * det * det).max(T::zero()).sqrt();
    let s2 = (p - disc) * T::lit(0.5);
    // (p - disc) loses accuracy when det is tiny; use det = s_min * s_max.
    let smax = ((p + disc) * T::lit(0.5)).sqrt();
    if smax > T::zero() {
        det / smax
    } else {
        s2.max(T::zero()).sqrt()
    }
}
