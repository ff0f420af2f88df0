use num_complex::Complex;
use num_traits::One;

use super::generator::DiscreteGenerator;
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::model::{project_symmetric, State};
use crate::scalar::Real;
use crate::spectral::{Branch, Mode};

/// Gram deviation accepted by [`ModeSet::check_orthonormal`].
pub const ORTHO_TOL: f64 = 1e-6;
const MAX_ITER: usize = 40;

/// Discrete eigenvectors of `A_h` seeded by closed-form modes.
///
/// Each closed-form mode is refined by shifted inverse iteration followed by
/// Rayleigh quotient iteration on `(K - i sigma W) x = W x_old`, so the set
/// is orthonormal in the discrete inner product up to rounding. The complex
/// vector is stored realified as `re + i im` with `re` carrying the
/// discharge, `c` and `eta` slots and `im` the elevation and `delta` slots.
#[derive(Debug, Clone)]
pub struct ModeSet<T> {
    /// Discrete eigenfrequencies.
    pub omegas: Vec<T>,
    /// Closed-form seeds.
    pub seeds: Vec<Mode<T>>,
    re: Vec<Vec<T>>,
    im: Vec<Vec<T>>,
    w: BandMatrix<T>,
    gen: DiscreteGenerator<T>,
}

impl<T: Real> ModeSet<T> {
    /// Refines every seed into a discrete eigenvector of `gen`.
    pub fn refine(gen: &DiscreteGenerator<T>, seeds: &[Mode<T>]) -> Result<Self> {
        use rayon::prelude::*;
        let pairs: Vec<(T, Vec<T>, Vec<T>)> = seeds.par_iter().map(|m| refine_one(gen, m)).collect::<Result<_>>()?;
        let mut set = Self::empty(gen, seeds);
        for (w, re, im) in pairs {
            set.omegas.push(w);
            set.re.push(re);
            set.im.push(im);
        }
        Ok(set)
    }

    /// Closed-form modes sampled on the grid without refinement.
    pub fn sampled(gen: &DiscreteGenerator<T>, seeds: &[Mode<T>]) -> Result<Self> {
        let mut set = Self::empty(gen, seeds);
        for m in seeds {
            let (re, im) = m.sample(gen.grid);
            set.omegas.push(m.omega);
            set.re.push(gen.pack(&re)?);
            set.im.push(gen.pack(&im)?);
        }
        Ok(set)
    }

    fn empty(gen: &DiscreteGenerator<T>, seeds: &[Mode<T>]) -> Self {
        Self {
            omegas: Vec::new(),
            seeds: seeds.to_vec(),
            re: Vec::new(),
            im: Vec::new(),
            w: gen.weight_matrix().clone(),
            gen: gen.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn generator(&self) -> &DiscreteGenerator<T> {
        &self.gen
    }

    /// Mode `k` (0-based) as a (real, imaginary) pair of states.
    pub fn mode_state(&self, k: usize) -> (State<T>, State<T>) {
        (self.gen.unpack(&self.re[k]), self.gen.unpack(&self.im[k]))
    }

    fn dot_w(&self, a: &[T], b: &[T]) -> T {
        a.iter().zip(self.w.matvec(b)).map(|(&x, y)| x * y).sum()
    }

    /// Hermitian inner product `<phi_j, phi_k>` in the discrete energy product.
    pub fn gram_entry(&self, j: usize, k: usize) -> Complex<T> {
        let (rj, ij, rk, ik) = (&self.re[j], &self.im[j], &self.re[k], &self.im[k]);
        Complex::new(self.dot_w(rj, rk) + self.dot_w(ij, ik), self.dot_w(ij, rk) - self.dot_w(rj, ik))
    }

    /// Largest entry of `G - I` in modulus, counting both the modes and their
    /// conjugates.
    pub fn gram_deviation(&self) -> T {
        let mut dev = T::zero();
        for j in 0..self.len() {
            for k in 0..self.len() {
                let g = self.gram_entry(j, k);
                let target = if j == k { T::one() } else { T::zero() };
                dev = dev.max((g - Complex::new(target, T::zero())).norm());
                // <phi_j, conj phi_k> = re.re - im.im + i(...)
                let c = Complex::new(
                    self.dot_w(&self.re[j], &self.re[k]) - self.dot_w(&self.im[j], &self.im[k]),
                    self.dot_w(&self.im[j], &self.re[k]) + self.dot_w(&self.re[j], &self.im[k]),
                );
                dev = dev.max(c.norm());
            }
        }
        dev
    }

    pub fn check_orthonormal(&self, tol: T) -> Result<()> {
        let dev = self.gram_deviation();
        if dev > tol {
            return Err(Error::NotOrthonormal { deviation: dev.as_f64() });
        }
        Ok(())
    }

    /// Coefficients `<z, phi_k>`.
    pub fn decompose(&self, z: &State<T>) -> Result<Vec<Complex<T>>> {
        let v = self.gen.pack(z)?;
        let wz = self.w.matvec(&v);
        let dot = |a: &[T]| a.iter().zip(&wz).map(|(&x, &y)| x * y).sum::<T>();
        Ok((0..self.len()).map(|k| Complex::new(dot(&self.re[k]), -dot(&self.im[k]))).collect())
    }

    /// Real state `sum_k c_k e^{i w_k t} phi_k + conj`.
    pub fn synthesize(&self, coeffs: &[Complex<T>], t: T) -> Result<State<T>> {
        if coeffs.len() > self.len() {
            return Err(Error::Argument(format!("{} coefficients for {} modes", coeffs.len(), self.len())));
        }
        let mut v = vec![T::zero(); self.gen.dim()];
        let two = T::lit(2.0);
        for (k, c) in coeffs.iter().enumerate() {
            let e = c * Complex::from_polar(T::one(), self.omegas[k] * t);
            for (i, x) in v.iter_mut().enumerate() {
                *x = *x + two * (e.re * self.re[k][i] - e.im * self.im[k][i]);
            }
        }
        Ok(self.gen.unpack(&v))
    }

    /// B* phi_k = eta_k / 2.
    pub fn b_star(&self, k: usize) -> T {
        self.re[k][self.gen.layout().eta()] / T::lit(2.0)
    }
}

fn refine_one<T: Real>(gen: &DiscreteGenerator<T>, seed: &Mode<T>) -> Result<(T, Vec<T>, Vec<T>)> {
    let symmetric = seed.branch == Branch::Symmetric && gen.grid.is_mirror();
    let (re0, im0) = seed.sample(gen.grid);
    let pr = gen.pack(&re0)?;
    let pi = gen.pack(&im0)?;
    let cw = gen.weight_matrix().map(|x| Complex::new(x, T::zero()));
    let ck = gen.skew_matrix().map(|x| Complex::new(x, T::zero()));
    let mut x: Vec<Complex<T>> = pr.iter().zip(&pi).map(|(&r, &i)| Complex::new(r, i)).collect();
    let wnorm = |x: &[Complex<T>]| x.iter().zip(cw.matvec(x)).map(|(a, b)| (a.conj() * b).re).sum::<T>().sqrt();
    let mut sigma = seed.omega;
    let mut best = T::infinity();
    for it in 0..MAX_ITER {
        let shifted = ck.combine(Complex::one(), &cw, Complex::new(T::zero(), -sigma));
        let mut y = shifted.factor()?.solve(&cw.matvec(&x));
        if symmetric {
            y = symmetrize(gen, &y)?;
        }
        let n = wnorm(&y);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NonFinite("inverse iteration".into()));
        }
        x = y.into_iter().map(|v| v / n).collect();
        let kx = ck.matvec(&x);
        let wx = cw.matvec(&x);
        let omega: T = x.iter().zip(&kx).map(|(a, b)| (a.conj() * b).im).sum();
        let res = kx.iter().zip(&wx).map(|(a, b)| (*a - b * Complex::new(T::zero(), omega)).norm_sqr()).sum::<T>().sqrt();
        let rel = res / (wx.iter().map(|b| b.norm_sqr()).sum::<T>().sqrt() * omega.abs().max(T::one()));
        if rel <= T::epsilon() * T::lit(1e3) || (it > 3 && rel >= best) {
            break;
        }
        best = best.min(rel);
        if it >= 1 {
            sigma = omega;
        }
    }
    // Rayleigh quotient after the last update.
    let kx = ck.matvec(&x);
    let omega: T = x.iter().zip(&kx).map(|(a, b)| (a.conj() * b).im).sum();
    // Phase: make the eta slot (or the largest real-type slot) real and
    // aligned with the seed.
    let lay = gen.layout();
    let pivot = real_type_slots(gen)
        .into_iter()
        .max_by(|&a, &b| x[a].norm().partial_cmp(&x[b].norm()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(lay.eta());
    let rot = x[pivot].conj() / x[pivot].norm();
    let mut sign = T::one();
    let aligned = x[pivot] * rot;
    if aligned.re * pr[pivot] < T::zero() {
        sign = -T::one();
    }
    let real_slots = real_type_mask(gen);
    let mut re = vec![T::zero(); x.len()];
    let mut im = vec![T::zero(); x.len()];
    for i in 0..x.len() {
        let v = x[i] * rot * sign;
        if real_slots[i] {
            re[i] = v.re;
        } else {
            im[i] = v.im;
        }
    }
    let n = {
        let w = gen.weight_matrix();
        let f = |a: &[T]| a.iter().zip(w.matvec(a)).map(|(&p, q)| p * q).sum::<T>();
        (f(&re) + f(&im)).sqrt()
    };
    for v in re.iter_mut().chain(im.iter_mut()) {
        *v = *v / n;
    }
    Ok((omega, re, im))
}

fn real_type_mask<T: Real>(gen: &DiscreteGenerator<T>) -> Vec<bool> {
    let mut m = vec![false; gen.dim()];
    for i in real_type_slots(gen) {
        m[i] = true;
    }
    m
}

fn real_type_slots<T: Real>(gen: &DiscreteGenerator<T>) -> Vec<usize> {
    use crate::model::Side;
    let lay = gen.layout();
    let mut out = vec![lay.c(), lay.eta()];
    for side in [Side::Left, Side::Right] {
        out.extend((0..gen.grid.cells(side)).map(|f| lay.q(side, f)));
    }
    out
}

fn symmetrize<T: Real>(gen: &DiscreteGenerator<T>, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let re: Vec<T> = x.iter().map(|v| v.re).collect();
    let im: Vec<T> = x.iter().map(|v| v.im).collect();
    let sr = gen.pack(&project_symmetric(&gen.unpack(&re))?)?;
    let si = gen.pack(&project_symmetric(&gen.unpack(&im))?)?;
    Ok(sr.into_iter().zip(si).map(|(r, i)| Complex::new(r, i)).collect())
}
