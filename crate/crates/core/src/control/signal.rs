use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::io::{fmt_num, split_meta, write_meta};
use crate::scalar::Real;

/// Scalar input sampled on a uniform grid `t_n = n * dt`, piecewise linear
/// in between and held constant past the last sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSignal<T> {
    pub dt: T,
    pub samples: Vec<T>,
}

impl<T: Real> ControlSignal<T> {
    pub fn new(dt: T, samples: Vec<T>) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::TimeStep(dt.as_f64()));
        }
        if samples.is_empty() {
            return Err(Error::Argument("control signal needs at least one sample".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("control sample".into()));
        }
        Ok(Self { dt, samples })
    }

    pub fn zero(dt: T, steps: usize) -> Self {
        Self { dt, samples: vec![T::zero(); steps + 1] }
    }

    /// Samples `f` at `t_n` for n = 0..=steps.
    pub fn from_fn(dt: T, steps: usize, f: impl Fn(T) -> T) -> Self {
        Self { dt, samples: (0..=steps).map(|n| f(dt * T::from_count(n))).collect() }
    }

    pub fn duration(&self) -> T {
        self.dt * T::from_count(self.samples.len() - 1)
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.samples.len() - 1;
        if t <= T::zero() || n == 0 {
            return self.samples[0];
        }
        let s = t / self.dt;
        let j = s.floor().to_usize().unwrap_or(usize::MAX);
        if j >= n {
            return self.samples[n];
        }
        let w = s - T::from_count(j);
        self.samples[j] * (T::one() - w) + self.samples[j + 1] * w
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { dt: self.dt, samples: self.samples.iter().map(|&v| a * v).collect() }
    }

    /// Trapezoid L2 norm over the sampled horizon.
    pub fn l2_norm(&self) -> T {
        let n = self.samples.len() - 1;
        let mut s = T::zero();
        for j in 0..n {
            let (a, b) = (self.samples[j], self.samples[j + 1]);
            s = s + (a * a + a * b + b * b) / T::lit(3.0);
        }
        (s * self.dt).sqrt()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        write_meta(w, &[("kind", "control".into()), ("dt", fmt_num(self.dt)), ("samples", self.samples.len().to_string())])?;
        writeln!(w, "t,u")?;
        for (n, &u) in self.samples.iter().enumerate() {
            writeln!(w, "{},{}", fmt_num(self.dt * T::from_count(n)), fmt_num(u))?;
        }
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Self> {
        let (_, body) = split_meta(text);
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let mut t = Vec::new();
        let mut u = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k).unwrap_or("").trim().parse().map_err(|_| Error::Parse("bad control row".into()))
            };
            t.push(num(0)?);
            u.push(T::lit(num(1)?));
        }
        if t.len() < 2 {
            return Err(Error::Parse("control CSV needs at least two rows".into()));
        }
        let dt = t[1] - t[0];
        for w in t.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0) {
                return Err(Error::Parse("control CSV time grid is not uniform".into()));
            }
        }
        Self::new(T::lit(dt), u)
    }
}
