use serde::{Deserialize, Serialize};

use crate::model::{Grid, PhysicalConfig, State};
use crate::scalar::Real;
use crate::spectral::Mode;

/// B u: the force enters the heave velocity row only, scaled by 1/M̄.
pub fn apply_b<T: Real>(u: T, grid: Grid<T>, cfg: &PhysicalConfig<T>) -> State<T> {
    let mut z = State::zeros(grid);
    z.eta = u / cfg.m_bar;
    z
}

/// B* z = eta / 2.
pub fn b_star<T: Real>(z: &State<T>) -> T {
    z.eta / T::lit(2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorityReport<T> {
    /// |B* phi_k| per mode, in input order.
    pub values: Vec<T>,
    /// min_k k |B* phi_k| with k the mode's 1-based index.
    pub min_scaled: T,
    /// 1-based index of the minimizing mode.
    pub argmin: usize,
}

/// |B* phi_k| = gamma_k |psi_k(l)| / (2l) for each mode.
pub fn modal_authority<T: Real>(modes: &[Mode<T>]) -> AuthorityReport<T> {
    let values: Vec<T> = modes.iter().map(|m| m.authority()).collect();
    let mut min_scaled = T::infinity();
    let mut argmin = 0;
    for (i, (m, &v)) in modes.iter().zip(&values).enumerate() {
        let k = if m.k_index > 0 { m.k_index as usize } else { i + 1 };
        let s = T::from_count(k) * v;
        if s < min_scaled {
            min_scaled = s;
            argmin = k;
        }
    }
    AuthorityReport { values, min_scaled, argmin }
}
