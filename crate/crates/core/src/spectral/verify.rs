use super::mode::Mode;
use crate::error::Result;
use crate::linear_sim::DiscreteGenerator;
use crate::model::{norm, Grid, PhysicalConfig, State};
use crate::scalar::Real;

/// X_h-norm of `A_h phi - i omega phi` for the realified pair `phi = re + i im`.
pub fn eigen_residual<T: Real>(gen: &DiscreteGenerator<T>, omega: T, re: &State<T>, im: &State<T>) -> Result<T> {
    let a_re = gen.apply(re)?;
    let a_im = gen.apply(im)?;
    // A(re + i im) - i w (re + i im) = (A re + w im) + i (A im - w re)
    let r1 = a_re.add_scaled(omega, im)?;
    let r2 = a_im.add_scaled(-omega, re)?;
    Ok(norm(&r1, &gen.cfg).hypot(norm(&r2, &gen.cfg)))
}

/// Samples `mode` on a grid with `cells` cells on the left exterior side and
/// returns its discrete eigenresidual.
pub fn verify_eigenpair<T: Real>(mode: &Mode<T>, cfg: &PhysicalConfig<T>, cells: usize) -> Result<T> {
    let grid = Grid::new(cfg, cells)?;
    let gen = DiscreteGenerator::new(cfg, grid)?;
    let (re, im) = mode.sample(grid);
    eigen_residual(&gen, mode.omega, &re, &im)
}
