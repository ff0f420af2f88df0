//! Characteristic equations, eigenvalue search, closed-form eigenvectors and
//! spectrum diagnostics.

pub mod characteristic;
pub mod diagnostics;
pub mod mode;
pub mod roots;
mod verify;

pub use characteristic::{
    branch_system, char_residual_general, char_residual_general_terms, char_residual_symmetric, char_residual_symmetric_terms,
    char_residual_terms, Branch, Residual,
};
pub use diagnostics::{classify_ratio, detect_resonance, gap_statistics, GapReport, RatioClass, ResonanceReport, Simplicity};
pub use mode::{assemble_mode, compute_modes, interface_values, symmetric_mode_unchecked, Mode};
pub use roots::{find_eigenvalues, scan_window, RootSearch, ROOT_TOL};
pub use verify::{eigen_residual, verify_eigenpair};
