//! Input signals, control operator algebra, steering by the moment method
//! and collocated feedback.

pub mod gramian;
pub mod operators;
pub mod signal;
pub mod stabilize;
pub mod steer;

pub use gramian::{gramian, Gramian};
pub use operators::{apply_b, b_star, modal_authority, AuthorityReport};
pub use signal::ControlSignal;
pub use stabilize::{fit_decay_exponent, stabilize, DecayReport, StabilizeOptions};
pub use steer::{
    modal_response, steer, steer_with_modes, steering_modes, verify_reach, MomentProblem, ReachReport, SteerOptions, SteerPlan,
    WCheck, DEFAULT_COND_LIMIT, DEFAULT_MODES,
};
