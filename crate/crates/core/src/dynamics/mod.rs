//! Time evolution of the vorticity, Lagrangian tracers and the bracket pair.

pub mod bracket;
pub mod interp;
pub mod run;
pub mod state;
pub mod tracer;

pub use bracket::{bracket_step, extremal_u1, extremal_u1_with, BracketSample, BracketState, Side};
pub use interp::{interp_strip, Blend, VelocityGrid, VelocitySource};
pub use run::{
    checkpoint_path, read_sidecar, resume, resume_with, run, run_with, sidecar_path, RunOptions, RunOutput, RunSidecar,
};
pub use state::{advect, InjectionSpec, SimState, StepInfo};
pub use tracer::{trace, Tracer};
