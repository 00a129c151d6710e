//! Liouville-space representation and propagation.
//!
//! The 3×3 adiabatic density matrix is flattened to a 9-component complex
//! vector in the fixed ordering
//!
//! ```text
//!   (ρ_{+0}, ρ_{+−}, ρ_{0−}, ρ_{0+}, ρ_{−+}, ρ_{−0}, ρ_{++}, ρ_{00}, ρ_{−−})
//! ```
//!
//! on which the generator M(t) acts linearly: dρ/dt = M ρ. Adiabatic levels
//! are indexed +,0,− = 0,1,2 throughout.

mod generator;
mod propagate;
mod state;

pub use generator::{build_generator, GeneratorKind};
pub use propagate::{propagate, PropagateOptions, StepPlan};
pub use state::{
    component_index, AdiabaticStateVector, Diagnostics, TimeSeries, COMPONENT_PAIRS,
};
