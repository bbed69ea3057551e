//! Time steppers: the semi-explicit compact scheme, the explicit baseline,
//! the mesh-ratio check and the run loop.

mod boundary;
mod compact;
mod explicit;
mod problem;
mod run;
mod source;
mod stability;
mod state;

pub use compact::CompactScheme;
pub use explicit::ExplicitScheme;
pub use problem::{compatibility_defect, MediumSpec, ProblemData};
pub use run::{run, Observer, RunOutcome, Stepper};
pub use stability::{check_stability, StabilityReport};
pub use state::{FirstStepVariant, SchemeKind, SchemeState};
