use std::time::{Duration, Instant};

use super::stability::StabilityReport;
use super::state::{SchemeKind, SchemeState};
use crate::error::Result;
use crate::grid::TensorMesh;

/// A three-level time stepper.
pub trait Stepper {
    fn kind(&self) -> SchemeKind;

    fn mesh(&self) -> &TensorMesh;

    fn stability(&self) -> Result<StabilityReport>;

    /// Level 0: `v^0 = u_0` sampled at every node, boundary set to `g(·, 0)`.
    fn initial_state(&mut self) -> Result<SchemeState>;

    /// Level 0 to level 1.
    fn first_step(&mut self, state: &mut SchemeState) -> Result<()>;

    /// Level `m >= 1` to `m + 1`, in place.
    fn main_step(&mut self, state: &mut SchemeState) -> Result<()>;

    fn advance(&mut self, state: &mut SchemeState) -> Result<()> {
        if state.level == 0 {
            self.first_step(state)
        } else {
            self.main_step(state)
        }
    }
}

/// Read-only hook called on every level `0..=M`.
pub trait Observer {
    fn observe(&mut self, state: &SchemeState) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(&SchemeState) -> Result<()>,
{
    fn observe(&mut self, state: &SchemeState) -> Result<()> {
        self(state)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub state: SchemeState,
    pub stability: StabilityReport,
    /// Wall-clock time spent inside the steps, observers excluded.
    pub stepping_time: Duration,
}

/// Drives the first step and then `M - 1` main steps.
pub fn run(stepper: &mut dyn Stepper, observers: &mut [&mut dyn Observer]) -> Result<RunOutcome> {
    let stability = stepper.stability()?;
    if !stability.satisfied {
        log::warn!(
            "mesh ratio {:.4} exceeds the stability limit; the run may blow up",
            stability.cfl_number
        );
    }
    let steps = stepper.mesh().time().steps();
    let mut stepping_time = Duration::ZERO;
    let started = Instant::now();
    let mut state = stepper.initial_state()?;
    stepping_time += started.elapsed();
    for obs in observers.iter_mut() {
        obs.observe(&state)?;
    }
    for _ in 0..steps {
        let started = Instant::now();
        stepper.advance(&mut state)?;
        stepping_time += started.elapsed();
        for obs in observers.iter_mut() {
            obs.observe(&state)?;
        }
    }
    Ok(RunOutcome {
        state,
        stability,
        stepping_time,
    })
}
