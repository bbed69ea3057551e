use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm_energy, norm_l2h, seminorm_h1h, GridField, TimeMesh};
use crate::scheme::{Observer, SchemeState};

/// Errors of one level in the three mesh norms.
///
/// `e_h1` is the discrete gradient norm with unit weights; `e_e` combines the
/// time difference with the `a_k²`-weighted gradient norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTriple {
    pub e_l2: f64,
    pub e_h1: f64,
    pub e_e: f64,
    pub time: f64,
}

impl ErrorTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.e_l2, self.e_h1, self.e_e]
    }
}

/// Evaluator of the exact solution `u(x, t)`.
pub type ExactFn<'a> = &'a (dyn Fn(&[f64], f64) -> f64 + Sync);

fn sample(state_field: &GridField, exact: ExactFn<'_>, t: f64) -> GridField {
    GridField::from_fn(state_field.mesh(), |x| exact(x, t))
}

/// Errors of `u - v` at the state's level; needs level `m >= 1`.
pub fn measure_errors(
    state: &SchemeState,
    exact: ExactFn<'_>,
    time: &TimeMesh,
    a: &[f64],
) -> Result<ErrorTriple> {
    let prev = state
        .v_prev
        .as_ref()
        .ok_or(Error::MissingPreviousLevel(state.level))?;
    let m = state.level;
    let u_cur = sample(&state.v_cur, exact, time.time(m));
    let u_prev = sample(prev, exact, time.time(m - 1));
    errors_against(state, &u_prev, &u_cur, time, a)
}

fn errors_against(
    state: &SchemeState,
    u_prev: &GridField,
    u_cur: &GridField,
    time: &TimeMesh,
    a: &[f64],
) -> Result<ErrorTriple> {
    let prev = state
        .v_prev
        .as_ref()
        .ok_or(Error::MissingPreviousLevel(state.level))?;
    let e_cur = u_cur.difference(&state.v_cur)?;
    let e_prev = u_prev.difference(prev)?;
    let unit = vec![1.0; a.len()];
    Ok(ErrorTriple {
        e_l2: norm_l2h(&e_cur),
        e_h1: seminorm_h1h(&e_cur, &unit)?,
        e_e: norm_energy(&e_prev, &e_cur, time.step(), a)?,
        time: time.time(state.level),
    })
}

/// Records the errors every `every` levels and always at the last one.
pub struct ErrorSeries<'a> {
    exact: ExactFn<'a>,
    time: TimeMesh,
    a: Vec<f64>,
    every: usize,
    cached: Option<(usize, GridField)>,
    pub rows: Vec<(usize, ErrorTriple)>,
}

impl<'a> ErrorSeries<'a> {
    pub fn new(exact: ExactFn<'a>, time: TimeMesh, a: Vec<f64>, every: usize) -> Self {
        Self {
            exact,
            time,
            a,
            every: every.max(1),
            cached: None,
            rows: Vec::new(),
        }
    }

    /// Only the final level.
    pub fn final_only(exact: ExactFn<'a>, time: TimeMesh, a: Vec<f64>) -> Self {
        let every = time.steps();
        Self::new(exact, time, a, every)
    }

    pub fn last(&self) -> Option<ErrorTriple> {
        self.rows.last().map(|r| r.1)
    }
}

impl Observer for ErrorSeries<'_> {
    fn observe(&mut self, state: &SchemeState) -> Result<()> {
        let m = state.level;
        if m == 0 || !(m % self.every == 0 || m == self.time.steps()) {
            return Ok(());
        }
        let u_prev = match self.cached.take() {
            Some((level, field)) if level == m - 1 => field,
            _ => sample(&state.v_cur, self.exact, self.time.time(m - 1)),
        };
        let u_cur = sample(&state.v_cur, self.exact, self.time.time(m));
        let errors = errors_against(state, &u_prev, &u_cur, &self.time, &self.a)?;
        self.rows.push((m, errors));
        if self.every == 1 {
            self.cached = Some((m, u_cur));
        }
        Ok(())
    }
}
