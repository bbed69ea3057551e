use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::errors::{ErrorSeries, ErrorTriple};
use super::rates::{runge_rate, theoretical_rates};
use crate::error::{Error, Result};
use crate::oracles::Scenario;
use crate::parallel::with_workers;
use crate::scheme::{
    run, CompactScheme, ExplicitScheme, FirstStepVariant, MediumSpec, Observer, RunOutcome,
    SchemeKind, Stepper,
};
use crate::grid::TensorMesh;

/// Knobs shared by single runs and studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunOptions {
    pub variant: FirstStepVariant,
    /// `None` uses the global pool.
    pub workers: Option<usize>,
    pub explicit_rho_weight: bool,
    /// Add `(h_t²/6) L_h u_1` to the explicit first step.
    #[serde(default)]
    pub explicit_velocity_correction: bool,
}

pub fn build_stepper<'a>(
    scheme: SchemeKind,
    mesh: TensorMesh,
    medium: &'a MediumSpec,
    scenario: &'a Scenario,
    options: &RunOptions,
) -> Result<Box<dyn Stepper + Send + 'a>> {
    Ok(match scheme {
        SchemeKind::Compact => {
            Box::new(CompactScheme::new(mesh, medium, scenario)?.with_variant(options.variant))
        }
        SchemeKind::Explicit => Box::new(
            ExplicitScheme::new(mesh, medium, scenario)?
                .with_rho_weighted_velocity(options.explicit_rho_weight)
                .with_velocity_correction(options.explicit_velocity_correction),
        ),
    })
}

/// Runs `scenario` on the `(n, m)` mesh.
pub fn run_scenario(
    scenario: &Scenario,
    scheme: SchemeKind,
    n: usize,
    m: usize,
    options: &RunOptions,
    observers: &mut [&mut (dyn Observer + Send)],
) -> Result<RunOutcome> {
    let mesh = scenario.mesh(n, m)?;
    with_workers(options.workers, move || {
        let medium = scenario.medium(mesh.space())?;
        let mut stepper = build_stepper(scheme, mesh, &medium, scenario, options)?;
        let mut obs: Vec<&mut dyn Observer> = observers
            .iter_mut()
            .map(|o| &mut **o as &mut dyn Observer)
            .collect();
        run(stepper.as_mut(), &mut obs)
    })?
}

/// Runs and measures the errors at `t = T`.
pub fn run_with_errors(
    scenario: &Scenario,
    scheme: SchemeKind,
    n: usize,
    m: usize,
    options: &RunOptions,
) -> Result<(ErrorTriple, Duration)> {
    if !scenario.has_exact() {
        return Err(Error::NoExactSolution(scenario.name.clone()));
    }
    let exact = |x: &[f64], t: f64| scenario.exact(x, t).unwrap_or(f64::NAN);
    let mesh = scenario.mesh(n, m)?;
    let mut series = ErrorSeries::final_only(&exact, mesh.time().clone(), scenario.coefficients());
    let outcome = run_scenario(scenario, scheme, n, m, options, &mut [&mut series])?;
    let errors = series
        .last()
        .ok_or_else(|| Error::InvalidArgument("run produced no error sample".into()))?;
    Ok((errors, outcome.stepping_time))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub m: usize,
    pub errors: Option<ErrorTriple>,
    /// Rates against the previous row, in the order L2, H1, energy.
    pub rates: Option<[f64; 3]>,
    pub cpu_s: Option<f64>,
    pub cpu_rel: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub scenario: String,
    pub scheme: SchemeKind,
    pub k: u32,
    /// Common ratio of consecutive `N` and `M`; `None` for a single entry.
    pub q: Option<f64>,
    pub rows: Vec<StudyRow>,
    pub theoretical: [f64; 3],
}

/// Checks that consecutive ladder entries share one ratio `q > 1` in both `N`
/// and `M`, exactly as rationals, and returns it.
pub fn validate_ladder(ladder: &[(usize, usize)]) -> Result<Option<f64>> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("empty ladder".into()));
    }
    let first = match ladder {
        [a, b, ..] => (a.0 as u128, b.0 as u128),
        _ => return Ok(None),
    };
    for w in ladder.windows(2) {
        let (n1, m1) = (w[0].0 as u128, w[0].1 as u128);
        let (n2, m2) = (w[1].0 as u128, w[1].1 as u128);
        if n2 * m1 != m2 * n1 || n2 * first.0 != first.1 * n1 || n2 <= n1 {
            return Err(Error::InvalidArgument(format!(
                "ladder steps must share one ratio q > 1 in N and M; ({n1}, {m1}) -> ({n2}, {m2}) breaks it"
            )));
        }
    }
    Ok(Some(first.1 as f64 / first.0 as f64))
}

/// Runs every ladder entry in turn. A failed run is recorded in its row.
pub fn convergence_study(
    scenario: &Scenario,
    scheme: SchemeKind,
    ladder: &[(usize, usize)],
    options: &RunOptions,
) -> Result<ConvergenceTable> {
    let q = validate_ladder(ladder)?;
    if !scenario.has_exact() {
        return Err(Error::NoExactSolution(scenario.name.clone()));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(ladder.len());
    for &(n, m) in ladder {
        log::info!("{} {} N={n} M={m}", scenario.name, scheme.name());
        let mut row = StudyRow {
            n,
            m,
            errors: None,
            rates: None,
            cpu_s: None,
            cpu_rel: None,
            failure: None,
        };
        match run_with_errors(scenario, scheme, n, m, options) {
            Ok((errors, elapsed)) => {
                let cpu = elapsed.as_secs_f64();
                row.errors = Some(errors);
                row.cpu_s = Some(cpu);
                if let (Some(prev), Some(q)) = (rows.last(), q) {
                    if let (Some(pe), Some(pc)) = (prev.errors, prev.cpu_s) {
                        let (c, f) = (pe.as_array(), errors.as_array());
                        row.rates = (0..3)
                            .map(|i| runge_rate(c[i], f[i], q))
                            .collect::<Result<Vec<_>>>()
                            .ok()
                            .map(|v| [v[0], v[1], v[2]]);
                        row.cpu_rel = (pc > 0.0).then(|| cpu / pc);
                    }
                }
            }
            Err(e) => {
                log::error!("run N={n} M={m} failed: {e}");
                row.failure = Some(e.to_string());
            }
        }
        rows.push(row);
    }
    Ok(ConvergenceTable {
        scenario: scenario.name.clone(),
        scheme,
        k: scheme.order(),
        q,
        rows,
        theoretical: theoretical_rates(scheme.order(), scenario.smoothness()),
    })
}
