use rayon::prelude::*;

use super::boundary::BoundaryCache;
use super::problem::{compatibility_defect, MediumSpec, ProblemData};
use super::run::Stepper;
use super::source::SourceRing;
use super::stability::{check_stability, StabilityReport};
use super::state::{FirstStepVariant, SchemeKind, SchemeState};
use crate::error::{Error, Result};
use crate::grid::{for_each_interior_line, sample_into, GridField, LhKernel, TensorMesh};
use crate::numerov::AuxSolver;

/// Tolerance of the `u_0 = g(·, 0)` check on boundary nodes.
const COMPATIBILITY_TOL: f64 = 1e-12;

pub(crate) fn validate(mesh: &TensorMesh, medium: &MediumSpec, data: &dyn ProblemData) -> Result<()> {
    if **medium.rho().mesh() != **mesh.space() {
        return Err(Error::MeshMismatch);
    }
    let defect = compatibility_defect(mesh.space(), data);
    if defect > COMPATIBILITY_TOL {
        return Err(Error::InvalidArgument(format!(
            "initial value and boundary data differ by {defect:e} on the boundary"
        )));
    }
    Ok(())
}

pub(crate) fn initial_state(
    mesh: &TensorMesh,
    data: &dyn ProblemData,
    boundary: &BoundaryCache,
) -> SchemeState {
    let mut v0 = GridField::from_fn(mesh.space(), |x| data.initial_value(x));
    boundary.inject(data, 0.0, v0.values_mut());
    SchemeState::initial(v0)
}

/// The semi-explicit fourth-order vector compact scheme.
///
/// Each step solves `s_kN v_kk = Λ_k v` along every grid line for the weighted
/// sum `W = Σ a_k² v_kk` and then updates
/// `v^{m+1} = 2v^m - v^{m-1} + h_t² G + (h_t²/ρ)(h_t²/12)(L_h G + Λ_t f)`,
/// with `G = (W + f^m)/ρ`.
pub struct CompactScheme<'a> {
    data: &'a dyn ProblemData,
    medium: &'a MediumSpec,
    mesh: TensorMesh,
    variant: FirstStepVariant,
    keep_aux: bool,
    solver: AuxSolver,
    kernel: LhKernel,
    boundary: BoundaryCache,
    sources: SourceRing,
    aux_bc: Vec<Vec<f64>>,
    work: Vec<f64>,
}

impl<'a> CompactScheme<'a> {
    pub fn new(mesh: TensorMesh, medium: &'a MediumSpec, data: &'a dyn ProblemData) -> Result<Self> {
        validate(&mesh, medium, data)?;
        let space = mesh.space();
        Ok(Self {
            data,
            medium,
            solver: AuxSolver::new(space)?,
            kernel: LhKernel::new(space, medium.a())?,
            boundary: BoundaryCache::new(space),
            sources: SourceRing::new(),
            aux_bc: Vec::new(),
            work: vec![0.0; space.len()],
            variant: FirstStepVariant::default(),
            keep_aux: false,
            mesh,
        })
    }

    pub fn with_variant(mut self, variant: FirstStepVariant) -> Self {
        self.variant = variant;
        self
    }

    /// Store `W` in [`SchemeState::aux`] after every step.
    pub fn keep_aux(mut self, keep: bool) -> Self {
        self.keep_aux = keep;
        self
    }

    pub fn variant(&self) -> FirstStepVariant {
        self.variant
    }

    /// `work <- W` for the level `level` of `v`.
    fn aux_sum(&mut self, v: &[f64], level: usize) -> Result<()> {
        let t = self.mesh.time().time(level);
        self.boundary.aux_values(self.data, t, &mut self.aux_bc);
        self.solver
            .weighted_sum_into(v, self.medium.a(), None, &self.aux_bc, &mut self.work)
    }

    fn save_aux(&self, state: &mut SchemeState) -> Result<()> {
        if self.keep_aux {
            state.aux = Some(GridField::from_values(self.mesh.space(), self.work.clone())?);
        }
        Ok(())
    }

    /// `f^0` and the first-step average `f_dht`, or `None` without a source.
    fn first_step_sources(&mut self) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        if !self.data.has_source() {
            return Ok(None);
        }
        let space = self.mesh.space();
        let time = self.mesh.time();
        let data = self.data;
        match self.variant {
            FirstStepVariant::TwoLevel => {
                if !data.half_step_source() {
                    return Err(Error::HalfStepUnavailable);
                }
                let [s0] = self.sources.ensure(space, time, data, [0]);
                let f0 = self.sources.slot(s0).to_vec();
                let th = 0.5 * time.step();
                let mut fd = vec![0.0; space.len()];
                sample_into(space, &mut fd, |x| data.source(x, th));
                fd.par_iter_mut()
                    .zip(f0.par_iter())
                    .for_each(|(d, f)| *d = f / 3.0 + 2.0 * *d / 3.0);
                Ok(Some((f0, fd)))
            }
            FirstStepVariant::ThreeLevel => {
                let [s0, s1, s2] = self.sources.ensure(space, time, data, [0, 1, 2]);
                let (f0, f1, f2) = (self.sources.slot(s0), self.sources.slot(s1), self.sources.slot(s2));
                let fd = (0..space.len())
                    .into_par_iter()
                    .map(|i| 7.0 / 12.0 * f0[i] + 0.5 * f1[i] - f2[i] / 12.0)
                    .collect();
                Ok(Some((f0.to_vec(), fd)))
            }
        }
    }
}

impl Stepper for CompactScheme<'_> {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Compact
    }

    fn mesh(&self) -> &TensorMesh {
        &self.mesh
    }

    fn stability(&self) -> Result<StabilityReport> {
        check_stability(&self.mesh, self.medium, None, None)
    }

    fn initial_state(&mut self) -> Result<SchemeState> {
        Ok(initial_state(&self.mesh, self.data, &self.boundary))
    }

    // ρ(v¹ - v⁰)/h_t = (h_t/2)[S⁰ + f_dht + (h_t²/12) L_h((S⁰ + f⁰)/ρ)]
    //                  + (ρ + (h_t²/6) L_h) u_1
    fn first_step(&mut self, state: &mut SchemeState) -> Result<()> {
        if state.level != 0 {
            return Err(Error::InvalidArgument(format!(
                "first step needs level 0, state is at level {}",
                state.level
            )));
        }
        let space = self.mesh.space().clone();
        self.aux_sum(state.v_cur.values(), 0)?;
        self.save_aux(state)?;
        let sources = self.first_step_sources()?;
        let inv_rho = self.medium.inv_rho();
        let s0 = &self.work;
        let g: Vec<f64> = match &sources {
            Some((f0, _)) => (0..space.len())
                .into_par_iter()
                .map(|i| (s0[i] + f0[i]) * inv_rho[i])
                .collect(),
            None => s0.par_iter().zip(inv_rho).map(|(s, r)| s * r).collect(),
        };
        let mut u1 = vec![0.0; space.len()];
        sample_into(&space, &mut u1, |x| self.data.initial_velocity(x));

        let ht = self.mesh.time_step();
        let c_lh = ht * ht / 12.0;
        let c_u1 = ht * ht / 6.0;
        let v0 = state.v_cur.values();
        let kernel = &self.kernel;
        let fd = sources.as_ref().map(|(_, fd)| fd.as_slice());
        let mut next = v0.to_vec();
        for_each_interior_line(&space, &mut next, |base, line| {
            for j in 1..line.len() - 1 {
                let i = base + j;
                let f = fd.map_or(0.0, |fd| fd[i]);
                let bracket = 0.5 * ht * (s0[i] + f + c_lh * kernel.at(&g, i)) + c_u1 * kernel.at(&u1, i);
                line[j] = v0[i] + ht * u1[i] + ht * inv_rho[i] * bracket;
            }
        });
        self.boundary.inject(self.data, self.mesh.time().time(1), &mut next);
        let next = GridField::from_values(&space, next)?;
        state.v_prev = Some(std::mem::replace(&mut state.v_cur, next));
        state.level = 1;
        state.time = self.mesh.time().time(1);
        Ok(())
    }

    fn main_step(&mut self, state: &mut SchemeState) -> Result<()> {
        let m = state.level;
        if m == 0 {
            return Err(Error::MissingPreviousLevel(0));
        }
        let mut prev = state.v_prev.take().ok_or(Error::MissingPreviousLevel(m))?;
        if let Err(e) = self.aux_sum(state.v_cur.values(), m) {
            state.v_prev = Some(prev);
            return Err(e);
        }
        self.save_aux(state)?;
        let space = self.mesh.space().clone();
        let time = self.mesh.time().clone();
        let slots = self
            .data
            .has_source()
            .then(|| self.sources.ensure(&space, &time, self.data, [m - 1, m, m + 1]));
        let sources = &self.sources;
        let f = slots.map(|[a, b, c]| (sources.slot(a), sources.slot(b), sources.slot(c)));

        // work <- G = (W + f^m)/ρ on all nodes.
        let inv_rho = self.medium.inv_rho();
        match f {
            Some((_, fm, _)) => self
                .work
                .par_iter_mut()
                .zip(fm.par_iter().zip(inv_rho.par_iter()))
                .for_each(|(w, (f, r))| *w = (*w + f) * r),
            None => self
                .work
                .par_iter_mut()
                .zip(inv_rho.par_iter())
                .for_each(|(w, r)| *w *= r),
        }

        let ht = time.step();
        let ht2 = ht * ht;
        let c = ht2 / 12.0;
        let g = &self.work;
        let v = state.v_cur.values();
        let kernel = &self.kernel;
        for_each_interior_line(&space, prev.values_mut(), |base, line| {
            for j in 1..line.len() - 1 {
                let i = base + j;
                let df = f.map_or(0.0, |(fp, fm, fn_)| fn_[i] - 2.0 * fm[i] + fp[i]);
                line[j] = 2.0 * v[i] - line[j] + ht2 * g[i] + ht2 * inv_rho[i] * c * (kernel.at(g, i) + df / ht2);
            }
        });
        self.boundary.inject(self.data, time.time(m + 1), prev.values_mut());
        state.v_prev = Some(std::mem::replace(&mut state.v_cur, prev));
        state.level = m + 1;
        state.time = time.time(m + 1);
        Ok(())
    }
}
