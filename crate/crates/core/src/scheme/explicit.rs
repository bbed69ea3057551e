use super::boundary::BoundaryCache;
use super::compact::{initial_state, validate};
use super::problem::{MediumSpec, ProblemData};
use super::run::Stepper;
use super::source::SourceRing;
use super::stability::{check_stability, StabilityReport};
use super::state::{SchemeKind, SchemeState};
use crate::error::{Error, Result};
use crate::grid::{for_each_interior_line, sample_into, GridField, LhKernel, TensorMesh};

/// Classical second-order leapfrog `ρ Λ_t v - L_h v = f`.
pub struct ExplicitScheme<'a> {
    data: &'a dyn ProblemData,
    medium: &'a MediumSpec,
    mesh: TensorMesh,
    rho_weight: bool,
    velocity_correction: bool,
    kernel: LhKernel,
    boundary: BoundaryCache,
    sources: SourceRing,
}

impl<'a> ExplicitScheme<'a> {
    pub fn new(mesh: TensorMesh, medium: &'a MediumSpec, data: &'a dyn ProblemData) -> Result<Self> {
        validate(&mesh, medium, data)?;
        Ok(Self {
            data,
            medium,
            kernel: LhKernel::new(mesh.space(), medium.a())?,
            boundary: BoundaryCache::new(mesh.space()),
            sources: SourceRing::new(),
            rho_weight: false,
            velocity_correction: false,
            mesh,
        })
    }

    /// Multiply `u_1` by `ρ` in the first step. Off by default, which takes the
    /// first step as `ρ δ_t v^0 - (h_t/2) L_h v^0 = u_1 + (h_t/2) f^0`.
    pub fn with_rho_weighted_velocity(mut self, on: bool) -> Self {
        self.rho_weight = on;
        self
    }

    /// Replace `u_1` by `u_1 + (h_t²/6) L_h u_1` in the first step, the same
    /// correction the compact scheme applies. Off by default.
    pub fn with_velocity_correction(mut self, on: bool) -> Self {
        self.velocity_correction = on;
        self
    }
}

impl Stepper for ExplicitScheme<'_> {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Explicit
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

    fn first_step(&mut self, state: &mut SchemeState) -> Result<()> {
        if state.level != 0 {
            return Err(Error::InvalidArgument(format!(
                "first step needs level 0, state is at level {}",
                state.level
            )));
        }
        let space = self.mesh.space().clone();
        let time = self.mesh.time().clone();
        let f0 = self.data.has_source().then(|| {
            let [s] = self.sources.ensure(&space, &time, self.data, [0]);
            self.sources.slot(s)
        });
        let mut u1 = vec![0.0; space.len()];
        sample_into(&space, &mut u1, |x| self.data.initial_velocity(x));
        let ht = time.step();
        let inv_rho = self.medium.inv_rho();
        let rho = self.medium.rho().values();
        let rho_weight = self.rho_weight;
        let kernel = &self.kernel;
        if self.velocity_correction {
            let base = u1.clone();
            let c = ht * ht / 6.0;
            for_each_interior_line(&space, &mut u1, |start, line| {
                for j in 1..line.len() - 1 {
                    line[j] += c * kernel.at(&base, start + j);
                }
            });
        }
        let v0 = state.v_cur.values();
        let mut next = v0.to_vec();
        for_each_interior_line(&space, &mut next, |base, line| {
            for j in 1..line.len() - 1 {
                let i = base + j;
                let w = if rho_weight { rho[i] } else { 1.0 };
                let f = f0.map_or(0.0, |f| f[i]);
                line[j] = v0[i] + ht * inv_rho[i] * (0.5 * ht * (kernel.at(v0, i) + f) + w * u1[i]);
            }
        });
        self.boundary.inject(self.data, time.time(1), &mut next);
        let next = GridField::from_values(&space, next)?;
        state.v_prev = Some(std::mem::replace(&mut state.v_cur, next));
        state.level = 1;
        state.time = time.time(1);
        Ok(())
    }

    fn main_step(&mut self, state: &mut SchemeState) -> Result<()> {
        let m = state.level;
        if m == 0 {
            return Err(Error::MissingPreviousLevel(0));
        }
        let mut prev = state.v_prev.take().ok_or(Error::MissingPreviousLevel(m))?;
        let space = self.mesh.space().clone();
        let time = self.mesh.time().clone();
        let fm = self.data.has_source().then(|| {
            let [s] = self.sources.ensure(&space, &time, self.data, [m]);
            self.sources.slot(s)
        });
        let ht2 = time.step() * time.step();
        let inv_rho = self.medium.inv_rho();
        let kernel = &self.kernel;
        let v = state.v_cur.values();
        for_each_interior_line(&space, prev.values_mut(), |base, line| {
            for j in 1..line.len() - 1 {
                let i = base + j;
                let f = fm.map_or(0.0, |f| f[i]);
                line[j] = 2.0 * v[i] - line[j] + ht2 * inv_rho[i] * (kernel.at(v, i) + f);
            }
        });
        self.boundary.inject(self.data, time.time(m + 1), prev.values_mut());
        state.v_prev = Some(std::mem::replace(&mut state.v_cur, prev));
        state.level = m + 1;
        state.time = time.time(m + 1);
        Ok(())
    }
}
