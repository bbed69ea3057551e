use super::problem::ProblemData;
use crate::grid::{sample_into, SpaceMesh, TimeMesh};

/// The three most recent time slices of `f`, sampled at all nodes on demand.
#[derive(Debug)]
pub(crate) struct SourceRing {
    slots: [(Option<usize>, Vec<f64>); 3],
}

impl SourceRing {
    pub(crate) fn new() -> Self {
        Self {
            slots: Default::default(),
        }
    }

    /// Makes the levels in `keep` resident (at most 3) and returns their slot indices.
    pub(crate) fn ensure<const K: usize>(
        &mut self,
        mesh: &SpaceMesh,
        time: &TimeMesh,
        data: &dyn ProblemData,
        keep: [usize; K],
    ) -> [usize; K] {
        debug_assert!(K <= 3);
        let mut out = [0; K];
        for (n, &level) in keep.iter().enumerate() {
            if let Some(s) = self.slots.iter().position(|(l, _)| *l == Some(level)) {
                out[n] = s;
                continue;
            }
            let s = (0..3)
                .find(|&s| match self.slots[s].0 {
                    None => true,
                    Some(l) => !keep.contains(&l),
                })
                .expect("at most three resident levels");
            let t = time.time(level);
            let buf = &mut self.slots[s].1;
            buf.resize(mesh.len(), 0.0);
            sample_into(mesh, buf, |x| data.source(x, t));
            self.slots[s].0 = Some(level);
            out[n] = s;
        }
        out
    }

    pub(crate) fn slot(&self, s: usize) -> &[f64] {
        &self.slots[s].1
    }
}
