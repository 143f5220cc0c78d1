//! Vortex configurations and integrated trajectories with dense output.

use crate::geometry::{Domain, Vec2};
use crate::vortex::VortexError;
use serde::{Deserialize, Serialize};

/// Positions and intensities of N point vortices at one instant. Torus
/// positions are stored unwrapped (reduced mod L only inside kernel
/// evaluations) so trajectories stay smooth for dense output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VortexState {
    pub positions: Vec<Vec2>,
    pub intensities: Vec<f64>,
    pub domain: Domain,
    pub time: f64,
}

impl VortexState {
    pub fn new(
        positions: Vec<Vec2>,
        intensities: Vec<f64>,
        domain: Domain,
        time: f64,
    ) -> Result<Self, VortexError> {
        if positions.len() != intensities.len() {
            return Err(VortexError::InvalidState(
                "positions and intensities must have equal length".into(),
            ));
        }
        if intensities.iter().any(|g| *g == 0.0 || !g.is_finite()) {
            return Err(VortexError::InvalidState("intensities must be finite and nonzero".into()));
        }
        if positions.iter().any(|p| !domain.contains(*p)) {
            return Err(VortexError::InvalidState("position outside the open domain".into()));
        }
        let state = VortexState { positions, intensities, domain, time };
        if state.positions.len() > 1 && state.min_separation().1 < crate::geometry::domain::COINCIDENCE_EPS
        {
            return Err(VortexError::CoincidentPoints);
        }
        Ok(state)
    }

    /// Closest pair and its separation (domain metric); (0,0) with +inf for
    /// fewer than two vortices.
    pub fn min_separation(&self) -> ((usize, usize), f64) {
        let mut best = ((0, 0), f64::INFINITY);
        for i in 0..self.positions.len() {
            for j in (i + 1)..self.positions.len() {
                let d = self.domain.distance(self.positions[i], self.positions[j]);
                if d < best.1 {
                    best = ((i, j), d);
                }
            }
        }
        best
    }
}

/// One accepted integrator step with the order-4 dense-output interpolant
/// y(t0 + θh) = c1 + θ(c2 + (1−θ)(c3 + θ(c4 + (1−θ)c5))).
#[derive(Clone, Debug)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    pub cont: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let theta = (t - self.t0) / self.h;
        let [c1, c2, c3, c4, c5] = &self.cont;
        let mut out = Vec::with_capacity(c1.len());
        for i in 0..c1.len() {
            out.push(
                c1[i] + theta * (c2[i] + (1.0 - theta) * (c3[i] + theta * (c4[i] + (1.0 - theta) * c5[i]))),
            );
        }
        out
    }
}

/// Integrated trajectory: states at every accepted step (times strictly
/// monotone in the direction of integration), dense-output segments, and
/// integrator statistics.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<(f64, VortexState)>,
    pub segments: Vec<DenseSegment>,
    pub steps: usize,
    pub rejected: usize,
    /// Smallest pairwise separation seen at any right-hand-side evaluation.
    pub min_separation: f64,
}

impl Trajectory {
    pub fn initial(&self) -> &VortexState {
        &self.states[0].1
    }

    pub fn last(&self) -> &VortexState {
        &self.states[self.states.len() - 1].1
    }

    /// Time range covered, as (start, end) in integration order.
    pub fn t_span(&self) -> (f64, f64) {
        (self.states[0].0, self.states[self.states.len() - 1].0)
    }

    fn in_span(&self, t: f64) -> bool {
        let (a, b) = self.t_span();
        let tol = 1e-12 * (1.0 + a.abs().max(b.abs()));
        (t - a) * (t - b) <= tol
    }

    /// Vortex positions at any time in the span, from dense output.
    pub fn positions_at(&self, t: f64) -> Result<Vec<Vec2>, VortexError> {
        if !self.in_span(t) {
            return Err(VortexError::OutOfRange);
        }
        if self.segments.is_empty() {
            return Ok(self.states[0].1.positions.clone());
        }
        // segments ordered in integration direction; pick the one containing t
        let seg = self
            .segments
            .iter()
            .find(|s| {
                let theta = (t - s.t0) / s.h;
                (-1e-12..=1.0 + 1e-12).contains(&theta)
            })
            .unwrap_or(&self.segments[self.segments.len() - 1]);
        let y = seg.eval(t);
        Ok(y.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect())
    }

    /// Full state at any time in the span.
    pub fn state_at(&self, t: f64) -> Result<VortexState, VortexError> {
        let positions = self.positions_at(t)?;
        let base = self.initial();
        Ok(VortexState {
            positions,
            intensities: base.intensities.clone(),
            domain: base.domain,
            time: t,
        })
    }
}
