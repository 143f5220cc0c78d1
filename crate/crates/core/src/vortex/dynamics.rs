//! The point-vortex vector field, its conserved energy, integration,
//! the flow pushforward of atomic samples, and the weak-form residual.

use crate::crm::CRMSample;
use crate::geometry::{DomainKind, GeometryError, TestFunction, Vec2};
use crate::stats::adaptive_simpson;
use crate::vortex::dopri5::{dopri5_with, Dopri5Output};
use crate::vortex::state::{Trajectory, VortexState};
use crate::vortex::VortexError;

/// Default minimum pairwise separation; below it the dynamics is reported as
/// collapsing instead of being integrated through.
pub const COLLAPSE_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct VortexOptions {
    /// Add the boundary self-interaction (image) velocity on the disk.
    /// Default false: each vortex feels only the other vortices, exactly as
    /// the particle system is written.
    pub self_image: bool,
    pub collapse_threshold: f64,
    /// Use the tabulated torus kernel (≈1e-5 absolute accuracy) instead of
    /// the full Ewald sum; intended for large statistical ensembles.
    pub fast_kernel: bool,
    /// Abort with [`VortexError::StepBudgetExceeded`] after this many
    /// accepted + rejected steps. Tight pairs force step sizes ∝ separation²,
    /// so a budget bounds the cost of near-collapse configurations in large
    /// ensembles; `None` (the default) never aborts.
    pub max_steps: Option<usize>,
}

impl Default for VortexOptions {
    fn default() -> Self {
        VortexOptions {
            self_image: false,
            collapse_threshold: COLLAPSE_THRESHOLD,
            fast_kernel: false,
            max_steps: None,
        }
    }
}

fn map_geometry(e: GeometryError) -> VortexError {
    match e {
        GeometryError::CoincidentPoints => VortexError::CoincidentPoints,
        GeometryError::OutsideDomain => {
            VortexError::InvalidState("vortex left the domain".into())
        }
    }
}

/// Self-interaction velocity of a disk vortex from its own image:
/// γ ∇⊥[¼π⁻¹... namely γ·∇⊥(g(x,x)/2) with g the image part of the Green
/// function, g(x,x) = (2π)⁻¹ ln(1−|x|²).
fn disk_self_velocity(x: Vec2, gamma: f64) -> Vec2 {
    let denom = 1.0 - x.norm_sq();
    (x * (-2.0 / denom)).perp() * (gamma / (4.0 * std::f64::consts::PI))
}

/// Velocities ẋ_i = Σ_{j≠i} γ_j K(x_i, x_j) by direct summation.
pub fn rhs(state: &VortexState) -> Result<Vec<Vec2>, VortexError> {
    rhs_opts(state, &VortexOptions::default())
}

pub fn rhs_opts(state: &VortexState, opts: &VortexOptions) -> Result<Vec<Vec2>, VortexError> {
    let (vel, (_, min_sep)) = rhs_with_minsep(state, opts)?;
    if min_sep < opts.collapse_threshold {
        return Err(VortexError::NearCollapse { min_sep });
    }
    Ok(vel)
}

/// Velocities plus the closest pair seen, in one sweep over the pairs. On the
/// torus K(x, y) = −K(y, x), so each unordered pair costs one kernel
/// evaluation; this is the hot loop of every large-ensemble integration.
pub(crate) fn rhs_with_minsep(
    state: &VortexState,
    opts: &VortexOptions,
) -> Result<(Vec<Vec2>, ((usize, usize), f64)), VortexError> {
    let n = state.positions.len();
    let fast = if opts.fast_kernel && state.domain.is_torus() {
        Some(crate::vortex::fastk::FastBiotSavart::shared(&state.domain))
    } else {
        None
    };
    let wrapped: Vec<Vec2> = state.positions.iter().map(|&p| state.domain.wrap(p)).collect();
    let gam = &state.intensities;
    let mut vel = vec![Vec2::ZERO; n];
    let mut min_pair = (0, 0);
    let mut min_sep = f64::INFINITY;
    if state.domain.is_torus() {
        for i in 0..n {
            for j in (i + 1)..n {
                let (k, sep) = match &fast {
                    Some(table) => {
                        let d = table.min_image(wrapped[i] - wrapped[j]);
                        (table.eval_delta(d), d.norm())
                    }
                    None => (
                        state.domain.biot_savart(wrapped[i], wrapped[j]).map_err(map_geometry)?,
                        state.domain.distance(wrapped[i], wrapped[j]),
                    ),
                };
                if sep < min_sep {
                    min_sep = sep;
                    min_pair = (i, j);
                }
                vel[i] += k * gam[j];
                vel[j] -= k * gam[i];
            }
        }
    } else {
        // the disk kernel carries an image part and is not antisymmetric
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if j > i {
                    let sep = state.domain.distance(wrapped[i], wrapped[j]);
                    if sep < min_sep {
                        min_sep = sep;
                        min_pair = (i, j);
                    }
                }
                let k = state.domain.biot_savart(wrapped[i], wrapped[j]).map_err(map_geometry)?;
                vel[i] += k * gam[j];
            }
            if opts.self_image && state.domain.kind == DomainKind::UnitDisk {
                vel[i] += disk_self_velocity(wrapped[i], gam[i]);
            }
        }
    }
    Ok((vel, (min_pair, min_sep)))
}

/// Interaction energy Σ_{i<j} γ_iγ_j G(x_i, x_j); with `self_image` on the
/// disk, adds the image self-energy Σ_i γ_i² (4π)⁻¹ ln(1−|x_i|²) so the
/// total stays conserved under the self-image dynamics.
pub fn hamiltonian(state: &VortexState) -> Result<f64, VortexError> {
    hamiltonian_opts(state, &VortexOptions::default())
}

pub fn hamiltonian_opts(state: &VortexState, opts: &VortexOptions) -> Result<f64, VortexError> {
    let n = state.positions.len();
    let mut h = 0.0;
    for i in 0..n {
        let xi = state.domain.wrap(state.positions[i]);
        for j in (i + 1)..n {
            h += state.intensities[i]
                * state.intensities[j]
                * state.domain.green(xi, state.domain.wrap(state.positions[j])).map_err(map_geometry)?;
        }
        if opts.self_image && state.domain.kind == DomainKind::UnitDisk {
            let g = state.intensities[i];
            h += g * g * (1.0 - xi.norm_sq()).ln() / (4.0 * std::f64::consts::PI);
        }
    }
    Ok(h)
}

fn flatten(ps: &[Vec2]) -> Vec<f64> {
    ps.iter().flat_map(|p| [p.x, p.y]).collect()
}

fn unflatten(y: &[f64]) -> Vec<Vec2> {
    y.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect()
}

/// Integrate the vortex system to `t_final` (either direction) with local
/// error tolerance `tol`, recording every accepted step and dense output.
pub fn integrate(state: &VortexState, t_final: f64, tol: f64) -> Result<Trajectory, VortexError> {
    integrate_opts(state, t_final, tol, &VortexOptions::default())
}

/// Shared driver: adaptive integration with collapse monitoring, an optional
/// step budget, and dense output only when requested.
fn integrate_core(
    state: &VortexState,
    t_final: f64,
    tol: f64,
    opts: &VortexOptions,
    dense: bool,
) -> Result<(Dopri5Output, f64), VortexError> {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    let mut min_sep = if state.positions.len() > 1 {
        state.min_separation().1
    } else {
        f64::INFINITY
    };
    let eval_budget = opts.max_steps.map(|s| s.saturating_mul(7));
    let mut evals = 0usize;
    let template = state.clone();
    let f = |t: f64, y: &[f64]| -> Result<Vec<f64>, VortexError> {
        let s = VortexState {
            positions: unflatten(y),
            intensities: template.intensities.clone(),
            domain: template.domain,
            time: t,
        };
        evals += 1;
        if eval_budget.is_some_and(|b| evals > b) {
            return Err(VortexError::StepBudgetExceeded { time: t, min_sep });
        }
        let (vel, (pair, sep)) = rhs_with_minsep(&s, opts)?;
        if s.positions.len() > 1 {
            min_sep = min_sep.min(sep);
            if sep < opts.collapse_threshold {
                return Err(VortexError::CollapseDetected { time: t, pair });
            }
        }
        Ok(flatten(&vel))
    };
    let y0 = flatten(&state.positions);
    let sol = dopri5_with(f, state.time, &y0, t_final, tol, dense)?;
    Ok((sol, min_sep))
}

pub fn integrate_opts(
    state: &VortexState,
    t_final: f64,
    tol: f64,
    opts: &VortexOptions,
) -> Result<Trajectory, VortexError> {
    let (sol, min_sep) = integrate_core(state, t_final, tol, opts, true)?;
    let mut states = vec![(state.time, state.clone())];
    for (t, y) in &sol.accepted {
        states.push((
            *t,
            VortexState {
                positions: unflatten(y),
                intensities: state.intensities.clone(),
                domain: state.domain,
                time: *t,
            },
        ));
    }
    Ok(Trajectory {
        states,
        segments: sol.segments,
        steps: sol.steps,
        rejected: sol.rejected,
        min_separation: min_sep,
    })
}

/// Transport the atoms of a pure-atom sample (q = 0, no drift) by the vortex
/// flow for time `t`; intensities and counts are unchanged.
pub fn flow_pushforward(
    sample: &CRMSample,
    t: f64,
    tol: f64,
) -> Result<CRMSample, VortexError> {
    flow_pushforward_opts(sample, t, tol, &VortexOptions::default())
}

pub fn flow_pushforward_opts(
    sample: &CRMSample,
    t: f64,
    tol: f64,
    opts: &VortexOptions,
) -> Result<CRMSample, VortexError> {
    if sample.q != 0.0 || !sample.gaussian_coeffs.is_empty() || sample.drift != 0.0 {
        return Err(VortexError::NotPureAtomic);
    }
    let mut out = sample.clone();
    if sample.atoms.is_empty() || t == 0.0 {
        return Ok(out);
    }
    let (positions, intensities): (Vec<Vec2>, Vec<f64>) = sample.atoms.iter().copied().unzip();
    let state = VortexState::new(positions, intensities, sample.domain, 0.0)?;
    // endpoint only: skip the dense interpolant (stiff near-collapse samples
    // can take 10⁵+ steps, and an interpolant per step is prohibitive)
    let (sol, _) = integrate_core(&state, t, tol, opts, false)?;
    for (atom, p) in out.atoms.iter_mut().zip(unflatten(&sol.y)) {
        atom.0 = sample.domain.wrap(p);
    }
    Ok(out)
}

/// Symmetric pair kernel ½(∇φ(x)·K(x,y) + ∇φ(y)·K(y,x)) driving the weak
/// formulation. On the torus K is antisymmetric and this is exactly
/// [`h_kernel`]; on the disk the image part of K breaks antisymmetry and
/// this direct symmetrization is the kernel whose ordered off-diagonal sum
/// reproduces d/dt Σγφ(x_i) for the particle dynamics.
pub fn weak_pair_kernel(phi: &TestFunction, x: Vec2, y: Vec2) -> f64 {
    let domain = &phi.domain;
    if domain.distance(x, y) < crate::geometry::DIAGONAL_EPS {
        return 0.0;
    }
    let kxy = domain.biot_savart(x, y).expect("points checked non-coincident");
    let kyx = domain.biot_savart(y, x).expect("points checked non-coincident");
    0.5 * (phi.grad(x).dot(kxy) + phi.grad(y).dot(kyx))
}

/// |LHS − RHS| of the weak formulation between times s and t:
/// Σγφ(x_i)|_s^t minus the time integral of the ordered off-diagonal
/// pair-kernel sum, evaluated from dense output.
pub fn weak_residual(
    traj: &Trajectory,
    phi: &TestFunction,
    s: f64,
    t: f64,
) -> Result<f64, VortexError> {
    let domain = traj.initial().domain;
    if phi.domain.kind != domain.kind {
        return Err(VortexError::InvalidState("test function domain mismatch".into()));
    }
    if s == t {
        return Ok(0.0);
    }
    let gammas = &traj.initial().intensities;
    let pair_sum = |positions: &[Vec2]| -> f64 {
        let mut acc = 0.0;
        for (i, &xi) in positions.iter().enumerate() {
            for (j, &xj) in positions.iter().enumerate() {
                if i != j {
                    acc += gammas[i]
                        * gammas[j]
                        * weak_pair_kernel(phi, domain.wrap(xi), domain.wrap(xj));
                }
            }
        }
        acc
    };
    let atom_sum = |positions: &[Vec2]| -> f64 {
        positions
            .iter()
            .zip(gammas)
            .map(|(&x, g)| g * phi.eval(domain.wrap(x)))
            .sum()
    };
    let lhs = atom_sum(&traj.positions_at(t)?) - atom_sum(&traj.positions_at(s)?);
    let integrand = |r: f64| pair_sum(&traj.positions_at(r).expect("r within checked span"));
    let rhs_val = adaptive_simpson(&integrand, s, t, 1e-9);
    Ok((lhs - rhs_val).abs())
}
