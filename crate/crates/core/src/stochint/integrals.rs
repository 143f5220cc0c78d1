//! Evaluation of I¹ and I² on fixed samples, split into the parts of the
//! expansion M = a·dx + √q W + P, plus the full tensor pairing ⟨h, M⊗M⟩.

use crate::crm::CRMSample;
use crate::geometry::{integrate_to_tol, TestFunction, TestFunctionSpec};
use crate::geometry::testfn::Phase;
use crate::stochint::kernel::Kernel2;
use crate::stochint::StochIntError;
use serde::{Deserialize, Serialize};

/// One stochastic integral split into its expansion parts; unused parts are
/// zero (order 1 fills the first three, order 2 the rest).
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct IntegralDecomposition {
    /// drift·∫f dx (order 1).
    pub deterministic: f64,
    /// √q Σ f̂_j ξ_j.
    pub gaussian1: f64,
    /// Σ γ_i f(x_i).
    pub poisson1: f64,
    /// q Σ ĥ_jk (ξ_jξ_k − δ_jk).
    pub gaussian2: f64,
    /// 2√q Σ_i γ_i Σ_j ĥ_j(x_i) ξ_j (plus its −m₁ compensation).
    pub mixed: f64,
    /// Σ_{i≠j} γ_iγ_j h(x_i,x_j) − 2m₁ Σ γ_i ∫h(x_i,y)dy + m₁²∬h.
    pub poisson2: f64,
    /// a²∬h.
    pub deterministic2: f64,
    /// 2a·I¹_{M−a·dx}(y ↦ ∫h(x,y)dx).
    pub cross1: f64,
    /// Estimated squared L² norm of the kernel part outside the Gaussian
    /// truncation block (0 for finite rank, NaN if not estimated).
    pub gaussian2_tail: f64,
    pub total: f64,
}

impl IntegralDecomposition {
    fn with_total(mut self) -> Self {
        self.total = self.deterministic
            + self.gaussian1
            + self.poisson1
            + self.gaussian2
            + self.mixed
            + self.poisson2
            + self.deterministic2
            + self.cross1;
        self
    }
}

/// Position of the torus mode (k, phase) in the truncation basis of size
/// `m_w` (index 0 is the constant), together with the sign relating the ±k
/// representative: φ_{−k,cos} = φ_{k,cos}, φ_{−k,sin} = −φ_{k,sin}.
fn mode_coefficient_index(m_w: usize, k: (i32, i32), phase: Phase) -> Option<(usize, f64)> {
    let want = m_w.saturating_sub(1);
    let mut max_k = 1i32;
    while ((2 * max_k + 1) * (2 * max_k + 1) - 1) < want as i32 {
        max_k += 1;
    }
    let (rep, sign) = if k.0 > 0 || (k.0 == 0 && k.1 > 0) {
        (k, 1.0)
    } else {
        ((-k.0, -k.1), if phase == Phase::Sin { -1.0 } else { 1.0 })
    };
    if rep.0 > max_k || rep.1.abs() > max_k || rep == (0, 0) {
        return None;
    }
    // representatives: kx = 0 with ky = 1..=max, then kx = 1..=max with
    // ky = −max..=max, lexicographic; two modes (cos, sin) per representative
    let pos = if rep.0 == 0 {
        (rep.1 - 1) as usize
    } else {
        max_k as usize + ((rep.0 - 1) * (2 * max_k + 1) + (rep.1 + max_k)) as usize
    };
    let idx = 1 + 2 * pos + if phase == Phase::Sin { 1 } else { 0 };
    (idx < m_w).then_some((idx, sign))
}

fn check_domains(sample: &CRMSample, other: &crate::geometry::Domain) -> Result<(), StochIntError> {
    if sample.domain.kind == other.kind {
        Ok(())
    } else {
        Err(StochIntError::DomainMismatch)
    }
}

/// I¹_M(f) = drift·∫f + √q W(f) + Σ γ_i f(x_i).
pub fn i1(sample: &CRMSample, f: &TestFunction) -> Result<IntegralDecomposition, StochIntError> {
    check_domains(sample, &f.domain)?;
    let is_mode = matches!(f.spec, TestFunctionSpec::TorusMode { .. });
    let integral = if is_mode {
        0.0 // mean-zero analytically
    } else if sample.drift != 0.0 {
        integrate_to_tol(&sample.domain, |p| f.eval(p), 64, 1e-9)
    } else {
        0.0
    };
    let deterministic = sample.drift * integral;

    let mut gaussian1 = 0.0;
    if sample.q > 0.0 && sample.m_w > 0 {
        match f.spec {
            TestFunctionSpec::TorusMode { k, phase } => {
                if let Some((idx, sign)) = mode_coefficient_index(sample.m_w, k, phase) {
                    gaussian1 = sample.q.sqrt() * sign * sample.gaussian_coeffs[idx];
                }
                // modes beyond the truncation have coefficient 0
            }
            _ => {
                return Err(StochIntError::UnsupportedGaussianProjection(
                    "I¹ Gaussian part needs f in the torus eigenbasis".into(),
                ))
            }
        }
    }
    let poisson1 = sample.atom_pairing(|p| f.eval(p));
    Ok(IntegralDecomposition { deterministic, gaussian1, poisson1, ..Default::default() }
        .with_total())
}

/// I²_M(h): ordered off-diagonal double integral over X = M − a·dx plus the
/// a-cross and a² terms of the expansion.
pub fn i2(sample: &CRMSample, h: &Kernel2) -> Result<IntegralDecomposition, StochIntError> {
    check_domains(sample, &h.domain)?;
    if let Some(n) = h.rank() {
        if sample.q > 0.0 && n > sample.m_w {
            return Err(StochIntError::RankTooHigh);
        }
    }
    let m1 = sample.a - sample.drift;
    let atoms = &sample.atoms;
    let order = 64;

    // atoms: ordered off-diagonal pairs
    let mut pair_sum = 0.0;
    for (i, &(xi, gi)) in atoms.iter().enumerate() {
        for (j, &(xj, gj)) in atoms.iter().enumerate() {
            if i != j {
                pair_sum += gi * gj * h.eval(xi, xj);
            }
        }
    }
    let needs_dd = sample.a != 0.0 || m1 != 0.0;
    let dd = if needs_dd { h.double_integral(order) } else { 0.0 };
    let mut poisson2 = pair_sum;
    if m1 != 0.0 {
        let s: f64 = atoms.iter().map(|&(x, g)| g * h.integral_second(x, order)).sum();
        poisson2 += -2.0 * m1 * s + m1 * m1 * dd;
    }
    let deterministic2 = sample.a * sample.a * dd;

    let mut gaussian2 = 0.0;
    let mut mixed = 0.0;
    let mut gaussian2_tail = 0.0;
    let q = sample.q;
    if q > 0.0 && sample.m_w > 0 {
        let block = h.gaussian_block(sample.m_w)?;
        gaussian2 = q * block.chaos2(&sample.gaussian_coeffs);
        gaussian2_tail = block.tail;
        if !atoms.is_empty() {
            let z = block.contract(&sample.gaussian_coeffs);
            let idx: Vec<u32> = z.iter().map(|e| e.0).collect();
            for &(x, g) in atoms {
                let u = h.basis_values_at(sample.m_w, x, &idx);
                let s: f64 = z.iter().zip(&u).map(|(&(_, zk), uk)| zk * uk).sum();
                mixed += 2.0 * q.sqrt() * g * s;
            }
        }
        if m1 != 0.0 {
            // W-part of the compensation: −2√q m₁ W(∫h(x,·)dx)
            let gc = h.row_integral_coeffs(sample.m_w, order)?;
            let wg: f64 =
                sample.gaussian_coeffs.iter().zip(&gc).map(|(xi, c)| xi * c).sum();
            mixed -= 2.0 * q.sqrt() * m1 * wg;
        }
    }

    let mut cross1 = 0.0;
    if sample.a != 0.0 {
        let mut val = 0.0;
        if q > 0.0 && sample.m_w > 0 {
            let gc = h.row_integral_coeffs(sample.m_w, order)?;
            let wg: f64 =
                sample.gaussian_coeffs.iter().zip(&gc).map(|(xi, c)| xi * c).sum();
            val += q.sqrt() * wg;
        }
        val += atoms.iter().map(|&(x, g)| g * h.integral_first(x, order)).sum::<f64>();
        val -= m1 * dd;
        cross1 = 2.0 * sample.a * val;
    }

    Ok(IntegralDecomposition {
        gaussian2,
        mixed,
        poisson2,
        deterministic2,
        cross1,
        gaussian2_tail,
        ..Default::default()
    }
    .with_total())
}

/// ⟨h, M⊗M⟩ assembled as a full square (diagonal terms included), for audit
/// of I² via the pairing relation
/// ⟨h, M⊗M⟩ = I²(h) + q∫h(x,x)dx + Σ γ_i² h(x_i,x_i).
pub fn pairing_tensor(sample: &CRMSample, h: &Kernel2) -> Result<f64, StochIntError> {
    check_domains(sample, &h.domain)?;
    let b = sample.drift;
    let atoms = &sample.atoms;
    let order = 64;

    let mut total = 0.0;
    for &(xi, gi) in atoms.iter() {
        for &(xj, gj) in atoms.iter() {
            total += gi * gj * h.eval(xi, xj);
        }
    }
    if b != 0.0 {
        total += b * b * h.double_integral(order);
        let mut lin: f64 =
            atoms.iter().map(|&(x, g)| g * h.integral_first(x, order)).sum();
        if sample.q > 0.0 && sample.m_w > 0 {
            let gc = h.row_integral_coeffs(sample.m_w, order)?;
            let wg: f64 =
                sample.gaussian_coeffs.iter().zip(&gc).map(|(xi, c)| xi * c).sum();
            lin += sample.q.sqrt() * wg;
        }
        total += 2.0 * b * lin;
    }
    if sample.q > 0.0 && sample.m_w > 0 {
        let block = h.gaussian_block(sample.m_w)?;
        total += sample.q * block.quadratic(&sample.gaussian_coeffs);
        if !atoms.is_empty() {
            let z = block.contract(&sample.gaussian_coeffs);
            let idx: Vec<u32> = z.iter().map(|e| e.0).collect();
            for &(x, g) in atoms.iter() {
                let u = h.basis_values_at(sample.m_w, x, &idx);
                let s: f64 = z.iter().zip(&u).map(|(&(_, zk), uk)| zk * uk).sum();
                total += 2.0 * sample.q.sqrt() * g * s;
            }
        }
    }
    Ok(total)
}
