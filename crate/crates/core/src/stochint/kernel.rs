//! Symmetric order-2 kernels on D×D with a declared diagonal convention,
//! their deterministic integrals, and their projection onto the truncated
//! eigenbasis (the Gaussian coefficient block used by I²).

use crate::geometry::{
    h_kernel, integrate_to_tol, quadrature, singular_integral, Domain, TestFunction,
    TestFunctionSpec, Vec2,
};
use crate::crm::w_modes;
use crate::spectral::{triad_closed_form, EigenMode};
use crate::stochint::StochIntError;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Dense symmetric coefficient matrix over the truncation basis
/// (index 0 = constant eigenfunction, then the mean-zero basis order).
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    pub n: usize,
    data: Vec<f64>,
}

impl CoeffMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, StochIntError> {
        assert_eq!(data.len(), n * n);
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for j in 0..n {
            for k in 0..j {
                if (data[j * n + k] - data[k * n + j]).abs() > 1e-12 * scale {
                    return Err(StochIntError::NonSymmetricKernel);
                }
            }
        }
        Ok(CoeffMatrix { n, data })
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.n + k]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|j| self.get(j, j)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// Projection of a kernel onto the m_W×m_W basis block, stored sparsely as
/// ordered index pairs. `tail` is the estimated L² norm (squared) of the
/// discarded part; exact 0 for finite-rank kernels.
#[derive(Clone, Debug)]
pub struct GaussianBlock {
    pub m_w: usize,
    /// All nonzero (j, k, ĥ_jk); both orders present, diagonal once.
    pub entries: Vec<(u32, u32, f64)>,
    pub trace: f64,
    pub tail: f64,
}

impl GaussianBlock {
    /// Order-2 Wiener chaos Σ ĥ_jk (ξ_jξ_k − δ_jk).
    pub fn chaos2(&self, xi: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(j, k, c)| {
                let d = if j == k { 1.0 } else { 0.0 };
                c * (xi[j as usize] * xi[k as usize] - d)
            })
            .sum()
    }

    /// Raw quadratic form Σ ĥ_jk ξ_jξ_k (no Itô correction).
    pub fn quadratic(&self, xi: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(j, k, c)| c * xi[j as usize] * xi[k as usize])
            .sum()
    }

    /// z_k = Σ_j ĥ_jk ξ_j as a sparse vector: the basis coefficients of
    /// x ↦ Σ_j ξ_j ĥ_j(x).
    pub fn contract(&self, xi: &[f64]) -> Vec<(u32, f64)> {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for &(j, k, c) in &self.entries {
            *acc.entry(k).or_insert(0.0) += c * xi[j as usize];
        }
        let mut out: Vec<(u32, f64)> = acc.into_iter().collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

enum Provenance {
    HPhi(TestFunction),
    Explicit(Arc<dyn Fn(Vec2, Vec2) -> f64 + Send + Sync>),
    FiniteRank(CoeffMatrix),
}

/// Symmetric real kernel on D×D with provenance tag and cached projections.
pub struct Kernel2 {
    pub domain: Domain,
    provenance: Provenance,
    blocks: Mutex<HashMap<usize, Arc<GaussianBlock>>>,
}

impl std::fmt::Debug for Kernel2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match &self.provenance {
            Provenance::HPhi(phi) => format!("HPhi({:?})", phi.spec),
            Provenance::Explicit(_) => "Explicit".to_string(),
            Provenance::FiniteRank(m) => format!("FiniteRank(n={})", m.n),
        };
        write!(f, "Kernel2({tag})")
    }
}

impl Kernel2 {
    /// H_φ(x,y) = ½(∇φ(x)−∇φ(y))·K(x,y) with H_φ(x,x) = 0.
    pub fn h_phi(phi: TestFunction) -> Self {
        Kernel2 { domain: phi.domain, provenance: Provenance::HPhi(phi), blocks: Mutex::default() }
    }

    /// A user-supplied symmetric kernel; symmetry is spot-checked on a fixed
    /// set of pseudo-random pairs.
    pub fn explicit(
        domain: Domain,
        f: impl Fn(Vec2, Vec2) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, StochIntError> {
        let mut scale = 1.0f64;
        let mut worst = 0.0f64;
        for i in 0..32u64 {
            let (x, y) = probe_pair(&domain, i);
            let (a, b) = (f(x, y), f(y, x));
            scale = scale.max(a.abs());
            worst = worst.max((a - b).abs());
        }
        if worst > 1e-9 * scale {
            return Err(StochIntError::NonSymmetricKernel);
        }
        Ok(Kernel2 { domain, provenance: Provenance::Explicit(Arc::new(f)), blocks: Mutex::default() })
    }

    /// h(x,y) = Σ_{j,k<n} c_jk u_j(x) u_k(y) over the truncation basis.
    pub fn finite_rank(domain: Domain, coeffs: CoeffMatrix) -> Result<Self, StochIntError> {
        Ok(Kernel2 { domain, provenance: Provenance::FiniteRank(coeffs), blocks: Mutex::default() })
    }

    pub fn is_h_phi(&self) -> bool {
        matches!(self.provenance, Provenance::HPhi(_))
    }

    pub fn rank(&self) -> Option<usize> {
        match &self.provenance {
            Provenance::FiniteRank(m) => Some(m.n),
            _ => None,
        }
    }

    fn modes(&self, count: usize) -> Arc<Vec<EigenMode>> {
        w_modes(&self.domain, count)
    }

    /// Value of the j-th truncation basis function at x (0 = constant).
    fn basis_value(&self, modes: &[EigenMode], j: usize, x: Vec2) -> f64 {
        if j == 0 {
            1.0 / self.domain.side().expect("spatial basis evaluation requires the torus")
        } else {
            modes[j - 1].eval(x)
        }
    }

    pub fn eval(&self, x: Vec2, y: Vec2) -> f64 {
        match &self.provenance {
            Provenance::HPhi(phi) => h_kernel(phi, x, y),
            Provenance::Explicit(f) => f(x, y),
            Provenance::FiniteRank(m) => {
                let modes = self.modes(m.n);
                let ux: Vec<f64> = (0..m.n).map(|j| self.basis_value(&modes, j, x)).collect();
                let uy: Vec<f64> = (0..m.n).map(|k| self.basis_value(&modes, k, y)).collect();
                let mut v = 0.0;
                for j in 0..m.n {
                    for k in 0..m.n {
                        v += m.get(j, k) * ux[j] * uy[k];
                    }
                }
                v
            }
        }
    }

    pub fn eval_sym(&self, x: Vec2, y: Vec2) -> f64 {
        0.5 * (self.eval(x, y) + self.eval(y, x))
    }

    /// ∫_D h(x, y) dx at fixed y.
    pub fn integral_first(&self, y: Vec2, order: usize) -> f64 {
        match &self.provenance {
            // identically zero for H_φ on both domains (verified against the
            // singular quadrature in the geometry tests); skipping the
            // quadrature makes a-terms in I² free for these kernels
            Provenance::HPhi(_) => 0.0,
            Provenance::Explicit(f) => {
                integrate_to_tol(&self.domain, |x| f(x, y), order, 1e-9)
            }
            Provenance::FiniteRank(m) => {
                let l = self.domain.side().expect("finite-rank integrals require the torus");
                let modes = self.modes(m.n);
                (0..m.n).map(|k| l * m.get(0, k) * self.basis_value(&modes, k, y)).sum()
            }
        }
    }

    /// ∫_D h(x, y) dy at fixed x.
    pub fn integral_second(&self, x: Vec2, order: usize) -> f64 {
        match &self.provenance {
            Provenance::HPhi(phi) => {
                if self.domain.is_torus() {
                    // zero by integration by parts / oddness on the torus
                    0.0
                } else {
                    singular_integral(&self.domain, |y| h_kernel(phi, x, y), x, order)
                }
            }
            Provenance::Explicit(f) => {
                integrate_to_tol(&self.domain, |y| f(x, y), order, 1e-9)
            }
            Provenance::FiniteRank(m) => {
                let l = self.domain.side().expect("finite-rank integrals require the torus");
                let modes = self.modes(m.n);
                (0..m.n).map(|j| l * m.get(j, 0) * self.basis_value(&modes, j, x)).sum()
            }
        }
    }

    /// ∬ h dx dy.
    pub fn double_integral(&self, order: usize) -> f64 {
        match &self.provenance {
            Provenance::FiniteRank(m) => {
                let l = self.domain.side().expect("finite-rank integrals require the torus");
                l * l * m.get(0, 0)
            }
            // the first-argument integral vanishes pointwise, so ∬h = 0
            Provenance::HPhi(_) => 0.0,
            Provenance::Explicit(_) => {
                integrate_to_tol(&self.domain, |y| self.integral_first(y, order), 12, 1e-8)
            }
        }
    }

    /// ∫ h(x, x) dx under the declared diagonal convention.
    pub fn trace_integral(&self, order: usize) -> f64 {
        match &self.provenance {
            Provenance::HPhi(_) => 0.0,
            Provenance::Explicit(f) => integrate_to_tol(&self.domain, |x| f(x, x), order, 1e-9),
            Provenance::FiniteRank(m) => m.trace(),
        }
    }

    /// ‖h̃‖²_{L²(D²)} of the symmetrized kernel. Exact (Parseval) for finite
    /// rank; tensor quadrature otherwise. For H_φ the diagonal jump limits
    /// the quadrature to a few digits — use finite-rank kernels where this
    /// norm feeds a tight tolerance.
    pub fn l2_norm_sq_sym(&self, order: usize) -> f64 {
        match &self.provenance {
            Provenance::FiniteRank(m) => m.frobenius_sq(),
            _ => {
                let rule = quadrature(&self.domain, order);
                let mut total = 0.0;
                for &(x, wx) in &rule {
                    for &(y, wy) in &rule {
                        let v = self.eval_sym(x, y);
                        total += wx * wy * v * v;
                    }
                }
                total
            }
        }
    }

    /// Basis coefficients (length m_w) of y ↦ ∫h(x,y)dx.
    pub fn row_integral_coeffs(&self, m_w: usize, order: usize) -> Result<Vec<f64>, StochIntError> {
        match &self.provenance {
            Provenance::FiniteRank(m) => {
                if m.n > m_w {
                    return Err(StochIntError::RankTooHigh);
                }
                let l = self.domain.side().ok_or_else(|| {
                    StochIntError::UnsupportedGaussianProjection(
                        "finite-rank spatial projection requires the torus".into(),
                    )
                })?;
                let mut c = vec![0.0; m_w];
                for k in 0..m.n {
                    c[k] = l * m.get(0, k);
                }
                Ok(c)
            }
            // ∫H_φ(x,·)dx ≡ 0 on the torus (tested elsewhere to 1e-8)
            Provenance::HPhi(_) => Ok(vec![0.0; m_w]),
            Provenance::Explicit(_) => {
                let l = self.domain.side().ok_or_else(|| {
                    StochIntError::UnsupportedGaussianProjection(
                        "explicit-kernel projection requires the torus".into(),
                    )
                })?;
                let modes = self.modes(m_w);
                let rule = quadrature(&self.domain, order);
                let g: Vec<f64> =
                    rule.iter().map(|&(y, _)| self.integral_first(y, order)).collect();
                let _ = l;
                let mut c = vec![0.0; m_w];
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj = rule
                        .iter()
                        .zip(&g)
                        .map(|(&(y, w), gy)| w * gy * self.basis_value(&modes, j, y))
                        .sum();
                }
                Ok(c)
            }
        }
    }

    /// Projection onto the m_W×m_W basis block, cached per m_W.
    pub fn gaussian_block(&self, m_w: usize) -> Result<Arc<GaussianBlock>, StochIntError> {
        if let Some(b) = self.blocks.lock().unwrap().get(&m_w) {
            return Ok(b.clone());
        }
        let block = Arc::new(self.build_block(m_w)?);
        self.blocks.lock().unwrap().insert(m_w, block.clone());
        Ok(block)
    }

    fn build_block(&self, m_w: usize) -> Result<GaussianBlock, StochIntError> {
        match &self.provenance {
            Provenance::FiniteRank(m) => {
                if m.n > m_w {
                    return Err(StochIntError::RankTooHigh);
                }
                let mut entries = Vec::new();
                for j in 0..m.n {
                    for k in 0..m.n {
                        let c = m.get(j, k);
                        if c != 0.0 {
                            entries.push((j as u32, k as u32, c));
                        }
                    }
                }
                Ok(GaussianBlock { m_w, entries, trace: m.trace(), tail: 0.0 })
            }
            Provenance::HPhi(phi) => self.build_h_phi_block(phi, m_w),
            Provenance::Explicit(f) => self.build_explicit_block(f.as_ref(), m_w),
        }
    }

    /// ĥ_jk = ⟨φ_j ⊗ φ_k, H_{φ_ℓ}⟩ = C_{j,k,ℓ}: sparse by triad resonance.
    fn build_h_phi_block(
        &self,
        phi: &TestFunction,
        m_w: usize,
    ) -> Result<GaussianBlock, StochIntError> {
        let (k_l, phase_l) = match phi.spec {
            TestFunctionSpec::TorusMode { k, phase } => (k, phase),
            _ => {
                return Err(StochIntError::UnsupportedGaussianProjection(
                    "H_φ Gaussian projection needs φ in the torus eigenbasis".into(),
                ))
            }
        };
        let modes = self.modes(m_w);
        // representative wavevector → position of its cos mode in `modes`
        let mut index: HashMap<(i32, i32), usize> = HashMap::new();
        for (i, mode) in modes.iter().enumerate() {
            index.entry(mode.k).or_insert(i);
        }
        let l_mode = EigenMode::new(self.domain, k_l, phase_l);
        let mut entries = Vec::new();
        for (j, mode_j) in modes.iter().enumerate() {
            let mj = mode_j.k;
            // resonance: m_k ∈ ±m_j ± m_ℓ (up to the ±k representative).
            // Sorted Vec, not a HashSet: entry order fixes the summation
            // order of the quadratic form, which must be reproducible.
            let mut candidates: Vec<usize> = Vec::with_capacity(4);
            for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mk = (s1 * mj.0 + s2 * k_l.0, s1 * mj.1 + s2 * k_l.1);
                let rep = if mk.0 > 0 || (mk.0 == 0 && mk.1 > 0) { mk } else { (-mk.0, -mk.1) };
                if let Some(&base) = index.get(&rep) {
                    candidates.push(base);
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            for base in candidates {
                for off in 0..2 {
                    let k = base + off;
                    if k >= modes.len() {
                        continue;
                    }
                    let c = triad_closed_form(mode_j, &modes[k], &l_mode);
                    if c.abs() > 1e-14 {
                        entries.push((j as u32 + 1, k as u32 + 1, c));
                    }
                }
            }
        }
        // coincident-index triads vanish, so the trace is exactly 0, matching
        // the H_φ diagonal convention ∫H(x,x)dx = 0
        Ok(GaussianBlock { m_w, entries, trace: 0.0, tail: f64::NAN })
    }

    fn build_explicit_block(
        &self,
        f: &(dyn Fn(Vec2, Vec2) -> f64 + Send + Sync),
        m_w: usize,
    ) -> Result<GaussianBlock, StochIntError> {
        if self.domain.side().is_none() {
            return Err(StochIntError::UnsupportedGaussianProjection(
                "explicit-kernel projection requires the torus".into(),
            ));
        }
        let modes = self.modes(m_w);
        let order = 64;
        let rule = quadrature(&self.domain, order);
        // v[k][p] = Σ_q w_q h̃(x_p, x_q) u_k(x_q), then ĉ_jk = Σ_p w_p u_j v
        let np = rule.len();
        let mut half = vec![0.0; m_w * np];
        for (p, &(xp, _)) in rule.iter().enumerate() {
            for &(xq, wq) in &rule {
                let v = 0.5 * (f(xp, xq) + f(xq, xp));
                for k in 0..m_w {
                    half[k * np + p] += wq * v * self.basis_value(&modes, k, xq);
                }
            }
        }
        let mut norm_sq = 0.0;
        for &(xp, wp) in rule.iter() {
            for &(xq, wq) in &rule {
                let v = 0.5 * (f(xp, xq) + f(xq, xp));
                norm_sq += wp * wq * v * v;
            }
        }
        let mut entries = Vec::new();
        let mut captured = 0.0;
        for j in 0..m_w {
            for k in 0..m_w {
                let c: f64 = rule
                    .iter()
                    .enumerate()
                    .map(|(p, &(xp, wp))| wp * self.basis_value(&modes, j, xp) * half[k * np + p])
                    .sum();
                if c.abs() > 1e-13 {
                    captured += c * c;
                    entries.push((j as u32, k as u32, c));
                }
            }
        }
        let trace = entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum();
        Ok(GaussianBlock { m_w, entries, trace, tail: (norm_sq - captured).max(0.0) })
    }

    /// Value of basis function j at x, public for the integral assembly.
    pub fn basis_values_at(&self, m_w: usize, x: Vec2, indices: &[u32]) -> Vec<f64> {
        let modes = self.modes(m_w);
        indices.iter().map(|&j| self.basis_value(&modes, j as usize, x)).collect()
    }
}

/// Deterministic, reproducible probe pair for the symmetry spot check.
fn probe_pair(domain: &Domain, i: u64) -> (Vec2, Vec2) {
    // splitmix-style scramble into [0,1)⁴
    let mut s = i.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(0x1234_5678);
    let mut next = || {
        s ^= s >> 30;
        s = s.wrapping_mul(0xBF58476D1CE4E5B9);
        s ^= s >> 27;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    let (u1, u2, u3, u4) = (next(), next(), next(), next());
    match domain.side() {
        Some(l) => (Vec2::new(u1 * l, u2 * l), Vec2::new(u3 * l, u4 * l)),
        None => {
            let p = |a: f64, b: f64| {
                let r = a.sqrt() * 0.95;
                let t = b * 2.0 * std::f64::consts::PI;
                Vec2::new(r * t.cos(), r * t.sin())
            };
            (p(u1, u2), p(u3, u4))
        }
    }
}
