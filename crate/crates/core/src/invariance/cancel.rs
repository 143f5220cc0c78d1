//! Per-sample algebraic cancellations that make E[𝒜F] = 0 hold without any
//! truncation bias: the symmetrized triad contractions Σ ξξξ·C and Σ ξξp·C
//! vanish identically, and the deterministic density a drops out of I²(H_φ).

use crate::crm::{w_modes, CRMSample};
use crate::invariance::InvarianceError;
use crate::spectral::{basis, triad_closed_form, EigenMode};
use crate::stochint::{i2, Kernel2};
use crate::geometry::Domain;

/// Dense table of triad coefficients C_{h,k,ℓ} = ∫ φ_h H_{φ_k,φ_ℓ} over a
/// wavenumber-bounded mode set, stored as a sparse list of nonzeros.
pub struct TriadTensor {
    pub modes: Vec<EigenMode>,
    /// (h, k, ℓ, C_{hkℓ}) with |C| above machine precision.
    pub entries: Vec<(usize, usize, usize, f64)>,
}

impl TriadTensor {
    pub fn new(domain: Domain, max_wavenumber: i32) -> Self {
        let modes = basis(domain, max_wavenumber);
        let n = modes.len();
        let mut entries = Vec::new();
        for h in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c = triad_closed_form(&modes[h], &modes[k], &modes[l]);
                    if c.abs() > 1e-14 {
                        entries.push((h, k, l, c));
                    }
                }
            }
        }
        TriadTensor { modes, entries }
    }

    /// Σ_{hkℓ} (1/3)(a_h b_k b_ℓ + b_h a_k b_ℓ + b_h b_k a_ℓ) C_{hkℓ}.
    pub fn symmetrized_contraction(&self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), self.modes.len());
        assert_eq!(b.len(), self.modes.len());
        let mut acc = 0.0;
        for &(h, k, l, c) in &self.entries {
            acc += c * (a[h] * b[k] * b[l] + b[h] * a[k] * b[l] + b[h] * b[k] * a[l]) / 3.0;
        }
        acc
    }

    fn xi_vector(&self, sample: &CRMSample) -> Result<Vec<f64>, InvarianceError> {
        let n = self.modes.len();
        if sample.m_w != n + 1 {
            return Err(InvarianceError::LengthMismatch);
        }
        // gaussian_coeffs[0] pairs with the constant mode; the rest follow
        // the basis order, which w_modes shares.
        let wm = w_modes(&sample.domain, sample.m_w);
        debug_assert!(wm
            .iter()
            .zip(&self.modes)
            .all(|(a, b)| a.k == b.k && a.phase == b.phase));
        Ok(sample.gaussian_coeffs[1..].to_vec())
    }

    fn atom_vector(&self, sample: &CRMSample) -> Vec<f64> {
        self.modes
            .iter()
            .map(|m| sample.atoms.iter().map(|&(x, g)| g * m.eval(x)).sum())
            .collect()
    }
}

/// Σ ξ_h ξ_k ξ_ℓ C_{hkℓ} symmetrized: exactly zero because C is symmetric in
/// its first two slots and sums to zero over cyclic permutations.
pub fn gaussian_cancellation(
    sample: &CRMSample,
    tensor: &TriadTensor,
) -> Result<f64, InvarianceError> {
    let xi = tensor.xi_vector(sample)?;
    Ok(tensor.symmetrized_contraction(&xi, &xi))
}

/// The mixed contraction with one Gaussian slot replaced by the atom
/// projection p_h = Σ_i γ_i φ_h(x_i); also an exact zero.
pub fn mixed_cancellation(
    sample: &CRMSample,
    tensor: &TriadTensor,
) -> Result<f64, InvarianceError> {
    let xi = tensor.xi_vector(sample)?;
    let p = tensor.atom_vector(sample);
    Ok(tensor.symmetrized_contraction(&p, &xi))
}

/// |I²(kernel) with the sample's density a − the same with a = 0|: the
/// deterministic part must not contribute to interaction kernels H_φ.
pub fn a_reduction_defect(sample: &CRMSample, kernel: &Kernel2) -> Result<f64, InvarianceError> {
    let with_a = i2(sample, kernel)?.total;
    let mut reduced = sample.clone();
    reduced.a = 0.0;
    let without_a = i2(&reduced, kernel)?.total;
    Ok((with_a - without_a).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crm::{sample_crm, CRMTriple, JumpLawSpec};
    use crate::geometry::{Phase, TestFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triple(domain: Domain) -> CRMTriple {
        CRMTriple::new(
            0.4,
            0.6,
            Some(JumpLawSpec::TwoBand { c: 0.5, inner: 1.0, outer: 2.0 }),
            domain,
        )
    }

    #[test]
    fn triad_tensor_structure() {
        let domain = Domain::torus_2pi();
        let t = TriadTensor::new(domain, 2);
        assert_eq!(t.modes.len(), 24);
        assert!(!t.entries.is_empty());
        // symmetry in the first two slots
        for &(h, k, l, c) in t.entries.iter().take(200) {
            let swapped = triad_closed_form(&t.modes[k], &t.modes[h], &t.modes[l]);
            assert!((c - swapped).abs() < 1e-12);
        }
    }

    #[test]
    fn triple_contractions_vanish_per_sample() {
        let domain = Domain::torus_2pi();
        let tensor = TriadTensor::new(domain, 2);
        let triple = triple(domain);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = sample_crm(&triple, 25, &mut rng).unwrap();
            assert!(gaussian_cancellation(&s, &tensor).unwrap().abs() < 1e-9);
            assert!(mixed_cancellation(&s, &tensor).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn wrong_truncation_is_rejected() {
        let domain = Domain::torus_2pi();
        let tensor = TriadTensor::new(domain, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = sample_crm(&triple(domain), 9, &mut rng).unwrap();
        assert!(matches!(
            gaussian_cancellation(&s, &tensor),
            Err(InvarianceError::LengthMismatch)
        ));
    }

    #[test]
    fn density_drops_out_of_interaction_integrals() {
        let domain = Domain::torus_2pi();
        let phi = TestFunction::torus_mode(domain, (1, 1), Phase::Cos);
        let kernel = Kernel2::h_phi(phi);
        let triple = triple(domain);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = sample_crm(&triple, 25, &mut rng).unwrap();
            assert!(a_reduction_defect(&s, &kernel).unwrap() < 1e-8);
        }
    }
}
