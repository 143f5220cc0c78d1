//! Sampling a completely random measure as a concrete realization:
//! spectral Gaussian coefficients plus a finite atom list plus a drift.

use super::triple::CRMTriple;
use super::CRMError;
use crate::geometry::{Domain, Vec2};
use crate::spectral::{basis, EigenMode};
use rand::Rng;
use rand_distr::{Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// One realization of M ~ [a, q, ν].
///
/// The white noise W is truncated on the first `m_w` eigenfunctions of −Δ,
/// *including* the constant eigenfunction: `gaussian_coeffs[0]` multiplies
/// φ₀ = 1/L (the λ = 0 mode) and the remaining coefficients follow the
/// mean-zero eigenbasis ordering of [`basis`]. The constant mode is what
/// gives set evaluations W(1_A) the correct variance |A|.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CRMSample {
    pub gaussian_coeffs: Vec<f64>,
    /// Atom positions and marks (x_i, γ_i).
    pub atoms: Vec<(Vec2, f64)>,
    /// Deterministic density a − m₁(ν_ε): carries the Poisson compensation.
    pub drift: f64,
    pub m_w: usize,
    /// Small-jump cutoff, if ν is a truncated infinite-activity law.
    pub epsilon: Option<f64>,
    pub a: f64,
    pub q: f64,
    pub domain: Domain,
}

impl CRMSample {
    /// √q · W(g) for a function g given by its coefficients on the truncated
    /// eigenbasis (index 0 = constant mode). Coefficients beyond `m_w` are
    /// ignored; missing ones count as zero.
    pub fn gaussian_pairing(&self, coeffs: &[f64]) -> f64 {
        if self.q == 0.0 {
            return 0.0;
        }
        let dot: f64 = self
            .gaussian_coeffs
            .iter()
            .zip(coeffs)
            .map(|(xi, c)| xi * c)
            .sum();
        self.q.sqrt() * dot
    }

    /// Sum of γ_i f(x_i) over the atoms.
    pub fn atom_pairing(&self, mut f: impl FnMut(Vec2) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, g)| g * f(x)).sum()
    }
}

/// Mean-zero eigenmodes backing the Gaussian truncation at `m_w` total modes
/// (constant mode excluded, so the list has `m_w − 1` entries), shared and
/// cached per (torus side, m_w).
pub fn w_modes(domain: &Domain, m_w: usize) -> Arc<Vec<EigenMode>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Vec<EigenMode>>>>> = OnceLock::new();
    let l = domain.side().expect("the spectral truncation basis lives on the torus");
    let key = (l.to_bits(), m_w);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(key)
        .or_insert_with(|| {
            let want = m_w.saturating_sub(1);
            // (2k+1)² − 1 mean-zero modes at |k|∞ ≤ k
            let mut max_k = 1;
            while (2 * max_k + 1) * (2 * max_k + 1) - 1 < want {
                max_k += 1;
            }
            let mut modes = basis(*domain, max_k as i32);
            modes.truncate(want);
            Arc::new(modes)
        })
        .clone()
}

/// Draw one realization of the triple: `m_w` i.i.d. standard normal spectral
/// coefficients, a Poisson(|D|·ν_ε(ℝ)) number of atoms with i.i.d. uniform
/// positions and marks from the normalized ν_ε, and the compensating drift.
pub fn sample_crm<R: Rng + ?Sized>(
    triple: &CRMTriple,
    m_w: usize,
    rng: &mut R,
) -> Result<CRMSample, CRMError> {
    triple.validate()?;
    let law = triple.jump_law()?;

    let gaussian_coeffs: Vec<f64> = (0..m_w).map(|_| rng.sample(StandardNormal)).collect();

    let mut atoms = Vec::new();
    let mut drift = triple.a;
    let mut epsilon = None;
    if let Some(law) = &law {
        epsilon = law.epsilon();
        drift -= law.m1();
        let lambda = triple.domain.area() * law.mass();
        if lambda > 0.0 {
            let count = rng.sample(Poisson::new(lambda).expect("positive Poisson mean")) as usize;
            atoms.reserve(count);
            for _ in 0..count {
                let x = uniform_point(&triple.domain, rng);
                let gamma = law.sample_mark(rng);
                atoms.push((x, gamma));
            }
        }
    }

    Ok(CRMSample {
        gaussian_coeffs,
        atoms,
        drift,
        m_w,
        epsilon,
        a: triple.a,
        q: triple.q,
        domain: triple.domain,
    })
}

fn uniform_point<R: Rng + ?Sized>(domain: &Domain, rng: &mut R) -> Vec2 {
    match domain.side() {
        Some(l) => Vec2::new(rng.gen::<f64>() * l, rng.gen::<f64>() * l),
        None => {
            // unit disk: r = √u makes the area element uniform
            let r = rng.gen::<f64>().sqrt();
            let theta = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            Vec2::new(r * theta.cos(), r * theta.sin())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crm::jumplaw::JumpLawSpec;
    use crate::stats::RunningStat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_band(c: f64) -> JumpLawSpec {
        JumpLawSpec::TwoBand { c, inner: 1.0, outer: 2.0 }
    }

    #[test]
    fn null_triple_yields_null_sample() {
        let t = CRMTriple::new(0.0, 0.0, None, Domain::torus_2pi());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_crm(&t, 0, &mut rng).unwrap();
        assert!(s.gaussian_coeffs.is_empty());
        assert!(s.atoms.is_empty());
        assert_eq!(s.drift, 0.0);
        assert_eq!(s.gaussian_pairing(&[1.0, 2.0]), 0.0);
        assert_eq!(s.atom_pairing(|_| 1.0), 0.0);
    }

    #[test]
    fn atom_count_is_poisson_with_mean_area_times_mass() {
        let t = CRMTriple::new(0.0, 0.0, Some(two_band(3.0)), Domain::torus_2pi());
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = RunningStat::new();
        for _ in 0..10_000 {
            let s = sample_crm(&t, 0, &mut rng).unwrap();
            counts.push(s.atoms.len() as f64);
            for &(x, _) in &s.atoms {
                assert!(t.domain.contains(x));
            }
        }
        // mass = c·(outer − inner) = 3, |D| = (2π)²
        let mean = 3.0 * t.domain.area();
        assert!(
            (counts.mean() - mean).abs() < 4.0 * counts.stderr(),
            "mean count {} vs {}",
            counts.mean(),
            mean
        );
        // Poisson: variance ≈ mean as well
        assert!((counts.variance() - mean).abs() / mean < 0.1);
    }

    #[test]
    fn gaussian_coeffs_are_standard_normal() {
        let t = CRMTriple::new(0.0, 1.0, None, Domain::torus_2pi());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut stat = RunningStat::new();
        for _ in 0..200 {
            let s = sample_crm(&t, 64, &mut rng).unwrap();
            assert_eq!(s.gaussian_coeffs.len(), 64);
            for &xi in &s.gaussian_coeffs {
                stat.push(xi);
            }
        }
        assert!(stat.mean().abs() < 4.0 * stat.stderr());
        assert!((stat.variance() - 1.0).abs() < 0.05);
    }

    #[test]
    fn atoms_almost_surely_distinct() {
        use std::collections::HashSet;
        let t = CRMTriple::new(0.0, 0.0, Some(two_band(30.0)), Domain::torus_2pi());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen: HashSet<(u64, u64)> = HashSet::new();
        let mut total = 0usize;
        while total < 1_000_000 {
            let s = sample_crm(&t, 0, &mut rng).unwrap();
            for &(x, _) in &s.atoms {
                assert!(seen.insert((x.x.to_bits(), x.y.to_bits())), "duplicate atom at {x:?}");
            }
            total += s.atoms.len();
        }
    }

    #[test]
    fn disk_positions_uniform_in_area() {
        let t = CRMTriple::new(0.0, 0.0, Some(two_band(40.0)), Domain::unit_disk());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut inner = 0usize;
        let mut total = 0usize;
        for _ in 0..500 {
            let s = sample_crm(&t, 0, &mut rng).unwrap();
            for &(x, _) in &s.atoms {
                assert!(x.norm_sq() < 1.0);
                if x.norm_sq() < 0.5 {
                    inner += 1;
                }
            }
            total += s.atoms.len();
        }
        // the disk of half the area holds half the atoms
        let frac = inner as f64 / total as f64;
        assert!((frac - 0.5).abs() < 0.01, "inner fraction {frac}");
    }

    #[test]
    fn sampling_is_reproducible_per_stream() {
        let t = CRMTriple::new(0.5, 0.3, Some(two_band(1.0)), Domain::torus_2pi());
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        r1.set_stream(4);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        r2.set_stream(4);
        let s1 = sample_crm(&t, 32, &mut r1).unwrap();
        let s2 = sample_crm(&t, 32, &mut r2).unwrap();
        assert_eq!(s1.gaussian_coeffs, s2.gaussian_coeffs);
        assert_eq!(s1.atoms.len(), s2.atoms.len());
        for (a, b) in s1.atoms.iter().zip(&s2.atoms) {
            assert_eq!(a.0.x, b.0.x);
            assert_eq!(a.1, b.1);
        }
        let mut r3 = ChaCha8Rng::seed_from_u64(7);
        r3.set_stream(5);
        let s3 = sample_crm(&t, 32, &mut r3).unwrap();
        assert_ne!(s1.gaussian_coeffs, s3.gaussian_coeffs);
    }

    #[test]
    fn w_modes_count_and_cache_identity() {
        let d = Domain::torus_2pi();
        let m = w_modes(&d, 1024);
        assert_eq!(m.len(), 1023);
        // enough head-room in the generating wavenumber: (2·16+1)² = 1089 ≥ 1024
        let again = w_modes(&d, 1024);
        assert!(Arc::ptr_eq(&m, &again));
    }
}
