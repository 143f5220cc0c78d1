//! Measurable test sets and exact per-sample evaluation of M(A).
//!
//! The Gaussian part uses closed-form indicator coefficients against the
//! truncated eigenbasis, so M(A) is exact given the truncation; the atom and
//! drift parts are exact, which makes finite additivity hold per sample.

use super::sample::{w_modes, CRMSample};
use super::CRMError;
use crate::geometry::{Domain, Vec2};
use crate::spectral::EigenMode;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// Axis-aligned rectangle [lo.0, hi.0) × [lo.1, hi.1).
    Rect { lo: [f64; 2], hi: [f64; 2] },
}

impl SetSpec {
    pub fn rect(lo: [f64; 2], hi: [f64; 2]) -> Self {
        SetSpec::Rect { lo, hi }
    }

    pub fn measure(&self) -> f64 {
        let SetSpec::Rect { lo, hi } = self;
        (hi[0] - lo[0]) * (hi[1] - lo[1])
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let SetSpec::Rect { lo, hi } = self;
        p.x >= lo[0] && p.x < hi[0] && p.y >= lo[1] && p.y < hi[1]
    }

    /// Area of the intersection with another set.
    pub fn overlap(&self, other: &SetSpec) -> f64 {
        let SetSpec::Rect { lo: al, hi: ah } = self;
        let SetSpec::Rect { lo: bl, hi: bh } = other;
        let w = (ah[0].min(bh[0]) - al[0].max(bl[0])).max(0.0);
        let h = (ah[1].min(bh[1]) - al[1].max(bl[1])).max(0.0);
        w * h
    }

    /// A congruent translate of this set placed at `lo`.
    pub fn translate_to(&self, lo: [f64; 2]) -> SetSpec {
        let SetSpec::Rect { lo: al, hi: ah } = self;
        SetSpec::Rect { lo, hi: [lo[0] + ah[0] - al[0], lo[1] + ah[1] - al[1]] }
    }

    fn validate(&self, domain: &Domain) -> Result<(), CRMError> {
        let SetSpec::Rect { lo, hi } = self;
        if !(lo[0] < hi[0] && lo[1] < hi[1]) {
            return Err(CRMError::InvalidSet("rectangle needs lo < hi componentwise".into()));
        }
        if let Some(l) = domain.side() {
            if lo.iter().any(|v| *v < 0.0) || hi.iter().any(|v| *v > l) {
                return Err(CRMError::InvalidSet(format!(
                    "rectangle must lie in the fundamental cell [0, {l}]²"
                )));
            }
        } else {
            let corners_in = [
                Vec2::new(lo[0], lo[1]),
                Vec2::new(hi[0], lo[1]),
                Vec2::new(lo[0], hi[1]),
                Vec2::new(hi[0], hi[1]),
            ]
            .iter()
            .all(|c| c.norm_sq() <= 1.0);
            if !corners_in {
                return Err(CRMError::InvalidSet("rectangle must lie inside the unit disk".into()));
            }
        }
        Ok(())
    }
}

/// ∫_a^b e^{iκs} ds.
fn segment_exp(kappa: f64, a: f64, b: f64) -> Complex64 {
    if kappa == 0.0 {
        Complex64::new(b - a, 0.0)
    } else {
        (Complex64::new(0.0, kappa * b).exp() - Complex64::new(0.0, kappa * a).exp())
            / Complex64::new(0.0, kappa)
    }
}

/// A set together with its indicator's coefficients on the truncated
/// eigenbasis (index 0 = constant mode), ready for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct PreparedSet {
    pub set: SetSpec,
    pub area: f64,
    /// Empty when the sample carries no Gaussian part on this domain.
    coeffs: Vec<f64>,
}

impl PreparedSet {
    /// `m_w = 0` skips the Gaussian coefficients (valid for q = 0 samples).
    pub fn new(domain: &Domain, set: &SetSpec, m_w: usize) -> Result<Self, CRMError> {
        set.validate(domain)?;
        let area = set.measure();
        let mut coeffs = Vec::new();
        if m_w > 0 {
            let l = match domain.side() {
                Some(l) => l,
                None => return Err(CRMError::UnsupportedDomain),
            };
            let modes = w_modes(domain, m_w);
            coeffs.reserve(m_w);
            coeffs.push(area / l);
            let SetSpec::Rect { lo, hi } = set;
            for mode in modes.iter() {
                coeffs.push(indicator_coeff(mode, l, lo, hi));
            }
        }
        Ok(PreparedSet { set: *set, area, coeffs })
    }

    /// M(A) for this sample: drift·|A| + √q W(1_A) + Σ_{x_i ∈ A} γ_i.
    pub fn evaluate(&self, sample: &CRMSample) -> Result<f64, CRMError> {
        if sample.q > 0.0 && sample.m_w > 0 && self.coeffs.is_empty() {
            return Err(CRMError::UnsupportedDomain);
        }
        let gaussian = sample.gaussian_pairing(&self.coeffs);
        let atoms = sample.atom_pairing(|x| if self.set.contains(x) { 1.0 } else { 0.0 });
        Ok(sample.drift * self.area + gaussian + atoms)
    }
}

/// ⟨1_A, φ⟩ in closed form for a rectangle A and a torus eigenmode φ.
fn indicator_coeff(mode: &EigenMode, l: f64, lo: &[f64; 2], hi: &[f64; 2]) -> f64 {
    let kappa = mode.kappa();
    let p = segment_exp(kappa.x, lo[0], hi[0]) * segment_exp(kappa.y, lo[1], hi[1]);
    let norm = std::f64::consts::SQRT_2 / l;
    match mode.phase {
        crate::geometry::testfn::Phase::Cos => norm * p.re,
        crate::geometry::testfn::Phase::Sin => norm * p.im,
    }
}

/// One-off evaluation of M(A); prefer [`PreparedSet`] inside sampling loops.
pub fn measure_of_set(sample: &CRMSample, set: &SetSpec) -> Result<f64, CRMError> {
    let m_w = if sample.q > 0.0 { sample.m_w } else { 0 };
    PreparedSet::new(&sample.domain, set, m_w)?.evaluate(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crm::jumplaw::JumpLawSpec;
    use crate::crm::sample::sample_crm;
    use crate::crm::triple::CRMTriple;
    use crate::stats::RunningStat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn indicator_coefficients_match_quadrature() {
        let d = Domain::torus_2pi();
        let set = SetSpec::rect([0.3, 1.0], [2.1, 4.5]);
        let prepared = PreparedSet::new(&d, &set, 9).unwrap();
        let modes = w_modes(&d, 9);
        // constant mode: ⟨1_A, 1/L⟩ = |A|/L exactly
        assert!((prepared.coeffs[0] - set.measure() / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        // closed form against dense trapezoid integration of each mode
        for (j, mode) in modes.iter().enumerate() {
            let exact = exact_rect_coeff(mode, &set);
            assert!(
                (prepared.coeffs[j + 1] - exact).abs() < 1e-13,
                "mode {:?} {:?}",
                mode.k,
                mode.phase
            );
        }
    }

    // Independent oracle in real arithmetic: cos(u+v) = CuCv − SuSv and
    // sin(u+v) = SuCv + CuSv with 1-D antiderivatives per factor.
    fn exact_rect_coeff(mode: &EigenMode, set: &SetSpec) -> f64 {
        let SetSpec::Rect { lo, hi } = set;
        let kappa = mode.kappa();
        let trig = |k: f64, a: f64, b: f64| -> (f64, f64) {
            if k == 0.0 {
                (b - a, 0.0) // (∫cos, ∫sin)
            } else {
                (((k * b).sin() - (k * a).sin()) / k, ((k * a).cos() - (k * b).cos()) / k)
            }
        };
        let (cx, sx) = trig(kappa.x, lo[0], hi[0]);
        let (cy, sy) = trig(kappa.y, lo[1], hi[1]);
        let norm = std::f64::consts::SQRT_2 / (2.0 * std::f64::consts::PI);
        match mode.phase {
            crate::geometry::testfn::Phase::Cos => norm * (cx * cy - sx * sy),
            crate::geometry::testfn::Phase::Sin => norm * (sx * cy + cx * sy),
        }
    }

    #[test]
    fn additivity_per_sample() {
        let t = CRMTriple::new(
            0.7,
            1.3,
            Some(JumpLawSpec::TwoBand { c: 2.0, inner: 1.0, outer: 2.0 }),
            Domain::torus_2pi(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = SetSpec::rect([0.0, 0.0], [1.0, 2.0]);
        let b = SetSpec::rect([1.0, 0.0], [2.5, 2.0]);
        let union = SetSpec::rect([0.0, 0.0], [2.5, 2.0]);
        assert_eq!(a.overlap(&b), 0.0);
        for _ in 0..50 {
            let s = sample_crm(&t, 257, &mut rng).unwrap();
            let ma = measure_of_set(&s, &a).unwrap();
            let mb = measure_of_set(&s, &b).unwrap();
            let mu = measure_of_set(&s, &union).unwrap();
            assert!((ma + mb - mu).abs() < 1e-9, "additivity defect {}", ma + mb - mu);
        }
    }

    #[test]
    fn mean_and_variance_of_set_measure() {
        // E M(A) = a|A| (symmetric ν), Var M(A) = (q + m₂)|A|
        let t = CRMTriple::new(
            0.5,
            0.3,
            Some(JumpLawSpec::TwoBand { c: 1.0, inner: 1.0, outer: 2.0 }),
            Domain::torus_2pi(),
        );
        let set = SetSpec::rect([0.5, 0.5], [1.5, 1.5]);
        let prepared = PreparedSet::new(&t.domain, &set, 1089).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut stat = RunningStat::new();
        let n = 20_000;
        for _ in 0..n {
            let s = sample_crm(&t, 1089, &mut rng).unwrap();
            stat.push(prepared.evaluate(&s).unwrap());
        }
        let mean = 0.5;
        assert!((stat.mean() - mean).abs() < 4.0 * stat.stderr(), "mean {}", stat.mean());
        let var = 0.3 + 7.0 / 3.0;
        // variance stderr ≈ √(2/n)·Var; allow 4 bands plus ~1% spectral tail
        let band = 4.0 * (2.0 / n as f64).sqrt() * var + 0.015 * var;
        assert!((stat.variance() - var).abs() < band, "var {} vs {}", stat.variance(), var);
    }

    #[test]
    fn invalid_rectangles_rejected() {
        let d = Domain::torus_2pi();
        assert!(matches!(
            PreparedSet::new(&d, &SetSpec::rect([0.0, 0.0], [7.0, 1.0]), 0),
            Err(CRMError::InvalidSet(_))
        ));
        let disk = Domain::unit_disk();
        assert!(PreparedSet::new(&disk, &SetSpec::rect([-0.5, -0.5], [0.5, 0.5]), 0).is_ok());
        assert!(PreparedSet::new(&disk, &SetSpec::rect([-0.5, -0.5], [0.9, 0.9]), 0).is_err());
        // Gaussian set evaluation is torus-only
        assert!(matches!(
            PreparedSet::new(&disk, &SetSpec::rect([-0.1, -0.1], [0.1, 0.1]), 16),
            Err(CRMError::UnsupportedDomain)
        ));
    }
}
