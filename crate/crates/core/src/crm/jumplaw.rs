//! Jump mark laws ν on ℝ: symmetric finite-activity families, tabulated
//! densities, and a power-law infinite-activity family with small-jump
//! truncation at ε. All laws are absolutely continuous (atomless, ν({0}) = 0)
//! with ∫|γ| dν < ∞ and m₂ < ∞.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum JumpLawError {
    #[error("band endpoints must satisfy 0 < inner < outer")]
    InvalidBand,
    #[error("mass and scale parameters must be positive and finite")]
    NonPositiveMass,
    #[error("density table needs strictly ascending breaks, one fewer nonnegative value, and positive total mass")]
    InvalidTable,
    #[error("power-law exponent must lie in (0, 1) so that ∫|γ| dν < ∞")]
    InvalidExponent,
    #[error("small-jump cutoff must satisfy 0 < ε < γ_max")]
    InvalidTruncation,
}

/// Serializable description of a jump law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpLawSpec {
    /// Density c/2 on [−outer,−inner] ∪ [inner,outer].
    TwoBand { c: f64, inner: f64, outer: f64 },
    /// Density c/(2w) on [−w, w]; total mass c.
    UniformSigned { c: f64, half_width: f64 },
    /// Piecewise-constant density: `values[i]` on [breaks[i], breaks[i+1]).
    DensityTable { breaks: Vec<f64>, values: Vec<f64> },
    /// Infinite-activity symmetric law with density scale·|γ|^{−1−alpha} on
    /// ε ≤ |γ| ≤ gamma_max; the part below the cutoff ε is dropped and its
    /// L¹ mass recorded as the truncation error.
    PowerLaw { scale: f64, alpha: f64, gamma_max: f64, epsilon: f64 },
}

/// A validated jump law with cached moments of the (possibly ε-truncated)
/// measure ν_ε and precomputed sampling tables.
#[derive(Clone, Debug)]
pub struct JumpLaw {
    spec: JumpLawSpec,
    mass: f64,
    m1: f64,
    m2: f64,
    l1_truncation_error: f64,
    /// Cumulative band masses for table sampling (empty otherwise).
    table_cdf: Vec<f64>,
}

impl JumpLaw {
    pub fn new(spec: JumpLawSpec) -> Result<Self, JumpLawError> {
        let mut table_cdf = Vec::new();
        let (mass, m1, m2, l1_err) = match &spec {
            JumpLawSpec::TwoBand { c, inner, outer } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(JumpLawError::NonPositiveMass);
                }
                if !(0.0 < *inner && inner < outer && outer.is_finite()) {
                    return Err(JumpLawError::InvalidBand);
                }
                let mass = c * (outer - inner);
                let m2 = c * (outer.powi(3) - inner.powi(3)) / 3.0;
                (mass, 0.0, m2, 0.0)
            }
            JumpLawSpec::UniformSigned { c, half_width } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(JumpLawError::NonPositiveMass);
                }
                if !(*half_width > 0.0 && half_width.is_finite()) {
                    return Err(JumpLawError::InvalidBand);
                }
                (*c, 0.0, c * half_width * half_width / 3.0, 0.0)
            }
            JumpLawSpec::DensityTable { breaks, values } => {
                let ok = breaks.len() == values.len() + 1
                    && !values.is_empty()
                    && breaks.windows(2).all(|w| w[0] < w[1])
                    && breaks.iter().all(|b| b.is_finite())
                    && values.iter().all(|v| *v >= 0.0 && v.is_finite());
                if !ok {
                    return Err(JumpLawError::InvalidTable);
                }
                let (mut mass, mut m1, mut m2) = (0.0, 0.0, 0.0);
                for (i, &v) in values.iter().enumerate() {
                    let (a, b) = (breaks[i], breaks[i + 1]);
                    mass += v * (b - a);
                    m1 += v * (b * b - a * a) / 2.0;
                    m2 += v * (b.powi(3) - a.powi(3)) / 3.0;
                    table_cdf.push(mass);
                }
                if mass <= 0.0 {
                    return Err(JumpLawError::InvalidTable);
                }
                (mass, m1, m2, 0.0)
            }
            JumpLawSpec::PowerLaw { scale, alpha, gamma_max, epsilon } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(JumpLawError::NonPositiveMass);
                }
                if !(0.0 < *alpha && *alpha < 1.0) {
                    return Err(JumpLawError::InvalidExponent);
                }
                if !(0.0 < *epsilon && epsilon < gamma_max && gamma_max.is_finite()) {
                    return Err(JumpLawError::InvalidTruncation);
                }
                let mass = 2.0 * scale * (epsilon.powf(-alpha) - gamma_max.powf(-alpha)) / alpha;
                let m2 = 2.0 * scale * (gamma_max.powf(2.0 - alpha) - epsilon.powf(2.0 - alpha))
                    / (2.0 - alpha);
                let l1_err = 2.0 * scale * epsilon.powf(1.0 - alpha) / (1.0 - alpha);
                (mass, 0.0, m2, l1_err)
            }
        };
        Ok(JumpLaw { spec, mass, m1, m2, l1_truncation_error: l1_err, table_cdf })
    }

    pub fn spec(&self) -> &JumpLawSpec {
        &self.spec
    }

    /// Total mass ν_ε(ℝ).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// m₁ = ∫ γ dν_ε.
    pub fn m1(&self) -> f64 {
        self.m1
    }

    /// m₂ = ∫ γ² dν_ε.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// ∫_{|γ|<ε} |γ| dν for infinite-activity laws (0 for finite laws).
    pub fn l1_truncation_error(&self) -> f64 {
        self.l1_truncation_error
    }

    /// Small-jump cutoff, if this is a truncated infinite-activity law.
    pub fn epsilon(&self) -> Option<f64> {
        match self.spec {
            JumpLawSpec::PowerLaw { epsilon, .. } => Some(epsilon),
            _ => None,
        }
    }

    /// Density of ν_ε at γ.
    pub fn density(&self, gamma: f64) -> f64 {
        match &self.spec {
            JumpLawSpec::TwoBand { c, inner, outer } => {
                let g = gamma.abs();
                if g >= *inner && g <= *outer {
                    0.5 * c
                } else {
                    0.0
                }
            }
            JumpLawSpec::UniformSigned { c, half_width } => {
                if gamma.abs() <= *half_width {
                    0.5 * c / half_width
                } else {
                    0.0
                }
            }
            JumpLawSpec::DensityTable { breaks, values } => {
                match breaks.partition_point(|b| *b <= gamma) {
                    0 => 0.0,
                    i if i > values.len() => 0.0,
                    i => values[i - 1],
                }
            }
            JumpLawSpec::PowerLaw { scale, alpha, gamma_max, epsilon } => {
                let g = gamma.abs();
                if g >= *epsilon && g <= *gamma_max {
                    scale * g.powf(-1.0 - alpha)
                } else {
                    0.0
                }
            }
        }
    }

    /// Support intervals of the density, for 1-D quadrature.
    pub fn bands(&self) -> Vec<(f64, f64)> {
        match &self.spec {
            JumpLawSpec::TwoBand { inner, outer, .. } => {
                vec![(-outer, -inner), (*inner, *outer)]
            }
            JumpLawSpec::UniformSigned { half_width, .. } => vec![(-half_width, *half_width)],
            JumpLawSpec::DensityTable { breaks, .. } => {
                vec![(breaks[0], *breaks.last().unwrap())]
            }
            JumpLawSpec::PowerLaw { gamma_max, epsilon, .. } => {
                vec![(-gamma_max, -epsilon), (*epsilon, *gamma_max)]
            }
        }
    }

    /// Draw one mark from the normalized law ν_ε / ν_ε(ℝ).
    pub fn sample_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.spec {
            JumpLawSpec::TwoBand { inner, outer, .. } => {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                sign * (inner + rng.gen::<f64>() * (outer - inner))
            }
            JumpLawSpec::UniformSigned { half_width, .. } => {
                (2.0 * rng.gen::<f64>() - 1.0) * half_width
            }
            JumpLawSpec::DensityTable { breaks, .. } => {
                let u = rng.gen::<f64>() * self.mass;
                let i = self.table_cdf.partition_point(|c| *c < u).min(self.table_cdf.len() - 1);
                let lo_mass = if i == 0 { 0.0 } else { self.table_cdf[i - 1] };
                let bin_mass = self.table_cdf[i] - lo_mass;
                let frac = if bin_mass > 0.0 { (u - lo_mass) / bin_mass } else { 0.5 };
                breaks[i] + frac * (breaks[i + 1] - breaks[i])
            }
            JumpLawSpec::PowerLaw { alpha, gamma_max, epsilon, .. } => {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let a = epsilon.powf(-alpha);
                let b = gamma_max.powf(-alpha);
                sign * (a - rng.gen::<f64>() * (a - b)).powf(-1.0 / alpha)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::adaptive_simpson;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn numeric_moments(law: &JumpLaw) -> (f64, f64, f64) {
        let mut mass = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (a, b) in law.bands() {
            mass += adaptive_simpson(&|g| law.density(g), a, b, 1e-13);
            m1 += adaptive_simpson(&|g| g * law.density(g), a, b, 1e-13);
            m2 += adaptive_simpson(&|g| g * g * law.density(g), a, b, 1e-13);
        }
        (mass, m1, m2)
    }

    #[test]
    fn two_band_moments() {
        let law = JumpLaw::new(JumpLawSpec::TwoBand { c: 1.0, inner: 1.0, outer: 2.0 }).unwrap();
        assert!((law.mass() - 1.0).abs() < 1e-14);
        assert_eq!(law.m1(), 0.0);
        assert!((law.m2() - 7.0 / 3.0).abs() < 1e-14);
        let (mass, m1, m2) = numeric_moments(&law);
        assert!((mass - law.mass()).abs() < 1e-10);
        assert!((m1 - law.m1()).abs() < 1e-10);
        assert!((m2 - law.m2()).abs() < 1e-10);
    }

    #[test]
    fn uniform_and_table_moments_match_quadrature() {
        let u = JumpLaw::new(JumpLawSpec::UniformSigned { c: 2.0, half_width: 0.7 }).unwrap();
        let (mass, m1, m2) = numeric_moments(&u);
        assert!((mass - 2.0).abs() < 1e-10);
        assert!((m1 - u.m1()).abs() < 1e-10);
        assert!((m2 - u.m2()).abs() < 1e-10);

        // asymmetric table: m1 ≠ 0
        let t = JumpLaw::new(JumpLawSpec::DensityTable {
            breaks: vec![-1.0, 0.5, 1.0, 2.0],
            values: vec![0.3, 0.0, 1.2],
        })
        .unwrap();
        let (mass, m1, m2) = numeric_moments(&t);
        assert!((mass - t.mass()).abs() < 1e-10);
        assert!((m1 - t.m1()).abs() < 1e-10);
        assert!(t.m1() > 0.0);
        assert!((m2 - t.m2()).abs() < 1e-10);
    }

    #[test]
    fn power_law_truncated_moments() {
        let law = JumpLaw::new(JumpLawSpec::PowerLaw {
            scale: 0.5,
            alpha: 0.5,
            gamma_max: 1.0,
            epsilon: 1e-3,
        })
        .unwrap();
        let (mass, m1, m2) = numeric_moments(&law);
        assert!((mass - law.mass()).abs() / law.mass() < 1e-10);
        assert!(m1.abs() < 1e-10);
        assert!((m2 - law.m2()).abs() < 1e-10);
        // L¹ truncation error: 2·scale·ε^{1−α}/(1−α)
        assert!((law.l1_truncation_error() - 2.0 * 0.5 * (1e-3f64).sqrt() / 0.5).abs() < 1e-14);
        assert_eq!(law.epsilon(), Some(1e-3));
    }

    #[test]
    fn mark_sampler_matches_m2() {
        let law = JumpLaw::new(JumpLawSpec::TwoBand { c: 1.0, inner: 1.0, outer: 2.0 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut s = crate::stats::RunningStat::new();
        for _ in 0..n {
            let g = law.sample_mark(&mut rng);
            assert!((1.0..=2.0).contains(&g.abs()));
            s.push(g * g);
        }
        // E γ² under the normalized law = m2 / mass
        let expect = law.m2() / law.mass();
        assert!((s.mean() - expect).abs() < 4.0 * s.stderr());
    }

    #[test]
    fn invalid_specs_rejected() {
        assert_eq!(
            JumpLaw::new(JumpLawSpec::TwoBand { c: 1.0, inner: 2.0, outer: 1.0 }).unwrap_err(),
            JumpLawError::InvalidBand
        );
        assert_eq!(
            JumpLaw::new(JumpLawSpec::PowerLaw {
                scale: 1.0,
                alpha: 0.5,
                gamma_max: 1.0,
                epsilon: 0.0
            })
            .unwrap_err(),
            JumpLawError::InvalidTruncation
        );
        assert_eq!(
            JumpLaw::new(JumpLawSpec::PowerLaw {
                scale: 1.0,
                alpha: 1.5,
                gamma_max: 1.0,
                epsilon: 0.1
            })
            .unwrap_err(),
            JumpLawError::InvalidExponent
        );
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = JumpLawSpec::TwoBand { c: 1.0, inner: 1.0, outer: 2.0 };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"kind":"two_band","c":1.0,"inner":1.0,"outer":2.0}"#);
        let back: JumpLawSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(spec, back);
    }
}
