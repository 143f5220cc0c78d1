//! Lévy–Khintchine characteristic function of M(A) and its empirical
//! counterpart.

use super::triple::CRMTriple;
use super::CRMError;
use crate::stats::{adaptive_simpson, pairwise_sum};
use num_complex::Complex64;

/// E e^{itM(A)} = exp(ita|A| − t²q|A|/2 + |A|∫(e^{itγ} − 1 − itγ) dν(γ)),
/// with the ν-integral by adaptive quadrature to 1e-10.
pub fn cf_levy_khintchine(
    triple: &CRMTriple,
    set_measure: f64,
    t: f64,
) -> Result<Complex64, CRMError> {
    triple.validate()?;
    assert!(
        set_measure > 0.0 && set_measure <= triple.domain.area(),
        "set measure must lie in (0, |D|]"
    );
    let mut nu_re = 0.0;
    let mut nu_im = 0.0;
    if let Some(law) = triple.jump_law()? {
        for (a, b) in law.bands() {
            // cos(tγ) − 1 = −2 sin²(tγ/2) avoids cancellation near tγ = 0
            nu_re += adaptive_simpson(
                &|g: f64| -2.0 * (0.5 * t * g).sin().powi(2) * law.density(g),
                a,
                b,
                5e-11,
            );
            nu_im += adaptive_simpson(
                &|g: f64| ((t * g).sin() - t * g) * law.density(g),
                a,
                b,
                5e-11,
            );
        }
    }
    let exponent = Complex64::new(
        -0.5 * t * t * triple.q * set_measure + set_measure * nu_re,
        t * triple.a * set_measure + set_measure * nu_im,
    );
    Ok(exponent.exp())
}

/// (1/N) Σ e^{it v_j} with the per-component standard error bound 1/√N.
pub fn empirical_cf(values: &[f64], t: f64) -> Result<(Complex64, f64), CRMError> {
    if values.is_empty() {
        return Err(CRMError::EmptyInput);
    }
    let n = values.len();
    let re: Vec<f64> = values.iter().map(|v| (t * v).cos()).collect();
    let im: Vec<f64> = values.iter().map(|v| (t * v).sin()).collect();
    let mean = Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) / n as f64;
    Ok((mean, 1.0 / (n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crm::hypothesis::sample_measure_values;
    use crate::crm::jumplaw::JumpLawSpec;
    use crate::crm::sets::{PreparedSet, SetSpec};
    use crate::geometry::Domain;

    fn nu_fin() -> JumpLawSpec {
        JumpLawSpec::TwoBand { c: 1.0, inner: 1.0, outer: 2.0 }
    }

    #[test]
    fn cf_at_zero_is_one() {
        let t = CRMTriple::new(0.3, 0.7, Some(nu_fin()), Domain::torus_2pi());
        let v = cf_levy_khintchine(&t, 2.5, 0.0).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pure_gaussian_cf() {
        let t = CRMTriple::new(0.0, 0.8, None, Domain::torus_2pi());
        for tt in [0.5, 1.0, 2.0] {
            let v = cf_levy_khintchine(&t, 1.5, tt).unwrap();
            let expect = (-0.5 * tt * tt * 0.8 * 1.5f64).exp();
            assert!((v.re - expect).abs() < 1e-14);
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn two_band_cf_matches_closed_form_integral() {
        // ∫(cos(tγ)−1)dν over density 1/2 on ±[1,2] at t=1:
        // 2·(1/2)·[(sin 2 − sin 1) − 1]
        let t = CRMTriple::new(0.0, 0.0, Some(nu_fin()), Domain::torus_2pi());
        let v = cf_levy_khintchine(&t, 1.0, 1.0).unwrap();
        let expect = ((2.0f64.sin() - 1.0f64.sin()) - 1.0).exp();
        assert!((v.re - expect).abs() < 1e-12, "{} vs {expect}", v.re);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn empirical_cf_trivial_values() {
        let pi = std::f64::consts::PI;
        let (v, se) = empirical_cf(&[pi, -pi], 1.0).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((se - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        let (one, _) = empirical_cf(&[0.0; 10], 3.7).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(empirical_cf(&[], 1.0), Err(CRMError::EmptyInput)));
    }

    /// Sampler vs Lévy–Khintchine on a 21-point t-grid for three triples.
    #[test]
    fn empirical_cf_matches_levy_khintchine() {
        let domain = Domain::torus_2pi();
        let set = SetSpec::rect([0.5, 0.5], [1.5, 1.5]);
        let n = 100_000;
        let band = 6.0 / (n as f64).sqrt();
        let cases = [
            (CRMTriple::new(0.0, 1.0, None, domain), 16_641usize),
            (CRMTriple::new(0.0, 0.0, Some(nu_fin()), domain), 0),
            (CRMTriple::new(0.5, 0.3, Some(nu_fin()), domain), 16_641),
        ];
        for (i, (triple, m_w)) in cases.iter().enumerate() {
            let prepared = PreparedSet::new(&domain, &set, *m_w).unwrap();
            let values =
                sample_measure_values(triple, &[prepared], *m_w, n, 1000 + i as u64).unwrap()
                    .pop()
                    .unwrap();
            for j in 0..21 {
                let t = -2.0 + 0.2 * j as f64;
                let (emp, _) = empirical_cf(&values, t).unwrap();
                let lk = cf_levy_khintchine(triple, set.measure(), t).unwrap();
                assert!(
                    (emp - lk).norm() < band,
                    "triple {i}, t = {t}: |{emp} - {lk}| = {} ≥ {band}",
                    (emp - lk).norm()
                );
            }
        }
    }
}
