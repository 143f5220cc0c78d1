//! Monte Carlo suites: E[𝒜F] = 0, skew-symmetry E[F𝒜G + G𝒜F] = 0, and
//! flow invariance in law for pure-atom triples.
//!
//! All drivers draw samples in fixed-size batches with one RNG stream per
//! batch and reduce in batch order, so results are bit-identical for any
//! worker count. Antithetic pairing (ξ ↦ −ξ, and mark sign flips for
//! symmetric jump laws) cuts the variance of the ξ-odd statistics.

use crate::crm::{sample_crm, CRMSample, CRMTriple, JumpLawSpec};
use crate::invariance::generator::PreparedObservable;
use crate::invariance::observable::CylinderObservable;
use crate::invariance::InvarianceError;
use crate::stats::{ComplexStat, MCReport};
use crate::vortex::{flow_pushforward_opts, VortexError, VortexOptions};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Gaussian truncation for the generator suites: all modes with |k|∞ ≤ 12.
/// E[𝒜F] = 0 holds exactly for the truncated field (the triad cancellations
/// run over a permutation-closed index set), so this sets cost, not bias.
pub const M_W_GENERATOR: usize = 625;

const BATCH_PAIRS: usize = 256;

/// Integrator tolerance for flow-invariance ensembles. The comparison is
/// distributional (CF band 6/√N ≈ 0.06), so pointwise accuracy far below the
/// band buys nothing; more importantly, at this tolerance the controller
/// stops resolving the internal rotation phase of pairs tighter than ≈ tol,
/// which turns the frequent tight-dipole encounters from 10⁵-step
/// integrations into ordinary ones (1000× overall) without biasing any
/// observable built from smooth test functions.
const FLOW_TOL: f64 = 1e-3;

fn is_symmetric_law(triple: &CRMTriple) -> bool {
    match &triple.nu {
        None => true,
        Some(spec) => matches!(
            spec,
            JumpLawSpec::TwoBand { .. }
                | JumpLawSpec::UniformSigned { .. }
                | JumpLawSpec::PowerLaw { .. }
        ),
    }
}

fn antithetic(s: &CRMSample, flip_marks: bool) -> CRMSample {
    let mut t = s.clone();
    for c in &mut t.gaussian_coeffs {
        *c = -*c;
    }
    if flip_marks {
        for a in &mut t.atoms {
            a.1 = -a.1;
        }
    }
    t
}

/// Batched, order-stable mean of a per-pair statistic; also returns the
/// per-batch partial means (for convergence diagnostics).
fn batched_mean(
    pairs: usize,
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng) -> Result<Complex64, InvarianceError> + Sync,
) -> Result<(Complex64, f64, usize, Vec<Complex64>), InvarianceError> {
    let batches = pairs.div_ceil(BATCH_PAIRS);
    let per_batch: Result<Vec<Vec<Complex64>>, InvarianceError> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH_PAIRS.min(pairs - b * BATCH_PAIRS);
            (0..count).map(|_| f(&mut rng)).collect()
        })
        .collect();
    let mut stat = ComplexStat::new();
    let mut batch_means = Vec::new();
    for batch in per_batch? {
        let mut sum = Complex64::default();
        let count = batch.len();
        for v in batch {
            stat.push(v);
            sum += v;
        }
        if count > 0 {
            batch_means.push(sum / count as f64);
        }
    }
    Ok((stat.mean(), stat.stderr(), stat.count() as usize, batch_means))
}

/// Monte Carlo mean of 𝒜F over fresh samples from the triple.
pub fn mc_generator_mean(
    triple: &CRMTriple,
    obs: &CylinderObservable,
    n: usize,
    seed: u64,
) -> Result<MCReport, InvarianceError> {
    Ok(mc_generator_mean_detailed(triple, obs, n, seed)?.0)
}

/// As [`mc_generator_mean`], also returning the per-batch partial means.
pub fn mc_generator_mean_detailed(
    triple: &CRMTriple,
    obs: &CylinderObservable,
    n: usize,
    seed: u64,
) -> Result<(MCReport, Vec<Complex64>), InvarianceError> {
    assert!(n >= 10_000, "generator statistics need N ≥ 10⁴");
    let prepared = PreparedObservable::new(obs.clone());
    let m_w = if triple.q > 0.0 { M_W_GENERATOR } else { 0 };
    let flip = is_symmetric_law(triple);
    let pairs = n / 2;
    let (mean, stderr, got, batch_means) = batched_mean(pairs, seed, |rng| {
        let s = sample_crm(triple, m_w, rng)?;
        let g1 = prepared.generator(&s)?;
        let g2 = prepared.generator(&antithetic(&s, flip))?;
        Ok((g1 + g2) / 2.0)
    })?;
    let report = MCReport::new(mean, stderr, 2 * got, 4.0, seed, rayon::current_num_threads());
    Ok((report, batch_means))
}

/// Estimates E[F·𝒜G + G·𝒜F] with common random numbers (both observables on
/// the same samples).
pub fn skew_symmetry_test(
    f_obs: &CylinderObservable,
    g_obs: &CylinderObservable,
    triple: &CRMTriple,
    n: usize,
    seed: u64,
) -> Result<MCReport, InvarianceError> {
    Ok(skew_symmetry_test_detailed(f_obs, g_obs, triple, n, seed)?.0)
}

/// As [`skew_symmetry_test`], also returning the per-batch partial means.
pub fn skew_symmetry_test_detailed(
    f_obs: &CylinderObservable,
    g_obs: &CylinderObservable,
    triple: &CRMTriple,
    n: usize,
    seed: u64,
) -> Result<(MCReport, Vec<Complex64>), InvarianceError> {
    assert!(n >= 10_000, "skew statistics need N ≥ 10⁴");
    let pf = PreparedObservable::new(f_obs.clone());
    let pg = PreparedObservable::new(g_obs.clone());
    let m_w = if triple.q > 0.0 { M_W_GENERATOR } else { 0 };
    let flip = is_symmetric_law(triple);
    let pairs = n / 2;
    let stat_one = |s: &CRMSample| -> Result<Complex64, InvarianceError> {
        Ok(pf.eval(s)? * pg.generator(s)? + pg.eval(s)? * pf.generator(s)?)
    };
    let (mean, stderr, got, batch_means) = batched_mean(pairs, seed, |rng| {
        let s = sample_crm(triple, m_w, rng)?;
        let v1 = stat_one(&s)?;
        let v2 = stat_one(&antithetic(&s, flip))?;
        Ok((v1 + v2) / 2.0)
    })?;
    let report = MCReport::new(mean, stderr, 2 * got, 4.0, seed, rayon::current_num_threads());
    Ok((report, batch_means))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FlowInvarianceReport {
    /// Max CF discrepancy over the frequency grid against the 6/√N band.
    pub cf_distance: MCReport,
    /// |φ_before − φ_after| at each point of [`FLOW_CF_GRID`].
    pub grid_diffs: Vec<f64>,
    /// Samples dropped because the vortex flow reported a collapse.
    pub excluded: usize,
    pub total: usize,
}

/// Frequency grid for the before/after CF comparison.
pub const FLOW_CF_GRID: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

/// Pushes N pure-atom samples through the vortex flow for time `t` and
/// compares the empirical characteristic function of ⟨freq, I¹(φ·)⟩ before
/// vs after on the fixed grid.
pub fn flow_invariance_test(
    triple: &CRMTriple,
    obs: &CylinderObservable,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<FlowInvarianceReport, InvarianceError> {
    assert!(n >= 1000, "flow ensembles need N ≥ 1000");
    if triple.q != 0.0 || triple.a != 0.0 || triple.nu.is_none() {
        return Err(InvarianceError::NotPureAtomicTriple);
    }
    let prepared = PreparedObservable::new(obs.clone());
    let freq = obs.outer.freq().to_vec();
    // Exclusion policy: a pair closer than the threshold is a collapse; a
    // trajectory exceeding the step budget is a near-collapse at finer scale
    // (step size shrinks ∝ separation², so only tight pairs exhaust it).
    // Both count against the same exclusion budget reported to the caller.
    let opts = VortexOptions {
        fast_kernel: true,
        collapse_threshold: 1e-4,
        max_steps: Some(50_000),
        ..Default::default()
    };

    #[derive(Default)]
    struct BatchAcc {
        before: [Complex64; 9],
        after: [Complex64; 9],
        used: usize,
        excluded: usize,
    }

    let batch_size = 2 * BATCH_PAIRS;
    let batches = n.div_ceil(batch_size);
    let per_batch: Result<Vec<BatchAcc>, InvarianceError> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = batch_size.min(n - b * batch_size);
            let mut acc = BatchAcc::default();
            for _ in 0..count {
                let s = sample_crm(triple, 0, &mut rng)?;
                let pushed = match flow_pushforward_opts(&s, t, FLOW_TOL, &opts) {
                    Ok(p) => p,
                    Err(VortexError::CollapseDetected { .. })
                    | Err(VortexError::NearCollapse { .. })
                    | Err(VortexError::StepBudgetExceeded { .. }) => {
                        acc.excluded += 1;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                let wb: f64 = freq
                    .iter()
                    .zip(prepared.i1_values(&s)?)
                    .map(|(t, v)| t * v)
                    .sum();
                let wa: f64 = freq
                    .iter()
                    .zip(prepared.i1_values(&pushed)?)
                    .map(|(t, v)| t * v)
                    .sum();
                for (g, &sfreq) in FLOW_CF_GRID.iter().enumerate() {
                    acc.before[g] += Complex64::from_polar(1.0, sfreq * wb);
                    acc.after[g] += Complex64::from_polar(1.0, sfreq * wa);
                }
                acc.used += 1;
            }
            Ok(acc)
        })
        .collect();

    let mut before = [Complex64::default(); 9];
    let mut after = [Complex64::default(); 9];
    let mut used = 0usize;
    let mut excluded = 0usize;
    for acc in per_batch? {
        for g in 0..9 {
            before[g] += acc.before[g];
            after[g] += acc.after[g];
        }
        used += acc.used;
        excluded += acc.excluded;
    }
    let mut worst = Complex64::default();
    let mut grid_diffs = Vec::with_capacity(9);
    for g in 0..9 {
        let diff = (before[g] - after[g]) / used as f64;
        grid_diffs.push(diff.norm());
        if diff.norm() > worst.norm() {
            worst = diff;
        }
    }
    let report = MCReport::new(
        worst,
        1.0 / (used as f64).sqrt(),
        used,
        6.0,
        seed,
        rayon::current_num_threads(),
    );
    Ok(FlowInvarianceReport { cf_distance: report, grid_diffs, excluded, total: used + excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Phase, TestFunction};
    use crate::invariance::observable::OuterFn;

    fn nu(c: f64) -> JumpLawSpec {
        JumpLawSpec::TwoBand { c, inner: 1.0, outer: 2.0 }
    }

    fn obs(domain: Domain, freq: Vec<f64>) -> CylinderObservable {
        let ks = [(1, 0), (0, 1), (1, 1)];
        let phis = ks
            .iter()
            .take(freq.len())
            .map(|&k| TestFunction::torus_mode(domain, k, Phase::Cos))
            .collect();
        CylinderObservable::new(phis, OuterFn::ExpTrig { freq }).unwrap()
    }

    fn obs_cos(domain: Domain, freq: Vec<f64>) -> CylinderObservable {
        let phis = vec![
            TestFunction::torus_mode(domain, (0, 1), Phase::Sin),
            TestFunction::torus_mode(domain, (2, 1), Phase::Cos),
        ];
        CylinderObservable::new(phis, OuterFn::ProductCos { freq }).unwrap()
    }

    #[test]
    fn generator_mean_gaussian_case() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 1.0, None, domain);
        let r = mc_generator_mean(&triple, &obs(domain, vec![0.8, -0.6]), 20_000, 11).unwrap();
        assert!(r.passed(), "z = {}", r.z_score);
        assert_eq!(r.n, 20_000);
    }

    #[test]
    fn generator_mean_poisson_case() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 0.0, Some(nu(0.3)), domain);
        let r = mc_generator_mean(&triple, &obs_cos(domain, vec![0.9, 0.5]), 20_000, 13).unwrap();
        assert!(r.passed(), "z = {}", r.z_score);
    }

    #[test]
    fn generator_mean_full_triple() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.5, 0.3, Some(nu(0.3)), domain);
        let r = mc_generator_mean(&triple, &obs(domain, vec![1.1]), 10_000, 17).unwrap();
        assert!(r.passed(), "z = {}", r.z_score);
    }

    #[test]
    fn generator_mean_is_reproducible() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 0.0, Some(nu(0.3)), domain);
        let o = obs(domain, vec![0.7]);
        let a = mc_generator_mean(&triple, &o, 10_000, 19).unwrap();
        let b = mc_generator_mean(&triple, &o, 10_000, 19).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn skew_symmetry_cases() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 1.0, None, domain);
        let f = obs(domain, vec![0.8, -0.6]);
        let g = obs(domain, vec![-0.4, 1.2]);
        let r = skew_symmetry_test(&f, &g, &triple, 20_000, 23).unwrap();
        assert!(r.passed(), "distinct F,G: z = {}", r.z_score);

        // F = G reduces to E[𝒜(F²)] ≈ 0
        let r2 = skew_symmetry_test(&f, &f, &triple, 20_000, 29).unwrap();
        assert!(r2.passed(), "F = G: z = {}", r2.z_score);

        // F ≡ 1 (zero frequency): 𝒜F = 0 per sample, statistic = E[𝒜G]
        let one = obs(domain, vec![0.0]);
        let r3 = skew_symmetry_test(&one, &g, &triple, 20_000, 31).unwrap();
        assert!(r3.passed(), "F = 1: z = {}", r3.z_score);
    }

    #[test]
    fn flow_invariance_identity_at_t0() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 0.0, Some(nu(0.5)), domain);
        let r = flow_invariance_test(&triple, &obs(domain, vec![1.0]), 0.0, 2000, 37).unwrap();
        assert_eq!(r.cf_distance.estimate, Complex64::default());
        assert_eq!(r.excluded, 0);
    }

    #[test]
    fn flow_invariance_short_time() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 0.0, Some(nu(0.5)), domain);
        let r = flow_invariance_test(&triple, &obs(domain, vec![1.0]), 0.5, 2000, 41).unwrap();
        assert!(
            r.cf_distance.passed(),
            "CF distance {} vs band {}",
            r.cf_distance.estimate.norm(),
            6.0 * r.cf_distance.stderr
        );
        assert!(r.excluded as f64 <= 0.001 * r.total as f64, "exclusions {}", r.excluded);
    }

    #[test]
    fn flow_invariance_rejects_non_atomic() {
        let domain = Domain::torus_2pi();
        let triple = CRMTriple::new(0.0, 1.0, None, domain);
        assert!(matches!(
            flow_invariance_test(&triple, &obs(domain, vec![1.0]), 1.0, 2000, 1),
            Err(InvarianceError::NotPureAtomicTriple)
        ));
    }
}
