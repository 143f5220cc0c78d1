//! Statistical tests of the defining hypotheses of a completely random
//! measure: independence on disjoint sets and stationarity of the law on
//! congruent sets.

use super::sample::sample_crm;
use super::sets::{PreparedSet, SetSpec};
use super::triple::CRMTriple;
use super::CRMError;
use crate::stats::{pairwise_sum, ComplexStat, MCReport, RunningStat};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Spectral truncation used for set-based Gaussian evaluation: all modes with
/// |k|∞ ≤ 64 plus the constant, keeping the indicator tail below ~0.5%.
const M_W_SET: usize = 129 * 129;

const BATCH: usize = 512;

/// Evaluate M(A) for each prepared set on `n` common samples, batched over
/// independent RNG streams (stream id = batch index) so results are
/// bit-reproducible regardless of worker count. Returns one column per set.
pub fn sample_measure_values(
    triple: &CRMTriple,
    sets: &[PreparedSet],
    m_w: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, CRMError> {
    let n_batches = n.div_ceil(BATCH);
    let batches: Result<Vec<Vec<Vec<f64>>>, CRMError> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(n - b * BATCH);
            let mut cols = vec![Vec::with_capacity(count); sets.len()];
            for _ in 0..count {
                let sample = sample_crm(triple, m_w, &mut rng)?;
                for (col, set) in cols.iter_mut().zip(sets) {
                    col.push(set.evaluate(&sample)?);
                }
            }
            Ok(cols)
        })
        .collect();
    let batches = batches?;
    let mut out = vec![Vec::with_capacity(n); sets.len()];
    for batch in batches {
        for (col, part) in out.iter_mut().zip(batch) {
            col.extend(part);
        }
    }
    Ok(out)
}

/// Independence and stationarity diagnostics for M on a pair of sets.
#[derive(Clone, Debug, serde::Serialize)]
pub struct HypothesisReport {
    /// Empirical covariance of (M(A), M(B)) minus the theoretical value
    /// (q + m₂)·|A ∩ B|; pass iff within 4 standard errors of zero.
    pub covariance: MCReport,
    /// Worst |φ_{A,B}(s,t) − φ_A(s)φ_B(t)| over a 5×5 frequency grid;
    /// `None` when A = B (identical sets are never independent).
    pub cf_factorization: Option<MCReport>,
    /// sup_t |φ_A(t) − φ_{B'}(t)| over a 21-point grid, B' a congruent
    /// translate of A at B's corner; pass iff below 6/√N.
    pub stationarity: MCReport,
}

/// Tests that M(A) and M(B) are uncorrelated/independent for disjoint sets
/// and that congruent sets have the same distribution.
///
/// A = B (exactly) is allowed as a variance check — the covariance target
/// becomes Var M(A) = (q + m₂)|A|; partially overlapping sets are rejected.
pub fn hypothesis_tests(
    triple: &CRMTriple,
    a: &SetSpec,
    b: &SetSpec,
    n: usize,
    seed: u64,
) -> Result<HypothesisReport, CRMError> {
    assert!(n >= 1000, "hypothesis tests need at least 10³ samples");
    triple.validate()?;
    if a != b && a.overlap(b) > 0.0 {
        return Err(CRMError::OverlappingSets);
    }
    let m_w = if triple.q > 0.0 { M_W_SET } else { 0 };
    let SetSpec::Rect { lo: b_lo, .. } = b;
    let b_congruent = a.translate_to(*b_lo);
    let prepared = [
        PreparedSet::new(&triple.domain, a, m_w)?,
        PreparedSet::new(&triple.domain, b, m_w)?,
        PreparedSet::new(&triple.domain, &b_congruent, m_w)?,
    ];
    let cols = sample_measure_values(triple, &prepared, m_w, n, seed)?;
    let (va, vb, vbp) = (&cols[0], &cols[1], &cols[2]);
    let workers = rayon::current_num_threads();

    // covariance, centered on the theoretical value
    let ma = pairwise_sum(va) / n as f64;
    let mb = pairwise_sum(vb) / n as f64;
    let mut prod = RunningStat::new();
    for (x, y) in va.iter().zip(vb) {
        prod.push((x - ma) * (y - mb));
    }
    let m2 = triple.jump_law()?.map_or(0.0, |law| law.m2());
    let expected = (triple.q + m2) * a.overlap(b);
    let covariance = MCReport::new(
        Complex64::new(prod.mean() - expected, 0.0),
        prod.stderr(),
        n,
        4.0,
        seed,
        workers,
    );

    // characteristic-function factorization on a 5×5 grid
    let cf_factorization = if a == b {
        None
    } else {
        let freqs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let mut worst = 0.0f64;
        let mut worst_stderr = 0.0;
        for &s in &freqs {
            for &t in &freqs {
                let mut joint = ComplexStat::new();
                let mut fa = ComplexStat::new();
                let mut fb = ComplexStat::new();
                for (x, y) in va.iter().zip(vb) {
                    joint.push(Complex64::new(0.0, s * x + t * y).exp());
                    fa.push(Complex64::new(0.0, s * x).exp());
                    fb.push(Complex64::new(0.0, t * y).exp());
                }
                let gap = (joint.mean() - fa.mean() * fb.mean()).norm();
                if gap > worst {
                    worst = gap;
                    // first-order error band of the product estimator
                    worst_stderr = joint.stderr()
                        + fa.stderr() * fb.mean().norm()
                        + fb.stderr() * fa.mean().norm();
                }
            }
        }
        Some(MCReport::new(Complex64::new(worst, 0.0), worst_stderr.max(1e-300), n, 4.0, seed, workers))
    };

    // stationarity: CF distance between M(A) and the congruent translate
    let mut sup = 0.0f64;
    for j in 0..21 {
        let t = -2.0 + 0.2 * j as f64;
        let (phi_a, _) = super::cf::empirical_cf(va, t)?;
        let (phi_b, _) = super::cf::empirical_cf(vbp, t)?;
        sup = sup.max((phi_a - phi_b).norm());
    }
    let stationarity = MCReport::new(
        Complex64::new(sup, 0.0),
        1.0 / (n as f64).sqrt(),
        n,
        6.0,
        seed,
        workers,
    );

    Ok(HypothesisReport { covariance, cf_factorization, stationarity })
}
