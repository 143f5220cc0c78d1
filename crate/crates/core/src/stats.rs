//! Small statistical toolkit shared by the Monte Carlo harnesses:
//! reproducible pairwise summation, one-pass moment accumulation,
//! normal/Kolmogorov tails, adaptive 1-D quadrature, and the report
//! structure every Monte Carlo driver returns.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation: error O(log n · ε) independent of summation
/// order chosen by the caller, and bit-reproducible for a fixed slice.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// One-pass mean/variance accumulator (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningStat {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStat {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two observations).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean: sample standard deviation / √n.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Welford accumulator for complex-valued observables; the standard error
/// combines the real and imaginary fluctuations in quadrature.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexStat {
    re: RunningStat,
    im: RunningStat,
}

impl ComplexStat {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, z: Complex64) {
        self.re.push(z.re);
        self.im.push(z.im);
    }

    pub fn count(&self) -> u64 {
        self.re.count()
    }

    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.re.mean(), self.im.mean())
    }

    pub fn stderr(&self) -> f64 {
        let n = self.re.count().max(1) as f64;
        ((self.re.variance() + self.im.variance()) / n).sqrt()
    }
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov tail Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut q = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        q += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * q).clamp(0.0, 1.0)
}

/// Kolmogorov–Smirnov test of the values against N(0,1); returns (D, p)
/// using the Stephens finite-sample correction for the p-value.
pub fn ks_test_standard_normal(values: &mut [f64]) -> (f64, f64) {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let cdf = normal_cdf(v);
        d = d.max(cdf - i as f64 / n).max((i + 1) as f64 / n - cdf);
    }
    let lambda = d * (n.sqrt() + 0.12 + 0.11 / n.sqrt());
    (d, kolmogorov_q(lambda))
}

/// Adaptive Simpson quadrature with Richardson acceptance test.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() < 15.0 * tol {
        left + right + err / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Monte Carlo estimate with its error band and pass/fail verdict
/// (pass iff |estimate| ≤ z_max · stderr).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MCReport {
    pub estimate: Complex64,
    pub stderr: f64,
    pub n: usize,
    pub z_score: f64,
    pub verdict: Verdict,
    pub z_max: f64,
    pub seed: u64,
    pub workers: usize,
}

impl MCReport {
    pub fn new(
        estimate: Complex64,
        stderr: f64,
        n: usize,
        z_max: f64,
        seed: u64,
        workers: usize,
    ) -> Self {
        let z_score = if stderr > 0.0 {
            estimate.norm() / stderr
        } else if estimate.norm() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let verdict = if z_score <= z_max { Verdict::Pass } else { Verdict::Fail };
        MCReport { estimate, stderr, n, z_score, verdict, z_max, seed, workers }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
