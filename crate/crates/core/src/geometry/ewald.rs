//! Periodic Green function of the Laplacian on the flat torus, evaluated by
//! Ewald splitting: a short-range sum over periodic images screened by a
//! Gaussian, plus a rapidly converging Fourier-space sum.
//!
//! The function computed is the mean-zero solution of
//! `-ΔG = δ - 1/L²`, i.e. `G(r) = (1/L²) Σ_{k≠0} e^{ik·r}/|k|²`.

use super::vec2::Vec2;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral E₁(x) for x > 0.
///
/// Power series for small arguments, modified Lentz continued fraction
/// otherwise. Absolute accuracy is better than 1e-15 over the range used here.
pub fn exp_int_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires a positive argument");
    if x >= 700.0 {
        return 0.0;
    }
    if x <= 1.0 {
        // E1(x) = -γ - ln x + Σ (-1)^{n+1} x^n / (n n!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=40 {
            term *= -x / n as f64;
            let contrib = -term / n as f64;
            sum += contrib;
            if contrib.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // E1(x) = e^{-x} * K(x) with the continued fraction
        // K = 1/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...))))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x).exp() * h
    }
}

struct KTerm {
    m1: i32,
    m2: i32,
    /// (2/L²) e^{-|k|²/4α²} / |k|²
    coef: f64,
    /// physical wavevector 2π m / L
    k: Vec2,
}

/// Precomputed Ewald tables for one torus side length and tolerance.
pub struct TorusGreen {
    l: f64,
    alpha: f64,
    mmax: i32,
    kterms: Vec<KTerm>,
    /// -1/(4α²L²), the background constant restoring zero mean
    offset: f64,
}

impl TorusGreen {
    pub fn new(l: f64, tol: f64) -> Self {
        assert!(l > 0.0);
        let alpha = 10.0 / l;
        // e^{-k²/4α²}/(k²L²) <= tol/10 determines the k cutoff
        let mut mmax = 2;
        loop {
            let k2 = (2.0 * std::f64::consts::PI * mmax as f64 / l).powi(2);
            if (-k2 / (4.0 * alpha * alpha)).exp() / (k2 * l * l) < tol * 0.1 || mmax > 200 {
                break;
            }
            mmax += 1;
        }
        // half lattice: m1 > 0, or m1 == 0 && m2 > 0; cosine pairs ±m merged
        let mut kterms = Vec::new();
        for m1 in 0..=mmax {
            for m2 in -mmax..=mmax {
                if m1 == 0 && m2 <= 0 {
                    continue;
                }
                let k = Vec2::new(m1 as f64, m2 as f64) * (2.0 * std::f64::consts::PI / l);
                let k2 = k.norm_sq();
                let coef = 2.0 / (l * l) * (-k2 / (4.0 * alpha * alpha)).exp() / k2;
                kterms.push(KTerm { m1, m2, coef, k });
            }
        }
        let offset = -1.0 / (4.0 * alpha * alpha * l * l);
        TorusGreen { l, alpha, mmax, kterms, offset }
    }

    pub fn side(&self) -> f64 {
        self.l
    }

    /// Reduce a difference vector to the centered cell [-L/2, L/2)².
    pub fn min_image(&self, r: Vec2) -> Vec2 {
        Vec2::new(r.x - self.l * (r.x / self.l).round(), r.y - self.l * (r.y / self.l).round())
    }

    fn trig_tables(&self, r: Vec2) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = (self.mmax + 1) as usize;
        let u1 = 2.0 * std::f64::consts::PI * r.x / self.l;
        let u2 = 2.0 * std::f64::consts::PI * r.y / self.l;
        let (s1b, c1b) = u1.sin_cos();
        let (s2b, c2b) = u2.sin_cos();
        let mut c1 = vec![0.0; n];
        let mut s1 = vec![0.0; n];
        let mut c2 = vec![0.0; n];
        let mut s2 = vec![0.0; n];
        c1[0] = 1.0;
        c2[0] = 1.0;
        for j in 1..n {
            c1[j] = c1[j - 1] * c1b - s1[j - 1] * s1b;
            s1[j] = s1[j - 1] * c1b + c1[j - 1] * s1b;
            c2[j] = c2[j - 1] * c2b - s2[j - 1] * s2b;
            s2[j] = s2[j - 1] * c2b + c2[j - 1] * s2b;
        }
        (c1, s1, c2, s2)
    }

    /// G(r) for r = x - y (any representative; reduced internally).
    pub fn green(&self, r: Vec2) -> f64 {
        let r = self.min_image(r);
        let a2 = self.alpha * self.alpha;
        // real-space images |n|∞ <= 1
        let mut real = 0.0;
        for nx in -1..=1 {
            for ny in -1..=1 {
                let v = r + Vec2::new(nx as f64 * self.l, ny as f64 * self.l);
                real += exp_int_e1(a2 * v.norm_sq());
            }
        }
        real /= 4.0 * std::f64::consts::PI;
        // k-space sum with trig recurrences
        let (c1, s1, c2, s2) = self.trig_tables(r);
        let mut kpart = 0.0;
        for t in &self.kterms {
            let (i, j) = (t.m1 as usize, t.m2.unsigned_abs() as usize);
            // cos(m1 u1 + m2 u2), sign of m2 folded in
            let cosv = if t.m2 >= 0 {
                c1[i] * c2[j] - s1[i] * s2[j]
            } else {
                c1[i] * c2[j] + s1[i] * s2[j]
            };
            kpart += t.coef * cosv;
        }
        real + kpart + self.offset
    }

    /// ∇G(r) with respect to the first argument, r = x - y.
    pub fn grad_green(&self, r: Vec2) -> Vec2 {
        let r = self.min_image(r);
        let a2 = self.alpha * self.alpha;
        let mut grad = Vec2::ZERO;
        for nx in -1..=1 {
            for ny in -1..=1 {
                let v = r + Vec2::new(nx as f64 * self.l, ny as f64 * self.l);
                let rho2 = v.norm_sq();
                grad += v * (-(-a2 * rho2).exp() / (2.0 * std::f64::consts::PI * rho2));
            }
        }
        let (c1, s1, c2, s2) = self.trig_tables(r);
        for t in &self.kterms {
            let (i, j) = (t.m1 as usize, t.m2.unsigned_abs() as usize);
            let sinv = if t.m2 >= 0 {
                s1[i] * c2[j] + c1[i] * s2[j]
            } else {
                s1[i] * c2[j] - c1[i] * s2[j]
            };
            grad += t.k * (-t.coef * sinv);
        }
        grad
    }

    /// The smooth k-space part of ∇G alone (used by the tabulated fast path;
    /// the screened image sum is added back exactly by the caller).
    pub fn grad_kspace(&self, r: Vec2) -> Vec2 {
        let r = self.min_image(r);
        let (c1, s1, c2, s2) = self.trig_tables(r);
        let mut grad = Vec2::ZERO;
        for t in &self.kterms {
            let (i, j) = (t.m1 as usize, t.m2.unsigned_abs() as usize);
            let sinv = if t.m2 >= 0 {
                s1[i] * c2[j] + c1[i] * s2[j]
            } else {
                s1[i] * c2[j] - c1[i] * s2[j]
            };
            grad += t.k * (-t.coef * sinv);
        }
        grad
    }

    /// Screened real-space image gradient, matching `grad_kspace`'s complement.
    pub fn grad_realspace(&self, r: Vec2) -> Vec2 {
        let r = self.min_image(r);
        let a2 = self.alpha * self.alpha;
        let mut grad = Vec2::ZERO;
        for nx in -1..=1 {
            for ny in -1..=1 {
                let v = r + Vec2::new(nx as f64 * self.l, ny as f64 * self.l);
                let rho2 = v.norm_sq();
                grad += v * (-(-a2 * rho2).exp() / (2.0 * std::f64::consts::PI * rho2));
            }
        }
        grad
    }
}

/// Shared cache of Ewald tables keyed by (L, tolerance).
pub fn torus_green(l: f64, tol: f64) -> Arc<TorusGreen> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<TorusGreen>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (l.to_bits(), tol.to_bits());
    let mut guard = cache.lock().unwrap();
    guard.entry(key).or_insert_with(|| Arc::new(TorusGreen::new(l, tol))).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_known_values() {
        // Abramowitz & Stegun 5.1: E1(1) = 0.219383934...
        assert!((exp_int_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((exp_int_e1(0.5) - 0.559_773_594_776_160_2).abs() < 1e-13);
        assert!((exp_int_e1(10.0) - 4.156_968_929_685_325e-6).abs() < 1e-18);
    }

    /// Independent oracle for the L = 2π spectral sum Σ_{k≠0} e^{ik·r}/(L²|k|²):
    /// the k₂ axis is summed in closed form, Σ_{k₂} e^{ik₂y}/(a²+k₂²) =
    /// (π/a)·cosh(a(π−ŷ))/sinh(aπ) for ŷ ∈ [0, 2π], leaving a geometrically
    /// convergent single sum over k₁.
    fn spectral_green_2pi(r: Vec2) -> f64 {
        let pi = std::f64::consts::PI;
        let yhat = r.y.rem_euclid(2.0 * pi);
        // k₁ = 0 line: 2 Σ_{n≥1} cos(n ŷ)/n² = π²/3 − π ŷ + ŷ²/2
        let mut sum = pi * pi / 3.0 - pi * yhat + 0.5 * yhat * yhat;
        for k1 in 1..=80 {
            let a = k1 as f64;
            let term =
                2.0 * (a * r.x).cos() * (pi / a) * (a * (pi - yhat)).cosh() / (a * pi).sinh();
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum / (4.0 * pi * pi)
    }

    #[test]
    fn green_matches_spectral_sum() {
        let g = TorusGreen::new(2.0 * std::f64::consts::PI, 1e-12);
        for r in [
            Vec2::new(std::f64::consts::PI, std::f64::consts::PI),
            Vec2::new(1.3, 2.2),
            Vec2::new(4.8, 2.9),
        ] {
            let oracle = spectral_green_2pi(r);
            assert!(
                (g.green(r) - oracle).abs() < 1e-12,
                "ewald {} vs spectral {} at {:?}",
                g.green(r),
                oracle,
                r
            );
        }
    }

    #[test]
    fn green_symmetry_and_periodicity() {
        let g = TorusGreen::new(2.0 * std::f64::consts::PI, 1e-12);
        let r = Vec2::new(1.3, -0.7);
        assert!((g.green(r) - g.green(-r)).abs() < 1e-13);
        let shifted = r + Vec2::new(2.0 * std::f64::consts::PI, -4.0 * std::f64::consts::PI);
        assert!((g.green(r) - g.green(shifted)).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let g = TorusGreen::new(2.0 * std::f64::consts::PI, 1e-12);
        let r = Vec2::new(0.9, 1.7);
        let h = 1e-6;
        let gx = (g.green(r + Vec2::new(h, 0.0)) - g.green(r - Vec2::new(h, 0.0))) / (2.0 * h);
        let gy = (g.green(r + Vec2::new(0.0, h)) - g.green(r - Vec2::new(0.0, h))) / (2.0 * h);
        let grad = g.grad_green(r);
        assert!((grad.x - gx).abs() < 1e-8);
        assert!((grad.y - gy).abs() < 1e-8);
    }

    #[test]
    fn gradient_splits_into_parts() {
        let g = TorusGreen::new(2.0 * std::f64::consts::PI, 1e-12);
        let r = Vec2::new(-2.1, 0.4);
        let total = g.grad_green(r);
        let split = g.grad_realspace(r) + g.grad_kspace(r);
        assert!((total - split).norm() < 1e-15);
    }
}
