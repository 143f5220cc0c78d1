//! Tabulated torus Biot–Savart kernel for large ensembles.
//!
//! The periodic Green-function gradient splits into the free-space singular
//! part of the nearest image plus a smooth remainder. The remainder is
//! tabulated once per side length on a uniform grid over the minimum-image
//! cell and interpolated bilinearly; the singular part is kept exact, so
//! close pairs lose no accuracy. Absolute error of the smooth part is
//! O((L/n)²) ≈ 1e-5 at the default resolution — far below the statistical
//! resolution of the ensemble tests this kernel serves.

use crate::geometry::{Domain, Vec2};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const DEFAULT_RESOLUTION: usize = 512;

pub struct FastBiotSavart {
    l: f64,
    n: usize,
    /// n / L, hoisted out of the per-pair interpolation.
    inv_h: f64,
    inv_l: f64,
    /// Smooth remainder S(d) = ∇G(d) + d/(2π|d|²) on (n+1)² nodes over
    /// [−L/2, L/2]².
    sx: Vec<f64>,
    sy: Vec<f64>,
}

impl FastBiotSavart {
    fn build(l: f64, n: usize) -> Self {
        let green = crate::geometry::domain::Domain::torus(l).ewald();
        let h = l / n as f64;
        let m = n + 1;
        let mut sx = vec![0.0; m * m];
        let mut sy = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let d = Vec2::new(i as f64 * h - 0.5 * l, j as f64 * h - 0.5 * l);
                if d.norm() < 1e-12 {
                    continue; // S(0) = 0 by symmetry
                }
                let s = green.grad_green(d) + d * (1.0 / (2.0 * std::f64::consts::PI * d.norm_sq()));
                sx[i * m + j] = s.x;
                sy[i * m + j] = s.y;
            }
        }
        FastBiotSavart { l, n, inv_h: n as f64 / l, inv_l: 1.0 / l, sx, sy }
    }

    /// Shared table for the torus of side L at the default resolution.
    pub fn shared(domain: &Domain) -> Arc<FastBiotSavart> {
        let l = domain.side().expect("fast kernel exists on the torus only");
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FastBiotSavart>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(l.to_bits())
            .or_insert_with(|| Arc::new(FastBiotSavart::build(l, DEFAULT_RESOLUTION)))
            .clone()
    }

    pub(crate) fn min_image(&self, d: Vec2) -> Vec2 {
        let wrap = |v: f64| {
            let mut w = v - self.l * (v * self.inv_l).floor();
            if w >= 0.5 * self.l {
                w -= self.l;
            }
            w
        };
        Vec2::new(wrap(d.x), wrap(d.y))
    }

    /// K(x, y) = ∇⊥G(x − y), with the smooth part interpolated.
    pub fn biot_savart(&self, x: Vec2, y: Vec2) -> Vec2 {
        self.eval_delta(self.min_image(x - y))
    }

    /// As [`Self::biot_savart`] for a difference already reduced to the
    /// minimum-image cell; lets callers reuse the reduced difference.
    pub(crate) fn eval_delta(&self, d: Vec2) -> Vec2 {
        let m = self.n + 1;
        let fx = ((d.x + 0.5 * self.l) * self.inv_h).clamp(0.0, self.n as f64 - 1e-9);
        let fy = ((d.y + 0.5 * self.l) * self.inv_h).clamp(0.0, self.n as f64 - 1e-9);
        let (i, j) = (fx as usize, fy as usize);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let idx = |a: usize, b: usize| a * m + b;
        let lerp = |t: &[f64]| -> f64 {
            (1.0 - tx) * ((1.0 - ty) * t[idx(i, j)] + ty * t[idx(i, j + 1)])
                + tx * ((1.0 - ty) * t[idx(i + 1, j)] + ty * t[idx(i + 1, j + 1)])
        };
        let s = Vec2::new(lerp(&self.sx), lerp(&self.sy));
        let grad = s - d * (1.0 / (2.0 * std::f64::consts::PI * d.norm_sq()));
        grad.perp()
    }
}
