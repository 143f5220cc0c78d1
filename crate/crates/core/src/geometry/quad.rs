//! Quadrature rules on the torus and the unit disk.
//!
//! Torus: tensor-product trapezoid rule (spectrally accurate for smooth
//! periodic integrands). Disk: tensor product of Gauss–Legendre in the radius
//! with the trapezoid rule in the angle, including the polar Jacobian.

use super::domain::{Domain, DomainKind};
use super::vec2::Vec2;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial P_n with the usual Chebyshev-based initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // recurrence for P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Nodes and weights integrating smooth functions over the domain.
pub fn quadrature(domain: &Domain, order: usize) -> Vec<(Vec2, f64)> {
    assert!(order >= 2, "quadrature order must be at least 2");
    match domain.kind {
        DomainKind::Torus { l } => {
            let h = l / order as f64;
            let w = h * h;
            let mut out = Vec::with_capacity(order * order);
            for i in 0..order {
                for j in 0..order {
                    out.push((Vec2::new(i as f64 * h, j as f64 * h), w));
                }
            }
            out
        }
        DomainKind::UnitDisk => {
            let (rn, rw) = gauss_legendre(order);
            let dtheta = 2.0 * std::f64::consts::PI / order as f64;
            let mut out = Vec::with_capacity(order * order);
            for (x, wr) in rn.iter().zip(&rw) {
                let r = 0.5 * (x + 1.0);
                let w_rad = 0.5 * wr * r; // Jacobian r, interval [0,1]
                for j in 0..order {
                    let theta = j as f64 * dtheta;
                    out.push((Vec2::new(r * theta.cos(), r * theta.sin()), w_rad * dtheta));
                }
            }
            out
        }
    }
}

/// Integrate a function with the given rule.
pub fn integrate(rule: &[(Vec2, f64)], f: impl Fn(Vec2) -> f64) -> f64 {
    rule.iter().map(|&(p, w)| w * f(p)).sum()
}

/// Integrate starting at `base_order`, doubling the order until two
/// successive refinements agree to `tol` (capped at 8× the base order).
pub fn integrate_to_tol(
    domain: &Domain,
    f: impl Fn(Vec2) -> f64,
    base_order: usize,
    tol: f64,
) -> f64 {
    let mut order = base_order;
    let mut prev = integrate(&quadrature(domain, order), &f);
    for _ in 0..3 {
        order *= 2;
        let next = integrate(&quadrature(domain, order), &f);
        if (next - prev).abs() < tol {
            return next;
        }
        prev = next;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        let (n, w) = gauss_legendre(8);
        // degree-15 polynomial integrated exactly
        let approx: f64 = n.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((approx - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_integrates_to_area() {
        for dom in [Domain::torus_2pi(), Domain::unit_disk()] {
            let rule = quadrature(&dom, 32);
            let v = integrate(&rule, |_| 1.0);
            assert!((v - dom.area()).abs() < 1e-12, "{:?}", dom.kind);
        }
    }

    #[test]
    fn torus_mode_orthogonality() {
        let rule = quadrature(&Domain::torus_2pi(), 64);
        let v = integrate(&rule, |p| (3.0 * p.x - 2.0 * p.y).cos());
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn disk_radial_polynomial() {
        // ∫ (1 - |x|²) dx = π/2
        let rule = quadrature(&Domain::unit_disk(), 64);
        let v = integrate(&rule, |p| 1.0 - p.norm_sq());
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
