use super::domain::{Domain, DomainKind};
use super::vec2::Vec2;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Cos,
    Sin,
}

/// Serializable description of a test function, without the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunctionSpec {
    TorusMode { k: (i32, i32), phase: Phase },
    DiskBump { center: (f64, f64), radius: f64, amplitude: f64 },
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TestFunctionError {
    #[error("torus mode wavevector must be nonzero")]
    ZeroWavevector,
    #[error("disk bump support must lie strictly inside the unit disk")]
    BumpOutsideDisk,
    #[error("test function kind does not match the domain")]
    DomainMismatch,
}

/// A smooth test function with closed-form gradient and Hessian.
///
/// Torus modes are L²-normalized eigenfunctions of -Δ; disk bumps are
/// compactly supported smooth bumps exp(1 - 1/(1 - |x-c|²/r²)).
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub spec: TestFunctionSpec,
    pub domain: Domain,
}

impl TestFunctionSpec {
    pub fn with_domain(self, domain: Domain) -> Result<TestFunction, TestFunctionError> {
        match (&self, &domain.kind) {
            (TestFunctionSpec::TorusMode { k, .. }, DomainKind::Torus { .. }) => {
                if *k == (0, 0) {
                    return Err(TestFunctionError::ZeroWavevector);
                }
            }
            (
                TestFunctionSpec::DiskBump { center, radius, .. },
                DomainKind::UnitDisk,
            ) => {
                let c = Vec2::new(center.0, center.1);
                if !(c.norm() + radius < 1.0) || *radius <= 0.0 {
                    return Err(TestFunctionError::BumpOutsideDisk);
                }
            }
            _ => return Err(TestFunctionError::DomainMismatch),
        }
        Ok(TestFunction { spec: self, domain })
    }
}

impl TestFunction {
    pub fn torus_mode(domain: Domain, k: (i32, i32), phase: Phase) -> Self {
        TestFunctionSpec::TorusMode { k, phase }.with_domain(domain).unwrap()
    }

    pub fn disk_bump(center: Vec2, radius: f64, amplitude: f64) -> Self {
        TestFunctionSpec::DiskBump { center: (center.x, center.y), radius, amplitude }
            .with_domain(Domain::unit_disk())
            .unwrap()
    }

    /// Physical wavevector and normalization of a torus mode.
    fn mode_params(&self) -> Option<(Vec2, Phase, f64)> {
        match (&self.spec, &self.domain.kind) {
            (TestFunctionSpec::TorusMode { k, phase }, DomainKind::Torus { l }) => {
                let kappa = Vec2::new(k.0 as f64, k.1 as f64) * (2.0 * std::f64::consts::PI / l);
                let norm = std::f64::consts::SQRT_2 / l;
                Some((kappa, *phase, norm))
            }
            _ => None,
        }
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        match &self.spec {
            TestFunctionSpec::TorusMode { .. } => {
                let (kappa, phase, norm) = self.mode_params().unwrap();
                let theta = kappa.dot(p);
                norm * match phase {
                    Phase::Cos => theta.cos(),
                    Phase::Sin => theta.sin(),
                }
            }
            TestFunctionSpec::DiskBump { center, radius, amplitude } => {
                let s = (p - Vec2::new(center.0, center.1)).norm_sq() / (radius * radius);
                if s >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - s)).exp()
                }
            }
        }
    }

    pub fn grad(&self, p: Vec2) -> Vec2 {
        match &self.spec {
            TestFunctionSpec::TorusMode { .. } => {
                let (kappa, phase, norm) = self.mode_params().unwrap();
                let theta = kappa.dot(p);
                match phase {
                    Phase::Cos => kappa * (-norm * theta.sin()),
                    Phase::Sin => kappa * (norm * theta.cos()),
                }
            }
            TestFunctionSpec::DiskBump { center, radius, amplitude } => {
                let d = p - Vec2::new(center.0, center.1);
                let r2 = radius * radius;
                let s = d.norm_sq() / r2;
                if s >= 1.0 {
                    Vec2::ZERO
                } else {
                    let phi = amplitude * (1.0 - 1.0 / (1.0 - s)).exp();
                    // dφ/ds = -φ/(1-s)², ∇s = 2 d / r²
                    d * (-phi / ((1.0 - s) * (1.0 - s)) * 2.0 / r2)
                }
            }
        }
    }

    /// Hessian as (φ_xx, φ_xy, φ_yy).
    pub fn hessian(&self, p: Vec2) -> (f64, f64, f64) {
        match &self.spec {
            TestFunctionSpec::TorusMode { .. } => {
                let (kappa, phase, norm) = self.mode_params().unwrap();
                let theta = kappa.dot(p);
                let v = -norm
                    * match phase {
                        Phase::Cos => theta.cos(),
                        Phase::Sin => theta.sin(),
                    };
                (v * kappa.x * kappa.x, v * kappa.x * kappa.y, v * kappa.y * kappa.y)
            }
            TestFunctionSpec::DiskBump { center, radius, amplitude } => {
                let d = p - Vec2::new(center.0, center.1);
                let r2 = radius * radius;
                let s = d.norm_sq() / r2;
                if s >= 1.0 {
                    return (0.0, 0.0, 0.0);
                }
                let phi = amplitude * (1.0 - 1.0 / (1.0 - s)).exp();
                let om = 1.0 - s;
                // ∇φ = φ g(s) ∇s with g = -1/(1-s)²
                let g = -1.0 / (om * om);
                let gp = -2.0 / (om * om * om);
                let sx = 2.0 * d.x / r2;
                let sy = 2.0 * d.y / r2;
                let quad = phi * (g * g + gp);
                let lin = phi * g * 2.0 / r2;
                (quad * sx * sx + lin, quad * sx * sy, quad * sy * sy)
            }
        }
    }

    /// C² norm surrogate: max of |φ|, |∂φ| and |∂²φ| entries on a 128² grid,
    /// inflated by 5% so the value upper-bounds the true suprema despite the
    /// grid's finite resolution of the extrema.
    pub fn c2_norm(&self) -> f64 {
        let n = 128;
        let mut best = 0.0f64;
        let (lo, hi) = match self.domain.kind {
            DomainKind::Torus { l } => (Vec2::ZERO, Vec2::new(l, l)),
            DomainKind::UnitDisk => (Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)),
        };
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new(
                    lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / n as f64,
                    lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / n as f64,
                );
                if !self.domain.contains(p) && !self.domain.is_torus() {
                    continue;
                }
                best = best.max(self.eval(p).abs());
                let g = self.grad(p);
                best = best.max(g.x.abs()).max(g.y.abs());
                let (hxx, hxy, hyy) = self.hessian(p);
                best = best.max(hxx.abs()).max(hxy.abs()).max(hyy.abs());
            }
        }
        1.05 * best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(f: &TestFunction, p: Vec2) -> Vec2 {
        let h = 1e-6;
        Vec2::new(
            (f.eval(p + Vec2::new(h, 0.0)) - f.eval(p - Vec2::new(h, 0.0))) / (2.0 * h),
            (f.eval(p + Vec2::new(0.0, h)) - f.eval(p - Vec2::new(0.0, h))) / (2.0 * h),
        )
    }

    #[test]
    fn torus_mode_grad_hessian() {
        let f = TestFunction::torus_mode(Domain::torus_2pi(), (2, -1), Phase::Sin);
        let p = Vec2::new(0.7, 1.9);
        assert!((f.grad(p) - fd_grad(&f, p)).norm() < 1e-8);
        let h = 1e-5;
        let fd_xx = (f.eval(p + Vec2::new(h, 0.0)) - 2.0 * f.eval(p)
            + f.eval(p - Vec2::new(h, 0.0)))
            / (h * h);
        assert!((f.hessian(p).0 - fd_xx).abs() < 1e-5);
    }

    #[test]
    fn disk_bump_grad_hessian() {
        let f = TestFunction::disk_bump(Vec2::new(0.2, -0.1), 0.5, 1.3);
        let p = Vec2::new(0.35, 0.05);
        assert!((f.grad(p) - fd_grad(&f, p)).norm() < 1e-7);
        let h = 1e-5;
        let exy = (f.eval(p + Vec2::new(h, h)) - f.eval(p + Vec2::new(h, -h))
            - f.eval(p + Vec2::new(-h, h))
            + f.eval(p + Vec2::new(-h, -h)))
            / (4.0 * h * h);
        assert!((f.hessian(p).1 - exy).abs() < 1e-4);
    }

    #[test]
    fn bump_compact_support() {
        let f = TestFunction::disk_bump(Vec2::new(0.2, 0.0), 0.5, 1.0);
        let outside = Vec2::new(0.8, 0.3);
        assert_eq!(f.eval(outside), 0.0);
        assert_eq!(f.grad(outside), Vec2::ZERO);
        // support strictly inside the disk is enforced
        assert!(TestFunctionSpec::DiskBump { center: (0.6, 0.0), radius: 0.5, amplitude: 1.0 }
            .with_domain(Domain::unit_disk())
            .is_err());
    }

    #[test]
    fn zero_mode_rejected() {
        assert!(TestFunctionSpec::TorusMode { k: (0, 0), phase: Phase::Cos }
            .with_domain(Domain::torus_2pi())
            .is_err());
    }

    #[test]
    fn c2_norm_dominates_sup() {
        let f = TestFunction::torus_mode(Domain::torus_2pi(), (1, 0), Phase::Cos);
        let sup = std::f64::consts::SQRT_2 / (2.0 * std::f64::consts::PI);
        assert!(f.c2_norm() >= sup - 1e-9);
        assert!(f.c2_norm().is_finite());
    }

    #[test]
    fn spec_json_format() {
        let s: TestFunctionSpec =
            serde_json::from_str(r#"{"kind":"torus_mode","k":[1,0],"phase":"cos"}"#).unwrap();
        assert_eq!(s, TestFunctionSpec::TorusMode { k: (1, 0), phase: Phase::Cos });
        let b: TestFunctionSpec = serde_json::from_str(
            r#"{"kind":"disk_bump","center":[0.2,0.0],"radius":0.5,"amplitude":1.0}"#,
        )
        .unwrap();
        assert!(matches!(b, TestFunctionSpec::DiskBump { .. }));
        let round = serde_json::to_string(&s).unwrap();
        assert_eq!(round, r#"{"kind":"torus_mode","k":[1,0],"phase":"cos"}"#);
    }
}
