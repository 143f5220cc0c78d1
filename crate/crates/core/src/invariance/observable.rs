//! Cylinder observables: a vector of test functions paired with a smooth
//! bounded outer function with closed-form partial derivatives.

use crate::geometry::{Domain, TestFunction, TestFunctionSpec};
use crate::invariance::InvarianceError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Outer function f: ℝⁿ → ℂ, C_b^∞ by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OuterFn {
    /// f(v) = exp(i⟨t, v⟩).
    ExpTrig { freq: Vec<f64> },
    /// f(v) = Π_k cos(t_k v_k).
    ProductCos { freq: Vec<f64> },
}

impl OuterFn {
    pub fn freq(&self) -> &[f64] {
        match self {
            OuterFn::ExpTrig { freq } | OuterFn::ProductCos { freq } => freq,
        }
    }

    pub fn eval(&self, v: &[f64]) -> Complex64 {
        match self {
            OuterFn::ExpTrig { freq } => {
                let phase: f64 = freq.iter().zip(v).map(|(t, x)| t * x).sum();
                Complex64::from_polar(1.0, phase)
            }
            OuterFn::ProductCos { freq } => {
                let p: f64 = freq.iter().zip(v).map(|(t, x)| (t * x).cos()).product();
                Complex64::new(p, 0.0)
            }
        }
    }

    /// ∂f/∂v_k in closed form.
    pub fn partial(&self, k: usize, v: &[f64]) -> Complex64 {
        match self {
            OuterFn::ExpTrig { freq } => Complex64::i() * freq[k] * self.eval(v),
            OuterFn::ProductCos { freq } => {
                let mut p = -freq[k] * (freq[k] * v[k]).sin();
                for (j, (t, x)) in freq.iter().zip(v).enumerate() {
                    if j != k {
                        p *= (t * x).cos();
                    }
                }
                Complex64::new(p, 0.0)
            }
        }
    }
}

/// Serializable recipe for a cylinder observable; the domain is supplied at
/// build time (it travels with the experiment, not the observable).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub phis: Vec<TestFunctionSpec>,
    pub outer: OuterFn,
}

impl ObservableSpec {
    pub fn build(&self, domain: Domain) -> Result<CylinderObservable, InvarianceError> {
        let phis: Result<Vec<TestFunction>, _> =
            self.phis.iter().map(|spec| spec.clone().with_domain(domain)).collect();
        CylinderObservable::new(phis?, self.outer.clone())
    }
}

/// F(M) = f(I¹_M(φ₁), …, I¹_M(φ_n)).
#[derive(Clone, Debug)]
pub struct CylinderObservable {
    pub phis: Vec<TestFunction>,
    pub outer: OuterFn,
}

impl CylinderObservable {
    pub fn new(phis: Vec<TestFunction>, outer: OuterFn) -> Result<Self, InvarianceError> {
        if phis.is_empty() {
            return Err(InvarianceError::EmptyObservable);
        }
        if outer.freq().len() != phis.len() {
            return Err(InvarianceError::LengthMismatch);
        }
        if phis.iter().any(|p| p.domain.kind != phis[0].domain.kind) {
            return Err(InvarianceError::DomainMismatch);
        }
        Ok(CylinderObservable { phis, outer })
    }

    pub fn n(&self) -> usize {
        self.phis.len()
    }
}
