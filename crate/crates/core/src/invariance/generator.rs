//! Evaluation of cylinder observables and of the generator
//! 𝒜F(M) = Σ_k ∂_k f(I¹(φ₁),…)·I²_M(H_{φ_k}).

use crate::crm::CRMSample;
use crate::invariance::observable::CylinderObservable;
use crate::invariance::InvarianceError;
use crate::stochint::{i1, i2, Kernel2};
use num_complex::Complex64;

/// An observable with its interaction kernels H_{φ_k} prepared once, so the
/// per-kernel Gaussian projection caches are shared across many samples.
pub struct PreparedObservable {
    pub obs: CylinderObservable,
    kernels: Vec<Kernel2>,
}

impl PreparedObservable {
    pub fn new(obs: CylinderObservable) -> Self {
        let kernels = obs.phis.iter().map(|phi| Kernel2::h_phi(phi.clone())).collect();
        PreparedObservable { obs, kernels }
    }

    /// The inner vector v_k = I¹_M(φ_k).
    pub fn i1_values(&self, sample: &CRMSample) -> Result<Vec<f64>, InvarianceError> {
        self.obs
            .phis
            .iter()
            .map(|phi| Ok(i1(sample, phi)?.total))
            .collect()
    }

    pub fn eval(&self, sample: &CRMSample) -> Result<Complex64, InvarianceError> {
        Ok(self.obs.outer.eval(&self.i1_values(sample)?))
    }

    /// 𝒜F at the sample.
    pub fn generator(&self, sample: &CRMSample) -> Result<Complex64, InvarianceError> {
        let v = self.i1_values(sample)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, kernel) in self.kernels.iter().enumerate() {
            let w = i2(sample, kernel)?.total;
            acc += self.obs.outer.partial(k, &v) * w;
        }
        Ok(acc)
    }

    /// The I² values entering the generator, for identity checks.
    pub fn i2_values(&self, sample: &CRMSample) -> Result<Vec<f64>, InvarianceError> {
        self.kernels
            .iter()
            .map(|kernel| Ok(i2(sample, kernel)?.total))
            .collect()
    }
}

/// F(M) for a single sample. For many samples prefer [`PreparedObservable`].
pub fn eval_observable(
    obs: &CylinderObservable,
    sample: &CRMSample,
) -> Result<Complex64, InvarianceError> {
    if obs.phis[0].domain.kind != sample.domain.kind {
        return Err(InvarianceError::DomainMismatch);
    }
    let v: Result<Vec<f64>, InvarianceError> =
        obs.phis.iter().map(|phi| Ok(i1(sample, phi)?.total)).collect();
    Ok(obs.outer.eval(&v?))
}

/// 𝒜F(M) for a single sample. For many samples prefer [`PreparedObservable`].
pub fn generator_apply(
    obs: &CylinderObservable,
    sample: &CRMSample,
) -> Result<Complex64, InvarianceError> {
    if obs.phis[0].domain.kind != sample.domain.kind {
        return Err(InvarianceError::DomainMismatch);
    }
    PreparedObservable::new(obs.clone()).generator(sample)
}
