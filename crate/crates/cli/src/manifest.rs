//! JSON experiment manifests — the primary interface of every subcommand.
//! A manifest plus the binary version fully determines a run; command-line
//! flags exist only as overrides for seed, worker count, and output path.

use euler_crm::crm::{CRMTriple, SetSpec};
use euler_crm::geometry::{Domain, DomainKind, TestFunctionSpec};
use euler_crm::invariance::ObservableSpec;
use euler_crm::stochint::{CoeffMatrix, Kernel2, MomentTarget};
use euler_crm::vortex::VortexState;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Serializable description of a symmetric order-2 kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// The interaction kernel H_φ of a test function.
    SymmetrizedGrad { phi: TestFunctionSpec },
    /// Finite-rank kernel Σ c_{jk} φ_j ⊗ φ_k over the mean-zero eigenbasis;
    /// `coeffs` is the row-major symmetric size×size matrix.
    FiniteRank { size: usize, coeffs: Vec<f64> },
}

impl KernelSpec {
    pub fn build(&self, domain: Domain) -> Result<Kernel2, CliError> {
        match self {
            KernelSpec::SymmetrizedGrad { phi } => {
                let f = phi
                    .clone()
                    .with_domain(domain)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Ok(Kernel2::h_phi(f))
            }
            KernelSpec::FiniteRank { size, coeffs } => {
                if coeffs.len() != size * size {
                    return Err(CliError::Config(format!(
                        "finite-rank kernel needs {}×{} = {} coefficients, got {}",
                        size,
                        size,
                        size * size,
                        coeffs.len()
                    )));
                }
                let m = CoeffMatrix::new(*size, coeffs.clone())
                    .map_err(|e| CliError::Config(e.to_string()))?;
                Kernel2::finite_rank(domain, m).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

/// One moment check: a target statistic plus the function or kernel it is
/// evaluated on (exactly one of the two must be present).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentCase {
    pub target: MomentTarget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<TestFunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
}

/// Initial data for the point-vortex integrator: either explicit vortices or
/// the atoms of one pure-jump CRM draw.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    State { state: VortexState },
    Triple { triple: CRMTriple, seed: u64 },
}

fn default_true() -> bool {
    true
}

/// The run description each subcommand reads. Unknown fields are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentManifest {
    /// Draw CRM realizations; optionally evaluate I² of a kernel on each.
    Sample {
        triple: CRMTriple,
        m_w: usize,
        n: usize,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<KernelSpec>,
    },
    /// Monte Carlo moments of I¹/I² against their closed-form oracles.
    Moments { triple: CRMTriple, m_w: usize, n: usize, seed: u64, cases: Vec<MomentCase> },
    /// Empirical vs Lévy–Khintchine characteristic function of M(A).
    Cf { triple: CRMTriple, set: SetSpec, n: usize, seed: u64, t_grid: Vec<f64> },
    /// Dump the triad coefficient table with its quadrature cross-check.
    Triads { domain: Domain, max_wavenumber: i32, order: usize },
    /// Row-integral residuals of the interaction kernel at random points.
    Lemma41 { domain: Domain, max_wavenumber: i32, order: usize, points: usize, seed: u64 },
    /// Integrate a point-vortex configuration and emit the trajectory.
    VortexSim {
        initial: InitialCondition,
        t_final: f64,
        tol: f64,
        #[serde(default)]
        output_times: Vec<f64>,
        #[serde(default)]
        self_image: bool,
        #[serde(default)]
        fast_kernel: bool,
    },
    /// Weak-formulation residuals along a point-vortex trajectory.
    WeakResidual {
        initial: InitialCondition,
        t_final: f64,
        tol: f64,
        phis: Vec<TestFunctionSpec>,
        pairs: Vec<(f64, f64)>,
        residual_tol: f64,
    },
    /// Monte Carlo mean of the generator 𝒜F over the triple.
    InvarianceTest { triple: CRMTriple, observable: ObservableSpec, n: usize, seed: u64 },
    /// E[F𝒜G + G𝒜F] with common random numbers.
    SkewTest { triple: CRMTriple, f: ObservableSpec, g: ObservableSpec, n: usize, seed: u64 },
    /// Characteristic-function comparison before/after the vortex flow.
    FlowInvariance {
        triple: CRMTriple,
        observable: ObservableSpec,
        t: f64,
        n: usize,
        seed: u64,
    },
    /// Independence / stationarity diagnostics on a pair of sets.
    HypothesisTest { triple: CRMTriple, set_a: SetSpec, set_b: SetSpec, n: usize, seed: u64 },
    /// The full acceptance suite.
    Accept {
        seed: u64,
        /// Re-run the suite on a second worker pool and require byte-equal
        /// serialized results.
        #[serde(default = "default_true")]
        reproducibility: bool,
    },
}

impl ExperimentManifest {
    /// The serde tag, which doubles as the subcommand name.
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentManifest::Sample { .. } => "sample",
            ExperimentManifest::Moments { .. } => "moments",
            ExperimentManifest::Cf { .. } => "cf",
            ExperimentManifest::Triads { .. } => "triads",
            ExperimentManifest::Lemma41 { .. } => "lemma41",
            ExperimentManifest::VortexSim { .. } => "vortex-sim",
            ExperimentManifest::WeakResidual { .. } => "weak-residual",
            ExperimentManifest::InvarianceTest { .. } => "invariance-test",
            ExperimentManifest::SkewTest { .. } => "skew-test",
            ExperimentManifest::FlowInvariance { .. } => "flow-invariance",
            ExperimentManifest::HypothesisTest { .. } => "hypothesis-test",
            ExperimentManifest::Accept { .. } => "accept",
        }
    }

    /// The seed recorded in the manifest, if the experiment uses one.
    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentManifest::Sample { seed, .. }
            | ExperimentManifest::Moments { seed, .. }
            | ExperimentManifest::Cf { seed, .. }
            | ExperimentManifest::Lemma41 { seed, .. }
            | ExperimentManifest::InvarianceTest { seed, .. }
            | ExperimentManifest::SkewTest { seed, .. }
            | ExperimentManifest::FlowInvariance { seed, .. }
            | ExperimentManifest::HypothesisTest { seed, .. }
            | ExperimentManifest::Accept { seed, .. } => Some(*seed),
            ExperimentManifest::VortexSim { initial, .. }
            | ExperimentManifest::WeakResidual { initial, .. } => match initial {
                InitialCondition::Triple { seed, .. } => Some(*seed),
                InitialCondition::State { .. } => None,
            },
            ExperimentManifest::Triads { .. } => None,
        }
    }

    /// Apply a `--seed` override in place.
    pub fn set_seed(&mut self, new: u64) -> Result<(), CliError> {
        match self {
            ExperimentManifest::Sample { seed, .. }
            | ExperimentManifest::Moments { seed, .. }
            | ExperimentManifest::Cf { seed, .. }
            | ExperimentManifest::Lemma41 { seed, .. }
            | ExperimentManifest::InvarianceTest { seed, .. }
            | ExperimentManifest::SkewTest { seed, .. }
            | ExperimentManifest::FlowInvariance { seed, .. }
            | ExperimentManifest::HypothesisTest { seed, .. }
            | ExperimentManifest::Accept { seed, .. } => {
                *seed = new;
                Ok(())
            }
            ExperimentManifest::VortexSim { initial, .. }
            | ExperimentManifest::WeakResidual { initial, .. } => match initial {
                InitialCondition::Triple { seed, .. } => {
                    *seed = new;
                    Ok(())
                }
                InitialCondition::State { .. } => Err(CliError::Config(
                    "--seed has no effect on an explicit initial state".into(),
                )),
            },
            ExperimentManifest::Triads { .. } => {
                Err(CliError::Config("the triads experiment is deterministic; no seed".into()))
            }
        }
    }

    /// Structural validation beyond what serde enforces.
    pub fn validate(&self) -> Result<(), CliError> {
        let config = |msg: String| Err(CliError::Config(msg));
        let check_n = |n: usize, min: usize| {
            if n < min {
                config(format!("N must be ≥ minimum ({min} for this experiment, got {n})"))
            } else {
                Ok(())
            }
        };
        let check_triple = |t: &CRMTriple| {
            t.validate().map_err(|e| CliError::Config(format!("invalid triple: {e}")))
        };
        match self {
            ExperimentManifest::Sample { triple, n, .. } => {
                check_triple(triple)?;
                check_n(*n, 1)
            }
            ExperimentManifest::Moments { triple, n, cases, .. } => {
                check_triple(triple)?;
                check_n(*n, 1000)?;
                if cases.is_empty() {
                    return config("moments needs at least one case".into());
                }
                for (i, c) in cases.iter().enumerate() {
                    if c.function.is_some() == c.kernel.is_some() {
                        return config(format!(
                            "case {i}: exactly one of `function` and `kernel` must be given"
                        ));
                    }
                }
                Ok(())
            }
            ExperimentManifest::Cf { triple, n, t_grid, .. } => {
                check_triple(triple)?;
                check_n(*n, 1000)?;
                if t_grid.is_empty() {
                    return config("cf needs a non-empty t_grid".into());
                }
                Ok(())
            }
            ExperimentManifest::Triads { domain, max_wavenumber, order } => {
                if !matches!(domain.kind, DomainKind::Torus { .. }) {
                    return config("triad coefficients are defined on the torus".into());
                }
                if *max_wavenumber < 1 {
                    return config("max_wavenumber must be ≥ 1".into());
                }
                if *order as i32 <= 4 * *max_wavenumber {
                    return config(format!(
                        "quadrature order must exceed 4·max_wavenumber = {}",
                        4 * *max_wavenumber
                    ));
                }
                Ok(())
            }
            ExperimentManifest::Lemma41 { max_wavenumber, order, points, .. } => {
                if *max_wavenumber < 1 || *order < 8 || *points == 0 {
                    return config(
                        "lemma41 needs max_wavenumber ≥ 1, order ≥ 8, points ≥ 1".into(),
                    );
                }
                Ok(())
            }
            ExperimentManifest::VortexSim { t_final: _, tol, .. } => {
                if !(*tol > 0.0) {
                    return config("tolerance must be positive".into());
                }
                Ok(())
            }
            ExperimentManifest::WeakResidual { t_final, tol, phis, pairs, residual_tol, .. } => {
                if !(*tol > 0.0) || !(*residual_tol > 0.0) {
                    return config("tolerances must be positive".into());
                }
                if phis.is_empty() || pairs.is_empty() {
                    return config("weak-residual needs test functions and (s,t) pairs".into());
                }
                for &(s, t) in pairs {
                    if s < 0.0 || t < 0.0 || s.max(t) > *t_final {
                        return config(format!("pair ({s},{t}) outside [0, {t_final}]"));
                    }
                }
                Ok(())
            }
            ExperimentManifest::InvarianceTest { triple, n, .. }
            | ExperimentManifest::SkewTest { triple, n, .. } => {
                check_triple(triple)?;
                check_n(*n, 10_000)
            }
            ExperimentManifest::FlowInvariance { triple, n, .. } => {
                check_triple(triple)?;
                if triple.q != 0.0 || triple.a != 0.0 || triple.nu.is_none() {
                    return config(
                        "flow-invariance needs a pure-atom triple (a = 0, q = 0, ν ≠ 0)".into(),
                    );
                }
                check_n(*n, 1000)
            }
            ExperimentManifest::HypothesisTest { triple, n, .. } => {
                check_triple(triple)?;
                check_n(*n, 1000)
            }
            ExperimentManifest::Accept { .. } => Ok(()),
        }
    }
}
