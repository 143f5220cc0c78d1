//! The full acceptance suite: thirteen numbered criteria, each reported as
//! one pass/fail line with pinned tolerances. The suite is deterministic for
//! a fixed seed: every Monte Carlo reduction is stream-batched, so the
//! serialized results are byte-identical across worker pools, which is
//! itself the final criterion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use euler_crm::crm::{sample_crm, CRMTriple, JumpLawSpec, SetSpec};
use euler_crm::geometry::{row_integral, Domain, TestFunction, TestFunctionSpec, Vec2};
use euler_crm::geometry::Phase;
use euler_crm::invariance::{
    flow_invariance_test, gaussian_cancellation, mc_generator_mean_detailed, mixed_cancellation,
    skew_symmetry_test_detailed, CylinderObservable, OuterFn, TriadTensor,
};
use euler_crm::spectral::{basis, lemma41_check, TriadTable};
use euler_crm::stats::{ks_test_standard_normal, MCReport};
use euler_crm::stochint::{i2, pairing_tensor, CoeffMatrix, Kernel2, MomentTarget};
use euler_crm::vortex::{
    hamiltonian, integrate, weak_residual, Trajectory, VortexError, VortexState,
};

use crate::manifest::{KernelSpec, MomentCase};
use crate::report::{strip_workers, Artifacts, Csv};
use crate::runners::{cf_comparison, disk_bumps, random_points, run_moment_case, triad_checks};
use crate::CliError;

/// One acceptance criterion with its measured extremes.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub verdict: String,
    pub details: Value,
}

/// Everything criteria 1–12 measured, in order.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteResults {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

/// Suite results plus the reproducibility verdict and printable lines.
#[derive(Clone, Debug)]
pub struct AcceptanceOutcome {
    pub results: SuiteResults,
    pub reproducible: Option<bool>,
    pub lines: Vec<String>,
    pub all_passed: bool,
}

fn nu_two_band() -> JumpLawSpec {
    // modest mass keeps atom counts (and O(atoms²) pair sums) desk-scale
    JumpLawSpec::TwoBand { c: 0.2, inner: 1.0, outer: 2.0 }
}

fn torus() -> Domain {
    Domain::torus_2pi()
}

/// The three reference triples: pure Gaussian, pure jump, full.
fn triples() -> [CRMTriple; 3] {
    let d = torus();
    [
        CRMTriple::new(0.0, 1.0, None, d),
        CRMTriple::new(0.0, 0.0, Some(nu_two_band()), d),
        CRMTriple::new(0.5, 0.3, Some(nu_two_band()), d),
    ]
}

/// Rank-3 symmetric coefficient kernel on the mean-zero eigenmodes (index 0,
/// the constant mode, stays empty so the jump-variance oracle applies).
fn reference_kernel(domain: Domain) -> Kernel2 {
    let n = 3;
    let mut data = vec![0.0; n * n];
    for &(j, k, v) in &[(1usize, 1usize, 0.9), (1, 2, -0.5), (2, 2, 0.4)] {
        data[j * n + k] = v;
        data[k * n + j] = v;
    }
    Kernel2::finite_rank(domain, CoeffMatrix::new(n, data).expect("symmetric")).expect("kernel")
}

fn reference_kernel_spec() -> KernelSpec {
    let mut coeffs = vec![0.0; 9];
    for &(j, k, v) in &[(1usize, 1usize, 0.9), (1, 2, -0.5), (2, 2, 0.4)] {
        coeffs[j * 3 + k] = v;
        coeffs[k * 3 + j] = v;
    }
    KernelSpec::FiniteRank { size: 3, coeffs }
}

fn mode(k: (i32, i32)) -> TestFunction {
    TestFunction::torus_mode(torus(), k, Phase::Cos)
}

/// The five reference observables: n ∈ {1,2,3} with both outer families.
fn observables() -> Vec<CylinderObservable> {
    let phis = [mode((1, 0)), mode((0, 1)), mode((1, 1))];
    let build = |n: usize, outer: OuterFn| {
        CylinderObservable::new(phis[..n].to_vec(), outer).expect("observable")
    };
    vec![
        build(1, OuterFn::ExpTrig { freq: vec![0.7] }),
        build(1, OuterFn::ProductCos { freq: vec![1.1] }),
        build(2, OuterFn::ExpTrig { freq: vec![0.7, -1.1] }),
        build(2, OuterFn::ProductCos { freq: vec![1.1, 0.6] }),
        build(3, OuterFn::ExpTrig { freq: vec![0.7, -1.1, 0.4] }),
    ]
}

fn scaled(n: usize, scale: f64, min: usize) -> usize {
    ((n as f64 * scale) as usize).max(min)
}

/// Run a z-band Monte Carlo check with the one-shot 4N escalation rule.
fn escalate(
    n: usize,
    mut run: impl FnMut(usize) -> Result<MCReport, CliError>,
) -> Result<(MCReport, bool), CliError> {
    let first = run(n)?;
    if first.passed() {
        return Ok((first, false));
    }
    Ok((run(4 * n)?, true))
}

fn report_value(r: &MCReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    strip_workers(&mut v);
    v
}

struct Suite {
    criteria: Vec<CriterionResult>,
}

impl Suite {
    fn record(&mut self, id: u8, name: &str, outcome: Result<(bool, Value), CliError>) {
        let (passed, details) = match outcome {
            Ok((p, d)) => (p, d),
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        self.criteria.push(CriterionResult {
            id,
            name: name.to_string(),
            verdict: if passed { "pass".into() } else { "fail".into() },
            details,
        });
    }
}

/// Criteria 1–12 at the given Monte Carlo scale (1.0 = the pinned sizes).
pub fn run_suite(seed: u64, scale: f64) -> SuiteResults {
    let mut suite = Suite { criteria: Vec::new() };
    let stamp = |s: &mut Suite, id: u8, name: &str, f: &dyn Fn() -> Result<(bool, Value), CliError>| {
        let start = std::time::Instant::now();
        s.record(id, name, f());
        eprintln!("[accept] criterion {id:2} ({name}) took {:.1}s", start.elapsed().as_secs_f64());
    };

    let mut c9_trajectories: Vec<(String, Trajectory)> = Vec::new();

    stamp(&mut suite, 1, "triad structure", &criterion_1);
    stamp(&mut suite, 2, "interaction-kernel row integrals", &|| criterion_2(seed));
    stamp(&mut suite, 3, "moment formulas", &|| criterion_3(seed, scale));
    stamp(&mut suite, 4, "levy-khintchine characteristic function", &|| criterion_4(seed, scale));
    stamp(&mut suite, 5, "tensor pairing relation", &|| criterion_5(seed));
    stamp(&mut suite, 6, "generator mean zero", &|| criterion_6(seed, scale));
    stamp(&mut suite, 7, "generator skew-symmetry", &|| criterion_7(seed, scale));
    stamp(&mut suite, 8, "per-sample algebraic cancellations", &|| criterion_8(seed));
    {
        let start = std::time::Instant::now();
        let outcome = criterion_9(&mut c9_trajectories);
        suite.record(9, "point-vortex conservation", outcome);
        eprintln!(
            "[accept] criterion  9 (point-vortex conservation) took {:.1}s",
            start.elapsed().as_secs_f64()
        );
    }
    {
        let start = std::time::Instant::now();
        let outcome = criterion_10(&c9_trajectories);
        suite.record(10, "weak-solution equivalence", outcome);
        eprintln!(
            "[accept] criterion 10 (weak-solution equivalence) took {:.1}s",
            start.elapsed().as_secs_f64()
        );
    }
    stamp(&mut suite, 11, "flow invariance in law", &|| criterion_11(seed, scale));
    stamp(&mut suite, 12, "independence and stationarity", &|| criterion_12(seed, scale));

    SuiteResults { seed, criteria: suite.criteria }
}

fn criterion_1() -> Result<(bool, Value), CliError> {
    let modes = basis(torus(), 4);
    let closed = TriadTable::build_closed_form(modes.clone());
    // The grid quadrature converges at O(order⁻⁴), limited by aliasing of
    // the kernel table's Fourier tail: 8e-6 at order 64, 2e-9 at order 512.
    // 512 is the first power of two inside the 1e-8 band.
    let quad = TriadTable::build_quadrature(modes, 512);
    let c = triad_checks(&closed, &quad);
    let passed = c.max_coincident < 1e-12
        && c.max_first_two_asym < 1e-12
        && c.max_cyclic < 1e-10
        && c.max_quad_diff < 1e-8;
    Ok((
        passed,
        json!({
            "max_coincident": c.max_coincident,
            "max_first_two_asym": c.max_first_two_asym,
            "max_cyclic_sum": c.max_cyclic,
            "max_quad_diff": c.max_quad_diff,
        }),
    ))
}

fn criterion_2(seed: u64) -> Result<(bool, Value), CliError> {
    let order = 64;
    let d_torus = torus();
    let ys = random_points(&d_torus, 20, seed ^ 0x2);
    let mut max_diag = 0.0f64;
    let mut max_row_torus = 0.0f64;
    for m in &basis(d_torus, 4) {
        for &y in &ys {
            max_diag = max_diag.max(lemma41_check(m, y, order).abs());
            max_row_torus = max_row_torus.max(row_integral(&m.func, y, order).abs());
        }
    }
    let d_disk = Domain::unit_disk();
    let ys_disk = random_points(&d_disk, 20, seed ^ 0x3);
    let mut max_row_disk = 0.0f64;
    // Order 128 on the disk: the bump functions' steep support-edge layer
    // leaves ~1e-7 residual at order 64 but <1e-9 at 128.
    for bump in &disk_bumps() {
        for &y in &ys_disk {
            max_row_disk = max_row_disk.max(row_integral(bump, y, 128).abs());
        }
    }
    let passed = max_diag < 1e-8 && max_row_torus < 1e-8 && max_row_disk < 1e-8;
    Ok((
        passed,
        json!({
            "max_diagonal_residual": max_diag,
            "max_row_residual_torus": max_row_torus,
            "max_row_residual_disk": max_row_disk,
        }),
    ))
}

fn criterion_3(seed: u64, scale: f64) -> Result<(bool, Value), CliError> {
    let n = scaled(200_000, scale, 20_000);
    let [gauss, jump, _] = triples();
    let f_spec = TestFunctionSpec::TorusMode { k: (1, 0), phase: Phase::Cos };
    let kernel_spec = reference_kernel_spec();
    let runs: [(&CRMTriple, MomentCase); 4] = [
        (
            &gauss,
            MomentCase {
                target: MomentTarget::I1GaussianVariance,
                function: Some(f_spec.clone()),
                kernel: None,
            },
        ),
        (
            &jump,
            MomentCase {
                target: MomentTarget::I1JumpVariance,
                function: Some(f_spec),
                kernel: None,
            },
        ),
        (
            &gauss,
            MomentCase {
                target: MomentTarget::I2GaussianVariance,
                function: None,
                kernel: Some(kernel_spec.clone()),
            },
        ),
        (
            &jump,
            MomentCase {
                target: MomentTarget::I2JumpVariance,
                function: None,
                kernel: Some(kernel_spec),
            },
        ),
    ];
    let mut passed = true;
    let mut details = Vec::new();
    for (triple, case) in &runs {
        let (r, escalated) =
            escalate(n, |count| run_moment_case(triple, case, 9, count, seed))?;
        passed &= r.passed();
        details.push(json!({
            "target": case.target,
            "escalated": escalated,
            "report": report_value(&r),
        }));
    }
    Ok((passed, json!({ "cases": details })))
}

fn criterion_4(seed: u64, scale: f64) -> Result<(bool, Value), CliError> {
    let n = scaled(100_000, scale, 10_000);
    let set = SetSpec::rect([0.5, 0.5], [3.5, 2.5]);
    let t_grid: Vec<f64> = (0..21).map(|i| -1.0 + i as f64 * 0.1).collect();
    let mut passed = true;
    let mut details = Vec::new();
    for triple in &triples() {
        let (rows, band) = cf_comparison(triple, &set, n, seed, &t_grid)?;
        let sup = rows.iter().map(|r| r.3).fold(0.0f64, f64::max);
        passed &= sup < band;
        details.push(json!({
            "a": triple.a, "q": triple.q,
            "sup_diff": sup,
            "band": band,
        }));
    }
    Ok((passed, json!({ "n": n, "triples": details })))
}

fn criterion_5(seed: u64) -> Result<(bool, Value), CliError> {
    let kernels = [
        reference_kernel(torus()),
        Kernel2::h_phi(mode((1, 0))),
    ];
    let mut worst = 0.0f64;
    for triple in &triples() {
        for h in &kernels {
            let qtrace = triple.q * h.trace_integral(64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5);
            for _ in 0..200 {
                let s = sample_crm(triple, 9, &mut rng)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let p = pairing_tensor(&s, h).map_err(|e| CliError::Numerical(e.to_string()))?;
                let v = i2(&s, h).map_err(|e| CliError::Numerical(e.to_string()))?;
                let diag: f64 = s.atoms.iter().map(|&(x, g)| g * g * h.eval(x, x)).sum();
                worst = worst.max((p - (v.total + qtrace + diag)).abs());
            }
        }
    }
    Ok((worst < 1e-8, json!({ "max_defect": worst, "samples_per_combo": 200 })))
}

fn criterion_6(seed: u64, scale: f64) -> Result<(bool, Value), CliError> {
    let n = scaled(100_000, scale, 10_000);
    let obs = observables();
    let trips = triples();
    let mut passed = true;
    let mut combos = Vec::new();
    for (oi, o) in obs.iter().enumerate() {
        for (ti, t) in trips.iter().enumerate() {
            let (r, escalated) = escalate(n, |count| {
                mc_generator_mean_detailed(t, o, count, seed)
                    .map(|(rep, _)| rep)
                    .map_err(|e| CliError::Numerical(e.to_string()))
            })?;
            passed &= r.passed();
            combos.push(json!({
                "observable": oi,
                "triple": ti,
                "escalated": escalated,
                "report": report_value(&r),
            }));
        }
    }
    // z-score distribution over 20 seeds against N(0,1). Under the sign
    // symmetry of the law, antithetic pairs cancel the odd part of 𝒜F
    // exactly; for ExpTrig the surviving statistic is purely imaginary, so
    // the signed z-score Im(est)/stderr is the asymptotically-normal one.
    // (ProductCos pairs cancel identically — estimate and stderr are exact
    // zeros — and carry no distribution to test.)
    let mut zs = Vec::with_capacity(20);
    for i in 0..20u64 {
        let (r, _) = mc_generator_mean_detailed(&trips[1], &obs[0], n, seed.wrapping_add(101 + i))
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        zs.push(r.estimate.im / r.stderr);
    }
    let (ks_d, ks_p) = ks_test_standard_normal(&mut zs);
    passed &= ks_p > 0.01;
    Ok((
        passed,
        json!({ "n": n, "combos": combos, "ks_d": ks_d, "ks_p": ks_p }),
    ))
}

fn criterion_7(seed: u64, scale: f64) -> Result<(bool, Value), CliError> {
    let n = scaled(100_000, scale, 10_000);
    let obs = observables();
    let pairs = [(0usize, 2usize), (0, 3), (2, 4)];
    let trips = triples();
    let two = [&trips[0], &trips[1]];
    let mut passed = true;
    let mut combos = Vec::new();
    for &(a, b) in &pairs {
        for (ti, t) in two.iter().enumerate() {
            let (r, escalated) = escalate(n, |count| {
                skew_symmetry_test_detailed(&obs[a], &obs[b], t, count, seed)
                    .map(|(rep, _)| rep)
                    .map_err(|e| CliError::Numerical(e.to_string()))
            })?;
            passed &= r.passed();
            combos.push(json!({
                "pair": [a, b],
                "triple": ti,
                "escalated": escalated,
                "report": report_value(&r),
            }));
        }
    }
    Ok((passed, json!({ "n": n, "pairs": combos })))
}

fn criterion_8(seed: u64) -> Result<(bool, Value), CliError> {
    let tensor = TriadTensor::new(torus(), 2);
    let m_w = 25; // 24 modes with |k|∞ ≤ 2 plus the constant
    let triple = CRMTriple::new(0.0, 1.0, Some(nu_two_band()), torus());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8);
    let mut max_gauss = 0.0f64;
    let mut max_mixed = 0.0f64;
    for _ in 0..100 {
        let s = sample_crm(&triple, m_w, &mut rng)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        max_gauss = max_gauss.max(
            gaussian_cancellation(&s, &tensor)
                .map_err(|e| CliError::Numerical(e.to_string()))?
                .abs(),
        );
        max_mixed = max_mixed.max(
            mixed_cancellation(&s, &tensor)
                .map_err(|e| CliError::Numerical(e.to_string()))?
                .abs(),
        );
    }
    let passed = max_gauss < 1e-9 && max_mixed < 1e-9;
    Ok((
        passed,
        json!({ "max_triple_gaussian": max_gauss, "max_mixed": max_mixed, "samples": 100 }),
    ))
}

fn vortex_err(e: VortexError) -> CliError {
    CliError::Numerical(e.to_string())
}

fn reference_states() -> Vec<(String, VortexState)> {
    let gammas = vec![1.0, -0.8, 1.2, 0.9, -1.1];
    let torus_state = VortexState::new(
        vec![
            Vec2::new(1.0, 1.0),
            Vec2::new(4.0, 1.5),
            Vec2::new(2.5, 3.5),
            Vec2::new(5.5, 4.5),
            Vec2::new(1.5, 5.0),
        ],
        gammas.clone(),
        torus(),
        0.0,
    )
    .expect("valid state");
    let disk_state = VortexState::new(
        vec![
            Vec2::new(0.3, 0.0),
            Vec2::new(-0.35, 0.15),
            Vec2::new(0.0, 0.45),
            Vec2::new(0.15, -0.4),
            Vec2::new(-0.1, -0.12),
        ],
        gammas,
        Domain::unit_disk(),
        0.0,
    )
    .expect("valid state");
    vec![("torus".into(), torus_state), ("disk".into(), disk_state)]
}

/// Advect a passive tracer through the frozen dense-output velocity field
/// and return the flow-map Jacobian determinant.
///
/// The determinant is composed over short time segments via the chain rule:
/// det DΦ₀^T = Π_i det DΦ_{t_i}^{t_{i+1}}(z_i) with z_i the tracer path.
/// Central differences of the full-time map would be swamped by its
/// exponentially grown derivatives; each short-segment map stays
/// well-conditioned for finite differencing.
fn tracer_jacobian(traj: &Trajectory, x0: Vec2, t_final: f64) -> Result<f64, CliError> {
    let domain = traj.initial().domain;
    let gammas = traj.initial().intensities.clone();
    let advect = |start: Vec2, t0: f64, t1: f64| -> Result<Vec2, CliError> {
        let f = |t: f64, y: &[f64]| -> Result<Vec<f64>, VortexError> {
            let x = Vec2::new(y[0], y[1]);
            let ps = traj.positions_at(t)?;
            let mut v = Vec2::ZERO;
            for (p, g) in ps.iter().zip(&gammas) {
                v += domain
                    .biot_savart(domain.wrap(x), domain.wrap(*p))
                    .map_err(|_| VortexError::CoincidentPoints)?
                    * *g;
            }
            Ok(vec![v.x, v.y])
        };
        let sol = euler_crm::vortex::dopri5::dopri5(f, t0, &[start.x, start.y], t1, 1e-12)
            .map_err(vortex_err)?;
        Ok(Vec2::new(sol.y[0], sol.y[1]))
    };
    let h = 1e-5;
    let segments = 20;
    let dt = t_final / segments as f64;
    let mut det = 1.0;
    let mut z = x0;
    for i in 0..segments {
        let (t0, t1) = (i as f64 * dt, (i + 1) as f64 * dt);
        let px =
            (advect(z + Vec2::new(h, 0.0), t0, t1)? - advect(z - Vec2::new(h, 0.0), t0, t1)?)
                / (2.0 * h);
        let py =
            (advect(z + Vec2::new(0.0, h), t0, t1)? - advect(z - Vec2::new(0.0, h), t0, t1)?)
                / (2.0 * h);
        det *= px.x * py.y - px.y * py.x;
        z = advect(z, t0, t1)?;
    }
    Ok(det)
}

fn criterion_9(
    out_trajectories: &mut Vec<(String, Trajectory)>,
) -> Result<(bool, Value), CliError> {
    let t_final = 10.0;
    let tol = 1e-10;
    let mut passed = true;
    let mut details = Vec::new();
    for (name, state) in reference_states() {
        let fwd = integrate(&state, t_final, tol).map_err(vortex_err)?;
        let h0 = hamiltonian(&state).map_err(vortex_err)?;
        let h1 = hamiltonian(fwd.last()).map_err(vortex_err)?;
        let drift = (h1 - h0).abs() / h0.abs().max(1.0);
        let back = integrate(fwd.last(), 0.0, tol).map_err(vortex_err)?;
        let reversal = back
            .last()
            .positions
            .iter()
            .zip(&state.positions)
            .map(|(p, q)| state.domain.distance(*p, *q))
            .fold(0.0f64, f64::max);
        let x0 = match name.as_str() {
            "torus" => Vec2::new(2.0, 2.8),
            _ => Vec2::new(0.5, 0.2),
        };
        let det = tracer_jacobian(&fwd, x0, t_final)?;
        let ok = drift < 1e-6 && reversal < 1e-7 && (det - 1.0).abs() < 1e-4;
        passed &= ok;
        details.push(json!({
            "domain": name,
            "energy_relative_drift": drift,
            "reversal_error": reversal,
            "jacobian_det": det,
            "steps": fwd.steps,
        }));
        out_trajectories.push((name, fwd));
    }
    Ok((passed, json!({ "t_final": t_final, "tol": tol, "cases": details })))
}

fn criterion_10(trajectories: &[(String, Trajectory)]) -> Result<(bool, Value), CliError> {
    if trajectories.is_empty() {
        return Err(CliError::Numerical("criterion 9 produced no trajectories".into()));
    }
    let pairs = [(0.0, 2.0), (2.0, 5.0), (5.0, 10.0), (0.0, 10.0), (3.0, 7.0)];
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for (name, traj) in trajectories {
        let phis: Vec<TestFunction> = match name.as_str() {
            "torus" => vec![mode((1, 0)), mode((0, 1)), mode((1, 1))],
            _ => disk_bumps(),
        };
        let mut domain_worst = 0.0f64;
        for phi in &phis {
            for &(s, t) in &pairs {
                let r = weak_residual(traj, phi, s, t).map_err(vortex_err)?;
                domain_worst = domain_worst.max(r);
            }
        }
        worst = worst.max(domain_worst);
        details.push(json!({ "domain": name, "max_residual": domain_worst }));
    }
    Ok((worst < 1e-6, json!({ "max_residual": worst, "cases": details })))
}

fn criterion_11(seed: u64, scale: f64) -> Result<(bool, Value), CliError> {
    let n = scaled(10_000, scale, 1_000);
    let triple = CRMTriple::new(
        0.0,
        0.0,
        Some(JumpLawSpec::TwoBand { c: 3.0, inner: 0.5, outer: 1.5 }),
        torus(),
    );
    let obs = CylinderObservable::new(
        vec![mode((1, 0))],
        OuterFn::ExpTrig { freq: vec![1.0] },
    )
    .expect("observable");
    let report = flow_invariance_test(&triple, &obs, 1.0, n, seed)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let exclusion_ok = (report.excluded as f64) < 0.001 * (report.total as f64).max(1.0);
    let passed = report.cf_distance.passed() && exclusion_ok;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    strip_workers(&mut value);
    Ok((passed, json!({ "n": n, "report": value })))
}

fn criterion_12(seed: u64, scale: f64) -> Result<(bool, Value), CliError> {
    let n = scaled(100_000, scale, 10_000);
    let triple = CRMTriple::new(0.5, 0.3, Some(nu_two_band()), torus());
    let a = SetSpec::rect([0.5, 0.5], [2.5, 2.5]);
    let b = SetSpec::rect([3.0, 3.0], [5.0, 5.0]);
    let to_err = |e: euler_crm::crm::CRMError| CliError::Numerical(e.to_string());
    let disjoint = euler_crm::crm::hypothesis_tests(&triple, &a, &b, n, seed).map_err(to_err)?;
    let equal = euler_crm::crm::hypothesis_tests(&triple, &a, &a, n, seed ^ 0xc).map_err(to_err)?;
    let report_ok = |r: &euler_crm::crm::HypothesisReport| {
        r.covariance.passed()
            && r.cf_factorization.as_ref().map_or(true, MCReport::passed)
            && r.stationarity.passed()
    };
    let passed = report_ok(&disjoint) && report_ok(&equal);
    let mut dv = serde_json::to_value(&disjoint).expect("report serializes");
    let mut ev = serde_json::to_value(&equal).expect("report serializes");
    strip_workers(&mut dv);
    strip_workers(&mut ev);
    Ok((passed, json!({ "n": n, "disjoint": dv, "equal": ev })))
}

/// Canonical bytes used for the reproducibility comparison.
pub fn suite_bytes(results: &SuiteResults) -> String {
    serde_json::to_string(results).expect("results serialize")
}

/// Run criteria 1–12 on an 8-worker pool, optionally re-run them on a
/// 1-worker pool, and require byte-identical serialized results
/// (criterion 13).
pub fn run_acceptance(seed: u64, check_reproducibility: bool) -> AcceptanceOutcome {
    run_acceptance_scaled(seed, check_reproducibility, 1.0)
}

pub fn run_acceptance_scaled(
    seed: u64,
    check_reproducibility: bool,
    scale: f64,
) -> AcceptanceOutcome {
    let pool8 = rayon::ThreadPoolBuilder::new().num_threads(8).build().expect("worker pool");
    let results = pool8.install(|| run_suite(seed, scale));
    let reproducible = if check_reproducibility {
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("worker pool");
        let second = pool1.install(|| run_suite(seed, scale));
        let identical = suite_bytes(&results) == suite_bytes(&second);
        if !identical {
            for (a, b) in results.criteria.iter().zip(&second.criteria) {
                if serde_json::to_string(&a.details).unwrap()
                    != serde_json::to_string(&b.details).unwrap()
                {
                    eprintln!("[accept] criterion {} differs across worker pools", a.id);
                }
            }
        }
        Some(identical)
    } else {
        None
    };
    let mut lines = Vec::new();
    let mut all_passed = true;
    for c in &results.criteria {
        all_passed &= c.verdict == "pass";
        lines.push(format!("criterion {:2}: {} — {}", c.id, c.verdict.to_uppercase(), c.name));
    }
    if let Some(ok) = reproducible {
        all_passed &= ok;
        lines.push(format!(
            "criterion 13: {} — byte-identical results across worker pools {{1, 8}}",
            if ok { "PASS" } else { "FAIL" }
        ));
    }
    AcceptanceOutcome { results, reproducible, lines, all_passed }
}

/// Artifacts for the `accept` subcommand.
pub fn run_accept_artifacts(seed: u64, reproducibility: bool) -> Artifacts {
    let outcome = run_acceptance(seed, reproducibility);
    for line in &outcome.lines {
        println!("{line}");
    }
    let mut csv = Csv::new("criterion,name,verdict");
    for c in &outcome.results.criteria {
        csv.push(&[c.id.to_string(), c.name.clone(), c.verdict.clone()]);
    }
    if let Some(ok) = outcome.reproducible {
        csv.push(&[
            "13".into(),
            "byte-identical across worker pools".into(),
            if ok { "pass" } else { "fail" }.into(),
        ]);
    }
    let mut results = serde_json::to_value(&outcome.results).expect("results serialize");
    strip_workers(&mut results);
    Artifacts {
        results: json!({
            "criteria": results["criteria"],
            "reproducible": outcome.reproducible,
        }),
        csv,
        summary: format!(
            "accept: {} criteria, {}",
            outcome.lines.len(),
            if outcome.all_passed { "all pass" } else { "FAILURES present" }
        ),
        passed: outcome.all_passed,
    }
}
