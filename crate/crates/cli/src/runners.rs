//! One runner per experiment kind: executes the manifest on the current
//! worker pool and returns deterministic artifacts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use euler_crm::crm::{
    cf_levy_khintchine, empirical_cf, hypothesis_tests, sample_crm, sample_measure_values,
    CRMTriple, PreparedSet, SetSpec,
};
use euler_crm::geometry::{row_integral, Domain, DomainKind, TestFunction, TestFunctionSpec, Vec2};
use euler_crm::invariance::{
    flow_invariance_test, mc_generator_mean_detailed, skew_symmetry_test_detailed,
    FLOW_CF_GRID,
};
use euler_crm::spectral::{basis, lemma41_check, TriadTable};
use euler_crm::stats::MCReport;
use euler_crm::stochint::{i2, moment_mc, MomentInput, MomentTarget};
use euler_crm::vortex::{
    hamiltonian_opts, integrate_opts, Trajectory, VortexError, VortexOptions, VortexState,
};

use crate::manifest::{ExperimentManifest, InitialCondition, KernelSpec, MomentCase};
use crate::report::{fmt, Artifacts, Csv};
use crate::CliError;

/// Spectral truncation for set-indexed Gaussian evaluation: |k|∞ ≤ 64 plus
/// the constant mode, matching the independence/stationarity tests.
pub const M_W_SET: usize = 129 * 129;

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

pub fn run(manifest: &ExperimentManifest) -> Result<Artifacts, CliError> {
    manifest.validate()?;
    match manifest {
        ExperimentManifest::Sample { triple, m_w, n, seed, kernel } => {
            run_sample(triple, *m_w, *n, *seed, kernel.as_ref())
        }
        ExperimentManifest::Moments { triple, m_w, n, seed, cases } => {
            run_moments(triple, *m_w, *n, *seed, cases)
        }
        ExperimentManifest::Cf { triple, set, n, seed, t_grid } => {
            run_cf(triple, set, *n, *seed, t_grid)
        }
        ExperimentManifest::Triads { domain, max_wavenumber, order } => {
            run_triads(*domain, *max_wavenumber, *order)
        }
        ExperimentManifest::Lemma41 { domain, max_wavenumber, order, points, seed } => {
            run_lemma41(*domain, *max_wavenumber, *order, *points, *seed)
        }
        ExperimentManifest::VortexSim { initial, t_final, tol, output_times, self_image, fast_kernel } => {
            run_vortex_sim(initial, *t_final, *tol, output_times, *self_image, *fast_kernel)
        }
        ExperimentManifest::WeakResidual { initial, t_final, tol, phis, pairs, residual_tol } => {
            run_weak_residual(initial, *t_final, *tol, phis, pairs, *residual_tol)
        }
        ExperimentManifest::InvarianceTest { triple, observable, n, seed } => {
            let obs = observable
                .build(triple.domain)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let (report, batch_means) =
                mc_generator_mean_detailed(triple, &obs, *n, *seed).map_err(numerical)?;
            Ok(mc_artifacts("generator_mean", &report, &batch_means))
        }
        ExperimentManifest::SkewTest { triple, f, g, n, seed } => {
            let fo = f.build(triple.domain).map_err(|e| CliError::Config(e.to_string()))?;
            let go = g.build(triple.domain).map_err(|e| CliError::Config(e.to_string()))?;
            let (report, batch_means) =
                skew_symmetry_test_detailed(&fo, &go, triple, *n, *seed).map_err(numerical)?;
            Ok(mc_artifacts("skew_symmetry", &report, &batch_means))
        }
        ExperimentManifest::FlowInvariance { triple, observable, t, n, seed } => {
            run_flow_invariance(triple, observable, *t, *n, *seed)
        }
        ExperimentManifest::HypothesisTest { triple, set_a, set_b, n, seed } => {
            run_hypothesis(triple, set_a, set_b, *n, *seed)
        }
        ExperimentManifest::Accept { seed, reproducibility } => {
            Ok(crate::accept::run_accept_artifacts(*seed, *reproducibility))
        }
    }
}

fn run_sample(
    triple: &CRMTriple,
    m_w: usize,
    n: usize,
    seed: u64,
    kernel: Option<&KernelSpec>,
) -> Result<Artifacts, CliError> {
    let built = kernel.map(|k| k.build(triple.domain)).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = match built {
        Some(_) => Csv::new(
            "sample_id,deterministic,gaussian1,poisson1,gaussian2,mixed,poisson2,deterministic2,cross1,total",
        ),
        None => Csv::new("sample_id,x,y,gamma"),
    };
    let mut coeffs: Vec<Vec<f64>> = Vec::new();
    let mut atom_count = 0usize;
    for id in 0..n {
        let s = sample_crm(triple, m_w, &mut rng).map_err(numerical)?;
        atom_count += s.atoms.len();
        match &built {
            Some(h) => {
                let d = i2(&s, h).map_err(|e| CliError::Config(e.to_string()))?;
                csv.push(&[
                    id.to_string(),
                    fmt(d.deterministic),
                    fmt(d.gaussian1),
                    fmt(d.poisson1),
                    fmt(d.gaussian2),
                    fmt(d.mixed),
                    fmt(d.poisson2),
                    fmt(d.deterministic2),
                    fmt(d.cross1),
                    fmt(d.total),
                ]);
            }
            None => {
                for &(p, g) in &s.atoms {
                    csv.push(&[id.to_string(), fmt(p.x), fmt(p.y), fmt(g)]);
                }
            }
        }
        coeffs.push(s.gaussian_coeffs.clone());
    }
    let results = json!({
        "n": n,
        "m_w": m_w,
        "mean_atoms": atom_count as f64 / n as f64,
        "gaussian_coeffs": coeffs,
    });
    Ok(Artifacts {
        results,
        csv,
        summary: format!("sample: {n} draws, {:.1} atoms/draw", atom_count as f64 / n as f64),
        passed: true,
    })
}

/// ‖f‖² over the domain (torus modes are unit-normalized by construction).
fn function_norm_sq(f: &TestFunction) -> f64 {
    match f.spec {
        TestFunctionSpec::TorusMode { .. } => 1.0,
        _ => euler_crm::geometry::integrate_to_tol(&f.domain, |p| f.eval(p) * f.eval(p), 64, 1e-10),
    }
}

pub fn run_moment_case(
    triple: &CRMTriple,
    case: &MomentCase,
    m_w: usize,
    n: usize,
    seed: u64,
) -> Result<MCReport, CliError> {
    match (&case.function, &case.kernel) {
        (Some(spec), None) => {
            let f = spec
                .clone()
                .with_domain(triple.domain)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let norm_sq = function_norm_sq(&f);
            moment_mc(case.target, triple, &MomentInput::Function(&f), norm_sq, m_w, n, seed)
                .map_err(numerical)
        }
        (None, Some(spec)) => {
            let h = spec.build(triple.domain)?;
            let norm_sq = h.l2_norm_sq_sym(64);
            moment_mc(case.target, triple, &MomentInput::Kernel(&h), norm_sq, m_w, n, seed)
                .map_err(numerical)
        }
        _ => Err(CliError::Config("exactly one of function/kernel per case".into())),
    }
}

fn target_name(t: MomentTarget) -> String {
    serde_json::to_value(t)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{t:?}"))
}

fn run_moments(
    triple: &CRMTriple,
    m_w: usize,
    n: usize,
    seed: u64,
    cases: &[MomentCase],
) -> Result<Artifacts, CliError> {
    let mut csv = Csv::new("case,target,estimate,stderr,n,z_score,verdict");
    let mut reports = Vec::new();
    let mut passed = true;
    for (i, case) in cases.iter().enumerate() {
        let r = run_moment_case(triple, case, m_w, n, seed)?;
        passed &= r.passed();
        csv.push(&[
            i.to_string(),
            target_name(case.target),
            fmt(r.estimate.re),
            fmt(r.stderr),
            r.n.to_string(),
            fmt(r.z_score),
            format!("{:?}", r.verdict).to_lowercase(),
        ]);
        reports.push(serde_json::to_value(&r).expect("report serializes"));
    }
    let worst = reports
        .iter()
        .filter_map(|r| r["z_score"].as_f64())
        .fold(0.0f64, f64::max);
    Ok(Artifacts {
        results: json!({ "cases": reports }),
        csv,
        summary: format!(
            "moments: {} cases, worst z = {worst:.2} — {}",
            cases.len(),
            if passed { "pass" } else { "FAIL" }
        ),
        passed,
    })
}

/// Shared by the cf subcommand and the acceptance suite: empirical vs
/// Lévy–Khintchine CF of M(A) on a t-grid. Returns (per-point diffs, band).
pub fn cf_comparison(
    triple: &CRMTriple,
    set: &SetSpec,
    n: usize,
    seed: u64,
    t_grid: &[f64],
) -> Result<(Vec<(f64, Complex64, Complex64, f64)>, f64), CliError> {
    let m_w = if triple.q > 0.0 { M_W_SET } else { 0 };
    let prepared =
        PreparedSet::new(&triple.domain, set, m_w).map_err(|e| CliError::Config(e.to_string()))?;
    let values = sample_measure_values(triple, std::slice::from_ref(&prepared), m_w, n, seed)
        .map_err(numerical)?
        .pop()
        .expect("one column per set");
    let band = 6.0 / (n as f64).sqrt();
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (emp, _) = empirical_cf(&values, t).map_err(numerical)?;
        let lk = cf_levy_khintchine(triple, set.measure(), t).map_err(numerical)?;
        rows.push((t, emp, lk, (emp - lk).norm()));
    }
    Ok((rows, band))
}

fn run_cf(
    triple: &CRMTriple,
    set: &SetSpec,
    n: usize,
    seed: u64,
    t_grid: &[f64],
) -> Result<Artifacts, CliError> {
    let (rows, band) = cf_comparison(triple, set, n, seed, t_grid)?;
    let mut csv = Csv::new("t,emp_re,emp_im,lk_re,lk_im,abs_diff");
    let mut sup = 0.0f64;
    for &(t, emp, lk, diff) in &rows {
        sup = sup.max(diff);
        csv.push(&[fmt(t), fmt(emp.re), fmt(emp.im), fmt(lk.re), fmt(lk.im), fmt(diff)]);
    }
    let passed = sup < band;
    Ok(Artifacts {
        results: json!({ "sup_diff": sup, "band": band, "n": n, "grid_points": t_grid.len() }),
        csv,
        summary: format!(
            "cf: sup|φ_emp − φ_LK| = {sup:.3e} vs band {band:.3e} — {}",
            if passed { "pass" } else { "FAIL" }
        ),
        passed,
    })
}

/// Invariant extremes of a triad table pair; shared with the acceptance
/// suite.
pub struct TriadChecks {
    pub max_coincident: f64,
    pub max_first_two_asym: f64,
    pub max_cyclic: f64,
    pub max_quad_diff: f64,
}

pub fn triad_checks(closed: &TriadTable, quad: &TriadTable) -> TriadChecks {
    let n = closed.len();
    let mut c = TriadChecks {
        max_coincident: 0.0,
        max_first_two_asym: 0.0,
        max_cyclic: 0.0,
        max_quad_diff: 0.0,
    };
    for h in 0..n {
        for k in 0..n {
            for l in 0..n {
                let v = closed.get(h, k, l);
                if h == k || k == l || h == l {
                    c.max_coincident = c.max_coincident.max(v.abs());
                }
                c.max_first_two_asym =
                    c.max_first_two_asym.max((v - closed.get(k, h, l)).abs());
                let cyc_left = v + closed.get(l, h, k) + closed.get(k, l, h);
                let cyc_right =
                    closed.get(h, l, k) + closed.get(k, h, l) + closed.get(l, k, h);
                c.max_cyclic = c.max_cyclic.max(cyc_left.abs()).max(cyc_right.abs());
                c.max_quad_diff = c.max_quad_diff.max((v - quad.get(h, k, l)).abs());
            }
        }
    }
    c
}

fn phase_tag(p: euler_crm::geometry::Phase) -> &'static str {
    match p {
        euler_crm::geometry::Phase::Cos => "cos",
        euler_crm::geometry::Phase::Sin => "sin",
    }
}

fn run_triads(domain: Domain, max_wavenumber: i32, order: usize) -> Result<Artifacts, CliError> {
    let modes = basis(domain, max_wavenumber);
    let closed = TriadTable::build_closed_form(modes.clone());
    let quad = TriadTable::build_quadrature(modes.clone(), order);
    let checks = triad_checks(&closed, &quad);
    let mut csv = Csv::new(
        "h_kx,h_ky,h_phase,k_kx,k_ky,k_phase,l_kx,l_ky,l_phase,c_closed,c_quad,abs_diff",
    );
    let n = modes.len();
    for h in 0..n {
        for k in 0..n {
            for l in 0..n {
                let cv = closed.get(h, k, l);
                let qv = quad.get(h, k, l);
                csv.push(&[
                    modes[h].k.0.to_string(),
                    modes[h].k.1.to_string(),
                    phase_tag(modes[h].phase).into(),
                    modes[k].k.0.to_string(),
                    modes[k].k.1.to_string(),
                    phase_tag(modes[k].phase).into(),
                    modes[l].k.0.to_string(),
                    modes[l].k.1.to_string(),
                    phase_tag(modes[l].phase).into(),
                    fmt(cv),
                    fmt(qv),
                    fmt((cv - qv).abs()),
                ]);
            }
        }
    }
    let passed = checks.max_coincident < 1e-12
        && checks.max_first_two_asym < 1e-12
        && checks.max_cyclic < 1e-10
        && checks.max_quad_diff < 1e-8;
    Ok(Artifacts {
        results: json!({
            "modes": n,
            "order": order,
            "max_coincident": checks.max_coincident,
            "max_first_two_asym": checks.max_first_two_asym,
            "max_cyclic_sum": checks.max_cyclic,
            "max_quad_diff": checks.max_quad_diff,
        }),
        csv,
        summary: format!(
            "triads: {n} modes, max cyclic {:.2e}, closed-vs-quad {:.2e} — {}",
            checks.max_cyclic,
            checks.max_quad_diff,
            if passed { "pass" } else { "FAIL" }
        ),
        passed,
    })
}

/// Random interior evaluation points for the row-integral residuals.
pub fn random_points(domain: &Domain, count: usize, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| match domain.kind {
            DomainKind::Torus { l } => Vec2::new(rng.gen::<f64>() * l, rng.gen::<f64>() * l),
            DomainKind::UnitDisk => {
                let r = 0.9 * rng.gen::<f64>().sqrt();
                let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                Vec2::new(r * th.cos(), r * th.sin())
            }
        })
        .collect()
}

/// Compactly supported disk bumps used when the manifest domain is the disk.
pub fn disk_bumps() -> Vec<TestFunction> {
    [
        ((0.0, 0.0), 0.6, 1.0),
        ((0.35, 0.2), 0.4, 0.8),
        ((-0.3, -0.25), 0.35, 1.2),
    ]
    .iter()
    .map(|&((cx, cy), r, a)| TestFunction::disk_bump(Vec2::new(cx, cy), r, a))
    .collect()
}

fn run_lemma41(
    domain: Domain,
    max_wavenumber: i32,
    order: usize,
    points: usize,
    seed: u64,
) -> Result<Artifacts, CliError> {
    let ys = random_points(&domain, points, seed);
    let mut csv = Csv::new("check,id,y_x,y_y,residual");
    let mut max_diag = 0.0f64;
    let mut max_row = 0.0f64;
    match domain.kind {
        DomainKind::Torus { .. } => {
            let modes = basis(domain, max_wavenumber);
            for (mi, mode) in modes.iter().enumerate() {
                for &y in &ys {
                    let diag = lemma41_check(mode, y, order).abs();
                    let row = row_integral(&mode.func, y, order).abs();
                    max_diag = max_diag.max(diag);
                    max_row = max_row.max(row);
                    csv.push(&["diagonal".into(), mi.to_string(), fmt(y.x), fmt(y.y), fmt(diag)]);
                    csv.push(&["row".into(), mi.to_string(), fmt(y.x), fmt(y.y), fmt(row)]);
                }
            }
        }
        DomainKind::UnitDisk => {
            for (bi, bump) in disk_bumps().iter().enumerate() {
                for &y in &ys {
                    let row = row_integral(bump, y, order).abs();
                    max_row = max_row.max(row);
                    csv.push(&["row".into(), bi.to_string(), fmt(y.x), fmt(y.y), fmt(row)]);
                }
            }
        }
    }
    let passed = max_diag < 1e-8 && max_row < 1e-8;
    Ok(Artifacts {
        results: json!({
            "max_diagonal_residual": max_diag,
            "max_row_residual": max_row,
            "points": points,
            "order": order,
        }),
        csv,
        summary: format!(
            "lemma41: max residuals diag {max_diag:.2e}, row {max_row:.2e} — {}",
            if passed { "pass" } else { "FAIL" }
        ),
        passed,
    })
}

/// Resolve an initial condition to a vortex state.
pub fn build_initial(initial: &InitialCondition) -> Result<VortexState, CliError> {
    match initial {
        InitialCondition::State { state } => VortexState::new(
            state.positions.clone(),
            state.intensities.clone(),
            state.domain,
            state.time,
        )
        .map_err(|e| CliError::Config(e.to_string())),
        InitialCondition::Triple { triple, seed } => {
            if triple.q != 0.0 || triple.a != 0.0 || triple.nu.is_none() {
                return Err(CliError::Config(
                    "vortex initial data from a triple needs a pure-atom triple".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let s = sample_crm(triple, 0, &mut rng).map_err(numerical)?;
            if s.atoms.len() < 2 {
                return Err(CliError::Numerical(format!(
                    "drew {} atoms; need at least 2 vortices",
                    s.atoms.len()
                )));
            }
            let (positions, intensities) = s.atoms.iter().copied().unzip();
            VortexState::new(positions, intensities, triple.domain, 0.0).map_err(numerical)
        }
    }
}

fn trajectory_artifacts(
    traj: &Trajectory,
    opts: &VortexOptions,
    output_times: &[f64],
) -> Result<Artifacts, CliError> {
    let n = traj.initial().positions.len();
    let mut header = String::from("time");
    for i in 0..n {
        header.push_str(&format!(",x_{i},y_{i}"));
    }
    let mut csv = Csv::new(&header);
    let times: Vec<f64> = if output_times.is_empty() {
        traj.states.iter().map(|(t, _)| *t).collect()
    } else {
        output_times.to_vec()
    };
    for &t in &times {
        let ps = traj.positions_at(t).map_err(numerical)?;
        let mut row = vec![fmt(t)];
        for p in ps {
            row.push(fmt(p.x));
            row.push(fmt(p.y));
        }
        csv.push(&row);
    }
    let h0 = hamiltonian_opts(traj.initial(), opts).map_err(numerical)?;
    let h1 = hamiltonian_opts(traj.last(), opts).map_err(numerical)?;
    let denom = h0.abs().max(1.0);
    let drift = (h1 - h0).abs() / denom;
    Ok(Artifacts {
        results: json!({
            "vortices": n,
            "t_span": traj.t_span(),
            "energy_initial": h0,
            "energy_final": h1,
            "energy_relative_drift": drift,
            "min_separation": traj.min_separation,
            "steps": traj.steps,
            "rejected_steps": traj.rejected,
        }),
        csv,
        summary: format!(
            "vortex-sim: {n} vortices, {} steps, energy drift {drift:.2e}",
            traj.steps
        ),
        passed: true,
    })
}

fn run_vortex_sim(
    initial: &InitialCondition,
    t_final: f64,
    tol: f64,
    output_times: &[f64],
    self_image: bool,
    fast_kernel: bool,
) -> Result<Artifacts, CliError> {
    let state = build_initial(initial)?;
    let opts = VortexOptions { self_image, fast_kernel, ..Default::default() };
    let traj = integrate_opts(&state, t_final, tol, &opts).map_err(numerical)?;
    trajectory_artifacts(&traj, &opts, output_times)
}

fn run_weak_residual(
    initial: &InitialCondition,
    t_final: f64,
    tol: f64,
    phis: &[TestFunctionSpec],
    pairs: &[(f64, f64)],
    residual_tol: f64,
) -> Result<Artifacts, CliError> {
    let state = build_initial(initial)?;
    let opts = VortexOptions::default();
    let traj = integrate_opts(&state, t_final, tol, &opts).map_err(numerical)?;
    let mut csv = Csv::new("phi,s,t,residual");
    let mut max_res = 0.0f64;
    for (pi, spec) in phis.iter().enumerate() {
        let phi = spec
            .clone()
            .with_domain(state.domain)
            .map_err(|e| CliError::Config(e.to_string()))?;
        for &(s, t) in pairs {
            let r = euler_crm::vortex::weak_residual(&traj, &phi, s, t).map_err(numerical)?;
            max_res = max_res.max(r);
            csv.push(&[pi.to_string(), fmt(s), fmt(t), fmt(r)]);
        }
    }
    let passed = max_res < residual_tol;
    Ok(Artifacts {
        results: json!({
            "max_residual": max_res,
            "residual_tol": residual_tol,
            "pairs": pairs.len(),
            "test_functions": phis.len(),
        }),
        csv,
        summary: format!(
            "weak-residual: max {max_res:.2e} vs tol {residual_tol:.0e} — {}",
            if passed { "pass" } else { "FAIL" }
        ),
        passed,
    })
}

fn mc_artifacts(name: &str, report: &MCReport, batch_means: &[Complex64]) -> Artifacts {
    let mut csv = Csv::new("batch,mean_re,mean_im");
    for (i, m) in batch_means.iter().enumerate() {
        csv.push(&[i.to_string(), fmt(m.re), fmt(m.im)]);
    }
    Artifacts {
        results: json!({ name: serde_json::to_value(report).expect("report serializes") }),
        csv,
        summary: format!(
            "{name}: estimate {:.3e}+{:.3e}i, z = {:.2} — {}",
            report.estimate.re,
            report.estimate.im,
            report.z_score,
            if report.passed() { "pass" } else { "FAIL" }
        ),
        passed: report.passed(),
    }
}

fn run_flow_invariance(
    triple: &CRMTriple,
    observable: &euler_crm::invariance::ObservableSpec,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<Artifacts, CliError> {
    let obs = observable.build(triple.domain).map_err(|e| CliError::Config(e.to_string()))?;
    let report = flow_invariance_test(triple, &obs, t, n, seed).map_err(numerical)?;
    let mut csv = Csv::new("grid_t,abs_cf_diff");
    for (g, d) in FLOW_CF_GRID.iter().zip(&report.grid_diffs) {
        csv.push(&[fmt(*g), fmt(*d)]);
    }
    let exclusion_ok = (report.excluded as f64) < 0.001 * report.total as f64;
    let passed = report.cf_distance.passed() && exclusion_ok;
    let summary = format!(
        "flow-invariance: worst CF diff {:.3e} (band {:.3e}), {} of {} excluded — {}",
        report.cf_distance.estimate.norm(),
        report.cf_distance.z_max * report.cf_distance.stderr,
        report.excluded,
        report.total,
        if passed { "pass" } else { "FAIL" }
    );
    Ok(Artifacts {
        results: serde_json::to_value(&report).expect("report serializes"),
        csv,
        summary,
        passed,
    })
}

fn run_hypothesis(
    triple: &CRMTriple,
    set_a: &SetSpec,
    set_b: &SetSpec,
    n: usize,
    seed: u64,
) -> Result<Artifacts, CliError> {
    let report = hypothesis_tests(triple, set_a, set_b, n, seed).map_err(|e| match e {
        euler_crm::crm::CRMError::OverlappingSets => CliError::Config(e.to_string()),
        other => numerical(other),
    })?;
    let mut csv = Csv::new("check,estimate_re,estimate_im,stderr,z_score,verdict");
    let mut push = |name: &str, r: &MCReport| {
        csv.push(&[
            name.into(),
            fmt(r.estimate.re),
            fmt(r.estimate.im),
            fmt(r.stderr),
            fmt(r.z_score),
            format!("{:?}", r.verdict).to_lowercase(),
        ]);
    };
    push("covariance", &report.covariance);
    if let Some(f) = &report.cf_factorization {
        push("cf_factorization", f);
    }
    push("stationarity", &report.stationarity);
    let passed = report.covariance.passed()
        && report.cf_factorization.as_ref().map_or(true, MCReport::passed)
        && report.stationarity.passed();
    Ok(Artifacts {
        results: serde_json::to_value(&report).expect("report serializes"),
        csv,
        summary: format!(
            "hypothesis-test: covariance z {:.2}, stationarity z {:.2} — {}",
            report.covariance.z_score,
            report.stationarity.z_score,
            if passed { "pass" } else { "FAIL" }
        ),
        passed,
    })
}

/// Map a vortex error to the CLI's numerical exit class (used by accept).
pub fn vortex_numerical(e: VortexError) -> CliError {
    CliError::Numerical(e.to_string())
}
