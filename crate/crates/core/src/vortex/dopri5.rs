//! Dormand–Prince RK5(4) with step-size control and order-4 dense output.
//!
//! Generic over a flat state vector; the right-hand side may fail (e.g. on
//! near-collapse), which aborts the integration with that error.

use crate::vortex::state::DenseSegment;

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// b − b̂: difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output weights for the fifth interpolation coefficient.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug)]
pub struct Dopri5Output {
    pub t: f64,
    pub y: Vec<f64>,
    /// (end time, state) after each accepted step.
    pub accepted: Vec<(f64, Vec<f64>)>,
    pub segments: Vec<DenseSegment>,
    pub steps: usize,
    pub rejected: usize,
}

/// Integrate y' = f(t, y) from (t0, y0) to t_final with local error `tol`
/// (used as both absolute and relative tolerance). Supports backward
/// integration (t_final < t0).
pub fn dopri5<E2>(
    f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, E2>,
    t0: f64,
    y0: &[f64],
    t_final: f64,
    tol: f64,
) -> Result<Dopri5Output, E2> {
    dopri5_with(f, t0, y0, t_final, tol, true)
}

/// As [`dopri5`], but with dense output and the per-step state log optional.
/// Endpoint-only integrations of stiff trajectories (tight vortex pairs can
/// take 10⁵+ steps) should pass `dense = false` to avoid storing an
/// interpolant per step.
pub fn dopri5_with<E2>(
    mut f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, E2>,
    t0: f64,
    y0: &[f64],
    t_final: f64,
    tol: f64,
    dense: bool,
) -> Result<Dopri5Output, E2> {
    let n = y0.len();
    let mut out = Dopri5Output {
        t: t0,
        y: y0.to_vec(),
        accepted: Vec::new(),
        segments: Vec::new(),
        steps: 0,
        rejected: 0,
    };
    let span = t_final - t0;
    if span == 0.0 || n == 0 {
        return Ok(out);
    }
    let dir = span.signum();
    let mut k1 = f(t0, y0)?;
    // conservative initial step from the first derivative scale
    let f_norm = k1.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-10);
    let mut h = dir * (0.01 * (1.0 + out.y.iter().map(|v| v * v).sum::<f64>().sqrt()) / f_norm)
        .min(0.1 * span.abs());
    let mut k = vec![vec![0.0; n]; 7];

    loop {
        if (out.t + h - t_final) * dir > 0.0 {
            h = t_final - out.t;
        }
        k[0].clone_from_slice(&k1);
        let mut ok = true;
        for s in 0..6 {
            let mut ys = out.y.clone();
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..n {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            match f(out.t + C[s] * h, &ys) {
                Ok(v) => k[s + 1] = v,
                Err(e) => {
                    // a failing stage inside a large trial step may be a
                    // step-size artifact; retry smaller before giving up
                    if h.abs() > 1e-12 * (1.0 + out.t.abs()) {
                        ok = false;
                        break;
                    }
                    return Err(e);
                }
            }
        }
        if !ok {
            h *= 0.25;
            out.rejected += 1;
            continue;
        }
        // 5th-order solution is the last stage's argument (FSAL): y1 = ys at s=6
        let mut y1 = out.y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[5][j];
            if b != 0.0 {
                for i in 0..n {
                    y1[i] += h * b * kj[i];
                }
            }
        }
        let mut err = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum();
            let scale = tol + tol * out.y[i].abs().max(y1[i].abs());
            let r = h * e / scale;
            err += r * r;
        }
        err = (err / n as f64).sqrt();
        if err <= 1.0 {
            if dense {
                // accepted: build the dense-output interpolant
                let mut cont = [
                    out.y.clone(),
                    vec![0.0; n],
                    vec![0.0; n],
                    vec![0.0; n],
                    vec![0.0; n],
                ];
                for i in 0..n {
                    let ydiff = y1[i] - out.y[i];
                    let bspl = h * k[0][i] - ydiff;
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k[6][i] - bspl;
                    cont[4][i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
                }
                out.segments.push(DenseSegment { t0: out.t, h, cont });
            }
            out.t += h;
            out.y = y1;
            out.steps += 1;
            if dense {
                out.accepted.push((out.t, out.y.clone()));
            }
            k1.clone_from_slice(&k[6]);
            if (out.t - t_final) * dir >= 0.0 {
                return Ok(out);
            }
        } else {
            out.rejected += 1;
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        h *= factor;
        if h.abs() < 1e-14 * (1.0 + out.t.abs()) {
            // step size underflow: surface as a right-hand-side failure
            return f(out.t, &out.y).map(|_| out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_accuracy_and_dense_output() {
        let f = |_t: f64, y: &[f64]| -> Result<Vec<f64>, ()> { Ok(vec![y[1], -y[0]]) };
        let t_final = 10.0;
        let sol = dopri5(f, 0.0, &[1.0, 0.0], t_final, 1e-10).unwrap();
        assert!((sol.y[0] - t_final.cos()).abs() < 1e-8);
        assert!((sol.y[1] + t_final.sin()).abs() < 1e-8);
        // dense output at arbitrary interior times
        for &t in &[0.37, 2.0, 5.5, 9.99] {
            let seg = sol
                .segments
                .iter()
                .find(|s| t >= s.t0 && t <= s.t0 + s.h)
                .unwrap();
            let y = seg.eval(t);
            assert!((y[0] - t.cos()).abs() < 1e-7, "dense output at {t}");
        }
    }

    #[test]
    fn backward_integration() {
        let f = |t: f64, _y: &[f64]| -> Result<Vec<f64>, ()> { Ok(vec![t.exp()]) };
        let sol = dopri5(f, 0.0, &[1.0], -2.0, 1e-10).unwrap();
        assert!((sol.y[0] - (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rhs_error_propagates() {
        let f = |t: f64, _y: &[f64]| -> Result<Vec<f64>, &'static str> {
            if t > 1.0 {
                Err("blew up")
            } else {
                Ok(vec![1.0])
            }
        };
        assert_eq!(dopri5(f, 0.0, &[0.0], 2.0, 1e-8).unwrap_err(), "blew up");
    }
}
