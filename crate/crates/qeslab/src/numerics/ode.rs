//! Adaptive Dormand-Prince 5(4) Runge-Kutta over complex-valued states,
//! with the standard PI step-size controller and FSAL reuse.

use num_complex::Complex64;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (step {h:e})")]
    StepUnderflow { t: f64, h: f64, state: Vec<Complex64> },
    #[error("step budget {max_steps} exhausted at t = {t}")]
    MaxSteps { t: f64, max_steps: usize },
    #[error("derivative is not finite at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Initial step magnitude; chosen automatically when `None`.
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 50_000_000,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub state: Vec<Complex64>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// States at the requested checkpoints (empty unless the path variant
    /// was used).
    pub checkpoints: Vec<(f64, Vec<Complex64>)>,
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order weights equal the last row of A (FSAL); the error weights are
// b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn scaled_error_norm(
    y: &[Complex64],
    y_new: &[Complex64],
    err: &[Complex64],
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        let scale = abs_tol + rel_tol * y[i].norm().max(y_new[i].norm());
        let e = err[i].norm() / scale;
        acc += e * e;
    }
    (acc / y.len() as f64).sqrt()
}

/// Integrate dy/dt = f(t, y) from `t0` to `t1` (either direction).
pub fn integrate_ode<F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: &[Complex64],
    options: &OdeOptions,
) -> Result<OdeSolution, OdeError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    integrate_ode_path(f, t0, t1, y0, &[], options)
}

/// Like [`integrate_ode`], additionally recording the state at each of
/// `checkpoints` (which must lie between `t0` and `t1`, sorted along the
/// direction of integration).
pub fn integrate_ode_path<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: &[Complex64],
    checkpoints: &[f64],
    options: &OdeOptions,
) -> Result<OdeSolution, OdeError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut recorded = Vec::with_capacity(checkpoints.len());
    if span == 0.0 {
        return Ok(OdeSolution {
            state: y0.to_vec(),
            steps_accepted: 0,
            steps_rejected: 0,
            checkpoints: checkpoints.iter().map(|&t| (t, y0.to_vec())).collect(),
        });
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut y_stage = vec![Complex64::new(0.0, 0.0); n];
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];
    let mut err = vec![Complex64::new(0.0, 0.0); n];

    f(t, &y, &mut k[0]);
    if k[0].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(OdeError::NonFinite { t });
    }

    let mut h = options.initial_step.unwrap_or_else(|| {
        let d0 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let d1 = k[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let guess = if d0 > 1e-10 && d1 > 1e-10 {
            0.01 * d0 / d1
        } else {
            1e-6 * span
        };
        guess.min(0.1 * span)
    });
    h = h.abs().max(1e-300);

    let mut next_checkpoint = 0usize;
    let mut err_old: f64 = 1e-4;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut nsteps = 0usize;

    while (t1 - t) * dir > 0.0 {
        nsteps += 1;
        if nsteps > options.max_steps {
            return Err(OdeError::MaxSteps {
                t,
                max_steps: options.max_steps,
            });
        }
        let remaining = (t1 - t).abs();
        if h > remaining {
            h = remaining;
        }
        let hs = h * dir;

        for s in 1..7 {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s - 1][j.min(5)];
                    if a != 0.0 {
                        acc += kj[i].scale(a);
                    }
                }
                y_stage[i] = y[i] + acc.scale(hs);
            }
            let ts = t + C[s - 1] * hs;
            if s == 6 {
                y_new.copy_from_slice(&y_stage);
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(ts, &y_stage, &mut tail[0]);
        }
        if k[6].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(OdeError::NonFinite { t: t + hs });
        }

        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    acc += kj[i].scale(E[j]);
                }
            }
            err[i] = acc.scale(hs);
        }
        let err_norm =
            scaled_error_norm(&y, &y_new, &err, options.abs_tol, options.rel_tol).max(1e-300);

        if err_norm <= 1.0 {
            // Accept; record any checkpoints inside the step by dense-free
            // re-integration (checkpoints are forced to be step boundaries).
            t += hs;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6); // FSAL
            accepted += 1;

            while next_checkpoint < checkpoints.len()
                && (checkpoints[next_checkpoint] - t) * dir <= 1e-14 * span
            {
                recorded.push((checkpoints[next_checkpoint], y.clone()));
                next_checkpoint += 1;
            }

            // PI controller (Gustafsson): beta = 0.4/5, alpha = 0.7/5.
            let factor = 0.9 * err_norm.powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0);
            let factor = factor.clamp(0.2, 5.0);
            err_old = err_norm;
            h *= factor;
        } else {
            rejected += 1;
            h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 1.0);
        }
        // Land exactly on the next checkpoint so its state is available.
        if next_checkpoint < checkpoints.len() {
            let to_cp = (checkpoints[next_checkpoint] - t).abs();
            if to_cp > 0.0 && h > to_cp {
                h = to_cp;
            }
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(OdeError::StepUnderflow { t, h, state: y });
        }
    }

    while next_checkpoint < checkpoints.len() {
        recorded.push((checkpoints[next_checkpoint], y.clone()));
        next_checkpoint += 1;
    }

    Ok(OdeSolution {
        state: y,
        steps_accepted: accepted,
        steps_rejected: rejected,
        checkpoints: recorded,
    })
}
