//! Evaluable wavefunctions assembled from the algebraic levels: traveling
//! total-transmission modes with their flux, even/odd zero-flux
//! combinations, norms, Wronskians, and the boundary-term cancellation
//! check behind self-adjointness on the restricted domain.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{quad_improper, DecayHint, QuadError, QuadratureResult};
use crate::qes_core::QesState;

/// Relative threshold below which a coefficient counts as zero.
const COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("mode carries no flux and cannot be flux-normalized")]
    ZeroFlux,
    #[error("coefficient {index} breaks the alternating i^k structure: {value}")]
    NonAlternating { index: usize, value: Complex64 },
    #[error("all coefficients vanish")]
    ZeroState,
    #[error("asymptotic regime not reached at X = {x}: refinement moved the value by {disagreement:e}")]
    AsymptoticsNotReached { x: f64, disagreement: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError<f64>),
}

/// Anything evaluable as psi(x) together with its analytic x-derivative.
pub trait Wavefunction {
    fn eval(&self, x: f64) -> (Complex64, Complex64);
    fn energy(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A traveling mode N e^{+-i b sinh x / 2} (cosh x)^{-(n-1/2)} phi(sinh x).
/// The right-moving branch carries e^{+i b sinh x / 2} (conjugated
/// polynomial); the left-moving one is its complex conjugate at real x.
#[derive(Debug, Clone)]
pub struct TravelingMode {
    state: QesState,
    direction: Direction,
    normalization: Complex64,
}

impl TravelingMode {
    pub fn new(state: QesState, direction: Direction) -> Self {
        TravelingMode {
            state,
            direction,
            normalization: Complex64::new(1.0, 0.0),
        }
    }

    pub fn state(&self) -> &QesState {
        &self.state
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn normalization(&self) -> Complex64 {
        self.normalization
    }
}

impl Wavefunction for TravelingMode {
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let b = self.state.params.b();
        let nf = self.state.params.n() as f64;
        let u = x.sinh();
        let ch = x.cosh();
        let sigma = match self.direction {
            Direction::Right => 1.0,
            Direction::Left => -1.0,
        };

        // Right-moving: conjugated coefficients; left-moving: as stored.
        let mut phi = Complex64::new(0.0, 0.0);
        let mut dphi = Complex64::new(0.0, 0.0);
        for &c in self.state.coeffs.iter().rev() {
            let ck = if sigma > 0.0 { c.conj() } else { c };
            dphi = dphi * u + phi;
            phi = phi * u + ck;
        }

        let envelope = ch.powf(-(nf - 0.5));
        let phase = Complex64::new(0.0, sigma * 0.5 * b * u).exp();
        let psi = self.normalization * phase * envelope * phi;
        // d/dx through the phase, the envelope and phi(sinh x).
        let log_deriv = Complex64::new(-(nf - 0.5) * x.tanh(), sigma * 0.5 * b * ch);
        let dpsi = psi * log_deriv + self.normalization * phase * envelope * dphi * ch;
        (psi, dpsi)
    }

    fn energy(&self) -> f64 {
        self.state.energy
    }
}

/// A real zero-flux combination
/// (cosh x)^{-(n-1/2)} [P cos(b sinh x / 2) + Q sin(b sinh x / 2)] (even)
/// or its odd partner, with real polynomials P (even powers) and Q (odd
/// powers) scaled so the first nonzero coefficient is 1.
#[derive(Debug, Clone)]
pub struct ParityState {
    state: QesState,
    parity: Parity,
    normalization: f64,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl ParityState {
    pub fn state(&self) -> &QesState {
        &self.state
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// The same state with its normalization multiplied by `c`.
    pub fn scaled(&self, c: f64) -> ParityState {
        let mut out = self.clone();
        out.normalization *= c;
        out
    }

    /// Unit-norm variant; the published forms themselves are unnormalized.
    pub fn unit_norm(&self) -> Result<ParityState, StateError> {
        let norm = norm_squared(self)?;
        Ok(self.scaled(1.0 / norm.value.sqrt()))
    }
}

impl Wavefunction for ParityState {
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let b = self.state.params.b();
        let nf = self.state.params.n() as f64;
        let u = x.sinh();
        let ch = x.cosh();

        let (pv, dp) = horner_real(&self.p, u);
        let (qv, dq) = horner_real(&self.q, u);
        let (sin_h, cos_h) = (0.5 * b * u).sin_cos();

        let (val, du) = match self.parity {
            Parity::Even => (
                pv * cos_h + qv * sin_h,
                dp * cos_h + dq * sin_h - 0.5 * b * (pv * sin_h - qv * cos_h),
            ),
            Parity::Odd => (
                pv * sin_h - qv * cos_h,
                dp * sin_h - dq * cos_h + 0.5 * b * (pv * cos_h + qv * sin_h),
            ),
        };

        let envelope = self.normalization * ch.powf(-(nf - 0.5));
        let psi = envelope * val;
        let dpsi = envelope * (ch * du - (nf - 0.5) * x.tanh() * val);
        (Complex64::new(psi, 0.0), Complex64::new(dpsi, 0.0))
    }

    fn energy(&self) -> f64 {
        self.state.energy
    }
}

/// Wronskian pair report at the two asymptotic ends.
#[derive(Debug, Clone)]
pub struct WronskianReport {
    pub pair: (usize, usize),
    pub w_plus: Complex64,
    pub w_minus: Complex64,
    pub x: f64,
    pub difference: Complex64,
}

fn horner_real(coeffs: &[f64], u: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &c in coeffs.iter().rev() {
        d = d * u + v;
        v = v * u + c;
    }
    (v, d)
}

/// Recover the real vector r from the alternating coefficients c_k = i^k r_k
/// and scale it so its first nonzero entry is 1 (the published convention).
fn alternating_real_coeffs(state: &QesState) -> Result<Vec<f64>, StateError> {
    let max_mag = state
        .coeffs
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    if max_mag == 0.0 {
        return Err(StateError::ZeroState);
    }
    let mut r = Vec::with_capacity(state.coeffs.len());
    for (k, &c) in state.coeffs.iter().enumerate() {
        let v = c * Complex64::new(0.0, -1.0).powu(k as u32);
        if v.im.abs() > COEFF_EPS * max_mag {
            return Err(StateError::NonAlternating { index: k, value: c });
        }
        r.push(v.re);
    }
    let first = r
        .iter()
        .copied()
        .find(|v| v.abs() > COEFF_EPS * max_mag)
        .expect("a nonzero coefficient exists");
    Ok(r.iter().map(|v| v / first).collect())
}

/// Split a level into its even and odd zero-flux combinations
/// even ~ psi_R + psi_L, odd ~ psi_R - psi_L, in the closed real forms.
pub fn parity_combine(state: &QesState) -> Result<(ParityState, ParityState), StateError> {
    let r = alternating_real_coeffs(state)?;
    let mut p = vec![0.0; r.len()];
    let mut q = vec![0.0; r.len()];
    for (k, &rk) in r.iter().enumerate() {
        if k % 2 == 0 {
            p[k] = if (k / 2) % 2 == 0 { rk } else { -rk };
        } else {
            q[k] = if ((k - 1) / 2) % 2 == 0 { rk } else { -rk };
        }
    }
    let make = |parity| ParityState {
        state: state.clone(),
        parity,
        normalization: 1.0,
        p: p.clone(),
        q: q.clone(),
    };
    Ok((make(Parity::Even), make(Parity::Odd)))
}

/// Probability flux j = i(psi*' psi - psi* psi') at x.
pub fn flux(w: &impl Wavefunction, x: f64) -> f64 {
    let (psi, dpsi) = w.eval(x);
    2.0 * (psi.conj() * dpsi).im
}

/// Rescale a traveling mode to unit flux. Phase convention: psi(0) real
/// positive when nonzero; otherwise psi'(0) positive (negative) imaginary
/// for a right- (left-) moving mode.
pub fn normalize_unit_flux(mode: &TravelingMode) -> Result<TravelingMode, StateError> {
    let b = mode.state.params.b();
    let max_mag = mode
        .state
        .coeffs
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let lead = mode
        .state
        .coeffs
        .iter()
        .rev()
        .find(|c| c.norm() > COEFF_EPS * max_mag)
        .ok_or(StateError::ZeroFlux)?;
    // Asymptotically j -> +- b |N c_lead|^2, so this fixes |j| = 1.
    let scale = 1.0 / (b.sqrt() * (mode.normalization.norm() * lead.norm()));

    let mut out = mode.clone();
    out.normalization *= scale;
    let (psi0, dpsi0) = out.eval(0.0);
    let pivot = if psi0.norm() > COEFF_EPS * dpsi0.norm() {
        psi0
    } else {
        match out.direction {
            Direction::Right => dpsi0 * Complex64::new(0.0, -1.0),
            Direction::Left => dpsi0 * Complex64::new(0.0, 1.0),
        }
    };
    if pivot.norm() == 0.0 {
        return Err(StateError::ZeroFlux);
    }
    out.normalization *= pivot.conj() / pivot.norm();
    Ok(out)
}

/// Norm integral of a parity state over the whole line, via u = sinh x and
/// an analytic split into a monotone mean part and a zero-mean oscillation.
pub fn norm_squared(state: &ParityState) -> Result<QuadratureResult<f64>, StateError> {
    let b = state.state.params.b();
    let n = state.state.params.n() as i32;
    let s2 = state.normalization * state.normalization;
    let sign = match state.parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };

    // |psi|^2 dx = s^2 (1+u^2)^{-n} [P cos + Q sin]^2 du (even case);
    // the square splits into (P^2+Q^2)/2 plus a period-2pi/b oscillation.
    let sum_abs: f64 = state.p.iter().chain(state.q.iter()).map(|c| c.abs()).sum();
    let amplitude = 2.0 * s2 * sum_abs * sum_abs;

    let p = &state.p;
    let q = &state.q;
    let run = |abs_tol: f64| -> Result<QuadratureResult<f64>, QuadError<f64>> {
        // Accept a spent budget when the achieved error is still within
        // the request: large-coefficient states hit the subdivision cap
        // long after reaching adequate absolute accuracy.
        let settle = |r: Result<QuadratureResult<f64>, QuadError<f64>>| match r {
            Ok(v) => Ok(v),
            Err(QuadError::BudgetExceeded {
                value,
                error_estimate,
            }) if error_estimate <= 0.5 * abs_tol => Ok(QuadratureResult {
                value,
                error_estimate,
            }),
            Err(e) => Err(e),
        };
        let mean = settle(quad_improper(
            |u| {
                let (pv, _) = horner_real(p, u);
                let (qv, _) = horner_real(q, u);
                s2 * 0.5 * (pv * pv + qv * qv) * (1.0 + u * u).powi(-n)
            },
            DecayHint::algebraic(2.0, amplitude),
            0.5 * abs_tol,
        ))?;
        let oscillation = settle(quad_improper(
            |u| {
                let (pv, _) = horner_real(p, u);
                let (qv, _) = horner_real(q, u);
                let (sin_b, cos_b) = (b * u).sin_cos();
                sign * s2 * (0.5 * (pv * pv - qv * qv) * cos_b + pv * qv * sin_b)
                    * (1.0 + u * u).powi(-n)
            },
            DecayHint::oscillatory_algebraic(std::f64::consts::TAU / b, amplitude),
            0.5 * abs_tol,
        ))?;
        Ok(QuadratureResult {
            value: mean.value + oscillation.value,
            error_estimate: mean.error_estimate + oscillation.error_estimate,
        })
    };

    // First pass learns the scale; the second pins the error to 1e-9
    // relative to the actual value rather than the coefficient bound.
    let rough = run(1e-6 * (s2 * sum_abs * sum_abs).max(1.0))?;
    let target = 1e-9 * rough.value.abs().max(1.0);
    if rough.error_estimate <= target {
        return Ok(rough);
    }
    Ok(run(target)?)
}

/// W[a, b](x) = a'(x) b(x) - a(x) b'(x).
pub fn wronskian(a: &impl Wavefunction, b: &impl Wavefunction, x: f64) -> Complex64 {
    let (av, ad) = a.eval(x);
    let (bv, bd) = b.eval(x);
    ad * bv - av * bd
}

/// For every pair in `states`, the asymptotic Wronskians at the two ends
/// and the boundary-term difference W(+inf) - W(-inf); self-adjointness on
/// the restricted domain needs every difference to vanish. The slowest
/// finite-X tail decays like 1/sinh X (equal-parity pairs of different
/// energy), so the values at X and X + 2 are extrapolated geometrically in
/// that rate; for equal-energy pairs the Wronskian is already constant and
/// the extrapolation is exact. A large X vs X + 2 disagreement means X is
/// not yet asymptotic and is an error.
pub fn self_adjoint_check(
    states: &[ParityState],
    x_asymptotic: f64,
) -> Result<Vec<WronskianReport>, StateError> {
    let q = x_asymptotic.sinh() / (x_asymptotic + 2.0).sinh();
    let extrapolate = |near: Complex64, far: Complex64| (far - q * near) / (1.0 - q);
    let mut reports = Vec::new();
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let w_plus = wronskian(&states[i], &states[j], x_asymptotic);
            let w_minus = wronskian(&states[i], &states[j], -x_asymptotic);
            let w_plus_far = wronskian(&states[i], &states[j], x_asymptotic + 2.0);
            let w_minus_far = wronskian(&states[i], &states[j], -x_asymptotic - 2.0);
            let disagreement = (w_plus_far - w_plus)
                .norm()
                .max((w_minus_far - w_minus).norm());
            if disagreement > 1e-3 * (1.0 + w_plus.norm().max(w_minus.norm())) {
                return Err(StateError::AsymptoticsNotReached {
                    x: x_asymptotic,
                    disagreement,
                });
            }
            let w_plus = extrapolate(w_plus, w_plus_far);
            let w_minus = extrapolate(w_minus, w_minus_far);
            reports.push(WronskianReport {
                pair: (i, j),
                w_plus,
                w_minus,
                x: x_asymptotic,
                difference: w_plus - w_minus,
            });
        }
    }
    Ok(reports)
}
