//! The companion potential -A1 cosh^{2 nu} x - (nu/2)(nu/2 + 1) sech^2 x,
//! its exact degenerate state pair, and the nu = 1 correspondence with the
//! main model (equal up to the additive constant b^2/4, with A1 = b^2/4).

use thiserror::Error;

use crate::numerics::{quad_adaptive, Endpoints, QuadError};

/// Half-width of a cached phase panel.
const PANEL_WIDTH: f64 = 0.25;
/// Cap on |sqrt(A1) Phi| so the trig-argument roundoff stays below ~1e-10.
const PHASE_CAP: f64 = 1e6;

#[derive(Debug, Error)]
pub enum KkError {
    #[error("A1 must be positive, got {a1}")]
    NonPositiveA1 { a1: f64 },
    #[error("nu must be positive, got {nu}")]
    NonPositiveNu { nu: f64 },
    #[error("x = {x} outside the safe evaluation window |x| <= {limit}")]
    OutsideWindow { x: f64, limit: f64 },
    #[error("Wronskian drifts by {spread:e} across the window; phase quadrature too coarse")]
    PhaseAccuracy { spread: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KKParams {
    a1: f64,
    nu: f64,
}

impl KKParams {
    pub fn new(a1: f64, nu: f64) -> Result<Self, KkError> {
        if !(a1 > 0.0) {
            return Err(KkError::NonPositiveA1 { a1 });
        }
        if !(nu > 0.0) {
            return Err(KkError::NonPositiveNu { nu });
        }
        Ok(KKParams { a1, nu })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

pub fn kk_potential(p: &KKParams, x: f64) -> f64 {
    let c = x.cosh();
    let sech2 = 1.0 / (c * c);
    -p.a1 * c.powf(2.0 * p.nu) - 0.5 * p.nu * (0.5 * p.nu + 1.0) * sech2
}

/// The shared energy of the degenerate pair.
pub fn kk_energy(p: &KKParams) -> f64 {
    -0.25 * p.nu * p.nu
}

/// The exact pair cosh^{-nu/2} x {cos, sin}(sqrt(A1) Phi(x)) with the phase
/// Phi(x) = integral of cosh^nu from 0 to x, cached on fixed panels.
///
/// Immutable after construction; evaluation only reads the panel table.
#[derive(Debug, Clone)]
pub struct KkStatePair {
    params: KKParams,
    /// Cumulative Phi at k * PANEL_WIDTH for k = 0..=panels.
    phi_table: Vec<f64>,
    x_max: f64,
}

impl KkStatePair {
    pub fn new(params: KKParams) -> Result<Self, KkError> {
        let s = params.a1.sqrt();
        let nu = params.nu;
        let mut phi_table = vec![0.0];
        let mut right = 0.0;
        // Grow the table until the accumulated phase hits the accuracy cap.
        while s * phi_table.last().unwrap() < PHASE_CAP && right < 750.0 / nu.max(1e-3) {
            let left = right;
            right += PANEL_WIDTH;
            let scale = right.cosh().powf(nu).min(PHASE_CAP / s.min(1.0));
            let panel = quad_adaptive(
                |t| t.cosh().powf(nu),
                left,
                right,
                1e-13 * scale.max(1.0) * PANEL_WIDTH,
                Endpoints::Regular,
            )?;
            phi_table.push(phi_table.last().unwrap() + panel.value);
        }
        let x_max = (phi_table.len() - 1) as f64 * PANEL_WIDTH;
        Ok(KkStatePair {
            params,
            phi_table,
            x_max,
        })
    }

    pub fn params(&self) -> &KKParams {
        &self.params
    }

    /// Largest |x| at which the pair can be evaluated without the phase
    /// exceeding the accuracy cap.
    pub fn safe_window(&self) -> f64 {
        self.x_max
    }

    /// Phi(x), odd in x.
    pub fn phase(&self, x: f64) -> Result<f64, KkError> {
        let ax = x.abs();
        if ax > self.x_max {
            return Err(KkError::OutsideWindow {
                x,
                limit: self.x_max,
            });
        }
        let k = ((ax / PANEL_WIDTH) as usize).min(self.phi_table.len() - 2);
        let base_x = k as f64 * PANEL_WIDTH;
        let nu = self.params.nu;
        let scale = ax.cosh().powf(nu);
        let rest = quad_adaptive(
            |t| t.cosh().powf(nu),
            base_x,
            ax,
            1e-13 * scale.max(1.0) * PANEL_WIDTH,
            Endpoints::Regular,
        )?;
        Ok((self.phi_table[k] + rest.value).copysign(x))
    }

    /// (psi1, psi1', psi2, psi2') at x.
    pub fn eval(&self, x: f64) -> Result<(f64, f64, f64, f64), KkError> {
        let s = self.params.a1.sqrt();
        let nu = self.params.nu;
        let theta = s * self.phase(x)?;
        let c = x.cosh();
        let env = c.powf(-0.5 * nu);
        let damp = -0.5 * nu * x.tanh();
        let rate = s * c.powf(nu);
        let (sin, cos) = theta.sin_cos();
        let psi1 = env * cos;
        let psi2 = env * sin;
        let dpsi1 = damp * psi1 - rate * env * sin;
        let dpsi2 = damp * psi2 + rate * env * cos;
        Ok((psi1, dpsi1, psi2, dpsi2))
    }
}

pub fn kk_states(p: &KKParams) -> Result<KkStatePair, KkError> {
    KkStatePair::new(*p)
}

/// The constant W[psi1, psi2]; evaluated at 0 and +-X and checked for
/// x-independence before returning.
pub fn kk_wronskian(p: &KKParams) -> Result<f64, KkError> {
    let pair = kk_states(p)?;
    let x_probe = (0.9 * pair.safe_window()).min(10.0);
    let mut values = Vec::new();
    for x in [0.0, x_probe, -x_probe] {
        let (v1, d1, v2, d2) = pair.eval(x)?;
        values.push(d1 * v2 - v1 * d2);
    }
    let w = values[0];
    let spread = values
        .iter()
        .map(|v| (v - w).abs())
        .fold(0.0f64, f64::max);
    if spread > 1e-8 * (1.0 + w.abs()) {
        return Err(KkError::PhaseAccuracy { spread });
    }
    Ok(w)
}
