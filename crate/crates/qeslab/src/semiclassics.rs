//! Valley quantization at lowest WKB order, the small-b capacity count, and
//! the critical couplings where levels exit the valley or the two barriers
//! merge into one hump.

use thiserror::Error;

use crate::numerics::{find_root, quad_adaptive, Endpoints, QuadError, RootError};
use crate::potential::{shape_report, turning_points, ModelParams, ParamError, Shape};
use crate::qes_core::{qes_spectrum, QesError};

#[derive(Debug, Error)]
pub enum SemiclassicsError {
    #[error("E = {e} is not inside the valley window")]
    NotInValley { e: f64 },
    #[error("level {level_index} of n = {n} never crosses the peak on the coupling bracket")]
    NoCrossing { n: u32, level_index: usize },
    #[error("level index {level_index} outside 1..={n}")]
    BadLevel { n: u32, level_index: usize },
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Quadrature(#[from] QuadError<f64>),
    #[error(transparent)]
    Qes(#[from] QesError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// One valley level from the quantization rule action = (m - 1/2) pi.
#[derive(Debug, Clone)]
pub struct WkbLevel {
    pub m: usize,
    pub e: f64,
    pub action: f64,
    /// 100 |E_wkb - E_exact| / |E_exact| against the algebraic level of the
    /// same rank, when the rank exists.
    pub percent_error_vs_qes: Option<f64>,
}

/// Couplings at which the valley structure changes.
#[derive(Debug, Clone)]
pub struct CriticalCouplings {
    pub n: u32,
    /// b at which each level (ascending, 1-based) rises above the peaks;
    /// levels that stay inside on the whole bracket are absent.
    pub level_exit_b: Vec<f64>,
    /// b = sqrt(4 n^2 - 1) where the two barriers merge into one hump.
    pub peak_merge_b: f64,
}

/// Integral of sqrt(E - V) across the valley's classically allowed window,
/// between the inner turning-point pair.
pub fn action_integral(params: &ModelParams, e: f64) -> Result<f64, SemiclassicsError> {
    let tp = turning_points(params, e);
    let (x1, x2) = tp.valley_pair.ok_or(SemiclassicsError::NotInValley { e })?;
    let result = quad_adaptive(
        |x| (e - crate::potential::eval_potential(params, x)).max(0.0).sqrt(),
        x1,
        x2,
        1e-10,
        Endpoints::SqrtSingular,
    )?;
    Ok(result.value)
}

/// All levels satisfying the quantization rule inside the valley, with
/// percentage deviations from the algebraic spectrum attached by rank.
pub fn wkb_levels(params: &ModelParams) -> Result<Vec<WkbLevel>, SemiclassicsError> {
    let report = shape_report(params);
    if report.shape != Shape::DoubleBarrier {
        return Ok(Vec::new());
    }
    // Stay strictly inside the window; the action is 0 at the bottom and
    // maximal just under the peaks.
    let width = report.v_peak - report.v_center;
    let e_lo = report.v_center + 1e-9 * width;
    let e_hi = report.v_peak - 1e-9 * width;
    let action_max = action_integral(params, e_hi)?;

    let exact: Vec<f64> = qes_spectrum(params)?
        .into_iter()
        .map(|s| s.energy)
        .filter(|&e| crate::potential::in_valley(params, e))
        .collect();

    let mut levels = Vec::new();
    for m in 1.. {
        let target = (m as f64 - 0.5) * std::f64::consts::PI;
        if target >= action_max {
            break;
        }
        let e = find_root(
            |e| action_integral(params, e).unwrap_or(f64::NAN) - target,
            e_lo,
            e_hi,
            1e-11,
        )?;
        let action = action_integral(params, e)?;
        let percent_error_vs_qes = exact
            .get(m - 1)
            .map(|&eq| 100.0 * (e - eq).abs() / eq.abs());
        levels.push(WkbLevel {
            m,
            e,
            action,
            percent_error_vs_qes,
        });
    }
    Ok(levels)
}

/// How many valley levels the quantization rule admits as b -> 0, where the
/// potential tends to the pure sech^2 well: the largest m with
/// (m - 1/2) pi <= pi sqrt(n^2 - 1/4), which is n itself.
pub fn small_b_capacity(n: u32) -> u32 {
    let nf = n as f64;
    let capacity = (nf * nf - 0.25).sqrt();
    (capacity + 0.5).floor() as u32
}

/// The coupling at which the given level (1-based, ascending) rises above
/// the barrier peaks, found by a sign pre-scan on a log-spaced b grid and
/// root polishing. Levels exit in reverse order: higher levels at smaller b.
pub fn critical_b_level_exit(n: u32, level_index: usize) -> Result<f64, SemiclassicsError> {
    if level_index == 0 || level_index > n as usize {
        return Err(SemiclassicsError::BadLevel { n, level_index });
    }
    let gap = |b: f64| -> Result<f64, SemiclassicsError> {
        let params = ModelParams::new(b, n)?;
        let e = qes_spectrum(&params)?[level_index - 1].energy;
        Ok(e - shape_report(&params).v_peak)
    };
    let merge = ModelParams::new(1.0, n)?.merge_b();
    let lo_b = 1e-4;
    let hi_b = merge * (1.0 - 1e-9);
    let steps = 80;
    let mut prev_b = lo_b;
    let mut prev_g = gap(prev_b)?;
    for i in 1..=steps {
        let b = lo_b * (hi_b / lo_b).powf(i as f64 / steps as f64);
        let g = gap(b)?;
        if prev_g == 0.0 {
            return Ok(prev_b);
        }
        if prev_g * g < 0.0 {
            return Ok(find_root(|b| gap(b).unwrap_or(f64::NAN), prev_b, b, 1e-12)?);
        }
        prev_b = b;
        prev_g = g;
    }
    Err(SemiclassicsError::NoCrossing { n, level_index })
}

/// b = sqrt(4 n^2 - 1), where the double barrier flattens into one hump.
pub fn critical_b_peak_merge(n: u32) -> f64 {
    let nf = n as f64;
    (4.0 * nf * nf - 1.0).sqrt()
}

/// Exit couplings for every level that has one, plus the merge coupling.
pub fn critical_couplings(n: u32) -> Result<CriticalCouplings, SemiclassicsError> {
    let mut level_exit_b = Vec::new();
    for level_index in 1..=n as usize {
        match critical_b_level_exit(n, level_index) {
            Ok(b) => level_exit_b.push(b),
            Err(SemiclassicsError::NoCrossing { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(CriticalCouplings {
        n,
        level_exit_b,
        peak_merge_b: critical_b_peak_merge(n),
    })
}
