//! Geometry of the bottomless potential
//! V(x) = -(b^2/4) sinh^2 x - (n^2 - 1/4) sech^2 x:
//! evaluation, shape classification, peaks, valley window and classical
//! turning points.

use crate::numerics::find_root;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ParamError {
    #[error("coupling b must be positive and finite, got {b}")]
    InvalidCoupling { b: f64 },
    #[error("representation index n must be at least 1, got {n}")]
    InvalidIndex { n: u32 },
}

/// The two dimensionless parameters of the model: coupling `b > 0` and the
/// positive integer index `n` that sets the sech-well depth n^2 - 1/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    b: f64,
    n: u32,
}

impl ModelParams {
    pub fn new(b: f64, n: u32) -> Result<Self, ParamError> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(ParamError::InvalidCoupling { b });
        }
        if n < 1 {
            return Err(ParamError::InvalidIndex { n });
        }
        Ok(ModelParams { b, n })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Depth parameter n^2 - 1/4 of the sech^2 well.
    pub fn well_depth(&self) -> f64 {
        let n = self.n as f64;
        n * n - 0.25
    }

    /// Coupling at which the two barrier peaks merge into one.
    pub fn merge_b(&self) -> f64 {
        2.0 * self.well_depth().sqrt()
    }
}

/// Barrier structure of the potential at the given coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// b < 2 sqrt(n^2 - 1/4): two symmetric barrier peaks with a valley.
    DoubleBarrier,
    /// Larger b: the peaks have merged into a single maximum at x = 0.
    SingleHump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeReport {
    pub shape: Shape,
    /// Location of the (right) barrier peak; 0 for a single hump.
    pub x_peak: f64,
    /// Potential value at the peak(s).
    pub v_peak: f64,
    /// V(0) = -(n^2 - 1/4).
    pub v_center: f64,
    /// Coupling at which the peaks merge, 2 sqrt(n^2 - 1/4).
    pub merge_b: f64,
}

/// Classical turning points V(x) = E, sorted ascending. Symmetric about 0;
/// `valley_pair` is the innermost pair when the energy lies in the valley.
#[derive(Debug, Clone, PartialEq)]
pub struct TurningPoints {
    pub points: Vec<f64>,
    pub valley_pair: Option<(f64, f64)>,
}

/// V(x), overflow-safe for |x| up to 700: once sinh^2 x would overflow the
/// value saturates at -f64::MAX (the true value is below any float).
pub fn eval_potential(params: &ModelParams, x: f64) -> f64 {
    let b = params.b;
    let lam = params.well_depth();
    let ax = x.abs();
    if ax <= 300.0 {
        let s = x.sinh();
        let c = x.cosh();
        -(b * b / 4.0) * s * s - lam / (c * c)
    } else {
        // sinh^2 x = e^{2|x|}/4 up to a relative correction e^{-2|x|},
        // far below f64 resolution here; the sech^2 term is ~1e-260.
        let log_mag = 2.0 * ax + (b * b / 16.0).ln();
        if log_mag >= 708.0 {
            -f64::MAX
        } else {
            -log_mag.exp()
        }
    }
}

/// Peak structure of the potential.
pub fn shape_report(params: &ModelParams) -> ShapeReport {
    let b = params.b;
    let lam = params.well_depth();
    let merge_b = params.merge_b();
    let v_center = -lam;
    if b < merge_b {
        // dV/dx = 0 away from the origin at cosh^2 x = 2 sqrt(lam) / b.
        let c = 2.0 * lam.sqrt() / b;
        let x_peak = c.sqrt().acosh();
        // Closed form: V at the peak is b^2/4 - b sqrt(lam).
        let v_peak = b * b / 4.0 - b * lam.sqrt();
        ShapeReport {
            shape: Shape::DoubleBarrier,
            x_peak,
            v_peak,
            v_center,
            merge_b,
        }
    } else {
        ShapeReport {
            shape: Shape::SingleHump,
            x_peak: 0.0,
            v_peak: v_center,
            v_center,
            merge_b,
        }
    }
}

/// True iff the energy lies strictly inside the valley between the two
/// barrier peaks. Energies within 1e-12 (relative) of either edge count as
/// outside, so degenerate action integrals never enter quantization.
pub fn in_valley(params: &ModelParams, e: f64) -> bool {
    let report = shape_report(params);
    if report.shape != Shape::DoubleBarrier {
        return false;
    }
    let lo = report.v_center;
    let hi = report.v_peak;
    let edge_tol = |v: f64| 1e-12 * (1.0 + v.abs());
    e > lo + edge_tol(lo) && e < hi - edge_tol(hi)
}

/// All classical turning points of V(x) = E via the quadratic
/// (b^2/4) c^2 + (E - b^2/4) c + (n^2 - 1/4) = 0 in c = cosh^2 x,
/// polished by a bracketed solve on V - E.
pub fn turning_points(params: &ModelParams, e: f64) -> TurningPoints {
    let b = params.b;
    let lam = params.well_depth();
    let qa = b * b / 4.0;
    let qb = e - qa;
    let qc = lam;

    let disc = qb * qb - 4.0 * qa * qc;
    let mut cs: Vec<f64> = Vec::new();
    if disc >= 0.0 {
        // Numerically stable pair: the larger-magnitude root first.
        let sq = disc.sqrt();
        let q = -0.5 * (qb + sq.copysign(qb));
        let c1 = q / qa;
        let c2 = if q != 0.0 { qc / q } else { c1 };
        cs.push(c1.min(c2));
        cs.push(c1.max(c2));
    }

    let mut points: Vec<f64> = Vec::new();
    for &c in &cs {
        // Roots a hair below 1 are the double point at the origin.
        if c >= 1.0 - 1e-14 {
            let x = c.max(1.0).sqrt().acosh();
            points.push(-x);
            points.push(x);
        }
    }
    points.sort_by(|p, q| p.partial_cmp(q).expect("turning points are finite"));

    // Polish each nonzero point inside a small bracket so the defining
    // equation holds to full precision even after the c -> x mapping.
    for x in points.iter_mut() {
        if x.abs() < 1e-12 {
            continue;
        }
        let width = 1e-6 * (1.0 + x.abs());
        let f = |t: f64| eval_potential(params, t) - e;
        if f(*x - width) * f(*x + width) < 0.0 {
            if let Ok(root) = find_root(f, *x - width, *x + width, 1e-14) {
                *x = root;
            }
        }
    }

    let valley_pair = if points.len() == 4 && in_valley(params, e) {
        Some((points[1], points[2]))
    } else {
        None
    };
    TurningPoints {
        points,
        valley_pair,
    }
}
