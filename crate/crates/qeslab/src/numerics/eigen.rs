//! Small dense eigensolver.
//!
//! Real matrices go through Francis double-shift QR on the Hessenberg form
//! (the classic EISPACK hqr scheme); general complex matrices through
//! single-shift QR with Wilkinson shifts and Givens rotations. Eigenvectors
//! come from shifted inverse iteration on the original matrix.

use num_complex::Complex64;

/// Eigenvalues with |Im| below this (relative) threshold are snapped to the
/// real axis. Larger imaginary parts are reported, never dropped.
pub const REALITY_SNAP_TOL: f64 = 1e-9;

const MAX_N: usize = 64;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, thiserror::Error)]
pub enum EigenError {
    #[error("matrix is empty or not square")]
    NotSquare,
    #[error("matrix size {n} exceeds the supported maximum {MAX_N}")]
    TooLarge { n: usize },
    #[error("QR iteration budget exhausted with {remaining} eigenvalues unconverged")]
    IterationBudget { remaining: usize },
    #[error("eigenvector residual {residual:e} exceeds {RESIDUAL_TOL:e}*norm for eigenvalue #{index}")]
    Residual { index: usize, residual: f64 },
}

/// Full eigendecomposition of a small dense matrix.
///
/// Eigenvalues are sorted by real part ascending (imaginary part breaks
/// ties); eigenvectors have unit 2-norm with the first significant
/// component rotated to the positive real axis. `defective` warns that two
/// near-equal eigenvalues produced numerically parallel eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub defective: bool,
}

fn max_row_sum_norm(m: &[Vec<Complex64>]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Real path: Hessenberg reduction + Francis double-shift QR (values only).
// ---------------------------------------------------------------------------

fn real_to_hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for j in 0..n.saturating_sub(2) {
        for i in j + 2..n {
            if a[i][j] == 0.0 {
                continue;
            }
            let p = j + 1;
            let (x, y) = (a[p][j], a[i][j]);
            let r = x.hypot(y);
            let (c, s) = (x / r, y / r);
            for col in 0..n {
                let (u, v) = (a[p][col], a[i][col]);
                a[p][col] = c * u + s * v;
                a[i][col] = -s * u + c * v;
            }
            for row in 0..n {
                let (u, v) = (a[row][p], a[row][i]);
                a[row][p] = c * u + s * v;
                a[row][i] = -s * u + c * v;
            }
        }
    }
}

/// Eigenvalues of a real upper-Hessenberg matrix by double-shift QR.
/// Non-Hessenberg input is reduced first.
pub fn real_hessenberg_eigenvalues(matrix: &[Vec<f64>]) -> Result<Vec<Complex64>, EigenError> {
    let nn = matrix.len();
    if nn == 0 || matrix.iter().any(|r| r.len() != nn) {
        return Err(EigenError::NotSquare);
    }
    if nn > MAX_N {
        return Err(EigenError::TooLarge { n: nn });
    }
    let mut h: Vec<Vec<f64>> = matrix.to_vec();
    if h
        .iter()
        .enumerate()
        .any(|(i, row)| row.iter().take(i.saturating_sub(1)).any(|&v| v != 0.0))
    {
        real_to_hessenberg(&mut h);
    }

    let mut d = vec![0.0f64; nn];
    let mut e = vec![0.0f64; nn];
    let low = 0isize;
    let high = nn as isize - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let (mut x, mut y, mut w): (f64, f64, f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i][j].abs();
        }
    }

    let mut n = high;
    let mut iter = 0usize;
    while n >= low {
        // Look for a single small sub-diagonal element.
        let mut l = n;
        while l > low {
            s = h[(l - 1) as usize][(l - 1) as usize].abs() + h[l as usize][l as usize].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l as usize][(l - 1) as usize].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root found.
            h[n as usize][n as usize] += exshift;
            d[n as usize] = h[n as usize][n as usize];
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots found.
            w = h[n as usize][(n - 1) as usize] * h[(n - 1) as usize][n as usize];
            p = (h[(n - 1) as usize][(n - 1) as usize] - h[n as usize][n as usize]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[n as usize][n as usize] += exshift;
            h[(n - 1) as usize][(n - 1) as usize] += exshift;
            x = h[n as usize][n as usize];
            if q >= 0.0 {
                // Real pair.
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
            } else {
                // Complex pair.
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form shift.
            x = h[n as usize][n as usize];
            y = h[(n - 1) as usize][(n - 1) as usize];
            w = h[n as usize][(n - 1) as usize] * h[(n - 1) as usize][n as usize];

            if iter == 10 || iter == 20 {
                // Wilkinson's ad hoc exceptional shift.
                exshift += x;
                for i in low..=n {
                    h[i as usize][i as usize] -= x;
                }
                s = h[n as usize][(n - 1) as usize].abs()
                    + h[(n - 1) as usize][(n - 2) as usize].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            iter += 1;
            if iter > 60 {
                return Err(EigenError::IterationBudget {
                    remaining: (n - low + 1) as usize,
                });
            }

            // Look for two consecutive small sub-diagonal elements.
            let mut m = n - 2;
            loop {
                z = h[m as usize][m as usize];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1) as usize][m as usize] + h[m as usize][(m + 1) as usize];
                q = h[(m + 1) as usize][(m + 1) as usize] - z - r - s;
                r = h[(m + 2) as usize][(m + 1) as usize];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m as usize][(m - 1) as usize].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[(m - 1) as usize][(m - 1) as usize].abs()
                                + z.abs()
                                + h[(m + 1) as usize][(m + 1) as usize].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=n {
                h[i as usize][(i - 2) as usize] = 0.0;
                if i > m + 2 {
                    h[i as usize][(i - 3) as usize] = 0.0;
                }
            }

            // Double QR step on rows l..n and columns m..n.
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = h[k as usize][(k - 1) as usize];
                    q = h[(k + 1) as usize][(k - 1) as usize];
                    r = if notlast {
                        h[(k + 2) as usize][(k - 1) as usize]
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[k as usize][(k - 1) as usize] = -s * x;
                    } else if l != m {
                        h[k as usize][(k - 1) as usize] = -h[k as usize][(k - 1) as usize];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    // Row modification.
                    for j in k..=n {
                        let mut pj = h[k as usize][j as usize] + q * h[(k + 1) as usize][j as usize];
                        if notlast {
                            pj += r * h[(k + 2) as usize][j as usize];
                            h[(k + 2) as usize][j as usize] -= pj * z;
                        }
                        h[k as usize][j as usize] -= pj * x;
                        h[(k + 1) as usize][j as usize] -= pj * y;
                    }

                    // Column modification.
                    for i in l..=n.min(k + 3) {
                        let mut pi =
                            x * h[i as usize][k as usize] + y * h[i as usize][(k + 1) as usize];
                        if notlast {
                            pi += z * h[i as usize][(k + 2) as usize];
                            h[i as usize][(k + 2) as usize] -= pi * r;
                        }
                        h[i as usize][k as usize] -= pi;
                        h[i as usize][(k + 1) as usize] -= pi * q;
                    }
                }
            }
        }
    }

    Ok((0..nn).map(|i| Complex64::new(d[i], e[i])).collect())
}

// ---------------------------------------------------------------------------
// Complex path: Givens Hessenberg reduction + single-shift QR.
// ---------------------------------------------------------------------------

type CMat = Vec<Vec<Complex64>>;

/// Complex Givens rotation [c s; -conj(s) c] with real c mapping (a, b) to
/// (r, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let rho = na.hypot(nb);
    let c = na / rho;
    let s = a * b.conj() / (na * rho);
    (c, s)
}

fn complex_to_hessenberg(a: &mut CMat) {
    let n = a.len();
    for j in 0..n.saturating_sub(2) {
        for i in j + 2..n {
            if a[i][j].norm() == 0.0 {
                continue;
            }
            let p = j + 1;
            let (c, s) = givens(a[p][j], a[i][j]);
            for col in 0..n {
                let (u, v) = (a[p][col], a[i][col]);
                a[p][col] = c * u + s * v;
                a[i][col] = -s.conj() * u + c * v;
            }
            for row in 0..n {
                let (u, v) = (a[row][p], a[row][i]);
                a[row][p] = c * u + s.conj() * v;
                a[row][i] = -s * u + c * v;
            }
        }
    }
}

fn complex_hessenberg_eigenvalues(h: &mut CMat) -> Result<Vec<Complex64>, EigenError> {
    let n = h.len();
    let norm = max_row_sum_norm(h).max(f64::MIN_POSITIVE);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;

    'outer: loop {
        // Deflate fully converged trailing 1x1 blocks.
        loop {
            if hi == 0 {
                eigenvalues.push(h[0][0]);
                break 'outer;
            }
            let s = (h[hi - 1][hi - 1].norm() + h[hi][hi].norm()).max(f64::EPSILON * norm);
            if h[hi][hi - 1].norm() <= f64::EPSILON * s {
                eigenvalues.push(h[hi][hi]);
                hi -= 1;
                iter = 0;
            } else {
                break;
            }
        }

        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let s = (h[lo - 1][lo - 1].norm() + h[lo][lo].norm()).max(f64::EPSILON * norm);
            if h[lo][lo - 1].norm() <= f64::EPSILON * s {
                h[lo][lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        // Wilkinson shift from the trailing 2x2 of the active block.
        let a = h[hi - 1][hi - 1];
        let b = h[hi - 1][hi];
        let c = h[hi][hi - 1];
        let d = h[hi][hi];
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - det.scale(4.0)).sqrt();
        let mu1 = (tr + disc).scale(0.5);
        let mu2 = (tr - disc).scale(0.5);
        let mut mu = if (mu1 - d).norm() <= (mu2 - d).norm() {
            mu1
        } else {
            mu2
        };
        if iter > 0 && iter % 12 == 0 {
            // Exceptional shift to break rare cycling.
            mu = d + Complex64::new(h[hi][hi - 1].norm(), 0.0);
        }
        iter += 1;
        if iter > 80 {
            return Err(EigenError::IterationBudget { remaining: hi + 1 });
        }

        for k in lo..=hi {
            h[k][k] -= mu;
        }
        // QR by Givens sweeps, then RQ.
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cr, sr) = givens(h[k][k], h[k + 1][k]);
            for col in k..=hi {
                let (u, v) = (h[k][col], h[k + 1][col]);
                h[k][col] = cr * u + sr * v;
                h[k + 1][col] = -sr.conj() * u + cr * v;
            }
            rots.push((cr, sr));
        }
        for (k, (cr, sr)) in rots.into_iter().enumerate() {
            let k = lo + k;
            for row in lo..=(k + 1).min(hi) {
                let (u, v) = (h[row][k], h[row][k + 1]);
                h[row][k] = u * cr + v * sr.conj();
                h[row][k + 1] = -u * sr + v * cr;
            }
        }
        for k in lo..=hi {
            h[k][k] += mu;
        }
    }

    Ok(eigenvalues)
}

// ---------------------------------------------------------------------------
// Inverse iteration.
// ---------------------------------------------------------------------------

fn lu_solve_in_place(lu: &mut CMat, pivots: &mut Vec<usize>) {
    let n = lu.len();
    pivots.clear();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if lu[i][k].norm() > lu[p][k].norm() {
                p = i;
            }
        }
        pivots.push(p);
        lu.swap(k, p);
        let mut piv = lu[k][k];
        if piv.norm() < 1e-300 {
            piv = Complex64::new(1e-300, 0.0);
            lu[k][k] = piv;
        }
        for i in k + 1..n {
            let factor = lu[i][k] / piv;
            lu[i][k] = factor;
            for j in k + 1..n {
                let sub = factor * lu[k][j];
                lu[i][j] -= sub;
            }
        }
    }
}

fn lu_backsolve(lu: &CMat, pivots: &[usize], rhs: &mut [Complex64]) {
    let n = lu.len();
    for k in 0..n {
        rhs.swap(k, pivots[k]);
        for i in k + 1..n {
            let sub = lu[i][k] * rhs[k];
            rhs[i] -= sub;
        }
    }
    for k in (0..n).rev() {
        for j in k + 1..n {
            let sub = lu[k][j] * rhs[j];
            rhs[k] -= sub;
        }
        rhs[k] /= lu[k][k];
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn phase_normalize(v: &mut [Complex64]) {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return;
    }
    for z in v.iter_mut() {
        *z /= norm;
    }
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12) {
        let phase = first / first.norm();
        let rot = phase.conj();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn residual(m: &[Vec<Complex64>], lambda: Complex64, v: &[Complex64]) -> f64 {
    let n = m.len();
    let mut worst = 0.0f64;
    let mut acc = 0.0f64;
    for i in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            s += m[i][j] * v[j];
        }
        s -= lambda * v[i];
        acc += s.norm_sqr();
        worst = worst.max(s.norm());
    }
    let _ = worst;
    acc.sqrt()
}

fn inverse_iteration(
    m: &[Vec<Complex64>],
    lambda: Complex64,
    norm: f64,
) -> Result<Vec<Complex64>, f64> {
    let n = m.len();
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    // A slightly shifted eigenvalue keeps the factorization well-defined.
    for attempt in 0..=n {
        let pert = Complex64::new(1e-12 * (1.0 + norm) * (1 + attempt % 3) as f64, 0.0);
        let shifted = lambda + pert;
        let mut lu: CMat = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &z)| if i == j { z - shifted } else { z })
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        lu_solve_in_place(&mut lu, &mut pivots);

        let mut v: Vec<Complex64> = if attempt == 0 {
            (0..n)
                .map(|i| Complex64::new(1.0, 0.3 * ((i % 4) as f64 - 1.5)))
                .collect()
        } else {
            (0..n)
                .map(|i| {
                    Complex64::new(if i == attempt - 1 { 1.0 } else { 0.0 }, 0.0)
                })
                .collect()
        };
        let nv = vec_norm(&v);
        for z in v.iter_mut() {
            *z /= nv;
        }
        for _ in 0..4 {
            lu_backsolve(&lu, &pivots, &mut v);
            let nv = vec_norm(&v);
            if !nv.is_finite() || nv == 0.0 {
                break;
            }
            for z in v.iter_mut() {
                *z /= nv;
            }
        }
        let res = residual(m, lambda, &v);
        if res <= RESIDUAL_TOL * norm {
            // One refinement pass with a near-zero shift perturbation: the
            // converged residual is floored by the perturbation, and the
            // polynomial assembled from v may amplify it substantially.
            let tiny = Complex64::new(1e-15 * (1.0 + norm), 0.0);
            let mut lu: CMat = m
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &z)| if i == j { z - lambda - tiny } else { z })
                        .collect()
                })
                .collect();
            let mut pivots = Vec::new();
            lu_solve_in_place(&mut lu, &mut pivots);
            let mut refined = v.clone();
            lu_backsolve(&lu, &pivots, &mut refined);
            let nv = vec_norm(&refined);
            if nv.is_finite() && nv > 0.0 {
                for z in refined.iter_mut() {
                    *z /= nv;
                }
                if residual(m, lambda, &refined) < res {
                    v = refined;
                }
            }
            phase_normalize(&mut v);
            return Ok(v);
        }
        if best.as_ref().map_or(true, |(r, _)| res < *r) {
            best = Some((res, v));
        }
    }
    Err(best.map(|(r, _)| r).unwrap_or(f64::INFINITY))
}

/// Snap nearly-real eigenvalues onto the real axis.
fn snap_reality(eigs: &mut [Complex64]) {
    for z in eigs.iter_mut() {
        if z.im.abs() < REALITY_SNAP_TOL * (1.0 + z.re.abs()) {
            z.im = 0.0;
        }
    }
}

/// Full eigendecomposition of a small (n <= 64) dense complex matrix.
pub fn eigensystem_small(matrix: &[Vec<Complex64>]) -> Result<EigenSystem, EigenError> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return Err(EigenError::NotSquare);
    }
    if n > MAX_N {
        return Err(EigenError::TooLarge { n });
    }

    let norm = max_row_sum_norm(matrix).max(f64::MIN_POSITIVE);
    let mut h: CMat = matrix.to_vec();
    complex_to_hessenberg(&mut h);
    let mut eigenvalues = complex_hessenberg_eigenvalues(&mut h)?;
    snap_reality(&mut eigenvalues);
    eigenvalues.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut eigenvectors = Vec::with_capacity(n);
    for (idx, &lambda) in eigenvalues.iter().enumerate() {
        match inverse_iteration(matrix, lambda, norm) {
            Ok(v) => eigenvectors.push(v),
            Err(res) => {
                return Err(EigenError::Residual {
                    index: idx,
                    residual: res,
                })
            }
        }
    }

    // Near-equal eigenvalues with parallel eigenvectors: warn, don't fail.
    let mut defective = false;
    for i in 0..n {
        for j in i + 1..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() < 1e-8 * (1.0 + norm) {
                let dot: Complex64 = eigenvectors[i]
                    .iter()
                    .zip(&eigenvectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                if dot.norm() > 1.0 - 1e-6 {
                    defective = true;
                }
            }
        }
    }

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        defective,
    })
}

/// Unit-norm real eigenvector of a real matrix for a known real eigenvalue,
/// with the first significant component made positive.
pub fn real_inverse_iteration(matrix: &[Vec<f64>], lambda: f64) -> Result<Vec<f64>, EigenError> {
    let n = matrix.len();
    let cmat: CMat = matrix
        .iter()
        .map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect())
        .collect();
    let norm = max_row_sum_norm(&cmat).max(f64::MIN_POSITIVE);
    let v = inverse_iteration(&cmat, Complex64::new(lambda, 0.0), norm).map_err(|res| {
        EigenError::Residual {
            index: 0,
            residual: res,
        }
    })?;
    // The complex phase normalization leaves a residual imaginary part of
    // roundoff size only; project onto the reals and renormalize.
    let mut rv: Vec<f64> = v.iter().map(|z| z.re).collect();
    let nr = rv.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in rv.iter_mut() {
        *x /= nr;
    }
    if let Some(first) = rv.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            for x in rv.iter_mut() {
                *x = -*x;
            }
        }
    }
    let _ = n;
    Ok(rv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_three() {
        let m = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let es = eigensystem_small(&m).unwrap();
        for ev in &es.eigenvalues {
            assert!((ev - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn paper_two_by_two() {
        // [[-2, i], [-i, 0]] has characteristic polynomial l^2 + 2l - 1,
        // so eigenvalues -1 +- sqrt(2).
        let m = vec![
            vec![c(-2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0)],
        ];
        let es = eigensystem_small(&m).unwrap();
        let s2 = 2.0f64.sqrt();
        assert!((es.eigenvalues[0] - c(-1.0 - s2, 0.0)).norm() < 1e-12);
        assert!((es.eigenvalues[1] - c(-1.0 + s2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn real_complex_pair() {
        // Rotation-like block has eigenvalues 1 +- 2i.
        let m = vec![vec![1.0, 2.0], vec![-2.0, 1.0]];
        let eigs = real_hessenberg_eigenvalues(&m).unwrap();
        let mut ims: Vec<f64> = eigs.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + 2.0).abs() < 1e-12 && (ims[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 8, 12, 16] {
            let m: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect();
            let norm = max_row_sum_norm(&m);
            let es = eigensystem_small(&m).unwrap();
            for (ev, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
                let res = residual(&m, *ev, v);
                assert!(
                    res <= 1e-10 * norm,
                    "n={n}: residual {res:e} vs norm {norm:e}"
                );
            }
        }
    }

    #[test]
    fn diagonal_similarity_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 6, 10] {
            let m: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect();
            let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let sim: Vec<Vec<Complex64>> = (0..n)
                .map(|i| (0..n).map(|j| m[i][j] * (s[j] / s[i])).collect())
                .collect();
            let e1 = eigensystem_small(&m).unwrap().eigenvalues;
            let e2 = eigensystem_small(&sim).unwrap().eigenvalues;
            for (a, b) in e1.iter().zip(&e2) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn real_and_complex_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4usize, 9] {
            let m: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let cm: Vec<Vec<Complex64>> = m
                .iter()
                .map(|row| row.iter().map(|&v| c(v, 0.0)).collect())
                .collect();
            let mut e1 = real_hessenberg_eigenvalues(&m).unwrap();
            let mut e2 = complex_hessenberg_eigenvalues(&mut {
                let mut h = cm.clone();
                complex_to_hessenberg(&mut h);
                h
            })
            .unwrap();
            // Conjugate pairs may reorder under any total order, so match
            // each eigenvalue greedily to its nearest partner instead.
            e1.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
            for a in &e1 {
                let (j, d) = e2
                    .iter()
                    .enumerate()
                    .map(|(j, b)| (j, (a - b).norm()))
                    .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                    .unwrap();
                assert!(d < 1e-9, "{a} unmatched (closest {d:e})");
                e2.swap_remove(j);
            }
        }
    }

    #[test]
    fn defective_matrix_flagged_not_failed() {
        // A 2x2 Jordan block: one eigenvector only.
        let m = vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let es = eigensystem_small(&m).unwrap();
        assert!(es.defective);
    }

    #[test]
    fn oversize_rejected() {
        let n = 65;
        let m = vec![vec![c(0.0, 0.0); n]; n];
        assert!(matches!(
            eigensystem_small(&m),
            Err(EigenError::TooLarge { .. })
        ));
    }
}
