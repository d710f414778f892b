//! The algebraic heart of the model: the gauge-transformed Hamiltonian on
//! the n-dimensional monomial invariant subspace in z = sinh x, its sl(2)
//! quadratic-combination form, and the exactly solvable part of the
//! spectrum with polynomial eigenvectors.

use crate::numerics::{
    real_hessenberg_eigenvalues, real_inverse_iteration, EigenError, REALITY_SNAP_TOL,
};
use crate::potential::ModelParams;
use num_complex::Complex64;

#[derive(Debug, Clone, thiserror::Error)]
pub enum QesError {
    #[error("matrix entry ({row}, {col}) = {value} violates the band/reality pattern")]
    PatternViolation {
        row: usize,
        col: usize,
        value: Complex64,
    },
    #[error("spectrum is not real within the snap tolerance: {values:?}")]
    ComplexEigenvalue { values: Vec<Complex64> },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// The gauge factor g with psi = e^{-g} phi:
/// g(x) = i b sinh(x)/2 + (n - 1/2) ln cosh x.
#[derive(Debug, Clone, Copy)]
pub struct GaugeFactor {
    params: ModelParams,
}

impl GaugeFactor {
    pub fn new(params: ModelParams) -> Self {
        GaugeFactor { params }
    }

    pub fn g(&self, x: f64) -> Complex64 {
        let nm = self.params.n() as f64 - 0.5;
        Complex64::new(nm * x.cosh().ln(), 0.5 * self.params.b() * x.sinh())
    }

    pub fn g_prime(&self, x: f64) -> Complex64 {
        let nm = self.params.n() as f64 - 0.5;
        Complex64::new(nm * x.tanh(), 0.5 * self.params.b() * x.cosh())
    }
}

/// Matrix of the transformed Hamiltonian on the monomial basis
/// {1, z, ..., z^{n-1}}: column k holds the coefficients of H z^k.
#[derive(Debug, Clone, PartialEq)]
pub struct QesMatrix {
    pub params: ModelParams,
    pub entries: Vec<Vec<Complex64>>,
}

/// One exactly solvable level: energy and the polynomial factor
/// phi(z) = sum coeffs[k] z^k of the full wavefunction e^{-g} phi.
#[derive(Debug, Clone)]
pub struct QesState {
    pub energy: f64,
    pub coeffs: Vec<Complex64>,
    pub params: ModelParams,
    /// 1-based rank by ascending energy.
    pub level_index: usize,
}

/// The transformed Hamiltonian
/// -(z^2+1) d^2/dz^2 + (i b z^2 + 2(n-1)z + i b) d/dz - i b (n-1) z
/// + b^2/4 - (n - 1/2)^2
/// applied to each monomial z^k and collected by power.
pub fn build_hg_matrix(params: &ModelParams) -> QesMatrix {
    let n = params.n() as usize;
    let b = params.b();
    let nf = params.n() as f64;
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        let kf = k as f64;
        if k + 1 < n {
            entries[k + 1][k] = Complex64::new(0.0, b * (kf - nf + 1.0));
        }
        entries[k][k] = Complex64::new(
            -kf * (kf - 1.0) + 2.0 * (nf - 1.0) * kf + b * b / 4.0 - (nf - 0.5) * (nf - 0.5),
            0.0,
        );
        if k >= 1 {
            entries[k - 1][k] = Complex64::new(0.0, b * kf);
        }
        if k >= 2 {
            entries[k - 2][k] = Complex64::new(-kf * (kf - 1.0), 0.0);
        }
    }
    QesMatrix {
        params: *params,
        entries,
    }
}

/// Which sl(2) generator to realize on the monomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sl2Generator {
    /// J+ = z^2 d/dz - (n-1) z
    Plus,
    /// J0 = z d/dz - (n-1)/2
    Zero,
    /// J- = d/dz
    Minus,
}

/// Monomial-basis matrix of one sl(2) generator in the n-dimensional
/// representation.
pub fn sl2_generator(which: Sl2Generator, n: u32) -> Vec<Vec<f64>> {
    let n = n as usize;
    let nm = n as f64 - 1.0;
    let mut m = vec![vec![0.0f64; n]; n];
    for k in 0..n {
        let kf = k as f64;
        match which {
            Sl2Generator::Plus => {
                if k + 1 < n {
                    m[k + 1][k] = kf - nm;
                }
            }
            Sl2Generator::Zero => {
                m[k][k] = kf - nm / 2.0;
            }
            Sl2Generator::Minus => {
                if k >= 1 {
                    m[k - 1][k] = kf;
                }
            }
        }
    }
    m
}

fn real_matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// The same Hamiltonian assembled as the sl(2) quadratic combination
/// -J+J- - J-J- + ib J+ + ib J- + (n-1) J0 + (b^2/4 - (n^2 - 1/2)/2) I.
pub fn build_sl2_matrix(params: &ModelParams) -> QesMatrix {
    let n = params.n() as usize;
    let nf = params.n() as f64;
    let b = params.b();
    let jp = sl2_generator(Sl2Generator::Plus, params.n());
    let j0 = sl2_generator(Sl2Generator::Zero, params.n());
    let jm = sl2_generator(Sl2Generator::Minus, params.n());
    let jpjm = real_matmul(&jp, &jm);
    let jmjm = real_matmul(&jm, &jm);
    let constant = b * b / 4.0 - 0.5 * (nf * nf - 0.5);

    let mut entries = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let re = -jpjm[i][j] - jmjm[i][j]
                + (nf - 1.0) * j0[i][j]
                + if i == j { constant } else { 0.0 };
            let im = b * (jp[i][j] + jm[i][j]);
            entries[i][j] = Complex64::new(re, im);
        }
    }
    QesMatrix {
        params: *params,
        entries,
    }
}

/// Conjugation by S = diag(i^k) turns the i^k-alternating matrix into a
/// real upper-Hessenberg one with the same spectrum: subdiagonal
/// b(k-n+1), diagonal unchanged, superdiagonal -b k, second superdiagonal
/// k(k-1). Inputs outside that band/reality pattern are rejected.
pub fn to_real_similar(m: &QesMatrix) -> Result<Vec<Vec<f64>>, QesError> {
    let n = m.entries.len();
    let mut t = vec![vec![0.0f64; n]; n];
    for (i, row) in m.entries.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let on_band = i == j || i + 1 == j || i == j + 1 || i + 2 == j;
            let bad_zero = !on_band && v.norm() > 0.0;
            // Diagonal and second superdiagonal must be real, the first
            // off-diagonals purely imaginary.
            let bad_reality = (i == j || i + 2 == j) && v.im != 0.0
                || (i + 1 == j || i == j + 1) && v.re != 0.0;
            if bad_zero || on_band && bad_reality {
                return Err(QesError::PatternViolation {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            if !on_band {
                continue;
            }
            // (S^{-1} M S)_{ij} = i^{j-i} M_{ij}: one factor of i per
            // superdiagonal step, one factor of -i per subdiagonal step.
            t[i][j] = match j as isize - i as isize {
                0 => v.re,
                1 => -v.im,  // i * (i v.im) = -v.im
                -1 => v.im,  // -i * (i v.im) = v.im
                2 => -v.re,  // i^2 * v.re
                _ => unreachable!("outside the validated band"),
            };
        }
    }
    Ok(t)
}

fn lex_less(a: &[Complex64], b: &[Complex64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x.re, x.im) != (y.re, y.im) {
            return (x.re, x.im) < (y.re, y.im);
        }
    }
    false
}

/// All n exactly solvable levels, energies ascending (ties broken by
/// lexicographic coefficient order). Fails if any eigenvalue of the real
/// similar matrix refuses to be real within the snap tolerance.
pub fn qes_spectrum(params: &ModelParams) -> Result<Vec<QesState>, QesError> {
    let m = build_hg_matrix(params);
    let t = to_real_similar(&m)?;
    let raw = real_hessenberg_eigenvalues(&t)?;

    let mut energies = Vec::with_capacity(raw.len());
    for ev in &raw {
        if ev.im.abs() >= REALITY_SNAP_TOL * (1.0 + ev.re.abs()) {
            return Err(QesError::ComplexEigenvalue { values: raw });
        }
        energies.push(ev.re);
    }
    energies.sort_by(|a, b| a.partial_cmp(b).expect("energies are finite"));

    let mut states = Vec::with_capacity(energies.len());
    for &energy in &energies {
        let r = real_inverse_iteration(&t, energy)?;
        // Map back through S: coefficients i^k r_k carry the alternating
        // structure exactly.
        let coeffs: Vec<Complex64> = r
            .iter()
            .enumerate()
            .map(|(k, &v)| Complex64::i().powu(k as u32) * v)
            .collect();
        states.push(QesState {
            energy,
            coeffs,
            params: *params,
            level_index: 0,
        });
    }
    states.sort_by(|a, b| {
        a.energy
            .partial_cmp(&b.energy)
            .expect("energies are finite")
            .then_with(|| {
                if lex_less(&a.coeffs, &b.coeffs) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
    });
    for (i, s) in states.iter_mut().enumerate() {
        s.level_index = i + 1;
    }
    Ok(states)
}

/// psi and its first two u-derivatives (u = sinh x) from the closed form
/// psi(u) = e^{-i b u / 2} (1+u^2)^{-(2n-1)/4} phi(u); evaluating in u
/// avoids catastrophic phase noise from sinh at large |x|.
fn psi_of_u(state: &QesState, u: f64) -> Complex64 {
    let b = state.params.b();
    let n = state.params.n() as f64;
    let mut phi = Complex64::new(0.0, 0.0);
    for &c in state.coeffs.iter().rev() {
        phi = phi * u + c;
    }
    let envelope = (1.0 + u * u).powf(-(2.0 * n - 1.0) / 4.0);
    Complex64::new(0.0, -0.5 * b * u).exp() * envelope * phi
}

/// Max over the grid of |-psi'' + (V - E) psi| / (1 + |E psi|), with the
/// second x-derivative taken by 8th-order finite differences on a uniform
/// u-grid via psi_xx = (1+u^2) psi_uu + u psi_u.
pub fn verify_schrodinger_residual(state: &QesState, x_grid: &[f64]) -> f64 {
    const D1: [f64; 9] = [
        1.0 / 280.0,
        -4.0 / 105.0,
        1.0 / 5.0,
        -4.0 / 5.0,
        0.0,
        4.0 / 5.0,
        -1.0 / 5.0,
        4.0 / 105.0,
        -1.0 / 280.0,
    ];
    const D2: [f64; 9] = [
        -1.0 / 560.0,
        8.0 / 315.0,
        -1.0 / 5.0,
        8.0 / 5.0,
        -205.0 / 72.0,
        8.0 / 5.0,
        -1.0 / 5.0,
        8.0 / 315.0,
        -1.0 / 560.0,
    ];
    let b = state.params.b();
    // Power-of-two cap, shrunk until the phase advance per step is small.
    let mut h_cap = 0.125f64;
    while h_cap * b > 0.125 {
        h_cap *= 0.5;
    }
    let e = state.energy;
    let lam = state.params.well_depth();

    let mut worst = 0.0f64;
    for &x in x_grid {
        let u_raw = x.sinh();
        // The nearest singularity of the envelope sits at u = +-i, so the
        // derivatives feeding the truncation error grow like
        // k!/(1+u^2)^{k/2}; scale the step with that local radius (still
        // a power of two).
        let radius = 0.03 * (1.0 + u_raw * u_raw).sqrt();
        let mut h = h_cap;
        while h > radius && h > 9.8e-4 {
            h *= 0.5;
        }
        // Snap the center onto the exact h-grid: every stencil node is
        // then exactly representable, killing phase jitter at large u.
        let u = (u_raw / h).round() * h;
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        let mut center = Complex64::new(0.0, 0.0);
        for (j, (&c1, &c2)) in D1.iter().zip(D2.iter()).enumerate() {
            let v = psi_of_u(state, u + (j as f64 - 4.0) * h);
            d1 += v.scale(c1);
            d2 += v.scale(c2);
            if j == 4 {
                center = v;
            }
        }
        let psi_u = d1.scale(1.0 / h);
        let psi_uu = d2.scale(1.0 / (h * h));
        let psi_xx = psi_uu.scale(1.0 + u * u) + psi_u.scale(u);
        // V expressed through u so potential and stencil share the exact
        // same evaluation point.
        let v = -(b * b / 4.0) * u * u - lam / (1.0 + u * u);
        let residual = (-psi_xx + center.scale(v - e)).norm();
        let denom = 1.0 + (center.scale(e)).norm();
        worst = worst.max(residual / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eigensystem_small;

    fn params(b: f64, n: u32) -> ModelParams {
        ModelParams::new(b, n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // -----------------------------------------------------------------
    // Symbolic oracle: complex polynomial arithmetic, and the
    // differential operator applied term by term.
    // -----------------------------------------------------------------

    #[derive(Debug, Clone, PartialEq)]
    struct Poly(Vec<Complex64>);

    impl Poly {
        fn monomial(k: usize) -> Poly {
            let mut v = vec![c(0.0, 0.0); k + 1];
            v[k] = c(1.0, 0.0);
            Poly(v)
        }
        fn deriv(&self) -> Poly {
            if self.0.len() <= 1 {
                return Poly(vec![c(0.0, 0.0)]);
            }
            Poly(
                self.0
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &a)| a.scale(k as f64))
                    .collect(),
            )
        }
        fn shift(&self, powers: usize) -> Poly {
            let mut v = vec![c(0.0, 0.0); powers];
            v.extend_from_slice(&self.0);
            Poly(v)
        }
        fn scale(&self, s: Complex64) -> Poly {
            Poly(self.0.iter().map(|&a| a * s).collect())
        }
        fn add(&self, other: &Poly) -> Poly {
            let len = self.0.len().max(other.0.len());
            let at = |p: &Poly, k: usize| p.0.get(k).copied().unwrap_or(c(0.0, 0.0));
            Poly((0..len).map(|k| at(self, k) + at(other, k)).collect())
        }
        fn degree(&self) -> usize {
            self.0
                .iter()
                .rposition(|a| a.norm() > 1e-13)
                .unwrap_or(0)
        }
        fn coeff(&self, k: usize) -> Complex64 {
            self.0.get(k).copied().unwrap_or(c(0.0, 0.0))
        }
    }

    /// The transformed Hamiltonian as a symbolic operator on polynomials.
    fn apply_operator(p: &ModelParams, phi: &Poly) -> Poly {
        let b = p.b();
        let nf = p.n() as f64;
        let d1 = phi.deriv();
        let d2 = d1.deriv();
        // -(z^2 + 1) phi''
        let term1 = d2.shift(2).add(&d2).scale(c(-1.0, 0.0));
        // (i b z^2 + 2(n-1) z + i b) phi'
        let term2 = d1
            .shift(2)
            .scale(c(0.0, b))
            .add(&d1.shift(1).scale(c(2.0 * (nf - 1.0), 0.0)))
            .add(&d1.scale(c(0.0, b)));
        // (-i b (n-1) z + b^2/4 - (n-1/2)^2) phi
        let term3 = phi
            .shift(1)
            .scale(c(0.0, -b * (nf - 1.0)))
            .add(&phi.scale(c(b * b / 4.0 - (nf - 0.5) * (nf - 0.5), 0.0)));
        term1.add(&term2).add(&term3)
    }

    #[test]
    fn matrix_columns_match_symbolic_operator() {
        for &(b, n) in &[(1.0, 1u32), (1.0, 2), (0.3, 5), (2.7, 8)] {
            let p = params(b, n);
            let m = build_hg_matrix(&p);
            for k in 0..n as usize {
                let image = apply_operator(&p, &Poly::monomial(k));
                for row in 0..n as usize {
                    let want = image.coeff(row);
                    let got = m.entries[row][k];
                    assert!(
                        (want - got).norm() < 1e-13,
                        "b={b} n={n} col {k} row {row}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn invariant_subspace_closure() {
        // The operator maps degree <= n-1 polynomials to degree <= n-1.
        for n in [1u32, 2, 4, 7] {
            let p = params(1.3, n);
            let poly = Poly(
                (0..n as usize)
                    .map(|k| c(0.3 * k as f64 - 0.7, 0.1 * k as f64))
                    .collect(),
            );
            let image = apply_operator(&p, &poly);
            assert!(
                image.degree() <= (n as usize).saturating_sub(1),
                "n={n}: degree {}",
                image.degree()
            );
        }
    }

    #[test]
    fn smallest_cases() {
        let m1 = build_hg_matrix(&params(1.0, 1));
        assert_eq!(m1.entries.len(), 1);
        assert!(m1.entries[0][0].norm() < 1e-15);

        let m2 = build_hg_matrix(&params(1.0, 2));
        let want = [[c(-2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(0.0, 0.0)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m2.entries[i][j] - want[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn closure_entry_vanishes() {
        for &(b, n) in &[(1.0, 2u32), (0.4, 5), (3.0, 9)] {
            let m = build_hg_matrix(&params(b, n));
            let k = n as usize - 1;
            // The would-be overflow coefficient i b (k - n + 1) at k = n-1.
            if k >= 1 {
                let below = m.entries[k][k - 1];
                assert!((below.im - b * ((k - 1) as f64 - n as f64 + 1.0)).abs() < 1e-15);
            }
            // No column writes past the last row by construction; the
            // algebraic coefficient at k = n-1 is zero:
            assert_eq!(b * (k as f64 - n as f64 + 1.0), 0.0);
        }
    }

    #[test]
    fn sl2_generator_matrices() {
        let jm = sl2_generator(Sl2Generator::Minus, 3);
        assert_eq!(jm[0][1], 1.0);
        assert_eq!(jm[1][2], 2.0);
        let j0 = sl2_generator(Sl2Generator::Zero, 2);
        assert_eq!(j0[0][0], -0.5);
        assert_eq!(j0[1][1], 0.5);
    }

    #[test]
    fn commutator_plus_minus() {
        // [J+, J-] = -2 J0 in this realization.
        for n in [2u32, 3, 6] {
            let jp = sl2_generator(Sl2Generator::Plus, n);
            let jm = sl2_generator(Sl2Generator::Minus, n);
            let j0 = sl2_generator(Sl2Generator::Zero, n);
            let lhs = real_matmul(&jp, &jm);
            let rhs = real_matmul(&jm, &jp);
            for i in 0..n as usize {
                for j in 0..n as usize {
                    let comm = lhs[i][j] - rhs[i][j];
                    assert!(
                        (comm + 2.0 * j0[i][j]).abs() < 1e-13,
                        "n={n} ({i},{j}): {comm}"
                    );
                }
            }
        }
    }

    #[test]
    fn sl2_equals_hg_on_grid() {
        for n in 1..=10u32 {
            for &b in &[0.1, 0.5, 1.0, 2.0, 5.0] {
                let p = params(b, n);
                let a = build_hg_matrix(&p);
                let s = build_sl2_matrix(&p);
                for i in 0..n as usize {
                    for j in 0..n as usize {
                        assert!(
                            (a.entries[i][j] - s.entries[i][j]).norm() < 1e-13,
                            "b={b} n={n} ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn real_similar_canonical_case() {
        let t = to_real_similar(&build_hg_matrix(&params(1.0, 2))).unwrap();
        assert_eq!(t, vec![vec![-2.0, -1.0], vec![-1.0, 0.0]]);
        let eigs = real_hessenberg_eigenvalues(&t).unwrap();
        let mut re: Vec<f64> = eigs.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s2 = 2.0f64.sqrt();
        assert!((re[0] + 1.0 + s2).abs() < 1e-12);
        assert!((re[1] + 1.0 - s2).abs() < 1e-12);
    }

    #[test]
    fn real_similar_preserves_spectrum() {
        let p = params(1.0, 5);
        let m = build_hg_matrix(&p);
        let t = to_real_similar(&m).unwrap();
        let mut from_t: Vec<f64> = real_hessenberg_eigenvalues(&t)
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        from_t.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let from_m = eigensystem_small(&m.entries).unwrap().eigenvalues;
        for (a, b) in from_t.iter().zip(&from_m) {
            assert!((a - b.re).abs() < 1e-10 && b.im.abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn real_similar_rejects_pattern_violations() {
        let mut m = build_hg_matrix(&params(1.0, 3));
        m.entries[0][2] = c(0.0, 0.5); // second superdiagonal must be real
        assert!(matches!(
            to_real_similar(&m),
            Err(QesError::PatternViolation { row: 0, col: 2, .. })
        ));
        let mut m2 = build_hg_matrix(&params(1.0, 3));
        m2.entries[2][0] = c(1e-3, 0.0); // outside the band
        assert!(matches!(
            to_real_similar(&m2),
            Err(QesError::PatternViolation { .. })
        ));
    }

    #[test]
    fn two_level_spectrum_closed_form() {
        let states = qes_spectrum(&params(1.0, 2)).unwrap();
        let s2 = 2.0f64.sqrt();
        assert_eq!(states.len(), 2);
        assert!((states[0].energy + 1.0 + s2).abs() < 1e-12);
        assert!((states[1].energy + 1.0 - s2).abs() < 1e-12);
        assert_eq!(states[0].level_index, 1);
        assert_eq!(states[1].level_index, 2);
    }

    #[test]
    fn n2_characteristic_polynomial_identity() {
        // Energies are the roots of l^2 - (d0+d1) l + d0 d1 - b^2 = 0 with
        // d0, d1 the diagonal entries.
        for &b in &[0.3, 1.0, 2.0, 6.0] {
            let p = params(b, 2);
            let m = build_hg_matrix(&p);
            let (d0, d1) = (m.entries[0][0].re, m.entries[1][1].re);
            for s in qes_spectrum(&p).unwrap() {
                let l = s.energy;
                let res = l * l - (d0 + d1) * l + d0 * d1 - b * b;
                assert!(res.abs() < 1e-12 * (1.0 + l * l), "b={b}: {res:e}");
            }
        }
    }

    #[test]
    fn published_four_level_row() {
        let states = qes_spectrum(&params(1.0, 4)).unwrap();
        let printed = [-12.301, -6.523, -2.760, 1.585];
        for (s, want) in states.iter().zip(&printed) {
            assert!(
                (s.energy - want).abs() < 5e-4,
                "level {}: {} vs {want}",
                s.level_index,
                s.energy
            );
        }
    }

    #[test]
    fn trivial_level() {
        let states = qes_spectrum(&params(1.0, 1)).unwrap();
        assert_eq!(states.len(), 1);
        assert!(states[0].energy.abs() < 1e-14);
        assert!((states[0].coeffs[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigen_residual_and_alternating_structure() {
        for &(b, n) in &[(1.0, 2u32), (1.0, 5), (0.5, 8), (3.0, 3)] {
            let p = params(b, n);
            let m = build_hg_matrix(&p);
            let norm: f64 = m
                .entries
                .iter()
                .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max);
            for s in qes_spectrum(&p).unwrap() {
                // Residual against the complex matrix.
                let mut res = 0.0f64;
                for i in 0..n as usize {
                    let mut acc = c(0.0, 0.0);
                    for j in 0..n as usize {
                        acc += m.entries[i][j] * s.coeffs[j];
                    }
                    acc -= s.coeffs[i].scale(s.energy);
                    res += acc.norm_sqr();
                }
                assert!(res.sqrt() <= 1e-10 * norm, "b={b} n={n}: {:e}", res.sqrt());
                // coeffs[k] i^{-k} real, first nonzero positive.
                let mut first_seen = false;
                for (k, ck) in s.coeffs.iter().enumerate() {
                    let stripped = ck * Complex64::i().powu(k as u32).conj();
                    assert!(
                        stripped.im.abs() < 1e-12,
                        "b={b} n={n} k={k}: {stripped}"
                    );
                    if !first_seen && stripped.norm() > 1e-12 {
                        assert!(stripped.re > 0.0);
                        first_seen = true;
                    }
                }
            }
        }
    }

    #[test]
    fn spectrum_real_on_grid() {
        for n in 1..=8u32 {
            for &b in &[0.1, 0.5, 1.0, 2.0, 5.0] {
                assert!(qes_spectrum(&params(b, n)).is_ok(), "b={b} n={n}");
            }
        }
    }

    #[test]
    fn gauge_factor_symmetries() {
        let g = GaugeFactor::new(params(1.7, 3));
        for i in 1..30 {
            let x = 0.2 * i as f64;
            let plus = g.g(x);
            let minus = g.g(-x);
            assert!((plus.re - minus.re).abs() < 1e-12);
            assert!((plus.im + minus.im).abs() < 1e-12);
        }
        // g' is d/dx of g (finite-difference check).
        let h = 1e-5;
        for &x in &[0.0, 0.7, -1.3] {
            let fd = (g.g(x + h) - g.g(x - h)).scale(1.0 / (2.0 * h));
            assert!((fd - g.g_prime(x)).norm() < 1e-8);
        }
    }

    #[test]
    fn schrodinger_residual_small_cases() {
        let grid: Vec<f64> = (-40..=40).map(|i| 0.25 * i as f64).collect();
        let s1 = &qes_spectrum(&params(1.0, 1)).unwrap()[0];
        assert!(verify_schrodinger_residual(s1, &grid) <= 1e-6);
        for s in qes_spectrum(&params(1.0, 2)).unwrap() {
            assert!(verify_schrodinger_residual(&s, &grid) <= 1e-6);
        }
    }

    #[test]
    fn zero_state_zero_residual() {
        let p = params(1.0, 2);
        let zero = QesState {
            energy: 0.0,
            coeffs: vec![c(0.0, 0.0); 2],
            params: p,
            level_index: 1,
        };
        assert_eq!(verify_schrodinger_residual(&zero, &[0.0, 1.0, -2.0]), 0.0);
    }
}
