//! Dense linear algebra at qubit scale.
//!
//! Everything here works on matrices of dimension at most 8, so the routines
//! favour robustness over speed: cyclic Jacobi for Hermitian spectra,
//! one-sided Jacobi for the 3x3 SVD, and spectral exponentials.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance used when a routine requires Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

pub type Vec3 = [f64; 3];

pub(crate) const C0: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C1: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        ComplexMatrix { dim, data: vec![C0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C1;
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a square.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadDimension { expected: dim * dim, got: data.len() });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        ComplexMatrix { dim: N, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        ComplexMatrix {
            dim: N,
            data: rows.iter().flatten().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len());
        let n = u.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, k: Complex64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&z| z * k).collect() }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product `self ⊗ other`, with `self` as the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == C0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// The three Pauli matrices `[σx, σy, σz]`.
pub fn pauli_matrices() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_rows([[C0, C1], [C1, C0]]),
        ComplexMatrix::from_rows([[C0, -CI], [CI, C0]]),
        ComplexMatrix::from_rows([[C1, C0], [C0, -C1]]),
    ]
}

/// Real 3x3 matrix, row-major. Serializes as nested arrays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealMatrix3(pub [[f64; 3]; 3]);

impl RealMatrix3 {
    pub const IDENTITY: RealMatrix3 = RealMatrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const ZERO: RealMatrix3 = RealMatrix3([[0.0; 3]; 3]);

    pub fn from_diagonal(d: Vec3) -> Self {
        let mut m = Self::ZERO;
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Rotation by `angle` about the unit vector `axis` (Rodrigues).
    pub fn rotation(axis: Vec3, angle: f64) -> Self {
        let n = norm3(axis);
        let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        RealMatrix3([
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
            [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
        ])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[j][i] = self.0[i][j];
            }
        }
        m
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
        ]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn set_column(&mut self, j: usize, v: Vec3) {
        for i in 0..3 {
            self.0[i][j] = v[i];
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        RealMatrix3(self.0.map(|row| row.map(|x| k * x)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    /// `‖MᵀM − I‖_max ≤ tol`
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        (self.transpose() * *self).max_abs_diff(&Self::IDENTITY) <= tol
    }

    /// Orthogonal with determinant +1.
    pub fn is_rotation(&self, tol: f64) -> bool {
        self.is_orthogonal(tol) && (self.det() - 1.0).abs() <= tol
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        svd3(self).sigma[0]
    }
}

impl Mul for RealMatrix3 {
    type Output = RealMatrix3;

    fn mul(self, rhs: RealMatrix3) -> RealMatrix3 {
        let mut m = RealMatrix3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl Add for RealMatrix3 {
    type Output = RealMatrix3;

    fn add(self, rhs: RealMatrix3) -> RealMatrix3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Spectrum of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `M[p][q]`, then applies
/// the classical real Jacobi rotation. Sweeps stop once the off-diagonal
/// Frobenius norm drops below `1e-14` (relative to `max(1, ‖M‖_F)`).
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput(defect));
    }
    let n = m.dim();
    let mut a = m.clone();
    // symmetrize so the rotations see an exactly Hermitian matrix
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm().max(1.0);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) >= threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g; // e^{iφ}
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let ph_conj = phase.conj();
                let (new_pp, new_qq) = (a[(p, p)].re - t * g, a[(q, q)].re + t * g);

                // A <- A J, V <- V J with J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - akq * ph_conj * s;
                    a[(k, q)] = akp * s + akq * ph_conj * c;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c - vkq * ph_conj * s;
                    v[(k, q)] = vkp * s + vkq * ph_conj * c;
                }
                // A <- J† A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = C0;
                a[(q, p)] = C0;
                // the closed-form diagonal update avoids rounding from c and s
                a[(p, p)] = Complex64::new(new_pp, 0.0);
                a[(q, q)] = Complex64::new(new_qq, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.values[0])
}

/// Singular value decomposition `A = U·diag(sigma)·Vᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Svd3 {
    pub u: RealMatrix3,
    /// Descending, nonnegative.
    pub sigma: Vec3,
    pub v: RealMatrix3,
}

impl Svd3 {
    pub fn reconstruct(&self) -> RealMatrix3 {
        self.u * RealMatrix3::from_diagonal(self.sigma) * self.v.transpose()
    }
}

/// SVD of a real 3x3 matrix.
///
/// One-sided (Hestenes) Jacobi: plane rotations `V` are accumulated until the
/// columns of `A·V` are mutually orthogonal, which diagonalizes `AᵀA`
/// implicitly without squaring the condition number. Columns of `U` belonging
/// to numerically zero singular values are completed to an orthonormal basis.
pub fn svd3(a: &RealMatrix3) -> Svd3 {
    let mut w = *a;
    let mut v = RealMatrix3::IDENTITY;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..2 {
            for j in (i + 1)..3 {
                let wi = w.column(i);
                let wj = w.column(j);
                let alpha = dot3(wi, wi);
                let beta = dot3(wj, wj);
                let gamma = dot3(wi, wj);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + zeta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for k in 0..3 {
                        let (x, y) = (m.0[k][i], m.0[k][j]);
                        m.0[k][i] = c * x - s * y;
                        m.0[k][j] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms = [0, 1, 2].map(|j| norm3(w.column(j)));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma = order.map(|j| norms[j]);
    let mut u = RealMatrix3::ZERO;
    let mut v_sorted = RealMatrix3::ZERO;
    for (col, &src) in order.iter().enumerate() {
        v_sorted.set_column(col, v.column(src));
    }

    let cutoff = 1e-13 * sigma[0];
    let mut basis: Vec<Vec3> = Vec::with_capacity(3);
    for (col, &src) in order.iter().enumerate() {
        if sigma[col] > cutoff && sigma[col] > 0.0 {
            let c = w.column(src);
            basis.push(c.map(|x| x / sigma[col]));
        } else {
            basis.push(orthonormal_complement(&basis));
        }
        u.set_column(col, basis[col]);
    }

    Svd3 { u, sigma, v: v_sorted }
}

/// A unit vector orthogonal to every vector in `basis` (at most two, orthonormal).
fn orthonormal_complement(basis: &[Vec3]) -> Vec3 {
    match basis.len() {
        0 => [1.0, 0.0, 0.0],
        1 => {
            let b = basis[0];
            // axis least aligned with b
            let k = (0..3)
                .min_by(|&i, &j| b[i].abs().total_cmp(&b[j].abs()))
                .expect("three axes");
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let d = dot3(e, b);
            let r = [e[0] - d * b[0], e[1] - d * b[1], e[2] - d * b[2]];
            let n = norm3(r);
            r.map(|x| x / n)
        }
        _ => {
            let c = cross3(basis[0], basis[1]);
            let n = norm3(c);
            c.map(|x| x / n)
        }
    }
}

/// `exp(−iHt)` for Hermitian `H`, computed spectrally (ħ = 1).
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let n = h.dim();
    let mut out = ComplexMatrix::zeros(n);
    for k in 0..n {
        let phase = Complex64::from_polar(1.0, -eig.values[k] * t);
        for i in 0..n {
            let vik = eig.vectors[(i, k)] * phase;
            for j in 0..n {
                out[(i, j)] += vik * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Traces out the ancilla of a qubit ⊗ ancilla operator (qubit is the slow index).
pub fn partial_trace_ancilla(rho: &ComplexMatrix, ancilla_dim: usize) -> Result<ComplexMatrix> {
    let expected = 2 * ancilla_dim;
    if ancilla_dim == 0 || rho.dim() != expected {
        return Err(Error::BadDimension { expected, got: rho.dim() });
    }
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = (0..ancilla_dim)
                .map(|a| rho[(i * ancilla_dim + a, j * ancilla_dim + a)])
                .sum();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(dim: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        let mut it = entries.iter().cycle();
        for i in 0..dim {
            for j in i..dim {
                let &(re, im) = it.next().unwrap();
                if i == j {
                    m[(i, i)] = c(re, 0.0);
                } else {
                    m[(i, j)] = c(re, im);
                    m[(j, i)] = c(re, -im);
                }
            }
        }
        m
    }

    fn check_eig(m: &ComplexMatrix) {
        let eig = hermitian_eig(m).unwrap();
        let n = m.dim();
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for k in 0..n {
            let vk = eig.vectors.column(k);
            let mv = m.mul_vec(&vk);
            for i in 0..n {
                assert!((mv[i] - vk[i] * eig.values[k]).norm() < 1e-10);
            }
        }
        let gram = &eig.vectors.adjoint() * &eig.vectors;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let eig = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(eig.values, vec![1.0; 4]);
        let eig = hermitian_eig(&ComplexMatrix::diagonal(&[3.0, -1.0, 2.0, 0.0])).unwrap();
        assert_eq!(eig.values, vec![-1.0, 0.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitianInput(_))));
    }

    #[test]
    fn eig_complex_pivots() {
        // σy has eigenvalues ±1 with complex eigenvectors
        let [_, sy, _] = pauli_matrices();
        let eig = hermitian_eig(&sy).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        check_eig(&sy);
        let m = random_hermitian(8, &[(0.3, -0.7), (1.1, 0.2), (-0.4, 0.9), (0.05, 0.0), (2.0, -1.5)]);
        check_eig(&m);
    }

    #[test]
    fn svd_examples() {
        let s = svd3(&RealMatrix3::IDENTITY);
        assert_eq!(s.sigma, [1.0, 1.0, 1.0]);
        assert!(s.u.max_abs_diff(&RealMatrix3::IDENTITY) < 1e-15);
        assert!(s.v.max_abs_diff(&RealMatrix3::IDENTITY) < 1e-15);

        let s = svd3(&RealMatrix3::ZERO);
        assert_eq!(s.sigma, [0.0, 0.0, 0.0]);
        assert!(s.u.is_orthogonal(1e-12) && s.v.is_orthogonal(1e-12));

        let a = RealMatrix3::from_diagonal([2.0, -1.0, 0.5]);
        let s = svd3(&a);
        assert_eq!(s.sigma, [2.0, 1.0, 0.5]);
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn svd_rank_deficient() {
        // rank one: outer product
        let a = RealMatrix3([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [-1.0, -2.0, -3.0]]);
        let s = svd3(&a);
        assert!(s.u.is_orthogonal(1e-10) && s.v.is_orthogonal(1e-10));
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-10);
        assert!(s.sigma[1] < 1e-12 && s.sigma[2] < 1e-12);
    }

    #[test]
    fn exp_examples() {
        let h = random_hermitian(4, &[(0.3, 0.4), (1.0, -0.2), (0.7, 0.0)]);
        let u = unitary_exp(&h, 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);

        let u = unitary_exp(&ComplexMatrix::diagonal(&[1.0, -1.0]), PI).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::diagonal(&[-1.0, -1.0])) < 1e-12);
    }

    #[test]
    fn exp_coupled_subspace_squares_to_minus_identity() {
        // H = σx ⊗ (|a1><a2| + |a2><a1|) on the 8-dim space; H² = I on the
        // support of the coupling, so U(π/2) = −iH there and U² = −1.
        let [sx, _, _] = pauli_matrices();
        let mut flip = ComplexMatrix::zeros(4);
        flip[(0, 1)] = C1;
        flip[(1, 0)] = C1;
        let h = sx.kron(&flip);
        let u = unitary_exp(&h, PI / 2.0).unwrap();

        // oracle: truncated power series of exp(−iHt)
        let t = PI / 2.0;
        let mut series = ComplexMatrix::identity(8);
        let mut term = ComplexMatrix::identity(8);
        for k in 1..60 {
            term = (&term * &h).scale(c(0.0, -t / k as f64));
            series = &series + &term;
        }
        assert!(u.max_abs_diff(&series) < 1e-10);

        let u2 = &u * &u;
        for q in 0..2 {
            for a in 0..2 {
                let i = q * 4 + a;
                assert!((u2[(i, i)] + C1).norm() < 1e-10);
            }
        }
        // the uncoupled ancilla levels stay untouched
        assert!((u[(2, 2)] - C1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let rho_q = ComplexMatrix::from_rows([[c(0.7, 0.0), c(0.1, -0.2)], [c(0.1, 0.2), c(0.3, 0.0)]]);
        let mut a1 = ComplexMatrix::zeros(4);
        a1[(0, 0)] = C1;
        let pt = partial_trace_ancilla(&rho_q.kron(&a1), 4).unwrap();
        assert!(pt.max_abs_diff(&rho_q) < 1e-15);

        let mixed = ComplexMatrix::identity(8).scale_real(1.0 / 8.0);
        let pt = partial_trace_ancilla(&mixed, 4).unwrap();
        assert!(pt.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        assert!(matches!(
            partial_trace_ancilla(&ComplexMatrix::identity(4), 4),
            Err(Error::BadDimension { expected: 8, got: 4 })
        ));
    }

    fn arb_hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), dim * (dim + 1) / 2)
            .prop_map(move |e| random_hermitian(dim, &e))
    }

    fn arb_density8() -> impl Strategy<Value = ComplexMatrix> {
        arb_hermitian(8).prop_map(|h| {
            // ρ = H H† / Tr(H H†)
            let p = &h * &h.adjoint();
            let tr = p.trace().re;
            p.scale_real(1.0 / tr)
        })
    }

    proptest! {
        #[test]
        fn eig_reconstructs(m in prop_oneof![arb_hermitian(2), arb_hermitian(4), arb_hermitian(8)]) {
            let eig = hermitian_eig(&m).unwrap();
            let n = m.dim();
            let mut rec = ComplexMatrix::zeros(n);
            for k in 0..n {
                let v = eig.vectors.column(k);
                rec = &rec + &ComplexMatrix::outer(&v, &v).scale_real(eig.values[k]);
            }
            prop_assert!(rec.max_abs_diff(&m) < 1e-9);
            check_eig(&m);
        }

        #[test]
        fn exp_group_law(h in arb_hermitian(4), s in -3.0f64..3.0, t in -3.0f64..3.0) {
            let us = unitary_exp(&h, s).unwrap();
            let ut = unitary_exp(&h, t).unwrap();
            let ust = unitary_exp(&h, s + t).unwrap();
            prop_assert!((&us * &ut).max_abs_diff(&ust) < 1e-9);
            prop_assert!((&ust * &ust.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
        }

        #[test]
        fn partial_trace_linear_and_trace_preserving(
            r1 in arb_density8(), r2 in arb_density8(), lam in 0.0f64..1.0
        ) {
            let mix = &r1.scale_real(lam) + &r2.scale_real(1.0 - lam);
            let lhs = partial_trace_ancilla(&mix, 4).unwrap();
            let rhs = &partial_trace_ancilla(&r1, 4).unwrap().scale_real(lam)
                + &partial_trace_ancilla(&r2, 4).unwrap().scale_real(1.0 - lam);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            prop_assert!((lhs.trace() - C1).norm() < 1e-10);
            prop_assert!(lhs.is_hermitian(1e-12));
        }

        #[test]
        fn partial_trace_ignores_ancilla_unitaries(rho in arb_density8(), h in arb_hermitian(4), t in -2.0f64..2.0) {
            let u = ComplexMatrix::identity(2).kron(&unitary_exp(&h, t).unwrap());
            let rotated = &(&u * &rho) * &u.adjoint();
            let a = partial_trace_ancilla(&rho, 4).unwrap();
            let b = partial_trace_ancilla(&rotated, 4).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-10);
        }

        #[test]
        fn svd_reconstructs(entries in proptest::array::uniform9(-3.0f64..3.0)) {
            let a = RealMatrix3([
                [entries[0], entries[1], entries[2]],
                [entries[3], entries[4], entries[5]],
                [entries[6], entries[7], entries[8]],
            ]);
            let s = svd3(&a);
            prop_assert!(s.u.is_orthogonal(1e-10));
            prop_assert!(s.v.is_orthogonal(1e-10));
            prop_assert!(s.reconstruct().max_abs_diff(&a) <= 1e-10);
            prop_assert!(s.sigma[0] >= s.sigma[1] && s.sigma[1] >= s.sigma[2] && s.sigma[2] >= 0.0);
        }
    }
}
