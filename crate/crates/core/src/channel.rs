//! Qubit states and channels in the affine Bloch picture.
//!
//! A channel acts on Bloch vectors as `s -> A s + b`. Complete positivity is
//! decided on the Choi matrix `(id ⊗ S)(|Ψ+><Ψ+|)` with normalized `|Ψ+>`,
//! so a CP channel has a trace-one positive semidefinite Choi matrix.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matkit::{self, norm3, pauli_matrices, ComplexMatrix, RealMatrix3, Vec3, C1};
use crate::tetra::EtaVector;
use crate::{Error, Result};

/// Default PSD tolerance for the CP test.
pub const CP_TOL: f64 = 1e-9;

const BLOCH_TOL: f64 = 1e-10;
const UNITAL_TOL: f64 = 1e-12;

/// Real 3-vector `s` with `ρ = ½(I + s·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlochVector(pub Vec3);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        norm3(self.0)
    }

    pub fn max_abs_diff(&self, other: &BlochVector) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }
}

/// Validated qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Checks Hermiticity and unit trace (1e-12) and positivity (−1e-10).
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::BadDimension { expected: 2, got: m.dim() });
        }
        if !m.is_hermitian(1e-12) {
            return Err(Error::InvalidState(format!("not Hermitian ({:e})", m.hermitian_defect())));
        }
        let tr = m.trace();
        if (tr - C1).norm() > 1e-12 {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = matkit::min_eigenvalue(&m)?;
        if min < -BLOCH_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(ComplexMatrix::identity(2).scale_real(0.5))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `½ Tr|ρ − σ|`, which is half the Euclidean distance of the Bloch vectors.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let a = density_to_bloch(self).0;
        let b = density_to_bloch(other).0;
        0.5 * norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    }
}

/// `ρ = ½(I + s·σ)`
pub fn bloch_to_density(s: &BlochVector) -> Result<DensityMatrix> {
    let n = s.norm();
    if !(n <= 1.0 + BLOCH_TOL) {
        return Err(Error::UnphysicalBloch(n));
    }
    Ok(DensityMatrix(bloch_operator(1.0, s.0)))
}

/// `½(c·I + s·σ)` without any validation.
fn bloch_operator(c: f64, s: Vec3) -> ComplexMatrix {
    let [x, y, z] = s;
    ComplexMatrix::from_rows([
        [Complex64::new((c + z) / 2.0, 0.0), Complex64::new(x / 2.0, -y / 2.0)],
        [Complex64::new(x / 2.0, y / 2.0), Complex64::new((c - z) / 2.0, 0.0)],
    ])
}

/// `s_i = Tr(ρ σ_i)`
pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    let m = rho.matrix();
    BlochVector([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
}

/// Affine map `s -> A s + b` on the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    pub a: RealMatrix3,
    pub b: Vec3,
}

impl AffineChannel {
    pub const IDENTITY: AffineChannel = AffineChannel { a: RealMatrix3::IDENTITY, b: [0.0; 3] };

    pub fn new(a: RealMatrix3, b: Vec3) -> Self {
        AffineChannel { a, b }
    }

    pub fn unital(a: RealMatrix3) -> Self {
        AffineChannel { a, b: [0.0; 3] }
    }

    /// Unital channel with `A = diag(η)`.
    pub fn diagonal(eta: EtaVector) -> Self {
        Self::unital(RealMatrix3::from_diagonal(eta.0))
    }

    pub fn is_unital(&self) -> bool {
        norm3(self.b) <= UNITAL_TOL
    }

    fn require_unital(&self) -> Result<()> {
        let nb = norm3(self.b);
        if nb > UNITAL_TOL {
            return Err(Error::NotUnital(nb));
        }
        Ok(())
    }

    /// `λ·self + (1 − λ)·other`
    pub fn mix(&self, other: &AffineChannel, lambda: f64) -> AffineChannel {
        AffineChannel {
            a: self.a.scale(lambda) + other.a.scale(1.0 - lambda),
            b: [0, 1, 2].map(|i| lambda * self.b[i] + (1.0 - lambda) * other.b[i]),
        }
    }

    /// Action on an arbitrary 2x2 operator, extended linearly from
    /// `I -> I + b·σ` and `σ_j -> Σ_i A_ij σ_i`.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let paulis = pauli_matrices();
        // m = ½(tr(m) I + Σ_j tr(m σ_j) σ_j)
        let c0 = m.trace();
        let cs: Vec<Complex64> = paulis.iter().map(|p| (m * p).trace()).collect();
        let mut out = ComplexMatrix::identity(2).scale(c0 * 0.5);
        for i in 0..3 {
            let coeff = c0 * self.b[i] + (0..3).map(|j| cs[j] * self.a.0[i][j]).sum::<Complex64>();
            out = &out + &paulis[i].scale(coeff * 0.5);
        }
        out
    }
}

/// `A s + b`
pub fn apply(ch: &AffineChannel, s: &BlochVector) -> BlochVector {
    let r = ch.a.mul_vec(s.0);
    BlochVector([r[0] + ch.b[0], r[1] + ch.b[1], r[2] + ch.b[2]])
}

/// Trace-one Choi matrix, reference qubit first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix(ComplexMatrix);

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        matkit::hermitian_eig(&self.0).expect("Choi matrices are Hermitian").values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Frobenius distance between Choi matrices.
    pub fn distance(&self, other: &ChoiMatrix) -> f64 {
        (&self.0 - &other.0).frobenius_norm()
    }
}

/// `(id ⊗ S)(|Ψ+><Ψ+|)` with `|Ψ+> = (|00> + |11>)/√2`, i.e. `½ Σ_ij E_ij ⊗ S(E_ij)`.
pub fn choi(ch: &AffineChannel) -> ChoiMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = ComplexMatrix::zeros(2);
            e[(i, j)] = C1;
            let image = ch.apply_operator(&e);
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = image[(k, l)] * 0.5;
                }
            }
        }
    }
    // exact Hermitian symmetry; rounding in apply_operator can break it at 1e-17
    for r in 0..4 {
        out[(r, r)].im = 0.0;
        for c in (r + 1)..4 {
            let avg = (out[(r, c)] + out[(c, r)].conj()) * 0.5;
            out[(r, c)] = avg;
            out[(c, r)] = avg.conj();
        }
    }
    ChoiMatrix(out)
}

/// Result of the CP test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpCheck {
    pub cp: bool,
    pub min_eigenvalue: f64,
}

/// CP iff the Choi matrix is positive semidefinite (min eigenvalue ≥ −tol).
pub fn is_cp(ch: &AffineChannel, tol: f64) -> CpCheck {
    let min = choi(ch).min_eigenvalue();
    CpCheck { cp: min >= -tol, min_eigenvalue: min }
}

/// A unital map is positive iff it maps the Bloch ball into itself, i.e.
/// the largest singular value of `A` is at most one.
pub fn is_positive_unital(ch: &AffineChannel, tol: f64) -> Result<bool> {
    ch.require_unital()?;
    Ok(ch.a.spectral_norm() <= 1.0 + tol)
}

/// `A = Q·diag(delta)·Qᵀ·R` with proper rotations `Q` and `R`.
///
/// Read right to left this is a rotation `QᵀR`, a diagonal map, then `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalForm {
    #[serde(rename = "Q")]
    pub q: RealMatrix3,
    /// Descending by absolute value; at most one negative entry, carried by
    /// the smallest magnitude and only when `det(A) < 0`.
    pub delta: Vec3,
    #[serde(rename = "R")]
    pub r: RealMatrix3,
}

impl CanonicalForm {
    pub fn reconstruct(&self) -> RealMatrix3 {
        self.q * RealMatrix3::from_diagonal(self.delta) * self.q.transpose() * self.r
    }

    /// The rotation applied first, `QᵀR`.
    pub fn pre_rotation(&self) -> RealMatrix3 {
        self.q.transpose() * self.r
    }

    pub fn delta_eta(&self) -> EtaVector {
        EtaVector(self.delta)
    }
}

/// Canonical rotation-diagonal-rotation form of a unital channel.
///
/// From the SVD `A = U Σ Vᵀ`, a reflection in `U` or `V` is removed by
/// negating its last column together with the matching singular value, so
/// `Q = U` and `V` become rotations and `R = Q Vᵀ`. A negative entry of
/// `delta` thus survives exactly when `det(A) < 0`.
pub fn canonical_form(ch: &AffineChannel) -> Result<CanonicalForm> {
    ch.require_unital()?;
    let svd = matkit::svd3(&ch.a);
    let mut u = svd.u;
    let mut v = svd.v;
    let mut delta = svd.sigma;

    for m in [&mut u, &mut v] {
        if m.det() < 0.0 {
            let last = m.column(2).map(|x| -x);
            m.set_column(2, last);
            delta[2] = -delta[2];
        }
    }
    if delta[2] == 0.0 {
        delta[2] = 0.0; // drop a stray −0
    }
    Ok(CanonicalForm { q: u, delta, r: u * v.transpose() })
}

/// Named diagonal maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogMap {
    Identity,
    RotX,
    RotY,
    RotZ,
    Transpose,
    UniversalNot,
    Pancake,
    /// `ρ -> (1 − p)ρ + p·I/2`
    Depolarize(f64),
}

impl CatalogMap {
    pub const NAMES: [&'static str; 8] =
        ["identity", "rot_x", "rot_y", "rot_z", "transpose", "universal_not", "pancake", "depolarize(p)"];

    pub fn eta(&self) -> EtaVector {
        match *self {
            CatalogMap::Identity => EtaVector::IDENTITY,
            CatalogMap::RotX => EtaVector::ROT_X,
            CatalogMap::RotY => EtaVector::ROT_Y,
            CatalogMap::RotZ => EtaVector::ROT_Z,
            CatalogMap::Transpose => EtaVector::TRANSPOSE,
            CatalogMap::UniversalNot => EtaVector::UNIVERSAL_NOT,
            CatalogMap::Pancake => EtaVector::new(1.0, 1.0, 0.0),
            CatalogMap::Depolarize(p) => EtaVector::new(1.0 - p, 1.0 - p, 1.0 - p),
        }
    }
}

impl FromStr for CatalogMap {
    type Err = Error;

    /// Accepts the names in [`CatalogMap::NAMES`], with `depolarize(0.3)` or
    /// `depolarize:0.3` for the parametrized map.
    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_lowercase().replace('-', "_");
        let simple = match name.as_str() {
            "identity" => Some(CatalogMap::Identity),
            "rot_x" => Some(CatalogMap::RotX),
            "rot_y" => Some(CatalogMap::RotY),
            "rot_z" => Some(CatalogMap::RotZ),
            "transpose" => Some(CatalogMap::Transpose),
            "universal_not" => Some(CatalogMap::UniversalNot),
            "pancake" => Some(CatalogMap::Pancake),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        let arg = name
            .strip_prefix("depolarize(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| name.strip_prefix("depolarize:"));
        match arg.map(|a| a.trim().parse::<f64>()) {
            Some(Ok(p)) if (0.0..=1.0).contains(&p) => Ok(CatalogMap::Depolarize(p)),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Channel from the catalog by name.
pub fn catalog(name: &str) -> Result<AffineChannel> {
    Ok(AffineChannel::diagonal(name.parse::<CatalogMap>()?.eta()))
}

/// Channel JSON: `{"eta": [x, y, z]}` or `{"A": [[..], [..], [..]], "b": [x, y, z]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ChannelJson {
    Diagonal {
        eta: Vec3,
    },
    Affine {
        #[serde(rename = "A")]
        a: [[f64; 3]; 3],
        #[serde(default)]
        b: Vec3,
    },
}

impl ChannelJson {
    pub fn parse(s: &str) -> Result<AffineChannel> {
        let json: ChannelJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("channel JSON: {e}")))?;
        json.into_channel()
    }

    pub fn into_channel(self) -> Result<AffineChannel> {
        let ch = match self {
            ChannelJson::Diagonal { eta } => AffineChannel::diagonal(EtaVector(eta)),
            ChannelJson::Affine { a, b } => AffineChannel::new(RealMatrix3(a), b),
        };
        let finite = ch.a.0.iter().flatten().chain(ch.b.iter()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("channel has non-finite entries".into()));
        }
        Ok(ch)
    }
}

impl From<&AffineChannel> for ChannelJson {
    fn from(ch: &AffineChannel) -> Self {
        ChannelJson::Affine { a: ch.a.0, b: ch.b }
    }
}

/// Pure state `|ψ><ψ|` for a normalized qubit vector.
pub fn pure_state(psi: [Complex64; 2]) -> Result<DensityMatrix> {
    let n = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    if n == 0.0 {
        return Err(Error::InvalidState("zero vector".into()));
    }
    let v = [psi[0] / n, psi[1] / n];
    DensityMatrix::new(ComplexMatrix::outer(&v, &v))
}

/// Computational and conjugate basis states, for tests and examples.
pub fn basis_state(axis: usize, bit: u8) -> DensityMatrix {
    let s = if bit == 0 { 1.0 } else { -1.0 };
    let mut v = [0.0; 3];
    v[axis] = s;
    bloch_to_density(&BlochVector(v)).expect("unit Bloch vector")
}
