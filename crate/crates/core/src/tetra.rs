//! Geometry of diagonal unital maps in η-space.
//!
//! The positive diagonal unital maps fill the cube `[-1, 1]^3`. The
//! completely positive ones form the regular tetrahedron `D` with vertices
//! `I = (1,1,1)`, `Rx = (1,-1,-1)`, `Ry = (-1,1,-1)`, `Rz = (-1,-1,1)`.
//! Each of the four remaining cube corners `c` sits opposite one face of `D`,
//! and that face is the plane `c·η = 1`; `D` is exactly `{η : c·η ≤ 1 ∀c}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::matkit::{dot3, Vec3};
use crate::{Error, Result};

/// Default tolerance for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Diagonal of a unital qubit map, `(η_x, η_y, η_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EtaVector(pub Vec3);

impl EtaVector {
    pub const IDENTITY: EtaVector = EtaVector([1.0, 1.0, 1.0]);
    pub const ROT_X: EtaVector = EtaVector([1.0, -1.0, -1.0]);
    pub const ROT_Y: EtaVector = EtaVector([-1.0, 1.0, -1.0]);
    pub const ROT_Z: EtaVector = EtaVector([-1.0, -1.0, 1.0]);
    pub const TRANSPOSE: EtaVector = EtaVector([1.0, -1.0, 1.0]);
    pub const UNIVERSAL_NOT: EtaVector = EtaVector([-1.0, -1.0, -1.0]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        EtaVector([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Euclidean distance, which is the trace-norm metric on diagonal maps.
    pub fn dist(&self, other: &EtaVector) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &EtaVector) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }

    /// Largest `|η_i|`; the map is positive iff this is at most 1.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// The map is positive (maps the Bloch ball into itself).
    pub fn in_cube(&self, tol: f64) -> bool {
        self.max_abs() <= 1.0 + tol
    }

    /// Frobenius inner product of the diagonal maps, `Tr(AᵀB) = Σ ηᵢη′ᵢ`.
    pub fn inner(&self, other: &EtaVector) -> f64 {
        dot3(self.0, other.0)
    }
}

impl fmt::Display for EtaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Vertices of `D`: identity and the three π-rotations.
pub const VERTICES: [EtaVector; 4] = [EtaVector::IDENTITY, EtaVector::ROT_X, EtaVector::ROT_Y, EtaVector::ROT_Z];

/// Cube corners outside `D`, each the apex of one non-CP pyramid.
pub const CORNERS: [EtaVector; 4] = [
    EtaVector::UNIVERSAL_NOT,
    EtaVector([1.0, 1.0, -1.0]),
    EtaVector([-1.0, 1.0, 1.0]),
    EtaVector::TRANSPOSE,
];

/// Largest face violation `max_c (c·η − 1)`; non-positive iff `η ∈ D`.
fn face_excess(eta: &EtaVector) -> f64 {
    CORNERS.iter().map(|c| c.inner(eta) - 1.0).fold(f64::NEG_INFINITY, f64::max)
}

/// Tetrahedron membership: `|η_x + η_y| ≤ 1 + η_z` and `|η_x − η_y| ≤ 1 − η_z`.
pub fn in_d(eta: &EtaVector, tol: f64) -> bool {
    let [x, y, z] = eta.0;
    (x + y).abs() <= 1.0 + z + tol && (x - y).abs() <= 1.0 - z + tol
}

/// Mixture weights `(p_I, p_x, p_y, p_z)` over identity and the three Pauli conjugations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliMixture(pub [f64; 4]);

impl PauliMixture {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Some weight is negative: the η-vector is outside `D` and the
    /// "mixture" is only a signed combination.
    pub fn is_signed(&self) -> bool {
        self.0.iter().any(|&p| p < -1e-12)
    }

    pub fn is_channel(&self) -> bool {
        !self.is_signed() && (self.total() - 1.0).abs() <= 1e-12
    }
}

/// Pauli weights of a diagonal map; all nonnegative iff `eta ∈ D`.
pub fn pauli_weights(eta: &EtaVector) -> PauliMixture {
    let [x, y, z] = eta.0;
    PauliMixture([
        (1.0 + x + y + z) / 4.0,
        (1.0 + x - y - z) / 4.0,
        (1.0 - x + y - z) / 4.0,
        (1.0 - x - y + z) / 4.0,
    ])
}

/// Inverse of [`pauli_weights`].
pub fn mixture_to_eta(p: &PauliMixture) -> Result<EtaVector> {
    let total = p.total();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightsNotNormalized(total));
    }
    let [pi, px, py, pz] = p.0;
    Ok(EtaVector([pi + px - py - pz, pi - px + py - pz, pi - px - py + pz]))
}

/// Composition of diagonal maps (componentwise product).
pub fn compose(a: &EtaVector, b: &EtaVector) -> EtaVector {
    EtaVector([a.0[0] * b.0[0], a.0[1] * b.0[1], a.0[2] * b.0[2]])
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn axpy(k: f64, x: Vec3, y: Vec3) -> Vec3 {
    [y[0] + k * x[0], y[1] + k * x[1], y[2] + k * x[2]]
}

/// Nearest point of the segment `[a, b]` to `p`.
fn closest_on_segment(p: Vec3, a: Vec3, b: Vec3) -> Vec3 {
    let ab = sub(b, a);
    let t = (dot3(sub(p, a), ab) / dot3(ab, ab)).clamp(0.0, 1.0);
    axpy(t, ab, a)
}

/// Euclidean projection onto `D` (the best CP approximation under the
/// trace inner product).
///
/// Interior points are returned unchanged. Otherwise every face, edge and
/// vertex is a candidate: a face contributes the foot of the perpendicular
/// when it lands inside the triangle, an edge its clamped segment projection.
/// The closest candidate is the projection.
pub fn project_to_d(eta: &EtaVector) -> EtaVector {
    if face_excess(eta) <= 0.0 {
        return *eta;
    }
    let p = eta.0;
    let mut best = VERTICES[0].0;
    let mut best_d2 = f64::INFINITY;
    let mut consider = |q: Vec3| {
        let d = sub(p, q);
        let d2 = dot3(d, d);
        if d2 < best_d2 {
            best_d2 = d2;
            best = q;
        }
    };

    for corner in &CORNERS {
        let c = corner.0;
        let excess = dot3(c, p) - 1.0;
        if excess <= 0.0 {
            continue;
        }
        // foot of the perpendicular on the plane c·x = 1 (|c|² = 3)
        // (dividing last keeps points like (−1,−1,−1) on exact thirds)
        let foot = [0, 1, 2].map(|i| (3.0 * p[i] - excess * c[i]) / 3.0);
        // inside the face iff it satisfies the other three inequalities
        if CORNERS.iter().all(|o| o.0 == c || dot3(o.0, foot) <= 1.0 + 1e-15) {
            consider(foot);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            consider(closest_on_segment(p, VERTICES[i].0, VERTICES[j].0));
        }
    }
    EtaVector(best)
}

/// Projection onto `D` intersected with the slice where some coordinates are
/// pinned; `fixed[i] = Some(v)` pins `η_i = v`.
///
/// Solved as a small quadratic program by enumerating active sets of the
/// four face constraints restricted to the free coordinates.
pub fn project_constrained(eta: &EtaVector, fixed: [Option<f64>; 3]) -> Result<EtaVector> {
    let free: Vec<usize> = (0..3).filter(|&i| fixed[i].is_none()).collect();
    let mut base = eta.0;
    for (i, v) in fixed.iter().enumerate() {
        if let Some(v) = v {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("fixed value {v} is not finite")));
            }
            base[i] = *v;
        }
    }

    // constraints a_k·x_free ≤ r_k
    let rows: Vec<(Vec<f64>, f64)> = CORNERS
        .iter()
        .map(|c| {
            let a: Vec<f64> = free.iter().map(|&i| c.0[i]).collect();
            let pinned: f64 = (0..3).filter(|i| !free.contains(i)).map(|i| c.0[i] * base[i]).sum();
            (a, 1.0 - pinned)
        })
        .collect();
    let y: Vec<f64> = free.iter().map(|&i| base[i]).collect();
    let m = free.len();
    let feasible = |x: &[f64]| {
        rows.iter()
            .all(|(a, r)| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= r + 1e-12)
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..16 {
        let active: Vec<usize> = (0..4).filter(|k| mask & (1 << k) != 0).collect();
        if active.len() > m {
            continue;
        }
        let Some(x) = project_onto_affine(&y, &active.iter().map(|&k| &rows[k]).collect::<Vec<_>>()) else {
            continue;
        };
        if !feasible(&x) {
            continue;
        }
        let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(bd, _)| d2 < *bd) {
            best = Some((d2, x));
        }
    }

    let (_, x) = best.ok_or(Error::EmptyIntersection)?;
    let mut out = base;
    for (slot, &i) in free.iter().enumerate() {
        out[i] = x[slot];
    }
    Ok(EtaVector(out))
}

/// Projection of `y` onto `{x : a_k·x = r_k}`, or `None` for dependent rows.
fn project_onto_affine(y: &[f64], rows: &[&(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return Some(y.to_vec());
    }
    // solve (A Aᵀ) μ = A y − r
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = rows[i].0.iter().zip(&rows[j].0).map(|(a, b)| a * b).sum();
        }
        rhs[i] = rows[i].0.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - rows[i].1;
    }
    let mu = solve_small(gram, rhs)?;
    let mut x = y.to_vec();
    for (i, (a, _)) in rows.iter().map(|r| (&r.0, r.1)).enumerate() {
        for (xj, aj) in x.iter_mut().zip(a) {
            *xj -= mu[i] * aj;
        }
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting; `None` if (near) singular.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// `eta = p·cp1 + (1 − p)·(cp2 ∘ T)` with `T` the transpose map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwDecomposition {
    pub p: f64,
    pub cp1: EtaVector,
    /// Non-CP cube corner whose pyramid holds the input; equals `cp2 ∘ T`.
    pub corner: EtaVector,
    /// Vertex of `D`.
    pub cp2: EtaVector,
}

impl SwDecomposition {
    pub fn reconstruct(&self) -> EtaVector {
        let tail = compose(&self.cp2, &EtaVector::TRANSPOSE);
        EtaVector([0, 1, 2].map(|i| self.p * self.cp1.0[i] + (1.0 - self.p) * tail.0[i]))
    }
}

/// Splits a positive diagonal map into a CP part and a CP-after-transpose part.
///
/// Points of `D` decompose trivially (`p = 1`). A point in the pyramid over
/// corner `c` lies on the segment from `c` to the opposite face `c·η = 1`;
/// the face point is `cp1` and `c = cp2 ∘ T` for the vertex `cp2 = c ∘ T`.
pub fn sw_decompose(eta: &EtaVector) -> Result<SwDecomposition> {
    let worst = eta.max_abs();
    if !(worst <= 1.0 + 1e-12) {
        return Err(Error::OutsideCube(worst));
    }
    if face_excess(eta) <= 0.0 {
        return Ok(SwDecomposition {
            p: 1.0,
            cp1: *eta,
            corner: EtaVector::TRANSPOSE,
            cp2: EtaVector::IDENTITY,
        });
    }

    // the violated face; inside the cube at most one is strictly violated
    let corner = *CORNERS
        .iter()
        .max_by(|a, b| {
            a.inner(eta)
                .total_cmp(&b.inner(eta))
                .then_with(|| b.dist(eta).total_cmp(&a.dist(eta)))
        })
        .expect("four corners");
    let c = corner.0;
    // eta = λ c + (1 − λ) cp1 with c·cp1 = 1  =>  c·eta = 1 + 2λ
    let p = ((3.0 - corner.inner(eta)) / 2.0).clamp(0.0, 1.0);
    let cp1 = if p == 0.0 {
        // the corner itself: any face point works, take the face centroid
        EtaVector(c.map(|x| x / 3.0))
    } else {
        // cp1 = c + (eta − c)/p
        EtaVector([0, 1, 2].map(|i| c[i] + (eta.0[i] - c[i]) / p))
    };
    Ok(SwDecomposition { p, cp1, corner, cp2: compose(&corner, &EtaVector::TRANSPOSE) })
}
