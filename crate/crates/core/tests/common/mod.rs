#![allow(dead_code)]

use qubit_geometry::channel::{self, AffineChannel, DensityMatrix};
use qubit_geometry::dynamics::{self, CouplingSpec};
use qubit_geometry::matkit::RealMatrix3;
use qubit_geometry::tetra::{self, EtaVector, VERTICES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn cube_point(rng: &mut impl Rng) -> EtaVector {
    EtaVector::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

pub fn point_in_d(rng: &mut impl Rng) -> EtaVector {
    loop {
        let e = cube_point(rng);
        if tetra::in_d(&e, 0.0) {
            return e;
        }
    }
}

pub fn point_outside_d(rng: &mut impl Rng) -> EtaVector {
    loop {
        let e = cube_point(rng);
        if !tetra::in_d(&e, 0.0) {
            return e;
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> RealMatrix3 {
    let axis = loop {
        let v = cube_point(rng).0;
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            break v.map(|x| x / n);
        }
    };
    RealMatrix3::rotation(axis, rng.random_range(0.0..std::f64::consts::TAU))
}

/// `R2 · diag(η) · R1` with `η ∈ D`.
pub fn random_unital_cp(rng: &mut impl Rng) -> AffineChannel {
    let eta = point_in_d(rng);
    let a = random_rotation(rng) * RealMatrix3::from_diagonal(eta.0) * random_rotation(rng);
    AffineChannel::unital(a)
}

/// Random real 3×3 matrix scaled to spectral norm at most 1.
pub fn random_contraction(rng: &mut impl Rng) -> RealMatrix3 {
    let mut m = RealMatrix3::ZERO;
    for row in &mut m.0 {
        for x in row.iter_mut() {
            *x = rng.random_range(-1.0..=1.0);
        }
    }
    let norm = m.spectral_norm();
    m.scale(rng.random_range(0.05..=1.0) / norm)
}

/// Nearest point of `D` to `p` found by scanning a grid on each face.
///
/// Exterior points project onto the boundary, so the four triangles suffice.
/// Each face is sampled barycentrically with edge steps of `resolution`.
pub fn grid_projection(p: &EtaVector, resolution: f64) -> EtaVector {
    let edge = 2.0 * std::f64::consts::SQRT_2;
    let n = (edge / resolution).ceil() as usize;
    let mut best = VERTICES[0].0;
    let mut best_d2 = f64::INFINITY;
    for skip in 0..4 {
        let face: Vec<[f64; 3]> = (0..4).filter(|&k| k != skip).map(|k| VERTICES[k].0).collect();
        let (a, b, c) = (face[0], face[1], face[2]);
        let ab = [0, 1, 2].map(|i| (b[i] - a[i]) / n as f64);
        let ac = [0, 1, 2].map(|i| (c[i] - a[i]) / n as f64);
        for i in 0..=n {
            for j in 0..=(n - i) {
                let q = [0, 1, 2].map(|k| a[k] + i as f64 * ab[k] + j as f64 * ac[k]);
                let d2 = (q[0] - p.0[0]).powi(2) + (q[1] - p.0[1]).powi(2) + (q[2] - p.0[2]).powi(2);
                if d2 < best_d2 {
                    best_d2 = d2;
                    best = q;
                }
            }
        }
    }
    EtaVector(best)
}

/// `η(t)` read off the full qubit-ancilla evolution: the `i`-th Bloch
/// component of the output for the `+i` input state.
pub fn eta_from_full_evolution(spec: &CouplingSpec, t: f64) -> EtaVector {
    let mut eta = [0.0; 3];
    for (axis, out) in eta.iter_mut().enumerate() {
        let rho0: DensityMatrix = channel::basis_state(axis, 0);
        let rho = dynamics::simulate_reduced(spec, t, &rho0).expect("evolution succeeds");
        *out = channel::density_to_bloch(&rho).0[axis];
    }
    EtaVector(eta)
}

pub fn random_coupling(rng: &mut impl Rng) -> CouplingSpec {
    let w = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
    CouplingSpec::normalized(w).expect("positive weights")
}
