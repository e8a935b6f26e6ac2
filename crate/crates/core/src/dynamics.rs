//! Unital channels generated by a qubit–ancilla coupling Hamiltonian.
//!
//! The qubit couples to a four-level ancilla (levels `a1..a4` are the basis
//! indices `0..3`) through
//!
//! ```text
//! H = Σ_i α_i σ_i ⊗ (|a1><a_{i+1}| + |a_{i+1}><a1|),   Σ α_i² = 1
//! ```
//!
//! starting from `ρ0 ⊗ |a1><a1|`. Since `H² = 1` on the reachable subspace the
//! reduced dynamics is the Pauli channel with weights `cos²t` and `α_i² sin²t`,
//! i.e. `η(t) = (1,1,1) cos²t + (2α² − 1) sin²t` (ħ = 1).

use std::fmt::Write as _;

use serde::Serialize;

use crate::channel::DensityMatrix;
use crate::matkit::{self, pauli_matrices, ComplexMatrix, C1};
use crate::numfmt::fmt_g17;
use crate::tetra::{self, EtaVector, MEMBERSHIP_TOL};
use crate::{Error, Result};

const ANCILLA_DIM: usize = 4;

/// Coupling strengths `α` with `Σ α_i² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingSpec {
    alpha: [f64; 3],
}

impl CouplingSpec {
    /// Validates `Σ α_i² = 1` within 1e-12.
    pub fn new(alpha: [f64; 3]) -> Result<Self> {
        let norm2: f64 = alpha.iter().map(|a| a * a).sum();
        if !alpha.iter().all(|a| a.is_finite()) || (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCoupling(norm2));
        }
        Ok(CouplingSpec { alpha })
    }

    /// From the squared weights `α_i²`, taking nonnegative roots.
    pub fn from_squared(alpha2: [f64; 3]) -> Result<Self> {
        if alpha2.iter().any(|&a| !(a >= 0.0)) {
            return Err(Error::InvalidCoupling(alpha2.iter().sum()));
        }
        Self::new(alpha2.map(f64::sqrt))
    }

    /// Rescales nonnegative weights so they sum to one, then as [`Self::from_squared`].
    pub fn normalized(weights: [f64; 3]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidCoupling(total));
        }
        let alpha = weights.map(|w| (w / total).sqrt());
        // renormalize the roots so the invariant holds to rounding
        let n = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
        Self::new(alpha.map(|a| a / n))
    }

    pub fn alpha(&self) -> [f64; 3] {
        self.alpha
    }

    pub fn alpha_squared(&self) -> [f64; 3] {
        self.alpha.map(|a| a * a)
    }

    /// The far end of the trajectory, `2α² − 1`, on the face `Ση = −1`.
    pub fn endpoint(&self) -> EtaVector {
        EtaVector(self.alpha_squared().map(|a2| 2.0 * a2 - 1.0))
    }

    /// `H_total` on qubit ⊗ ancilla (8 dimensions).
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let paulis = pauli_matrices();
        let mut h = ComplexMatrix::zeros(2 * ANCILLA_DIM);
        for (i, sigma) in paulis.iter().enumerate() {
            let mut hop = ComplexMatrix::zeros(ANCILLA_DIM);
            hop[(0, i + 1)] = C1;
            hop[(i + 1, 0)] = C1;
            h = &h + &sigma.kron(&hop).scale_real(self.alpha[i]);
        }
        h
    }
}

/// Closed-form diagonal of the induced map at time `t`.
pub fn eta_of_t(spec: &CouplingSpec, t: f64) -> EtaVector {
    let (s, c) = t.sin_cos();
    let (s2, c2) = (s * s, c * c);
    EtaVector(spec.alpha_squared().map(|a2| c2 + (2.0 * a2 - 1.0) * s2))
}

/// Coupling and time reaching a CP target, with `t ∈ [0, π/2]`.
///
/// The target's Pauli weights give `cos²t = p_I` and `α_i² sin²t = p_i`.
/// The identity target is degenerate; it maps to `t = 0`, `α = (1, 0, 0)`.
pub fn design_coupling(target: &EtaVector) -> Result<(CouplingSpec, f64)> {
    if !tetra::in_d(target, MEMBERSHIP_TOL) {
        let min = crate::channel::is_cp(&crate::channel::AffineChannel::diagonal(*target), 0.0).min_eigenvalue;
        return Err(Error::NotCP(min));
    }
    // weights within rounding of zero are zero; the square roots below would
    // otherwise turn a 1e-17 residue into a 1e-9 error in t
    let [p_i, px, py, pz] = tetra::pauli_weights(target).0.map(|p| if p <= 1e-15 { 0.0 } else { p });
    let off = [px, py, pz];
    let sin2: f64 = off.iter().sum();
    if sin2 <= 1e-15 {
        return Ok((CouplingSpec { alpha: [1.0, 0.0, 0.0] }, 0.0));
    }
    let t = sin2.sqrt().atan2(p_i.sqrt());
    let spec = CouplingSpec::normalized(off)?;
    Ok((spec, t))
}

/// Full-Hilbert-space evolution: `Tr_anc[U (ρ0 ⊗ |a1><a1|) U†]` with `U = exp(−iHt)`.
pub fn simulate_reduced(spec: &CouplingSpec, t: f64, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let u = matkit::unitary_exp(&spec.hamiltonian(), t)?;
    let mut a1 = ComplexMatrix::zeros(ANCILLA_DIM);
    a1[(0, 0)] = C1;
    let joint = rho0.matrix().kron(&a1);
    let evolved = &(&u * &joint) * &u.adjoint();
    let mut reduced = matkit::partial_trace_ancilla(&evolved, ANCILLA_DIM)?;
    // clean rounding so the result passes the density-matrix checks
    for i in 0..2 {
        reduced[(i, i)].im = 0.0;
    }
    let avg = (reduced[(0, 1)] + reduced[(1, 0)].conj()) * 0.5;
    reduced[(0, 1)] = avg;
    reduced[(1, 0)] = avg.conj();
    let tr = reduced.trace().re;
    DensityMatrix::new(reduced.scale_real(1.0 / tr))
}

/// Samples of `η(t)` along a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, EtaVector)>,
}

impl Trajectory {
    /// CSV with header `t,eta_x,eta_y,eta_z` and `%.17g` numbers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,eta_x,eta_y,eta_z\n");
        for (t, eta) in &self.samples {
            let _ = writeln!(out, "{},{},{},{}", fmt_g17(*t), fmt_g17(eta.0[0]), fmt_g17(eta.0[1]), fmt_g17(eta.0[2]));
        }
        out
    }
}

pub fn trajectory(spec: &CouplingSpec, t_grid: &[f64]) -> Result<Trajectory> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("time grid must be finite".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("time grid must be ascending".into()));
    }
    Ok(Trajectory { samples: t_grid.iter().map(|&t| (t, eta_of_t(spec, t))).collect() })
}

/// `steps + 1` evenly spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}
