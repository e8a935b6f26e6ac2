//! Network realization of unital qubit channels.
//!
//! A unital CP channel `A = QΔQᵀR` runs as: rotate by `u1 = QᵀR`, apply the
//! Pauli mixture with weights `amplitudes²` (selected by an ancilla), rotate
//! by `u2 = Q`. The ancilla is simulated at the level of its mixture, not
//! as an explicit controlled-gate circuit.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{self, bloch_to_density, density_to_bloch, AffineChannel, BlochVector, DensityMatrix, CP_TOL};
use crate::matkit::{norm3, RealMatrix3};
use crate::tetra::{self, EtaVector};
use crate::{Error, Result};

/// Generator behind [`run_sampled`]; reported alongside sampled results.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

/// Rotations around an ancilla-selected Pauli mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub u1: RealMatrix3,
    pub u2: RealMatrix3,
    /// `(√p_I, √p_x, √p_y, √p_z)`
    pub amplitudes: [f64; 4],
}

impl NetworkSpec {
    /// Checks the rotations and amplitude normalization.
    pub fn validate(&self) -> Result<()> {
        for (name, u) in [("u1", &self.u1), ("u2", &self.u2)] {
            if !u.is_rotation(1e-10) {
                return Err(Error::InvalidInput(format!("{name} is not a proper rotation")));
            }
        }
        if self.amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidInput("amplitudes must be nonnegative".into()));
        }
        let total = self.weights().iter().sum::<f64>();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightsNotNormalized(total));
        }
        Ok(())
    }

    pub fn weights(&self) -> [f64; 4] {
        self.amplitudes.map(|a| a * a)
    }

    /// Diagonal of the Pauli stage.
    pub fn eta(&self) -> EtaVector {
        let [pi, px, py, pz] = self.weights();
        EtaVector([pi + px - py - pz, pi - px + py - pz, pi - px - py + pz])
    }

    /// The affine channel implemented by the network, `u2·diag(η)·u1`.
    pub fn channel(&self) -> AffineChannel {
        AffineChannel::unital(self.u2 * RealMatrix3::from_diagonal(self.eta().0) * self.u1)
    }
}

/// Compiles a unital CP channel into a [`NetworkSpec`].
pub fn compile(ch: &AffineChannel) -> Result<NetworkSpec> {
    let cp = channel::is_cp(ch, CP_TOL);
    let cf = channel::canonical_form(ch)?;
    if !cp.cp {
        return Err(Error::NotCP(cp.min_eigenvalue));
    }
    // Two sign flips are a π-rotation about the remaining axis and can be
    // absorbed into u2. Among the flips that land Δ in D, take the one whose
    // u2 is closest to the identity so diagonal inputs compile to themselves.
    const FLIPS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let u1 = cf.pre_rotation();
    let base = cf.delta_eta();
    let (delta, u2) = FLIPS
        .iter()
        .filter_map(|flip| {
            let cand = tetra::compose(&base, &EtaVector(*flip));
            tetra::in_d(&cand, tetra::MEMBERSHIP_TOL).then(|| (cand, cf.q * RealMatrix3::from_diagonal(*flip)))
        })
        .min_by(|a, b| {
            let da = a.1.max_abs_diff(&RealMatrix3::IDENTITY);
            let db = b.1.max_abs_diff(&RealMatrix3::IDENTITY);
            da.total_cmp(&db)
        })
        .ok_or(Error::NotCP(cp.min_eigenvalue))?;
    let amplitudes = tetra::pauli_weights(&delta).0.map(|p| p.max(0.0).sqrt());
    // the clamp can leave the weights a hair off one
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(NetworkSpec { u1, u2, amplitudes: amplitudes.map(|a| a / norm) })
}

fn rotate(u: &RealMatrix3, rho: &DensityMatrix) -> DensityMatrix {
    let s = u.mul_vec(density_to_bloch(rho).0);
    bloch_to_density(&BlochVector(clamp_ball(s))).expect("rotations preserve the Bloch ball")
}

fn clamp_ball(s: [f64; 3]) -> [f64; 3] {
    let n = norm3(s);
    if n > 1.0 {
        s.map(|x| x / n)
    } else {
        s
    }
}

/// Bloch vector after the Pauli branch `k` (0 = identity, 1..3 = σx, σy, σz).
fn pauli_branch(k: usize, s: [f64; 3]) -> [f64; 3] {
    // σ_k ρ σ_k keeps component k and negates the other two
    match k {
        0 => s,
        _ => {
            let mut out = s.map(|x| -x);
            out[k - 1] = s[k - 1];
            out
        }
    }
}

/// Exact output state `u2 ∘ (Σ p_k σ_k · σ_k) ∘ u1` applied to `rho0`.
pub fn run_exact(spec: &NetworkSpec, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    spec.validate()?;
    let s = density_to_bloch(&rotate(&spec.u1, rho0)).0;
    let w = spec.weights();
    let mut mixed = [0.0; 3];
    for (k, wk) in w.iter().enumerate() {
        let b = pauli_branch(k, s);
        for i in 0..3 {
            mixed[i] += wk * b[i];
        }
    }
    let mid = bloch_to_density(&BlochVector(clamp_ball(mixed)))?;
    Ok(rotate(&spec.u2, &mid))
}

/// Channel realized by [`run_exact`], recovered from its action on `0, e_x, e_y, e_z`.
pub fn induced_channel(spec: &NetworkSpec) -> Result<AffineChannel> {
    let image = |s: [f64; 3]| -> Result<[f64; 3]> {
        Ok(density_to_bloch(&run_exact(spec, &bloch_to_density(&BlochVector(s))?)?).0)
    };
    let b = image([0.0; 3])?;
    let mut a = RealMatrix3::ZERO;
    for j in 0..3 {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        let col = image(e)?;
        a.set_column(j, [col[0] - b[0], col[1] - b[1], col[2] - b[2]]);
    }
    Ok(AffineChannel::new(a, b))
}

/// Monte Carlo estimate of [`run_exact`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRun {
    pub estimate: DensityMatrix,
    /// Standard error of the estimate in trace distance,
    /// `½ √(Σ_i Var(s_i) / n)` over the per-sample Bloch vectors.
    pub stderr: f64,
    pub counts: [u64; 4],
}

/// Draws `n` Pauli branches with probabilities `amplitudes²` and averages
/// the branch outputs. Output depends only on `(spec, rho0, n, seed)`;
/// branches are drawn sequentially from a single [`RNG_ALGORITHM`] stream.
pub fn run_sampled(spec: &NetworkSpec, rho0: &DensityMatrix, n: u64, seed: u64) -> Result<SampledRun> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let s = density_to_bloch(&rotate(&spec.u1, rho0)).0;
    let dist = WeightedIndex::new(spec.weights())
        .map_err(|e| Error::InvalidInput(format!("branch weights: {e}")))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = [0u64; 4];
    for _ in 0..n {
        counts[dist.sample(&mut rng)] += 1;
    }

    let nf = n as f64;
    let branches: Vec<[f64; 3]> = (0..4).map(|k| spec.u2.mul_vec(pauli_branch(k, s))).collect();
    let mut mean = [0.0; 3];
    for k in 0..4 {
        for i in 0..3 {
            mean[i] += counts[k] as f64 / nf * branches[k][i];
        }
    }
    let var: f64 = (0..3)
        .map(|i| (0..4).map(|k| counts[k] as f64 / nf * (branches[k][i] - mean[i]).powi(2)).sum::<f64>())
        .sum();
    let estimate = bloch_to_density(&BlochVector(clamp_ball(mean)))?;
    Ok(SampledRun { estimate, stderr: 0.5 * (var / nf).sqrt(), counts })
}
