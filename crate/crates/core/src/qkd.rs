//! Symmetric incoherent eavesdropping on four- and six-state key distribution.
//!
//! A symmetric attack appears to Alice and Bob as a Pauli channel with
//! `η_x = η_z = η` (four-state) or `η_x = η_y = η_z = η` (six-state).
//! Disturbance is `D = (1 − η)/2`, fidelity `F = 1 − D`, and Eve's probe
//! states for matching bits overlap by `(η + η_y)/2` resp. `η`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::matkit::{pauli_matrices, ComplexMatrix, C0, C1, CI};
use crate::tetra::{self, EtaVector, MEMBERSHIP_TOL};
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Bases x and z.
    FourState,
    /// Bases x, y and z.
    SixState,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::FourState => "four-state",
            Protocol::SixState => "six-state",
        }
    }

    /// The bases in which Alice prepares (0 = x, 1 = y, 2 = z).
    pub fn bases(&self) -> &'static [usize] {
        match self {
            Protocol::FourState => &[0, 2],
            Protocol::SixState => &[0, 1, 2],
        }
    }

    fn check_symmetry(&self, eta: &EtaVector) -> Result<()> {
        let [x, y, z] = eta.0;
        let ok = match self {
            Protocol::FourState => (x - z).abs() <= SYMMETRY_TOL,
            Protocol::SixState => (x - y).abs() <= SYMMETRY_TOL && (x - z).abs() <= SYMMETRY_TOL,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SymmetryViolation(format!("{} attack needs symmetric eta, got {eta}", self.name())))
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "four-state" | "four" | "4" | "bb84" => Ok(Protocol::FourState),
            "six-state" | "six" | "6" => Ok(Protocol::SixState),
            _ => Err(Error::InvalidInput(format!("unknown protocol `{s}`"))),
        }
    }
}

impl Serialize for Protocol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Summary of an attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackReport {
    pub protocol: Protocol,
    pub eta: EtaVector,
    #[serde(rename = "D")]
    pub disturbance: f64,
    #[serde(rename = "F")]
    pub fidelity: f64,
    pub overlap: f64,
    pub p_c: f64,
}

/// `<E00|E11>` for a symmetric attack.
pub fn overlap(protocol: Protocol, eta: &EtaVector) -> Result<f64> {
    protocol.check_symmetry(eta)?;
    Ok(match protocol {
        Protocol::FourState => (eta.x() + eta.y()) / 2.0,
        Protocol::SixState => eta.x(),
    })
}

/// Eve's probability of guessing a shared bit with the optimal measurement,
/// `p_c = ½ + ½√(1 − overlap²/F)`.
pub fn success_probability(protocol: Protocol, eta: &EtaVector) -> Result<f64> {
    let ov = overlap(protocol, eta)?;
    if !tetra::in_d(eta, MEMBERSHIP_TOL) {
        let min = crate::channel::is_cp(&crate::channel::AffineChannel::diagonal(*eta), 0.0).min_eigenvalue;
        return Err(Error::NotCP(min));
    }
    let fidelity = (1.0 + eta.x()) / 2.0;
    Ok(guess_probability(ov, fidelity))
}

fn guess_probability(overlap: f64, fidelity: f64) -> f64 {
    if fidelity <= 0.0 {
        return 1.0;
    }
    0.5 + 0.5 * (1.0 - overlap * overlap / fidelity).max(0.0).sqrt()
}

fn eta_min_for(d_max: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&d_max) {
        return Err(Error::DisturbanceOutOfRange(d_max));
    }
    Ok(1.0 - 2.0 * d_max)
}

/// Full report for a symmetric CP attack.
pub fn report(protocol: Protocol, eta: &EtaVector) -> Result<AttackReport> {
    let p_c = success_probability(protocol, eta)?;
    let disturbance = (1.0 - eta.x()) / 2.0;
    Ok(AttackReport {
        protocol,
        eta: *eta,
        disturbance,
        fidelity: 1.0 - disturbance,
        overlap: overlap(protocol, eta)?,
        p_c,
    })
}

/// The attack maximizing `p_c` under disturbance at most `d_max`.
///
/// Six-state: `(η_min, η_min, η_min)`. Four-state: `(η_min, 2η_min − 1, η_min)`,
/// the tetrahedron edge, as long as `η_min ≥ 1/3`. Below that `η_y = −η_min`
/// is still CP and makes the probe states orthogonal.
pub fn optimal_attack(protocol: Protocol, d_max: f64) -> Result<AttackReport> {
    let eta_min = eta_min_for(d_max)?;
    let eta = match protocol {
        Protocol::SixState => EtaVector::new(eta_min, eta_min, eta_min),
        Protocol::FourState if eta_min >= 1.0 / 3.0 => EtaVector::new(eta_min, 2.0 * eta_min - 1.0, eta_min),
        Protocol::FourState => EtaVector::new(eta_min, -eta_min, eta_min),
    };
    report(protocol, &eta)
}

/// Eve's probe inner products in one basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeOverlaps {
    /// `<E00|E00>`
    #[serde(rename = "F")]
    pub fidelity: f64,
    /// `<E01|E01>`
    #[serde(rename = "D")]
    pub disturbance: f64,
    /// `<E00|E11>`
    pub overlap: f64,
}

/// Probe overlaps from an explicit dilation, z basis.
pub fn probe_overlaps_dilation(eta: &EtaVector) -> Result<ProbeOverlaps> {
    probe_overlaps_in_basis(eta, 2)
}

/// Probe overlaps from the dilation `U|ψ>|E> = Σ_k K_k|ψ> ⊗ |e_k>` with Kraus
/// operators `K_k = √p_k σ_k` and a four-dimensional probe. In basis `θ`,
/// `|E_ij> = Σ_k <j_θ|K_k|i_θ> |e_k>`.
pub fn probe_overlaps_in_basis(eta: &EtaVector, axis: usize) -> Result<ProbeOverlaps> {
    assert!(axis < 3, "basis axis must be 0 (x), 1 (y) or 2 (z)");
    if !tetra::in_d(eta, MEMBERSHIP_TOL) {
        let min = crate::channel::is_cp(&crate::channel::AffineChannel::diagonal(*eta), 0.0).min_eigenvalue;
        return Err(Error::NotCP(min));
    }
    let weights = tetra::pauli_weights(eta).0.map(|p| p.max(0.0));
    let [sx, sy, sz] = pauli_matrices();
    let kraus: Vec<ComplexMatrix> = [ComplexMatrix::identity(2), sx, sy, sz]
        .iter()
        .zip(weights)
        .map(|(s, w)| s.scale_real(w.sqrt()))
        .collect();

    let basis = basis_vectors(axis);
    let probe = |i: usize, j: usize| -> [Complex64; 4] {
        let mut e = [C0; 4];
        for (k, op) in kraus.iter().enumerate() {
            let ki = op.mul_vec(&basis[i]);
            e[k] = basis[j].iter().zip(&ki).map(|(b, x)| b.conj() * x).sum();
        }
        e
    };
    let inner = |a: &[Complex64; 4], b: &[Complex64; 4]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };

    let e00 = probe(0, 0);
    let e01 = probe(0, 1);
    let e11 = probe(1, 1);
    Ok(ProbeOverlaps {
        fidelity: inner(&e00, &e00).re,
        disturbance: inner(&e01, &e01).re,
        overlap: inner(&e00, &e11).re,
    })
}

/// `|0>_θ, |1>_θ` with the standard 1/√2 normalization.
fn basis_vectors(axis: usize) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        0 => [[C1 * h, C1 * h], [C1 * h, -C1 * h]],
        1 => [[C1 * h, CI * h], [C1 * h, -CI * h]],
        _ => [[C1, C0], [C0, C1]],
    }
}

/// Grid-search oracle for [`optimal_attack`]: scans the feasible symmetric
/// points of `D` with `η ≥ η_min` and keeps the smallest `|overlap|`, ties
/// going to the lexicographically smallest `η`.
pub fn brute_force_optimum(protocol: Protocol, d_max: f64, resolution: f64) -> Result<EtaVector> {
    let eta_min = eta_min_for(d_max)?;
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::InvalidInput(format!("resolution {resolution} outside (0, 0.1]")));
    }
    let steps = |lo: f64, hi: f64| ((hi - lo) / resolution + 1e-9).floor() as usize;
    let n_eta = steps(eta_min, 1.0);
    let n_y = steps(-1.0, 1.0);

    let mut best: Option<(f64, EtaVector)> = None;
    let mut consider = |e: EtaVector| {
        if !tetra::in_d(&e, MEMBERSHIP_TOL) {
            return;
        }
        let score = overlap(protocol, &e).expect("grid points are symmetric").abs();
        let better = match &best {
            None => true,
            Some((s, b)) => score < *s || (score == *s && e.0 < b.0),
        };
        if better {
            best = Some((score, e));
        }
    };

    for i in 0..=n_eta {
        let eta = eta_min + i as f64 * resolution;
        match protocol {
            Protocol::SixState => consider(EtaVector::new(eta, eta, eta)),
            Protocol::FourState => {
                for j in 0..=n_y {
                    consider(EtaVector::new(eta, -1.0 + j as f64 * resolution, eta));
                }
            }
        }
    }
    best.map(|(_, e)| e).ok_or(Error::EmptyIntersection)
}
