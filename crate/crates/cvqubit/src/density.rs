//! Assembly of the evolved field (x) qubits state and its reduction to the
//! two-qubit density matrix.
//!
//! Two independent routes produce the same matrix:
//!
//! * [`evolve_joint`] + [`reduce_to_qubits`] — the authoritative state-vector
//!   path: per-Fock-branch arm evolutions are accumulated into a sparse joint
//!   amplitude map and the field is traced out;
//! * [`closed_form_density`] — a direct term-by-term summation of every
//!   matrix element over the photon ladder, kept as a cross-check.

use std::collections::BTreeMap;

use crate::cv_states::FockCoefficients;
use crate::jc::{evolve_arm_branch, u_ladder, ArmParams, Level, QubitPrep};
use crate::numerics::{Mat4, C64};
use crate::{Error, Result};

/// Sparse amplitudes of the full field (x) qubits state, keyed by
/// (level_A, photons_A, level_B, photons_B).
#[derive(Clone, Debug)]
pub struct JointAmplitudes {
    map: BTreeMap<(Level, u32, Level, u32), C64>,
    tail_eps: f64,
}

impl JointAmplitudes {
    pub fn amplitude(&self, level_a: Level, k_a: u32, level_b: Level, k_b: u32) -> C64 {
        self.map
            .get(&(level_a, k_a, level_b, k_b))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Level, u32, Level, u32), &C64)> {
        self.map.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.map.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }
}

/// Evolve both arms over every retained Fock branch and accumulate the
/// product amplitudes. Amplitudes from different branches that land on the
/// same basis state are summed.
pub fn evolve_joint(
    coeffs: &FockCoefficients,
    prep_a: &QubitPrep,
    prep_b: &QubitPrep,
    arm_a: &ArmParams,
    arm_b: &ArmParams,
) -> JointAmplitudes {
    let mut map = BTreeMap::new();
    for (n, &cn) in coeffs.amplitudes().iter().enumerate() {
        if cn == C64::new(0.0, 0.0) {
            continue;
        }
        let branch_a = evolve_arm_branch(prep_a, n as u32, arm_a);
        let branch_b = evolve_arm_branch(prep_b, n as u32, arm_b);
        for &(la, ka, va) in &branch_a.amps {
            for &(lb, kb, vb) in &branch_b.amps {
                *map.entry((la, ka, lb, kb)).or_insert(C64::new(0.0, 0.0)) += cn * va * vb;
            }
        }
    }
    JointAmplitudes {
        map,
        tail_eps: coeffs.tail_eps(),
    }
}

/// Reduced state of the qubit pair in the ordered basis
/// (|e e>, |e g>, |g e>, |g g>).
#[derive(Clone, Copy, Debug)]
pub struct TwoQubitDensity {
    matrix: Mat4,
    trace_tol: f64,
}

impl TwoQubitDensity {
    /// Wrap a matrix after checking hermiticity and trace.
    pub fn new(matrix: Mat4, trace_tol: f64) -> Result<Self> {
        let dev = matrix.hermiticity_deviation();
        if dev > 1e-12 {
            return Err(Error::Contract(format!(
                "density matrix deviates from Hermitian by {dev:e}"
            )));
        }
        let trace_err = (matrix.trace().re - 1.0).abs().max(matrix.trace().im.abs());
        if trace_err > trace_tol {
            return Err(Error::Contract(format!(
                "density matrix trace off by {trace_err:e} (tolerance {trace_tol:e})"
            )));
        }
        Ok(TwoQubitDensity { matrix, trace_tol })
    }

    pub fn from_matrix(matrix: Mat4) -> Result<Self> {
        Self::new(matrix, 1e-9)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix.0[i][j]
    }

    pub fn trace_error(&self) -> f64 {
        (self.matrix.trace().re - 1.0).abs()
    }

    pub fn trace_tol(&self) -> f64 {
        self.trace_tol
    }
}

fn level_index(l: Level) -> usize {
    match l {
        Level::Excited => 0,
        Level::Ground => 1,
    }
}

/// Trace out the field: rho[(a,b),(a',b')] = sum over photon numbers of
/// psi(a,kA,b,kB) conj(psi(a',kA,b',kB)).
pub fn reduce_to_qubits(joint: &JointAmplitudes) -> Result<TwoQubitDensity> {
    // Group by field key, then add one rank-one update per key.
    let mut by_field: BTreeMap<(u32, u32), [C64; 4]> = BTreeMap::new();
    for (&(la, ka, lb, kb), &v) in joint.iter() {
        let vec = by_field.entry((ka, kb)).or_insert([C64::new(0.0, 0.0); 4]);
        vec[2 * level_index(la) + level_index(lb)] += v;
    }
    let mut rho = Mat4::zeros();
    for vec in by_field.values() {
        for i in 0..4 {
            for j in 0..4 {
                rho.0[i][j] += vec[i] * vec[j].conj();
            }
        }
    }
    TwoQubitDensity::new(rho, 2.0 * joint.tail_eps())
}

/// Direct closed-form summation of all ten independent density matrix
/// elements over the photon ladder.
///
/// Index -1 in the propagator ladder stands for the frozen ground-vacuum
/// component (u12 = 0, u22 = 1), which uniformly absorbs the standalone
/// boundary terms of the sums.
pub fn closed_form_density(
    coeffs: &FockCoefficients,
    prep_a: &QubitPrep,
    prep_b: &QubitPrep,
    arm_a: &ArmParams,
    arm_b: &ArmParams,
) -> Result<TwoQubitDensity> {
    let a1 = prep_a.ground_amp();
    let a2 = prep_a.excited_amp();
    let b1 = prep_b.ground_amp();
    let b2 = prep_b.excited_amp();
    let nmax = coeffs.nmax() as i64;

    let mut rho = Mat4::zeros();
    for j in 0..=nmax + 1 {
        let (ua11_j, ua12_j, _) = u_ladder(arm_a, j);
        let (ub11_j, ub12_j, _) = u_ladder(arm_b, j);
        let (_, ua12_m, ua22_m) = u_ladder(arm_a, j - 1);
        let (_, ub12_m, ub22_m) = u_ladder(arm_b, j - 1);
        let (_, _, ua22_mm) = u_ladder(arm_a, j - 2);
        let (_, _, ub22_mm) = u_ladder(arm_b, j - 2);
        let ua11_m = u_ladder(arm_a, j - 1).0;
        let ub11_m = u_ladder(arm_b, j - 1).0;
        let (c_j, c_jm, c_jp) = (coeffs.get(j), coeffs.get(j - 1), coeffs.get(j + 1));

        // Joint amplitudes on the field keys that can interfere; the letters
        // follow the row basis: t = |e e>, s = |e g>, w = |g e>, v = |g g>.
        let t1 = c_j * a2 * b2 * ua11_j * ub11_j + c_jp * a1 * b1 * ua12_j * ub12_j; // (j, j)
        let t2 = c_j * a2 * b1 * ua11_j * ub12_m; // (j, j-1), j >= 1
        let t3 = c_j * a1 * b2 * ua12_m * ub11_j; // (j-1, j), j >= 1

        let s1 = c_jm * a2 * b2 * ua11_m * ub12_m + c_j * a1 * b1 * ua12_m * ub22_m; // (j-1, j), j >= 1
        let s2 = c_j * a2 * b1 * ua11_j * ub22_m; // (j, j)
        let s3 = c_j * a1 * b2 * ua12_m * ub12_j; // (j-1, j+1), j >= 1

        let w1 = c_jm * a2 * b2 * ua12_m * ub11_m + c_j * a1 * b1 * ua22_m * ub12_m; // (j, j-1), j >= 1
        let w2 = c_j * a1 * b2 * ua22_m * ub11_j; // (j, j)
        let w3 = c_j * a2 * b1 * ua12_j * ub12_m; // (j+1, j-1), j >= 1

        let v1 = c_jm * a2 * b2 * ua12_m * ub12_m + c_j * a1 * b1 * ua22_m * ub22_m; // (j, j)
        let v2 = c_jm * a2 * b1 * ua12_m * ub22_mm; // (j, j-1), j >= 1
        let v3 = c_jm * a1 * b2 * ua22_mm * ub12_m; // (j-1, j), j >= 1

        let re = |z: C64| C64::new(z.norm_sqr(), 0.0);

        rho.0[0][0] += re(t1);
        rho.0[1][1] += re(s2);
        rho.0[2][2] += re(w2);
        rho.0[3][3] += re(v1);
        rho.0[0][1] += t1 * (c_j * a2 * b1 * ua11_j * ub22_m).conj();
        rho.0[0][2] += t1 * (c_j * a1 * b2 * ua22_m * ub11_j).conj();
        rho.0[0][3] += t1 * v1.conj();
        rho.0[1][2] += (c_j * a2 * b1 * ua11_j * ub22_m) * (c_j * a1 * b2 * ua22_m * ub11_j).conj();
        rho.0[1][3] += s2 * v1.conj();
        rho.0[2][3] += w2 * v1.conj();

        if j >= 1 {
            rho.0[0][0] += re(t2) + re(t3);
            rho.0[1][1] += re(s1) + re(s3);
            rho.0[2][2] += re(w1) + re(w3);
            rho.0[3][3] += re(v2) + re(v3);
            rho.0[0][1] += t3 * s1.conj();
            rho.0[0][2] += t2 * w1.conj();
            rho.0[0][3] += t2 * v2.conj() + t3 * v3.conj();
            rho.0[1][3] += s1 * v3.conj();
            rho.0[2][3] += w1 * v2.conj();
        }
    }
    for i in 0..4 {
        for j in 0..i {
            rho.0[i][j] = rho.0[j][i].conj();
        }
    }
    TwoQubitDensity::new(rho, 2.0 * coeffs.tail_eps())
}
