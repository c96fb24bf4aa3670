//! Two-qubit entanglement quantification: partial-transpose (Peres-Horodecki)
//! eigenvalues, Wootters concurrence, and the entanglement of formation.
//!
//! States produced by basis-state preparations have the X form (nonzero
//! entries only on the diagonal and the outer anti-diagonal); both the PPT
//! spectrum and the concurrence then reduce to closed forms, which are used
//! as a fast path and must agree with the general eigensolver route.
//!
//! The concurrence is computed through the Hermitian matrix
//! sqrt(rho) rho~ sqrt(rho), which shares its spectrum with rho rho~ while
//! staying real nonnegative numerically, so no non-symmetric eigensolver is
//! needed.

use crate::density::TwoQubitDensity;
use crate::numerics::{eigvals_hermitian4, sqrt_psd4, Mat4, C64};
use crate::{Error, Result};

/// Off-diagonal magnitude below which an entry counts as zero for X-form
/// detection.
pub const X_FORM_TOL: f64 = 1e-12;

/// Atomic preparation cases with a closed-form minimum PPT eigenvalue for
/// TSS fields at resonance with equal arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepCase {
    GroundGround,
    ExcitedExcited,
}

/// Everything the sweep engine records about one reduced state.
#[derive(Clone, Copy, Debug)]
pub struct EntanglementReport {
    /// Eigenvalues of the partial transpose, ascending.
    pub ppt_eigs: [f64; 4],
    /// Minimum PPT eigenvalue; negative iff the pair is entangled.
    pub lambda4: f64,
    pub concurrence: f64,
    /// Entanglement of formation in ebits.
    pub eof: f64,
    /// Whether the X-form fast path applied.
    pub x_form: bool,
}

/// True iff the matrix has the X zero pattern within [`X_FORM_TOL`].
pub fn is_x_form(rho: &TwoQubitDensity) -> bool {
    [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
        .iter()
        .all(|&(i, j)| rho.entry(i, j).norm() < X_FORM_TOL)
}

/// Partial transpose over qubit B: transpose each 2x2 block.
fn partial_transpose_b(m: &Mat4) -> Mat4 {
    let mut out = *m;
    for bi in [0, 2] {
        for bj in [0, 2] {
            let swap = out.0[bi][bj + 1];
            out.0[bi][bj + 1] = out.0[bi + 1][bj];
            out.0[bi + 1][bj] = swap;
        }
    }
    out
}

fn x_form_ppt_eigs(rho: &TwoQubitDensity) -> [f64; 4] {
    let r11 = rho.entry(0, 0).re;
    let r22 = rho.entry(1, 1).re;
    let r33 = rho.entry(2, 2).re;
    let r44 = rho.entry(3, 3).re;
    let r14 = rho.entry(0, 3).norm();
    let disc = ((r22 - r33) * (r22 - r33) + 4.0 * r14 * r14).sqrt();
    let mut eigs = [
        r44,
        r11,
        0.5 * (r22 + r33 + disc),
        0.5 * (r22 + r33 - disc),
    ];
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Eigenvalues of the partial transpose over qubit B, ascending.
pub fn ppt_eigenvalues(rho: &TwoQubitDensity) -> Result<[f64; 4]> {
    if is_x_form(rho) {
        Ok(x_form_ppt_eigs(rho))
    } else {
        eigvals_hermitian4(&partial_transpose_b(rho.matrix()))
    }
}

/// Closed-form minimum PPT eigenvalue for a TSS field at resonance with
/// equal arms, as a function of P00 and the dimensionless time g tau.
pub fn lambda4_tss(p00: f64, g_tau: f64, case: PrepCase) -> f64 {
    let s2 = g_tau.sin() * g_tau.sin();
    let c2 = g_tau.cos() * g_tau.cos();
    let cross = ((1.0 - p00) * p00).max(0.0).sqrt();
    match case {
        PrepCase::GroundGround => s2 * ((1.0 - p00) * c2 - cross),
        PrepCase::ExcitedExcited => {
            let arg = std::f64::consts::SQRT_2 * g_tau;
            let s2r = arg.sin() * arg.sin();
            let c2r = arg.cos() * arg.cos();
            (1.0 - p00) * s2r * c2r + s2 * (p00 * c2 - cross * c2r)
        }
    }
}

fn x_form_concurrence(rho: &TwoQubitDensity) -> f64 {
    let r11 = rho.entry(0, 0).re.max(0.0);
    let r22 = rho.entry(1, 1).re.max(0.0);
    let r33 = rho.entry(2, 2).re.max(0.0);
    let r44 = rho.entry(3, 3).re.max(0.0);
    let outer = rho.entry(0, 3).norm() - (r22 * r33).sqrt();
    let inner = rho.entry(1, 2).norm() - (r11 * r44).sqrt();
    (2.0 * outer.max(inner)).max(0.0)
}

/// Spin-flipped conjugate (sigma_y x sigma_y) rho* (sigma_y x sigma_y).
fn spin_flip(m: &Mat4) -> Mat4 {
    // sigma_y x sigma_y is the real anti-diagonal (-1, 1, 1, -1).
    let f = [-1.0, 1.0, 1.0, -1.0];
    let c = m.conj();
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out.0[i][j] = C64::new(f[i] * f[j], 0.0) * c.0[3 - i][3 - j];
        }
    }
    out
}

fn general_concurrence(rho: &TwoQubitDensity) -> Result<f64> {
    let s = sqrt_psd4(rho.matrix())?;
    let m = s.mul(&spin_flip(rho.matrix())).mul(&s);
    let eigs = eigvals_hermitian4(&m)?;
    let lam: Vec<f64> = eigs.iter().rev().map(|v| v.max(0.0).sqrt()).collect();
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// Wootters concurrence.
pub fn concurrence(rho: &TwoQubitDensity) -> Result<f64> {
    let c = if is_x_form(rho) {
        x_form_concurrence(rho)
    } else {
        general_concurrence(rho)?
    };
    // values inside [-1e-12, 0) are truncation noise
    Ok(if c < 0.0 { 0.0 } else { c })
}

/// Entanglement of formation in ebits as a function of the concurrence.
pub fn entanglement_of_formation(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::Domain(format!(
            "concurrence must lie in [0, 1], got {c}"
        )));
    }
    let c = c.clamp(0.0, 1.0);
    let p = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(binary_entropy(p))
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Full entanglement characterization of one reduced state.
pub fn report(rho: &TwoQubitDensity) -> Result<EntanglementReport> {
    let x_form = is_x_form(rho);
    let ppt_eigs = ppt_eigenvalues(rho)?;
    let c = concurrence(rho)?;
    Ok(EntanglementReport {
        ppt_eigs,
        lambda4: ppt_eigs[0],
        concurrence: c,
        eof: entanglement_of_formation(c)?,
        x_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv_states::{CvStateSpec, Truncation};
    use crate::density::{evolve_joint, reduce_to_qubits};
    use crate::jc::{ArmParams, QubitPrep};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn density(m: Mat4) -> TwoQubitDensity {
        TwoQubitDensity::from_matrix(m).unwrap()
    }

    fn bell_transfer_rho() -> TwoQubitDensity {
        let mut m = Mat4::from_diag([0.5, 0.0, 0.0, 0.5]);
        m.0[0][3] = C64::new(-0.5, 0.0);
        m.0[3][0] = C64::new(-0.5, 0.0);
        density(m)
    }

    #[test]
    fn ppt_of_reference_states() {
        let eigs = ppt_eigenvalues(&density(Mat4::from_diag([0.25; 4]))).unwrap();
        assert_eq!(eigs, [0.25; 4]);

        let eigs = ppt_eigenvalues(&bell_transfer_rho()).unwrap();
        assert!((eigs[0] + 0.5).abs() < 1e-14);

        let eigs = ppt_eigenvalues(&density(Mat4::from_diag([0.0, 0.0, 0.0, 1.0]))).unwrap();
        assert!(eigs[0].abs() < 1e-14 && (eigs[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn x_form_closed_ppt_agrees_with_general_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..200 {
            // random X-form density matrix
            let mut d = [0.0; 4];
            let mut t = 0.0;
            for v in d.iter_mut() {
                *v = rng.gen_range(0.0..1.0);
                t += *v;
            }
            for v in d.iter_mut() {
                *v /= t;
            }
            let mut m = Mat4::from_diag(d);
            let r14 = C64::from_polar(
                rng.gen_range(0.0..(d[0] * d[3]).sqrt()),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            m.0[0][3] = r14;
            m.0[3][0] = r14.conj();
            let rho = density(m);
            assert!(is_x_form(&rho));
            let closed = x_form_ppt_eigs(&rho);
            let general = eigvals_hermitian4(&partial_transpose_b(rho.matrix())).unwrap();
            for (a, b) in closed.iter().zip(general.iter()) {
                assert!((a - b).abs() < 1e-10, "closed {a} vs general {b}");
            }
        }
    }

    #[test]
    fn lambda4_tss_reference_points() {
        assert!((lambda4_tss(0.5, FRAC_PI_2, PrepCase::GroundGround) + 0.5).abs() < 1e-15);
        assert_eq!(lambda4_tss(1.0, 2.7, PrepCase::GroundGround), 0.0);
        let v = lambda4_tss(0.5, 26.68, PrepCase::ExcitedExcited);
        assert!((v + 0.498).abs() < 1e-3, "got {v}");
        assert!(v <= -0.49);
    }

    #[test]
    fn lambda4_tss_periodic_in_pi() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let p00 = rng.gen_range(0.0..1.0);
            let gt = rng.gen_range(0.0..20.0);
            let a = lambda4_tss(p00, gt, PrepCase::GroundGround);
            let b = lambda4_tss(p00, gt + std::f64::consts::PI, PrepCase::GroundGround);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_reference_states() {
        assert!((concurrence(&bell_transfer_rho()).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(
            concurrence(&density(Mat4::from_diag([0.25; 4]))).unwrap(),
            0.0
        );

        // X-form example with both anti-diagonal candidates present
        let mut m = Mat4::from_diag([0.3, 0.2, 0.2, 0.3]);
        m.0[0][3] = C64::new(0.25, 0.0);
        m.0[3][0] = C64::new(0.25, 0.0);
        let rho = density(m);
        let c = concurrence(&rho).unwrap();
        assert!((c - 0.1).abs() < 1e-14);
        let general = general_concurrence(&rho).unwrap();
        assert!((c - general).abs() < 1e-10);
    }

    #[test]
    fn eof_endpoints_and_monotonicity() {
        assert_eq!(entanglement_of_formation(0.0).unwrap(), 0.0);
        assert!((entanglement_of_formation(1.0).unwrap() - 1.0).abs() < 1e-15);

        // direct binary-entropy evaluation at C = 1/2
        let p = 0.5 * (1.0 + 0.75f64.sqrt());
        let expect = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((entanglement_of_formation(0.5).unwrap() - expect).abs() < 1e-15);

        let mut prev = -1.0;
        for i in 0..=100 {
            let c = i as f64 / 100.0;
            let e = entanglement_of_formation(c).unwrap();
            assert!(e >= prev);
            prev = e;
        }
        assert!(entanglement_of_formation(1.5).is_err());
    }

    #[test]
    fn report_composes_measures() {
        let r = report(&bell_transfer_rho()).unwrap();
        assert!(r.x_form);
        assert!((r.eof - 1.0).abs() < 1e-12);
        assert!((r.lambda4 + 0.5).abs() < 1e-12);
        assert!((r.concurrence - 1.0).abs() < 1e-12);

        let r = report(&density(Mat4::from_diag([0.25; 4]))).unwrap();
        assert_eq!(r.eof, 0.0);
        assert!((r.lambda4 - 0.25).abs() < 1e-15);
    }

    fn kron2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        m
    }

    fn random_su2(rng: &mut ChaCha8Rng) -> [[C64; 2]; 2] {
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let ph1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let ph2 = rng.gen_range(0.0..std::f64::consts::TAU);
        let a = C64::from_polar(th.cos(), ph1);
        let b = C64::from_polar(th.sin(), ph2);
        [[a, b], [-b.conj(), a.conj()]]
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let spec = CvStateSpec::tss_from_p00(0.3, Truncation::default()).unwrap();
        let coeffs = spec.coefficients().unwrap();
        let arm = ArmParams::resonant(1.1).unwrap();
        let rho = reduce_to_qubits(&evolve_joint(
            &coeffs,
            &QubitPrep::ground(),
            &QubitPrep::ground(),
            &arm,
            &arm,
        ))
        .unwrap();
        let c0 = concurrence(&rho).unwrap();
        let e0 = entanglement_of_formation(c0).unwrap();
        for _ in 0..40 {
            let u = kron2(&random_su2(&mut rng), &random_su2(&mut rng));
            let rotated = u.mul(rho.matrix()).mul(&u.adjoint());
            let rho_rot = TwoQubitDensity::from_matrix(rotated).unwrap();
            let c1 = concurrence(&rho_rot).unwrap();
            assert!((c0 - c1).abs() < 1e-10, "{c0} vs {c1}");
            let e1 = entanglement_of_formation(c1).unwrap();
            assert!((e0 - e1).abs() < 1e-10);
        }
    }

    #[test]
    fn negativity_iff_concurrence_for_pipeline_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let spec = CvStateSpec::tss_from_p00(rng.gen_range(0.0..1.0), Truncation::default())
                .unwrap();
            let arm = ArmParams::resonant(rng.gen_range(0.0..12.0)).unwrap();
            let rho = reduce_to_qubits(&evolve_joint(
                &spec.coefficients().unwrap(),
                &QubitPrep::ground(),
                &QubitPrep::ground(),
                &arm,
                &arm,
            ))
            .unwrap();
            let r = report(&rho).unwrap();
            if r.lambda4 < -1e-10 {
                assert!(r.concurrence > 0.0);
            }
            if r.concurrence > 1e-10 {
                assert!(r.lambda4 < 0.0);
            }
        }
    }

    #[test]
    fn analytic_lambda4_lies_in_numeric_ppt_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..200 {
            let p00 = rng.gen_range(0.0..1.0);
            let gt = rng.gen_range(0.0..15.0);
            for (case, prep) in [
                (PrepCase::GroundGround, QubitPrep::ground()),
                (PrepCase::ExcitedExcited, QubitPrep::excited()),
            ] {
                let spec = CvStateSpec::tss_from_p00(p00, Truncation::default()).unwrap();
                let arm = ArmParams::resonant(gt).unwrap();
                let rho = reduce_to_qubits(&evolve_joint(
                    &spec.coefficients().unwrap(),
                    &prep,
                    &prep,
                    &arm,
                    &arm,
                ))
                .unwrap();
                let eigs = ppt_eigenvalues(&rho).unwrap();
                let lam = lambda4_tss(p00, gt, case);
                let closest = eigs
                    .iter()
                    .map(|e| (e - lam).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(closest < 1e-10, "analytic {lam} missing from {eigs:?}");
                if lam < -1e-8 {
                    assert!((eigs[0] - lam).abs() < 1e-10);
                }
            }
        }
    }
}
