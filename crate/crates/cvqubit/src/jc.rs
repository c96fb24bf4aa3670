//! Exact off-resonance Jaynes-Cummings building blocks.
//!
//! The interaction conserves the excitation number of each "variety" k,
//! coupling only |excited, k> and |ground, k+1>. All dynamics are
//! parametrized by the dimensionless pair (g tau, Delta tau); absolute
//! coupling, detuning and time are never needed separately.

use crate::numerics::{Mat2, C64};
use crate::{Error, Result};

/// Atomic level of a two-level atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Excited,
    Ground,
}

/// Initial single-qubit amplitudes on (ground, excited).
#[derive(Clone, Copy, Debug)]
pub struct QubitPrep {
    ground: C64,
    excited: C64,
}

impl QubitPrep {
    pub fn new(ground: C64, excited: C64) -> Result<Self> {
        let norm_sq = ground.norm_sqr() + excited.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "qubit preparation must be normalized within 1e-12, got norm^2 = {norm_sq}"
            )));
        }
        let scale = norm_sq.sqrt();
        Ok(QubitPrep {
            ground: ground / scale,
            excited: excited / scale,
        })
    }

    pub fn ground() -> Self {
        QubitPrep {
            ground: C64::new(1.0, 0.0),
            excited: C64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        QubitPrep {
            ground: C64::new(0.0, 0.0),
            excited: C64::new(1.0, 0.0),
        }
    }

    /// Real nonnegative superposition with ground weight |b1|^2.
    pub fn from_ground_weight(ground_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ground_weight) {
            return Err(Error::Domain(format!(
                "ground weight must lie in [0, 1], got {ground_weight}"
            )));
        }
        Ok(QubitPrep {
            ground: C64::new(ground_weight.sqrt(), 0.0),
            excited: C64::new((1.0 - ground_weight).sqrt(), 0.0),
        })
    }

    pub fn ground_amp(&self) -> C64 {
        self.ground
    }

    pub fn excited_amp(&self) -> C64 {
        self.excited
    }
}

/// Dimensionless parameters of one qubit-mode arm.
#[derive(Clone, Copy, Debug)]
pub struct ArmParams {
    pub g_tau: f64,
    pub delta_tau: f64,
}

impl ArmParams {
    pub fn new(g_tau: f64, delta_tau: f64) -> Result<Self> {
        if !g_tau.is_finite() || !delta_tau.is_finite() || g_tau < 0.0 {
            return Err(Error::Domain(format!(
                "arm parameters must be finite with g_tau >= 0 (g_tau={g_tau}, delta_tau={delta_tau})"
            )));
        }
        Ok(ArmParams { g_tau, delta_tau })
    }

    pub fn resonant(g_tau: f64) -> Result<Self> {
        Self::new(g_tau, 0.0)
    }
}

/// Generalized Rabi phase R_k tau = sqrt(4 (g tau)^2 (k+1) + (Delta tau)^2).
pub fn rabi_tau(k: u32, arm: &ArmParams) -> f64 {
    (4.0 * arm.g_tau * arm.g_tau * (k as f64 + 1.0) + arm.delta_tau * arm.delta_tau).sqrt()
}

/// 2x2 propagator of variety k on the basis (|excited, k>, |ground, k+1>).
///
/// U11 = cos(R/2) - i (Delta tau / R) sin(R/2), U12 = U21 =
/// -i (2 g tau sqrt(k+1) / R) sin(R/2), U22 = conj(U11), with R the
/// dimensionless Rabi phase.
pub fn jc_unitary(k: u32, arm: &ArmParams) -> Mat2 {
    let r = rabi_tau(k, arm);
    // sin(R/2)/R -> 1/2 as R -> 0; explicit branch removes the 0/0.
    let sinc_half = if r < 1e-8 {
        0.5
    } else {
        (0.5 * r).sin() / r
    };
    let cos_half = (0.5 * r).cos();
    let u11 = C64::new(cos_half, -arm.delta_tau * sinc_half);
    let u12 = C64::new(0.0, -2.0 * arm.g_tau * (k as f64 + 1.0).sqrt() * sinc_half);
    Mat2([[u11, u12], [u12, u11.conj()]])
}

/// Propagator entries extended with the frozen component: index -1 stands
/// for the ground-vacuum amplitude, which does not evolve.
pub(crate) fn u_ladder(arm: &ArmParams, k: i64) -> (C64, C64, C64) {
    if k < 0 {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    } else {
        let u = jc_unitary(k as u32, arm);
        (u.0[0][0], u.0[0][1], u.0[1][1])
    }
}

/// State of one arm after evolving (prep x |n>): at most four amplitudes on
/// (level, photon number) pairs.
#[derive(Clone, Debug)]
pub struct ArmBranch {
    pub n: u32,
    pub amps: Vec<(Level, u32, C64)>,
}

impl ArmBranch {
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|(_, _, a)| a.norm_sqr()).sum()
    }
}

/// Evolve one atom prepared in `prep` against an initial Fock state |n>.
///
/// The excited amplitude feeds variety k = n; the ground amplitude feeds
/// variety k = n-1, except at n = 0 where it stays frozen on |ground, 0>.
pub fn evolve_arm_branch(prep: &QubitPrep, n: u32, arm: &ArmParams) -> ArmBranch {
    let mut amps = Vec::with_capacity(4);
    let e = prep.excited_amp();
    if e != C64::new(0.0, 0.0) {
        let u = jc_unitary(n, arm);
        amps.push((Level::Excited, n, e * u.0[0][0]));
        amps.push((Level::Ground, n + 1, e * u.0[1][0]));
    }
    let g = prep.ground_amp();
    if g != C64::new(0.0, 0.0) {
        if n == 0 {
            amps.push((Level::Ground, 0, g));
        } else {
            let u = jc_unitary(n - 1, arm);
            amps.push((Level::Excited, n - 1, g * u.0[0][1]));
            amps.push((Level::Ground, n, g * u.0[1][1]));
        }
    }
    ArmBranch { n, amps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn rabi_values() {
        let arm = ArmParams::new(1.0, 0.0).unwrap();
        assert!((rabi_tau(0, &arm) - 2.0).abs() < 1e-15);
        assert!((rabi_tau(3, &arm) - 4.0).abs() < 1e-15);
        let arm = ArmParams::new(1.0, 2.0).unwrap();
        assert!((rabi_tau(0, &arm) - 2.0 * 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unitary_limits() {
        let id = jc_unitary(5, &ArmParams::new(0.0, 0.0).unwrap());
        assert!(id.mul(&Mat2::identity().adjoint()).unitarity_deviation() < 1e-15);
        assert!((id.0[0][0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(id.0[0][1].norm() < 1e-15);

        // Full vacuum Rabi flop.
        let u = jc_unitary(0, &ArmParams::new(FRAC_PI_2, 0.0).unwrap());
        assert!(u.0[0][0].norm() < 1e-15);
        assert!((u.0[0][1] - C64::new(0.0, -1.0)).norm() < 1e-15);

        // Off resonance: R tau = 2 sqrt 2.
        let u = jc_unitary(0, &ArmParams::new(1.0, 2.0).unwrap());
        let r = 2.0 * 2.0f64.sqrt();
        let expect = C64::new((r / 2.0).cos(), -(1.0 / 2.0f64.sqrt()) * (r / 2.0).sin());
        assert!((u.0[0][0] - expect).norm() < 1e-15);
    }

    #[test]
    fn unitarity_and_det_over_varieties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let arm = ArmParams::new(rng.gen_range(0.0..20.0), rng.gen_range(-10.0..10.0)).unwrap();
            for k in (0..=200).step_by(17) {
                let u = jc_unitary(k, &arm);
                assert!(u.unitarity_deviation() < 1e-12);
                assert!((u.det().norm() - 1.0).abs() < 1e-12);
                // time reversal: U U^dag = I
                let p = u.mul(&u.adjoint());
                assert!(p.mul(&Mat2::identity()).unitarity_deviation() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_vacuum_is_frozen() {
        let arm = ArmParams::new(3.7, -1.2).unwrap();
        let b = evolve_arm_branch(&QubitPrep::ground(), 0, &arm);
        assert_eq!(b.amps.len(), 1);
        let (level, k, a) = b.amps[0];
        assert_eq!((level, k), (Level::Ground, 0));
        assert!((a - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ground_single_photon_full_flop() {
        // Variety k=0 at g tau = pi/2 moves |ground,1> entirely to |excited,0>.
        let arm = ArmParams::new(FRAC_PI_2, 0.0).unwrap();
        let b = evolve_arm_branch(&QubitPrep::ground(), 1, &arm);
        let mut excited0 = C64::new(0.0, 0.0);
        let mut ground1 = C64::new(0.0, 0.0);
        for (level, k, a) in &b.amps {
            match (level, k) {
                (Level::Excited, 0) => excited0 = *a,
                (Level::Ground, 1) => ground1 = *a,
                other => panic!("unexpected support {other:?}"),
            }
        }
        assert!((excited0 - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(ground1.norm() < 1e-15);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn excited_vacuum_partial_flop() {
        let arm = ArmParams::new(FRAC_PI_4, 0.0).unwrap();
        let b = evolve_arm_branch(&QubitPrep::excited(), 0, &arm);
        for (level, k, a) in &b.amps {
            match (level, k) {
                (Level::Excited, 0) => {
                    assert!((a - C64::new(FRAC_PI_4.cos(), 0.0)).norm() < 1e-15)
                }
                (Level::Ground, 1) => {
                    assert!((a - C64::new(0.0, -FRAC_PI_4.sin())).norm() < 1e-15)
                }
                other => panic!("unexpected support {other:?}"),
            }
        }
    }

    #[test]
    fn branch_norm_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let w = rng.gen_range(0.0..1.0f64);
            let prep = QubitPrep::new(
                C64::new(w.sqrt(), 0.0),
                C64::from_polar((1.0 - w).sqrt(), phase),
            )
            .unwrap();
            let arm = ArmParams::new(rng.gen_range(0.0..15.0), rng.gen_range(-8.0..8.0)).unwrap();
            let n = rng.gen_range(0..=100);
            let b = evolve_arm_branch(&prep, n, &arm);
            assert!((b.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prep_validation() {
        assert!(QubitPrep::new(C64::new(1.0, 0.0), C64::new(0.5, 0.0)).is_err());
        assert!(QubitPrep::from_ground_weight(1.2).is_err());
        assert!(ArmParams::new(-1.0, 0.0).is_err());
        assert!(ArmParams::new(f64::NAN, 0.0).is_err());
    }
}
