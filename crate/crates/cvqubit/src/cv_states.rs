//! Two-mode field state families that are Schmidt diagonal in the joint Fock
//! basis: the two-state superposition (TSS), the twin-beam state (TWB) and
//! the pair-coherent state (TMC).
//!
//! All three are handled through their Fock amplitudes c_n with the state
//! |x> = sum_n c_n |nn>. Truncation keeps the smallest Nmax whose cumulative
//! probability reaches 1 - tail_eps, with a hard cap that bounds memory and
//! time predictably.

use crate::numerics::{bessel_i, bisect_increasing, C64};
use crate::{Error, Result};

/// The supported state families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateFamily {
    Tss,
    Twb,
    Tmc,
}

impl std::fmt::Display for StateFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateFamily::Tss => "tss",
            StateFamily::Twb => "twb",
            StateFamily::Tmc => "tmc",
        })
    }
}

impl std::str::FromStr for StateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tss" => Ok(StateFamily::Tss),
            "twb" => Ok(StateFamily::Twb),
            "tmc" => Ok(StateFamily::Tmc),
            other => Err(Error::Domain(format!("unknown state family `{other}`"))),
        }
    }
}

/// Fock-tail truncation policy.
#[derive(Clone, Copy, Debug)]
pub struct Truncation {
    /// Largest probability mass allowed to remain above Nmax.
    pub tail_eps: f64,
    /// Hard cap on the number of retained Fock levels.
    pub max_n: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            tail_eps: 1e-12,
            max_n: 512,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum SpecKind {
    Tss { c0: C64, c1: C64 },
    Twb { x: C64 },
    Tmc { x: C64 },
}

/// A validated two-mode state specification.
#[derive(Clone, Copy, Debug)]
pub struct CvStateSpec {
    kind: SpecKind,
    trunc: Truncation,
}

/// Pair-coherent |x| beyond this would push the Bessel argument out of its
/// supported range.
const TMC_MAX_X: f64 = 30.0;

impl CvStateSpec {
    /// TSS from explicit amplitudes; the pair is renormalized so downstream
    /// norms are exact.
    pub fn tss(c0: C64, c1: C64, trunc: Truncation) -> Result<Self> {
        let norm_sq = c0.norm_sqr() + c1.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "tss amplitudes must satisfy |c0|^2+|c1|^2 = 1 within 1e-12, got {norm_sq}"
            )));
        }
        let scale = norm_sq.sqrt();
        Ok(CvStateSpec {
            kind: SpecKind::Tss {
                c0: c0 / scale,
                c1: c1 / scale,
            },
            trunc,
        })
    }

    /// TSS parametrized by the vacuum probability P00, real nonnegative
    /// amplitudes.
    pub fn tss_from_p00(p00: f64, trunc: Truncation) -> Result<Self> {
        if !(0.0..=1.0).contains(&p00) {
            return Err(Error::Domain(format!(
                "tss P00 must lie in [0, 1], got {p00}"
            )));
        }
        Ok(CvStateSpec {
            kind: SpecKind::Tss {
                c0: C64::new(p00.sqrt(), 0.0),
                c1: C64::new((1.0 - p00).sqrt(), 0.0),
            },
            trunc,
        })
    }

    pub fn twb(x: C64, trunc: Truncation) -> Result<Self> {
        if !x.norm().is_finite() || x.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "twb requires |x| < 1, got |x| = {}",
                x.norm()
            )));
        }
        Ok(CvStateSpec {
            kind: SpecKind::Twb { x },
            trunc,
        })
    }

    pub fn tmc(x: C64, trunc: Truncation) -> Result<Self> {
        if !x.norm().is_finite() || x.norm() > TMC_MAX_X {
            return Err(Error::Domain(format!(
                "tmc requires |x| <= {TMC_MAX_X}, got |x| = {}",
                x.norm()
            )));
        }
        Ok(CvStateSpec {
            kind: SpecKind::Tmc { x },
            trunc,
        })
    }

    /// Build a TWB or TMC spec from a target mean photon number.
    pub fn from_mean(family: StateFamily, mean_n: f64, trunc: Truncation) -> Result<Self> {
        let x = param_from_mean(family, mean_n)?;
        match family {
            StateFamily::Twb => Self::twb(C64::new(x, 0.0), trunc),
            StateFamily::Tmc => Self::tmc(C64::new(x, 0.0), trunc),
            StateFamily::Tss => unreachable!("param_from_mean rejects tss"),
        }
    }

    pub fn family(&self) -> StateFamily {
        match self.kind {
            SpecKind::Tss { .. } => StateFamily::Tss,
            SpecKind::Twb { .. } => StateFamily::Twb,
            SpecKind::Tmc { .. } => StateFamily::Tmc,
        }
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// The scalar reported in sweep records: P00 for TSS, |x| otherwise.
    pub fn report_param(&self) -> f64 {
        match self.kind {
            SpecKind::Tss { c0, .. } => c0.norm_sqr(),
            SpecKind::Twb { x } | SpecKind::Tmc { x } => x.norm(),
        }
    }

    /// Mean total photon number of the two modes.
    pub fn mean_photons(&self) -> f64 {
        match self.kind {
            SpecKind::Tss { c1, .. } => 2.0 * c1.norm_sqr(),
            SpecKind::Twb { x } => {
                let y = x.norm_sqr();
                2.0 * y / (1.0 - y)
            }
            SpecKind::Tmc { x } => tmc_mean(x.norm()),
        }
    }

    /// Truncated Fock amplitudes of the state.
    pub fn coefficients(&self) -> Result<FockCoefficients> {
        let Truncation { tail_eps, max_n } = self.trunc;
        let c = match self.kind {
            SpecKind::Tss { c0, c1 } => vec![c0, c1],
            SpecKind::Twb { x } => {
                let y = x.norm_sqr();
                if y > 0.0 {
                    // Tail above index n is y^(n+1); size the series up front.
                    let required = (tail_eps.ln() / y.ln()).ceil() as usize;
                    if required > max_n + 1 {
                        return Err(Error::TruncationOverflow {
                            required,
                            cap: max_n,
                        });
                    }
                }
                let c0 = C64::new((1.0 - y).sqrt(), 0.0);
                let mut c = vec![c0];
                let mut cum = c0.norm_sqr();
                while cum < 1.0 - tail_eps {
                    let next = c.last().unwrap() * x;
                    cum += next.norm_sqr();
                    c.push(next);
                }
                c
            }
            SpecKind::Tmc { x } => {
                let c0 = C64::new(1.0 / bessel_i(0, 2.0 * x.norm())?.sqrt(), 0.0);
                let mut c = vec![c0];
                let mut cum = c0.norm_sqr();
                while cum < 1.0 - tail_eps {
                    if c.len() > max_n {
                        return Err(Error::TruncationOverflow {
                            required: max_n + 1,
                            cap: max_n,
                        });
                    }
                    let n = c.len() as f64;
                    let next = c.last().unwrap() * x / n;
                    cum += next.norm_sqr();
                    c.push(next);
                }
                c
            }
        };
        FockCoefficients::new(c, tail_eps)
    }
}

/// Truncated Schmidt coefficients c_0..c_Nmax of a two-mode state.
#[derive(Clone, Debug)]
pub struct FockCoefficients {
    c: Vec<C64>,
    tail_bound: f64,
    tail_eps: f64,
}

impl FockCoefficients {
    pub fn new(c: Vec<C64>, tail_eps: f64) -> Result<Self> {
        let norm_sq: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        if !(1.0 - tail_eps..=1.0 + 1e-14).contains(&norm_sq) {
            return Err(Error::Contract(format!(
                "Fock coefficient norm {norm_sq} outside [1 - {tail_eps:e}, 1 + 1e-14]"
            )));
        }
        Ok(FockCoefficients {
            c,
            tail_bound: 1.0 - norm_sq,
            tail_eps,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.c
    }

    /// Amplitude c_j, zero outside the retained range.
    pub fn get(&self, j: i64) -> C64 {
        if j >= 0 && (j as usize) < self.c.len() {
            self.c[j as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Index of the highest retained Fock level.
    pub fn nmax(&self) -> usize {
        self.c.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }
}

/// Joint photon distribution P_nn = |c_n|^2.
pub fn photon_distribution(coeffs: &FockCoefficients) -> Vec<f64> {
    coeffs.c.iter().map(|v| v.norm_sqr()).collect()
}

fn tmc_mean(x_abs: f64) -> f64 {
    if x_abs == 0.0 {
        return 0.0;
    }
    let i0 = bessel_i(0, 2.0 * x_abs).expect("|x| validated against Bessel domain");
    let i1 = bessel_i(1, 2.0 * x_abs).expect("|x| validated against Bessel domain");
    2.0 * x_abs * i1 / i0
}

/// Invert the mean photon number map to |x| for TWB and TMC.
pub fn param_from_mean(family: StateFamily, mean_n: f64) -> Result<f64> {
    if !mean_n.is_finite() || mean_n < 0.0 {
        return Err(Error::Domain(format!(
            "target mean photon number must be finite and >= 0, got {mean_n}"
        )));
    }
    match family {
        StateFamily::Twb => Ok((mean_n / (mean_n + 2.0)).sqrt()),
        StateFamily::Tmc => {
            if mean_n == 0.0 {
                return Ok(0.0);
            }
            let mut hi = 1.0;
            while tmc_mean(hi) < mean_n {
                hi *= 2.0;
                if hi > TMC_MAX_X {
                    return Err(Error::Domain(format!(
                        "tmc mean photon number {mean_n} exceeds the supported range"
                    )));
                }
            }
            bisect_increasing(tmc_mean, mean_n, 0.0, hi, 1e-10)
        }
        StateFamily::Tss => Err(Error::Domain(
            "mean-photon inversion is defined for twb and tmc only".into(),
        )),
    }
}

/// Entanglement entropy of the pure two-mode state in bits,
/// -sum P_nn log2 P_nn with 0 log 0 := 0.
pub fn von_neumann_entropy(coeffs: &FockCoefficients) -> f64 {
    coeffs
        .c
        .iter()
        .map(|v| {
            let p = v.norm_sqr();
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        .max(0.0) // folds the pure-state -0.0 to 0
}

/// Closed form of the TWB entanglement entropy in bits.
pub fn twb_entropy_closed_form(x_abs: f64) -> f64 {
    if x_abs == 0.0 {
        return 0.0;
    }
    let y = x_abs * x_abs;
    -(1.0 - y).log2() - (2.0 * y / (1.0 - y)) * x_abs.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: StateFamily, param: f64) -> CvStateSpec {
        let t = Truncation::default();
        match family {
            StateFamily::Tss => CvStateSpec::tss_from_p00(param, t).unwrap(),
            StateFamily::Twb => CvStateSpec::twb(C64::new(param, 0.0), t).unwrap(),
            StateFamily::Tmc => CvStateSpec::tmc(C64::new(param, 0.0), t).unwrap(),
        }
    }

    #[test]
    fn bell_tss_amplitudes() {
        let c = spec(StateFamily::Tss, 0.5).coefficients().unwrap();
        let r = 0.5f64.sqrt();
        assert!((c.get(0).re - r).abs() < 1e-15);
        assert!((c.get(1).re - r).abs() < 1e-15);
        assert_eq!(c.nmax(), 1);
    }

    #[test]
    fn twb_vacuum_is_single_term() {
        let c = spec(StateFamily::Twb, 0.0).coefficients().unwrap();
        assert_eq!(c.nmax(), 0);
        assert!((c.get(0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tmc_unit_x_normalizes() {
        // c_0 = 1/sqrt(I0(2)), c_n = c_0 / n!; direct summation oracle.
        let c = spec(StateFamily::Tmc, 1.0).coefficients().unwrap();
        let c0 = 1.0 / bessel_i(0, 2.0).unwrap().sqrt();
        assert!((c.get(0).re - c0).abs() < 1e-14);
        let mut factorial = 1.0;
        for n in 1..=4 {
            factorial *= n as f64;
            assert!((c.get(n).re - c0 / factorial).abs() < 1e-14);
        }
        let direct: f64 = c.amplitudes().iter().map(|v| v.norm_sqr()).sum();
        assert!((direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn photon_distribution_matches_reported_peaks() {
        let p = photon_distribution(&spec(StateFamily::Tss, 0.5).coefficients().unwrap());
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        let s = CvStateSpec::from_mean(StateFamily::Twb, 1.82, Truncation::default()).unwrap();
        let p = photon_distribution(&s.coefficients().unwrap());
        assert!((p[0] - 0.52).abs() <= 0.01, "P00 = {}", p[0]);
        assert!((p[1] - 0.25).abs() <= 0.01, "P11 = {}", p[1]);

        let s = CvStateSpec::from_mean(StateFamily::Tmc, 1.09, Truncation::default()).unwrap();
        let p = photon_distribution(&s.coefficients().unwrap());
        assert!((p[0] - 0.54).abs() <= 0.01, "P00 = {}", p[0]);
        assert!((p[1] - 0.39).abs() <= 0.01, "P11 = {}", p[1]);
    }

    #[test]
    fn mean_photons_closed_forms() {
        let x = (1.0f64 / 3.0).sqrt();
        assert!((spec(StateFamily::Twb, x).mean_photons() - 1.0).abs() < 1e-14);
        assert_eq!(spec(StateFamily::Tmc, 0.0).mean_photons(), 0.0);
        assert!((spec(StateFamily::Tss, 0.5).mean_photons() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn param_from_mean_inverts() {
        assert_eq!(param_from_mean(StateFamily::Twb, 0.0).unwrap(), 0.0);
        let x = param_from_mean(StateFamily::Twb, 2.0).unwrap();
        assert!((x - 0.5f64.sqrt()).abs() < 1e-15);

        let x = param_from_mean(StateFamily::Tmc, 1.09).unwrap();
        assert!((tmc_mean(x) - 1.09).abs() <= 1e-9);

        assert!(param_from_mean(StateFamily::Twb, -1.0).is_err());
        assert!(param_from_mean(StateFamily::Tss, 1.0).is_err());
    }

    #[test]
    fn entropy_values() {
        let bell = spec(StateFamily::Tss, 0.5).coefficients().unwrap();
        assert!((von_neumann_entropy(&bell) - 1.0).abs() < 1e-15);
        let vac = spec(StateFamily::Twb, 0.0).coefficients().unwrap();
        assert_eq!(von_neumann_entropy(&vac), 0.0);

        let x = (1.0f64 / 3.0).sqrt();
        let series = von_neumann_entropy(&spec(StateFamily::Twb, x).coefficients().unwrap());
        assert!((series - twb_entropy_closed_form(x)).abs() < 1e-8);
    }

    #[test]
    fn generated_coefficients_are_normalized() {
        for family in [StateFamily::Twb, StateFamily::Tmc] {
            for i in 0..30 {
                let param = match family {
                    StateFamily::Twb => 0.03 * i as f64,
                    _ => 0.15 * i as f64,
                };
                let c = spec(family, param).coefficients().unwrap();
                assert!(c.tail_bound() <= c.tail_eps());
                let n = c.norm_sqr();
                assert!(n >= 1.0 - 1e-12 && n <= 1.0 + 1e-14, "norm {n}");
            }
        }
    }

    #[test]
    fn mean_photons_strictly_increasing() {
        let mut prev = -1.0;
        for i in 0..100 {
            let x = 0.0099 * i as f64;
            let m = spec(StateFamily::Twb, x).mean_photons();
            assert!(m > prev);
            prev = m;
        }
        let mut prev = -1.0;
        for i in 0..100 {
            let x = 0.2 * i as f64;
            let m = spec(StateFamily::Tmc, x).mean_photons();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn twb_entropy_dominates_tmc_at_equal_energy() {
        for mean_n in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let t = Truncation::default();
            let s_twb = von_neumann_entropy(
                &CvStateSpec::from_mean(StateFamily::Twb, mean_n, t)
                    .unwrap()
                    .coefficients()
                    .unwrap(),
            );
            let s_tmc = von_neumann_entropy(
                &CvStateSpec::from_mean(StateFamily::Tmc, mean_n, t)
                    .unwrap()
                    .coefficients()
                    .unwrap(),
            );
            assert!(s_twb >= s_tmc, "N={mean_n}: {s_twb} < {s_tmc}");
        }
    }

    #[test]
    fn tmc_distribution_decreases_at_unit_energy() {
        let s = CvStateSpec::from_mean(StateFamily::Tmc, 1.0, Truncation::default()).unwrap();
        let p = photon_distribution(&s.coefficients().unwrap());
        assert!(p[0] >= p[1] && p[1] >= p[2] && p[2] >= p[3]);
    }

    #[test]
    fn twb_truncation_overflow_reports_requirement() {
        let spec = CvStateSpec::twb(C64::new(1.0 - 1e-9, 0.0), Truncation::default()).unwrap();
        match spec.coefficients() {
            Err(Error::TruncationOverflow { required, cap }) => {
                assert!(required > cap);
                assert_eq!(cap, 512);
            }
            other => panic!("expected truncation overflow, got {other:?}"),
        }
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        let t = Truncation::default();
        assert!(CvStateSpec::twb(C64::new(1.0, 0.0), t).is_err());
        assert!(CvStateSpec::tss(C64::new(0.8, 0.0), C64::new(0.8, 0.0), t).is_err());
        assert!(CvStateSpec::tmc(C64::new(31.0, 0.0), t).is_err());
        assert!(CvStateSpec::tss_from_p00(1.5, t).is_err());
    }
}
