//! Scenario definitions and the sweep engine: resonance maps, peak tables,
//! detuning scans, interaction-time-mismatch scans, delayed-injection scans,
//! and CSV emission.
//!
//! Grid points are independent pure computations; the engine evaluates them
//! in parallel but output ordering is fixed by grid indices, so reruns are
//! byte-identical.

use std::io::Write;

use rayon::prelude::*;

use crate::cv_states::{photon_distribution, CvStateSpec, StateFamily, Truncation};
use crate::density::{evolve_joint, reduce_to_qubits};
use crate::entanglement::report;
use crate::jc::{ArmParams, QubitPrep};
use crate::numerics::C64;
use crate::{Error, Result};

/// Default dimensionless-time grid used by the resonance maps.
pub const DEFAULT_GTAU_AXIS: GridRange = GridRange {
    min: 0.0,
    max: 12.0,
    steps: 600,
};

/// Default mean-photon-number grid; the interesting structure sits below
/// <N> = 4.
pub const DEFAULT_N_AXIS: GridRange = GridRange {
    min: 0.02,
    max: 4.0,
    steps: 200,
};

/// Default P00 grid for TSS maps.
pub const DEFAULT_P00_AXIS: GridRange = GridRange {
    min: 0.0,
    max: 1.0,
    steps: 201,
};

/// Inclusive linear grid.
#[derive(Clone, Copy, Debug)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min > max || steps < 2 {
            return Err(Error::Domain(format!(
                "grid needs finite min <= max and steps >= 2 (min={min}, max={max}, steps={steps})"
            )));
        }
        Ok(GridRange { min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        let d = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + d * i as f64).collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }
}

/// Which scenario field a sweep axis drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    P00,
    MeanPhotons,
    GTauBoth,
    GTauA,
    GTauB,
    DetuningBoth,
    DetuningA,
    DetuningB,
}

#[derive(Clone, Copy, Debug)]
pub struct AxisSpec {
    pub axis: SweepAxis,
    pub range: GridRange,
}

/// The CV state parameter of a single evaluation point.
#[derive(Clone, Copy, Debug)]
pub enum StateParam {
    P00(f64),
    MeanPhotons(f64),
    XMag(f64),
}

/// Fully resolved inputs of one evaluation point.
#[derive(Clone, Copy, Debug)]
pub struct PointInputs {
    pub family: StateFamily,
    pub param: StateParam,
    pub prep_a: QubitPrep,
    pub prep_b: QubitPrep,
    pub arm_a: ArmParams,
    pub arm_b: ArmParams,
    pub trunc: Truncation,
}

/// A sweep template: a base point plus up to two swept axes.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub base: PointInputs,
    pub axes: Vec<AxisSpec>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(Error::Domain(format!(
                "at most 2 sweep axes supported, got {}",
                self.axes.len()
            )));
        }
        for (i, a) in self.axes.iter().enumerate() {
            GridRange::new(a.range.min, a.range.max, a.range.steps)?;
            for b in &self.axes[i + 1..] {
                if a.axis == b.axis {
                    return Err(Error::Domain(format!("duplicate sweep axis {:?}", a.axis)));
                }
            }
            match a.axis {
                SweepAxis::P00 => {
                    if self.base.family != StateFamily::Tss {
                        return Err(Error::Domain("P00 axis requires the tss family".into()));
                    }
                }
                SweepAxis::MeanPhotons => {
                    if self.base.family == StateFamily::Tss {
                        return Err(Error::Domain(
                            "mean-photon axis requires twb or tmc".into(),
                        ));
                    }
                    if a.range.min < 0.0 {
                        return Err(Error::Domain("mean photon number cannot be negative".into()));
                    }
                }
                SweepAxis::GTauBoth | SweepAxis::GTauA | SweepAxis::GTauB => {
                    if a.range.min < 0.0 {
                        return Err(Error::Domain("g_tau cannot be negative".into()));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn resolved(&self, assignments: &[(SweepAxis, f64)]) -> PointInputs {
        let mut p = self.base;
        for &(axis, v) in assignments {
            match axis {
                SweepAxis::P00 => p.param = StateParam::P00(v),
                SweepAxis::MeanPhotons => p.param = StateParam::MeanPhotons(v),
                SweepAxis::GTauBoth => {
                    p.arm_a.g_tau = v;
                    p.arm_b.g_tau = v;
                }
                SweepAxis::GTauA => p.arm_a.g_tau = v,
                SweepAxis::GTauB => p.arm_b.g_tau = v,
                SweepAxis::DetuningBoth => {
                    p.arm_a.delta_tau = v;
                    p.arm_b.delta_tau = v;
                }
                SweepAxis::DetuningA => p.arm_a.delta_tau = v,
                SweepAxis::DetuningB => p.arm_b.delta_tau = v,
            }
        }
        p
    }
}

/// One evaluated scenario point.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub family: StateFamily,
    /// P00 for TSS, |x| for TWB/TMC.
    pub p00_or_x: f64,
    pub mean_n: f64,
    pub g_tau_a: f64,
    pub g_tau_b: f64,
    pub delta_tau_a: f64,
    pub delta_tau_b: f64,
    pub a1: C64,
    pub a2: C64,
    pub b1: C64,
    pub b2: C64,
    pub eof: f64,
    pub concurrence: f64,
    pub lambda4_pt: f64,
    pub x_form: bool,
    pub n_max: usize,
    pub trace_err: f64,
    pub error: Option<String>,
}

fn spec_from_param(
    family: StateFamily,
    param: StateParam,
    trunc: Truncation,
) -> Result<CvStateSpec> {
    match (family, param) {
        (StateFamily::Tss, StateParam::P00(p)) => CvStateSpec::tss_from_p00(p, trunc),
        (_, StateParam::MeanPhotons(n)) => CvStateSpec::from_mean(family, n, trunc),
        (StateFamily::Twb, StateParam::XMag(x)) => CvStateSpec::twb(C64::new(x, 0.0), trunc),
        (StateFamily::Tmc, StateParam::XMag(x)) => CvStateSpec::tmc(C64::new(x, 0.0), trunc),
        (f, p) => Err(Error::Domain(format!(
            "state parameter {p:?} does not apply to family {f}"
        ))),
    }
}

/// Evaluate one point. Never panics: any failure lands in the record's
/// `error` field so a surrounding sweep always completes.
pub fn run_point(inputs: &PointInputs) -> SweepRecord {
    let mut rec = SweepRecord {
        family: inputs.family,
        p00_or_x: f64::NAN,
        mean_n: f64::NAN,
        g_tau_a: inputs.arm_a.g_tau,
        g_tau_b: inputs.arm_b.g_tau,
        delta_tau_a: inputs.arm_a.delta_tau,
        delta_tau_b: inputs.arm_b.delta_tau,
        a1: inputs.prep_a.ground_amp(),
        a2: inputs.prep_a.excited_amp(),
        b1: inputs.prep_b.ground_amp(),
        b2: inputs.prep_b.excited_amp(),
        eof: f64::NAN,
        concurrence: f64::NAN,
        lambda4_pt: f64::NAN,
        x_form: false,
        n_max: 0,
        trace_err: f64::NAN,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let spec = spec_from_param(inputs.family, inputs.param, inputs.trunc)?;
        rec.p00_or_x = spec.report_param();
        rec.mean_n = spec.mean_photons();
        let coeffs = spec.coefficients()?;
        rec.n_max = coeffs.nmax();
        let joint = evolve_joint(
            &coeffs,
            &inputs.prep_a,
            &inputs.prep_b,
            &inputs.arm_a,
            &inputs.arm_b,
        );
        let rho = reduce_to_qubits(&joint)?;
        rec.trace_err = rho.trace_error();
        let r = report(&rho)?;
        rec.eof = r.eof;
        rec.concurrence = r.concurrence;
        rec.lambda4_pt = r.lambda4;
        rec.x_form = r.x_form;
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
    }
    rec
}

/// Row-major grid evaluation over the scenario axes (first axis outermost).
pub fn sweep(scenario: &Scenario) -> Result<Vec<SweepRecord>> {
    scenario.validate()?;
    let points: Vec<PointInputs> = match scenario.axes.len() {
        0 => vec![scenario.base],
        1 => {
            let a = &scenario.axes[0];
            a.range
                .values()
                .iter()
                .map(|&v| scenario.resolved(&[(a.axis, v)]))
                .collect()
        }
        _ => {
            let (a, b) = (&scenario.axes[0], &scenario.axes[1]);
            let bv = b.range.values();
            a.range
                .values()
                .iter()
                .flat_map(|&va| {
                    let scenario = &scenario;
                    bv.iter()
                        .map(move |&vb| scenario.resolved(&[(a.axis, va), (b.axis, vb)]))
                })
                .collect()
        }
    };
    Ok(points.into_par_iter().map(|p| run_point(&p)).collect())
}

/// One refined entanglement maximum of a 2-D map.
#[derive(Clone, Copy, Debug)]
pub struct PeakRow {
    pub g_tau: f64,
    /// Mean photon number (or P00 for TSS maps) at the peak.
    pub param: f64,
    pub eof: f64,
    /// Photon distribution of the CV state at the peak.
    pub p00: f64,
    pub p11: f64,
}

/// Golden-section maximization on [center-half, center+half] clamped to
/// bounds. Tracks the best point actually evaluated (seeded with the start),
/// so the result never falls below the starting value.
fn golden_max(
    f: &dyn Fn(f64) -> f64,
    center: f64,
    half: f64,
    bounds: (f64, f64),
    tol: f64,
    seed: (f64, f64),
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = (center - half).max(bounds.0);
    let mut b = (center + half).min(bounds.1);
    let (mut best_x, mut best_f) = seed;
    let mut track = |x: f64, fx: f64| {
        if fx > best_f {
            best_f = fx;
            best_x = x;
        }
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    track(x1, f1);
    track(x2, f2);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            track(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            track(x2, f2);
        }
    }
    (best_x, best_f)
}

/// Locate grid-local maxima of a 2-D sweep and polish each by coordinate
/// descent with golden-section line searches (three rounds, 1e-3 resolution
/// per coordinate). Returns up to `top_k` rows sorted by g_tau.
pub fn refine_peaks(
    table: &[SweepRecord],
    scenario: &Scenario,
    top_k: usize,
) -> Result<Vec<PeakRow>> {
    scenario.validate()?;
    if scenario.axes.len() != 2 {
        return Err(Error::Domain(
            "peak refinement needs a 2-D sweep table".into(),
        ));
    }
    let is_cv = |a: SweepAxis| matches!(a, SweepAxis::P00 | SweepAxis::MeanPhotons);
    let is_gt = |a: SweepAxis| {
        matches!(
            a,
            SweepAxis::GTauBoth | SweepAxis::GTauA | SweepAxis::GTauB
        )
    };
    let (gt_idx, cv_idx) = if is_gt(scenario.axes[0].axis) && is_cv(scenario.axes[1].axis) {
        (0, 1)
    } else if is_cv(scenario.axes[0].axis) && is_gt(scenario.axes[1].axis) {
        (1, 0)
    } else {
        return Err(Error::Domain(
            "peak refinement needs one g_tau axis and one CV-state axis".into(),
        ));
    };
    let (n0, n1) = (scenario.axes[0].range.steps, scenario.axes[1].range.steps);
    if table.len() != n0 * n1 {
        return Err(Error::Contract(format!(
            "table has {} records, grid is {n0} x {n1}",
            table.len()
        )));
    }
    let v0 = scenario.axes[0].range.values();
    let v1 = scenario.axes[1].range.values();
    let eof_at = |i: usize, j: usize| {
        let r = &table[i * n1 + j];
        if r.error.is_some() || r.eof.is_nan() {
            f64::NEG_INFINITY
        } else {
            r.eof
        }
    };

    // grid-local maxima above a noise floor
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n0 {
        for j in 0..n1 {
            let v = eof_at(i, j);
            if v <= 1e-9 {
                continue;
            }
            let up = i == 0 || v >= eof_at(i - 1, j);
            let down = i + 1 == n0 || v >= eof_at(i + 1, j);
            let left = j == 0 || v >= eof_at(i, j - 1);
            let right = j + 1 == n1 || v >= eof_at(i, j + 1);
            if up && down && left && right {
                candidates.push((v, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let coord = |i: usize, j: usize| {
        let (a0, a1) = (v0[i], v1[j]);
        if gt_idx == 0 {
            (a0, a1)
        } else {
            (a1, a0)
        }
    };
    let mut kept: Vec<(f64, f64, f64)> = Vec::new(); // (eof, gt, cv)
    for &(v, i, j) in &candidates {
        let (gt, cv) = coord(i, j);
        if kept
            .iter()
            .all(|&(_, g2, c2)| (gt - g2).abs() > 0.5 || (cv - c2).abs() > 0.5)
        {
            kept.push((v, gt, cv));
        }
        if kept.len() == top_k {
            break;
        }
    }

    let gt_range = scenario.axes[gt_idx].range;
    let cv_range = scenario.axes[cv_idx].range;
    let eval = |gt: f64, cv: f64| -> f64 {
        let mut assigns = [(scenario.axes[0].axis, 0.0), (scenario.axes[1].axis, 0.0)];
        assigns[gt_idx].1 = gt;
        assigns[cv_idx].1 = cv;
        let rec = run_point(&scenario.resolved(&assigns));
        if rec.error.is_some() || rec.eof.is_nan() {
            f64::NEG_INFINITY
        } else {
            rec.eof
        }
    };

    let mut rows = Vec::new();
    for &(v0, gt0, cv0) in &kept {
        let (mut gt, mut cv, mut best) = (gt0, cv0, v0);
        for _ in 0..3 {
            let (g_new, f_new) = golden_max(
                &|x| eval(x, cv),
                gt,
                2.0 * gt_range.spacing(),
                (gt_range.min, gt_range.max),
                1e-3,
                (gt, best),
            );
            gt = g_new;
            best = f_new;
            let (c_new, f_new) = golden_max(
                &|x| eval(gt, x),
                cv,
                2.0 * cv_range.spacing(),
                (cv_range.min, cv_range.max),
                1e-3,
                (cv, best),
            );
            cv = c_new;
            best = f_new;
        }
        let cv_axis = scenario.axes[cv_idx].axis;
        let param = match cv_axis {
            SweepAxis::P00 => StateParam::P00(cv),
            _ => StateParam::MeanPhotons(cv),
        };
        let spec = spec_from_param(scenario.base.family, param, scenario.base.trunc)?;
        let dist = photon_distribution(&spec.coefficients()?);
        rows.push(PeakRow {
            g_tau: gt,
            param: cv,
            eof: best,
            p00: dist.first().copied().unwrap_or(0.0),
            p11: dist.get(1).copied().unwrap_or(0.0),
        });
    }
    rows.sort_by(|a, b| a.g_tau.partial_cmp(&b.g_tau).unwrap());
    Ok(rows)
}

/// Detuning placement for the off-resonance scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetuningMode {
    /// Arm A stays resonant; only arm B is detuned.
    BOnly,
    /// Both arms carry the same detuning.
    BothEqual,
}

fn mean_n_scan_base(family: StateFamily, trunc: Truncation) -> Result<PointInputs> {
    if family == StateFamily::Tss {
        return Err(Error::Domain(
            "mean-photon scans are defined for twb and tmc".into(),
        ));
    }
    Ok(PointInputs {
        family,
        param: StateParam::MeanPhotons(0.0),
        prep_a: QubitPrep::ground(),
        prep_b: QubitPrep::ground(),
        arm_a: ArmParams::resonant(0.0)?,
        arm_b: ArmParams::resonant(0.0)?,
        trunc,
    })
}

/// One eof(<N>) curve per detuning value, both atoms ground, equal g tau.
pub fn detuning_scan(
    family: StateFamily,
    g_tau: f64,
    mode: DetuningMode,
    delta_taus: &[f64],
    n_axis: GridRange,
    trunc: Truncation,
) -> Result<Vec<SweepRecord>> {
    let mut base = mean_n_scan_base(family, trunc)?;
    base.arm_a = ArmParams::resonant(g_tau)?;
    base.arm_b = ArmParams::resonant(g_tau)?;
    let mut out = Vec::with_capacity(delta_taus.len() * n_axis.steps);
    for &dt in delta_taus {
        let mut b = base;
        match mode {
            DetuningMode::BOnly => b.arm_b.delta_tau = dt,
            DetuningMode::BothEqual => {
                b.arm_a.delta_tau = dt;
                b.arm_b.delta_tau = dt;
            }
        }
        let scenario = Scenario {
            base: b,
            axes: vec![AxisSpec {
                axis: SweepAxis::MeanPhotons,
                range: n_axis,
            }],
        };
        out.extend(sweep(&scenario)?);
    }
    Ok(out)
}

/// One eof(<N>) curve per g_tau_B value at resonance, both atoms ground.
pub fn mismatch_scan(
    family: StateFamily,
    g_tau_a: f64,
    g_tau_bs: &[f64],
    n_axis: GridRange,
    trunc: Truncation,
) -> Result<Vec<SweepRecord>> {
    let mut base = mean_n_scan_base(family, trunc)?;
    base.arm_a = ArmParams::resonant(g_tau_a)?;
    let mut out = Vec::with_capacity(g_tau_bs.len() * n_axis.steps);
    for &gb in g_tau_bs {
        let mut b = base;
        b.arm_b = ArmParams::resonant(gb)?;
        let scenario = Scenario {
            base: b,
            axes: vec![AxisSpec {
                axis: SweepAxis::MeanPhotons,
                range: n_axis,
            }],
        };
        out.extend(sweep(&scenario)?);
    }
    Ok(out)
}

/// Delayed injection of atom A: atom B is already in a superposition with
/// ground weight |B1|^2 while the field is still in its initial state; one
/// eof(<N>) curve per |B1|^2 value.
pub fn delayed_injection_scan(
    family: StateFamily,
    g_tau: f64,
    b1_weights: &[f64],
    n_axis: GridRange,
    trunc: Truncation,
) -> Result<Vec<SweepRecord>> {
    let mut base = mean_n_scan_base(family, trunc)?;
    base.arm_a = ArmParams::resonant(g_tau)?;
    base.arm_b = ArmParams::resonant(g_tau)?;
    let mut out = Vec::with_capacity(b1_weights.len() * n_axis.steps);
    for &w in b1_weights {
        let mut b = base;
        b.prep_b = QubitPrep::from_ground_weight(w)?;
        let scenario = Scenario {
            base: b,
            axes: vec![AxisSpec {
                axis: SweepAxis::MeanPhotons,
                range: n_axis,
            }],
        };
        out.extend(sweep(&scenario)?);
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "family,P00_or_x,mean_N,g_tau_A,g_tau_B,delta_tau_A,delta_tau_B,\
A1,A2,B1,B2,eof,concurrence,lambda4_pt,x_form,n_max,trace_err,error";

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        // 17 significant digits round-trips f64 exactly
        format!("{v:.16e}")
    }
}

fn fmt_amp(v: C64) -> String {
    if v.im == 0.0 {
        fmt_float(v.re)
    } else {
        let sign = if v.im >= 0.0 { '+' } else { '-' };
        format!("{}{}{}i", fmt_float(v.re), sign, fmt_float(v.im.abs()))
    }
}

/// Write records in the fixed CSV layout, header first. Deterministic for a
/// deterministic record list.
pub fn write_csv<W: Write + ?Sized>(records: &[SweepRecord], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let error = r
            .error
            .as_deref()
            .unwrap_or("")
            .replace([',', '\n'], ";");
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.family,
            fmt_float(r.p00_or_x),
            fmt_float(r.mean_n),
            fmt_float(r.g_tau_a),
            fmt_float(r.g_tau_b),
            fmt_float(r.delta_tau_a),
            fmt_float(r.delta_tau_b),
            fmt_amp(r.a1),
            fmt_amp(r.a2),
            fmt_amp(r.b1),
            fmt_amp(r.b2),
            fmt_float(r.eof),
            fmt_float(r.concurrence),
            fmt_float(r.lambda4_pt),
            r.x_form,
            r.n_max,
            fmt_float(r.trace_err),
            error
        )?;
    }
    Ok(())
}

/// CSV layout for refined peak tables.
pub const PEAKS_CSV_HEADER: &str = "g_tau_max,param_max,eof_max,P00,P11";

pub fn write_peaks_csv<W: Write + ?Sized>(rows: &[PeakRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{PEAKS_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_float(r.g_tau),
            fmt_float(r.param),
            fmt_float(r.eof),
            fmt_float(r.p00),
            fmt_float(r.p11)
        )?;
    }
    Ok(())
}
