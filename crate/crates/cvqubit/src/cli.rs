//! Command-line front end: state inspection, single-point evaluation,
//! resonance maps, peak tables, and the three scenario scans. All numeric
//! output is CSV except `state`, which prints a labeled key=value block.
//!
//! Exit codes: 0 on success, 2 on argument or physical-input errors
//! (no data rows are emitted in that case), 1 on runtime errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cv_states::{photon_distribution, von_neumann_entropy, CvStateSpec, StateFamily, Truncation};
use crate::experiments::{
    delayed_injection_scan, detuning_scan, mismatch_scan, refine_peaks, run_point, sweep,
    write_csv, write_peaks_csv, AxisSpec, DetuningMode, GridRange, PointInputs, Scenario,
    StateParam, SweepAxis, SweepRecord, DEFAULT_GTAU_AXIS, DEFAULT_N_AXIS, DEFAULT_P00_AXIS,
};
use crate::jc::{ArmParams, QubitPrep};
use crate::Error;

#[derive(Parser, Debug)]
#[command(
    name = "cvqubit",
    version,
    about = "Entanglement transfer from two-mode fields to qubit pairs via Jaynes-Cummings interactions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the photon distribution, mean photon number and entropy of a CV state
    State(StateArgs),
    /// Evaluate one scenario point and emit a single CSV record
    Point(PointArgs),
    /// Map entanglement of formation over (g tau, state parameter)
    Sweep(SweepArgs),
    /// Locate and refine the entanglement maxima of a resonance map
    Peaks(PeaksArgs),
    /// Off-resonance curves: one eof(mean N) trace per detuning value
    ScanDetuning(ScanDetuningArgs),
    /// Interaction-time mismatch curves at resonance
    ScanTimes(ScanTimesArgs),
    /// Delayed-injection curves: atom B pre-rotated into a superposition
    ScanDelayed(ScanDelayedArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Tss,
    Twb,
    Tmc,
}

impl From<FamilyArg> for StateFamily {
    fn from(f: FamilyArg) -> StateFamily {
        match f {
            FamilyArg::Tss => StateFamily::Tss,
            FamilyArg::Twb => StateFamily::Twb,
            FamilyArg::Tmc => StateFamily::Tmc,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum PrepSel {
    Ground,
    Excited,
    Super(f64),
}

fn parse_prep(s: &str) -> Result<PrepSel, String> {
    match s {
        "ground" => Ok(PrepSel::Ground),
        "excited" => Ok(PrepSel::Excited),
        other => {
            if let Some(rest) = other.strip_prefix("super:") {
                let w: f64 = rest
                    .parse()
                    .map_err(|_| format!("invalid ground weight `{rest}`"))?;
                Ok(PrepSel::Super(w))
            } else {
                Err(format!(
                    "expected `ground`, `excited` or `super:<b1_sq>`, got `{other}`"
                ))
            }
        }
    }
}

impl PrepSel {
    fn build(self) -> Result<QubitPrep, Error> {
        match self {
            PrepSel::Ground => Ok(QubitPrep::ground()),
            PrepSel::Excited => Ok(QubitPrep::excited()),
            PrepSel::Super(w) => QubitPrep::from_ground_weight(w),
        }
    }
}

/// State-parameter selector; exactly one of the three must be given.
#[derive(Args, Debug)]
struct ParamSel {
    /// Vacuum probability P00 (tss only)
    #[arg(long)]
    p00: Option<f64>,
    /// Mean total photon number (twb/tmc)
    #[arg(long)]
    mean_n: Option<f64>,
    /// State parameter |x| (twb/tmc)
    #[arg(long)]
    x: Option<f64>,
}

impl ParamSel {
    fn resolve(&self) -> Result<StateParam, CliError> {
        match (self.p00, self.mean_n, self.x) {
            (Some(p), None, None) => Ok(StateParam::P00(p)),
            (None, Some(n), None) => Ok(StateParam::MeanPhotons(n)),
            (None, None, Some(x)) => Ok(StateParam::XMag(x)),
            _ => Err(CliError::Usage(
                "exactly one of --p00, --mean-n, --x must be given".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct TruncArgs {
    /// Probability mass allowed beyond the Fock cutoff
    #[arg(long, default_value_t = 1e-12)]
    tail_eps: f64,
    /// Hard cap on retained Fock levels
    #[arg(long, default_value_t = 512)]
    max_n: usize,
}

impl TruncArgs {
    fn build(&self) -> Truncation {
        Truncation {
            tail_eps: self.tail_eps,
            max_n: self.max_n,
        }
    }
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write output to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[arg(long)]
    family: FamilyArg,
    #[command(flatten)]
    param: ParamSel,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    family: FamilyArg,
    #[command(flatten)]
    param: ParamSel,
    /// Atom A preparation: ground, excited, or super:<b1_sq>
    #[arg(long, value_parser = parse_prep)]
    prep_a: PrepSel,
    /// Atom B preparation: ground, excited, or super:<b1_sq>
    #[arg(long, value_parser = parse_prep)]
    prep_b: PrepSel,
    /// Dimensionless coupling-time g tau of arm A
    #[arg(long)]
    gtau_a: f64,
    /// Dimensionless coupling-time g tau of arm B
    #[arg(long)]
    gtau_b: f64,
    /// Dimensionless detuning-time of arm A
    #[arg(long, default_value_t = 0.0)]
    dtau_a: f64,
    /// Dimensionless detuning-time of arm B
    #[arg(long, default_value_t = 0.0)]
    dtau_b: f64,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct MapGridArgs {
    #[arg(long, default_value_t = DEFAULT_GTAU_AXIS.min)]
    gtau_min: f64,
    #[arg(long, default_value_t = DEFAULT_GTAU_AXIS.max)]
    gtau_max: f64,
    #[arg(long, default_value_t = DEFAULT_GTAU_AXIS.steps)]
    gtau_steps: usize,
    /// CV-axis lower bound (P00 for tss, mean N otherwise)
    #[arg(long)]
    cv_min: Option<f64>,
    /// CV-axis upper bound (P00 for tss, mean N otherwise)
    #[arg(long)]
    cv_max: Option<f64>,
    /// CV-axis step count
    #[arg(long)]
    cv_steps: Option<usize>,
}

impl MapGridArgs {
    fn build(&self, family: StateFamily) -> Result<(AxisSpec, AxisSpec), Error> {
        let gtau = AxisSpec {
            axis: SweepAxis::GTauBoth,
            range: GridRange::new(self.gtau_min, self.gtau_max, self.gtau_steps)?,
        };
        let default_cv = if family == StateFamily::Tss {
            DEFAULT_P00_AXIS
        } else {
            DEFAULT_N_AXIS
        };
        let cv = AxisSpec {
            axis: if family == StateFamily::Tss {
                SweepAxis::P00
            } else {
                SweepAxis::MeanPhotons
            },
            range: GridRange::new(
                self.cv_min.unwrap_or(default_cv.min),
                self.cv_max.unwrap_or(default_cv.max),
                self.cv_steps.unwrap_or(default_cv.steps),
            )?,
        };
        Ok((gtau, cv))
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    family: FamilyArg,
    #[arg(long, value_parser = parse_prep)]
    prep_a: PrepSel,
    #[arg(long, value_parser = parse_prep)]
    prep_b: PrepSel,
    /// Fixed detuning-time of arm A during the map
    #[arg(long, default_value_t = 0.0)]
    dtau_a: f64,
    /// Fixed detuning-time of arm B during the map
    #[arg(long, default_value_t = 0.0)]
    dtau_b: f64,
    #[command(flatten)]
    grid: MapGridArgs,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct PeaksArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Number of maxima to refine
    #[arg(long, default_value_t = 4)]
    top_k: usize,
}

#[derive(Args, Debug)]
struct NAxisArgs {
    #[arg(long, default_value_t = DEFAULT_N_AXIS.min)]
    n_min: f64,
    #[arg(long, default_value_t = DEFAULT_N_AXIS.max)]
    n_max: f64,
    #[arg(long, default_value_t = DEFAULT_N_AXIS.steps)]
    n_steps: usize,
}

impl NAxisArgs {
    fn build(&self) -> Result<GridRange, Error> {
        GridRange::new(self.n_min, self.n_max, self.n_steps)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    BOnly,
    BothEqual,
}

#[derive(Args, Debug)]
struct ScanDetuningArgs {
    #[arg(long)]
    family: FamilyArg,
    /// Common dimensionless coupling-time of both arms
    #[arg(long)]
    gtau: f64,
    /// Which arm carries the detuning
    #[arg(long, value_enum, default_value_t = ModeArg::BOnly)]
    mode: ModeArg,
    /// Detuning-time values, one curve each
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0])]
    dtau_values: Vec<f64>,
    #[command(flatten)]
    n_axis: NAxisArgs,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct ScanTimesArgs {
    #[arg(long)]
    family: FamilyArg,
    /// Dimensionless coupling-time of arm A
    #[arg(long)]
    gtau_a: f64,
    /// Arm-B coupling-time values, one curve each
    #[arg(long, value_delimiter = ',', required = true)]
    gtau_b_values: Vec<f64>,
    #[command(flatten)]
    n_axis: NAxisArgs,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct ScanDelayedArgs {
    #[arg(long)]
    family: FamilyArg,
    /// Common dimensionless coupling-time of both arms
    #[arg(long)]
    gtau: f64,
    /// Ground weights |B1|^2 of atom B, one curve each
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0])]
    b1_sq_values: Vec<f64>,
    #[command(flatten)]
    n_axis: NAxisArgs,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    out: OutArg,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::TruncationOverflow { .. } | Error::Bracket { .. } => {
                CliError::Usage(e.to_string())
            }
            Error::Io(_) | Error::Contract(_) | Error::NotPsd { .. } => {
                CliError::Runtime(e.to_string())
            }
        }
    }
}

/// Entry point wired to the process streams.
pub fn run() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    dispatch(std::env::args_os(), &mut out, &mut err)
}

/// Parse and execute an argument vector against explicit output streams.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn with_output<F>(dest: &OutArg, out: &mut dyn Write, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match &dest.out {
        None => body(out),
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            body(&mut w)?;
            w.flush()
                .map_err(|e| CliError::Runtime(format!("write failed: {e}")))?;
            Ok(())
        }
    }
}

fn build_spec(
    family: StateFamily,
    param: StateParam,
    trunc: Truncation,
) -> Result<CvStateSpec, CliError> {
    use crate::numerics::C64;
    let spec = match (family, param) {
        (StateFamily::Tss, StateParam::P00(p)) => CvStateSpec::tss_from_p00(p, trunc),
        (_, StateParam::MeanPhotons(n)) => CvStateSpec::from_mean(family, n, trunc),
        (StateFamily::Twb, StateParam::XMag(x)) => CvStateSpec::twb(C64::new(x, 0.0), trunc),
        (StateFamily::Tmc, StateParam::XMag(x)) => CvStateSpec::tmc(C64::new(x, 0.0), trunc),
        (f, p) => Err(Error::Domain(format!(
            "state parameter {p:?} does not apply to family {f}"
        ))),
    }?;
    Ok(spec)
}

fn emit_csv(records: &[SweepRecord], w: &mut dyn Write) -> Result<(), CliError> {
    write_csv(records, w).map_err(|e| CliError::Runtime(format!("write failed: {e}")))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::State(args) => {
            let family: StateFamily = args.family.into();
            let spec = build_spec(family, args.param.resolve()?, args.trunc.build())?;
            let coeffs = spec.coefficients().map_err(CliError::from)?;
            let dist = photon_distribution(&coeffs);
            with_output(&args.out, out, |w| {
                writeln!(w, "family={family}").map_err(io_err)?;
                match family {
                    StateFamily::Tss => writeln!(w, "p00={}", spec.report_param()).map_err(io_err)?,
                    _ => writeln!(w, "x={}", spec.report_param()).map_err(io_err)?,
                }
                writeln!(w, "mean_n={}", spec.mean_photons()).map_err(io_err)?;
                writeln!(w, "s_vn={}", von_neumann_entropy(&coeffs)).map_err(io_err)?;
                writeln!(w, "n_max={}", coeffs.nmax()).map_err(io_err)?;
                writeln!(w, "tail_bound={:e}", coeffs.tail_bound().max(0.0)).map_err(io_err)?;
                for (n, p) in dist.iter().enumerate() {
                    writeln!(w, "P_{n}={p}").map_err(io_err)?;
                }
                Ok(())
            })
        }
        Command::Point(args) => {
            let family: StateFamily = args.family.into();
            let param = args.param.resolve()?;
            // Validate the physical inputs up front so no partial CSV can appear.
            let spec = build_spec(family, param, args.trunc.build())?;
            spec.coefficients().map_err(CliError::from)?;
            let inputs = PointInputs {
                family,
                param,
                prep_a: args.prep_a.build().map_err(CliError::from)?,
                prep_b: args.prep_b.build().map_err(CliError::from)?,
                arm_a: ArmParams::new(args.gtau_a, args.dtau_a).map_err(CliError::from)?,
                arm_b: ArmParams::new(args.gtau_b, args.dtau_b).map_err(CliError::from)?,
                trunc: args.trunc.build(),
            };
            let rec = run_point(&inputs);
            if let Some(e) = &rec.error {
                return Err(CliError::Runtime(e.clone()));
            }
            with_output(&args.out, out, |w| emit_csv(std::slice::from_ref(&rec), w))
        }
        Command::Sweep(args) => {
            let (scenario, _) = map_scenario(&args)?;
            let table = sweep(&scenario).map_err(CliError::from)?;
            with_output(&args.out, out, |w| emit_csv(&table, w))
        }
        Command::Peaks(args) => {
            let (scenario, _) = map_scenario(&args.sweep)?;
            let table = sweep(&scenario).map_err(CliError::from)?;
            let rows = refine_peaks(&table, &scenario, args.top_k).map_err(CliError::from)?;
            with_output(&args.sweep.out, out, |w| {
                write_peaks_csv(&rows, w).map_err(|e| CliError::Runtime(format!("write failed: {e}")))
            })
        }
        Command::ScanDetuning(args) => {
            let mode = match args.mode {
                ModeArg::BOnly => DetuningMode::BOnly,
                ModeArg::BothEqual => DetuningMode::BothEqual,
            };
            let table = detuning_scan(
                args.family.into(),
                args.gtau,
                mode,
                &args.dtau_values,
                args.n_axis.build().map_err(CliError::from)?,
                args.trunc.build(),
            )
            .map_err(CliError::from)?;
            with_output(&args.out, out, |w| emit_csv(&table, w))
        }
        Command::ScanTimes(args) => {
            let table = mismatch_scan(
                args.family.into(),
                args.gtau_a,
                &args.gtau_b_values,
                args.n_axis.build().map_err(CliError::from)?,
                args.trunc.build(),
            )
            .map_err(CliError::from)?;
            with_output(&args.out, out, |w| emit_csv(&table, w))
        }
        Command::ScanDelayed(args) => {
            let table = delayed_injection_scan(
                args.family.into(),
                args.gtau,
                &args.b1_sq_values,
                args.n_axis.build().map_err(CliError::from)?,
                args.trunc.build(),
            )
            .map_err(CliError::from)?;
            with_output(&args.out, out, |w| emit_csv(&table, w))
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

fn map_scenario(args: &SweepArgs) -> Result<(Scenario, StateFamily), CliError> {
    let family: StateFamily = args.family.into();
    let (gtau_axis, cv_axis) = args.grid.build(family).map_err(CliError::from)?;
    let base_param = match family {
        StateFamily::Tss => StateParam::P00(0.5),
        _ => StateParam::MeanPhotons(cv_axis.range.min.max(0.0)),
    };
    let scenario = Scenario {
        base: PointInputs {
            family,
            param: base_param,
            prep_a: args.prep_a.build().map_err(CliError::from)?,
            prep_b: args.prep_b.build().map_err(CliError::from)?,
            arm_a: ArmParams::new(0.0, args.dtau_a).map_err(CliError::from)?,
            arm_b: ArmParams::new(0.0, args.dtau_b).map_err(CliError::from)?,
            trunc: args.trunc.build(),
        },
        axes: vec![gtau_axis, cv_axis],
    };
    scenario.validate().map_err(CliError::from)?;
    Ok((scenario, family))
}
