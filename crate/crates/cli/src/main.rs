//! `wva`: weak-value amplification in an imbalanced Mach-Zehnder
//! interferometer, from the command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain error (invalid parameter
//! values), 4 numerical or statistical failure.

mod figures;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{emit, Fields};
use wva_core::montecarlo::{
    default_eta, estimate_shift, EstimatorKind, ShiftEstimate,
};
use wva_core::quantum::{
    arm2_weak_value_fock, is_anomalous, outside_first_order, quantum_shift, weak_value_coherent,
    weak_value_fock, BsMode, CoherentAmplitude, InterferometerParams,
};
use wva_core::stochastic::{
    intensity_shift_quadrature, intensity_shift_two_arm, intensity_shift_vacuum, validity,
    NoisePrior, ValidityReport, VACUUM_SIGMA,
};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(wva_core::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<wva_core::Error> for CliError {
    fn from(e: wva_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_domain_error() => 3,
            CliError::Core(_) | CliError::Io(_) => 4,
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BsModeArg {
    /// t = (1+delta)/sqrt(2), r = (1-delta)/sqrt(2)
    FirstOrder,
    /// t - r = sqrt(2) delta with t^2 + r^2 = 1
    ExactUnitary,
}

impl From<BsModeArg> for BsMode {
    fn from(m: BsModeArg) -> Self {
        match m {
            BsModeArg::FirstOrder => BsMode::FirstOrder,
            BsModeArg::ExactUnitary => BsMode::ExactUnitary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputKind {
    /// Single-photon Fock state
    Fock,
    /// Weak coherent state
    Coherent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShiftMethod {
    /// Weak-value prediction 1/2 + 1/(2 delta)
    Quantum,
    /// Closed-form stochastic-optics shift (arm-2 fluctuations included)
    Exact,
    /// Small-ratio approximation 2 sigma^2 (1+delta)/delta
    Approx,
    /// Numerical integration of the unapproximated posterior
    Quadrature,
    /// Vacuum-width approximation (1 + 1/delta)/2
    Vacuum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Rejection,
    Weighted,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Rejection => EstimatorKind::Rejection,
            EstimatorArg::Weighted => EstimatorKind::Weighted,
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decimal digits in text/CSV numeric fields
    #[arg(long, default_value_t = 9)]
    precision: usize,
}

#[derive(Debug, Parser)]
#[command(
    name = "wva",
    version,
    about = "Weak-value amplification in an imbalanced Mach-Zehnder interferometer:\n\
             quantum weak values, a stochastic-optics field model, Monte Carlo runs,\n\
             and figure datasets",
    after_help = "Exit codes: 0 success, 2 usage, 3 domain error, 4 numerical/statistics failure."
)]
struct Cli {
    /// Worker threads for Monte Carlo (overrides WVA_WORKERS; results are
    /// worker-count invariant)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Post-selected weak value of the arm-1 photon number
    WeakValue {
        #[arg(long, value_enum)]
        input: InputKind,
        /// Coherent amplitude (coherent input only)
        #[arg(long)]
        alpha: Option<f64>,
        /// Beamsplitter imbalance, in (0, 1]
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value = "first-order")]
        mode: BsModeArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Post-selected intensity shift D_I by the chosen method
    Shift {
        #[arg(long, value_enum)]
        method: ShiftMethod,
        #[arg(long)]
        delta: f64,
        /// Input field amplitude E0 (= alpha); required for exact/quadrature
        #[arg(long)]
        e0: Option<f64>,
        /// Arm-1 fluctuation width (vacuum value 0.5)
        #[arg(long, default_value_t = VACUUM_SIGMA)]
        sigma: f64,
        /// Arm-2 fluctuation width
        #[arg(long, default_value_t = 0.0)]
        sigma2: f64,
        #[arg(long = "bs", value_enum, default_value = "first-order")]
        bs_mode: BsModeArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of the intensity shift
    Mc {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        e0: f64,
        #[arg(long, default_value_t = VACUUM_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma2: f64,
        /// Detector efficiency (default keeps the click rate <= 25% and the
        /// saturation clamp inactive)
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "weighted")]
        estimator: EstimatorArg,
        #[arg(long = "bs", value_enum, default_value = "first-order")]
        bs_mode: BsModeArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate a comparison-figure dataset
    Figures {
        #[arg(long, value_enum)]
        which: figures::Which,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a scenario from a key-value config file
    Scenario {
        /// TOML scenario spec (see README for the schema)
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn require_scalar_format(format: Format) -> Result<(), CliError> {
    if format == Format::Svg {
        return Err(CliError::Usage(
            "svg output is only available for curve/density commands (figures)".to_string(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct WeakValueReport {
    input: &'static str,
    alpha: Option<f64>,
    delta: f64,
    bs_mode: BsMode,
    t: f64,
    r: f64,
    weak_value: f64,
    arm2_weak_value: f64,
    anomalous: bool,
    first_order_valid: bool,
}

fn cmd_weak_value(
    input: InputKind,
    alpha: Option<f64>,
    delta: f64,
    mode: BsModeArg,
    format: Format,
    out: &OutputArgs,
) -> CliResult {
    require_scalar_format(format)?;
    let bs_mode = BsMode::from(mode);
    // The closed-form weak values accept any delta > 0; (t, r) exist only
    // for delta in the beamsplitter's parameter range.
    let (t, r) = wva_core::quantum::bs_coefficients(delta, bs_mode).unwrap_or((f64::NAN, f64::NAN));
    let report = match input {
        InputKind::Fock => {
            if alpha.is_some() {
                return Err(CliError::Usage(
                    "--alpha applies to --input coherent only".to_string(),
                ));
            }
            let w = weak_value_fock(delta)?;
            WeakValueReport {
                input: "fock",
                alpha: None,
                delta,
                bs_mode,
                t,
                r,
                weak_value: w,
                arm2_weak_value: arm2_weak_value_fock(delta)?,
                anomalous: is_anomalous(CoherentAmplitude::new(0.0)?, delta),
                first_order_valid: !outside_first_order(delta),
            }
        }
        InputKind::Coherent => {
            let alpha = alpha.ok_or_else(|| {
                CliError::Usage("--input coherent requires --alpha".to_string())
            })?;
            let a = CoherentAmplitude::new(alpha)?;
            let w = weak_value_coherent(a, delta)?;
            // Arm-2 value from the photon-addition sum rule
            // <n1>_w + <n2>_w = |alpha|^2 + 1.
            WeakValueReport {
                input: "coherent",
                alpha: Some(alpha),
                delta,
                bs_mode,
                t,
                r,
                weak_value: w,
                arm2_weak_value: a.photons() + 1.0 - w,
                anomalous: is_anomalous(a, delta),
                first_order_valid: !outside_first_order(delta),
            }
        }
    };

    let mut fields = Fields::new();
    fields.push("input", report.input.to_string());
    fields.opt_num("alpha", report.alpha, out.precision);
    fields.num("delta", report.delta, out.precision);
    fields.push("bs_mode", report.bs_mode.to_string());
    fields.num("t", report.t, out.precision);
    fields.num("r", report.r, out.precision);
    fields.num("weak_value", report.weak_value, out.precision);
    fields.num("arm2_weak_value", report.arm2_weak_value, out.precision);
    fields.push("anomalous", report.anomalous.to_string());
    fields.push("first_order_valid", report.first_order_valid.to_string());
    render_scalar(format, &fields, &report, out)
}

#[derive(Serialize)]
struct ShiftReport {
    method: String,
    delta: f64,
    e0: Option<f64>,
    sigma: f64,
    sigma2: f64,
    bs_mode: BsMode,
    value: f64,
    validity: Option<ValidityReport>,
    first_order_valid: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_shift(
    method: ShiftMethod,
    delta: f64,
    e0: Option<f64>,
    sigma: f64,
    sigma2: f64,
    bs_mode: BsModeArg,
    format: Format,
    out: &OutputArgs,
) -> CliResult {
    require_scalar_format(format)?;
    let bs_mode = BsMode::from(bs_mode);
    let need_prior = matches!(method, ShiftMethod::Exact | ShiftMethod::Quadrature);
    let prior = match e0 {
        Some(e0) => Some(NoisePrior::new(e0, sigma)?.with_sigma2(sigma2)?),
        None if need_prior => {
            return Err(CliError::Usage(format!(
                "--method {} requires --e0",
                method_name(method)
            )))
        }
        None => None,
    };
    let params = InterferometerParams::new(delta, bs_mode)?;
    let value = match method {
        ShiftMethod::Quantum => quantum_shift(delta)?,
        ShiftMethod::Vacuum => intensity_shift_vacuum(delta)?,
        ShiftMethod::Approx => 2.0 * sigma * sigma * (1.0 + delta) / delta,
        ShiftMethod::Exact => intensity_shift_two_arm(&params, prior.as_ref().unwrap())?,
        ShiftMethod::Quadrature => {
            intensity_shift_quadrature(&params, prior.as_ref().unwrap())?
        }
    };
    let report = ShiftReport {
        method: method_name(method).to_string(),
        delta,
        e0,
        sigma,
        sigma2,
        bs_mode,
        value,
        validity: prior.as_ref().map(|p| validity(&params, p)),
        first_order_valid: !outside_first_order(delta),
    };
    let mut fields = Fields::new();
    fields.push("method", report.method.clone());
    fields.num("delta", delta, out.precision);
    fields.opt_num("e0", e0, out.precision);
    fields.num("sigma", sigma, out.precision);
    fields.num("sigma2", sigma2, out.precision);
    fields.push("bs_mode", bs_mode.to_string());
    fields.num("shift", value, out.precision);
    fields.opt_num("validity_ratio", report.validity.map(|v| v.ratio), out.precision);
    fields.push(
        "regime",
        report
            .validity
            .map(|v| v.regime.to_string())
            .unwrap_or_default(),
    );
    fields.push("first_order_valid", report.first_order_valid.to_string());
    render_scalar(format, &fields, &report, out)
}

fn method_name(m: ShiftMethod) -> &'static str {
    match m {
        ShiftMethod::Quantum => "quantum",
        ShiftMethod::Exact => "exact",
        ShiftMethod::Approx => "approx",
        ShiftMethod::Quadrature => "quadrature",
        ShiftMethod::Vacuum => "vacuum",
    }
}

#[derive(Serialize)]
struct McReport {
    delta: f64,
    e0: f64,
    sigma: f64,
    sigma2: f64,
    bs_mode: BsMode,
    estimate: ShiftEstimate,
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    delta: f64,
    e0: f64,
    sigma: f64,
    sigma2: f64,
    eta: Option<f64>,
    trials: u64,
    seed: u64,
    estimator: EstimatorArg,
    bs_mode: BsModeArg,
    format: Format,
    out: &OutputArgs,
) -> CliResult {
    require_scalar_format(format)?;
    let bs_mode = BsMode::from(bs_mode);
    let prior = NoisePrior::new(e0, sigma)?.with_sigma2(sigma2)?;
    let base = InterferometerParams::new(delta, bs_mode)?;
    let eta = eta.unwrap_or_else(|| default_eta(&base, &prior));
    let params = base.with_eta(eta)?;
    let estimate = estimate_shift(estimator.into(), &params, &prior, trials, seed)?;
    let report = McReport {
        delta,
        e0,
        sigma,
        sigma2,
        bs_mode,
        estimate,
    };
    let mut fields = Fields::new();
    fields.num("delta", delta, out.precision);
    fields.num("e0", e0, out.precision);
    fields.num("sigma", sigma, out.precision);
    fields.num("sigma2", sigma2, out.precision);
    fields.push("bs_mode", bs_mode.to_string());
    fields.push("estimator", estimate.method.to_string());
    fields.num("eta", estimate.eta, out.precision);
    fields.push("n_trials", estimate.n_trials.to_string());
    fields.push("n_accepted", estimate.n_accepted.to_string());
    fields.push("seed", estimate.seed.to_string());
    fields.num("shift", estimate.value, out.precision);
    fields.num("stderr", estimate.stderr, out.precision);
    fields.push("degenerate_stderr", estimate.degenerate_stderr.to_string());
    render_scalar(format, &fields, &report, out)
}

fn render_scalar<T: Serialize>(
    format: Format,
    fields: &Fields,
    report: &T,
    out: &OutputArgs,
) -> CliResult {
    let content = match format {
        Format::Text => fields.to_text(),
        Format::Csv => fields.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Svg => unreachable!("rejected by require_scalar_format"),
    };
    emit(out.out.as_deref(), &content)?;
    Ok(())
}

fn resolve_workers(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("WVA_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn run(cli: Cli) -> CliResult {
    if let Some(workers) = resolve_workers(cli.workers) {
        if workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {workers} workers: {e}")))?;
    }
    match cli.command {
        Command::WeakValue {
            input,
            alpha,
            delta,
            mode,
            format,
            output,
        } => cmd_weak_value(input, alpha, delta, mode, format, &output),
        Command::Shift {
            method,
            delta,
            e0,
            sigma,
            sigma2,
            bs_mode,
            format,
            output,
        } => cmd_shift(method, delta, e0, sigma, sigma2, bs_mode, format, &output),
        Command::Mc {
            delta,
            e0,
            sigma,
            sigma2,
            eta,
            trials,
            seed,
            estimator,
            bs_mode,
            format,
            output,
        } => cmd_mc(
            delta, e0, sigma, sigma2, eta, trials, seed, estimator, bs_mode, format, &output,
        ),
        Command::Figures {
            which,
            format,
            output,
        } => figures::run(which, format, &output),
        Command::Scenario {
            config,
            format,
            output,
        } => figures::run_config(&config, format, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
