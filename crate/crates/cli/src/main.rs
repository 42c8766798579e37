use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcorr_cli::format::sig12;
use qcorr_cli::io::{channel_to_json, read_channel, read_state, state_to_json, StateFile};
use qcorr_cli::{CliError, EXIT_NOT_CONVERGED};
use qcorr_core::channels::{amplitude_damping, commutativity_probe, max_qcp_channel, phase_damping, KrausChannel, ProbeOutcome};
use qcorr_core::correlations::minimize_over_measurements;
use qcorr_core::qcp::{qcp_ad_deficit, qcp_ad_discord, qcp_numeric};
use qcorr_core::states::{cc_state, rank2_qc_state};
use qcorr_core::superact::build_scenario;
use qcorr_core::{binary_h, CCInput, DensityMatrix, InnerOptions, Measure, ProjectiveBasis, Rank2QCParams, C64};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Quantum discord, one-way deficit and quantum-correlating power")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum-correlating power of a single-qubit channel.
    Qcp(QcpArgs),
    /// QCP of a channel family over a parameter grid, as CSV.
    Sweep(SweepArgs),
    /// Two-copy phase-damping scenario, as a JSON report.
    Superact(SuperactArgs),
    /// Discord and/or deficit of a two-qubit state file.
    Measure(MeasureArgs),
    /// Write a built-in channel as JSON.
    ExportChannel(ExportChannelArgs),
    /// Write a built-in state as JSON.
    ExportState(ExportStateArgs),
    /// Completeness, unitality and commutativity probe for a channel.
    CheckChannel(CheckChannelArgs),
}

#[derive(Args)]
struct QcpArgs {
    /// ad, pd, maxqcp or file:<path>
    #[arg(long)]
    channel: String,
    /// Channel parameter in [0, 1] (ad and pd only).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = MeasureArg::Discord)]
    measure: MeasureArg,
    #[arg(long, value_enum, default_value_t = Method::Numeric)]
    method: Method,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = Family::Ad)]
    channel: Family,
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    #[arg(long, default_value_t = 1.0)]
    end: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Selection::Both)]
    measure: Selection,
    /// `both` writes the numeric values and reports the largest gap on stderr.
    #[arg(long, value_enum, default_value_t = Method::Analytic)]
    method: Method,
    /// Append the deficit-optimal measurement angle (ad only).
    #[arg(long)]
    chi: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuperactArgs {
    #[arg(long)]
    p: f64,
    /// Measurement samples for the deficit bound; 0 skips it.
    #[arg(long, default_value_t = 8)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    /// file:<path> or a plain path
    #[arg(long)]
    state: String,
    #[arg(long, value_enum, default_value_t = Selection::Both)]
    measure: Selection,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportChannelArgs {
    /// ad, pd or maxqcp
    #[arg(long)]
    channel: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportStateArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Rank-2 parameter t in [-1, 1].
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    /// Measurement azimuth (cc) or rank-2 angle.
    #[arg(long, default_value_t = FRAC_PI_4)]
    phi: f64,
    /// Weight of the first branch (cc).
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Polar angle of the basis (cc).
    #[arg(long, default_value_t = 0.0)]
    chi: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckChannelArgs {
    /// ad, pd, maxqcp or file:<path>
    #[arg(long)]
    channel: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Discord,
    Deficit,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Discord => Measure::Discord,
            MeasureArg::Deficit => Measure::Deficit,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Selection {
    Discord,
    Deficit,
    Both,
}

impl Selection {
    fn measures(self) -> Vec<Measure> {
        match self {
            Selection::Discord => vec![Measure::Discord],
            Selection::Deficit => vec![Measure::Deficit],
            Selection::Both => Measure::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Numeric,
    Analytic,
    Both,
}

impl Method {
    fn numeric(self) -> bool {
        self != Method::Analytic
    }

    fn analytic(self) -> bool {
        self != Method::Numeric
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Family {
    Ad,
    Pd,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Bell,
    Cc,
    Rank2,
}

enum ChannelSpec {
    Ad(f64),
    Pd(f64),
    MaxQcp,
    File(PathBuf),
}

impl ChannelSpec {
    fn parse(spec: &str, p: Option<f64>) -> Result<Self, CliError> {
        let need_p = || {
            let p = p.ok_or_else(|| CliError::usage(format!("--p is required for channel {spec}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::usage(format!("p = {p} is outside its domain [0, 1]")));
            }
            Ok(p)
        };
        match spec {
            "ad" => Ok(Self::Ad(need_p()?)),
            "pd" => Ok(Self::Pd(need_p()?)),
            "maxqcp" => Ok(Self::MaxQcp),
            _ => match spec.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Self::File(PathBuf::from(path))),
                _ => Err(CliError::usage(format!(
                    "unknown channel '{spec}', expected ad, pd, maxqcp or file:<path>"
                ))),
            },
        }
    }

    fn build(&self) -> Result<KrausChannel, CliError> {
        Ok(match self {
            Self::Ad(p) => amplitude_damping(*p)?,
            Self::Pd(p) => phase_damping(*p)?,
            Self::MaxQcp => max_qcp_channel(),
            Self::File(path) => read_channel(path)?,
        })
    }

    fn label(&self) -> String {
        match self {
            Self::Ad(p) => format!("ad(p={p})"),
            Self::Pd(p) => format!("pd(p={p})"),
            Self::MaxQcp => "maxqcp".to_string(),
            Self::File(path) => format!("file:{}", path.display()),
        }
    }

    fn analytic(&self, measure: Measure) -> Result<f64, CliError> {
        match (self, measure) {
            (Self::Ad(p), Measure::Discord) => Ok(qcp_ad_discord(*p)?),
            (Self::Ad(p), Measure::Deficit) => Ok(qcp_ad_deficit(*p)?.value),
            // unital qubit channels cannot create correlations from classical inputs
            (Self::Pd(_), _) => Ok(0.0),
            (Self::MaxQcp, Measure::Discord) => Ok(2.0 * binary_h(FRAC_1_SQRT_2)? - 1.0),
            _ => Err(CliError::usage(format!(
                "no closed form for {} with {measure}; use --method numeric",
                self.label()
            ))),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Qcp(args) => cmd_qcp(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Superact(args) => cmd_superact(args),
        Command::Measure(args) => cmd_measure(args),
        Command::ExportChannel(args) => cmd_export_channel(args),
        Command::ExportState(args) => cmd_export_state(args),
        Command::CheckChannel(args) => cmd_check_channel(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code as u8)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct NumericReport {
    value: f64,
    q: f64,
    theta: f64,
    phi_a: f64,
    chi: f64,
    phi: f64,
    converged: bool,
}

#[derive(Serialize)]
struct QcpReport {
    channel: String,
    measure: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<NumericReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_diff: Option<f64>,
}

fn cmd_qcp(args: QcpArgs) -> Result<i32, CliError> {
    let spec = ChannelSpec::parse(&args.channel, args.p)?;
    let measure = Measure::from(args.measure);
    let analytic = if args.method.analytic() { Some(spec.analytic(measure)?) } else { None };
    let numeric = if args.method.numeric() {
        let r = qcp_numeric(&spec.build()?, measure)?;
        Some(NumericReport {
            value: r.value,
            q: r.q,
            theta: r.theta,
            phi_a: r.phi_a,
            chi: r.chi,
            phi: r.phi,
            converged: r.diagnostics.converged(),
        })
    } else {
        None
    };
    let abs_diff = match (&numeric, analytic) {
        (Some(n), Some(a)) => Some((n.value - a).abs()),
        _ => None,
    };
    let converged = numeric.as_ref().is_none_or(|n| n.converged);
    let report = QcpReport {
        channel: spec.label(),
        measure: measure.to_string(),
        numeric,
        analytic,
        abs_diff,
    };
    if args.json {
        emit(&pretty(&report), None)?;
    } else {
        let mut text = format!("channel: {}\nmeasure: {}\n", report.channel, report.measure);
        if let Some(n) = &report.numeric {
            text += &format!(
                "numeric: {}\ninput: q={} theta={} phi_a={}\nmeasurement: chi={} phi={}\n",
                sig12(n.value),
                sig12(n.q),
                sig12(n.theta),
                sig12(n.phi_a),
                sig12(n.chi),
                sig12(n.phi)
            );
        }
        if let Some(a) = report.analytic {
            text += &format!("analytic: {}\n", sig12(a));
        }
        if let Some(d) = report.abs_diff {
            text += &format!("abs_diff: {d:e}\n");
        }
        emit(&text, None)?;
    }
    if !converged {
        eprintln!("warning: optimizer did not converge");
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(0)
}

struct SweepRow {
    p: f64,
    values: Vec<f64>,
    chi: Option<f64>,
    gap: f64,
    converged: bool,
}

fn sweep_row(family: Family, p: f64, measures: &[Measure], method: Method, with_chi: bool) -> Result<SweepRow, CliError> {
    let spec = match family {
        Family::Ad => ChannelSpec::Ad(p),
        Family::Pd => ChannelSpec::Pd(p),
    };
    let mut row = SweepRow {
        p,
        values: Vec::with_capacity(measures.len()),
        chi: None,
        gap: 0.0,
        converged: true,
    };
    let channel = if method.numeric() { Some(spec.build()?) } else { None };
    for &m in measures {
        let analytic = if method.analytic() { Some(spec.analytic(m)?) } else { None };
        let value = match &channel {
            Some(ch) => {
                let r = qcp_numeric(ch, m)?;
                row.converged &= r.diagnostics.converged();
                if let Some(a) = analytic {
                    row.gap = row.gap.max((r.value - a).abs());
                }
                r.value
            }
            None => analytic.expect("analytic requested"),
        };
        row.values.push(value);
    }
    if with_chi {
        row.chi = Some(qcp_ad_deficit(p)?.chi);
    }
    Ok(row)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, CliError> {
    if args.steps < 2 {
        return Err(CliError::usage(format!("--steps must be at least 2, got {}", args.steps)));
    }
    for (name, v) in [("start", args.start), ("end", args.end)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::usage(format!("{name} = {v} is outside its domain [0, 1]")));
        }
    }
    if args.chi && args.channel != Family::Ad {
        return Err(CliError::usage("--chi is only defined for the ad channel"));
    }
    let measures = args.measure.measures();
    let last = args.steps - 1;
    let grid: Vec<f64> = (0..args.steps)
        .map(|i| {
            if i == last {
                args.end
            } else {
                args.start + (args.end - args.start) * i as f64 / last as f64
            }
        })
        .collect();
    let rows = grid
        .par_iter()
        .map(|&p| sweep_row(args.channel, p, &measures, args.method, args.chi))
        .collect::<Result<Vec<_>, _>>()?;

    let mut header = vec!["p"];
    for m in &measures {
        header.push(match m {
            Measure::Discord => "qcp_discord",
            Measure::Deficit => "qcp_deficit",
        });
    }
    if args.chi {
        header.push("chi");
    }
    let mut csv = header.join(",") + "\n";
    for row in &rows {
        let mut fields = vec![sig12(row.p)];
        fields.extend(row.values.iter().map(|&v| sig12(v)));
        fields.extend(row.chi.map(sig12));
        csv += &fields.join(",");
        csv.push('\n');
    }
    emit(&csv, args.out.as_deref())?;

    if args.method == Method::Both {
        let gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
        eprintln!("max |numeric - analytic| = {gap:e}");
    }
    if rows.iter().any(|r| !r.converged) {
        eprintln!("warning: optimizer did not converge on every grid point");
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(0)
}

#[derive(Serialize)]
struct CommutatorReport {
    norm: f64,
    predicted_norm: f64,
    sign: f64,
    residual: f64,
    matches: bool,
}

#[derive(Serialize)]
struct CheckReport {
    name: &'static str,
    residual: f64,
    holds: bool,
}

#[derive(Serialize)]
struct SuperactJson {
    p: f64,
    commutator: CommutatorReport,
    pairwise_checks: Vec<CheckReport>,
    deficit_bound: Option<f64>,
    samples: usize,
    seed: u64,
    all_checks_pass: bool,
    output_state: StateFile,
}

fn cmd_superact(args: SuperactArgs) -> Result<i32, CliError> {
    let mut report = build_scenario(args.p)?;
    if args.samples > 0 {
        report = report.with_deficit_bound(args.samples, args.seed)?;
    }
    let pass = report.commutator_match && report.pairwise_ok();
    let json = SuperactJson {
        p: report.p,
        commutator: CommutatorReport {
            norm: report.commutator_norm,
            predicted_norm: report.predicted_norm,
            sign: report.commutator_sign,
            residual: report.commutator_residual,
            matches: report.commutator_match,
        },
        pairwise_checks: report
            .pairwise_checks
            .iter()
            .map(|c| CheckReport {
                name: c.name,
                residual: c.residual,
                holds: c.holds,
            })
            .collect(),
        deficit_bound: report.deficit_upper_bound,
        samples: args.samples,
        seed: args.seed,
        all_checks_pass: pass,
        output_state: StateFile::from_state(&report.output_state),
    };
    emit(&pretty(&json), args.out.as_deref())?;
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct MeasureReport {
    measure: String,
    value: f64,
    chi: f64,
    phi: f64,
    converged: bool,
}

fn cmd_measure(args: MeasureArgs) -> Result<i32, CliError> {
    let path = args.state.strip_prefix("file:").unwrap_or(&args.state);
    let rho = read_state(Path::new(path))?;
    let inner = InnerOptions::default();
    let reports = args
        .measure
        .measures()
        .into_iter()
        .map(|m| {
            let r = minimize_over_measurements(&rho, m, &inner)?;
            Ok(MeasureReport {
                measure: m.to_string(),
                value: r.value,
                chi: r.chi,
                phi: r.phi,
                converged: r.diagnostics.converged,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if args.json {
        emit(&pretty(&reports), None)?;
    } else {
        let text: String = reports
            .iter()
            .map(|r| format!("{}: {}  chi={} phi={}\n", r.measure, sig12(r.value), sig12(r.chi), sig12(r.phi)))
            .collect();
        emit(&text, None)?;
    }
    if reports.iter().any(|r| !r.converged) {
        eprintln!("warning: optimizer did not converge");
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(0)
}

fn cmd_export_channel(args: ExportChannelArgs) -> Result<i32, CliError> {
    let spec = ChannelSpec::parse(&args.channel, args.p)?;
    if let ChannelSpec::File(_) = spec {
        return Err(CliError::usage("export-channel takes a built-in channel"));
    }
    let mut text = channel_to_json(&spec.build()?);
    text.push('\n');
    emit(&text, args.out.as_deref())?;
    Ok(0)
}

fn cmd_export_state(args: ExportStateArgs) -> Result<i32, CliError> {
    let rho = match args.kind {
        StateKind::Bell => {
            let s = C64::from(FRAC_1_SQRT_2);
            let z = C64::from(0.0);
            DensityMatrix::from_pure(&[s, z, z, s], vec![2, 2])?
        }
        StateKind::Cc => cc_state(&CCInput::new(vec![args.q, 1.0 - args.q], ProjectiveBasis::qubit(args.chi, args.phi))?),
        StateKind::Rank2 => rank2_qc_state(&Rank2QCParams::new(args.t, args.phi)?),
    };
    let mut text = state_to_json(&rho);
    text.push('\n');
    emit(&text, args.out.as_deref())?;
    Ok(0)
}

fn cmd_check_channel(args: CheckChannelArgs) -> Result<i32, CliError> {
    let spec = ChannelSpec::parse(&args.channel, args.p)?;
    let ch = spec.build()?;
    let mut text = format!(
        "channel: {}\ndim_in: {}\ndim_out: {}\nkraus_operators: {}\ncompleteness_deviation: {:e}\nunital: {}\n",
        spec.label(),
        ch.dim_in(),
        ch.dim_out(),
        ch.kraus().len(),
        ch.completeness_deviation(),
        ch.is_unital(1e-10)
    );
    if ch.dim_in() == ch.dim_out() {
        text += &match commutativity_probe(&ch, args.trials, args.seed)? {
            ProbeOutcome::Witness { trial, commutator_norm, .. } => {
                format!("commutativity: witness at trial {trial}, output commutator norm {commutator_norm:e}\n")
            }
            ProbeOutcome::Pass { trials } => format!("commutativity: no witness in {trials} trials\n"),
        };
    }
    emit(&text, None)?;
    Ok(0)
}
