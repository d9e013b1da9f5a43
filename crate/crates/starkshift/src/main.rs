//! Command-line interface: single-point phase evaluation, parameter sweeps,
//! figure-style data sets, pulse design, and time-series dumps.
//!
//! All inputs are dimensionless (Ω₀T, ΔT, ΓT); T is the unit of time.
//! Exit codes: 0 success, 2 invalid spec, 3 numerical failure in the oracle.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use starkshift::approx::Method;
use starkshift::dynamics::{self, SystemSpec};
use starkshift::pulse::PulseShape;
use starkshift::sweep::{
    self, design_command, figure_preset, run_sweep, Axis, DesignSystem, FigurePreset, SweepDef,
    SweepError, SweepSpec,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "starkshift",
    version,
    about = "Phase shifts of a qubit driven by an off-resonant pulsed field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all requested phase methods at a single parameter point.
    Phase(PhaseCmd),
    /// Run a parameter sweep from flags or a JSON spec file.
    Sweep(SweepCmd),
    /// Emit the data set behind one of the named comparison figures.
    Figure(FigureCmd),
    /// Find the detuning producing a prescribed gate phase, with numeric
    /// verification.
    Design(DesignCmd),
    /// Propagate once and dump the dense time series as CSV.
    Simulate(SimulateCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemKind {
    TwoState,
    Ladder,
    V,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct SystemArgs {
    /// System variant.
    #[arg(long, value_enum, default_value = "two-state")]
    system: SystemKind,
    /// Pulse shape: gaussian, sech, or file:PATH (two-column CSV t,omega).
    /// Three-state systems use the same shape on both transitions.
    #[arg(long, default_value = "gaussian")]
    shape: String,
    /// Peak Rabi frequency Ω₀T (ignored for file pulses).
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    /// Detuning ΔT (two-state systems).
    #[arg(long)]
    delta: Option<f64>,
    /// Detuning Δ₂T (three-state systems).
    #[arg(long)]
    delta2: Option<f64>,
    /// Detuning Δ₃T (three-state systems).
    #[arg(long)]
    delta3: Option<f64>,
    /// Loss rate ΓT of state 2 (two-state systems).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
}

impl SystemArgs {
    fn pulse(&self) -> Result<PulseShape, SweepError> {
        if let Some(path) = self.shape.strip_prefix("file:") {
            return Ok(PulseShape::from_csv_path(path)?);
        }
        match self.shape.as_str() {
            "gaussian" => Ok(PulseShape::gaussian(self.omega0, 1.0)?),
            "sech" => Ok(PulseShape::sech(self.omega0, 1.0)?),
            other => Err(SweepError::InvalidSpec(format!(
                "unknown shape {other:?} (use gaussian, sech, or file:PATH)"
            ))),
        }
    }

    fn to_system(&self) -> Result<SystemSpec, SweepError> {
        let pulse = self.pulse()?;
        let invalid = |e: dynamics::DynamicsError| SweepError::InvalidSpec(e.to_string());
        match self.system {
            SystemKind::TwoState => {
                SystemSpec::two_state(self.delta.unwrap_or(0.0), self.gamma, pulse)
                    .map_err(invalid)
            }
            SystemKind::Ladder | SystemKind::V => {
                let d2 = self.delta2.ok_or_else(|| {
                    SweepError::InvalidSpec("three-state systems need --delta2".into())
                })?;
                let d3 = self.delta3.ok_or_else(|| {
                    SweepError::InvalidSpec("three-state systems need --delta3".into())
                })?;
                if self.system == SystemKind::Ladder {
                    SystemSpec::ladder(d2, d3, pulse.clone(), pulse).map_err(invalid)
                } else {
                    SystemSpec::v(d2, d3, pulse.clone(), pulse).map_err(invalid)
                }
            }
        }
    }

    /// The natural single-point axis value for this system.
    fn axis_value(&self) -> f64 {
        match self.system {
            SystemKind::TwoState => self.delta.unwrap_or(0.0),
            _ => self.delta2.unwrap_or(0.0),
        }
    }
}

#[derive(Args)]
struct ToleranceArgs {
    /// Relative tolerance of the numeric oracle.
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Absolute tolerance of the numeric oracle.
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct PhaseCmd {
    #[command(flatten)]
    system: SystemArgs,
    /// Phase method to evaluate (repeatable); all valid methods when omitted.
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Include the numeric oracle column (on by default; --oracle=false to skip).
    #[arg(
        long,
        default_value_t = true,
        action = clap::ArgAction::Set,
        num_args = 0..=1,
        default_missing_value = "true"
    )]
    oracle: bool,
    #[command(flatten)]
    tol: ToleranceArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepCmd {
    /// JSON sweep spec file; replaces the individual flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    system: SystemArgs,
    /// Swept parameter.
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    grid_points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    log: bool,
    /// Phase method to evaluate (repeatable).
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Include the numeric oracle column (on by default; --oracle=false to skip).
    #[arg(
        long,
        default_value_t = true,
        action = clap::ArgAction::Set,
        num_args = 0..=1,
        default_missing_value = "true"
    )]
    oracle: bool,
    #[command(flatten)]
    tol: ToleranceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Detuning,
    Rabi,
    Loss,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::Detuning => Axis::Detuning,
            AxisArg::Rabi => Axis::Rabi,
            AxisArg::Loss => Axis::Loss,
        }
    }
}

#[derive(Args)]
struct FigureCmd {
    /// One of: fig2, fig3, fig4, fig5, fig6, fig7.
    name: String,
    #[command(flatten)]
    tol: ToleranceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DesignCmd {
    /// Target gate phase in radians.
    #[arg(long, conflicts_with = "target_pi")]
    target: Option<f64>,
    /// Target gate phase in units of π (e.g. 0.5 for π/2).
    #[arg(long)]
    target_pi: Option<f64>,
    /// Transition-free pulse-area index (area 2nπ).
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, value_enum, default_value = "two-state")]
    system: DesignKind,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DesignKind {
    TwoState,
    Ladder,
}

#[derive(Args)]
struct SimulateCmd {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    tol: ToleranceArgs,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Phase(cmd) => cmd_phase(cmd),
        Command::Sweep(cmd) => cmd_sweep(cmd),
        Command::Figure(cmd) => cmd_figure(cmd),
        Command::Design(cmd) => cmd_design(cmd),
        Command::Simulate(cmd) => cmd_simulate(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &SweepError) -> u8 {
    match e {
        SweepError::Oracle { .. } => 3,
        SweepError::Io(_) => 1,
        _ => 2,
    }
}

fn parse_methods(tags: &[String]) -> Result<Vec<Method>, SweepError> {
    tags.iter()
        .map(|t| {
            Method::from_tag(t)
                .ok_or_else(|| SweepError::InvalidSpec(format!("unknown method tag {t:?}")))
        })
        .collect()
}

fn write_output<F>(out: &Option<PathBuf>, write: F) -> Result<(), SweepError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), SweepError>,
{
    match out {
        Some(path) => {
            let file =
                std::fs::File::create(path).map_err(|e| SweepError::Io(e.to_string()))?;
            let mut buf = std::io::BufWriter::new(file);
            write(&mut buf)?;
            buf.flush().map_err(|e| SweepError::Io(e.to_string()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

fn emit_sweep(
    result: &sweep::SweepResult,
    out: &Option<PathBuf>,
    format: OutputFormat,
) -> Result<(), SweepError> {
    write_output(out, |w| match format {
        OutputFormat::Json => sweep::write_json(result, w),
        _ => sweep::write_csv(result, w).map_err(|e| SweepError::Io(e.to_string())),
    })
}

fn cmd_phase(cmd: PhaseCmd) -> Result<(), SweepError> {
    let system = cmd.system.to_system()?;
    let methods = if cmd.methods.is_empty() {
        sweep::valid_methods(&system).to_vec()
    } else {
        parse_methods(&cmd.methods)?
    };
    let spec = SweepSpec {
        system,
        axis: Axis::Detuning,
        grid: vec![cmd.system.axis_value()],
        methods,
        oracle: cmd.oracle,
        rel_tol: cmd.tol.rel_tol,
        abs_tol: cmd.tol.abs_tol,
        label: "phase".to_string(),
    };
    let result = run_sweep(&spec)?;
    match cmd.format {
        OutputFormat::Text => write_output(&cmd.out, |w| {
            let row = &result.rows[0];
            if let Some(numeric) = row.numeric_phase {
                writeln!(w, "{:<16} {:+.12} rad  (oracle)", "numeric", numeric)
                    .map_err(|e| SweepError::Io(e.to_string()))?;
            }
            for cell in &row.cells {
                match (cell.phase, &cell.flag) {
                    (Some(phase), _) => {
                        let err = cell
                            .abs_error
                            .map(|e| format!("  abs_error {e:.3e}"))
                            .unwrap_or_default();
                        let pop = cell
                            .population1
                            .map(|p| format!("  population1 {p:.12}"))
                            .unwrap_or_default();
                        writeln!(w, "{:<16} {phase:+.12} rad{err}{pop}", cell.method)
                            .map_err(|e| SweepError::Io(e.to_string()))?;
                    }
                    (None, Some(flag)) => {
                        writeln!(w, "{:<16} -- {flag}", cell.method)
                            .map_err(|e| SweepError::Io(e.to_string()))?;
                    }
                    (None, None) => unreachable!("cell without phase or flag"),
                }
            }
            Ok(())
        }),
        _ => emit_sweep(&result, &cmd.out, cmd.format),
    }
}

fn cmd_sweep(cmd: SweepCmd) -> Result<(), SweepError> {
    let spec = if let Some(path) = &cmd.spec {
        let text =
            std::fs::read_to_string(path).map_err(|e| SweepError::Io(e.to_string()))?;
        SweepDef::from_json(&text)?.into_spec()?
    } else {
        let axis = cmd.axis.ok_or_else(|| {
            SweepError::InvalidSpec("give --axis (or a --spec file)".into())
        })?;
        let (min, max) = match (cmd.grid_min, cmd.grid_max) {
            (Some(a), Some(b)) if b > a => (a, b),
            _ => {
                return Err(SweepError::InvalidSpec(
                    "give --grid-min < --grid-max".into(),
                ))
            }
        };
        if cmd.grid_points < 2 {
            return Err(SweepError::InvalidSpec("need at least 2 grid points".into()));
        }
        let grid: Vec<f64> = if cmd.log {
            if min <= 0.0 {
                return Err(SweepError::InvalidSpec("log grids need min > 0".into()));
            }
            (0..cmd.grid_points)
                .map(|k| {
                    (min.ln() + (max.ln() - min.ln()) * k as f64 / (cmd.grid_points - 1) as f64)
                        .exp()
                })
                .collect()
        } else {
            (0..cmd.grid_points)
                .map(|k| min + (max - min) * k as f64 / (cmd.grid_points - 1) as f64)
                .collect()
        };
        SweepSpec {
            system: cmd.system.to_system()?,
            axis: axis.into(),
            grid,
            methods: parse_methods(&cmd.methods)?,
            oracle: cmd.oracle,
            rel_tol: cmd.tol.rel_tol,
            abs_tol: cmd.tol.abs_tol,
            label: "custom".to_string(),
        }
    };
    let result = run_sweep(&spec)?;
    emit_sweep(&result, &cmd.output.out, cmd.output.format)
}

fn cmd_figure(cmd: FigureCmd) -> Result<(), SweepError> {
    let preset = FigurePreset::from_name(&cmd.name).ok_or_else(|| {
        SweepError::InvalidSpec(format!(
            "unknown figure {:?} (use fig2..fig7)",
            cmd.name
        ))
    })?;
    let mut spec = figure_preset(preset);
    spec.rel_tol = cmd.tol.rel_tol;
    spec.abs_tol = cmd.tol.abs_tol;
    let result = run_sweep(&spec)?;
    emit_sweep(&result, &cmd.output.out, cmd.output.format)
}

fn cmd_design(cmd: DesignCmd) -> Result<(), SweepError> {
    let target = match (cmd.target, cmd.target_pi) {
        (Some(t), None) => t,
        (None, Some(f)) => f * std::f64::consts::PI,
        (None, None) => {
            return Err(SweepError::InvalidSpec(
                "give --target RADIANS or --target-pi FRACTION".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let system = match cmd.system {
        DesignKind::TwoState => DesignSystem::TwoState,
        DesignKind::Ladder => DesignSystem::Ladder,
    };
    let report = design_command(target, cmd.n, system)?;
    match cmd.format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| SweepError::Json(e.to_string()))?;
            println!("{text}");
        }
        _ => {
            println!("system               {}", report.system);
            println!("target phase         {:+.12} rad", report.target_phase);
            println!("area index n         {}", report.n);
            println!("detuning dT          {:+.12}", report.delta);
            println!("peak Rabi O0T        {:+.12}", report.alpha);
            println!("pulse area           {:+.12}", report.pulse_area);
            println!("achieved phase       {:+.12} rad", report.achieved_phase);
            println!("phase error          {:.3e}", report.phase_error);
            println!("residual transition  {:.3e}", report.residual_transition);
        }
    }
    Ok(())
}

fn cmd_simulate(cmd: SimulateCmd) -> Result<(), SweepError> {
    let system = cmd.system.to_system()?;
    let mut initial = vec![Complex64::new(0.0, 0.0); system.dimension()];
    initial[0] = Complex64::new(1.0, 0.0);
    let result = dynamics::propagate(&system, &initial, cmd.tol.rel_tol, cmd.tol.abs_tol)
        .map_err(|source| SweepError::Oracle {
            axis: "simulate".to_string(),
            value: cmd.system.axis_value(),
            source,
        })?;
    write_output(&cmd.out, |w| {
        result
            .write_csv(w)
            .map_err(|e| SweepError::Io(e.to_string()))
    })
}
