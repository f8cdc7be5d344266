//! `qgtop`: winding numbers, sum rules and geometric phases from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 consistency failure.

mod values;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use qgtop::evolution::{EvolutionError, Resolution, Schedule};
use qgtop::gates::{self, Couplings, Family, GateError, GateName};
use qgtop::io::{self, Conventions, RampLibrary};
use qgtop::linalg;
use qgtop::pauli::{self, DEFAULT_ZERO_TOL};
use qgtop::phase::{self, PhaseError, PhaseOptions};

#[derive(Parser)]
#[command(name = "qgtop", version, about = "Geometric phases and topological sum rules for qubit gate schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Evolve {
    /// Circuit file.
    #[arg(long)]
    circuit: PathBuf,
    /// Steps per segment (default: adaptive).
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Topological number of each segment Hamiltonian.
    NuH {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        zero_tol: f64,
    },
    /// Winding number of det U(t).
    NuU {
        #[command(flatten)]
        evolve: Evolve,
        /// Drop every segment's global phase.
        #[arg(long)]
        bare: bool,
    },
    /// Geometric phases of the eigenstates of U(T) against the winding number.
    Sumrule {
        #[command(flatten)]
        evolve: Evolve,
        #[arg(long)]
        bare: bool,
        /// Apply the large-gauge correction to each phase.
        #[arg(long)]
        gauge_correction: bool,
    },
    /// Geometric phase of one initial state.
    Phase {
        #[command(flatten)]
        evolve: Evolve,
        /// Comma-separated amplitudes such as "0.6,0.8j,0,0", basis order |00⟩,|01⟩,|10⟩,|11⟩.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        #[arg(long)]
        gauge_correction: bool,
    },
    /// Computational-basis phases, phase sums and winding numbers of the four gates.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase of a state family against its closed form over an (α₀, β₀) grid.
    Sweep {
        #[arg(long, value_enum)]
        gate: SweepGate,
        #[arg(long)]
        family: Family,
        /// LO:HI:STEP; accepts multiples of pi such as 0:pi/2:pi/16.
        #[arg(long, allow_hyphen_values = true)]
        alpha0: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        beta0: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        couplings: CouplingArgs,
    },
    /// Phase shift of the noisy SWAP against B/λ, with a fitted slope per α₀.
    Noise {
        #[arg(long)]
        b_over_lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha0: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Prints a gate recipe as a circuit file.
    Recipe {
        #[arg(long)]
        gate: GateName,
        /// Omit the scalar prefactor of the gate.
        #[arg(long)]
        bare: bool,
        /// Cycle count, e.g. 1/2 (one application) or 1.
        #[arg(long, default_value = "1/2")]
        cycles: String,
        #[command(flatten)]
        couplings: CouplingArgs,
        #[arg(long, default_value_t = 0.0)]
        b: f64,
    },
}

#[derive(clap::Args)]
struct CouplingArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    w: f64,
    #[arg(long, default_value_t = 1.0)]
    energy: f64,
}

impl CouplingArgs {
    fn couplings(&self, b: f64) -> Couplings {
        Couplings { lambda: self.lambda, w: self.w, energy: self.energy, b }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepGate {
    Swap1sq,
    Swap2sq,
    Cnot1sq,
    Cnot2sq,
}

impl SweepGate {
    fn gate(self) -> GateName {
        match self {
            SweepGate::Swap1sq => GateName::Swap1,
            SweepGate::Swap2sq => GateName::Swap2,
            SweepGate::Cnot1sq => GateName::Cnot1,
            SweepGate::Cnot2sq => GateName::Cnot2,
        }
    }
}

enum Failure {
    Input(String),
    Consistency(String),
}

impl From<GateError> for Failure {
    fn from(e: GateError) -> Self {
        match e {
            GateError::RecipeMismatch { .. } => Failure::Consistency(e.to_string()),
            GateError::Phase(p) => p.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<PhaseError> for Failure {
    fn from(e: PhaseError) -> Self {
        match e {
            PhaseError::NonInteger { .. } | PhaseError::DeterminantStep { .. } | PhaseError::Overlap { .. } => {
                Failure::Consistency(e.to_string())
            }
            PhaseError::Evolution(EvolutionError::StepControl { .. }) => Failure::Consistency(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<EvolutionError> for Failure {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::StepControl { .. } => Failure::Consistency(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn load_circuit(path: &Path) -> Result<Schedule, Failure> {
    let bytes = std::fs::read(path).map_err(input(&path.display().to_string()))?;
    let mut ramps = RampLibrary::new();
    if let Ok(text) = std::str::from_utf8(&bytes) {
        ramps.load_sidecars(text, path).map_err(input("ramp table"))?;
    }
    io::parse_bytes(&bytes, &ramps).map_err(input(&path.display().to_string()))
}

fn resolution(steps: Option<usize>) -> Resolution {
    steps.map_or_else(Resolution::default, Resolution::fixed)
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(input(&path.display().to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn nu_h_per_segment(schedule: &Schedule, zero_tol: f64) -> Result<Vec<Option<f64>>, Failure> {
    schedule
        .segments
        .iter()
        .map(|s| {
            let n = pauli::nu_h(&s.hamiltonian, zero_tol).map_err(input("nu_h"))?;
            Ok((n.zero_count == 0).then(|| n.value.as_f64()))
        })
        .collect()
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::NuH { circuit, zero_tol } => {
            let schedule = load_circuit(&circuit)?;
            let mut segments = Vec::new();
            for (i, s) in schedule.segments.iter().enumerate() {
                let n = pauli::nu_h(&s.hamiltonian, zero_tol).map_err(input("nu_h"))?;
                segments.push(json!({
                    "segment": i,
                    "nu_h": (n.zero_count == 0).then(|| n.value.as_f64()),
                    "positive": n.positive,
                    "negative": n.negative,
                    "zero_count": n.zero_count,
                    "stripped_identity": n.stripped_identity,
                }));
            }
            emit(&io::to_json(&json!({ "segments": segments })), None)
        }
        Command::NuU { evolve, bare } => {
            let mut schedule = load_circuit(&evolve.circuit)?;
            if bare {
                schedule = schedule.bare();
            }
            let traj = qgtop::evolution::propagate(&schedule, &resolution(evolve.steps))?;
            let w = phase::winding_number(&traj)?;
            let report = json!({
                "nu_u": w.nu_u,
                "raw_winding": w.raw_winding,
                "residual": w.residual,
                "contour_winding": w.contour_winding,
                "endpoint_eigenphases": w.endpoint_eigenphases,
                "sign_convention": w.sign_convention,
                "conventions": Conventions::of(&schedule),
            });
            emit(&io::to_json(&report), None)
        }
        Command::Sumrule { evolve, bare, gauge_correction } => {
            let mut schedule = load_circuit(&evolve.circuit)?;
            if bare {
                schedule = schedule.bare();
            }
            let record = phase::sum_rule(&schedule, &resolution(evolve.steps), PhaseOptions { gauge_correction })?;
            let nu_h = nu_h_per_segment(&schedule, DEFAULT_ZERO_TOL)?;
            emit(&io::emit_report(&record, &nu_h, &Conventions::of(&schedule)), None)?;
            if record.consistent {
                Ok(())
            } else {
                Err(Failure::Consistency(format!(
                    "sum rule violated: Σγ/2π = {} but ν_U = {}",
                    record.gamma_sum_over_2pi, record.nu_u
                )))
            }
        }
        Command::Phase { evolve, state, gauge_correction } => {
            let schedule = load_circuit(&evolve.circuit)?;
            let amps: Vec<Complex64> =
                state.split(',').map(values::parse_complex).collect::<Result<_, _>>().map_err(Failure::Input)?;
            if amps.len() != schedule.dim() {
                return Err(Failure::Input(format!(
                    "state has {} amplitudes, circuit needs {}",
                    amps.len(),
                    schedule.dim()
                )));
            }
            let n = linalg::norm(&amps);
            if n == 0.0 {
                return Err(Failure::Input("state is zero".into()));
            }
            if (n - 1.0).abs() > 1e-12 {
                eprintln!("warning: state norm {n} normalized to 1");
            }
            let psi = linalg::normalized(&amps);
            let traj = qgtop::evolution::evolve_state(&schedule, &psi, &resolution(evolve.steps))?;
            let report = phase::geometric_phase(&traj, PhaseOptions { gauge_correction })?;
            let amps: Vec<[f64; 2]> = psi.iter().map(|z| [z.re, z.im]).collect();
            emit(&io::emit_phase_report(&amps, &report, &Conventions::of(&schedule)), None)
        }
        Command::Table1 { out } => {
            let table = gates::table1(&Resolution::default())?;
            emit(&io::to_json(&table), out.as_deref())?;
            let inconsistent: Vec<String> = table
                .rows
                .iter()
                .flat_map(|r| r.entries.iter().filter(|e| !e.sum_rule_consistent).map(move |_| r.gate.to_string()))
                .collect();
            if inconsistent.is_empty() {
                Ok(())
            } else {
                Err(Failure::Consistency(format!("sum rule violated for {}", inconsistent.join(", "))))
            }
        }
        Command::Sweep { gate, family, alpha0, beta0, out, couplings } => {
            let alphas = values::parse_range(&alpha0).map_err(Failure::Input)?;
            let betas = values::parse_range(&beta0).map_err(Failure::Input)?;
            let recipe = gates::build(gate.gate(), couplings.couplings(0.0), true)?;
            let rows = gates::sweep(&recipe, family, &alphas, &betas, &Resolution::default())?;
            emit(&io::emit_sweep(&rows), out.as_deref())
        }
        Command::Noise { b_over_lambda, alpha0, out, lambda } => {
            let ratios = values::parse_range(&b_over_lambda).map_err(Failure::Input)?;
            let alphas = values::parse_range(&alpha0).map_err(Failure::Input)?;
            let (rows, fits) = gates::noise_sweep(&ratios, &alphas, lambda, &Resolution::default())?;
            match out {
                Some(path) => {
                    emit(&io::emit_noise(&rows), Some(&path))?;
                    emit(&io::to_json(&json!({ "fits": fits })), None)
                }
                None => emit(&io::to_json(&json!({ "rows": rows, "fits": fits })), None),
            }
        }
        Command::Recipe { gate, bare, cycles, couplings, b } => {
            let cycles = cycles.parse().map_err(input("cycles"))?;
            let recipe = gates::build(gate, couplings.couplings(b), !bare)?;
            let schedule = recipe.with_cycles(cycles)?;
            emit(&io::serialize(&schedule), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("consistency failure: {msg}");
            ExitCode::from(2)
        }
    }
}
