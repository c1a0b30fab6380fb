mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use ising_pfn::compile_general::{compile_general, Layout};
use ising_pfn::compile_unitary::{build_constant_depth, compile_problem1, delta_o, CompileError, Readout};
use ising_pfn::iqp::{self, IqpError};
use ising_pfn::mbqc::{embed_circuit, EmbedReport, MbqcError, TargetCircuit};
use ising_pfn::model::{classify_domain, parse_instance, random_instance, serialize_instance, DomainClass, IsingInstance, ModelError, DOMAIN_TOL};
use ising_pfn::oracle::{brute_force_z, transfer_matrix_z, ExactResult, OracleError, BRUTE_FORCE_LIMIT, TRANSFER_ROW_LIMIT};
use ising_pfn::simulator::{hadamard_test, run_circuit, SimError};
use ising_pfn::verify::{self, SuiteReport, VerifyError, EMBED_TOL, IQP_TOL};

use report::{write_report, Format, RunReport};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
    #[error(transparent)]
    Iqp(#[from] IqpError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Parser)]
#[command(name = "ising-pfn", version, about = "Ising partition functions through quantum-circuit amplitudes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the primary output here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Seed for every random choice the command makes.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads for parallel sums (default: all cores).
    #[arg(long, env = "ISING_PFN_THREADS", global = true)]
    threads: Option<usize>,
    /// Lift the brute-force size guard.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Exact partition function from the classical oracles.
    Exact {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Emit the compiled circuit document.
    Compile {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
    },
    /// Exact amplitude of the compiled circuit, scaled back to a partition function.
    Simulate {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
    },
    /// Hadamard-test estimate of the compiled circuit amplitude.
    Estimate {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Run a named verification suite (or all of them).
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Embed a two-wire circuit into a lattice instance and evaluate it.
    Embed {
        /// Target circuit document, e.g. {"wires":2,"gates":[{"gate":"H","wire":0}]}.
        #[arg(short, long)]
        instance: PathBuf,
        /// Also write the generated lattice instance here.
        #[arg(long)]
        emit_instance: Option<PathBuf>,
    },
    /// Commuting-circuit form of a physical instance and the real-to-imaginary mapping.
    Iqp {
        #[arg(short, long)]
        instance: PathBuf,
        /// Also write the commuting circuit document here.
        #[arg(long)]
        emit_circuit: Option<PathBuf>,
    },
    /// Write a random instance document.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        domain: DomainArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Transfer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Unitary,
    General,
    ConstantDepth,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Projections,
    Brickwork,
    Iqp,
    Scales,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Problem1,
    Problem2,
    Problem3,
    Physical,
    General,
}

impl From<DomainArg> for DomainClass {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Problem1 => DomainClass::Problem1,
            DomainArg::Problem2 => DomainClass::Problem2,
            DomainArg::Problem3 => DomainClass::Problem3,
            DomainArg::Physical => DomainClass::Physical,
            DomainArg::General => DomainClass::General,
        }
    }
}

enum Outcome {
    Success,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| CliError::Threads(e.to_string()))?;
    }
    match &cli.command {
        Command::Exact { instance, method } => {
            let inst = load_instance(instance)?;
            let start = Instant::now();
            let exact = exact_z(&inst, *method, cli.force)?;
            let mut rep = base_report(&inst, method_name(exact.method));
            rep.z_exact = Some(exact.value());
            rep.delta_o = delta_o(&inst).ok();
            rep.wall_time = start.elapsed().as_secs_f64();
            emit(cli, &write_report(&rep, cli.format))?;
        }
        Command::Compile { instance, mode } => {
            let inst = load_instance(instance)?;
            let circuit = match resolve_mode(*mode, &inst) {
                Mode::Unitary => compile_problem1(&inst, Readout::Gate)?,
                Mode::General => compile_general(&inst, Layout::Monolithic)?.circuit,
                Mode::ConstantDepth => build_constant_depth(&inst)?,
                Mode::Auto => unreachable!("resolved above"),
            };
            emit(cli, &(circuit.to_json() + "\n"))?;
        }
        Command::Simulate { instance, mode } => {
            let inst = load_instance(instance)?;
            let rep = simulate(&inst, *mode, cli.force)?;
            emit(cli, &write_report(&rep, cli.format))?;
        }
        Command::Estimate { instance, mode, samples } => {
            let inst = load_instance(instance)?;
            let rep = estimate(&inst, *mode, *samples, cli.seed, cli.force)?;
            emit(cli, &write_report(&rep, cli.format))?;
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = match suite {
                Suite::All => verify::SUITES.to_vec(),
                Suite::Identities => vec!["identities"],
                Suite::Projections => vec!["projections"],
                Suite::Brickwork => vec!["brickwork"],
                Suite::Iqp => vec!["iqp"],
                Suite::Scales => vec!["scales"],
            };
            let reports = names.iter().map(|n| verify::run_suite(n, cli.seed)).collect::<Result<Vec<_>, _>>()?;
            emit(cli, &render_suites(&reports, cli.format))?;
            if !reports.iter().all(SuiteReport::passed) {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Embed { instance, emit_instance } => {
            let text = read(instance)?;
            let target: TargetCircuit =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", instance.display())))?;
            let rep = embed_circuit(&target)?;
            if let Some(path) = emit_instance {
                write(path, &(serialize_instance(&rep.instance) + "\n"))?;
            }
            emit(cli, &render_embed(&rep, cli.format))?;
            if rep.phase_free_error() >= EMBED_TOL {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Iqp { instance, emit_circuit } => {
            let inst = load_instance(instance)?;
            let summary = iqp_summary(&inst, cli.force)?;
            if let Some(path) = emit_circuit {
                write(path, &(iqp::to_commuting(&inst)?.to_json() + "\n"))?;
            }
            emit(cli, &render_iqp(&summary, cli.format))?;
            if summary.relative_error.is_some_and(|e| e >= IQP_TOL) {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Generate { n, m, domain } => {
            let inst = random_instance(*n, *m, (*domain).into(), cli.seed)?;
            emit(cli, &(serialize_instance(&inst) + "\n"))?;
        }
    }
    Ok(Outcome::Success)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<IsingInstance, CliError> {
    Ok(parse_instance(&read(path)?)?)
}

fn method_name(m: ising_pfn::oracle::ExactMethod) -> String {
    match m {
        ising_pfn::oracle::ExactMethod::Brute => "brute".into(),
        ising_pfn::oracle::ExactMethod::Transfer => "transfer".into(),
    }
}

fn base_report(inst: &IsingInstance, method: String) -> RunReport {
    let domain = format!("{:?}", classify_domain(inst, DOMAIN_TOL));
    RunReport::new(format!("{}x{}", inst.n(), inst.m()), domain, method)
}

/// Brute force when the lattice is small enough, the transfer matrix otherwise.
fn exact_z(inst: &IsingInstance, method: Option<Method>, force: bool) -> Result<ExactResult, CliError> {
    let method = method.unwrap_or(if inst.num_vertices() <= BRUTE_FORCE_LIMIT || inst.n() > TRANSFER_ROW_LIMIT {
        Method::Brute
    } else {
        Method::Transfer
    });
    Ok(match method {
        Method::Brute => brute_force_z(inst, force)?,
        Method::Transfer => transfer_matrix_z(inst)?,
    })
}

fn resolve_mode(mode: Mode, inst: &IsingInstance) -> Mode {
    match mode {
        Mode::Auto if classify_domain(inst, DOMAIN_TOL) == DomainClass::Problem1 => Mode::Unitary,
        Mode::Auto => Mode::General,
        explicit => explicit,
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Unitary => "unitary",
        Mode::General => "general",
        Mode::ConstantDepth => "constant-depth",
        Mode::Auto => "auto",
    }
}

fn simulate(inst: &IsingInstance, mode: Mode, force: bool) -> Result<RunReport, CliError> {
    let mode = resolve_mode(mode, inst);
    let mut rep = base_report(inst, format!("simulate/{}", mode_name(mode)));
    let start = Instant::now();
    let (z, delta) = match mode {
        Mode::Unitary => {
            let circ = compile_problem1(inst, Readout::Gate)?;
            (circ.scale * run_circuit(&circ)?, circ.scale)
        }
        Mode::General => {
            let gc = compile_general(inst, Layout::Direct)?;
            rep.delta_prime = Some(iqp::gadget_body(inst)?.2.exp2());
            (gc.delta * run_circuit(&gc.circuit)?, gc.delta)
        }
        Mode::ConstantDepth => {
            let circ = build_constant_depth(inst)?;
            (circ.scale * run_circuit(&circ)?, circ.scale)
        }
        Mode::Auto => unreachable!("resolved above"),
    };
    rep.wall_time = start.elapsed().as_secs_f64();
    rep.z_estimate = Some(z);
    rep.delta = Some(delta);
    rep.delta_o = delta_o(inst).ok();
    rep.z_exact = exact_z(inst, None, force).ok().map(|e| e.value());
    Ok(rep.with_errors())
}

fn estimate(inst: &IsingInstance, mode: Mode, samples: u64, seed: u64, force: bool) -> Result<RunReport, CliError> {
    let mode = resolve_mode(mode, inst);
    let mut rep = base_report(inst, format!("estimate/{}", mode_name(mode)));
    let start = Instant::now();
    let circ = match mode {
        Mode::Unitary => compile_problem1(inst, Readout::Gate)?,
        Mode::General => {
            let (circ, log2_delta_prime) = iqp::gadget_circuit(inst)?;
            rep.delta_prime = Some(log2_delta_prime.exp2());
            circ
        }
        Mode::ConstantDepth => {
            return Err(CliError::Usage(
                "the constant-depth circuit contains non-unitary readout gates; use --mode unitary or general".into(),
            ))
        }
        Mode::Auto => unreachable!("resolved above"),
    };
    let est = hadamard_test(&circ, samples, seed)?;
    rep.wall_time = start.elapsed().as_secs_f64();
    rep.z_estimate = Some(Complex64::new(est.re, est.im) * circ.scale);
    rep.delta = Some(circ.scale);
    rep.delta_o = delta_o(inst).ok();
    rep.samples = Some(samples);
    rep.seed = Some(seed);
    rep.z_exact = exact_z(inst, None, force).ok().map(|e| e.value());
    Ok(rep.with_errors())
}

fn render_suites(reports: &[SuiteReport], format: Format) -> String {
    match format {
        Format::Text => reports.iter().map(|r| format!("{r}\n")).collect(),
        Format::Json => serde_json::to_string_pretty(reports).expect("serializable") + "\n",
        Format::Csv => {
            let mut out = String::from("suite,check,value,tolerance,passed\n");
            for r in reports {
                for c in &r.checks {
                    out += &format!("{},\"{}\",{},{},{}\n", r.suite, c.label, c.value, c.tolerance, c.passed);
                }
            }
            out
        }
    }
}

fn render_embed(rep: &EmbedReport, format: Format) -> String {
    match format {
        Format::Csv => format!("{}\n{}\n", EmbedReport::csv_header(), rep.csv_row()),
        Format::Json => serde_json::to_string_pretty(rep).expect("serializable") + "\n",
        Format::Text => format!(
            "lattice         {}x{} ({} cells)\nlog2 Delta      {}\n#gamma #delta #Omega  {} {} {}\n\
             Z/Delta         {:.12e} {:+.12e}i\n<0|U|0>         {:.12e} {:+.12e}i\nphase-free err  {:.3e}\n",
            rep.wires,
            rep.columns,
            rep.cells,
            rep.log2_delta,
            rep.gamma_count,
            rep.delta_count,
            rep.omega_count,
            rep.amplitude.re,
            rep.amplitude.im,
            rep.target_amplitude.re,
            rep.target_amplitude.im,
            rep.phase_free_error()
        ),
    }
}

#[derive(Serialize)]
struct IqpSummary {
    instance: String,
    qubits: usize,
    zz_terms: usize,
    log2_prefactor: f64,
    amplitude: Option<Complex64>,
    z_from_circuit: Option<Complex64>,
    z_exact: Option<Complex64>,
    relative_error: Option<f64>,
    measured_exponent: Option<f64>,
    resolved_exponent: i64,
    stated_exponent: i64,
}

fn iqp_summary(inst: &IsingInstance, force: bool) -> Result<IqpSummary, CliError> {
    let cc = iqp::to_commuting(inst)?;
    let amplitude = iqp::iqp_amplitude(&cc).ok();
    let z_from_circuit = amplitude.map(|a| a * cc.prefactor());
    let z_exact = exact_z(inst, None, force).ok().map(|e| e.value());
    let relative_error = match (z_from_circuit, z_exact) {
        (Some(a), Some(b)) => Some((a - b).norm() / b.norm()),
        _ => None,
    };
    let measured_exponent = if cc.num_qubits <= BRUTE_FORCE_LIMIT && inst.num_vertices() <= BRUTE_FORCE_LIMIT {
        Some(iqp::real_imag_instance(inst)?.log2_s)
    } else {
        None
    };
    Ok(IqpSummary {
        instance: format!("{}x{}", inst.n(), inst.m()),
        qubits: cc.num_qubits,
        zz_terms: cc.zz_terms.len(),
        log2_prefactor: cc.log2_prefactor,
        amplitude,
        z_from_circuit,
        z_exact,
        relative_error,
        measured_exponent,
        resolved_exponent: iqp::real_imag_exponent(inst.n(), inst.m()),
        stated_exponent: iqp::stated_real_imag_exponent(inst.n(), inst.m()),
    })
}

fn render_iqp(s: &IqpSummary, format: Format) -> String {
    fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    match format {
        Format::Json => serde_json::to_string_pretty(s).expect("serializable") + "\n",
        Format::Csv => format!(
            "instance,qubits,zz_terms,log2_prefactor,z_circuit_re,z_circuit_im,z_exact_re,z_exact_im,relative_error,measured_exponent,resolved_exponent,stated_exponent\n\
             {},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.instance,
            s.qubits,
            s.zz_terms,
            s.log2_prefactor,
            opt(s.z_from_circuit.map(|z| z.re)),
            opt(s.z_from_circuit.map(|z| z.im)),
            opt(s.z_exact.map(|z| z.re)),
            opt(s.z_exact.map(|z| z.im)),
            opt(s.relative_error),
            opt(s.measured_exponent),
            s.resolved_exponent,
            s.stated_exponent
        ),
        Format::Text => {
            let z = |v: Option<Complex64>| v.map(|z| format!("{:.12e} {:+.12e}i", z.re, z.im)).unwrap_or("n/a".into());
            format!(
                "instance           {}\nqubits |V'|        {}\nzz terms           {}\nlog2 prefactor     {}\n\
                 <+|D'|+>           {}\nprefactor*amp      {}\nZ exact            {}\nrelative error     {}\n\
                 log2|s| measured   {}\nresolved exponent  {} (-4nm+n+m)\nstated exponent    {} (-5nm+2n+m)\n",
                s.instance,
                s.qubits,
                s.zz_terms,
                s.log2_prefactor,
                z(s.amplitude),
                z(s.z_from_circuit),
                z(s.z_exact),
                s.relative_error.map(|e| format!("{e:.3e}")).unwrap_or("n/a".into()),
                s.measured_exponent.map(|e| format!("{e:.9}")).unwrap_or("n/a".into()),
                s.resolved_exponent,
                s.stated_exponent
            )
        }
    }
}
