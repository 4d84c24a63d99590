use clap::{Parser, Subcommand, ValueEnum};
use online_covering::adversary::{run_adversary, validate_claims, ReferenceGd, DEFAULT_PHASES};
use online_covering::box_kc::Tau;
use online_covering::harness::{
    format_table, gen_random, ratio_sweep, run_cip, run_clp, GenParams, RunOptions, RunReport, SweepConfig,
};
use online_covering::oracles::{ip_opt, lp_opt, CoveringProgram, OracleStatus};
use online_covering::{load_instance, save_instance, Instance};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "online-covering", version, about = "Online covering LP/IP solvers and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the fractional solver on an instance without upper bounds.
    SolveClp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        check_invariants: bool,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the box solver and rounding on an instance with upper bounds.
    SolveCip {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        check_invariants: bool,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Fixed freezing threshold; defaults to 1/8.
        #[arg(long, conflicts_with = "tau_column_sparsity")]
        tau: Option<f64>,
        /// Use tau = 1/(8 log2 l) with l the running column sparsity.
        #[arg(long)]
        tau_column_sparsity: bool,
    },
    /// Write a seeded random instance.
    GenRandom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k_max: usize,
        #[arg(long, default_value_t = 0.1)]
        coeff_min: f64,
        #[arg(long, default_value_t = 2.0)]
        coeff_max: f64,
        #[arg(long)]
        u_max: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance offline.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        mode: OracleMode,
    },
    /// Play the guess-and-double adversary against the reference algorithm.
    Adversary {
        #[arg(long)]
        rho: u32,
        #[arg(long, default_value_t = DEFAULT_PHASES)]
        phases: u32,
        #[arg(long, default_value_t = 1.0)]
        greediness: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure competitive ratios over instance families.
    RatioSweep {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Lp,
    Ip,
}

struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    load_instance(&bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(report: &RunReport, path: Option<&Path>) -> Result<u8, Failure> {
    let text = report.to_jsonl();
    match path {
        Some(p) => write_file(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    let s = &report.summary;
    eprintln!("status={:?} primal={} dual={} checks={}/{}", s.status, s.primal_cost, s.dual_total, s.checks.failed, s.checks.run);
    Ok(report.status().exit_code() as u8)
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::SolveClp { instance, check_invariants, oracle, report } => {
            let inst = read_instance(&instance)?;
            let opts = RunOptions { check_invariants, oracle, tau: Tau::default() };
            let rep = run_clp(&inst, &opts).map_err(usage)?;
            emit(&rep, report.as_deref())
        }
        Command::SolveCip { instance, seed, check_invariants, oracle, report, tau, tau_column_sparsity } => {
            let inst = read_instance(&instance)?;
            let tau = match (tau, tau_column_sparsity) {
                (_, true) => Tau::ColumnSparsity,
                (Some(t), false) => Tau::Fixed(t),
                (None, false) => Tau::default(),
            };
            let rep = run_cip(&inst, seed, &RunOptions { check_invariants, oracle, tau }).map_err(usage)?;
            emit(&rep, report.as_deref())
        }
        Command::GenRandom { n, m, k_max, coeff_min, coeff_max, u_max, density, seed, out } => {
            let p = GenParams { n, m, k_max, coeff_range: (coeff_min, coeff_max), u_max, density, seed };
            let inst = gen_random(&p).map_err(usage)?;
            write_file(&out, &save_instance(&inst))?;
            Ok(0)
        }
        Command::Oracle { instance, mode } => {
            let prog = CoveringProgram::from(&read_instance(&instance)?);
            let r = match mode {
                OracleMode::Lp => lp_opt(&prog),
                OracleMode::Ip => ip_opt(&prog),
            };
            println!("{}", serde_json::to_string(&r).expect("result serializes"));
            Ok(match r.status {
                OracleStatus::Optimal => 0,
                OracleStatus::Infeasible => EXIT_INFEASIBLE,
                _ => EXIT_FAIL,
            })
        }
        Command::Adversary { rho, phases, greediness, report } => {
            let mut algo = ReferenceGd::new(greediness).map_err(usage)?;
            let trace = match run_adversary(&mut algo, rho, phases) {
                Ok(t) => t,
                Err(e @ online_covering::adversary::AdversaryError::FrameworkViolation { .. }) => {
                    return Err(Failure(EXIT_FAIL, e.to_string()))
                }
                Err(e) => return Err(usage(e)),
            };
            let claims = validate_claims(&trace);
            let doc = serde_json::json!({ "trace": trace, "claims": claims });
            let text = serde_json::to_string_pretty(&doc).expect("trace serializes") + "\n";
            match report {
                Some(p) => write_file(&p, text.as_bytes())?,
                None => print!("{text}"),
            }
            for c in &claims.report.checks {
                eprintln!("{c}");
            }
            eprintln!("primal/dual = {}", claims.gap());
            Ok(if claims.all_passed() { 0 } else { EXIT_FAIL })
        }
        Command::RatioSweep { config } => {
            let bytes = std::fs::read(&config).map_err(|e| usage(format!("{}: {e}", config.display())))?;
            let cfg: SweepConfig = serde_json::from_slice(&bytes).map_err(usage)?;
            let rows = ratio_sweep(&cfg).map_err(usage)?;
            print!("{}", format_table(&rows));
            Ok(if rows.iter().all(|r| r.checks_failed == 0) { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
