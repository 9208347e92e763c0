//! `qds3`: seeded batch runner for the quantum-double simulator.
//!
//! Every subcommand prints one JSON object per result row (keys sorted,
//! each stamped with `command` and `seed`). Exit status: 0 when every
//! acceptance check passes, 1 when one fails, 2 on a usage error or on
//! parameters the library rejects.

mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use qds3::algebra::Anyon;

use report::Report;

#[derive(Debug, Parser)]
#[command(name = "qds3", version, about = "Seeded experiments on the D(S3) quantum double", arg_required_else_help = true)]
struct Cli {
    /// Print a human-readable digest instead of JSON lines on stdout
    /// (JSON lines still go to `--output` when given).
    #[arg(long, global = true)]
    summary: bool,
    /// Also write the JSON lines to this file.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true, env = "QDS3_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pentagon/hexagon residuals, gauge-invariant cross-check and quantum dimensions.
    VerifyCategory {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Stabilizer residuals and M_K site distributions of the ground state.
    GroundState {
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        height: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Success probability of the adaptive single-site move after n rounds.
    MoveStats {
        /// Anyon letter A..H; all eight when omitted.
        #[arg(long, value_parser = parse_anyon)]
        anyon: Option<Anyon>,
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Pair creation by a ribbon plus M_K, and pair-fusion statistics.
    RibbonDemo {
        /// Anyon letter A..H; all eight when omitted.
        #[arg(long, value_parser = parse_anyon)]
        anyon: Option<Anyon>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Choi distances between emitted circuits and operator-level channels.
    CircuitEquivalence {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Remote measurement M_A on a qutrit a|AG⟩ + b|GG⟩ + c|GA⟩.
    MeasureMa {
        /// Real amplitudes of |AG⟩, |GG⟩, |GA⟩ (normalized internally).
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 0.0], allow_negative_numbers = true)]
        amplitudes: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = qds3::fusion_sim::DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
        /// Emit one record per trial as well.
        #[arg(long)]
        transcripts: bool,
        #[arg(long)]
        seed: u64,
    },
    /// Remote measurement M_U with n repetitions on a nine-label qutrit state.
    MeasureMu {
        /// Real amplitudes in the order AG GG GA FC HF CH CF FH HC.
        #[arg(long, value_delimiter = ',', num_args = 9, default_values_t = [1.0; 9], allow_negative_numbers = true)]
        amplitudes: Vec<f64>,
        /// Consecutive A outcomes required for the U result.
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        transcripts: bool,
        #[arg(long)]
        seed: u64,
    },
    /// Split a random two-qutrit state, merge it back, compare.
    MergeSplit {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = qds3::fusion_sim::DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
        #[arg(long)]
        transcripts: bool,
        #[arg(long)]
        seed: u64,
    },
    /// Anyon patterns M_K reports for each single-edge Pauli error.
    SyndromeTable {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rounds of noise, M_K, greedy decoding and ribbon recovery.
    QecCycle {
        #[arg(long, value_enum, default_value_t = QecModel::Phenomenological)]
        model: QecModel,
        #[arg(long, default_value_t = 16)]
        width: usize,
        #[arg(long, default_value_t = 16)]
        height: usize,
        /// Per-edge error probability per round.
        #[arg(long, default_value_t = 1e-3)]
        rate: f64,
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// M_K rounds allowed per recovery push (microscopic model).
        #[arg(long, default_value_t = qds3::protocols::DEFAULT_ROUND_BUDGET)]
        budget: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Logical CĈ between a concatenated qubit code and a qutrit code.
    ConcatCc {
        /// Run every single-qutrit error location of the [[9,1,3]] demo (slow).
        #[arg(long)]
        sweep: bool,
        /// Inject `STEP:SITE:XZ` (e.g. `1:4:10` is X̂ on qutrit 4 after step 1).
        #[arg(long, value_parser = commands::parse_injection)]
        inject: Vec<qds3::concat_code::InjectedError>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Orthonormality of overlapping ribbon-operator families.
    Orthonormality {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QecModel {
    /// Exact lattice state (small lattices only).
    Micro,
    /// Anyon letters on a site grid with sampled fusions.
    Phenomenological,
}

fn parse_anyon(s: &str) -> Result<Anyon, String> {
    Anyon::from_letter(s).map_err(|e| e.to_string())
}

fn run(command: Command) -> Result<Report, String> {
    use Command::*;
    match command {
        VerifyCategory { seed } => commands::verify_category(seed),
        GroundState { width, height, seed } => commands::ground_state(width, height, seed),
        MoveStats { anyon, rounds, trials, seed } => commands::move_stats(anyon, rounds, trials, seed),
        RibbonDemo { anyon, trials, seed } => commands::ribbon_demo(anyon, trials, seed),
        CircuitEquivalence { seed } => commands::circuit_equivalence(seed),
        MeasureMa { amplitudes, trials, max_rounds, transcripts, seed } => {
            commands::measure_ma(&amplitudes, trials, max_rounds, transcripts, seed)
        }
        MeasureMu { amplitudes, rounds, trials, transcripts, seed } => {
            commands::measure_mu(&amplitudes, rounds, trials, transcripts, seed)
        }
        MergeSplit { trials, max_rounds, transcripts, seed } => commands::merge_split(trials, max_rounds, transcripts, seed),
        SyndromeTable { seed } => commands::syndrome_table(seed),
        QecCycle { model, width, height, rate, rounds, trials, budget, seed } => {
            commands::qec_cycle(model, width, height, rate, rounds, trials, budget, seed)
        }
        ConcatCc { sweep, inject, seed } => commands::concat_cc(sweep, &inject, seed),
        Orthonormality { seed } => commands::orthonormality(seed),
    }
}

fn emit(report: &Report, summary: bool, output: Option<&PathBuf>) -> io::Result<()> {
    if let Some(path) = output {
        let mut f = BufWriter::new(File::create(path)?);
        report.write_records(&mut f)?;
        f.flush()?;
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if summary {
        report.write_digest(&mut out)?;
    } else {
        report.write_records(&mut out)?;
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, cli.summary, cli.output.as_ref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
