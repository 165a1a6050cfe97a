use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use psigma::cactus::{ascending_forest_complex, forest_complex, CactusGraph};
use psigma::character::Character;
use psigma::homology::{SimplicialComplex, DEFAULT_FACE_BUDGET};
use psigma::idealedge::{build_complex, Filter, PositiveSubset};
use psigma::verify::{self, FoundationParams, Mode, VerificationReport, VerifyError};

#[derive(Parser)]
#[command(name = "psigma", version, about = "Finite checks on pure symmetric automorphism groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification and print its report.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Build a complex and print it as JSON.
    #[command(subcommand)]
    Complex(ComplexCommand),
    /// Reduced integral homology of a complex stored as JSON.
    Homology {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
        budget: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Ascending ideal-edge complex of the positive character.
    Prop47 {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(2..=5))]
        n: u8,
        #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
        budget: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Rank-3 ascending complexes for every sign pattern or random generic characters.
    ThmN3 {
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// The rank-4 character with nontrivial second homology.
    Remark48 {
        #[arg(long, default_value = "1/100", value_parser = parse_epsilon)]
        epsilon: num_rational::BigRational,
        #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
        budget: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Group-theoretic, cactus and ideal-edge consistency suites.
    Foundations {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(2..=8))]
        n: u8,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum ComplexCommand {
    /// Flag complex of symmetric ideal edges.
    Ideal {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=8))]
        n: u8,
        #[arg(long, value_enum, default_value_t = IdealMode::All)]
        mode: IdealMode,
        /// Character JSON, required for `--mode ascending`.
        #[arg(long)]
        character: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Complex of (ascending) forests of a cactus graph.
    Forest {
        /// Cactus graph JSON.
        graph: PathBuf,
        /// Character JSON; restricts to ascending forests.
        #[arg(long)]
        character: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IdealMode {
    All,
    Ascending,
    /// Ascending for a positive character.
    Positive,
}

fn parse_epsilon(s: &str) -> Result<num_rational::BigRational, String> {
    verify::parse_rational(s).ok_or_else(|| format!("expected NUM/DEN, got {s:?}"))
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Rank { .. } | VerifyError::EpsilonTooLarge(_) | VerifyError::NoSamples => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write<T: Serialize>(value: &T, output: &Output) -> Result<(), Failure> {
    let Format::Json = output.format;
    verify::emit(value, output.out.as_deref()).map_err(|e| Failure::Runtime(e.to_string()))
}

fn report(r: VerificationReport, output: &Output) -> Result<bool, Failure> {
    write(&r, output)?;
    let passed = r.cases.iter().filter(|c| c.pass).count();
    eprintln!("{}: {} ({passed}/{} cases)", r.command, if r.pass { "pass" } else { "FAIL" }, r.cases.len());
    for c in r.failed_cases() {
        eprintln!("  failed: {}", c.claim);
    }
    Ok(r.pass)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify(v) => match v {
            VerifyCommand::Prop47 { n, budget, output } => report(verify::verify_prop47(n as usize, budget)?, &output),
            VerifyCommand::ThmN3 { mode, samples, seed, output } => {
                let mode = match mode {
                    ModeArg::Exhaustive => Mode::Exhaustive,
                    ModeArg::Random => Mode::Random,
                };
                report(verify::verify_thm_n3(mode, samples, seed)?, &output)
            }
            VerifyCommand::Remark48 { epsilon, budget, output } => {
                report(verify::verify_remark48(&epsilon, budget)?, &output)
            }
            VerifyCommand::Foundations { n, samples, seed, output } => {
                report(verify::verify_foundations(FoundationParams::new(n as usize, samples, seed))?, &output)
            }
        },
        Command::Complex(ComplexCommand::Ideal { n, mode, character, output }) => {
            let n = n as usize;
            let chi = match (&character, mode) {
                (Some(p), IdealMode::Ascending) => Some(read_json::<Character>(p)?),
                (None, IdealMode::Ascending) => return Err(Failure::Usage("--mode ascending needs --character".into())),
                (Some(_), _) => return Err(Failure::Usage("--character only applies to --mode ascending".into())),
                (None, _) => None,
            };
            if chi.as_ref().is_some_and(|c| c.rank() != n) {
                return Err(Failure::Usage(format!("character rank does not match --n {n}")));
            }
            let full = PositiveSubset::full(n).map_err(|e| Failure::Usage(e.to_string()))?;
            let filter = match (mode, &chi) {
                (IdealMode::All, _) => Filter::All,
                (IdealMode::Ascending, Some(c)) => Filter::Ascending(c),
                _ => Filter::PositiveRestricted(&full),
            };
            let c = build_complex(n, filter).map_err(|e| Failure::Runtime(e.to_string()))?;
            let labels: Vec<String> = c.edges.iter().map(|e| e.to_string()).collect();
            write(&with_labels(&c.complex, json!({"edges": c.edges, "names": labels})), &output)?;
            Ok(true)
        }
        Command::Complex(ComplexCommand::Forest { graph, character, output }) => {
            let g: CactusGraph = read_json(&graph)?;
            let complex = match character {
                Some(p) => {
                    let chi: Character = read_json(&p)?;
                    ascending_forest_complex(&g, &chi).map_err(|e| Failure::Usage(e.to_string()))?
                }
                None => forest_complex(&g),
            };
            write(&with_labels(&complex, json!({"edges": g.non_loop_edges()})), &output)?;
            Ok(true)
        }
        Command::Homology { file, budget, output } => {
            let c: SimplicialComplex = read_json(&file)?;
            let h = c.reduced_homology_with_budget(budget).map_err(|e| Failure::Runtime(e.to_string()))?;
            let ok = h.euler_consistent();
            write(&h, &output)?;
            eprintln!("{}", h.summary());
            Ok(ok)
        }
    }
}

/// Complex JSON with an extra `labels` field describing the vertices.
fn with_labels(c: &SimplicialComplex, labels: serde_json::Value) -> serde_json::Value {
    let mut v = serde_json::to_value(c).expect("complex serializes");
    v["labels"] = labels;
    v
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
