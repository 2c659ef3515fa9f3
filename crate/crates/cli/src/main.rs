mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ltbe_core::{
    behaviour, bisimilarity_with, check_monad_consistency, check_semiring_laws, common_trace, oracle_common_capped,
    oracle_matrix_capped, parse_spec, parse_system, FixpointOptions, FixpointReport, SemiringKind, SemiringValue,
    SpecSystem, System, DEFAULT_ENUM_CAP,
};

use output::{render, Footer, Format};

const EXIT_INPUT: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "ltbe", version, about = "Linear-time behaviour of branching coalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear-time behaviour of a system against a specification.
    Behaviour {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        fix: FixArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bisimilarity between two boolean systems.
    Bisim {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Common maximal traces of two systems.
    Common {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        fix: FixArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bounded-depth brute-force values, for behaviour (--system/--spec) or
    /// common traces (--a/--b).
    Oracle {
        #[arg(long, requires = "spec", conflicts_with_all = ["a", "b"])]
        system: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the semiring laws and the branching-monad consistency laws.
    CheckLaws {
        /// Defaults to all three kinds.
        #[arg(long)]
        kind: Option<SemiringKind>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest carrier size for the monad consistency check (at most 4).
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FixArgs {
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Stop once every entry is strictly below this value.
    #[arg(long)]
    threshold: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Io(String),
}

impl From<ltbe_core::Error> for Failure {
    fn from(e: ltbe_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<System, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SpecSystem, Failure> {
    parse_spec(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn enum_cap() -> Result<usize, Failure> {
    match std::env::var("LTBE_ENUM_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("LTBE_ENUM_CAP: `{v}` is not a count"))),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn options(kind: SemiringKind, fix: &FixArgs) -> Result<FixpointOptions, Failure> {
    let mut opts = FixpointOptions { max_iterations: fix.max_iter, enum_cap: enum_cap()?, ..Default::default() };
    if let Some(tol) = fix.tol {
        opts.tolerance = tol;
    }
    if let Some(t) = &fix.threshold {
        opts.threshold = Some(SemiringValue::parse(kind, t)?);
    }
    Ok(opts)
}

fn report(result: ltbe_core::Result<FixpointReport>, out: &OutArgs) -> Outcome {
    let r = result?;
    emit(&render(out.format, &r.result, Some(&Footer::from(&r)), &[]), out.out.as_deref())?;
    Ok(if r.converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Behaviour { system, spec, fix, out } => {
            let sys = load_system(&system)?;
            let spec = load_spec(&spec)?;
            let opts = options(sys.kind(), &fix)?;
            report(behaviour(&sys, &spec, &opts), &out)
        }
        Command::Bisim { a, b, max_iter, out } => {
            let (a, b) = (load_system(&a)?, load_system(&b)?);
            let opts = FixpointOptions { max_iterations: max_iter, enum_cap: enum_cap()?, ..Default::default() };
            report(bisimilarity_with(&a, &b, &opts), &out)
        }
        Command::Common { a, b, fix, out } => {
            let (a, b) = (load_system(&a)?, load_system(&b)?);
            let opts = options(a.kind(), &fix)?;
            report(common_trace(&a, &b, &opts), &out)
        }
        Command::Oracle { system, spec, a, b, depth, out } => {
            let cap = enum_cap()?;
            let rel = match (system, spec, a, b) {
                (Some(system), Some(spec), None, None) => {
                    oracle_matrix_capped(&load_system(&system)?, &load_spec(&spec)?, depth, cap)?
                }
                (None, None, Some(a), Some(b)) => oracle_common_capped(&load_system(&a)?, &load_system(&b)?, depth, cap)?,
                _ => return Err(Failure::Input("oracle needs either --system and --spec, or --a and --b".into())),
            };
            emit(&render(out.format, &rel, None, &[("depth", depth.into())]), out.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckLaws { kind, samples, seed, size, out } => {
            let kinds = kind.map_or(SemiringKind::ALL.to_vec(), |k| vec![k]);
            let mut text = String::new();
            let mut ok = true;
            for k in kinds {
                for r in [check_semiring_laws(k, samples, seed), check_monad_consistency(k, size)] {
                    ok &= r.all_passed();
                    text.push_str(&r.to_string());
                }
            }
            emit(&text, out.as_deref())?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_INPUT) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
