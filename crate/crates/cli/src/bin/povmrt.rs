use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use povmrt_cli::{run_sweep_with, ExperimentConfig, SweepError};
use povmrt_core::discrimination::{canonical_success, posterior_success, witness_search, WitnessSearch};
use povmrt_core::io::{
    self, format_stochastic_csv, EnsembleDocument, PovmDocument, StateDocument,
};
use povmrt_core::order::precedes;
use povmrt_core::povm::validation_report;
use povmrt_core::randgen::{random_ensemble, random_povm, random_projective, random_state, random_stochastic};
use povmrt_core::stochastic::decompose;
use povmrt_core::{Error, MonotoneReport, Povm, RngSeed, StatePovmPair, Tolerances};

/// Post-processing order, monotones and discrimination games for POVMs.
///
/// Tolerances can be overridden through POVMRT_EPS_{HERM,PSD,PROP,COMP,STOCH,FEAS,RANK,PROB,MAJ}.
#[derive(Parser)]
#[command(name = "povmrt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a POVM document and print its positivity and completeness residuals.
    Validate { povm: PathBuf },
    /// Write the canonical representative of a POVM.
    Canon {
        povm: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether the first POVM can be post-processed into the second.
    Compare {
        source: PathBuf,
        target: PathBuf,
        /// Write the mixing matrix here (CSV) instead of printing it.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// If infeasible, search for a discrimination game the target wins and save its ensemble.
        #[arg(long)]
        game: Option<PathBuf>,
        /// Ensemble size for the game search (default: target outcome count).
        #[arg(long)]
        game_size: Option<usize>,
    },
    /// Print the four information-gain monotones.
    Monotones {
        povm: PathBuf,
        /// State document; the maximally mixed state when omitted.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Report the entropic measures in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Print the best success probability on a state-discrimination game.
    Discriminate {
        povm: PathBuf,
        ensemble: PathBuf,
        /// Report outcome i as state i instead of guessing the posterior mode.
        #[arg(long)]
        canonical: bool,
    },
    /// Factor a stochastic matrix into a split followed by a confusion.
    Decompose {
        matrix: PathBuf,
        #[arg(long)]
        confuse_out: Option<PathBuf>,
        #[arg(long)]
        split_out: Option<PathBuf>,
    },
    /// Generate a random object from a seed.
    Gen(GenArgs),
    /// Run property suites from a JSON configuration.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Povm,
    Projective,
    Stochastic,
    State,
    Ensemble,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Outcomes (POVM), rows (stochastic) or states (ensemble).
    #[arg(short, long, default_value_t = 2)]
    n: usize,
    /// Columns of a stochastic matrix.
    #[arg(long, default_value_t = 2)]
    cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pure states for `state` and `ensemble`.
    #[arg(long)]
    pure: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Domain(&'static str, String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.kind(), e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        Failure::Domain(e.kind(), e.to_string())
    }
}

type CliResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Domain(kind, msg)) => {
            eprintln!("ERROR {kind}: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("ERROR usage: {msg}");
            ExitCode::from(2)
        }
    }
}

fn env_tolerances(base: Tolerances) -> Result<Tolerances, Failure> {
    base.from_env().map_err(Failure::Usage)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())).into())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Sweep { config, records, summary } => sweep(&config, records, summary),
        command => {
            let tol = env_tolerances(Tolerances::default())?;
            dispatch(command, &tol)
        }
    }
}

fn dispatch(command: Command, tol: &Tolerances) -> CliResult {
    match command {
        Command::Validate { povm } => validate(&povm, tol),
        Command::Canon { povm, output } => {
            let canonical = io::load_povm(&povm, tol)?.canonicalize(tol);
            emit(&PovmDocument::from_povm(canonical.as_povm(), None).to_json(), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            source,
            target,
            witness,
            game,
            game_size,
        } => compare(&source, &target, witness.as_deref(), game.as_deref(), game_size, tol),
        Command::Monotones { povm, state, bits } => {
            let povm = io::load_povm(&povm, tol)?;
            let pair = match state {
                Some(path) => StatePovmPair::new(io::load_state(&path, tol)?, povm, tol)?,
                None => StatePovmPair::maximally_mixed(povm),
            };
            let mut report = MonotoneReport::compute(&pair, tol)?;
            if bits {
                report = report.in_bits();
            }
            let unit = if bits { "bits" } else { "nats" };
            for (name, value) in report.as_array() {
                match name {
                    "maccone" | "buscemi" => println!("{name} {value} {unit}"),
                    _ => println!("{name} {value}"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Discriminate {
            povm,
            ensemble,
            canonical,
        } => {
            let povm = io::load_povm(&povm, tol)?;
            let ens = io::load_ensemble(&ensemble, tol)?;
            if canonical {
                println!("success {}", canonical_success(&povm, &ens)?);
            } else {
                let game = posterior_success(&povm, &ens, tol)?;
                println!("success {}", game.success);
                println!("max_prior {}", ens.max_prior());
                print!("# decision (rows = guessed state, columns = outcome)\n{}", game.decision);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose {
            matrix,
            confuse_out,
            split_out,
        } => {
            let p = io::load_stochastic(&matrix, tol)?;
            let (c, s) = decompose(&p);
            match (confuse_out, split_out) {
                (Some(cp), Some(sp)) => {
                    io::save_stochastic(&c, &cp)?;
                    io::save_stochastic(&s, &sp)?;
                }
                (None, None) => {
                    print!("# C\n{}# S\n{}", format_stochastic_csv(&c), format_stochastic_csv(&s));
                }
                _ => {
                    return Err(Failure::Usage(
                        "--confuse-out and --split-out must be given together".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(args) => generate(&args),
        Command::Sweep { .. } => unreachable!("handled before tolerances are read"),
    }
}

fn validate(path: &Path, tol: &Tolerances) -> CliResult {
    let doc = PovmDocument::parse(&read(path)?)?;
    let elements = doc.operators(tol)?;
    let report = validation_report(&elements)?;
    println!("dim {}", report.dim);
    println!("outcomes {}", elements.len());
    for (k, (e, min)) in elements.iter().zip(&report.min_eigenvalues).enumerate() {
        println!("element {k} min_eigenvalue {min:e} trace {}", e.trace());
    }
    println!("completeness_residual {:e}", report.completeness_residual);
    Povm::new(elements, tol)?;
    println!("valid");
    Ok(ExitCode::SUCCESS)
}

fn compare(
    source: &Path,
    target: &Path,
    witness: Option<&Path>,
    game: Option<&Path>,
    game_size: Option<usize>,
    tol: &Tolerances,
) -> CliResult {
    let e = io::load_povm(source, tol)?;
    let f = io::load_povm(target, tol)?;
    let verdict = precedes(&e, &f, tol)?;
    println!("{}", if verdict.feasible { "feasible" } else { "infeasible" });
    println!("residual {:e}", verdict.residual);
    println!("pivots {}", verdict.pivots);
    if verdict.marginal {
        println!("marginal residual within a decade of the threshold {:e}", tol.feas);
    }
    if let Some(mix) = &verdict.witness {
        match witness {
            Some(path) => {
                io::save_stochastic(mix, path)?;
                println!("witness {}", path.display());
            }
            None => print!("# witness (rows = target outcomes, columns = source outcomes)\n{mix}"),
        }
    } else if let Some(path) = game {
        let size = game_size.unwrap_or(f.len());
        match witness_search(&e, &f, WitnessSearch::new(size), tol)? {
            Some(w) => {
                io::save_ensemble(&w.ensemble, path)?;
                println!("game {}", path.display());
                println!("success_source {}", w.success_source);
                println!("success_target {}", w.success_target);
                println!("rounds {}", w.rounds);
            }
            None => println!("game none found"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(args: &GenArgs) -> CliResult {
    if args.dim == 0 || args.n == 0 || args.cols == 0 {
        return Err(Failure::Usage("dimensions and counts must be positive".into()));
    }
    let seed = RngSeed(args.seed);
    let text = match args.kind {
        GenKind::Povm => PovmDocument::from_povm(&random_povm(args.dim, args.n, seed)?, None).to_json(),
        GenKind::Projective => PovmDocument::from_povm(&random_projective(args.dim, seed), None).to_json(),
        GenKind::Stochastic => format_stochastic_csv(&random_stochastic(args.n, args.cols, seed)),
        GenKind::State => StateDocument::from_state(&random_state(args.dim, args.pure, seed)).to_json(),
        GenKind::Ensemble => {
            EnsembleDocument::from_ensemble(&random_ensemble(args.dim, args.n, args.pure, seed)).to_json()
        }
    };
    emit(&text, args.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(path: &Path, records: Option<PathBuf>, summary: Option<PathBuf>) -> CliResult {
    let mut config = ExperimentConfig::load(path)?;
    config.tolerances = env_tolerances(config.tolerances)?;
    if let Some(r) = records {
        config.records_path = r;
    }
    if let Some(s) = summary {
        config.summary_path = s;
    }
    let report = run_sweep_with(&config, |s| {
        eprintln!("{:<20} {}/{} passed", s.suite.to_string(), s.passed, s.trials);
    })?;
    print!("{}", report.table());
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
