//! `greedylab`: sparse recovery experiments from the command line.
//!
//! Every subcommand takes an optional JSON spec (`--spec file.json`, or
//! `--spec -` for stdin) plus flag overrides; flags win over the document.
//! Exit codes: 0 success/PASS, 1 negative result, 2 usage or validation
//! error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use greedylab::config::{
    Algorithm, EnsembleSpec, ExperimentKind, ExperimentSpec, SignalSpec, ValueDistSpec,
};
use greedylab::{run, LabError, Outcome};

#[derive(Parser)]
#[command(
    name = "greedylab",
    version,
    about = "Greedy sparse recovery: OMP/ROMP runs, isometry certificates, bound audits, phase sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one recovery instance and write its trace
    Recover(CommonArgs),
    /// Compute a restricted isometry constant (exact, or sampled with --trials)
    Rip(CommonArgs),
    /// Compute the coherence of a matrix
    Coherence(CommonArgs),
    /// Audit the recovery-analysis inequalities over seeded trials
    Audit(CommonArgs),
    /// Sweep recovery success rates over an (M, K) grid
    Phase(CommonArgs),
    /// Search for a small matrix on which OMP fails despite a certified constant
    Counterexample(CommonArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Recover(_) => ExperimentKind::Recover,
            Command::Rip(_) => ExperimentKind::Rip,
            Command::Coherence(_) => ExperimentKind::Coherence,
            Command::Audit(_) => ExperimentKind::Audit,
            Command::Phase(_) => ExperimentKind::Phase,
            Command::Counterexample(_) => ExperimentKind::Counterexample,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Recover(a)
            | Command::Rip(a)
            | Command::Coherence(a)
            | Command::Audit(a)
            | Command::Phase(a)
            | Command::Counterexample(a) => a,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Bernoulli,
    IdentityPerturbed,
    /// Entries from the file given with --matrix
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Gaussian,
    UnitSigns,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Omp,
    Romp,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment spec; "-" reads stdin
    #[arg(long)]
    spec: Option<String>,
    /// Seed for all randomness (required somewhere: flag or spec)
    #[arg(long)]
    seed: Option<u64>,
    /// Measurement count (rows)
    #[arg(long)]
    m: Option<usize>,
    /// Signal dimension (columns)
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity level / isometry order
    #[arg(long)]
    k: Option<usize>,
    /// Trial count (audit, phase, sampled rip)
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated measurement counts for phase sweeps
    #[arg(long, value_delimiter = ',')]
    m_range: Option<Vec<usize>>,
    /// Comma-separated sparsity levels for phase sweeps
    #[arg(long, value_delimiter = ',')]
    k_range: Option<Vec<usize>>,
    /// Matrix ensemble
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleArg>,
    /// Perturbation size for the identity-perturbed ensemble
    #[arg(long)]
    eps: Option<f64>,
    /// CSV file with explicit matrix entries (implies --ensemble explicit)
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// JSON file with an explicit signal
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Value distribution for generated sparse signals
    #[arg(long, value_enum)]
    dist: Option<DistArg>,
    /// Decay ratio for generated decaying signals
    #[arg(long)]
    alpha: Option<f64>,
    /// Recovery algorithm
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,
    /// Output path (machine-readable document; default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export the resolved matrix as CSV (recover, rip, coherence)
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Candidate budget (counterexample) or enumeration budget (rip)
    #[arg(long)]
    budget: Option<u64>,
    /// Certificate ceiling for the counterexample search
    #[arg(long)]
    delta_ceiling: Option<f64>,
    /// Audit only: replace exact isometry constants with a fixed value
    #[arg(long)]
    delta_override: Option<f64>,
    /// Comma-separated audit suites (default: all)
    #[arg(long, value_delimiter = ',')]
    lemmas: Option<Vec<String>>,
    /// Iteration cap override
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Relative residual stopping tolerance override
    #[arg(long)]
    residual_tol: Option<f64>,
}

fn load_spec(args: &CommonArgs) -> Result<ExperimentSpec, LabError> {
    match &args.spec {
        None => Ok(ExperimentSpec::default()),
        Some(path) if path == "-" => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).map_err(|e| LabError::Io {
                path: PathBuf::from("<stdin>"),
                source: e,
            })?;
            ExperimentSpec::from_json(&text)
        }
        Some(path) => {
            let path = PathBuf::from(path);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| LabError::Io { path: path.clone(), source: e })?;
            ExperimentSpec::from_json(&text)
        }
    }
}

fn apply_overrides(spec: &mut ExperimentSpec, args: &CommonArgs) -> Result<(), LabError> {
    macro_rules! replace {
        ($($field:ident),*) => {
            $(if args.$field.is_some() { spec.$field = args.$field.clone(); })*
        };
    }
    replace!(
        seed,
        m,
        n,
        k,
        trials,
        m_range,
        k_range,
        budget,
        delta_ceiling,
        delta_override,
        lemmas,
        max_iterations,
        residual_tol
    );
    if args.out.is_some() {
        spec.output = args.out.clone();
    }
    if args.dump_matrix.is_some() {
        spec.dump_matrix = args.dump_matrix.clone();
    }
    if let Some(algorithm) = args.algorithm {
        spec.algorithm = Some(match algorithm {
            AlgorithmArg::Omp => Algorithm::Omp,
            AlgorithmArg::Romp => Algorithm::Romp,
        });
    }
    match (args.ensemble, &args.matrix) {
        (Some(EnsembleArg::Explicit) | None, Some(path)) => {
            spec.ensemble = Some(EnsembleSpec::Explicit { path: path.clone() });
        }
        (Some(EnsembleArg::Explicit), None) => {
            return Err(LabError::Invalid {
                field: "ensemble",
                message: "explicit ensemble needs --matrix".into(),
            });
        }
        (Some(EnsembleArg::Gaussian), None) => spec.ensemble = Some(EnsembleSpec::Gaussian),
        (Some(EnsembleArg::Bernoulli), None) => spec.ensemble = Some(EnsembleSpec::Bernoulli),
        (Some(EnsembleArg::IdentityPerturbed), None) => {
            let prior_eps = match spec.ensemble {
                Some(EnsembleSpec::IdentityPerturbed { eps }) => eps,
                _ => 0.0,
            };
            spec.ensemble =
                Some(EnsembleSpec::IdentityPerturbed { eps: args.eps.unwrap_or(prior_eps) });
        }
        (Some(_), Some(_)) => {
            return Err(LabError::Invalid {
                field: "ensemble",
                message: "--matrix conflicts with a non-explicit --ensemble".into(),
            });
        }
        (None, None) => {
            // --eps alone adjusts an identity-perturbed spec.
            if let (Some(eps), Some(EnsembleSpec::IdentityPerturbed { .. })) =
                (args.eps, &spec.ensemble)
            {
                spec.ensemble = Some(EnsembleSpec::IdentityPerturbed { eps });
            }
        }
    }
    if let Some(path) = &args.signal {
        spec.signal = Some(SignalSpec::File { path: path.clone() });
    } else if let Some(alpha) = args.alpha {
        spec.signal = Some(SignalSpec::Decaying { alpha });
    } else if let Some(dist) = args.dist {
        spec.signal = Some(SignalSpec::Sparse {
            dist: match dist {
                DistArg::Gaussian => ValueDistSpec::Gaussian,
                DistArg::UnitSigns => ValueDistSpec::UnitSigns,
            },
        });
    }
    Ok(())
}

fn run_cli(cli: &Cli) -> Result<Outcome, LabError> {
    let kind = cli.command.kind();
    let args = cli.command.args();
    let mut spec = load_spec(args)?;
    if let Some(declared) = spec.kind {
        if declared != kind {
            return Err(LabError::Invalid {
                field: "kind",
                message: format!(
                    "spec says `{}` but the subcommand is `{}`",
                    declared.name(),
                    kind.name()
                ),
            });
        }
    }
    spec.kind = Some(kind);
    apply_overrides(&mut spec, args)?;
    run(&spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
