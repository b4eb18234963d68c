//! Batch front end: enumeration, lattice statistics, Hasse diagrams,
//! geometric constructions and strength verification.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible or guard exceeded,
//! 3 verification failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use oa_lattice::oa::oa_from_spread;
use oa_lattice::params::count_parameter_sets;
use oa_lattice::spread::{
    dual_atoms_64, greedy_realize, large_factor, rao_hamming, rs_nine_planes, table4_planes,
    table5_planes, GreedyOutcome, DEFAULT_BUDGET,
};
use oa_lattice::{
    build_lattice, degrees_of_freedom, enumerate_parameter_sets, satisfies_conditions, BuildMode,
    Error, Factor, FixtureSet, Lattice, MixedSpread, OrthogonalArray, ParameterSet,
};
use serde::Serialize;

/// Lattices with more nodes than this are only counted, never built.
const NODE_GUARD: u64 = 200_000;

#[derive(Parser)]
#[command(
    name = "oa-lattice",
    version,
    about = "Parameter-set lattices of orthogonal arrays"
)]
struct Cli {
    /// Worker threads for parallel steps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every parameter set with N runs meeting the necessary conditions.
    Enumerate {
        runs: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Node count, dual atoms, height and (with fixtures) the threshold B, as JSON.
    Stats {
        runs: u64,
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Count nodes without building the order.
        #[arg(long)]
        count_only: bool,
    },
    /// Graphviz rendering of the Hasse diagram.
    Dot {
        runs: u64,
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a geometric array from a parameter set such as "64: 8^9" or a
    /// named construction: rs9, table4, table5, rao-hamming:P:N,
    /// large-factor:P:B:A.
    Construct {
        target: String,
        /// Array file (default: stdout; "-" for stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Spread dump file ("-" for stdout).
        #[arg(long)]
        spread: Option<PathBuf>,
        /// Fixture directory used to reject sets known not to exist.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Placement budget of the greedy search.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check that an array file has strength T, reporting the first
    /// unbalanced column subset (1-based).
    Verify {
        file: PathBuf,
        #[arg(default_value_t = 2)]
        strength: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Idealized,
    Fixture,
    Overlay,
}

#[derive(clap::Args)]
struct LatticeArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Idealized)]
    mode: ModeArg,
    /// Fixture directory (default: $OA_LATTICE_DATA, else the bundled data).
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

enum Failure {
    Usage(anyhow::Error),
    Infeasible(anyhow::Error),
    /// Report already printed.
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let infeasible = e.chain().any(|cause| {
            matches!(
                cause.downcast_ref::<Error>(),
                Some(
                    Error::GuardExceeded(_)
                        | Error::MissingFixture(_)
                        | Error::InconsistentFixture { .. }
                        | Error::RealizabilityUnknown
                        | Error::NotPrime(_)
                        | Error::NotPrimePower(_)
                        | Error::FieldTooLarge(_)
                        | Error::LevelNotPowerOfPrime { .. }
                        | Error::InvalidParameterSet(_)
                        | Error::Overflow(_)
                )
            )
        });
        if infeasible {
            Failure::Infeasible(e)
        } else {
            Failure::Usage(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Enumerate { runs, format } => enumerate(runs, format),
        Command::Stats {
            runs,
            lattice,
            count_only,
        } => stats(runs, &lattice, count_only),
        Command::Dot { runs, lattice, out } => dot(runs, &lattice, out.as_deref()),
        Command::Construct {
            target,
            out,
            spread,
            fixtures,
            budget,
        } => construct(
            &target,
            out.as_deref(),
            spread.as_deref(),
            fixtures.as_deref(),
            budget,
        ),
        Command::Verify { file, strength } => verify(&file, strength),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}

/// Writes to `path`, or stdout for `None` and `-`.
fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string(value)? + "\n")
}

#[derive(Serialize)]
struct Listing {
    runs: u64,
    count: usize,
    sets: Vec<ListedSet>,
}

#[derive(Serialize)]
struct ListedSet {
    parameter_set: String,
    factors: Vec<Factor>,
    dof: u128,
}

fn enumerate(runs: u64, format: Format) -> Outcome {
    guard_size(runs)?;
    let sets = enumerate_parameter_sets(runs)?;
    let text = match format {
        Format::Text => sets
            .iter()
            .map(|ps| format!("{ps}\t{}\n", degrees_of_freedom(ps)))
            .collect(),
        Format::Json => json_line(&Listing {
            runs,
            count: sets.len(),
            sets: sets
                .iter()
                .map(|ps| ListedSet {
                    parameter_set: ps.to_string(),
                    factors: ps.factors().to_vec(),
                    dof: degrees_of_freedom(ps),
                })
                .collect(),
        })?,
    };
    Ok(emit(None, &text)?)
}

fn guard_size(runs: u64) -> Result<(), Failure> {
    let nodes = count_parameter_sets(runs)?;
    if nodes > NODE_GUARD {
        return Err(Failure::Infeasible(anyhow!(
            "{nodes} parameter sets for N = {runs} exceed the guard of {NODE_GUARD}; use stats --count-only"
        )));
    }
    Ok(())
}

fn load_lattice(runs: u64, args: &LatticeArgs) -> Result<Lattice, Failure> {
    guard_size(runs)?;
    if args.mode == ModeArg::Idealized {
        if args.fixtures.is_some() {
            return Err(Failure::Usage(anyhow!(
                "--fixtures needs --mode fixture or overlay"
            )));
        }
        return Ok(build_lattice(runs, BuildMode::Idealized)?);
    }
    let fixtures = FixtureSet::locate(args.fixtures.as_deref())?;
    let mode = match args.mode {
        ModeArg::Fixture => BuildMode::Fixture(&fixtures),
        _ => BuildMode::Overlay(&fixtures),
    };
    Ok(build_lattice(runs, mode)?)
}

#[derive(Serialize)]
struct Count {
    runs: u64,
    mode: &'static str,
    nodes: u64,
}

fn stats(runs: u64, args: &LatticeArgs, count_only: bool) -> Outcome {
    if count_only {
        if args.mode != ModeArg::Idealized || args.fixtures.is_some() {
            return Err(Failure::Usage(anyhow!(
                "--count-only applies to the idealized lattice only"
            )));
        }
        let nodes = count_parameter_sets(runs)?;
        return Ok(emit(
            None,
            &json_line(&Count {
                runs,
                mode: "idealized",
                nodes,
            })?,
        )?);
    }
    let lattice = load_lattice(runs, args)?;
    Ok(emit(None, &json_line(&lattice.stats())?)?)
}

fn dot(runs: u64, args: &LatticeArgs, out: Option<&Path>) -> Outcome {
    let lattice = load_lattice(runs, args)?;
    Ok(emit(out, &lattice.to_dot())?)
}

#[derive(Serialize)]
struct ConstructFailure {
    target: String,
    realized: bool,
    reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<SearchReport>,
}

#[derive(Serialize)]
struct SearchReport {
    member: usize,
    dimension: usize,
    placed: usize,
    placements: u64,
    budget_exhausted: bool,
}

fn named_spread(name: &str) -> Result<MixedSpread, Failure> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| -> Result<u64, Failure> {
        s.parse()
            .map_err(|_| Failure::Usage(anyhow!("bad number {s:?} in {name:?}")))
    };
    let spread = match parts[..] {
        ["rs9"] => rs_nine_planes()?,
        ["table4"] => MixedSpread::new(2, 6, table4_planes()?, 2)?,
        ["table5"] => table5_planes()?,
        ["rao-hamming", p, n] => rao_hamming(num(p)?, num(n)? as usize)?,
        ["large-factor", p, b, a] => large_factor(num(p)?, num(b)? as usize, num(a)? as usize)?,
        _ => return Err(Failure::Usage(anyhow!("unknown construction {name:?}"))),
    };
    Ok(spread)
}

/// Prints the failure report as JSON on stdout.
fn refuse(report: ConstructFailure) -> Failure {
    match json_line(&report).and_then(|text| emit(None, &text)) {
        Ok(()) => Failure::Infeasible(anyhow!(report.reason)),
        Err(e) => Failure::Usage(e),
    }
}

fn spread_for_set(
    ps: &ParameterSet,
    fixtures: Option<&Path>,
    budget: u64,
) -> Result<MixedSpread, Failure> {
    let target = ps.to_string();
    let fail = |reason: String, search: Option<SearchReport>| {
        refuse(ConstructFailure {
            target: target.clone(),
            realized: false,
            reason,
            search,
        })
    };
    if !satisfies_conditions(ps) {
        return Err(fail(
            "the set violates the necessary existence conditions".into(),
            None,
        ));
    }
    let fixtures = FixtureSet::locate(fixtures)?;
    if fixtures.get(ps.runs()).is_some() {
        let truth = build_lattice(ps.runs(), BuildMode::Fixture(&fixtures))?;
        if !truth.contains(ps) {
            return Err(fail(
                "no orthogonal array exists with this parameter set, per the realizability fixture"
                    .into(),
                None,
            ));
        }
    }
    if ps.runs() == 64 {
        if let Some((_, s)) = dual_atoms_64()?.into_iter().find(|(d, _)| d == ps) {
            return Ok(s);
        }
    }
    match greedy_realize(ps, budget) {
        Ok(GreedyOutcome::Realized(s)) => Ok(s),
        Ok(GreedyOutcome::Failed(f)) => Err(fail(
            format!(
                "greedy search could not place member {} of dimension {}",
                f.member + 1,
                f.dimension
            ),
            Some(SearchReport {
                member: f.member + 1,
                dimension: f.dimension,
                placed: f.placed,
                placements: f.placements,
                budget_exhausted: f.budget_exhausted,
            }),
        )),
        Err(e @ (Error::NotPrimePower(_) | Error::FieldTooLarge(_))) => {
            Err(fail(format!("no geometric construction: {e}"), None))
        }
        Err(e) => Err(e.into()),
    }
}

fn construct(
    target: &str,
    out: Option<&Path>,
    spread_out: Option<&Path>,
    fixtures: Option<&Path>,
    budget: u64,
) -> Outcome {
    let named = target.starts_with(|c: char| c.is_ascii_alphabetic());
    let spread = if named {
        named_spread(target)?
    } else {
        let ps: ParameterSet = target
            .parse()
            .map_err(|e: Error| Failure::Usage(e.into()))?;
        spread_for_set(&ps, fixtures, budget)?
    };
    let oa = oa_from_spread(&spread)?;
    if let Some(path) = spread_out {
        emit(Some(path), &spread.to_dump())?;
    }
    let to_stdout = |p: Option<&Path>| p.is_none_or(|p| p == Path::new("-"));
    // a dump already on stdout is not followed by the array
    if !(spread_out.is_some_and(|p| to_stdout(Some(p))) && out.is_none()) {
        emit(out, &oa.to_text())?;
    }
    eprintln!(
        "{} from {} members, strength {}",
        oa.parameter_set()?,
        spread.len(),
        spread.strength()
    );
    Ok(())
}

#[derive(Serialize)]
struct Verdict {
    runs: usize,
    columns: usize,
    strength: usize,
    pass: bool,
    violating_columns: Option<Vec<usize>>,
}

fn verify(file: &Path, strength: usize) -> Outcome {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let oa = OrthogonalArray::from_text(&text)?;
    let violation = oa.strength_violation(strength)?;
    let verdict = Verdict {
        runs: oa.runs(),
        columns: oa.columns(),
        strength,
        pass: violation.is_none(),
        violating_columns: violation.map(|cols| cols.into_iter().map(|c| c + 1).collect()),
    };
    emit(None, &json_line(&verdict)?)?;
    if verdict.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
