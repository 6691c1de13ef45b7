//! The `spectra` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectra_core::model::disjoint_union;
use spectra_core::resolution::enumerate_resolutions;
use spectra_core::spectrum::{
    check_consistency, evaluate_all, observed_implications, random_pair, search_witness, ClassConstraint, GenConfig,
    SpectrumExpectation,
};
use spectra_core::testing::{TestBounds, TestFamily};
use spectra_core::{Budget, EquivalenceId, Nplts, Options, SchedulerMode, StateId};

use crate::corpus::{check_witness, family_for, parse_bounds, parse_witness, witness_files, write_witness, Check, WitnessFile};
use crate::dot::{model_dot, resolutions_dot, spectrum_dot};
use crate::format::{parse_model, parse_test, FormatError};
use crate::report::{render_evaluation, render_verdict};

/// Exit codes.
pub const EQUIVALENT: i32 = 0;
pub const DISTINGUISHED: i32 = 1;
pub const INPUT_ERROR: i32 = 2;
pub const BUDGET_EXHAUSTED: i32 = 3;

/// Environment variable overriding the resolution budget.
pub const BUDGET_VAR: &str = "SPECTRA_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "spectra", version, about = "Exact behavioral equivalence checking for probabilistic transition systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one equivalence between two states.
    Check {
        #[command(flatten)]
        pair: PairArgs,
        /// Equivalence identifier, e.g. `ptr`, `pf-dis`, `pte-tbt`, `pb`.
        #[arg(long)]
        equiv: String,
    },
    /// Decide all equivalences and check them against the expected spectrum.
    Compare {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Search random pairs separating two equivalences.
    Search {
        #[arg(long)]
        finer: String,
        #[arg(long)]
        coarser: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of candidate pairs to try.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[command(flatten)]
        gen: GenArgs,
        /// Write the witness file here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the class of a model.
    Classify {
        #[arg(long)]
        model: PathBuf,
    },
    /// Re-verify every witness file of a directory.
    Corpus {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Graphviz output.
    Dot {
        #[command(subcommand)]
        what: DotCommand,
    },
}

#[derive(Subcommand, Debug)]
enum DotCommand {
    /// The model's transition graph.
    Model {
        #[arg(long)]
        model: PathBuf,
    },
    /// The resolutions of one state.
    Resolutions {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 64)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = Mode::Tree)]
        mode: Mode,
    },
    /// Implications observed on random pairs.
    Spectrum {
        #[arg(long, default_value_t = 200)]
        pairs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        gen: GenArgs,
        /// Draw the expected edges instead of observed ones.
        #[arg(long)]
        expected: bool,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Model file containing the left state (and the right one, unless
    /// `--right-model` is given).
    #[arg(long)]
    model: PathBuf,
    /// Separate model file for the right state.
    #[arg(long)]
    right_model: Option<PathBuf>,
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    /// Test files used by the testing equivalences.
    #[arg(long, num_args = 1.., conflicts_with = "gen_tests")]
    tests: Vec<PathBuf>,
    /// Generate tests: `depth=D,branching=B,transitions=K,grid=P,P,...`.
    #[arg(long)]
    gen_tests: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Tree)]
    mode: Mode,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Most states per generated model.
    #[arg(long, default_value_t = 5)]
    states: usize,
    /// Most transitions per state.
    #[arg(long, default_value_t = 2)]
    out_degree: usize,
    /// Most target states per distribution.
    #[arg(long, default_value_t = 2)]
    support: usize,
    /// Comma-separated actions.
    #[arg(long, default_value = "a,b")]
    alphabet: String,
    #[arg(long, value_enum, default_value_t = Class::Any)]
    class: Class,
    #[arg(long)]
    gen_tests: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Tree,
    Memoryless,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Class {
    Any,
    Fnd,
    Fpr,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(spectra_core::Error),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(e) => e.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<spectra_core::Error> for Failure {
    fn from(e: spectra_core::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e)
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Nplts, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Resolution budget, possibly overridden by the environment.
fn budget(env: Option<&str>) -> Result<Budget, Failure> {
    let b = Budget::default();
    match env {
        None => Ok(b),
        Some(v) => v
            .trim()
            .parse::<u64>()
            .map(|n| b.with_resolutions(n))
            .map_err(|_| Failure::Input(format!("{BUDGET_VAR} must be a positive integer, found `{v}`"))),
    }
}

fn mode(m: Mode) -> SchedulerMode {
    match m {
        Mode::Tree => SchedulerMode::Tree,
        Mode::Memoryless => SchedulerMode::Memoryless,
    }
}

fn equivalence(s: &str) -> Result<EquivalenceId, Failure> {
    s.parse().map_err(|e: spectra_core::spectrum::UnknownEquivalence| Failure::Input(e.to_string()))
}

struct Pair {
    model: Nplts,
    left: StateId,
    right: StateId,
    name: String,
}

fn load_pair(args: &PairArgs) -> Result<Pair, Failure> {
    let m1 = load_model(&args.model)?;
    match &args.right_model {
        None => Ok(Pair {
            left: m1.state(&args.left)?,
            right: m1.state(&args.right)?,
            name: format!("{}-vs-{}", args.left, args.right),
            model: m1,
        }),
        Some(path) => {
            let m2 = load_model(path)?;
            let (l, r) = (m1.state(&args.left)?, m2.state(&args.right)?);
            let (model, offset) = disjoint_union(&m1, &m2);
            Ok(Pair { model, left: l, right: StateId(r.0 + offset), name: format!("{}-vs-{}", args.left, args.right) })
        }
    }
}

fn family(args: &PairArgs, pair: &Pair, budget: &Budget) -> Result<TestFamily, Failure> {
    if !args.tests.is_empty() {
        let mut tests = Vec::new();
        for path in &args.tests {
            tests.push(parse_test(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?);
        }
        let names: Vec<String> = args.tests.iter().map(|p| p.display().to_string()).collect();
        return Ok(TestFamily::new(tests, format!("files {}", names.join(",")))?);
    }
    let bounds = match &args.gen_tests {
        Some(spec) => parse_bounds(spec).map_err(Failure::Input)?,
        None => TestBounds::default(),
    };
    Ok(family_for(&pair.model, pair.left, pair.right, &bounds, budget)?)
}

fn gen_config(g: &GenArgs, seed: u64) -> GenConfig {
    GenConfig {
        states: g.states,
        max_out_degree: g.out_degree,
        max_support: g.support,
        alphabet: g.alphabet.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        class: match g.class {
            Class::Any => ClassConstraint::Any,
            Class::Fnd => ClassConstraint::FullyNondeterministic,
            Class::Fpr => ClassConstraint::FullyProbabilistic,
        },
        seed,
        ..GenConfig::default()
    }
}

fn gen_family(g: &GenArgs, budget: &Budget) -> Result<TestFamily, Failure> {
    let bounds = match &g.gen_tests {
        Some(spec) => parse_bounds(spec).map_err(Failure::Input)?,
        None => TestBounds::default(),
    };
    let alphabet = gen_config(g, 0).alphabet;
    Ok(spectra_core::testing::generate_tests(&alphabet, &bounds, budget)?)
}

fn execute(cli: Cli, env_budget: Option<&str>, out: &mut dyn Write) -> Result<i32, Failure> {
    let budget = budget(env_budget)?;
    match cli.command {
        Command::Check { pair: args, equiv } => {
            let id = equivalence(&equiv)?;
            let pair = load_pair(&args)?;
            let opts = Options { mode: mode(args.mode), budget };
            let family = if id.is_family_relative() { Some(family(&args, &pair, &budget)?) } else { None };
            let v = spectra_core::spectrum::decide(id, &pair.model, pair.left, pair.right, family.as_ref(), &opts)?;
            let mut text = String::new();
            render_verdict(&mut text, &pair.model, id, &v, family.as_ref(), &mut 0);
            out.write_all(text.as_bytes())?;
            Ok(if v.is_equivalent() { EQUIVALENT } else { DISTINGUISHED })
        }
        Command::Compare { pair: args } => {
            let pair = load_pair(&args)?;
            let opts = Options { mode: mode(args.mode), budget };
            // a family over budget becomes a per-equivalence error
            let (family, family_error) = match family(&args, &pair, &budget) {
                Ok(f) => (Some(f), None),
                Err(Failure::Budget(err)) => (None, Some(err)),
                Err(e) => return Err(e),
            };
            let mut e = evaluate_all(&pair.model, pair.left, pair.right, family.as_ref(), &opts);
            if let Some(err) = family_error {
                for (id, r) in e.results.iter_mut() {
                    if id.is_family_relative() {
                        *r = Err(err.clone());
                    }
                }
            }
            let violations = check_consistency(&e, &SpectrumExpectation::default());
            out.write_all(render_evaluation(&pair.name, &pair.model, &e, &violations, family.as_ref()).as_bytes())?;
            Ok(if violations.is_empty() { EQUIVALENT } else { DISTINGUISHED })
        }
        Command::Search { finer, coarser, seed, budget: attempts, gen, out: path } => {
            let (finer, coarser) = (equivalence(&finer)?, equivalence(&coarser)?);
            let cfg = gen_config(&gen, seed);
            let opts = Options { budget, ..Options::default() };
            let family = if finer.is_family_relative() || coarser.is_family_relative() {
                Some(gen_family(&gen, &budget)?)
            } else {
                None
            };
            let found = search_witness(finer, coarser, &cfg, attempts, family.as_ref(), &opts)?;
            let m = found.model;
            let w = WitnessFile {
                name: format!("{finer}-over-{coarser}"),
                distinguishing: finer,
                equating: coarser,
                left: m.state_name(found.left).to_string(),
                right: m.state_name(found.right).to_string(),
                tests: gen.gen_tests.as_deref().map(parse_bounds).transpose().map_err(Failure::Input)?,
                notes: vec![format!("derived by search, seed {}", found.seed)],
                model: m,
            };
            let text = write_witness(&w);
            match path {
                Some(p) => std::fs::write(p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EQUIVALENT)
        }
        Command::Classify { model } => {
            let m = load_model(&model)?;
            let c = m.classify();
            writeln!(out, "model {}", m.name())?;
            writeln!(out, "states {}", m.num_states())?;
            writeln!(out, "transitions {}", m.transitions().len())?;
            writeln!(out, "fully-nondeterministic {}", c.fully_nondeterministic)?;
            writeln!(out, "fully-probabilistic {}", c.fully_probabilistic)?;
            writeln!(out, "depth {}", c.depth)?;
            Ok(EQUIVALENT)
        }
        Command::Corpus { dir } => {
            let opts = Options { budget, ..Options::default() };
            let files = witness_files(&dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
            let mut failed = 0;
            for path in &files {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let result = match parse_witness(&read(path)?) {
                    Err(e) => Check::Failed(e.to_string()),
                    Ok(w) => match check_witness(&w, &opts) {
                        Ok(c) => c,
                        Err(e) if e.is_budget() => return Err(e.into()),
                        Err(e) => Check::Failed(e.to_string()),
                    },
                };
                match result {
                    Check::Verified => writeln!(out, "ok {name}")?,
                    Check::Failed(why) => {
                        failed += 1;
                        writeln!(out, "fail {name}: {why}")?;
                    }
                }
            }
            writeln!(out, "corpus {} verified {} failed", files.len() - failed, failed)?;
            Ok(if failed == 0 { EQUIVALENT } else { DISTINGUISHED })
        }
        Command::Dot { what } => {
            let text = match what {
                DotCommand::Model { model } => model_dot(&load_model(&model)?),
                DotCommand::Resolutions { model, state, limit, mode: m } => {
                    let model = load_model(&model)?;
                    let s = model.state(&state)?;
                    let space = enumerate_resolutions(&model, s, mode(m), &budget)?;
                    resolutions_dot(&model, &space, limit)
                }
                DotCommand::Spectrum { pairs, seed, gen, expected } => {
                    if expected {
                        let x = SpectrumExpectation::default();
                        let edges: Vec<_> = x
                            .edges
                            .iter()
                            .filter(|e| e.scope == spectra_core::spectrum::Scope::Any)
                            .map(|e| (e.finer, e.coarser))
                            .collect();
                        spectrum_dot(&edges)
                    } else {
                        let opts = Options { budget, ..Options::default() };
                        let family = gen_family(&gen, &budget)?;
                        let evaluations: Vec<_> = (0..pairs)
                            .map(|i| {
                                let (m, a, b) = random_pair(&gen_config(&gen, seed.wrapping_add(i)));
                                evaluate_all(&m, a, b, Some(&family), &opts)
                            })
                            .collect();
                        spectrum_dot(&observed_implications(&evaluations))
                    }
                }
            };
            out.write_all(text.as_bytes())?;
            Ok(EQUIVALENT)
        }
    }
}

/// Runs the command line with explicit arguments, budget override and
/// output streams; returns the exit code.
pub fn run<I, T>(args: I, env_budget: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { EQUIVALENT };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli, env_budget, out) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            INPUT_ERROR
        }
        Err(Failure::Budget(e)) => {
            let _ = writeln!(err, "budget exhausted: {e}");
            BUDGET_EXHAUSTED
        }
    }
}
