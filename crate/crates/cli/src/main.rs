use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ppt_core::depgraph::{enumerate_loops, is_tight, DepGraph, DepGraphError};
use ppt_core::transform::{
    completion_entries, loop_entries, program_entries, simplify, Compiled, TransformError,
};
use ppt_core::verifier::{
    lemma_batch, semantics_batch, theorem_batch, verify_correspondence, GenConfig, Mode,
    VerifyError,
};
use ppt_core::{
    atoms_of, enumerate_ts_models, parse_program, Atom, Budget, ModelSet, Program, RuleKind,
    SemanticsError,
};

const EXIT_USAGE: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ppt",
    version,
    about = "Past-present temporal programs over finite traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program and report whether it is tight.
    Check(Common),
    /// Print the temporal stable models of a given length.
    Models {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        engine: Engine,
    },
    /// Print the positive dependency graphs.
    Graph(Common),
    /// Print the loops of the initial and dynamic graphs.
    Loops {
        #[command(flatten)]
        common: Common,
        /// Also count every single atom as a loop.
        #[arg(long)]
        unitary: bool,
    },
    /// Print the temporal completion.
    Complete {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        simplify: bool,
    },
    /// Print the loop formulas.
    Lf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        unitary: bool,
        #[arg(long)]
        simplify: bool,
    },
    /// Print the rules read as LTLf formulas.
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        simplify: bool,
    },
    /// Compare the stable models with the models of a translation.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        engine: Engine,
        #[arg(long, value_enum, default_value_t = ModeArg::Loops)]
        mode: ModeArg,
    },
    /// Run the randomized correspondence, lemma and semantics checks.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Program file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
    /// Extra atoms; must include every atom of the program.
    #[arg(long, value_delimiter = ',')]
    alphabet: Option<Vec<String>>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct Engine {
    /// Trace length.
    #[arg(long)]
    length: usize,
    /// Maximum number of candidate traces. Large values can be very slow.
    #[arg(long, env = "PPT_BUDGET", default_value_t = Budget::DEFAULT.0)]
    budget: u64,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random programs; the lemma and semantics checks run
    /// twenty times as many instances.
    #[arg(long, default_value_t = 100)]
    cases: usize,
    /// Fix the trace length instead of drawing it from 1..=3.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, env = "PPT_BUDGET", default_value_t = Budget::DEFAULT.0)]
    budget: u64,
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Completion,
    Loops,
    Unitary,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Completion => Mode::Completion,
            ModeArg::Loops => Mode::CompletionLoops,
            ModeArg::Unitary => Mode::UnitaryLoops,
        }
    }
}

enum Failure {
    Usage(String),
    Budget(String),
    Mismatch,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Mismatch => EXIT_MISMATCH,
            Failure::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Budget(m) => f.write_str(m),
            Failure::Mismatch => f.write_str("verification mismatch"),
        }
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<DepGraphError> for Failure {
    fn from(e: DepGraphError) -> Self {
        match e {
            DepGraphError::SccTooLarge { .. } => Failure::Budget(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Graph(g) => g.into(),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Semantics(s) => s.into(),
            VerifyError::Transform(t) => t.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(common: &Common) -> Result<Program, Failure> {
    let (name, src) = if common.input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        ("<stdin>", s)
    } else {
        let s = std::fs::read_to_string(&common.input)
            .map_err(|e| Failure::Usage(format!("{}: {e}", common.input)))?;
        (common.input.as_str(), s)
    };
    let p = parse_program(&src).map_err(|e| Failure::Usage(format!("{name}:{e}")))?;
    let Some(names) = &common.alphabet else {
        return Ok(p);
    };
    let alphabet = names
        .iter()
        .map(|n| Atom::new(n.trim()).map_err(|e| Failure::Usage(format!("--alphabet: {e}"))))
        .collect::<Result<BTreeSet<Atom>, _>>()?;
    let missing: Vec<String> = atoms_of(&p)
        .difference(&alphabet)
        .map(|a| a.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Failure::Usage(format!(
            "--alphabet does not cover {}",
            missing.join(", ")
        )));
    }
    Ok(p.with_alphabet(alphabet))
}

fn emit_json(out: &mut impl Write, v: &impl serde::Serialize) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, v).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn emit_formulas(
    out: &mut impl Write,
    mut entries: Vec<Compiled>,
    simplified: bool,
    as_json: bool,
) -> Result<(), Failure> {
    if simplified {
        for c in &mut entries {
            c.formula = simplify(&c.formula);
        }
    }
    if as_json {
        return emit_json(out, &entries);
    }
    for c in &entries {
        writeln!(out, "{}", c.formula)?;
    }
    Ok(())
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Check(common) => {
            let p = load(&common)?;
            let tight = is_tight(&p)?;
            if common.json {
                emit_json(
                    out,
                    &json!({"rules": p.rules().len(), "alphabet": p.alphabet(), "tight": tight}),
                )?;
            } else {
                writeln!(
                    out,
                    "ok: {} rules over {} atoms, {}",
                    p.rules().len(),
                    p.alphabet().len(),
                    if tight { "tight" } else { "not tight" }
                )?;
            }
        }
        Command::Models { common, engine } => {
            let p = load(&common)?;
            let models =
                enumerate_ts_models(&p, engine.length, p.alphabet(), Budget(engine.budget))?;
            emit_json(out, &ModelSet::new(engine.length, models))?;
        }
        Command::Graph(common) => {
            let p = load(&common)?;
            let init = DepGraph::of_section(&p, RuleKind::Initial)?;
            let dynamic = DepGraph::of_section(&p, RuleKind::Dynamic)?;
            if common.json {
                emit_json(out, &json!({"initial": init, "dynamic": dynamic}))?;
            } else {
                write!(out, "{init}{dynamic}")?;
            }
        }
        Command::Loops { common, unitary } => {
            let p = load(&common)?;
            let init = enumerate_loops(&DepGraph::of_section(&p, RuleKind::Initial)?, unitary)?;
            let dynamic = enumerate_loops(&DepGraph::of_section(&p, RuleKind::Dynamic)?, unitary)?;
            if common.json {
                let sets = |ls: &[ppt_core::depgraph::Loop]| -> Vec<BTreeSet<Atom>> {
                    ls.iter().map(|l| l.atoms.clone()).collect()
                };
                emit_json(
                    out,
                    &json!({"initial": sets(&init), "dynamic": sets(&dynamic)}),
                )?;
            } else {
                for l in init.iter().chain(&dynamic) {
                    writeln!(out, "{l}")?;
                }
            }
        }
        Command::Complete { common, simplify } => {
            let p = load(&common)?;
            emit_formulas(out, completion_entries(&p), simplify, common.json)?;
        }
        Command::Lf {
            common,
            unitary,
            simplify,
        } => {
            let p = load(&common)?;
            emit_formulas(out, loop_entries(&p, unitary)?, simplify, common.json)?;
        }
        Command::Embed { common, simplify } => {
            let p = load(&common)?;
            emit_formulas(out, program_entries(&p), simplify, common.json)?;
        }
        Command::Verify {
            common,
            engine,
            mode,
        } => {
            let p = load(&common)?;
            let report =
                verify_correspondence(&p, engine.length, mode.into(), Budget(engine.budget))?;
            emit_json(out, &report)?;
            if !report.equal {
                return Err(Failure::Mismatch);
            }
        }
        Command::Fuzz(args) => fuzz(args, out)?,
    }
    Ok(())
}

fn fuzz(args: FuzzArgs, out: &mut impl Write) -> Result<(), Failure> {
    let mut cfg = GenConfig {
        seed: args.seed,
        ..GenConfig::default()
    };
    if let Some(n) = args.length {
        cfg.lengths = (n, n);
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let instances = args.cases.saturating_mul(20);
    let theorems = theorem_batch(&cfg, args.cases, Budget(args.budget));
    let lemmas = lemma_batch(args.seed, instances);
    let semantics = semantics_batch(args.seed, instances);
    let failed =
        !theorems.passed() || !lemmas.failures.is_empty() || !semantics.failures.is_empty();
    if args.json {
        emit_json(
            out,
            &json!({"theorems": theorems, "lemmas": lemmas, "semantics": semantics}),
        )?;
    } else {
        let n = theorems.cases;
        writeln!(
            out,
            "theorems: {n} programs, loops {}/{n}, unitary {}/{n}, tight completion {}/{}, completion sound {}/{n}",
            theorems.completion_loops_agree,
            theorems.unitary_loops_agree,
            theorems.tight_completion_agree,
            theorems.tight_cases,
            theorems.completion_sound,
        )?;
        let (s, p) = (lemmas.support, lemmas.pastocc);
        writeln!(
            out,
            "lemmas: support {} holds, {} violated, {} skipped; pastocc {} holds, {} violated, {} skipped",
            s.holds, s.violated, s.skipped, p.holds, p.violated, p.skipped
        )?;
        writeln!(
            out,
            "semantics: {} pairs, {} point checks, {} failures",
            semantics.cases,
            semantics.point_checks,
            semantics.failures.len()
        )?;
        for f in theorems
            .failures
            .iter()
            .chain(&lemmas.failures)
            .chain(&semantics.failures)
        {
            writeln!(out, "seed {} failed {}: {}", f.seed, f.check, f.detail)?;
        }
    }
    if failed {
        return Err(Failure::Mismatch);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            if !matches!(e, Failure::Mismatch) {
                eprintln!("ppt: error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
