//! `dlseq`: decides validity, consistency, subsumption and instance queries
//! by backward proof search, printing proofs or counter-models.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dlsequent::calculus::{Calculus, Definitions};
use dlsequent::countermodel::{extract_model, find_countermodel, Interpretation};
use dlsequent::prover::{prove_with_stats, Budget, SearchOutcome, SearchStats};
use dlsequent::syntax::{Formula, KnowledgeBase, LanguageProfile, Parser, Sequent};

#[derive(ClapParser, Debug)]
#[command(name = "dlseq", version, about = "Sequent-calculus reasoning for description logics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Language profile file; inferred from the input when absent.
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    /// Extra descriptive definitions, one `def` per line.
    #[arg(long, global = true)]
    ddr: Option<PathBuf>,
    /// Maximum number of rule applications.
    #[arg(long, global = true, default_value_t = Budget::default().max_steps)]
    budget: usize,
    /// Cross-check with a brute-force model search up to this domain size.
    #[arg(long, global = true, default_value_t = 0)]
    oracle: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Both)]
    emit: Emit,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide validity of the sequent in a file.
    Prove { sequent_file: PathBuf },
    /// Decide whether a knowledge base has a model.
    Consistent { kb_file: PathBuf },
    /// Decide whether the knowledge base entails `P sub Q`.
    Subsumes { kb_file: PathBuf, p: String, q: String },
    /// Decide whether the knowledge base entails `a:P`.
    Instance { kb_file: PathBuf, a: String, p: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Proof,
    Model,
    Both,
}

impl Emit {
    fn proof(self) -> bool {
        self != Emit::Model
    }

    fn model(self) -> bool {
        self != Emit::Proof
    }
}

const EXIT_PROVED: u8 = 0;
const EXIT_COUNTERMODEL: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

/// A task reduced to a single sequent.
struct Task {
    name: &'static str,
    sequent: Sequent,
    /// Verdict words for the proved and saturated outcomes.
    verdicts: (&'static str, &'static str),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))
}

fn parse_text<T>(text: &str, what: &str, item: impl FnOnce(&mut Parser) -> Result<T, dlsequent::syntax::SyntaxError>) -> Result<T> {
    let mut p = Parser::new(text).with_context(|| format!("invalid {what} `{text}`"))?;
    let out = item(&mut p).with_context(|| format!("invalid {what} `{text}`"))?;
    p.expect_end().with_context(|| format!("invalid {what} `{text}`"))?;
    Ok(out)
}

fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    KnowledgeBase::parse_unchecked(&read(path)?).with_context(|| format!("in `{}`", path.display()))
}

fn task(command: &Command) -> Result<Task> {
    Ok(match command {
        Command::Prove { sequent_file } => {
            let text = read(sequent_file)?;
            let sequent = parse_text(text.trim(), "sequent", Parser::sequent)
                .with_context(|| format!("in `{}`", sequent_file.display()))?;
            Task { name: "validity", sequent, verdicts: ("proved", "countermodel") }
        }
        Command::Consistent { kb_file } => {
            let kb = load_kb(kb_file)?;
            Task { name: "consistency", sequent: kb.entails([]), verdicts: ("inconsistent", "consistent") }
        }
        Command::Subsumes { kb_file, p, q } => {
            let kb = load_kb(kb_file)?;
            let p = parse_text(p, "concept", Parser::concept)?;
            let q = parse_text(q, "concept", Parser::concept)?;
            Task { name: "subsumption", sequent: kb.entails([Formula::Gci(p, q)]), verdicts: ("entailed", "not entailed") }
        }
        Command::Instance { kb_file, a, p } => {
            let kb = load_kb(kb_file)?;
            let a = parse_text(a, "individual", Parser::individual)?;
            let p = parse_text(p, "concept", Parser::concept)?;
            Task { name: "instance", sequent: kb.entails([Formula::Assert(a, p)]), verdicts: ("entailed", "not entailed") }
        }
    })
}

fn setup(cli: &Cli, sequent: &Sequent) -> Result<(Calculus, Definitions)> {
    let mut defs = Definitions::builtin();
    if let Some(path) = &cli.ddr {
        defs.parse_file(&read(path)?).with_context(|| format!("in `{}`", path.display()))?;
    }
    let profile = match &cli.profile {
        Some(path) => {
            LanguageProfile::parse_file(&read(path)?).with_context(|| format!("in `{}`", path.display()))?
        }
        None => LanguageProfile::infer(sequent.formulas().map(|(_, f)| f)),
    };
    profile.check_sequent(sequent).context("input outside the language profile")?;
    let calc = Calculus::assemble(&profile, &defs).context("cannot assemble the calculus")?;
    Ok((calc, defs))
}

fn stats_json(stats: &SearchStats) -> Value {
    json!({ "steps": stats.steps, "branches": stats.branches, "max_branch_size": stats.max_branch_size })
}

/// Runs the task and renders the report; returns the exit code.
fn run(cli: &Cli) -> Result<(u8, String)> {
    if cli.budget == 0 {
        bail!("--budget must be positive");
    }
    let task = task(&cli.command)?;
    let (calc, defs) = setup(cli, &task.sequent)?;
    let budget = Budget { max_steps: cli.budget, ..Budget::default() };
    let (outcome, stats) = prove_with_stats(&task.sequent, &calc, budget)?;

    let (code, verdict) = match &outcome {
        SearchOutcome::Proved(_) => (EXIT_PROVED, task.verdicts.0),
        SearchOutcome::Saturated(_) => (EXIT_COUNTERMODEL, task.verdicts.1),
        SearchOutcome::BudgetExhausted(_) => (EXIT_UNKNOWN, "unknown"),
    };
    let model: Option<Interpretation> = match &outcome {
        SearchOutcome::Saturated(branch) => Some(extract_model(branch).context("counter-model extraction failed")?),
        _ => None,
    };
    let oracle = if cli.oracle > 0 && !matches!(outcome, SearchOutcome::BudgetExhausted(_)) {
        let found = find_countermodel(&task.sequent, cli.oracle, &defs)?;
        let agrees = found.is_some() == model.is_some() || (found.is_none() && cli.oracle < model_size(&model));
        Some((found, agrees))
    } else {
        None
    };

    let report = match cli.format {
        Format::Json => {
            let mut out = json!({
                "task": task.name,
                "sequent": task.sequent.to_string(),
                "verdict": verdict,
                "stats": stats_json(&stats),
            });
            if let (SearchOutcome::Proved(t), true) = (&outcome, cli.emit.proof()) {
                out["proof"] = t.to_json();
            }
            if let (Some(m), true) = (&model, cli.emit.model()) {
                out["model"] = m.to_json();
            }
            if let Some((found, agrees)) = &oracle {
                out["oracle"] = json!({
                    "max_domain": cli.oracle,
                    "model": found.as_ref().map(Interpretation::to_json),
                    "agrees": agrees,
                });
            }
            format!("{}\n", serde_json::to_string_pretty(&out)?)
        }
        Format::Text => {
            let mut out = format!("task: {}\nsequent: {}\nverdict: {verdict}\n", task.name, task.sequent);
            out += &format!(
                "stats: steps={} branches={} max_branch_size={}\n",
                stats.steps, stats.branches, stats.max_branch_size
            );
            if let (SearchOutcome::Proved(t), true) = (&outcome, cli.emit.proof()) {
                out += "proof:\n";
                out += &t.to_text();
            }
            if let (Some(m), true) = (&model, cli.emit.model()) {
                out += &format!("model: {}\n", m.to_json());
            }
            if let Some((found, agrees)) = &oracle {
                match found {
                    Some(m) => out += &format!("oracle: model within {} elements: {}\n", cli.oracle, m.to_json()),
                    None => out += &format!("oracle: no model within {} elements\n", cli.oracle),
                }
                out += &format!("oracle agrees: {agrees}\n");
            }
            out
        }
    };
    Ok((code, report))
}

fn model_size(model: &Option<Interpretation>) -> u32 {
    model.as_ref().map_or(0, |m| m.domain.len() as u32)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((code, report)) => {
            // A reader that stops early (such as `head`) is not an error.
            let _ = std::io::stdout().lock().write_all(report.as_bytes());
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
