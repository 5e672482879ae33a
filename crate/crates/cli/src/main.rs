//! `detach`: run the prover, check and measure proofs, and drive multi-run
//! campaigns from the command line.
//!
//! Exit status is 0 on success, 1 when a goal is not reached or a proof is
//! invalid, and 2 for usage, input and parse errors. Output files are written
//! whole or not at all.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use detach::{
    axiom_dependence, block_steps_loop, check_proof, cram, parse_formula, parse_plan, parse_problem, parse_proof,
    print_proof, proof_metrics, run_plan, saturate, saturate_traced, sweep, CampaignError, Dependence, Named, PlanKind,
    ProblemSpec, Proof, ProofDocument, RunReport, SearchResult,
};

#[derive(Parser, Debug)]
#[command(name = "detach", version, about = "Condensed-detachment prover and proof-refinement toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for proofs of the goals of a problem file.
    Prove {
        problem: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the proof here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the search trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print the statistics line on standard error.
        #[arg(long)]
        stats: bool,
        /// Print statistics as one key=value record.
        #[arg(long)]
        machine: bool,
        /// Run a lemma-adjunction plan instead of a single search.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Check a proof against a problem file.
    Check {
        proof: PathBuf,
        #[arg(long)]
        against: PathBuf,
    },
    /// Print length, variable richness, formula complexity and size of a proof.
    Metrics { proof: PathBuf },
    /// Look for a shorter proof by step blocking or cramming.
    Shorten {
        problem: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long, value_enum)]
        mode: ShortenMode,
        #[command(flatten)]
        campaign: CampaignArgs,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the per-run report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run one search per combination of the parameter values in a grid file.
    Sweep {
        problem: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Given-clause limit per run; defaults to the grid file's budget, then `max_given`.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extend a proof of one goal into a proof of all goals.
    Cram {
        problem: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[command(flatten)]
        campaign: CampaignArgs,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Try to derive each axiom and goal of a problem from the others.
    Dependence {
        problem: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShortenMode {
    Block,
    Cram,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    /// Given-clause limit per run; defaults to `max_given`.
    #[arg(long)]
    budget: Option<u64>,
    /// Value assigned to resonators taken from the reference proof.
    #[arg(long, default_value_t = 2)]
    resonator_value: u32,
    /// Weight cap while cramming; defaults to the heaviest remaining goal.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long)]
    max_weight: Option<String>,
    /// Pick-given ratio: -1 breadth-first, 0 best-first, r > 0 mixed.
    #[arg(long, allow_hyphen_values = true)]
    ratio: Option<String>,
    #[arg(long)]
    max_vars: Option<String>,
    #[arg(long)]
    max_given: Option<String>,
    /// Discard conclusions containing an instance of this pattern.
    #[arg(long, value_name = "PATTERN")]
    forbid: Vec<String>,
    /// Discard conclusions that are variants of this formula.
    #[arg(long, value_name = "FORMULA")]
    block: Vec<String>,
    #[arg(long)]
    all_goals: bool,
    /// Reserved. The prover has no randomness to disable.
    #[arg(long)]
    seedless: bool,
}

impl Overrides {
    fn apply(&self, spec: &mut ProblemSpec) -> Result<()> {
        if self.seedless {
            bail!("--seedless is reserved: searches are deterministic and take no seed");
        }
        let pairs = [
            ("max_weight", &self.max_weight),
            ("pick_given_ratio", &self.ratio),
            ("max_distinct_vars", &self.max_vars),
            ("max_given", &self.max_given),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                spec.set_param(key, v).map_err(|e| anyhow!("{e}"))?;
            }
        }
        for p in &self.forbid {
            let t = parse_formula(p).with_context(|| format!("--forbid `{p}`"))?;
            spec.filters.forbidden_patterns.push(t);
        }
        for b in &self.block {
            let t = parse_formula(b).with_context(|| format!("--block `{b}`"))?;
            spec.filters.blocked_lemmas.push(t.canonicalize());
        }
        if self.all_goals {
            spec.strategy.all_goals = true;
        }
        Ok(())
    }
}

/// Failures that map to exit status 1.
#[derive(Debug)]
struct NotProved(String);

impl std::fmt::Display for NotProved {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NotProved {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_problem(path: &Path, overrides: &Overrides) -> Result<ProblemSpec> {
    let mut spec = parse_problem(&read(path)?).with_context(|| format!("{}", path.display()))?;
    spec.name = path.file_stem().map_or("problem".into(), |s| s.to_string_lossy().into_owned());
    overrides.apply(&mut spec)?;
    Ok(spec)
}

fn load_proof(path: &Path) -> Result<ProofDocument> {
    parse_proof(&read(path)?).with_context(|| format!("{}", path.display()))
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents.as_bytes()).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("cannot write {}", path.display()))
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Proof document echoing the parameters that differ from their defaults.
fn document(spec: &ProblemSpec, proof: Proof) -> ProofDocument {
    let defaults = ProblemSpec::new("", Vec::new(), Vec::new());
    let mut doc = ProofDocument::new(spec.name.clone(), proof);
    doc.params = spec
        .params()
        .into_iter()
        .filter(|(k, v)| defaults.param(k).as_ref() != Some(v))
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    doc
}

fn stats_line(result: &SearchResult, machine: bool) -> String {
    if machine {
        let len = result.combined.as_ref().map_or("-".to_string(), |p| p.length().to_string());
        format!("outcome={} {} length={len}", result.outcome, result.stats)
    } else {
        format!("search ended: {}\n{}", result.outcome, result.stats)
    }
}

fn report_text(reports: &[RunReport]) -> String {
    reports.iter().map(|r| format!("{r}\n")).collect()
}

fn campaign_error(e: CampaignError) -> anyhow::Error {
    match e {
        CampaignError::GoalUnreached(_) | CampaignError::InvalidProof(_) | CampaignError::SpliceInvalid(_) => {
            NotProved(e.to_string()).into()
        }
        other => anyhow!(other),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prove { problem, overrides, output, trace, stats, machine, plan } => {
            let spec = load_problem(&problem, &overrides)?;
            if let Some(plan_path) = plan {
                let file = parse_plan(&read(&plan_path)?).with_context(|| format!("{}", plan_path.display()))?;
                if file.kind != PlanKind::Adjoin {
                    bail!("prove --plan expects `mode = adjoin`; use `shorten` or `sweep` for other plans");
                }
                let plan = file.into_plan(spec.clone(), None).map_err(campaign_error)?;
                let result = run_plan(&plan).map_err(campaign_error)?;
                eprint!("{}", report_text(&result.reports));
                let proved = result.reports.last().is_some_and(|r| r.proved);
                return match result.best.filter(|_| proved) {
                    Some(p) => emit(output.as_deref(), &print_proof(&document(&spec, p))),
                    None => Err(NotProved("purged run did not reach every goal".into()).into()),
                };
            }
            let result = if trace.is_some() { saturate_traced(&spec) } else { saturate(&spec) }?;
            if let Some(path) = &trace {
                write_atomic(path, &result.trace_text())?;
            }
            if stats || machine {
                eprintln!("{}", stats_line(&result, machine));
            }
            match (&result.outcome, result.combined.clone()) {
                (detach::Outcome::ProofFound, Some(p)) => emit(output.as_deref(), &print_proof(&document(&spec, p))),
                _ => {
                    let missing: Vec<&str> = spec
                        .goals
                        .iter()
                        .filter(|g| result.proof_of(&g.name).is_none())
                        .map(|g| g.name.as_str())
                        .collect();
                    Err(NotProved(format!("{}: goals not reached: {}", result.outcome, missing.join(", "))).into())
                }
            }
        }
        Command::Check { proof, against } => {
            let doc = load_proof(&proof)?;
            let spec = load_problem(&against, &Overrides::default())?;
            let verdict = check_proof(&doc.proof, &spec);
            println!("{verdict}");
            if verdict.is_valid() {
                Ok(())
            } else {
                Err(NotProved(format!("{} is not a valid proof", proof.display())).into())
            }
        }
        Command::Metrics { proof } => {
            println!("{}", proof_metrics(&load_proof(&proof)?.proof));
            Ok(())
        }
        Command::Shorten { problem, proof, mode, campaign, overrides, output, report } => {
            let spec = load_problem(&problem, &overrides)?;
            let reference = load_proof(&proof)?.proof;
            let budget = campaign.budget.unwrap_or(spec.strategy.max_given);
            let best = match mode {
                ShortenMode::Block => {
                    let out = block_steps_loop(&spec, &reference, campaign.resonator_value, budget)
                        .map_err(campaign_error)?;
                    let text = report_text(&out.reports);
                    match &report {
                        Some(p) => write_atomic(p, &text)?,
                        None => eprint!("{text}"),
                    }
                    out.best
                }
                ShortenMode::Cram => cram(&spec, &reference, campaign.cap, budget).map_err(campaign_error)?,
            };
            eprintln!("{}", proof_metrics(&best));
            emit(output.as_deref(), &print_proof(&document(&spec, best)))
        }
        Command::Cram { problem, proof, campaign, overrides, output } => {
            let spec = load_problem(&problem, &overrides)?;
            let donor = load_proof(&proof)?.proof;
            let budget = campaign.budget.unwrap_or(spec.strategy.max_given);
            let best = cram(&spec, &donor, campaign.cap, budget).map_err(campaign_error)?;
            eprintln!("{}", proof_metrics(&best));
            emit(output.as_deref(), &print_proof(&document(&spec, best)))
        }
        Command::Sweep { problem, grid, overrides, budget, output } => {
            let spec = load_problem(&problem, &overrides)?;
            let file = parse_plan(&read(&grid)?).with_context(|| format!("{}", grid.display()))?;
            if file.kind != PlanKind::Sweep {
                bail!("{}: expected `mode = sweep`", grid.display());
            }
            let budget = budget.or(file.budget).unwrap_or(spec.strategy.max_given);
            let reports = sweep(&spec, &file.grid, budget).map_err(campaign_error)?;
            emit(output.as_deref(), &report_text(&reports))?;
            if reports.iter().any(|r| r.proved) {
                Ok(())
            } else {
                Err(NotProved("no run reached every goal".into()).into())
            }
        }
        Command::Dependence { problem, overrides, budget } => {
            let spec = load_problem(&problem, &overrides)?;
            let system: Vec<Named> = spec.axioms.iter().chain(&spec.goals).cloned().collect();
            let budget = budget.unwrap_or(spec.strategy.max_given);
            for r in axiom_dependence(&spec, &system, budget).map_err(campaign_error)? {
                println!("{r}");
                if let Dependence::Dependent(p) = &r.verdict {
                    for s in &p.steps {
                        println!("  {} [{}] {}.", s.id, s.justification, s.term);
                    }
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("detach: {e:#}");
            if e.is::<NotProved>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
