//! Subcommands and their exit-code contract.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, every selected check passed, nothing found |
//! | 1 | malformed input or unreadable file |
//! | 2 | mechanism precondition violated |
//! | 3 | a check failed, a misreport was found, or mechanisms differ |
//! | 4 | assignment does not fit the market |
//! | 5 | enumeration guard exceeded |

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fttc_core::classical::{attc, serial_dictatorship, ttc};
use fttc_core::random::{random_market, random_multi_unit_market};
use fttc_core::rational::{format_rational, parse_rational, Rational};
use fttc_core::verify::{
    check_nje, check_sd_core, check_sd_efficiency, check_sd_ir, check_sd_strict_core, find_manipulation,
    strict_core_empty_discrete, Extension, SearchError, Verdict, VerifyError,
};
use fttc_core::{fttc_traced, Assignment, HousingMarket, TieBreak};
use serde_json::{json, Map, Value};

use crate::format::{assignment_json, market_json, parse_assignment, parse_market, render, FormatError};
use crate::report::{extension_name, trace_json, verdict_json, witness_json, witness_summary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Mismatch(_) => 4,
            CliError::Guard(_) => 5,
        }
    }
}

fn input(context: impl Display, err: impl Display) -> CliError {
    CliError::Input(format!("{context}: {err}"))
}

impl From<VerifyError> for CliError {
    fn from(err: VerifyError) -> Self {
        match err {
            VerifyError::TooManyAgents { .. } | VerifyError::TooManyHouses { .. } => CliError::Guard(err.to_string()),
            VerifyError::Assignment(_) => CliError::Mismatch(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fttc", version, about = "Fractional top trading cycles for housing markets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a mechanism on an instance.
    Solve(SolveArgs),
    /// Check an assignment against SD axioms.
    Verify(VerifyArgs),
    /// Search every weak-order misreport for an improving one.
    Manipulate(ManipulateArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Run two mechanisms and diff their outputs.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mechanism {
    Fttc,
    Ttc,
    Attc,
    /// Serial dictatorship in L_N order; each agent takes its endowment's
    /// total.
    Serial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Ir,
    Efficiency,
    Core,
    StrictCore,
    Nje,
    /// Whether some whole-house permutation is in the strict core; needs
    /// no assignment.
    DiscreteStrictCore,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Ir => "sd-ir",
            Check::Efficiency => "sd-efficiency",
            Check::Core => "sd-core",
            Check::StrictCore => "sd-strict-core",
            Check::Nje => "nje",
            Check::DiscreteStrictCore => "discrete-strict-core",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtensionArg {
    Sd,
    Dl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// `granularity` pieces of every house dealt to random agents.
    Fractional,
    /// One whole house per agent.
    Permutation,
    /// Whole units, up to `--units` per entry, strict preferences.
    MultiUnit,
}

#[derive(Debug, Clone, Args)]
pub struct TieBreakArgs {
    /// Agent priority, comma-separated ids; default is instance order.
    #[arg(long, value_delimiter = ',')]
    pub ln: Option<Vec<String>>,
    /// House priority, comma-separated ids; default is instance order.
    #[arg(long, value_delimiter = ',')]
    pub lh: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fttc")]
    pub mechanism: Mechanism,
    #[command(flatten)]
    pub tiebreak: TieBreakArgs,
    /// Write the FTTC trade and deletion log here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ir,efficiency,core,strict-core,nje")]
    pub checks: Vec<Check>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ManipulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Only this agent; default scans everyone.
    #[arg(long)]
    pub agent: Option<String>,
    #[arg(long, value_enum, default_value = "sd")]
    pub extension: ExtensionArg,
    #[arg(long, value_enum, default_value = "fttc")]
    pub mechanism: Mechanism,
    #[command(flatten)]
    pub tiebreak: TieBreakArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `N` or an inclusive range `A-B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl SizeRange {
    fn pick(self, seed: u64) -> usize {
        self.lo + (seed % (self.hi - self.lo + 1) as u64) as usize
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => (parse(s)?, parse(s)?),
        };
        if lo == 0 || lo > hi {
            return Err(format!("{s:?} is not a positive size or range"));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenParams {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "3")]
    pub agents: SizeRange,
    /// Defaults to the number of agents.
    #[arg(long)]
    pub houses: Option<SizeRange>,
    /// Probability that adjacent houses share a class, as a rational.
    #[arg(long, default_value = "0")]
    pub ties: String,
    #[arg(long, default_value_t = 100)]
    pub granularity: u32,
    #[arg(long, value_enum, default_value = "fractional")]
    pub kind: Kind,
    /// Largest entry for multi-unit instances.
    #[arg(long, default_value_t = 3)]
    pub units: u32,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub params: GenParams,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Compare on this instance; without it, run a batch of generated ones.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fttc")]
    pub mechanism: Mechanism,
    #[arg(long, value_enum)]
    pub against: Mechanism,
    #[command(flatten)]
    pub tiebreak: TieBreakArgs,
    /// Batch size; instance k uses seed `--seed + k`.
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[command(flatten)]
    pub params: GenParams,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input(path.display(), e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| input(path.display(), e))
}

fn load_market(path: &Path) -> Result<HousingMarket, CliError> {
    parse_market(&read(path)?).map_err(|e| input(path.display(), e))
}

fn id_order(ids: &[String], given: &Option<Vec<String>>, what: &str) -> Result<Vec<usize>, CliError> {
    let Some(given) = given else {
        return Ok((0..ids.len()).collect());
    };
    let order = given
        .iter()
        .map(|g| ids.iter().position(|id| id == g).ok_or_else(|| CliError::Input(format!("unknown {what} {g:?} in tie-break"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sorted = order.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != ids.len() || order.len() != ids.len() {
        return Err(CliError::Input(format!("{what} tie-break must list every {what} exactly once")));
    }
    Ok(order)
}

pub fn tiebreak(market: &HousingMarket, args: &TieBreakArgs) -> Result<TieBreak, CliError> {
    let ln = id_order(market.agents(), &args.ln, "agent")?;
    let lh = id_order(market.houses(), &args.lh, "house")?;
    TieBreak::new(ln, lh).map_err(|e| CliError::Input(e.to_string()))
}

/// Runs a mechanism; errors are precondition messages.
pub fn apply(mechanism: Mechanism, market: &HousingMarket, tb: &TieBreak) -> Result<Assignment, String> {
    let named = |e: &dyn Display| format!("{}: {e}", mechanism_name(mechanism));
    match mechanism {
        Mechanism::Fttc => fttc_traced(market, tb).map(|r| r.assignment).map_err(|e| named(&e)),
        Mechanism::Ttc => ttc(market).map_err(|e| named(&e)),
        Mechanism::Attc => attc(market, tb).map_err(|e| named(&e)),
        Mechanism::Serial => {
            let demand: Vec<Rational> = market.endowment().iter().map(|r| r.iter().sum()).collect();
            let rows = serial_dictatorship(market.preferences(), &market.supply(), tb.agent_order(), &demand, tb.house_order())
                .map_err(|e| named(&e))?;
            Assignment::new(market, rows).map_err(|e| named(&e))
        }
    }
}

pub fn mechanism_name(mechanism: Mechanism) -> &'static str {
    match mechanism {
        Mechanism::Fttc => "fttc",
        Mechanism::Ttc => "ttc",
        Mechanism::Attc => "attc",
        Mechanism::Serial => "serial",
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Solve(a) => solve(&a, out, err),
        Command::Verify(a) => verify(&a, out),
        Command::Manipulate(a) => manipulate(&a, out),
        Command::Gen(a) => gen(&a, out),
        Command::Compare(a) => compare(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) {
    // Writing to a closed pipe is not worth a distinct exit code.
    let _ = out.write_all(text.as_bytes());
}

fn solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let market = load_market(&args.input)?;
    let tb = tiebreak(&market, &args.tiebreak)?;
    if args.trace.is_some() && args.mechanism != Mechanism::Fttc {
        return Err(CliError::Input("--trace is only available for fttc".into()));
    }
    let (x, trades) = if args.mechanism == Mechanism::Fttc {
        let run = fttc_traced(&market, &tb).map_err(|e| CliError::Precondition(format!("fttc: {e}")))?;
        if let Some(path) = &args.trace {
            write(path, &render(&trace_json(&market, &run)))?;
        }
        (run.assignment.clone(), Some(run.trades))
    } else {
        (apply(args.mechanism, &market, &tb).map_err(CliError::Precondition)?, None)
    };
    let mut summary = format!(
        "{}: n={} m={}",
        mechanism_name(args.mechanism),
        market.num_agents(),
        market.num_houses()
    );
    if let Some(t) = trades {
        summary.push_str(&format!(" trades={t}"));
    }
    let doc = render(&assignment_json(&market, x.rows()));
    match &args.output {
        Some(path) => {
            write(path, &doc)?;
            emit(out, &format!("{summary}\n"));
        }
        None => {
            emit(out, &doc);
            let _ = writeln!(err, "{summary}");
        }
    }
    Ok(0)
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let market = load_market(&args.input)?;
    let needs_assignment = args.checks.iter().any(|&c| c != Check::DiscreteStrictCore);
    let x = match &args.assignment {
        Some(path) => {
            let rows = parse_assignment(&market, &read(path)?).map_err(|e| match e {
                e @ FormatError::Json(_) | e @ FormatError::Literal { .. } => input(path.display(), e),
                e if e.is_mismatch() => CliError::Mismatch(format!("{}: {e}", path.display())),
                e => input(path.display(), e),
            })?;
            Some(Assignment::new_unconserved(&market, rows).map_err(|e| input(path.display(), e))?)
        }
        None if needs_assignment => return Err(CliError::Input("--assignment is required for these checks".into())),
        None => None,
    };
    let mut report = Map::new();
    if let Some(x) = &x {
        let defect = x.conservation_defect(&market);
        report.insert("conserved".into(), Value::Bool(defect.is_none()));
        if let Some(fttc_core::AssignmentError::Conservation { house, expected, found }) = defect {
            emit(
                out,
                &format!(
                    "warning: column {} sums to {}, endowment supplies {}\n",
                    market.houses()[house],
                    format_rational(&found),
                    format_rational(&expected)
                ),
            );
        }
    }
    let mut results = Vec::new();
    let mut all_pass = true;
    for &check in &args.checks {
        let verdict = match (check, &x) {
            (Check::DiscreteStrictCore, _) => {
                let found = strict_core_empty_discrete(&market)?;
                let stable: Vec<Value> = found
                    .unblocked()
                    .map(|p| p.iter().map(|&h| Value::String(market.houses()[h].clone())).collect())
                    .collect();
                let blocked = found.log.len() - stable.len();
                let line = format!("{blocked} of {} permutations blocked", found.log.len());
                let verdict = json!({
                    "check": check.name(),
                    "verdict": if stable.is_empty() { "fail" } else { "pass" },
                    "permutations": found.log.len(),
                    "blocked": blocked,
                    "stable": stable,
                });
                all_pass &= !found.is_empty();
                results.push(verdict);
                let status = if found.is_empty() { "FAIL" } else { "PASS" };
                emit(out, &format!("{}: {status} {line}\n", check.name()));
                continue;
            }
            (Check::Ir, Some(x)) => check_sd_ir(&market, x),
            (Check::Efficiency, Some(x)) => check_sd_efficiency(&market, x)?,
            (Check::Core, Some(x)) => check_sd_core(&market, x)?,
            (Check::StrictCore, Some(x)) => check_sd_strict_core(&market, x)?,
            (Check::Nje, Some(x)) => check_nje(&market, x),
            (_, None) => unreachable!("assignment presence checked above"),
        };
        match &verdict {
            Verdict::Pass => emit(out, &format!("{}: PASS\n", check.name())),
            Verdict::Fail(w) => {
                all_pass = false;
                emit(out, &format!("{}: FAIL {}\n", check.name(), witness_summary(&market, w)));
            }
        }
        results.push(verdict_json(&market, check.name(), &verdict));
    }
    report.insert("checks".into(), Value::Array(results));
    if let Some(path) = &args.output {
        write(path, &render(&Value::Object(report)))?;
    }
    Ok(if all_pass { 0 } else { 3 })
}

fn manipulate(args: &ManipulateArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let market = load_market(&args.input)?;
    let tb = tiebreak(&market, &args.tiebreak)?;
    let extension = match args.extension {
        ExtensionArg::Sd => Extension::Sd,
        ExtensionArg::Dl => Extension::Dl,
    };
    let agents: Vec<usize> = match &args.agent {
        Some(id) => vec![market
            .agent_index(id)
            .ok_or_else(|| CliError::Input(format!("unknown agent {id:?}")))?],
        None => (0..market.num_agents()).collect(),
    };
    let mut found = Vec::new();
    for i in agents {
        let mechanism = |m: &HousingMarket| apply(args.mechanism, m, &tb);
        let result = find_manipulation(&market, i, extension, mechanism).map_err(|e| match e {
            SearchError::Verify(v) => CliError::from(v),
            SearchError::Mechanism(msg) => CliError::Precondition(msg),
        })?;
        let id = &market.agents()[i];
        match result {
            None => emit(out, &format!("agent {id}: none\n")),
            Some(w) => {
                emit(out, &format!("{}\n", witness_summary(&market, &w)));
                found.push(witness_json(&market, &w));
            }
        }
    }
    if found.is_empty() {
        emit(out, "none\n");
    }
    if let Some(path) = &args.output {
        let doc = json!({
            "mechanism": mechanism_name(args.mechanism),
            "extension": extension_name(extension),
            "misreports": found,
        });
        write(path, &render(&doc))?;
    }
    Ok(if found.is_empty() { 0 } else { 3 })
}

/// The instance for one seed; sizes in a range are picked from the seed.
pub fn generate(params: &GenParams, seed: u64) -> Result<HousingMarket, CliError> {
    let ties = parse_rational(&params.ties).map_err(|e| input("--ties", e))?;
    let n = params.agents.pick(seed);
    let m = match params.kind {
        Kind::Permutation => n,
        _ => params.houses.map_or(n, |h| h.pick(seed / 7)),
    };
    let market = match params.kind {
        Kind::Fractional => random_market(seed, n, m, &ties, true, params.granularity),
        Kind::Permutation => random_market(seed, n, n, &ties, false, 1),
        Kind::MultiUnit => random_multi_unit_market(seed, n, m, params.units),
    };
    market.map_err(|e| CliError::Input(e.to_string()))
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let market = generate(&args.params, args.params.seed)?;
    let doc = render(&market_json(&market));
    match &args.output {
        Some(path) => write(path, &doc)?,
        None => emit(out, &doc),
    }
    Ok(0)
}

/// First `(agent, house)` where the matrices differ.
fn first_difference(a: &Assignment, b: &Assignment) -> Option<(usize, usize)> {
    a.rows()
        .iter()
        .zip(b.rows())
        .enumerate()
        .find_map(|(i, (ra, rb))| ra.iter().zip(rb).position(|(x, y)| x != y).map(|h| (i, h)))
}

fn compare(args: &CompareArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let (left, right) = (mechanism_name(args.mechanism), mechanism_name(args.against));
    if let Some(path) = &args.input {
        let market = load_market(path)?;
        let tb = tiebreak(&market, &args.tiebreak)?;
        let a = apply(args.mechanism, &market, &tb).map_err(CliError::Precondition)?;
        let b = apply(args.against, &market, &tb).map_err(CliError::Precondition)?;
        let doc = match first_difference(&a, &b) {
            None => {
                emit(out, "EQUAL\n");
                json!({"equal": true})
            }
            Some((i, h)) => {
                let (agent, house) = (&market.agents()[i], &market.houses()[h]);
                let (va, vb) = (format_rational(a.get(i, h)), format_rational(b.get(i, h)));
                emit(out, &format!("DIFFER agent {agent} house {house}: {left}={va} {right}={vb}\n"));
                json!({"equal": false, "agent": agent, "house": house, left: va, right: vb})
            }
        };
        if let Some(path) = &args.output {
            write(path, &render(&doc))?;
        }
        return Ok(if doc["equal"] == Value::Bool(true) { 0 } else { 3 });
    }

    if args.tiebreak.ln.is_some() || args.tiebreak.lh.is_some() {
        return Err(CliError::Input("tie-break ids need --input".into()));
    }
    let mut mismatches = Vec::new();
    for k in 0..args.count {
        let seed = args.params.seed + k;
        let market = generate(&args.params, seed)?;
        let tb = TieBreak::default_for(&market);
        let with_seed = |e: String| CliError::Precondition(format!("seed {seed}: {e}"));
        let a = apply(args.mechanism, &market, &tb).map_err(with_seed)?;
        let b = apply(args.against, &market, &tb).map_err(with_seed)?;
        if let Some((i, h)) = first_difference(&a, &b) {
            emit(out, &format!("seed {seed}: differ at agent {} house {}\n", market.agents()[i], market.houses()[h]));
            mismatches.push(json!({
                "seed": seed,
                "agents": market.num_agents(),
                "houses": market.num_houses(),
                "agent": market.agents()[i],
                "house": market.houses()[h],
            }));
        }
    }
    emit(out, &format!("{left} vs {right}: {} instances, {} mismatches\n", args.count, mismatches.len()));
    if let Some(path) = &args.output {
        let doc = json!({"instances": args.count, "mismatches": mismatches});
        write(path, &render(&doc))?;
    }
    Ok(if mismatches.is_empty() { 0 } else { 3 })
}
