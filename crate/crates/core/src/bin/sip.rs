//! Command-line front end for the stable invitation solvers.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 when the
//! command succeeded (an invitation was found, a verification passed, a
//! manipulation was found), 1 when the analysis came back negative (no
//! stable invitation, no manipulation, a failed verification), 2 for usage
//! and document errors, 3 when an instance exceeds a capacity cap.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stable_invitations::{
    audit_mechanism_space, enumerate_stable, find_manipulation, generate_random_instance,
    is_envy_free, is_individually_rational, parse_instance, run_inc_mechanism,
    serialize_instance, solve_asip_multislot, solve_gsip, GeneratorConfig, GsipError,
    GsipInstance, ImpossibilityCase, Invitation, Limits, Manipulation, ManipulationError,
    ManipulationMode, Misreport, OracleError, ParsedDocument, PreferenceFamily, SolveResult,
    SolverMechanism, ThresholdProfile, Verdict,
};

#[derive(Parser)]
#[command(
    name = "sip",
    version,
    about = "Solvers, mechanisms, and incentive audits for the stable invitation problem"
)]
struct Cli {
    /// Output style for results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Find a maximum stable invitation for an instance document.
    Solve {
        file: PathBuf,
        /// Agent cap for the exact search fallback.
        #[arg(long)]
        exact_cap: Option<usize>,
    },
    /// Report whether one invitation is individually rational, envy-free,
    /// and stable.
    Check {
        file: PathBuf,
        /// Comma-separated 1-based ids, or "none" for the empty invitation.
        #[arg(long)]
        invitation: String,
    },
    /// List every stable invitation by brute force (small instances).
    Enumerate { file: PathBuf },
    /// Run the threshold mechanism on an instance whose preferences are
    /// all threshold-shaped.
    Mechanism { file: PathBuf },
    /// Search for a misreport that improves some agent's outcome.
    Manipulate {
        file: PathBuf,
        /// 1-based agent to probe; every agent when omitted.
        #[arg(long)]
        agent: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::BruteForce)]
        mode: ModeArg,
        /// Mechanism under attack: a solver or the threshold mechanism.
        #[arg(long, value_enum, default_value_t = MechanismArg::Solver)]
        mechanism: MechanismArg,
    },
    /// Enumerate a two-agent mechanism space and check that no table is
    /// both strategy-proof and stable-finding.
    VerifyImpossibility {
        #[arg(long, value_enum)]
        case: CaseArg,
    },
    /// Generate a seeded random instance document.
    Gen(GenArgs),
    /// Time the solver on generated instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Every acceptance set, encoded as flat preferences.
    BruteForce,
    /// Interval acceptance sets plus the empty report.
    Intervals,
    /// Accept/reject set reports, preferences held truthful.
    Declarations,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MechanismArg {
    /// The bundled exact solver (empty invitation when nothing is stable).
    Solver,
    /// The threshold mechanism; reports range over thresholds.
    Inc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    /// Two agents, decreasing-or-tied preference actions, no constraints.
    #[value(name = "theorem2_asip")]
    Theorem2Asip,
    /// Two agents with simple preferences choosing whom to reject.
    #[value(name = "lemma_gsip")]
    LemmaGsip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    Simple,
    IntervalSinglePeaked,
    Inc,
    Dec,
    ArbitraryPreorder,
}

impl From<FamilyArg> for PreferenceFamily {
    fn from(arg: FamilyArg) -> Self {
        match arg {
            FamilyArg::Simple => PreferenceFamily::Simple,
            FamilyArg::IntervalSinglePeaked => PreferenceFamily::IntervalSinglePeaked,
            FamilyArg::Inc => PreferenceFamily::Inc,
            FamilyArg::Dec => PreferenceFamily::Dec,
            FamilyArg::ArbitraryPreorder => PreferenceFamily::ArbitraryPreorder,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Read a generator config document instead of passing flags.
    #[arg(long, conflicts_with_all = ["n", "family", "seed"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    #[arg(long, value_enum, required_unless_present = "config")]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 0, conflicts_with = "config")]
    alpha_max: usize,
    #[arg(long, default_value_t = 0, conflicts_with = "config")]
    beta_max: usize,
    #[arg(long, required_unless_present = "config")]
    seed: Option<u64>,
    /// Write the document to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::ArbitraryPreorder)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    alpha_max: usize,
    #[arg(long, default_value_t = 0)]
    beta_max: usize,
    #[arg(long, default_value_t = 5)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    exact_cap: Option<usize>,
}

enum CliError {
    Usage(String),
    Capacity(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Capacity(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Capacity(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Solve { file, exact_cap } => cmd_solve(&file, exact_cap, format),
        Command::Check { file, invitation } => cmd_check(&file, &invitation, format),
        Command::Enumerate { file } => cmd_enumerate(&file, format),
        Command::Mechanism { file } => cmd_mechanism(&file, format),
        Command::Manipulate {
            file,
            agent,
            mode,
            mechanism,
        } => cmd_manipulate(&file, agent, mode, mechanism, format),
        Command::VerifyImpossibility { case } => cmd_verify(case, format),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args, format),
    }
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_solve(file: &Path, exact_cap: Option<usize>, format: Format) -> Result<ExitCode, CliError> {
    let mut limits = Limits::default();
    if let Some(cap) = exact_cap {
        limits.exact_search_max_agents = cap;
    }
    match load(file)? {
        ParsedDocument::Single(inst) => {
            let result = solve_gsip(&inst, &limits).map_err(gsip_err)?;
            print_solve(&result, None, format);
            Ok(exit_for(&result))
        }
        ParsedDocument::MultiSlot(ms) => {
            let (slot, result) = solve_asip_multislot(&ms);
            print_solve(&result, Some(slot + 1), format);
            Ok(exit_for(&result))
        }
    }
}

fn print_solve(result: &SolveResult, slot: Option<usize>, format: Format) {
    let path = result.stats.path.as_str();
    match (&result.verdict, format) {
        (Verdict::Stable(inv), Format::Text) => {
            println!("verdict: stable");
            println!("size: {}", inv.size());
            println!("members: {}", members_text(inv));
            if let Some(slot) = slot {
                println!("slot: {slot}");
            }
            println!("path: {path}");
        }
        (Verdict::NoStable, Format::Text) => {
            println!("verdict: no stable invitation");
            println!("path: {path}");
        }
        (verdict, Format::Json) => {
            let mut doc = match verdict {
                Verdict::Stable(inv) => json!({
                    "verdict": "stable",
                    "size": inv.size(),
                    "members": ids(inv),
                }),
                Verdict::NoStable => json!({ "verdict": "no_stable" }),
            };
            doc["path"] = json!(path);
            if let Some(slot) = slot {
                doc["slot"] = json!(slot);
            }
            println!("{doc}");
        }
    }
}

fn exit_for(result: &SolveResult) -> ExitCode {
    match result.verdict {
        Verdict::Stable(_) => ExitCode::SUCCESS,
        Verdict::NoStable => ExitCode::from(1),
    }
}

fn cmd_check(file: &Path, invitation: &str, format: Format) -> Result<ExitCode, CliError> {
    let inst = single(load(file)?)?;
    let inv = parse_invitation(invitation, inst.n())?;
    let ir = is_individually_rational(&inst, &inv);
    let ef = is_envy_free(&inst, &inv);
    let stable = ir && ef;
    match format {
        Format::Text => {
            println!("invitation: {}", members_text(&inv));
            println!("individually_rational: {ir}");
            println!("envy_free: {ef}");
            println!("stable: {stable}");
        }
        Format::Json => println!(
            "{}",
            json!({
                "invitation": ids(&inv),
                "individually_rational": ir,
                "envy_free": ef,
                "stable": stable,
            })
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_enumerate(file: &Path, format: Format) -> Result<ExitCode, CliError> {
    let inst = single(load(file)?)?;
    let limits = Limits::default();
    let all = enumerate_stable(&inst, limits.oracle_max_agents).map_err(oracle_err)?;
    match format {
        Format::Text => {
            println!("stable invitations: {}", all.len());
            for inv in &all {
                println!("  {}", members_text(inv));
            }
        }
        Format::Json => {
            let sets: Vec<Vec<usize>> = all.iter().map(ids).collect();
            println!("{}", json!({ "count": all.len(), "stable": sets }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mechanism(file: &Path, format: Format) -> Result<ExitCode, CliError> {
    let inst = single(load(file)?)?;
    let profile = ThresholdProfile::from_instance(&inst)
        .map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
    let outcome = run_inc_mechanism(&profile);
    match format {
        Format::Text => {
            let shown: Vec<String> = profile
                .thresholds()
                .iter()
                .map(|&l| {
                    if l > profile.n() {
                        "never".to_string()
                    } else {
                        l.to_string()
                    }
                })
                .collect();
            println!("thresholds: {}", shown.join(" "));
            println!("members: {}", members_text(&outcome));
        }
        Format::Json => println!(
            "{}",
            json!({ "thresholds": profile.thresholds(), "members": ids(&outcome) })
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_manipulate(
    file: &Path,
    agent: Option<usize>,
    mode: ModeArg,
    mechanism: MechanismArg,
    format: Format,
) -> Result<ExitCode, CliError> {
    let inst = single(load(file)?)?;
    let agent = match agent {
        Some(id) => {
            if id == 0 || id > inst.n() {
                return Err(CliError::Usage(format!(
                    "agent id {id} is outside 1..={}",
                    inst.n()
                )));
            }
            Some(id - 1)
        }
        None => None,
    };
    let mechanism = match mechanism {
        MechanismArg::Inc => SolverMechanism::IncMechanism,
        MechanismArg::Solver if inst.alpha() == 0 && inst.beta() == 0 => {
            SolverMechanism::AsipSolver
        }
        MechanismArg::Solver => SolverMechanism::GsipSolver,
    };
    let mode = match mode {
        ModeArg::BruteForce => ManipulationMode::BruteForce,
        ModeArg::Intervals => ManipulationMode::IntervalReports,
        ModeArg::Declarations => ManipulationMode::FrSets,
    };
    let limits = Limits::default();
    let found =
        find_manipulation(&inst, mechanism, mode, agent, &limits).map_err(manipulation_err)?;
    match (found, format) {
        (Some(m), Format::Text) => {
            println!("agent: {}", m.agent + 1);
            println!("truthful outcome: {}", members_text(&m.truthful_outcome));
            println!("misreport: {}", misreport_text(&m));
            println!("outcome: {}", members_text(&m.outcome));
            Ok(ExitCode::SUCCESS)
        }
        (None, Format::Text) => {
            println!("no manipulation found");
            Ok(ExitCode::from(1))
        }
        (Some(m), Format::Json) => {
            let misreport = match &m.misreport {
                Misreport::Preference(p) => json!({
                    "kind": "preference",
                    "acceptable_sizes": p.acceptable_sizes().collect::<Vec<_>>(),
                    "ranks": p.ranks(),
                }),
                Misreport::Declaration { accept, reject } => json!({
                    "kind": "declaration",
                    "accept": accept.iter().map(|&j| j + 1).collect::<Vec<_>>(),
                    "reject": reject.iter().map(|&j| j + 1).collect::<Vec<_>>(),
                }),
            };
            println!(
                "{}",
                json!({
                    "agent": m.agent + 1,
                    "truthful_outcome": ids(&m.truthful_outcome),
                    "misreport": misreport,
                    "outcome": ids(&m.outcome),
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        (None, Format::Json) => {
            println!("{}", json!({ "manipulation": null }));
            Ok(ExitCode::from(1))
        }
    }
}

fn misreport_text(m: &Manipulation) -> String {
    match &m.misreport {
        Misreport::Preference(p) => {
            let sizes: Vec<String> = p.acceptable_sizes().map(|s| s.to_string()).collect();
            if sizes.is_empty() {
                "accept no size".to_string()
            } else {
                format!("accept sizes {}", sizes.join(" "))
            }
        }
        Misreport::Declaration { accept, reject } => {
            let show = |set: &[usize]| -> String {
                if set.is_empty() {
                    "(none)".to_string()
                } else {
                    set.iter()
                        .map(|&j| (j + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                }
            };
            format!("accept {}; reject {}", show(accept), show(reject))
        }
    }
}

fn cmd_verify(case: CaseArg, format: Format) -> Result<ExitCode, CliError> {
    let (name, case) = match case {
        CaseArg::Theorem2Asip => ("theorem2_asip", ImpossibilityCase::AnonymousDecPair),
        CaseArg::LemmaGsip => ("lemma_gsip", ImpossibilityCase::SimpleRejectionPair),
    };
    let report = audit_mechanism_space(case.agent_count(), &case.action_space())
        .map_err(|e| CliError::Capacity(e.to_string()))?;
    let verified = report.intersection == 0;
    match format {
        Format::Text => {
            println!("case: {name}");
            println!("tables: {}", report.tables_enumerated);
            println!("strategy-proof: {}", report.strategy_proof_tables);
            println!("stable-finding: {}", report.stable_finding_tables);
            println!("intersection: {}", report.intersection);
            if verified {
                println!("verified: no table is both strategy-proof and stable-finding");
            } else {
                println!("NOT verified: {} tables are both", report.intersection);
            }
        }
        Format::Json => println!(
            "{}",
            json!({
                "case": name,
                "tables": report.tables_enumerated,
                "strategy_proof": report.strategy_proof_tables,
                "stable_finding": report.stable_finding_tables,
                "intersection": report.intersection,
                "verified": verified,
            })
        ),
    }
    Ok(if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, CliError> {
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<GeneratorConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => GeneratorConfig {
            n: args.n.expect("clap enforces n without --config"),
            preference_family: args.family.expect("clap enforces family without --config").into(),
            alpha_max: args.alpha_max,
            beta_max: args.beta_max,
            seed: args.seed.expect("clap enforces seed without --config"),
        },
    };
    let inst = generate_random_instance(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = serialize_instance(&inst);
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs, format: Format) -> Result<ExitCode, CliError> {
    let mut limits = Limits::default();
    if let Some(cap) = args.exact_cap {
        limits.exact_search_max_agents = cap;
    }
    let mut rows = Vec::new();
    let mut total_ms = 0.0;
    for trial in 0..args.trials {
        let config = GeneratorConfig {
            n: args.n,
            preference_family: args.family.into(),
            alpha_max: args.alpha_max,
            beta_max: args.beta_max,
            seed: args.seed.wrapping_add(trial),
        };
        let inst = generate_random_instance(&config).map_err(|e| CliError::Usage(e.to_string()))?;
        let start = Instant::now();
        let result = solve_gsip(&inst, &limits).map_err(gsip_err)?;
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        total_ms += elapsed_ms;
        let size = result.size();
        let path = result.stats.path.as_str();
        if format == Format::Text {
            let size_text = size.map_or("none".to_string(), |s| s.to_string());
            println!(
                "trial {}: solved in {elapsed_ms:.2} ms (size {size_text}, path {path})",
                trial + 1
            );
        }
        rows.push(json!({ "trial": trial + 1, "ms": elapsed_ms, "size": size, "path": path }));
    }
    let mean = total_ms / args.trials.max(1) as f64;
    match format {
        Format::Text => println!("mean: {mean:.2} ms over {} trials", args.trials),
        Format::Json => println!(
            "{}",
            json!({ "n": args.n, "trials": rows, "mean_ms": mean })
        ),
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// plumbing
// ---------------------------------------------------------------------------

fn load(path: &Path) -> Result<ParsedDocument, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn single(doc: ParsedDocument) -> Result<GsipInstance, CliError> {
    match doc {
        ParsedDocument::Single(inst) => Ok(inst),
        ParsedDocument::MultiSlot(_) => Err(CliError::Usage(
            "this command needs a single-slot document; only `solve` handles slots".to_string(),
        )),
    }
}

fn parse_invitation(text: &str, n: usize) -> Result<Invitation, CliError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "none" {
        return Ok(Invitation::empty());
    }
    let mut members = Vec::new();
    for part in trimmed.split(',') {
        let id: usize = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invitation id {:?} is not a number", part.trim())))?;
        if id == 0 || id > n {
            return Err(CliError::Usage(format!(
                "invitation id {id} is outside 1..={n}"
            )));
        }
        members.push(id - 1);
    }
    members.sort_unstable();
    members.dedup();
    Ok(Invitation::from_members(members))
}

fn ids(inv: &Invitation) -> Vec<usize> {
    inv.members().iter().map(|&i| i + 1).collect()
}

fn members_text(inv: &Invitation) -> String {
    if inv.is_empty() {
        "(none)".to_string()
    } else {
        ids(inv)
            .iter()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn gsip_err(err: GsipError) -> CliError {
    match err {
        GsipError::TooManyAgents { .. } => CliError::Capacity(err.to_string()),
    }
}

fn oracle_err(err: OracleError) -> CliError {
    CliError::Capacity(err.to_string())
}

fn manipulation_err(err: ManipulationError) -> CliError {
    match err {
        ManipulationError::TooManyAgents { .. } | ManipulationError::TooManyReports { .. } => {
            CliError::Capacity(err.to_string())
        }
        ManipulationError::Gsip(inner) => gsip_err(inner),
        other => CliError::Usage(other.to_string()),
    }
}
