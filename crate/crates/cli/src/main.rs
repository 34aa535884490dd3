//! `facpl`: evaluate requests, check properties, emit SMT-LIB scripts and
//! replay the bundled banking case study.
//!
//! Exit status: 0 success or property holds, 1 property violated, 2 input
//! error, 3 resource error (request space cap, solver failure).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use facpl_core::analyzer::{self, AnalysisError, CheckReport, Options};
use facpl_core::casestudy;
use facpl_core::eval::Evaluate;
use facpl_core::model::{Decision, Document, DomainSpec, EngineConfig, RequestSetSpec};
use facpl_core::parser::{self, SourceError};
use facpl_core::smt::{self, EncodeError, Query, SolveError, Solver, Verdict};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::TooLarge { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EncodeError> for CliError {
    fn from(e: EncodeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Resource(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropertyArg {
    /// POLICY DOMAIN: no request is not-applicable.
    Complete,
    /// POLICY DOMAIN --child N: removing child N never changes the decision.
    Redundant,
    /// POLICY POLICY DOMAIN: no request is decided by both.
    Disjoint,
    /// POLICY POLICY [DOMAIN] [--set SPEC]: the first reproduces every decision of the second.
    Covers,
    /// POLICY [DOMAIN] --permit-set SPEC --deny-set SPEC.
    Enforce,
    /// POLICY [DOMAIN] --permit-set SPEC: only the permit set is permitted, all else denied.
    LeastPrivilege,
}

#[derive(Debug, Parser)]
#[command(name = "facpl", version, about = "Attribute-based access control policy engine")]
struct Cli {
    /// Engine configuration (level order and role hierarchy).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest request space to enumerate.
    #[arg(long, global = true, default_value_t = analyzer::DEFAULT_CAP)]
    cap: u64,
    /// Witnesses printed per report.
    #[arg(long, global = true, default_value_t = analyzer::DEFAULT_WITNESS_CAP)]
    witnesses: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prints the decision of a policy for a request.
    Eval { policy: PathBuf, request: PathBuf },
    /// Checks a property by enumerating a finite domain.
    Check {
        #[arg(value_enum)]
        property: PropertyArg,
        /// Policies followed by an optional domain file.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        permit_set: Option<PathBuf>,
        #[arg(long)]
        deny_set: Option<PathBuf>,
        /// Request set restricting a coverage check.
        #[arg(long)]
        set: Option<PathBuf>,
        /// Child index for redundancy.
        #[arg(long)]
        child: Option<usize>,
        /// Completeness also rejects indeterminate.
        #[arg(long)]
        strict: bool,
    },
    /// Emits an SMT-LIB 2 script and optionally solves it.
    Encode {
        policy: PathBuf,
        domain: PathBuf,
        /// reach:permit|reach:deny|reach:na|reach:indet|complete|disjoint:<file>
        query: String,
        /// Writes the script here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Runs the solver and prints its verdict and witness.
        #[arg(long)]
        solve: bool,
        /// Solver timeout in seconds.
        #[arg(long, default_value_t = smt::DEFAULT_TIMEOUT.as_secs())]
        timeout: u64,
        /// Solver executable (defaults to $FACPL_SMT_SOLVER, then z3).
        #[arg(long)]
        solver: Option<PathBuf>,
    },
    /// Replays the bundled banking case study.
    CaseStudy,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn source<T>(path: &Path, r: Result<T, SourceError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(e.render(&path.display().to_string())))
}

fn load_policy(path: &Path) -> Result<Document, CliError> {
    source(path, parser::parse_policy(&read(path)?))
}

fn load_domain(path: &Path) -> Result<DomainSpec, CliError> {
    source(path, parser::parse_domain(&read(path)?))
}

fn load_config(path: &Path) -> Result<EngineConfig, CliError> {
    source(path, parser::parse_config(&read(path)?))
}

/// A request set plus the configuration it names. Relative paths inside
/// the file resolve against its directory; `fallback` supplies the domain
/// when the file names none.
fn load_set(path: &Path, fallback: Option<&DomainSpec>) -> Result<(RequestSetSpec, Option<EngineConfig>), CliError> {
    let text = source(path, parser::parse_request_set(&read(path)?))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let domain = match (&text.domain, fallback) {
        (_, Some(d)) => d.clone(),
        (Some(p), None) => load_domain(&base.join(p))?,
        (None, None) => {
            return Err(CliError::Input(format!("{}: no `domain:` and no domain file given", path.display())))
        }
    };
    let config = text.config.as_ref().map(|p| load_config(&base.join(p))).transpose()?;
    Ok((RequestSetSpec::new(domain, text.constraint), config))
}

struct Context {
    config: Option<EngineConfig>,
    opts: Options,
    format: Format,
}

impl Context {
    /// The global `--config` wins over one named by a request set.
    fn config(&self, from_set: Option<EngineConfig>) -> EngineConfig {
        self.config.clone().or(from_set).unwrap_or_default()
    }

    fn report(&self, report: &CheckReport) -> u8 {
        let text = match self.format {
            Format::Text => report.render_text(),
            Format::Tsv => report.render_tsv(),
        };
        print!("{text}");
        u8::from(!report.holds)
    }
}

fn split_files(files: &[PathBuf], policies: usize, domain_required: bool) -> Result<(Vec<Document>, Option<DomainSpec>), CliError> {
    let min = policies + usize::from(domain_required);
    if files.len() < min || files.len() > policies + 1 {
        let shape = if domain_required { "required" } else { "optional" };
        return Err(CliError::Input(format!(
            "expected {policies} policy file(s) and a domain file ({shape}), got {} file(s)",
            files.len()
        )));
    }
    let docs = files[..policies].iter().map(|p| load_policy(p)).collect::<Result<Vec<_>, _>>()?;
    let domain = files.get(policies).map(|p| load_domain(p)).transpose()?;
    Ok((docs, domain))
}

fn need<'a>(flag: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, CliError> {
    flag.as_deref().ok_or_else(|| CliError::Input(format!("`{name}` is required for this property")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    ctx: &Context,
    property: PropertyArg,
    files: &[PathBuf],
    permit_set: &Option<PathBuf>,
    deny_set: &Option<PathBuf>,
    set: &Option<PathBuf>,
    child: Option<usize>,
    strict: bool,
) -> Result<u8, CliError> {
    let opts = &ctx.opts;
    let report = match property {
        PropertyArg::Complete => {
            let (docs, domain) = split_files(files, 1, true)?;
            let cfg = ctx.config(None);
            analyzer::check_completeness(&docs[0], &domain.expect("required"), &cfg, strict, opts)?
        }
        PropertyArg::Redundant => {
            let (docs, domain) = split_files(files, 1, true)?;
            let index = child.ok_or_else(|| CliError::Input("`--child` is required for redundancy".into()))?;
            let cfg = ctx.config(None);
            analyzer::check_redundancy(&docs[0], index, &domain.expect("required"), &cfg, opts)?
        }
        PropertyArg::Disjoint => {
            let (docs, domain) = split_files(files, 2, true)?;
            let cfg = ctx.config(None);
            analyzer::check_disjointness(&docs[0], &docs[1], &domain.expect("required"), &cfg, opts)?
        }
        PropertyArg::Covers => {
            let (docs, domain) = split_files(files, 2, set.is_none())?;
            let (requests, from_set) = match set {
                Some(p) => load_set(p, domain.as_ref())?,
                None => (RequestSetSpec::all(domain.expect("required")), None),
            };
            let cfg = ctx.config(from_set);
            analyzer::check_coverage(&docs[0], &docs[1], &requests, &cfg, opts)?
        }
        PropertyArg::Enforce => {
            let (docs, domain) = split_files(files, 1, false)?;
            let (permit, cfg_p) = load_set(need(permit_set, "--permit-set")?, domain.as_ref())?;
            let (deny, cfg_d) = load_set(need(deny_set, "--deny-set")?, domain.as_ref())?;
            let cfg = ctx.config(cfg_p.or(cfg_d));
            analyzer::check_enforcement(&docs[0], &permit, &deny, &cfg, opts)?
        }
        PropertyArg::LeastPrivilege => {
            let (docs, domain) = split_files(files, 1, false)?;
            let (permit, from_set) = load_set(need(permit_set, "--permit-set")?, domain.as_ref())?;
            let cfg = ctx.config(from_set);
            analyzer::check_least_privilege(&docs[0], &permit, &cfg, opts)?
        }
    };
    Ok(ctx.report(&report))
}

fn parse_query(query: &str) -> Result<(Option<Decision>, Option<PathBuf>), CliError> {
    let reach = |d| Ok((Some(d), None));
    match query {
        "reach:permit" => reach(Decision::Permit),
        "reach:deny" => reach(Decision::Deny),
        "reach:na" => reach(Decision::NotApplicable),
        "reach:indet" => reach(Decision::Indeterminate),
        "complete" => Ok((None, None)),
        q => match q.strip_prefix("disjoint:") {
            Some(file) if !file.is_empty() => Ok((None, Some(PathBuf::from(file)))),
            _ => Err(CliError::Input(format!(
                "unknown query `{q}`; expected reach:permit|reach:deny|reach:na|reach:indet|complete|disjoint:<file>"
            ))),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode(
    ctx: &Context,
    policy: &Path,
    domain: &Path,
    query: &str,
    output: &Option<PathBuf>,
    solve: bool,
    timeout: u64,
    solver: &Option<PathBuf>,
) -> Result<u8, CliError> {
    let (reach, other_path) = parse_query(query)?;
    let doc = load_policy(policy)?;
    let domain = load_domain(domain)?;
    let other = other_path.as_deref().map(load_policy).transpose()?;
    let cfg = ctx.config(None);
    let q = match (reach, &other) {
        (Some(d), _) => Query::Reach(d),
        (None, Some(o)) => Query::Disjointness(o),
        (None, None) => Query::Completeness,
    };
    let (enc, goal) = smt::encode_query(&doc, &domain, &cfg, q)?;
    let script = enc.emit(goal);
    match output {
        Some(path) => fs::write(path, &script)
            .map_err(|e| CliError::Resource(format!("{}: {e}", path.display())))?,
        None if !solve => print!("{script}"),
        None => {}
    }
    if !solve {
        return Ok(0);
    }
    let solver = Solver::locate(solver.as_deref()).with_timeout(Duration::from_secs(timeout));
    let out = solver.run(&script)?;
    println!("{}", out.verdict);
    if out.verdict == Verdict::Sat {
        let model = out.model.ok_or_else(|| CliError::Resource("solver answered sat without a model".into()))?;
        let witness = enc.decode_model(&model)?;
        print!("{witness}");
        let decision = doc.evaluate(&witness, &cfg);
        match &other {
            Some(o) => println!("; evaluator: {decision}, {}", o.evaluate(&witness, &cfg)),
            None => println!("; evaluator: {decision}"),
        }
    }
    Ok(0)
}

fn cmd_eval(ctx: &Context, policy: &Path, request: &Path) -> Result<u8, CliError> {
    let doc = load_policy(policy)?;
    let req = source(request, parser::parse_request(&read(request)?))?;
    println!("{}", doc.evaluate(&req, &ctx.config(None)));
    Ok(0)
}

fn cmd_case_study(ctx: &Context) -> Result<u8, CliError> {
    let study = casestudy::run(ctx.opts.cap)?;
    match ctx.format {
        Format::Text => print!("{}", study.render_text()),
        Format::Tsv => print!("{}", study.render_tsv()),
    }
    Ok(u8::from(!study.all_as_expected()))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let config = cli.config.as_deref().map(load_config).transpose()?;
    let ctx = Context {
        config,
        opts: Options { cap: cli.cap, witness_cap: cli.witnesses.max(1) },
        format: cli.format,
    };
    match &cli.command {
        Command::Eval { policy, request } => cmd_eval(&ctx, policy, request),
        Command::Check { property, files, permit_set, deny_set, set, child, strict } => {
            cmd_check(&ctx, *property, files, permit_set, deny_set, set, *child, *strict)
        }
        Command::Encode { policy, domain, query, output, solve, timeout, solver } => {
            cmd_encode(&ctx, policy, domain, query, output, *solve, *timeout, solver)
        }
        Command::CaseStudy => cmd_case_study(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match run(&cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("facpl: {e}");
            e.status()
        }
    };
    let _ = std::io::stdout().flush();
    ExitCode::from(status)
}
