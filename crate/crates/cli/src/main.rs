//! `brauer-casimir` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage, 3 pole,
//! 4 non-central input.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use brauer_casimir::casimir::{build_casimir, render_image, CasimirError, CasimirSpec, OmegaMode, Projector, Shifts};
use brauer_casimir::liealg::{uea_from_json, uea_to_json, Enveloping, LieError, UeaJson};
use brauer_casimir::ring::{MPolyJson, Rational};
use brauer_casimir::suites::{self, CriterionOutcome, Instance, Suite, DEFAULT_SEED};
use brauer_casimir::tensor::{ActionConfig, Family};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_POLE: u8 = 3;
const EXIT_NON_CENTRAL: u8 = 4;

#[derive(Parser)]
#[command(name = "brauer-casimir", version, about = "Exact Brauer-algebra Casimir elements and their Harish-Chandra images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a trace-form Casimir element and write it as JSON.
    Build(BuildArgs),
    /// Harish-Chandra image of a central element read as JSON.
    Hc(HcArgs),
    /// Run verification suites and print a report table.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Coupled,
    FixedDimension,
    Direct,
}

impl From<Mode> for OmegaMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Coupled => OmegaMode::Coupled,
            Mode::FixedDimension => OmegaMode::FixedDimension,
            Mode::Direct => OmegaMode::Direct,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    /// `o` or `sp`.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long = "N")]
    dim: usize,
    #[arg(long, value_parser = parse_projector)]
    projector: Projector,
    /// Theorem element of degree 2k with its fixed integer shifts.
    #[arg(long, conflicts_with = "m", required_unless_present = "m")]
    k: Option<usize>,
    /// Degree m; shifts default to `symbolic`.
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated rationals such as `1,-1/2,0`, or `symbolic`.
    #[arg(long, allow_hyphen_values = true)]
    shifts: Option<String>,
    #[arg(long, value_enum, default_value = "coupled")]
    mode: Mode,
    /// Evaluate at omega = ±N before contracting (same as `--mode direct`).
    #[arg(long)]
    no_omega_limit: bool,
    /// Skip the normalizing factor of the symplectic symmetrizer.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HcArgs {
    /// Element JSON; standard input when omitted or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long = "N")]
    dim: Option<usize>,
    #[arg(long, value_parser = parse_projector)]
    projector: Option<Projector>,
    #[arg(long)]
    k: Option<usize>,
    /// Degree for corollaries; largest Brauer degree for `brauer`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "max-N")]
    max_dim: Option<usize>,
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long)]
    max_m: Option<usize>,
    #[arg(long, value_enum, default_value = "coupled")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Include wall-clock timings (output is then not reproducible).
    #[arg(long)]
    timings: bool,
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::parse(s).ok_or_else(|| format!("unknown family `{s}` (expected o or sp)"))
}

fn parse_projector(s: &str) -> Result<Projector, String> {
    Projector::parse(s).ok_or_else(|| format!("unknown projector `{s}` (expected sym or asym)"))
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CasimirError> for Failure {
    fn from(e: CasimirError) -> Self {
        let code = if e.is_pole() {
            EXIT_POLE
        } else if e.is_non_central() {
            EXIT_NON_CENTRAL
        } else if matches!(e, CasimirError::Invalid(_)) {
            EXIT_USAGE
        } else {
            EXIT_FAIL
        };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(EXIT_FAIL, e.to_string())
    }
}

fn config(family: Family, dim: usize) -> Result<ActionConfig, Failure> {
    ActionConfig::new(family, dim).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

fn environment(cfg: ActionConfig) -> Result<Enveloping, Failure> {
    Enveloping::for_config(cfg).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_shifts(s: &str, m: usize) -> Result<Shifts, Failure> {
    if s == "symbolic" {
        return Ok(Shifts::Symbolic);
    }
    let values = s
        .split(',')
        .map(|t| Rational::from_str(t.trim()).map_err(|_| Failure::new(EXIT_USAGE, format!("bad shift `{t}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != m {
        return Err(Failure::new(EXIT_USAGE, format!("expected {m} shifts, got {}", values.len())));
    }
    Ok(Shifts::Explicit(values))
}

fn cmd_build(a: BuildArgs) -> Result<(), Failure> {
    let cfg = config(a.family, a.dim)?;
    let mut spec = match (a.k, a.m) {
        (Some(k), _) => CasimirSpec::theorem(cfg, a.projector, k),
        (None, Some(m)) => CasimirSpec::corollary(cfg, a.projector, m),
        (None, None) => unreachable!("clap requires --k or --m"),
    };
    if let Some(s) = &a.shifts {
        spec.shifts = parse_shifts(s, spec.m)?;
    }
    spec.mode = if a.no_omega_limit { OmegaMode::Direct } else { a.mode.into() };
    spec.normalize = !a.no_normalize;
    spec.validate()?;
    let env = environment(cfg)?;
    let z = build_casimir(&spec, &env)?;
    let text = match a.format {
        Format::Json => pretty(&uea_to_json(env.basis(), &z)),
        Format::Text => format!("{}\n", z.render(env.basis())),
    };
    write_output(a.output.as_ref(), &text)
}

fn cmd_hc(a: HcArgs) -> Result<(), Failure> {
    let mut raw = String::new();
    match &a.input {
        Some(p) if p.as_os_str() != "-" => raw = fs::read_to_string(p)?,
        _ => {
            io::stdin().read_to_string(&mut raw)?;
        }
    }
    let j: UeaJson =
        serde_json::from_str(&raw).map_err(|e| Failure::new(EXIT_USAGE, format!("invalid element JSON: {e}")))?;
    let cfg = config(j.family, j.dim)?;
    let env = environment(cfg)?;
    let z = uea_from_json(env.basis(), &j).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let chi = env.hc_image(&z).map_err(|e| match e {
        LieError::NonCentral { .. } => Failure::new(EXIT_NON_CENTRAL, e.to_string()),
        other => Failure::new(EXIT_FAIL, other.to_string()),
    })?;
    let (lambda, shifted) = render_image(&cfg, &chi);
    let text = match a.format {
        Format::Json => pretty(&json!({
            "family": cfg.family,
            "N": cfg.dim,
            "chi": MPolyJson::from(&chi),
            "lambda": lambda,
            "shifted": shifted,
        })),
        Format::Text => format!("shifted: {shifted}\nlambda: {lambda}\n"),
    };
    write_output(a.output.as_ref(), &text)
}

fn keep(i: &Instance, a: &VerifyArgs, degree: Option<usize>, max_degree: Option<usize>) -> bool {
    a.family.is_none_or(|f| f == i.cfg.family)
        && a.dim.is_none_or(|n| n == i.cfg.dim)
        && a.max_dim.is_none_or(|n| i.cfg.dim <= n)
        && a.projector.is_none_or(|p| p == i.projector)
        && degree.is_none_or(|d| d == i.degree)
        && max_degree.is_none_or(|d| i.degree <= d)
}

/// Theorem instances in range. An explicit `--N` outside the default grid
/// is expanded over both projectors and `k` up to the rank.
fn theorem_instances(a: &VerifyArgs) -> Result<Vec<Instance>, Failure> {
    let mut out: Vec<Instance> = suites::theorem_grid()
        .into_iter()
        .filter(|i| keep(i, a, a.k, a.max_k))
        .collect();
    if let (Some(dim), true) = (a.dim, out.is_empty()) {
        let families = match a.family {
            Some(f) => vec![f],
            None => vec![Family::Orthogonal, Family::Symplectic],
        };
        for family in families {
            if family == Family::Symplectic && dim % 2 != 0 && a.family.is_none() {
                continue;
            }
            let cfg = config(family, dim)?;
            let top = a.k.or(a.max_k).unwrap_or(cfg.rank().max(1));
            for projector in [Projector::Sym, Projector::Asym] {
                for k in a.k.unwrap_or(1)..=top {
                    let allowed = k >= 1 && (k <= cfg.rank() || (family == Family::Orthogonal && projector == Projector::Sym));
                    let i = Instance {
                        cfg,
                        projector,
                        degree: k,
                    };
                    if allowed && keep(&i, a, a.k, a.max_k) {
                        out.push(i);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn corollary_instances(a: &VerifyArgs) -> Result<Vec<Instance>, Failure> {
    let mut out: Vec<Instance> = suites::corollary_grid()
        .into_iter()
        .filter(|i| keep(i, a, a.m, a.max_m))
        .collect();
    if let (Some(dim), true) = (a.dim, out.is_empty()) {
        let family = a.family.unwrap_or(Family::Orthogonal);
        let cfg = config(family, dim)?;
        let top = a.m.or(a.max_m).unwrap_or(4);
        for projector in [Projector::Sym, Projector::Asym] {
            for m in a.m.unwrap_or(1)..=top {
                let i = Instance {
                    cfg,
                    projector,
                    degree: m,
                };
                if keep(&i, a, a.m, a.max_m) {
                    out.push(i);
                }
            }
        }
    }
    Ok(out)
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let suite = Suite::parse(&a.suite).ok_or_else(|| {
        Failure::new(
            EXIT_USAGE,
            format!("unknown suite `{}` (expected brauer, tensor, liealg, symfun, theorems, corollaries, lemma or all)", a.suite),
        )
    })?;
    if let (Some(Family::Symplectic), Some(dim)) = (a.family, a.dim) {
        config(Family::Symplectic, dim)?;
    }
    let mode: OmegaMode = a.mode.into();
    let brauer_m = a.m.unwrap_or(5);
    let mut outcomes: Vec<CriterionOutcome> = Vec::new();
    let run = |s: Suite| matches!(suite, Suite::All) || s == suite;
    if run(Suite::Brauer) {
        outcomes.push(suites::brauer_structure(brauer_m));
        outcomes.push(suites::jucys_murphy_suite(brauer_m.min(4), brauer_m));
    }
    if run(Suite::Tensor) {
        outcomes.push(suites::representation_suite(a.seed, 50));
        outcomes.push(suites::partial_trace_suite());
    }
    if run(Suite::Liealg) {
        outcomes.push(suites::defining_relations_suite());
    }
    if run(Suite::Theorems) {
        let instances = theorem_instances(&a)?;
        if instances.is_empty() {
            return Err(Failure::new(EXIT_USAGE, "no theorem instances match the given ranges"));
        }
        outcomes.push(suites::theorem_suite(&instances, mode));
    }
    if run(Suite::Corollaries) {
        let instances = corollary_instances(&a)?;
        if instances.is_empty() {
            return Err(Failure::new(EXIT_USAGE, "no corollary instances match the given ranges"));
        }
        outcomes.push(suites::corollary_suite(&instances, mode));
    }
    if run(Suite::Lemma) {
        outcomes.push(suites::lemma_suite(a.seed, 20));
    }
    if run(Suite::Symfun) {
        outcomes.push(suites::symfun_suite());
    }
    outcomes.sort_by_key(|o| o.id);
    for o in &mut outcomes {
        o.reports.sort_by(|x, y| {
            (&x.statement, x.family.tag(), x.dim, x.k, x.m).cmp(&(&y.statement, y.family.tag(), y.dim, y.k, y.m))
        });
        if !a.timings {
            o.millis = 0;
            for r in &mut o.reports {
                r.millis = 0;
            }
        }
    }
    let text = match a.format {
        Format::Text => {
            let mut s = String::new();
            for o in &outcomes {
                s.push_str(&if a.timings { o.line() } else { o.line_untimed() });
                s.push('\n');
                for r in &o.reports {
                    s.push_str("    ");
                    s.push_str(&if a.timings { r.summary() } else { r.summary_untimed() });
                    s.push('\n');
                }
            }
            s
        }
        Format::Json => {
            let v: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "criterion": o.id,
                        "name": o.name,
                        "pass": o.pass,
                        "detail": o.detail,
                        "millis": o.millis,
                        "reports": o.reports,
                    })
                })
                .collect();
            pretty(&v)
        }
    };
    write_output(None, &text)?;
    if outcomes.iter().all(|o| o.pass) {
        Ok(())
    } else {
        Err(Failure::new(EXIT_FAIL, "verification failed"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Hc(a) => cmd_hc(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
