//! Command-line front end: argument parsing into a [`RunConfig`] and
//! dispatch to the library with report emission.
//!
//! Exit codes: 0 when every verdict is clean, 1 when a violation was found
//! (the report is still written), 2 on usage or runtime errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dim::{
    cover_multiplicity, greedy_parts, min_parts_exact, nagata_check, nagata_scan, net_cover, verify_decomposition,
    DimError, ExhaustiveLimits,
};
use crate::heisenberg::{
    bfs_word_lengths, claim1_word, nagata_constant_scan, profile_from_table, BfsBudget, GeneratingSet, DEFAULT_RADIUS,
    DEFAULT_WORD_CONSTANT,
};
use crate::maps::{MapError, MapFile, MetricMap};
use crate::metric::{FiniteMetricSpace, SpaceFile, DEFAULT_REL_TOL};
use crate::report::{self, Format, Table};

pub const TOLERANCE_ENV: &str = "NAGATA_TOL";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("unknown flag {0}")]
    UnknownFlag(String),
    #[error("missing required input {0}")]
    MissingInput(String),
    #[error("bad value for {flag}: {message}")]
    BadParameter { flag: String, message: String },
    #[error("{0}")]
    Usage(String),
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Info(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Validate {
        space: PathBuf,
        p: Option<f64>,
        s: Option<f64>,
        emit_space: Option<PathBuf>,
    },
    Nagata {
        space: PathBuf,
        n: usize,
        r: Option<f64>,
        midpoints: bool,
    },
    Decompose {
        space: PathBuf,
        r: f64,
        k: f64,
        n: Option<usize>,
        parts: Option<PathBuf>,
    },
    Cover {
        space: PathBuf,
        r: f64,
        s: Option<f64>,
        n: Option<usize>,
    },
    MapCheck {
        map: PathBuf,
        normalize: bool,
        emit_map: Option<PathBuf>,
    },
    Pullback {
        map: PathBuf,
        parts: PathBuf,
        r: f64,
        k: f64,
    },
    FiberCover {
        map: PathBuf,
        parts: PathBuf,
        subset: Option<Vec<usize>>,
        r: f64,
        big_r: f64,
        c: f64,
    },
    HeisenbergWord {
        k: i64,
        constant: f64,
    },
    HeisenbergProfile {
        radius: u32,
        generators: GeneratingSet,
        max_states: usize,
    },
    NagataConstant {
        scan_end: u64,
    },
}

#[derive(Parser, Debug)]
#[command(name = "nagata", version, about = "Finite Nagata and Assouad-Nagata certificates")]
struct Cli {
    /// Report destination; standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "json|csv", default_value = "json")]
    format: String,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Validate a space; optionally snowflake (--p) or rescale (--s) it.
    Validate(ValidateArgs),
    /// Search for Nagata violations at one scale or over all distance scales.
    Nagata(NagataArgs),
    /// Greedy and exact decompositions with K*r-bounded r-components.
    Decompose(DecomposeArgs),
    /// Net cover at scale r and its multiplicity at s.
    Cover(CoverArgs),
    /// Lipschitz and openness constants, fiber geometry and ball images.
    MapCheck(MapCheckArgs),
    /// Pull codomain parts back along a map and check the 4K+r bound.
    Pullback(PullbackArgs),
    /// Cover a subset by neighbourhoods of fiber parts and check the bound.
    FiberCover(FiberCoverArgs),
    /// Explicit {a,b}-word for c^k.
    HeisenbergWord(WordArgs),
    /// Exact central word lengths by breadth-first search.
    HeisenbergProfile(ProfileArgs),
    /// Certificate for the word-length constant.
    NagataConstant(ConstantArgs),
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_name = "FILE")]
    space: Option<PathBuf>,
    /// Snowflake exponent in (0, 1].
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    p: Option<f64>,
    /// Rescaling factor: distances are divided by s.
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    s: Option<f64>,
    /// Write the (transformed) space as a reloadable JSON file.
    #[arg(long, value_name = "FILE")]
    emit_space: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NagataArgs {
    #[arg(long, value_name = "FILE")]
    space: Option<PathBuf>,
    #[arg(long, value_name = "INT", default_value_t = 0, allow_negative_numbers = true)]
    n: i64,
    /// Single scale; all pairwise distances when absent.
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    r: Option<f64>,
    /// Add midpoints between consecutive distances to the scan.
    #[arg(long)]
    midpoints: bool,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long, value_name = "FILE")]
    space: Option<PathBuf>,
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long = "K", value_name = "FLOAT", allow_negative_numbers = true)]
    k_factor: Option<f64>,
    /// Ask whether n+1 parts suffice; a negative answer is a violation.
    #[arg(long, value_name = "INT", allow_negative_numbers = true)]
    n: Option<i64>,
    /// JSON part list to verify instead of only searching.
    #[arg(long, value_name = "FILE")]
    parts: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoverArgs {
    #[arg(long, value_name = "FILE")]
    space: Option<PathBuf>,
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    r: Option<f64>,
    /// Multiplicity radius; r/2 when absent.
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    s: Option<f64>,
    /// Flag a violation when the multiplicity exceeds n+1.
    #[arg(long, value_name = "INT", allow_negative_numbers = true)]
    n: Option<i64>,
}

#[derive(Args, Debug)]
struct MapCheckArgs {
    #[arg(long, value_name = "FILE")]
    map: Option<PathBuf>,
    /// Rescale the codomain so that the openness constant is 1.
    #[arg(long)]
    normalize: bool,
    /// Write the (normalized) map as a reloadable JSON file.
    #[arg(long, value_name = "FILE")]
    emit_map: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PullbackArgs {
    #[arg(long, value_name = "FILE")]
    map: Option<PathBuf>,
    /// JSON list of codomain parts.
    #[arg(long, value_name = "FILE")]
    parts: Option<PathBuf>,
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long = "K", value_name = "FLOAT", allow_negative_numbers = true)]
    k_factor: Option<f64>,
}

#[derive(Args, Debug)]
struct FiberCoverArgs {
    #[arg(long, value_name = "FILE")]
    map: Option<PathBuf>,
    /// JSON list of parts of the base fiber.
    #[arg(long, value_name = "FILE")]
    parts: Option<PathBuf>,
    /// Comma-separated domain indices; the whole domain when absent.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    /// Domain scale r_X.
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    r: Option<f64>,
    /// Codomain radius R_Y.
    #[arg(long = "R", value_name = "FLOAT", allow_negative_numbers = true)]
    big_r: Option<f64>,
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    c: Option<f64>,
}

#[derive(Args, Debug)]
struct WordArgs {
    #[arg(long, value_name = "INT", allow_negative_numbers = true)]
    k: Option<i64>,
    /// Length constant; at least 12 + 6 sqrt 2.
    #[arg(long = "K", value_name = "FLOAT", allow_negative_numbers = true)]
    constant: Option<f64>,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// Search radius.
    #[arg(long = "L", value_name = "INT", allow_negative_numbers = true)]
    radius: Option<i64>,
    #[arg(long, value_name = "ab|abc", default_value = "ab")]
    generators: String,
    #[arg(long, value_name = "INT", default_value_t = BfsBudget::default().max_states)]
    max_states: usize,
}

#[derive(Args, Debug)]
struct ConstantArgs {
    /// Last index of the scan.
    #[arg(long, value_name = "INT", default_value_t = 1_000_000)]
    scan_end: u64,
}

fn bad(flag: &str, message: impl Into<String>) -> CliError {
    CliError::BadParameter {
        flag: flag.to_string(),
        message: message.into(),
    }
}

fn positive(flag: &str, value: Option<f64>) -> Result<Option<f64>, CliError> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(bad(flag, format!("must be positive and finite, got {v}"))),
        other => Ok(other),
    }
}

fn non_negative(flag: &str, value: Option<i64>) -> Result<Option<usize>, CliError> {
    match value {
        Some(v) if v < 0 => Err(bad(flag, format!("must be non-negative, got {v}"))),
        Some(v) => usize::try_from(v).map(Some).map_err(|_| bad(flag, "out of range")),
        None => Ok(None),
    }
}

fn required<T>(flag: &str, value: Option<T>) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::MissingInput(flag.to_string()))
}

fn flag_of(err: &clap::Error) -> String {
    match err.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => s.split_whitespace().next().unwrap_or(s).to_string(),
        Some(ContextValue::Strings(v)) => v
            .first()
            .map(|s| s.split_whitespace().next().unwrap_or(s).to_string())
            .unwrap_or_default(),
        _ => String::new(),
    }
}

fn from_clap(err: clap::Error) -> CliError {
    let first_line = err
        .to_string()
        .lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string();
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            CliError::Info(err.to_string())
        }
        ErrorKind::UnknownArgument => CliError::UnknownFlag(flag_of(&err)),
        ErrorKind::MissingRequiredArgument => CliError::MissingInput(flag_of(&err)),
        ErrorKind::InvalidValue | ErrorKind::ValueValidation => CliError::BadParameter {
            flag: flag_of(&err),
            message: first_line,
        },
        _ => CliError::Usage(first_line),
    }
}

/// Parses arguments (without the program name), reading the tolerance
/// override from the environment.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(TOLERANCE_ENV).ok();
    parse_args_with_tolerance(argv, env.as_deref())
}

/// [`parse_args`] with an explicit value for the tolerance override.
pub fn parse_args_with_tolerance<I, T>(argv: I, tol_override: Option<&str>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("nagata")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(from_clap)?;
    let format: Format = cli.format.parse().map_err(|m: String| bad("--format", m))?;
    let rel_tol = match tol_override {
        None => DEFAULT_REL_TOL,
        Some(text) => match text.trim().parse::<f64>() {
            Ok(t) if (0.0..1.0).contains(&t) => t,
            _ => return Err(bad(TOLERANCE_ENV, format!("expected a number in [0, 1), got {text:?}"))),
        },
    };
    let command = match cli.command {
        Sub::Validate(a) => {
            let p = match a.p {
                Some(p) if !(p > 0.0 && p <= 1.0) => return Err(bad("--p", format!("must lie in (0, 1], got {p}"))),
                other => other,
            };
            let s = positive("--s", a.s)?;
            Command::Validate {
                space: required("--space", a.space)?,
                p,
                s,
                emit_space: a.emit_space,
            }
        }
        Sub::Nagata(a) => {
            let n = non_negative("--n", Some(a.n))?.unwrap_or(0);
            let r = positive("--r", a.r)?;
            Command::Nagata {
                space: required("--space", a.space)?,
                n,
                r,
                midpoints: a.midpoints,
            }
        }
        Sub::Decompose(a) => {
            let r = positive("--r", a.r)?;
            let k = positive("--K", a.k_factor)?;
            let n = non_negative("--n", a.n)?;
            Command::Decompose {
                space: required("--space", a.space)?,
                r: required("--r", r)?,
                k: required("--K", k)?,
                n,
                parts: a.parts,
            }
        }
        Sub::Cover(a) => {
            let r = positive("--r", a.r)?;
            let s = positive("--s", a.s)?;
            let n = non_negative("--n", a.n)?;
            Command::Cover {
                space: required("--space", a.space)?,
                r: required("--r", r)?,
                s,
                n,
            }
        }
        Sub::MapCheck(a) => Command::MapCheck {
            map: required("--map", a.map)?,
            normalize: a.normalize,
            emit_map: a.emit_map,
        },
        Sub::Pullback(a) => {
            let r = positive("--r", a.r)?;
            let k = match a.k_factor {
                Some(k) if !(k >= 0.0 && k.is_finite()) => {
                    return Err(bad("--K", format!("must be non-negative, got {k}")))
                }
                other => other,
            };
            Command::Pullback {
                map: required("--map", a.map)?,
                parts: required("--parts", a.parts)?,
                r: required("--r", r)?,
                k: required("--K", k)?,
            }
        }
        Sub::FiberCover(a) => {
            let r = positive("--r", a.r)?;
            let big_r = positive("--R", a.big_r)?;
            let c = positive("--c", a.c)?;
            if a.subset.as_ref().is_some_and(Vec::is_empty) {
                return Err(bad("--subset", "must not be empty"));
            }
            Command::FiberCover {
                map: required("--map", a.map)?,
                parts: required("--parts", a.parts)?,
                subset: a.subset,
                r: required("--r", r)?,
                big_r: required("--R", big_r)?,
                c: required("--c", c)?,
            }
        }
        Sub::HeisenbergWord(a) => {
            let constant = positive("--K", a.constant)?.unwrap_or(DEFAULT_WORD_CONSTANT);
            let k = required("--k", a.k)?;
            if k == i64::MIN {
                return Err(bad("--k", "out of range"));
            }
            Command::HeisenbergWord { k, constant }
        }
        Sub::HeisenbergProfile(a) => {
            let radius = match a.radius {
                None => DEFAULT_RADIUS,
                Some(l) => {
                    u32::try_from(l).map_err(|_| bad("--L", format!("must be a non-negative radius, got {l}")))?
                }
            };
            let generators = match a.generators.as_str() {
                "ab" => GeneratingSet::Ab,
                "abc" => GeneratingSet::Abc,
                other => return Err(bad("--generators", format!("expected ab or abc, got {other:?}"))),
            };
            Command::HeisenbergProfile {
                radius,
                generators,
                max_states: a.max_states,
            }
        }
        Sub::NagataConstant(a) => {
            if a.scan_end < 2 {
                return Err(bad("--scan-end", "must be at least 2"));
            }
            Command::NagataConstant { scan_end: a.scan_end }
        }
    };
    Ok(RunConfig {
        command,
        out: cli.out,
        format,
        rel_tol,
    })
}

/// Result of a completed run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub violations: bool,
    pub report: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.violations)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PartsFile {
    Bare(Vec<Vec<usize>>),
    Wrapped { parts: Vec<Vec<usize>> },
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {what} file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} file {}", path.display()))
}

fn load_space(path: &Path, rel_tol: f64) -> Result<FiniteMetricSpace> {
    let file: SpaceFile = read_json(path, "space")?;
    file.into_space(rel_tol)
        .with_context(|| format!("validating space {}", path.display()))
}

fn load_map(path: &Path, rel_tol: f64) -> Result<MetricMap> {
    let file: MapFile = read_json(path, "map")?;
    file.into_map(rel_tol)
        .with_context(|| format!("validating map {}", path.display()))
}

fn load_parts(path: &Path) -> Result<Vec<Vec<usize>>> {
    Ok(match read_json::<PartsFile>(path, "parts")? {
        PartsFile::Bare(p) | PartsFile::Wrapped { parts: p } => p,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Builds the report for `config` and whether it records a violation.
pub fn evaluate(config: &RunConfig) -> Result<(Value, Option<Table>, bool)> {
    let tol = config.rel_tol;
    Ok(match &config.command {
        Command::Validate {
            space,
            p,
            s,
            emit_space,
        } => {
            let mut x = load_space(space, tol)?;
            if let Some(p) = p {
                x = x.snowflake(*p)?;
            }
            if let Some(s) = s {
                x = x.rescale(*s)?;
            }
            if let Some(path) = emit_space {
                write_file(path, &report::to_exact_json(&x.to_file())?)?;
            }
            let value = json!({
                "command": "validate",
                "points": x.len(),
                "valid": true,
                "ultrametric": x.is_ultrametric(),
                "ultrametric_violation": x.ultrametric_violation(),
                "max_distance": x.max_distance(),
                "rel_tol": x.rel_tolerance(),
                "abs_tol": x.tolerance().abs(),
                "snowflake_exponent": p,
                "rescale_factor": s,
            });
            (value, None, false)
        }
        Command::Nagata { space, n, r, midpoints } => {
            let x = load_space(space, tol)?;
            let reports = match r {
                Some(r) => vec![nagata_check(&x, *n, *r)?],
                None => nagata_scan(&x, *n, None, *midpoints)?,
            };
            let violations = reports.iter().filter(|rep| !rep.is_ok()).count();
            let value = json!({
                "command": "nagata",
                "n": n,
                "points": x.len(),
                "scales": reports,
                "violations": violations,
                "verdict": if violations == 0 { "ok" } else { "violation" },
            });
            (value, Some(report::nagata_table(&reports)), violations > 0)
        }
        Command::Decompose { space, r, k, n, parts } => {
            let x = load_space(space, tol)?;
            let greedy = greedy_parts(&x, *r, *k)?;
            let greedy_check = verify_decomposition(&x, &greedy.parts, *r, *k)?;
            let limits = ExhaustiveLimits {
                max_parts: n.map_or(ExhaustiveLimits::default().max_parts, |n| n + 1),
                ..ExhaustiveLimits::default()
            };
            let (exact, exact_status) = match min_parts_exact(&x, *r, *k, limits) {
                Ok(e) => (Some(e), "found".to_string()),
                Err(DimError::TooLarge { .. }) => (None, "too_large".to_string()),
                Err(DimError::PartLimitExceeded { .. }) => (None, "part_limit_exceeded".to_string()),
                Err(e) => return Err(e.into()),
            };
            let mut violation = n.is_some() && exact_status == "part_limit_exceeded";
            let given = match parts {
                Some(path) => {
                    let p = load_parts(path)?;
                    let check = verify_decomposition(&x, &p, *r, *k)?;
                    violation |= !check.is_ok();
                    Some(json!({ "parts": p, "check": check }))
                }
                None => None,
            };
            let mut table = Table::new(["method", "part", "point"]);
            let mut add = |method: &str, parts: &[Vec<usize>]| {
                for (i, part) in parts.iter().enumerate() {
                    for pt in part {
                        table.push(vec![method.to_string(), i.to_string(), pt.to_string()]);
                    }
                }
            };
            add("greedy", &greedy.parts);
            if let Some(e) = &exact {
                add("exact", &e.decomposition.parts);
            }
            if let Some(g) = &given {
                let p: Vec<Vec<usize>> = serde_json::from_value(g["parts"].clone())?;
                add("given", &p);
            }
            let value = json!({
                "command": "decompose",
                "r": r,
                "K": k,
                "greedy": greedy,
                "greedy_check": greedy_check,
                "exact": exact,
                "exact_status": exact_status,
                "given": given,
                "verdict": if violation { "violation" } else { "ok" },
            });
            (value, Some(table), violation)
        }
        Command::Cover { space, r, s, n } => {
            let x = load_space(space, tol)?;
            let s = s.unwrap_or(r / 2.0);
            let cover = net_cover(&x, *r)?;
            let multiplicity = cover_multiplicity(&x, &cover.elements, s)?;
            let violation = n.is_some_and(|n| multiplicity.count > n + 1);
            let value = json!({
                "command": "cover",
                "cover": cover,
                "multiplicity": multiplicity,
                "n": n,
                "verdict": if violation { "violation" } else { "ok" },
            });
            (value, None, violation)
        }
        Command::MapCheck {
            map,
            normalize,
            emit_map,
        } => {
            let mut f = load_map(map, tol)?;
            if *normalize {
                f = f.normalize_openness()?;
            }
            if let Some(path) = emit_map {
                write_file(path, &report::to_exact_json(&f.to_file())?)?;
            }
            let analysis = f.analysis();
            let parallel = f.check_parallel_fibers();
            let brodskiy = f.check_brodskiy(analysis.mu, None)?;
            let (fiber_space, fiber_error) = match f.fiber_space_check() {
                Ok(rep) => (Some(rep), None),
                Err(MapError::DegenerateMap) => (None, Some(MapError::DegenerateMap.to_string())),
                Err(e) => return Err(e.into()),
            };
            let violation = !brodskiy.holds() || fiber_space.as_ref().is_some_and(|r| !r.ok);
            let value = json!({
                "command": "map-check",
                "normalized": normalize,
                "surjective": f.is_surjective(),
                "analysis": analysis,
                "parallel_fibers": parallel,
                "brodskiy": brodskiy,
                "fiber_space": fiber_space,
                "fiber_space_error": fiber_error,
                "verdict": if violation { "violation" } else { "ok" },
            });
            (value, None, violation)
        }
        Command::Pullback { map, parts, r, k } => {
            let f = load_map(map, tol)?;
            let y_parts = load_parts(parts)?;
            match f.pullback_decomposition(&y_parts, *r, *k) {
                Ok(rep) => (
                    json!({ "command": "pullback", "report": rep, "verdict": "ok" }),
                    None,
                    false,
                ),
                Err(MapError::BoundViolated { measured, bound }) => (
                    json!({ "command": "pullback", "measured": measured, "bound": bound, "verdict": "violation" }),
                    None,
                    true,
                ),
                Err(e) => return Err(e.into()),
            }
        }
        Command::FiberCover {
            map,
            parts,
            subset,
            r,
            big_r,
            c,
        } => {
            let f = load_map(map, tol)?;
            let fiber_parts = load_parts(parts)?;
            let subset: Vec<usize> = subset.clone().unwrap_or_else(|| (0..f.domain().len()).collect());
            match f.fiber_cover(&subset, *r, *big_r, *c, &fiber_parts) {
                Ok(rep) => (
                    json!({ "command": "fiber-cover", "report": rep, "verdict": "ok" }),
                    None,
                    false,
                ),
                Err(MapError::BoundViolated { measured, bound }) => (
                    json!({ "command": "fiber-cover", "measured": measured, "bound": bound, "verdict": "violation" }),
                    None,
                    true,
                ),
                Err(e) => return Err(e.into()),
            }
        }
        Command::HeisenbergWord { k, constant } => {
            let word = claim1_word(*k, *constant)?;
            let g = word.evaluate();
            let value = json!({
                "command": "heisenberg-word",
                "k": k,
                "constant": constant,
                "word": word.to_string(),
                "length": word.len(),
                "bound": constant * (k.unsigned_abs() as f64).sqrt(),
                "evaluates_to": [g.x.to_string(), g.y.to_string(), g.z.to_string()],
            });
            (value, None, false)
        }
        Command::HeisenbergProfile {
            radius,
            generators,
            max_states,
        } => {
            let table = bfs_word_lengths(
                *radius,
                *generators,
                BfsBudget {
                    max_states: *max_states,
                },
            )?;
            let profile = profile_from_table(&table)?;
            let rows: Vec<Value> = profile
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "k": row.k,
                        "exact_length": row.exact_length,
                        "claim1_length": row.claim1_length,
                        "lower_bound": row.lower_bound,
                        "ratio": row.ratio(),
                    })
                })
                .collect();
            let value = json!({
                "command": "heisenberg-profile",
                "radius": profile.radius,
                "generators": profile.generators,
                "states": table.len(),
                "sphere_sizes": table.sphere_sizes(),
                "rows": rows,
            });
            (value, Some(report::profile_table(&profile)), false)
        }
        Command::NagataConstant { scan_end } => {
            let cert = nagata_constant_scan(*scan_end);
            let violation = !cert.strictly_decreasing || cert.argmax != cert.scan_start;
            let value = json!({ "command": "nagata-constant", "certificate": cert });
            (value, None, violation)
        }
    })
}

/// Evaluates `config`, renders the report in the requested format and
/// writes it to the configured destination.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let (value, table, violations) = evaluate(config)?;
    let text = match config.format {
        Format::Json => report::to_stable_json(&value)?,
        Format::Csv => table
            .unwrap_or_else(|| report::flat_table(&report::stable_value(&value).unwrap_or(Value::Null)))
            .to_csv(),
    };
    report::emit(&text, config.out.as_deref()).with_context(|| {
        format!(
            "writing report to {}",
            config
                .out
                .as_deref()
                .map_or("stdout".into(), |p| p.display().to_string())
        )
    })?;
    Ok(Outcome {
        violations,
        report: text,
    })
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(CliError::Info(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Result<RunConfig, CliError> {
        parse_args_with_tolerance(argv.iter().copied(), None)
    }

    #[test]
    fn parses_nagata_check() {
        let c = parse(&["nagata", "--space", "x.json", "--n", "1", "--r", "2.5"]).unwrap();
        assert_eq!(
            c.command,
            Command::Nagata {
                space: "x.json".into(),
                n: 1,
                r: Some(2.5),
                midpoints: false
            }
        );
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.rel_tol, DEFAULT_REL_TOL);
    }

    #[test]
    fn parses_profile() {
        let c = parse(&["heisenberg-profile", "--L", "40"]).unwrap();
        assert_eq!(
            c.command,
            Command::HeisenbergProfile {
                radius: 40,
                generators: GeneratingSet::Ab,
                max_states: BfsBudget::default().max_states
            }
        );
    }

    #[test]
    fn negative_n_is_bad_parameter() {
        match parse(&["nagata", "--n", "-1"]) {
            Err(CliError::BadParameter { flag, .. }) => assert_eq!(flag, "--n"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn usage_errors_name_flags() {
        assert_eq!(
            parse(&["nagata", "--bogus"]),
            Err(CliError::UnknownFlag("--bogus".into()))
        );
        assert_eq!(parse(&["nagata"]), Err(CliError::MissingInput("--space".into())));
        assert_eq!(
            parse(&["decompose", "--space", "x", "--r", "1"]),
            Err(CliError::MissingInput("--K".into()))
        );
        match parse(&["nagata", "--space", "x", "--r", "abc"]) {
            Err(CliError::BadParameter { flag, .. }) => assert_eq!(flag, "--r"),
            other => panic!("unexpected {other:?}"),
        }
        match parse(&["nagata", "--space", "x", "--r", "0"]) {
            Err(CliError::BadParameter { flag, .. }) => assert_eq!(flag, "--r"),
            other => panic!("unexpected {other:?}"),
        }
        match parse(&["validate", "--space", "x", "--format", "xml"]) {
            Err(CliError::BadParameter { flag, .. }) => assert_eq!(flag, "--format"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tolerance_override() {
        let c = parse_args_with_tolerance(["heisenberg-word", "--k", "5"], Some("1e-6")).unwrap();
        assert_eq!(c.rel_tol, 1e-6);
        match parse_args_with_tolerance(["heisenberg-word", "--k", "5"], Some("big")) {
            Err(CliError::BadParameter { flag, .. }) => assert_eq!(flag, TOLERANCE_ENV),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn word_report() {
        let c = parse(&["heisenberg-word", "--k", "5"]).unwrap();
        let (value, _, violation) = evaluate(&c).unwrap();
        assert!(!violation);
        assert_eq!(value["length"], 12);
        assert_eq!(value["word"], "aabbAABBabAB");
        assert_eq!(value["evaluates_to"], json!(["0", "0", "5"]));
    }

    #[test]
    fn help_is_info() {
        assert!(matches!(parse(&["--help"]), Err(CliError::Info(_))));
    }
}
