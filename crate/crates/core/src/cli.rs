//! The `shiftca` command line.
//!
//! Exit codes: 0 success (a failing verdict is a success), 1 bad input,
//! 2 budget exceeded or approximate result, 3 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conditions::{self, Certificate, ConditionError, Method, Status, Verdict};
use crate::invariants::{self, InvariantError};
use crate::pastsets::{PastSetError, DEFAULT_MONOID_CAP};
use crate::presentations::{Presentation, PresentationError};
use crate::repcheck::{self, RepError};
use crate::tower::{Tower, TowerDump, TowerError, DUMP_FORMAT};

pub const CACHE_ENV: &str = "SHIFTCA_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "shiftca", version, about = "Past-equivalence invariants of one-sided shift spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Presentation file (format "shiftspace-v1")
    #[arg(short, long)]
    input: PathBuf,
    /// Highest tower level to build
    #[arg(short = 'l', long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_level: u64,
    /// Cap on the relation monoid
    #[arg(long, default_value_t = DEFAULT_MONOID_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    monoid_cap: u64,
    #[arg(long)]
    json: bool,
    /// Exit 0 on approximate results
    #[arg(long)]
    allow_partial: bool,
    /// Neither read nor write the tower cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Past-equivalence classes of every level
    Classes(Common),
    /// K0 and K1 from the tower
    Kgroups(Common),
    /// Stages of the dimension group with the shift map
    DimensionGroup {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
    /// Bowen-Franks group coker(I - A)
    Bf(Common),
    /// Decide one condition
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, ignore_case = true)]
        condition: ConditionArg,
    },
    /// Lattice of gauge-invariant ideals
    Ideals(Common),
    /// Verify the operator relations on a finite truncation
    Repcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Bound on |u| + |v|
        #[arg(long, default_value_t = 4)]
        budget: usize,
        /// Bound on |u| + |v| + |w| for the degree-0 generators
        #[arg(long, default_value_t = 2)]
        grading_budget: usize,
    },
    /// K-groups of the Cuntz-Krieger algebra straight from the matrix
    OracleCk(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConditionArg {
    I,
    Star,
    Aperiodic,
    Irreducible,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Input(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<PresentationError> for CliError {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::MonoidBudgetExceeded(_) => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<PastSetError> for CliError {
    fn from(e: PastSetError) -> Self {
        match e {
            PastSetError::MonoidBudgetExceeded(_) => CliError::Budget(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::PastSet(e) => e.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Tower(e) => e.into(),
            InvariantError::WrongKind(_) => CliError::Input(e.to_string()),
            e => CliError::Budget(e.to_string()),
        }
    }
}

impl From<ConditionError> for CliError {
    fn from(e: ConditionError) -> Self {
        match e {
            ConditionError::PastSet(e) => e.into(),
            ConditionError::Tower(e) => e.into(),
            e => CliError::Budget(e.to_string()),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::DepthTooLarge { .. } => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Runs the command line with `args` (including the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

struct Ctx<'a> {
    common: &'a Common,
    presentation: Presentation,
}

impl Ctx<'_> {
    fn load(common: &Common) -> Result<Ctx<'_>, CliError> {
        let text = fs::read_to_string(&common.input).map_err(|source| CliError::Read {
            path: common.input.clone(),
            source,
        })?;
        Ok(Ctx {
            common,
            presentation: Presentation::from_json(&text)?,
        })
    }

    fn max_level(&self) -> usize {
        self.common.max_level as usize
    }

    fn monoid_cap(&self) -> usize {
        self.common.monoid_cap as usize
    }

    fn tower(&self) -> Result<Tower, CliError> {
        Ok(Tower::build(self.presentation.graph(), self.max_level(), self.monoid_cap())?)
    }

    fn dump(&self) -> Result<TowerDump, CliError> {
        let path = (!self.common.no_cache).then(|| cache_dir().join(format!("{}.json", self.cache_key())));
        if let Some(path) = &path {
            if let Some(dump) = fs::read_to_string(path).ok().and_then(|s| serde_json::from_str(&s).ok()) {
                return Ok(dump);
            }
        }
        let dump = self.tower()?.dump(self.presentation.alphabet())?;
        if let Some(path) = &path {
            // a failed cache write only costs a recomputation later
            let _ = write_atomically(path, &to_json_string(&dump)?);
        }
        Ok(dump)
    }

    fn cache_key(&self) -> String {
        let raw = serde_json::to_string(&self.presentation.to_raw()).expect("presentation serializes");
        let mut h = Sha256::new();
        h.update(DUMP_FORMAT.as_bytes());
        h.update(raw.as_bytes());
        h.update(format!("|{}|{}", self.max_level(), self.monoid_cap()).as_bytes());
        hex::encode(h.finalize())
    }

    /// Prints the approximation notice and picks the exit code.
    fn finish(&self, out: &mut dyn Write, exact: bool, level: usize) -> Result<i32, CliError> {
        if exact {
            return Ok(0);
        }
        if !self.common.json {
            writeln!(out, "APPROXIMATE (level {level})")?;
        }
        Ok(if self.common.allow_partial { 0 } else { 2 })
    }
}

fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("shiftca-cache"))
}

fn write_atomically(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().expect("cache path has a parent");
    fs::create_dir_all(dir)?;
    let mut file = tempfile::NamedTempFile::new_in(dir)?;
    file.write_all(contents.as_bytes())?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    writeln!(out, "{}", to_json_string(value)?)?;
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Classes(common) => classes(&Ctx::load(&common)?, out),
        Command::Kgroups(common) => kgroups(&Ctx::load(&common)?, out),
        Command::DimensionGroup { common, k_max } => dimension_group(&Ctx::load(&common)?, k_max, out),
        Command::Bf(common) => bf(&Ctx::load(&common)?, out),
        Command::Check { common, condition } => check(&Ctx::load(&common)?, condition, out),
        Command::Ideals(common) => ideals(&Ctx::load(&common)?, out),
        Command::Repcheck {
            common,
            depth,
            budget,
            grading_budget,
        } => repcheck(&Ctx::load(&common)?, depth, budget, grading_budget, out),
        Command::OracleCk(common) => oracle_ck(&Ctx::load(&common)?, out),
    }
}

const PAST_PREVIEW: usize = 8;

fn classes(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let dump = ctx.dump()?;
    if ctx.common.json {
        print_json(out, &dump)?;
    } else {
        for level in &dump.levels {
            writeln!(out, "level {}: m = {}", level.level, level.m)?;
            for class in &level.classes {
                let tsets: Vec<String> = class
                    .tsets
                    .iter()
                    .map(|t| format!("{{{}}}", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                let mut past: Vec<&str> = class
                    .past
                    .iter()
                    .take(PAST_PREVIEW)
                    .map(|w| if w.is_empty() { "ε" } else { w.as_str() })
                    .collect();
                let more = class.past_size > past.len() as u64;
                if more {
                    past.push("…");
                }
                writeln!(
                    out,
                    "  class {}: T-sets {} past {{{}}}{}",
                    class.index,
                    tsets.join(" "),
                    past.join(", "),
                    if more { format!(" ({} words)", class.past_size) } else { String::new() },
                )?;
            }
        }
    }
    let top = dump.levels.len() - 1;
    match dump.stabilized_at {
        Some(l0) => {
            if !ctx.common.json {
                writeln!(out, "stabilized at {l0}")?;
            }
            Ok(0)
        }
        None => ctx.finish(out, false, top),
    }
}

fn kgroups(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = invariants::k_groups_from_dump(&ctx.dump()?)?;
    if ctx.common.json {
        print_json(out, &report)?;
    } else {
        writeln!(
            out,
            "K0 = {}, K1 = {} ({}, level {})",
            report.k0,
            report.k1,
            if report.exact { "exact" } else { "approximate" },
            report.level_used
        )?;
    }
    ctx.finish(out, report.exact, report.level_used)
}

fn dimension_group(ctx: &Ctx, k_max: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    let stages = invariants::dimension_group(&ctx.tower()?, k_max)?;
    if ctx.common.json {
        print_json(out, &stages)?;
        return Ok(0);
    }
    for s in &stages {
        writeln!(
            out,
            "k = {}: Z^{} -> Z^{}  (M_k = {:?})",
            s.k,
            s.group_rank,
            s.next_classes.len(),
            s.classes
        )?;
        writeln!(out, "  A = {}", rows(&s.map.to_i64_rows()))?;
        writeln!(out, "  delta = {}", rows(&s.delta.to_i64_rows()))?;
        writeln!(out, "  delta commutes with A: {}", s.delta_commutes)?;
    }
    Ok(0)
}

fn rows(m: &Option<Vec<Vec<i64>>>) -> String {
    match m {
        Some(rows) => format!("{rows:?}"),
        None => "(entries exceed i64)".into(),
    }
}

fn bf(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = invariants::bowen_franks(&ctx.presentation)?;
    if ctx.common.json {
        print_json(out, &report)?;
    } else {
        writeln!(out, "BF = {}", report.group)?;
    }
    Ok(0)
}

fn verdict_line(v: &Verdict, alphabet: &crate::presentations::Alphabet) -> String {
    let status = match v.status {
        Status::Holds => "HOLDS",
        Status::Fails => "FAILS",
        Status::Inconclusive => "INCONCLUSIVE",
    };
    let method = match v.method {
        Method::Exact => "exact".to_string(),
        Method::BoundedSearch(n) => format!("bounded search to level {n}"),
    };
    let detail = match &v.certificate {
        Certificate::ClassPoints { level, classes } => format!("{} classes at level {level}, each with two points", classes.len()),
        Certificate::UniquePoint { level, class, point } => {
            format!("class {class} at level {level} is the single point {}", point.format(alphabet))
        }
        Certificate::WordClassesMatched { level, matches } => {
            format!("{} infinite word classes at level {level}, all realized by points", matches.len())
        }
        Certificate::UnmatchedWordClass { level, word } => {
            format!("word {:?} has an infinite class at level {level} that no point shares", alphabet.format_word(word))
        }
        Certificate::Reachable { level, bound } => format!("every class reached within {bound} symbols at level {level}"),
        Certificate::Unreachable { level, from, to_class } => {
            format!("class {to_class} at level {level} is never reached from {}", from.format(alphabet))
        }
    };
    format!("condition {}: {status} ({method}): {detail}", v.condition.name())
}

fn check(ctx: &Ctx, condition: ConditionArg, out: &mut dyn Write) -> Result<i32, CliError> {
    let tower = ctx.tower()?;
    let verdict = match condition {
        ConditionArg::I => conditions::condition_i(&tower)?,
        ConditionArg::Star => conditions::condition_star(&tower)?,
        ConditionArg::Aperiodic => conditions::aperiodic_past(&tower)?,
        ConditionArg::Irreducible => conditions::irreducible_past(&tower)?,
    };
    let alphabet = ctx.presentation.alphabet();
    if ctx.common.json {
        print_json(out, &verdict.to_json(alphabet))?;
    } else {
        writeln!(out, "{}", verdict_line(&verdict, alphabet))?;
    }
    match verdict.method {
        Method::Exact => Ok(0),
        Method::BoundedSearch(level) => ctx.finish(out, false, level),
    }
}

fn ideals(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = conditions::ideal_lattice(&ctx.tower()?)?;
    if ctx.common.json {
        print_json(out, &report)?;
        return Ok(0);
    }
    writeln!(out, "{} ideals at level {}", report.elements.len(), report.level)?;
    for (i, e) in report.elements.iter().enumerate() {
        let classes: Vec<String> = e.iter().map(|c| c.to_string()).collect();
        writeln!(out, "  {i}: {{{}}}", classes.join(","))?;
    }
    let edges: Vec<String> = report.order.iter().map(|(a, b)| format!("{a} < {b}")).collect();
    writeln!(out, "covers: {}", edges.join(", "))?;
    Ok(0)
}

fn repcheck(ctx: &Ctx, depth: usize, budget: usize, grading_budget: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    let rep = repcheck::build_truncation(ctx.presentation.graph(), depth)?;
    let mut report = repcheck::check_universal_relations(&rep, budget);
    if let Some(matrix) = ctx.presentation.sft_matrix() {
        report.extend(repcheck::check_ck_relations(&rep, matrix)?);
    }
    report.extend(repcheck::check_grading(&rep, grading_budget));
    let alphabet = ctx.presentation.alphabet();
    if ctx.common.json {
        let mut v = report.to_json(alphabet);
        v["depth"] = json!(depth);
        v["basis"] = json!(rep.dim());
        print_json(out, &v)?;
    } else {
        let summary: Value = report.to_json(alphabet);
        let parts: Vec<String> = summary["summary"]
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, v)| format!("{k} {}", v["checked"]))
            .collect();
        let failed = report.failures().count();
        if failed == 0 {
            writeln!(
                out,
                "all {} relation checks passed at depth {depth} ({} basis words; {})",
                report.checked.len(),
                rep.dim(),
                parts.join(", ")
            )?;
        } else {
            writeln!(out, "{failed} of {} relation checks FAILED", report.checked.len())?;
            for f in report.failures() {
                let params: Vec<String> = f.params.iter().map(|w| format!("{:?}", alphabet.format_word(w))).collect();
                writeln!(
                    out,
                    "  {} [{}] at e_{:?}",
                    f.relation.id(),
                    params.join(", "),
                    alphabet.format_word(f.witness.as_ref().unwrap())
                )?;
            }
        }
    }
    // the identities hold in the full representation, so a failure is a defect
    Ok(if report.all_pass() { 0 } else { 3 })
}

fn oracle_ck(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = invariants::ck_oracle(&ctx.presentation)?;
    if ctx.common.json {
        print_json(out, &report)?;
    } else {
        writeln!(out, "K0 = {}, K1 = {} (Cuntz-Krieger oracle)", report.k0, report.k1)?;
    }
    Ok(0)
}
