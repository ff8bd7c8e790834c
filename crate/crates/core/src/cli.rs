//! Command-line driver. Exit codes: 0 success, 1 verification failure,
//! 2 usage error, 3 solver guard degradation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::boolmat::BoolMatrix;
use crate::construction::{self, exact_zero_count, max_m_for, verify_no_zero_block, IncidenceInstance};
use crate::cover::{self, curve_to_csv, Mode};
use crate::error::Error;
use crate::formats;
use crate::optimize::{self, SolverLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

pub const DEFAULT_MAX_N: u64 = 3456;

/// `--m 5` or `--m 2..8` (inclusive).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MSpec {
    Single(u64),
    Range(u64, u64),
}

impl FromStr for MSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("invalid m value {t:?}"));
        match s.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty range {lo}..{hi}"));
                }
                Ok(MSpec::Range(lo, hi))
            }
            None => Ok(MSpec::Single(parse(s)?)),
        }
    }
}

impl MSpec {
    fn values(self) -> std::ops::RangeInclusive<u64> {
        match self {
            MSpec::Single(m) => m..=m,
            MSpec::Range(lo, hi) => lo..=hi,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pbm,
}

#[derive(Debug, Parser)]
#[command(name = "rectcover", version, about = "Incidence matrices with polylog rectangle covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Directory for data files; created if missing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Largest matrix dimension n that may be materialized.
    #[arg(long, global = true, env = "RECTCOVER_MAX_N", default_value_t = DEFAULT_MAX_N)]
    max_n: u64,
    /// Reserved; no command uses randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the instance for m and export it.
    Build {
        #[arg(long)]
        m: MSpec,
        #[command(flatten)]
        common: Common,
    },
    /// Check the zero count and the absence of 2x2 all-zero blocks.
    Verify {
        #[arg(long, conflicts_with = "pbm", required_unless_present = "pbm")]
        m: Option<MSpec>,
        #[arg(long)]
        pbm: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate, verify and prune the residue cover.
    Cover {
        #[arg(long)]
        m: MSpec,
        #[arg(long, default_value = "adaptive")]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Covering-number statistics: greedy, exact, fooling bound.
    Exact {
        #[arg(long, conflicts_with = "pbm", required_unless_present = "pbm")]
        m: Option<MSpec>,
        #[arg(long)]
        pbm: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Cover sizes across a range of m.
    Sweep {
        #[arg(long)]
        m: MSpec,
        #[arg(long, default_value = "adaptive")]
        mode: Mode,
        /// Count slots without building any matrix.
        #[arg(long)]
        counting_only: bool,
        #[command(flatten)]
        common: Common,
    },
}

/// A command's failure, carrying its exit code.
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter(_) | Error::InvalidDimensions { .. } | Error::Parse(_) | Error::Io(_) | Error::Json(_) => {
                EXIT_USAGE
            }
            Error::SizeGuard { .. } | Error::EnumerationOverflow { .. } => EXIT_GUARD,
            _ => EXIT_VERIFY,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<i32, Exit>;

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    out_dir: Option<PathBuf>,
}

impl Io<'_> {
    fn write_file(&self, name: &str, contents: &str) -> Result<(), Exit> {
        if let Some(dir) = &self.out_dir {
            fs::create_dir_all(dir).map_err(Error::from)?;
            fs::write(dir.join(name), contents).map_err(Error::from)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<String, Exit> {
        let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        let _ = writeln!(self.stdout, "{text}");
        Ok(text)
    }

    fn note(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.stderr, "{}", line.as_ref());
    }
}

/// Parse `args` (including the program name) and run one command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let common = match &cli.command {
        Command::Build { common, .. }
        | Command::Verify { common, .. }
        | Command::Cover { common, .. }
        | Command::Exact { common, .. }
        | Command::Sweep { common, .. } => common,
    };
    let mut io = Io {
        stdout,
        stderr,
        out_dir: common.out.clone(),
    };
    match dispatch(&cli.command, common, &mut io) {
        Ok(code) => code,
        Err(exit) => {
            io.note(format!("error: {}", exit.message));
            exit.code
        }
    }
}

fn dispatch(command: &Command, common: &Common, io: &mut Io<'_>) -> CmdResult {
    if common.seed.is_some() {
        return Err(Exit::usage("--seed is reserved: no command uses randomness"));
    }
    let max_m = max_m_for(common.max_n);
    match command {
        Command::Build { m, .. } => {
            check_format(common, &[Format::Pbm])?;
            cmd_build(single(*m)?, max_m, io)
        }
        Command::Verify { m, pbm, .. } => {
            check_format(common, &[Format::Json])?;
            match (m, pbm) {
                (Some(m), _) => cmd_verify_m(single(*m)?, max_m, io),
                (None, Some(path)) => cmd_verify_pbm(path, io),
                (None, None) => Err(Exit::usage("either --m or --pbm is required")),
            }
        }
        Command::Cover { m, mode, .. } => {
            check_format(common, &[Format::Json])?;
            cmd_cover(single(*m)?, *mode, max_m, io)
        }
        Command::Exact { m, pbm, .. } => {
            check_format(common, &[Format::Json])?;
            match (m, pbm) {
                (Some(m), _) => cmd_exact_m(single(*m)?, max_m, io),
                (None, Some(path)) => cmd_exact_pbm(path, io),
                (None, None) => Err(Exit::usage("either --m or --pbm is required")),
            }
        }
        Command::Sweep { m, mode, counting_only, .. } => {
            check_format(common, &[Format::Csv, Format::Json])?;
            let format = common.format.unwrap_or(Format::Csv);
            cmd_sweep(*m, *mode, *counting_only, format, max_m, io)
        }
    }
}

fn check_format(common: &Common, allowed: &[Format]) -> Result<(), Exit> {
    match common.format {
        Some(f) if !allowed.contains(&f) => Err(Exit::usage(format!("--format {f:?} is not supported by this command"))),
        _ => Ok(()),
    }
}

fn single(m: MSpec) -> Result<u64, Exit> {
    match m {
        MSpec::Single(m) => Ok(m),
        MSpec::Range(..) => Err(Exit::usage("an m range is only valid for sweep")),
    }
}

fn load_instance(m: u64, max_m: u64) -> Result<IncidenceInstance, Exit> {
    Ok(construction::build_bounded(m, max_m)?)
}

fn read_pbm(path: &Path) -> Result<BoolMatrix, Exit> {
    let text = fs::read_to_string(path).map_err(Error::from)?;
    Ok(formats::from_pbm(&text)?)
}

fn cmd_build(m: u64, max_m: u64, io: &mut Io<'_>) -> CmdResult {
    let inst = load_instance(m, max_m)?;
    let meta = inst.meta();
    io.write_file(&format!("m{m}.pbm"), &formats::to_pbm(inst.matrix()))?;
    let text = io.json(&meta)?;
    io.write_file(&format!("m{m}.meta.json"), &format!("{text}\n"))?;
    io.note(format!("n = {}, zeros = {}, d = {}", meta.n, meta.zeros, inst.density()));
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyReport {
    source: String,
    m: Option<u64>,
    rows: usize,
    cols: usize,
    zeros: usize,
    expected_zeros: Option<u128>,
    zero_count_ok: Option<bool>,
    scan_passed: bool,
    analytic_passed: Option<bool>,
    witness: Option<crate::boolmat::ZeroBlock>,
    detail: Option<String>,
}

fn cmd_verify_m(m: u64, max_m: u64, io: &mut Io<'_>) -> CmdResult {
    let inst = load_instance(m, max_m)?;
    let zeros = inst.matrix().count_zeros();
    let expected = exact_zero_count(m);
    let zero_count_ok = zeros as u128 == expected && expected >= (m as u128).pow(4);
    let mut report = VerifyReport {
        source: format!("m={m}"),
        m: Some(m),
        rows: inst.n(),
        cols: inst.n(),
        zeros,
        expected_zeros: Some(expected),
        zero_count_ok: Some(zero_count_ok),
        scan_passed: false,
        analytic_passed: Some(false),
        witness: None,
        detail: None,
    };
    match verify_no_zero_block(&inst) {
        Ok(r) => {
            report.scan_passed = r.scan_passed;
            report.analytic_passed = Some(r.analytic_passed);
            io.note(format!(
                "2x2 scan: pass ({:?}); line-pair check: pass ({:?}, {} of {} pairs intersect)",
                r.scan_time, r.analytic_time, r.intersecting_pairs, r.line_pairs
            ));
        }
        Err(Error::StructuralFailure(w)) => report.witness = Some(w),
        Err(Error::ConstructionBug(msg)) => {
            report.scan_passed = true;
            report.detail = Some(msg);
        }
        Err(e) => return Err(e.into()),
    }
    finish_verify(report, io)
}

fn cmd_verify_pbm(path: &Path, io: &mut Io<'_>) -> CmdResult {
    let matrix = read_pbm(path)?;
    let witness = matrix.find_zero_2x2();
    let report = VerifyReport {
        source: path.display().to_string(),
        m: None,
        rows: matrix.rows(),
        cols: matrix.cols(),
        zeros: matrix.count_zeros(),
        expected_zeros: None,
        zero_count_ok: None,
        scan_passed: witness.is_none(),
        analytic_passed: None,
        witness,
        detail: None,
    };
    finish_verify(report, io)
}

fn finish_verify(report: VerifyReport, io: &mut Io<'_>) -> CmdResult {
    let passed = report.scan_passed && report.zero_count_ok != Some(false) && report.analytic_passed != Some(false);
    let text = io.json(&report)?;
    io.write_file("verify.json", &format!("{text}\n"))?;
    io.note(if passed { "verify: pass" } else { "verify: FAIL" });
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_cover(m: u64, mode: Mode, max_m: u64, io: &mut Io<'_>) -> CmdResult {
    let inst = load_instance(m, max_m)?;
    let plan = cover::select_primes(m, mode);
    let cp = cover::generate_cover(&inst, &plan)?;
    let report = match cover::verify_cover(&inst, &cp) {
        Ok(report) => report,
        Err(Error::CoverCheckFailed(report)) => {
            let text = io.json(&json!({ "mode": mode, "passed": false, "report": *report }))?;
            io.write_file(&format!("cover_m{m}_{mode}.stats.json"), &format!("{text}\n"))?;
            return Err(Exit { code: EXIT_VERIFY, message: "cover check failed under a sufficient plan".into() });
        }
        Err(e) => return Err(e.into()),
    };
    let mut summary = json!({
        "m": m,
        "n": inst.n(),
        "zeros": inst.matrix().count_zeros(),
        "density": inst.density().value(),
        "mode": mode,
        "k_paper": plan.k_paper,
        "primes": plan.primes,
        "primorial": plan.primorial,
        "bound": plan.bound,
        "sufficient": plan.sufficient,
        "total_slots": cp.total_slots,
        "nonempty": cp.nonempty_count,
        "monochromatic": report.monochromatic,
        "covered": report.covered,
        "crt": report.crt,
        "first_separator": report.first_separator,
    });
    if !report.passed() {
        summary["passed"] = json!(false);
        summary["defects"] = json!(report.defects);
        summary["defect_witness"] = json!(report.defect_witness);
        let text = io.json(&summary)?;
        io.write_file(&format!("cover_m{m}_{mode}.stats.json"), &format!("{text}\n"))?;
        let hint = if mode == Mode::Paper { "; rerun with --mode adaptive" } else { "" };
        return Err(Exit {
            code: EXIT_VERIFY,
            message: format!(
                "{mode} cover leaves {} one-entries uncovered (primorial {} <= {}){hint}",
                report.defects, plan.primorial, plan.bound
            ),
        });
    }
    let pruned = cover::prune_cover(&inst, &cp)?;
    let recheck = cover::verify_cover(&inst, &pruned)?;
    summary["pruned"] = json!(pruned.len());
    summary["passed"] = json!(recheck.passed());
    let cover_json = serde_json::to_string(&pruned.export()).map_err(Error::from)?;
    io.write_file(&format!("cover_m{m}_{mode}.json"), &format!("{cover_json}\n"))?;
    let text = io.json(&summary)?;
    io.write_file(&format!("cover_m{m}_{mode}.stats.json"), &format!("{text}\n"))?;
    io.note(format!(
        "{mode} cover: {} slots, {} nonempty, {} after pruning; all checks pass",
        cp.total_slots,
        cp.nonempty_count,
        pruned.len()
    ));
    Ok(if recheck.passed() { EXIT_OK } else { EXIT_VERIFY })
}

fn explicit_size(inst: &IncidenceInstance) -> Result<usize, Exit> {
    let plan = cover::select_primes(inst.m(), Mode::Adaptive);
    let cp = cover::generate_cover(inst, &plan)?;
    Ok(cover::prune_cover(inst, &cp)?.len())
}

fn cmd_exact_m(m: u64, max_m: u64, io: &mut Io<'_>) -> CmdResult {
    let inst = load_instance(m, max_m)?;
    let explicit = explicit_size(&inst)?;
    finish_exact(inst.matrix(), Some(explicit), io)
}

fn cmd_exact_pbm(path: &Path, io: &mut Io<'_>) -> CmdResult {
    let matrix = read_pbm(path)?;
    finish_exact(&matrix, None, io)
}

fn finish_exact(matrix: &BoolMatrix, explicit: Option<usize>, io: &mut Io<'_>) -> CmdResult {
    let stats = optimize::stats(matrix, explicit, &SolverLimits::default())?;
    let text = io.json(&stats)?;
    io.write_file("stats.json", &format!("{text}\n"))?;
    match &stats.guard {
        Some(reason) => {
            io.note(format!("exact solver skipped: {reason}"));
            Ok(EXIT_GUARD)
        }
        None => Ok(EXIT_OK),
    }
}

#[derive(Serialize)]
struct SweepCheck {
    m: u64,
    passed: bool,
    nonempty_materialized: usize,
    nonempty_counted: u128,
}

fn cmd_sweep(m: MSpec, mode: Mode, counting_only: bool, format: Format, max_m: u64, io: &mut Io<'_>) -> CmdResult {
    let ms: Vec<u64> = m.values().collect();
    if ms.contains(&0) {
        return Err(Exit::usage("m must be at least 1"));
    }
    if !counting_only {
        if let Some(&big) = ms.iter().find(|&&v| v > max_m) {
            return Err(Exit::usage(format!(
                "m = {big} exceeds the materialization limit m <= {max_m}; use --counting-only"
            )));
        }
    }
    let curve = cover::cover_size_curve(&ms, mode);
    let body = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&curve).map_err(Error::from)?),
        _ => curve_to_csv(&curve),
    };
    let _ = io.stdout.write_all(body.as_bytes());
    let ext = if format == Format::Json { "json" } else { "csv" };
    io.write_file(&format!("sweep.{ext}"), &body)?;

    if counting_only {
        let worst = curve.iter().map(|p| p.ratio).fold(0.0, f64::max);
        io.note(format!("{} rows, max ratio {worst:.6}", curve.len()));
        return Ok(EXIT_OK);
    }
    let mut checks = Vec::with_capacity(ms.len());
    for point in &curve {
        let inst = load_instance(point.m, max_m)?;
        let plan = cover::select_primes(point.m, mode);
        let cp = cover::generate_cover(&inst, &plan)?;
        let passed = match cover::verify_cover(&inst, &cp) {
            Ok(report) => report.passed(),
            Err(Error::CoverCheckFailed(_)) => false,
            Err(e) => return Err(e.into()),
        };
        let passed = passed && cp.nonempty_count as u128 == point.nonempty;
        io.note(format!("m = {}: {}", point.m, if passed { "verified" } else { "FAILED" }));
        checks.push(SweepCheck {
            m: point.m,
            passed,
            nonempty_materialized: cp.nonempty_count,
            nonempty_counted: point.nonempty,
        });
    }
    let text = serde_json::to_string_pretty(&checks).map_err(Error::from)?;
    io.write_file("sweep_verify.json", &format!("{text}\n"))?;
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_VERIFY })
}
