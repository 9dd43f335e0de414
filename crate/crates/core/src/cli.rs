//! Command-line interface. Every subcommand writes to the supplied streams
//! and returns a process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | validation failure, or a check that ran and failed |
//! | 2 | consistency not certified (and no `--force`) |
//! | 3 | resource limit reached (results, if any, are partial) |
//! | 4 | usage error |

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cover::{default_radius, stable_mu_table};
use crate::dimer::{roundtrip, z_via_matchings};
use crate::error::Error;
use crate::ideals::{apply_dt_signs, for_each_ideal, partition_function_with, table_for, EnumOptions, SeriesByDim};
use crate::lp::Q;
use crate::matching::{perfect_matchings, reference_matching};
use crate::model::{builtin_names, builtin_tiling, parse_tiling, validate_tiling, TilingSpec};
use crate::series::{detect_recurrence, parse_rational_function, plethystic_log};
use crate::verify::{consistency_report, consistency_report_with_search, DEFAULT_MAX_STATES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "brane-dt", version, about = "Noncommutative DT partition functions of brane tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural invariants of a tiling.
    Validate(SourceArgs),
    /// Certify consistency (non-degeneracy, free weight lattice, R-charge).
    Consistency {
        #[command(flatten)]
        source: SourceArgs,
        /// Also run the bounded search for non-extendable shortest paths.
        #[arg(long)]
        search: bool,
        /// Largest matching degree of a searched path (default: number of matchings).
        #[arg(long)]
        cycle_bound: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// List the perfect matchings of the tiling.
    Matchings {
        #[command(flatten)]
        source: SourceArgs,
        /// Print only the number of matchings.
        #[arg(long)]
        count: bool,
    },
    /// Count finite ideals by dimension vector.
    Partition {
        #[command(flatten)]
        run: RunArgs,
        /// Apply the DT signs.
        #[arg(long)]
        dt: bool,
    },
    /// Signed partition function (same as `partition --dt`).
    Dt {
        #[command(flatten)]
        run: RunArgs,
    },
    /// One-variable specialization of the plethystic logarithm of Z.
    Logz {
        #[command(flatten)]
        run: RunArgs,
        /// Truncation degree (default: --max-size, and never above it).
        #[arg(long)]
        trunc: Option<u32>,
        /// Guess a rational function from the coefficients.
        #[arg(long)]
        rational: bool,
        /// Compare against the expansion of a rational function of x.
        #[arg(long)]
        golden: Option<String>,
    },
    /// Check the ideal/matching correspondence and the matching-side count.
    Correspond {
        #[command(flatten)]
        run: RunArgs,
    },
    /// List the builtin tilings.
    Builtins,
}

#[derive(Args, Debug, Clone)]
struct SourceArgs {
    /// Builtin tiling name (see `builtins`).
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<String>,
    /// Parameter of a parametric builtin (n for c3-zn).
    #[arg(long)]
    param: Option<u32>,
    /// Tiling file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Human,
    Tsv,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Base vertex of the path poset.
    #[arg(long, default_value_t = 0)]
    vertex: usize,
    #[arg(long, default_value_t = 12)]
    max_size: u32,
    /// Window radius of the universal-cover table.
    #[arg(long)]
    radius: Option<u32>,
    /// Proceed even if the tiling is not certified consistent.
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Stop after visiting this many ideals.
    #[arg(long)]
    max_ideals: Option<u64>,
    /// Stop after this many seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Write the shortest-path table of the base vertex to this file.
    #[arg(long)]
    dump_mu: Option<PathBuf>,
}

/// Failure that ends a subcommand with a given exit code.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit(_) | Error::WindowExhausted { .. } | Error::NotStabilized(_) => EXIT_RESOURCE,
            Error::UnknownBuiltin(_) | Error::InvalidParameter { .. } | Error::VertexOutOfRange { .. } | Error::Expr { .. } => {
                EXIT_USAGE
            }
            Error::NotCertified(_) => EXIT_NOT_CERTIFIED,
            _ => EXIT_FAILED,
        };
        Exit(code, e.to_string())
    }
}

impl From<std::io::Error> for Exit {
    fn from(e: std::io::Error) -> Self {
        Exit(EXIT_FAILED, format!("i/o error: {e}"))
    }
}

type CmdResult = std::result::Result<i32, Exit>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Builtins => {
            for name in builtin_names() {
                let note = if *name == "c3-zn" { " (requires --param n >= 2)" } else { "" };
                writeln!(out, "{name}{note}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Validate(src) => {
            let t = load(&src)?;
            let report = validate_tiling(&t);
            write!(out, "{report}")?;
            Ok(if report.ok() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Consistency {
            source,
            search,
            cycle_bound,
            max_states,
        } => {
            let t = load_valid(&source)?;
            let report = if search {
                consistency_report_with_search(&t, cycle_bound, max_states)
            } else {
                consistency_report(&t)
            };
            write!(out, "{report}")?;
            if !report.certified() {
                return Ok(EXIT_NOT_CERTIFIED);
            }
            match &report.condition_c {
                Some(c) if c.inconclusive.is_some() => Ok(EXIT_RESOURCE),
                Some(c) if !c.passed() => Ok(EXIT_FAILED),
                _ => Ok(EXIT_OK),
            }
        }
        Command::Matchings { source, count } => {
            let t = load_valid(&source)?;
            let ms = perfect_matchings(&t);
            if count {
                writeln!(out, "{}", ms.len())?;
            } else {
                for m in &ms {
                    writeln!(out, "{}", m.serialize(&t))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Partition { run, dt } => partition(&run, dt, out, err),
        Command::Dt { run } => partition(&run, true, out, err),
        Command::Logz {
            run,
            trunc,
            rational,
            golden,
        } => logz(&run, trunc, rational, golden.as_deref(), out, err),
        Command::Correspond { run } => correspond(&run, out, err),
    }
}

fn load(src: &SourceArgs) -> std::result::Result<TilingSpec, Exit> {
    match (&src.builtin, &src.file) {
        (Some(name), _) => Ok(builtin_tiling(name, src.param)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            Ok(parse_tiling(&text)?)
        }
        (None, None) => Err(Exit(EXIT_USAGE, "one of --builtin or --file is required".into())),
    }
}

fn load_valid(src: &SourceArgs) -> std::result::Result<TilingSpec, Exit> {
    let t = load(src)?;
    let report = validate_tiling(&t);
    if !report.ok() {
        return Err(Exit(EXIT_FAILED, format!("tiling fails validation\n{report}")));
    }
    Ok(t)
}

/// Loads, validates and checks the consistency certificate, honouring
/// `--force`.
fn prepare(run: &RunArgs, err: &mut dyn Write) -> std::result::Result<TilingSpec, Exit> {
    let t = load_valid(&run.source)?;
    t.check_vertex(run.vertex)?;
    if run.threads == 0 {
        return Err(Exit(EXIT_USAGE, "--threads must be at least 1".into()));
    }
    let report = consistency_report(&t);
    if !report.certified() {
        if !run.force {
            return Err(Exit(
                EXIT_NOT_CERTIFIED,
                format!("tiling is not certified consistent (use --force to proceed)\n{report}"),
            ));
        }
        writeln!(err, "warning: tiling is not certified consistent; proceeding because of --force")?;
    }
    if let Some(path) = &run.dump_mu {
        let m0 = reference_matching(&t)?;
        let radius = run.radius.unwrap_or_else(|| default_radius(&t, run.max_size));
        let mt = stable_mu_table(&t, &m0, run.vertex, radius, 6)?;
        std::fs::write(path, mt.dump())?;
    }
    Ok(t)
}

fn options(run: &RunArgs) -> std::result::Result<EnumOptions, Exit> {
    let time_budget = match run.time_budget {
        None => None,
        Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(Exit(EXIT_USAGE, format!("invalid --time-budget {s}"))),
    };
    Ok(EnumOptions {
        max_size: run.max_size,
        radius: run.radius,
        threads: run.threads,
        max_ideals: run.max_ideals,
        time_budget,
    })
}

fn compute_z(run: &RunArgs, t: &TilingSpec) -> std::result::Result<SeriesByDim, Exit> {
    Ok(partition_function_with(t, run.vertex, &options(run)?)?)
}

fn partition(run: &RunArgs, dt: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let t = prepare(run, err)?;
    let mut z = compute_z(run, &t)?;
    if dt {
        z = apply_dt_signs(&t, &z)?;
    }
    match run.format {
        Format::Human => write!(out, "{}", z.to_text())?,
        Format::Tsv => write!(out, "{}", z.to_tsv())?,
    }
    Ok(if z.partial { EXIT_RESOURCE } else { EXIT_OK })
}

fn logz(
    run: &RunArgs,
    trunc: Option<u32>,
    rational: bool,
    golden: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let golden = golden.map(parse_rational_function).transpose()?;
    let t = prepare(run, err)?;
    let d = trunc.unwrap_or(run.max_size).min(run.max_size);
    let z = compute_z(run, &t)?;
    if z.partial {
        writeln!(err, "error: enumeration stopped early; Log(Z) needs complete coefficients")?;
        return Ok(EXIT_RESOURCE);
    }
    let series = z.to_series(t.vertex_count, d);
    let log = plethystic_log(&series)?.specialize();
    let coeffs = log.coefficients()?;
    match run.format {
        Format::Human => writeln!(out, "{log}")?,
        Format::Tsv => {
            writeln!(out, "# vertex={} trunc={d}", run.vertex)?;
            for (k, c) in coeffs.iter().enumerate() {
                writeln!(out, "{k}\t{c}")?;
            }
        }
    }
    let mut code = EXIT_OK;
    if rational {
        match detect_recurrence(&coeffs) {
            Some(g) => {
                writeln!(out, "numerator: {}", g.numerator)?;
                writeln!(out, "denominator: {}", g.denominator)?;
                writeln!(out, "consistent through degree {}", g.valid_through)?;
            }
            None => writeln!(out, "no rational function supported by degree {d}")?,
        }
    }
    if let Some(g) = golden {
        let want = g.expand(d)?.coefficients()?;
        match first_difference(&coeffs, &want) {
            None => writeln!(out, "MATCH through degree {d}")?,
            Some(k) => {
                writeln!(out, "MISMATCH at degree {k}: computed {}, expected {}", coeffs[k], want[k])?;
                code = EXIT_FAILED;
            }
        }
    }
    Ok(code)
}

fn first_difference(a: &[Q], b: &[Q]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

fn correspond(run: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let t = prepare(run, err)?;
    let mt = table_for(&t, run.vertex, run.max_size, run.radius)?;
    let mut total = 0u64;
    let mut ok = 0u64;
    let mut first_error = None;
    for_each_ideal(&mt, run.max_size, |om| {
        total += 1;
        match roundtrip(&mt, om) {
            Ok(true) => ok += 1,
            Ok(false) => {}
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = first_error {
        writeln!(err, "first roundtrip error: {e}")?;
    }
    let z = compute_z(run, &t)?;
    let route = z_via_matchings(&t, run.vertex, run.max_size)?;
    let agree = !z.partial && route.series.coefficients == z.coefficients;
    writeln!(
        out,
        "roundtrips: {ok}/{total} ok; z-routes agree: {}",
        if agree { "yes" } else { "no" }
    )?;
    Ok(if ok == total && agree { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("brane-dt").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn partition_c3() {
        let (code, out, _) = call(&["partition", "--builtin", "c3", "--vertex", "0", "--max-size", "4"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l.ends_with("alpha=<4> count=13")), "{out}");
        let (code, out, _) = call(&["dt", "--builtin", "c3", "--max-size", "3", "--format", "tsv"]);
        assert_eq!(code, 0);
        assert!(out.starts_with('#'));
        assert!(out.contains("3\t-6\n"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["partition"]).0, EXIT_USAGE);
        assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["partition", "--builtin", "nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["partition", "--builtin", "c3", "--vertex", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
        assert_eq!(call(&["logz", "--builtin", "c3", "--golden", "1/(1-x"]).0, EXIT_USAGE);
    }

    #[test]
    fn resource_limit_is_partial() {
        let (code, out, _) = call(&["partition", "--builtin", "c3", "--max-size", "10", "--max-ideals", "5"]);
        assert_eq!(code, EXIT_RESOURCE);
        assert!(out.contains("# partial"), "{out}");
    }

    #[test]
    fn logz_golden_and_guess() {
        let (code, out, _) = call(&[
            "logz", "--builtin", "c3", "--max-size", "8", "--rational", "--golden", "x/(1-x)^2",
        ]);
        // Log of MacMahon's function is x/(1-x)^2 after specialization.
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("MATCH through degree 8"));
        assert!(out.contains("denominator: 1 * x^0 + -2 * x^1 + 1 * x^2"), "{out}");
        let (code, out, _) = call(&["logz", "--builtin", "c3", "--max-size", "5", "--golden", "x/(1-x)"]);
        assert_eq!(code, EXIT_FAILED);
        assert!(out.contains("MISMATCH at degree 2"));
    }

    #[test]
    fn correspond_conifold() {
        let (code, out, _) = call(&["correspond", "--builtin", "conifold", "--vertex", "0", "--max-size", "5"]);
        assert_eq!(code, 0);
        let line = out.trim();
        let (n, rest) = line.strip_prefix("roundtrips: ").unwrap().split_once('/').unwrap();
        assert!(rest.starts_with(&format!("{n} ok; z-routes agree: yes")), "{line}");
    }

    #[test]
    fn other_subcommands() {
        let (code, out, _) = call(&["matchings", "--builtin", "c3"]);
        assert_eq!((code, out.as_str()), (0, "x\ny\nz\n"));
        let (code, out, _) = call(&["matchings", "--builtin", "spp", "--count"]);
        assert_eq!((code, out.as_str()), (0, "6\n"));
        let (code, out, _) = call(&["validate", "--builtin", "dp3"]);
        assert_eq!((code, out.as_str()), (0, "ok: true\n"));
        let (code, out, _) = call(&["consistency", "--builtin", "conifold", "--search"]);
        assert_eq!(code, 0);
        assert!(out.contains("condition_c_violations: 0"));
        let (code, out, _) = call(&["builtins"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
    }

    #[test]
    fn invalid_file_rejected() {
        let dir = std::env::temp_dir().join(format!("brane-dt-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("bad.tiling");
        std::fs::write(
            &file,
            "vertices 1\narrow a 0 0 1 0\narrow b 0 0 0 1\narrow c 0 0 -1 -1\nface + a b c\nface - a a\n",
        )
        .unwrap();
        let path = file.to_str().unwrap();
        assert_eq!(call(&["validate", "--file", path]).0, EXIT_FAILED);
        assert_eq!(call(&["partition", "--file", path]).0, EXIT_FAILED);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
