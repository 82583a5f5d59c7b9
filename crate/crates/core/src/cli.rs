//! The `scs` command line.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 search budget
//! exhausted, 3 proven nonexistence, 4 verification failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    bounds_report, family_bounds_report, prime_ladder, render_table, table_row, TableRow,
};
use crate::cfr::{
    cfr_from_prime, inverse_rows, search_cfr, shift_coincidences, verify_cfr, Cfr, SearchOutcome,
};
use crate::constructions::{construction1, construction2, construction3, construction4};
use crate::error::{Result, ScsError};
use crate::io::{read_family, sequence_from_json, write_family};
use crate::sequence::{energy, ScsFamily, SpectralConstraint};
use crate::spectral::{
    check_spectrum, check_unimodular, pccf_fast, profile_csv, spectrum_csv, sum_of_squares_check,
    summarize, worst_modulus_error,
};
use crate::tol::Tolerances;

// stdout writes that tolerate a closed pipe (`scs ... | head`)
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_NONEXISTENT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "scs",
    version,
    about = "Spectrally constrained sequence families from circular Florentine rectangles"
)]
struct Cli {
    /// Override every tolerance with one value (takes precedence over SCS_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Produce a CFR from a prime or by backtracking search.
    GenCfr(GenCfrArgs),
    /// Build a sequence family with one of the four constructions.
    GenScs(GenScsArgs),
    /// Evaluate correlation lower bounds, optionally against a family.
    Bounds(BoundsArgs),
    /// Check a family, CFR or sequence file.
    Verify(VerifyArgs),
    /// Re-run the command recorded in an echoed config file.
    Replay {
        /// A `<out>.config.json` written by an earlier run.
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["prime", "search"]))]
struct GenCfrArgs {
    /// Multiplication table of Z_p without its zero row.
    #[arg(long)]
    prime: Option<usize>,
    /// Search for a CFR of this order.
    #[arg(long, requires = "rows")]
    search: Option<usize>,
    /// Number of rows for --search.
    #[arg(long)]
    rows: Option<usize>,
    /// Node budget for --search.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Construction {
    C1,
    C2,
    C3,
    C4,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("cfr_source").required(true).args(["cfr", "prime"]))]
struct GenScsArgs {
    construction: Construction,
    /// CFR text file.
    #[arg(long)]
    cfr: Option<PathBuf>,
    /// Use the prime multiplication-table CFR.
    #[arg(long)]
    prime: Option<usize>,
    /// Inserted zero column for c2 (and the single-column c4 case).
    #[arg(long)]
    s0: Option<usize>,
    /// Comma-separated insert set for c3 and c4.
    #[arg(long, value_delimiter = ',')]
    insert: Option<Vec<usize>>,
    /// Number of sets for c4; defaults to every CFR row.
    #[arg(long)]
    sets: Option<usize>,
    /// Family JSON output; a `.config.json` echo is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Power spectrum CSV of one member.
    #[arg(long)]
    spectrum_csv: Option<PathBuf>,
    /// Correlation profile CSV of the pair given by --pair.
    #[arg(long)]
    corr_csv: Option<PathBuf>,
    /// Flat member indices i,j for --corr-csv.
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 0])]
    pair: Vec<usize>,
    /// Flat member index for --spectrum-csv.
    #[arg(long, default_value_t = 0)]
    member: usize,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Number of sequences.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Sequence length.
    #[arg(long = "L")]
    l: Option<usize>,
    /// Number of forbidden carriers.
    #[arg(long = "n")]
    n: Option<usize>,
    /// Correlation window for the Tsai relation; defaults to L.
    #[arg(long)]
    window: Option<usize>,
    /// Family JSON to measure and certify.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Comma-separated odd primes; CFR family η along the ladder.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    /// Comma-separated N:F entries for the optimality table.
    #[arg(long, value_delimiter = ',')]
    table: Option<Vec<String>>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["family", "cfr", "seq"]))]
struct VerifyArgs {
    /// Family JSON.
    #[arg(long)]
    family: Option<PathBuf>,
    /// CFR text file.
    #[arg(long)]
    cfr: Option<PathBuf>,
    /// Single-sequence JSON.
    #[arg(long)]
    seq: Option<PathBuf>,
    /// Forbidden carriers for --seq.
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<usize>>,
}

/// Parse `args` (program name first), run, print to stdout/stderr and
/// return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn tolerances(cli_tol: Option<f64>) -> Result<Tolerances> {
    match cli_tol {
        Some(t) => Tolerances::uniform(t),
        None => Tolerances::from_env(),
    }
}

fn dispatch(cli: Cli, argv: &[String]) -> Result<i32> {
    let tol = tolerances(cli.tol)?;
    match cli.command {
        Command::GenCfr(a) => gen_cfr(a, argv),
        Command::GenScs(a) => gen_scs(a, argv, &tol),
        Command::Bounds(a) => bounds(a, &tol),
        Command::Verify(a) => verify(a, &tol),
        Command::Replay { config } => {
            let cfg: Value = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let recorded: Vec<String> = cfg
                .get("argv")
                .and_then(Value::as_array)
                .map(|a| {
                    a.iter()
                        .filter_map(|v| v.as_str().map(String::from))
                        .collect()
                })
                .ok_or_else(|| ScsError::InvalidParameter("config has no argv".into()))?;
            if recorded.get(1).map(String::as_str) == Some("replay") {
                return Err(ScsError::InvalidParameter("config records a replay".into()));
            }
            Ok(run(recorded))
        }
    }
}

/// Record argv, tolerances and parameters next to an output file.
fn echo_config(out: &Path, argv: &[String], params: Value) -> Result<()> {
    let mut path = out.as_os_str().to_owned();
    path.push(".config.json");
    let tol = Tolerances::from_env().unwrap_or_default();
    let cfg = json!({
        "argv": argv,
        "params": params,
        "cwd": std::env::current_dir().ok(),
        "scs_tol": std::env::var("SCS_TOL").ok(),
        "tolerances": {"zero": tol.zero, "relative": tol.relative, "bound": tol.bound},
        "version": env!("CARGO_PKG_VERSION"),
    });
    std::fs::write(
        PathBuf::from(path),
        serde_json::to_string_pretty(&cfg)? + "\n",
    )?;
    Ok(())
}

fn gen_cfr(a: GenCfrArgs, argv: &[String]) -> Result<i32> {
    let (cfr, params) = if let Some(p) = a.prime {
        (cfr_from_prime(p)?, json!({"prime": p}))
    } else {
        let n = a.search.unwrap_or_default();
        let rows = a.rows.unwrap_or_default();
        let report = search_cfr(n, rows, a.budget)?;
        eprintln!("search explored {} nodes", report.nodes);
        match report.outcome {
            SearchOutcome::Found(cfr) => (
                cfr,
                json!({"search": n, "rows": rows, "budget": a.budget, "nodes": report.nodes}),
            ),
            SearchOutcome::BudgetHit => {
                eprintln!(
                    "budget_hit: no {rows}×{n} CFR found within {} nodes",
                    a.budget
                );
                return Ok(EXIT_BUDGET);
            }
            SearchOutcome::Exhausted => {
                eprintln!("exhausted: no {rows}×{n} CFR exists");
                return Ok(EXIT_NONEXISTENT);
            }
        }
    };
    let text = cfr.to_text();
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            echo_config(path, argv, params)?;
            outln!(
                "wrote {}×{} CFR ({}) to {}",
                cfr.num_rows(),
                cfr.order(),
                cfr.fingerprint(),
                path.display()
            );
        }
        None => out!("{text}"),
    }
    Ok(EXIT_OK)
}

fn load_cfr(path: &Option<PathBuf>, prime: Option<usize>) -> Result<Cfr> {
    match (path, prime) {
        (Some(path), _) => Cfr::from_text(&std::fs::read_to_string(path)?),
        (None, Some(p)) => cfr_from_prime(p),
        (None, None) => Err(ScsError::InvalidParameter("need --cfr or --prime".into())),
    }
}

fn build(a: &GenScsArgs, cfr: &Cfr) -> Result<ScsFamily> {
    let need_insert = || {
        a.insert
            .clone()
            .or_else(|| a.s0.map(|s| vec![s]))
            .ok_or_else(|| ScsError::InvalidParameter("need --insert (or --s0)".into()))
    };
    match a.construction {
        Construction::C1 => construction1(cfr),
        Construction::C2 => {
            let s0 =
                a.s0.ok_or_else(|| ScsError::InvalidParameter("c2 needs --s0".into()))?;
            construction2(cfr, s0)
        }
        Construction::C3 => construction3(cfr, &need_insert()?),
        Construction::C4 => construction4(cfr, None, &need_insert()?, a.sets),
    }
}

fn member(family: &ScsFamily, index: usize) -> Result<&crate::sequence::ComplexSeq> {
    family.members().nth(index).ok_or_else(|| {
        ScsError::InvalidParameter(format!(
            "member {index} out of range ({} sequences)",
            family.total_sequences()
        ))
    })
}

fn gen_scs(a: GenScsArgs, argv: &[String], tol: &Tolerances) -> Result<i32> {
    let cfr = load_cfr(&a.cfr, a.prime)?;
    let family = build(&a, &cfr)?;
    let summary = summarize(&family, family.length(), tol.zero)?;
    let z = summary.sets.iter().map(|s| s.zcz_width).min().unwrap_or(0);
    let block = json!({
        "construction": a.construction,
        "L": family.length(),
        "K": family.num_sets(),
        "M": family.set_size(),
        "theta_a": summary.theta_a,
        "theta_c": summary.theta_c,
        "theta_max": summary.theta_max,
        "Z": z,
        "omega": family.constraint().forbidden_vec(),
    });
    outln!("{}", serde_json::to_string_pretty(&block)?);
    if let Some(path) = &a.out {
        write_family(path, &family)?;
        echo_config(
            path,
            argv,
            json!({
                "construction": a.construction,
                "cfr_fingerprint": cfr.fingerprint(),
                "cfr": cfr.rows(),
                "s0": a.s0,
                "insert": a.insert,
                "sets": a.sets,
            }),
        )?;
    }
    if let Some(path) = &a.spectrum_csv {
        let seq = member(&family, a.member)?;
        let report = check_spectrum(seq, family.constraint(), tol.zero)?;
        std::fs::write(path, spectrum_csv(&report, family.constraint()))?;
    }
    if let Some(path) = &a.corr_csv {
        let [i, j] = a.pair[..] else {
            return Err(ScsError::InvalidParameter(
                "--pair takes exactly two indices i,j".into(),
            ));
        };
        let profile = pccf_fast(member(&family, i)?, member(&family, j)?)?;
        std::fs::write(path, profile_csv(&profile))?;
    }
    Ok(EXIT_OK)
}

fn parse_table_entry(entry: &str) -> Result<TableRow> {
    let bad = || ScsError::InvalidParameter(format!("table entry must be N:F, got {entry:?}"));
    let (n, f) = entry.split_once(':').ok_or_else(bad)?;
    table_row(
        n.trim().parse().map_err(|_| bad())?,
        f.trim().parse().map_err(|_| bad())?,
    )
}

fn bounds(a: BoundsArgs, tol: &Tolerances) -> Result<i32> {
    if let Some(path) = &a.family {
        let family = read_family(path)?;
        let report = family_bounds_report(&family, tol)?;
        outln!("{}", serde_json::to_string_pretty(&report)?);
        if let Some(v) = &report.verdicts {
            let label = |verdict| match verdict {
                crate::bounds::Verdict::Optimal => "optimal",
                crate::bounds::Verdict::AsymptoticallyOptimalCandidate => {
                    "asymptotically optimal candidate"
                }
                crate::bounds::Verdict::Suboptimal => "suboptimal",
            };
            outln!(
                "liu: {} (eta = {:.6})",
                label(v.liu),
                report.eta.unwrap_or(f64::NAN)
            );
            if let Some(c) = v.interset {
                let note = if c.verdict == crate::bounds::Verdict::Optimal {
                    " (= L/√(L−n))"
                } else {
                    ""
                };
                outln!("interset: {}{note}", label(c.verdict));
            }
            outln!("tsai: {}", label(v.tsai));
            outln!("zcz: {:?}", v.zcz);
            let violated = !v.theta_a.satisfied
                || v.theta_c.is_some_and(|c| !c.satisfied)
                || v.interset.is_some_and(|c| !c.satisfied)
                || !report.tsai_satisfied
                || !report.combined.satisfied;
            if violated {
                eprintln!("a lower bound is violated by the measured values");
                return Ok(EXIT_VERIFY);
            }
        }
        return Ok(EXIT_OK);
    }
    if let Some(primes) = &a.ladder {
        let ladder = prime_ladder(primes)?;
        outln!("{}", serde_json::to_string_pretty(&ladder)?);
        out!("{}", render_table(&ladder.rows));
        outln!("eta strictly decreasing: {}", ladder.monotone);
        return Ok(EXIT_OK);
    }
    if let Some(entries) = &a.table {
        let rows = entries
            .iter()
            .map(|e| parse_table_entry(e))
            .collect::<Result<Vec<_>>>()?;
        outln!("{}", serde_json::to_string_pretty(&rows)?);
        out!("{}", render_table(&rows));
        return Ok(EXIT_OK);
    }
    match (a.m, a.l, a.n) {
        (Some(m), Some(l), Some(n)) => {
            let report = bounds_report(m, l, n, a.window.unwrap_or(l), tol.bound)?;
            outln!("{}", serde_json::to_string_pretty(&report)?);
            outln!("theta_opti = {:.4}", report.theta_opti);
            Ok(EXIT_OK)
        }
        _ => Err(ScsError::InvalidParameter(
            "give --M, --L and --n, or --family, --ladder or --table".into(),
        )),
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: Value,
}

fn check(name: impl Into<String>, pass: bool, detail: Value) -> Check {
    Check {
        name: name.into(),
        pass,
        detail,
    }
}

fn verify(a: VerifyArgs, tol: &Tolerances) -> Result<i32> {
    let checks = if let Some(path) = &a.cfr {
        verify_cfr_file(path)?
    } else if let Some(path) = &a.family {
        verify_family(&read_family(path)?, tol)?
    } else if let Some(path) = &a.seq {
        let (seq, _) = sequence_from_json(&std::fs::read_to_string(path)?)?;
        let seq = match seq.domain() {
            crate::sequence::Domain::Time => seq,
            crate::sequence::Domain::Frequency => crate::spectral::idft(&seq)?,
        };
        let (position, err) = worst_modulus_error(&seq);
        let mut checks = vec![check(
            "unimodular",
            err <= tol.zero,
            json!({"worst_position": position, "deviation": err, "energy": energy(&seq)}),
        )];
        if let Some(omega) = &a.omega {
            let constraint = SpectralConstraint::new(seq.len(), omega.iter().copied())?;
            let r = check_spectrum(&seq, &constraint, tol.zero)?;
            checks.push(check(
                "uniform_power",
                r.pass,
                json!({"max_leakage": r.max_leakage, "max_deviation": r.max_deviation}),
            ));
        }
        checks
    } else {
        unreachable!("clap requires one input")
    };
    let pass = checks.iter().all(|c| c.pass);
    outln!(
        "{}",
        serde_json::to_string_pretty(&json!({"pass": pass, "checks": checks}))?
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn verify_cfr_file(path: &Path) -> Result<Vec<Check>> {
    let rows = crate::cfr::parse_cfr_text(&std::fs::read_to_string(path)?)?;
    let verdict = verify_cfr(&rows)?;
    let mut checks = vec![check(
        "cfr_axioms",
        verdict.is_ok(),
        serde_json::to_value(&verdict)?,
    )];
    if verdict.is_ok() {
        let cfr = Cfr::new(rows)?;
        let inv = inverse_rows(&cfr);
        let r = cfr.num_rows();
        let mut single = true;
        let mut perm = true;
        for i in 0..r {
            for j in (0..r).filter(|&j| j != i) {
                perm &= inv.difference_is_permutation(i, j);
                for s in 0..cfr.order() {
                    single &= shift_coincidences(&cfr, i, j, s)? == 1;
                }
            }
        }
        checks.push(check("unique_shift_coincidence", single, Value::Null));
        checks.push(check("inverse_difference_permutation", perm, Value::Null));
    }
    Ok(checks)
}

/// Structure is checked at load time; this covers the spectrum, modulus,
/// ZCZ, pairwise energy identity and every lower bound.
pub fn verify_family_report(family: &ScsFamily, tol: &Tolerances) -> Result<(bool, Value)> {
    let checks = verify_family(family, tol)?;
    let pass = checks.iter().all(|c| c.pass);
    Ok((pass, json!({"pass": pass, "checks": checks})))
}

fn verify_family(family: &ScsFamily, tol: &Tolerances) -> Result<Vec<Check>> {
    let constraint = family.constraint();
    let mut checks = Vec::new();
    let mut worst_leak: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    for seq in family.members() {
        let r = check_spectrum(seq, constraint, tol.zero)?;
        worst_leak = worst_leak.max(r.max_leakage);
        worst_dev = worst_dev.max(r.max_deviation);
    }
    let power_ok = worst_leak <= tol.zero && worst_dev <= tol.zero;
    checks.push(check(
        "uniform_power",
        power_ok,
        json!({"max_leakage": worst_leak, "max_deviation": worst_dev, "admissible_power": constraint.admissible_power()}),
    ));
    if family.alphabet_order().is_some() {
        let ok = family.members().all(|s| check_unimodular(s, tol.zero));
        checks.push(check("unimodular", ok, Value::Null));
    }
    if power_ok {
        let members: Vec<_> = family.members().collect();
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for (i, a) in members.iter().enumerate() {
            for b in &members[i..] {
                let r = sum_of_squares_check(a, b, constraint, tol)?;
                ok &= r.pass;
                worst = worst.max((r.lhs - r.rhs).abs() / r.rhs);
            }
        }
        checks.push(check(
            "sum_of_squares",
            ok,
            json!({"max_relative_error": worst}),
        ));
        let report = family_bounds_report(family, tol)?;
        let v = report
            .verdicts
            .as_ref()
            .expect("family report carries verdicts");
        let bounds_ok = v.theta_a.satisfied
            && v.theta_c.is_none_or(|c| c.satisfied)
            && v.interset.is_none_or(|c| c.satisfied)
            && report.tsai_satisfied
            && report.combined.satisfied;
        checks.push(check(
            "lower_bounds",
            bounds_ok,
            serde_json::to_value(&report)?,
        ));
    }
    Ok(checks)
}
