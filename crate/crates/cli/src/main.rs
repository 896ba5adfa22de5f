use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gsp4::coset::cache::Cache;
use gsp4::coset::{decompose_cached, torus_of, Level};
use gsp4::group::{parse_element, TorusElement};
use gsp4::scalar::{PMode, SymbolSet};
use gsp4::suite::{self, RunConfig, SuiteName};
use gsp4::whittaker::cs_gsp4;
use gsp4::zeta::{assemble_ztilde, displayed, matches_displayed, NamedTestDatum, TestDatumTag, TwistCharacters};

#[derive(Parser)]
#[command(name = "gsp4", version, about = "Exact local computations for unramified principal series of GSp(4)")]
struct Cli {
    /// Coset cache directory (overrides GSP4_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Evaluate a named quantity.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Decompose a double coset into left cosets.
    Decompose {
        /// Diagonal element, e.g. `diag(p,p,1,1)` or 16 rational entries.
        #[arg(long)]
        element: String,
        /// `sph`, `sieg`, `kl` or `iw`, optionally with a depth such as `kl2`.
        #[arg(long)]
        level: String,
        #[arg(long)]
        prime: u32,
    },
    /// Inspect or clear the coset cache.
    Cache {
        #[arg(long)]
        clear: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Restrict to numeric primes (repeatable).
    #[arg(long)]
    prime: Vec<u32>,
    #[arg(long, value_parser = parse_pair)]
    weights: Option<(i32, i32)>,
    #[arg(long, value_parser = parse_pair)]
    qr: Option<(i32, i32)>,
    /// Restrict to symbolic p.
    #[arg(long)]
    symbolic_p: bool,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Keep only checks whose id contains this string.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Random cases per property check.
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Spherical Whittaker value at a torus element.
    Cs {
        #[arg(long, value_parser = parse_triple)]
        coweight: (i32, i32, i32),
        #[arg(long, value_parser = parse_pair, default_value = "1,0")]
        weights: (i32, i32),
        #[arg(long)]
        prime: Option<u32>,
    },
    /// Normalized zeta integral of a named test datum.
    Zeta {
        #[arg(long)]
        data: String,
        #[arg(long, default_value_t = 0)]
        q: i32,
        #[arg(long, default_value_t = 0)]
        r: i32,
        #[arg(long, value_parser = parse_pair, default_value = "1,0")]
        weights: (i32, i32),
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long)]
        symbolic_p: bool,
        /// `closed-form`: compare with the stored closed form.
        #[arg(long)]
        expect: Option<String>,
    },
}

fn parse_ints(s: &str) -> std::result::Result<Vec<i32>, String> {
    s.split(',').map(|x| x.trim().parse::<i32>().map_err(|e| format!("{x:?}: {e}"))).collect()
}

fn parse_pair(s: &str) -> std::result::Result<(i32, i32), String> {
    match parse_ints(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(format!("expected two comma-separated integers, got {s:?}")),
    }
}

fn parse_triple(s: &str) -> std::result::Result<(i32, i32, i32), String> {
    match parse_ints(s)?.as_slice() {
        &[a, b, c] => Ok((a, b, c)),
        _ => Err(format!("expected three comma-separated integers, got {s:?}")),
    }
}

fn mode(prime: Option<u32>, symbolic: bool) -> Result<PMode> {
    match (prime, symbolic) {
        (Some(_), true) => bail!("--prime and --symbolic-p are exclusive"),
        (Some(p), false) => Ok(PMode::Numeric(p)),
        (None, _) => Ok(PMode::Symbolic),
    }
}

fn check_weights((r1, r2): (i32, i32)) -> Result<()> {
    if !(0 <= r2 && r2 <= r1) {
        bail!("weights must satisfy 0 ≤ r2 ≤ r1, got {r1},{r2}");
    }
    Ok(())
}

fn verify(args: VerifyArgs, cache: Option<PathBuf>) -> Result<bool> {
    let suites = SuiteName::parse(&args.suite)?;
    let mut cfg = RunConfig { weights: args.weights, qr: args.qr, filter: args.only, cache, ..RunConfig::default() };
    if !args.prime.is_empty() {
        cfg.primes = args.prime;
        cfg.symbolic = args.symbolic_p;
    } else if args.symbolic_p {
        cfg.numeric = false;
    }
    if let Some(j) = args.jobs {
        cfg.parallelism = j;
    }
    if let Some(n) = args.cases {
        cfg.property_cases = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let report = suite::run(&suites, &cfg)?;
    print!("{}", report.summary());
    if let Some(path) = args.report {
        std::fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report.passed())
}

fn eval(cmd: EvalCommand) -> Result<bool> {
    match cmd {
        EvalCommand::Cs { coweight: (n1, n2, n0), weights, prime } => {
            check_weights(weights)?;
            let ss = SymbolSet::new(mode(prime, false)?, weights.0, weights.1);
            println!("{}", cs_gsp4(&TorusElement::new(n1, n2, n0), &ss));
            Ok(true)
        }
        EvalCommand::Zeta { data, q, r, weights, prime, symbolic_p, expect } => {
            check_weights(weights)?;
            gsp4::arith::check_qr(q, r, weights.0, weights.1)?;
            let mode = mode(prime, symbolic_p)?;
            let ss = SymbolSet::new(mode, weights.0, weights.1);
            let tag = TestDatumTag::parse(&data)?;
            let mut datum = NamedTestDatum::new(tag, q, r);
            if tag.is_twisted() {
                datum = datum.with_twist(TwistCharacters::sample(tag, prime.unwrap_or(3))?);
            }
            let value = assemble_ztilde(&datum, &ss)?;
            println!("{value}");
            match expect.as_deref() {
                None => Ok(true),
                Some("closed-form") => {
                    let ok = matches_displayed(&datum, &ss)?;
                    if !ok {
                        let closed = displayed::value(&datum, &ss).or_else(|| displayed::bare_table(tag, q, &ss));
                        eprintln!("mismatch: closed form is {}", closed.map_or("unavailable".into(), |c| c.to_string()));
                    }
                    Ok(ok)
                }
                Some(other) => bail!("unknown expectation {other:?}"),
            }
        }
    }
}

fn decompose(element: &str, level: &str, prime: u32, cache: &Cache) -> Result<bool> {
    let g = parse_element(element, prime)?;
    let t = torus_of(&g, prime)?;
    let level = Level::parse(level)?;
    let d = decompose_cached(cache, &t, level, prime)?;
    println!("{} cosets in K t K for t = {t}, K = {level}, p = {prime}", d.len());
    for rep in &d.reps {
        println!("{rep}");
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    let cache = cli.cache.as_ref().map_or_else(Cache::from_env, Cache::new);
    match cli.command {
        Command::Verify(args) => verify(args, Some(cache.dir().to_path_buf())),
        Command::Eval(cmd) => eval(cmd),
        Command::Decompose { element, level, prime } => decompose(&element, &level, prime, &cache),
        Command::Cache { clear } => {
            if clear {
                println!("removed {} entries from {}", cache.clear()?, cache.dir().display());
            } else {
                for e in cache.entries() {
                    println!("{}", e.display());
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
