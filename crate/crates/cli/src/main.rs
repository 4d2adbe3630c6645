//! polysieve: representation counts for sums of generalized m-gonal
//! numbers, exact p-adic density tables, Eisenstein/cusp splits, sieve
//! bounds and a verification harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure,
//! 3 degenerate-math error (vanishing base density and friends).

use clap::{Args, Parser, Subcommand, ValueEnum};
use polysieve_core::num_traits::ToPrimitive;
use polysieve_core::{
    arith, eisenstein, localdensity, polygonal, rat, sieve, Error, Rat,
};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

mod verify;

#[derive(Parser)]
#[command(name = "polysieve", version, about = "generalized polygonal representations, local densities and sieve sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputOpts {
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exact prime factorization of a nonzero integer
    Factor {
        #[arg(long, allow_hyphen_values = true)]
        n: i128,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Evaluate the generalized m-gonal number p_m(n)
    Pm {
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Enumerate representations Σ a_j p_m(n_j) = n under constraints
    Represent {
        #[arg(long)]
        m: u32,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long)]
        n: i64,
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<u64>>,
        /// require gcd(n_j, Q) = 1 for nonzero coordinates
        #[arg(long)]
        gcd_modulus: Option<u128>,
        /// almost-prime filter: at most L prime factors outside S
        #[arg(long)]
        almost_prime: Option<u32>,
        /// exceptional prime set S (with --almost-prime)
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        s_primes: Vec<u64>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Per-prime local density tables (exact rationals)
    Density {
        #[arg(long)]
        m: u32,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<u64>>,
        /// target H = 4h (overrides --n)
        #[arg(long, allow_hyphen_values = true)]
        h4: Option<i128>,
        /// target n (converted through the scaled target)
        #[arg(long)]
        n: Option<i64>,
        /// largest odd prime to tabulate
        #[arg(long, default_value = "50")]
        p_max: u64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Eisenstein coefficients, exact counts, residuals and the cusp bound
    Eisenstein {
        #[arg(long)]
        m: u32,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<u64>>,
        #[arg(long, default_value = "30")]
        n_max: i64,
        /// Euler product cutoff (enclosure width ~ 2/cutoff)
        #[arg(long, default_value = "200000")]
        cutoff: u64,
        /// sieve level for the cusp bound column, as BASE^EXP or integer
        #[arg(long, default_value = "5^27")]
        d_level: String,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Four-fold sieve sums, main term, error constant and sifted counts
    SieveBound {
        #[arg(long)]
        m: u32,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        h4: Option<i128>,
        #[arg(long)]
        z: f64,
        /// sieve level D, as BASE^EXP or integer
        #[arg(long, default_value = "5^27")]
        d_level: String,
        #[arg(long, default_value = "10")]
        beta: f64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Reproduce the Ω(p)/p bound tables and the reference-case report
    Tables {
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Run the verification suites
    Verify {
        #[arg(long, default_value = "small")]
        grid: String,
        #[arg(long, default_value = "0")]
        seed: u64,
    },
    /// For each n ≤ N, can n be represented with almost-prime inputs?
    UniversalityScan {
        #[arg(long)]
        m: u32,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long)]
        l: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        s_primes: Vec<u64>,
        #[arg(long)]
        n_max: i64,
        #[command(flatten)]
        out: OutputOpts,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("POLYSIEVE_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // keep clap's rendered help/version on their normal path
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let degenerate = matches!(
                e,
                Error::DegenerateBaseDensity
                    | Error::NonconvergentSeries
                    | Error::OracleUnstable { .. }
                    | Error::DivergentRegime(_)
            );
            ExitCode::from(if degenerate { 3 } else { 1 })
        }
    }
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rat_json(r: &Rat) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

fn parse_level(s: &str) -> Result<Rat, Error> {
    if let Some((base, exp)) = s.split_once('^') {
        let base: u64 = base
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad level base in {s:?}")))?;
        let exp: u32 = exp
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad level exponent in {s:?}")))?;
        Ok(Rat::from_integer(polysieve_core::num_bigint::BigInt::from(base).pow(exp)))
    } else {
        let v: i128 = s
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad level {s:?}")))?;
        Ok(rat(v))
    }
}

struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn new(opts: &OutputOpts) -> Result<Self, Error> {
        let out: Box<dyn Write> = match &opts.output {
            Some(path) => Box::new(
                std::fs::File::create(path)
                    .map_err(|e| Error::Invalid(format!("cannot create {path:?}: {e}")))?,
            ),
            None => Box::new(std::io::stdout()),
        };
        Ok(Sink { out })
    }

    fn emit_csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(&mut self.out);
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(())
    }

    fn emit_json(&mut self, value: &Value) -> Result<(), Error> {
        let s = serde_json::to_string_pretty(value).expect("serializable");
        writeln!(self.out, "{s}").map_err(|e| Error::Invalid(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Factor { n, out } => {
            let f = arith::factorize(n)?;
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = f
                        .factors
                        .iter()
                        .map(|&(p, e)| vec![p.to_string(), e.to_string()])
                        .collect();
                    sink.emit_csv(&["prime", "exponent"], &rows)?;
                }
                Format::Json => sink.emit_json(&json!({
                    "n": n.to_string(),
                    "sign": f.sign,
                    "factors": f.factors.iter().map(|&(p,e)| json!({"p": p, "e": e})).collect::<Vec<_>>(),
                    "big_omega": f.big_omega(),
                    "omega": f.omega(),
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Pm { m, n } => {
            println!("{}", polygonal::pm(m, n)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Represent {
            m,
            a,
            n,
            d,
            gcd_modulus,
            almost_prime,
            s_primes,
            out,
        } => {
            let prob = polygonal::PolygonalProblem::new(m, &a, n)?;
            let constraint = polygonal::SolutionConstraint {
                divisors: d,
                gcd_modulus,
                almost_prime: match almost_prime {
                    Some(l) => Some((l, arith::PrimeSetS::new(&s_primes)?)),
                    None => None,
                },
            };
            let sols = polygonal::enumerate_representations(&prob, &constraint)?;
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Csv => {
                    let header: Vec<String> =
                        (1..=prob.ell()).map(|j| format!("n{j}")).collect();
                    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
                    let rows: Vec<Vec<String>> = sols
                        .iter()
                        .map(|s| s.iter().map(|x| x.to_string()).collect())
                        .collect();
                    sink.emit_csv(&header_refs, &rows)?;
                }
                Format::Json => sink.emit_json(&json!({
                    "count": sols.len(),
                    "solutions": sols,
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Density {
            m,
            a,
            d,
            h4,
            n,
            p_max,
            out,
        } => {
            let d = d.unwrap_or_else(|| vec![1; a.len()]);
            let h4 = resolve_target(m, &a, h4, n)?;
            let mut rows = Vec::new();
            let mut json_rows = Vec::new();
            for p in arith::primes_up_to(p_max) {
                if p == 2 {
                    continue;
                }
                let params = localdensity::LocalDensityParams::new(m, &a, &d, p, h4)?;
                let bp = localdensity::density_general(m, &a, &d, p, h4)?;
                let beta = localdensity::beta_p(m, &a, &d, p, h4)?;
                let r_str = params
                    .r
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "inf".into());
                rows.push(vec![
                    p.to_string(),
                    r_str.clone(),
                    rat_str(&bp),
                    rat_str(&beta),
                ]);
                json_rows.push(json!({
                    "p": p,
                    "r": r_str,
                    "b_p": rat_json(&bp),
                    "beta_p": rat_json(&beta),
                }));
            }
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Csv => sink.emit_csv(&["p", "r", "b_p", "beta_p"], &rows)?,
                Format::Json => sink.emit_json(&json!({
                    "m": m, "a": a, "d": d, "h4": h4.to_string(),
                    "primes": json_rows,
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eisenstein {
            m,
            a,
            d,
            n_max,
            cutoff,
            d_level,
            out,
        } => {
            let d = d.unwrap_or_else(|| vec![1; a.len()]);
            let level = parse_level(&d_level)?;
            let level_f = level.to_f64().unwrap();
            let mut rows = Vec::new();
            let mut json_rows = Vec::new();
            for n in 0..=n_max {
                let r = eisenstein::cusp_residual_with_cutoff(m, &a, &d, n, cutoff)?;
                let bound_log10 =
                    eisenstein::cusp_bound_log10(m, r.h.to_f64().unwrap(), level_f);
                rows.push(vec![
                    n.to_string(),
                    rat_str(&r.h),
                    r.count.to_string(),
                    format!("{:.9e}", r.eisenstein.lo),
                    format!("{:.9e}", r.eisenstein.hi),
                    format!("{:.9e}", r.residual.mid()),
                    format!("{:.6}", bound_log10),
                ]);
                json_rows.push(json!({
                    "n": n,
                    "h": rat_json(&r.h),
                    "count": r.count,
                    "eisenstein_lo": r.eisenstein.lo,
                    "eisenstein_hi": r.eisenstein.hi,
                    "residual_mid": r.residual.mid(),
                    "cusp_bound_log10": bound_log10,
                }));
            }
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Csv => sink.emit_csv(
                    &[
                        "n",
                        "h",
                        "count",
                        "eisenstein_lo",
                        "eisenstein_hi",
                        "residual_mid",
                        "cusp_bound_log10",
                    ],
                    &rows,
                )?,
                Format::Json => sink.emit_json(&json!({
                    "m": m, "a": a, "d": d, "rows": json_rows,
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SieveBound {
            m,
            a,
            n,
            h4,
            z,
            d_level,
            beta,
            out,
        } => {
            let h4 = resolve_target(m, &a, h4, n)?;
            let level = parse_level(&d_level)?;
            let cfg = sieve::SieveConfig::new(level.clone(), beta, z)?;
            let sum_dz = sieve::sum_dz(&cfg, m, &a, h4)?;
            let sum_prime = sieve::sum_dz_prime(&cfg, m, &a, h4)?;
            let sum_mt = sieve::sum_mt(&cfg, m, &a, h4)?;
            let c_beta = sieve::c_beta(&cfg)?;
            let h = rat(h4) / rat(4);
            let hf = h.to_f64().unwrap();
            let level_log10 = level.to_f64().unwrap().log10();
            let slb = sieve::s_lower_bound(m, hf.max(1.0), z, level_log10);
            let s_exact = match n {
                Some(n) => Some(sieve::s_exact(m, &a, n, z + 0.5, cfg.w)?),
                None => None,
            };
            let value = json!({
                "m": m, "a": a, "z": z, "beta": beta,
                "h": rat_json(&h),
                "sumDz": rat_json(&sum_dz),
                "sumPrime": rat_json(&sum_prime),
                "sumMT": rat_json(&sum_mt),
                "Cbeta": c_beta,
                "mainTerm_log10": slb.main_log10,
                "cuspTerm_log10": slb.cusp_log10,
                "Sexact": s_exact,
                "Slower_sign": if slb.positive { 1 } else { -1 },
                "Slower_log10_abs": slb.log10_abs,
                "crossover_h_log10": slb.crossover_h_log10,
            });
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Json => sink.emit_json(&value)?,
                Format::Csv => {
                    let sign = if slb.positive { "1" } else { "-1" };
                    let rows = vec![vec![
                        rat_str(&sum_dz),
                        rat_str(&sum_prime),
                        rat_str(&sum_mt),
                        format!("{c_beta:.9e}"),
                        format!("{:.6}", slb.main_log10),
                        format!("{:.6}", slb.cusp_log10),
                        s_exact.map(|v| v.to_string()).unwrap_or_default(),
                        sign.to_string(),
                        format!("{:.6}", slb.log10_abs),
                    ]];
                    sink.emit_csv(
                        &[
                            "sumDz",
                            "sumPrime",
                            "sumMT",
                            "Cbeta",
                            "mainTerm_log10",
                            "cuspTerm_log10",
                            "Sexact",
                            "Slower_sign",
                            "Slower_log10_abs",
                        ],
                        &rows,
                    )?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tables { out } => {
            let bound_rows = localdensity::omega_bound_tables();
            let discrepancies = localdensity::table_discrepancy_report();
            let mut rows = Vec::new();
            for r in &bound_rows {
                let max = r.computed_max.as_ref();
                rows.push(vec![
                    r.case_label.to_string(),
                    r.r_class.label().to_string(),
                    r.p.to_string(),
                    r.m.to_string(),
                    rat_str(&r.paper_bound),
                    max.map(rat_str).unwrap_or_default(),
                    max.map(|v| format!("{:.6}", v.to_f64().unwrap()))
                        .unwrap_or_default(),
                    max.map(|v| (*v <= r.paper_bound).to_string())
                        .unwrap_or_default(),
                    r.samples.to_string(),
                ]);
            }
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Csv => {
                    sink.emit_csv(
                        &[
                            "case",
                            "r_class",
                            "p",
                            "m",
                            "paper_bound",
                            "computed_max",
                            "computed_max_f64",
                            "respects_bound",
                            "samples",
                        ],
                        &rows,
                    )?;
                    eprintln!(
                        "reference case table: {} discrepancies vs the general formula (see `tables --format json`)",
                        discrepancies.len()
                    );
                }
                Format::Json => sink.emit_json(&json!({
                    "omega_bounds": bound_rows.iter().map(|r| json!({
                        "case": r.case_label.to_string(),
                        "r_class": r.r_class.label(),
                        "p": r.p,
                        "m": r.m,
                        "paper_bound": rat_json(&r.paper_bound),
                        "computed_max": r.computed_max.as_ref().map(rat_json),
                        "respects_bound": r.computed_max.as_ref().map(|v| *v <= r.paper_bound),
                        "samples": r.samples,
                    })).collect::<Vec<_>>(),
                    "reference_case_discrepancies": discrepancies.iter().map(|t| json!({
                        "m": t.m, "a": t.a, "d": t.d, "p": t.p,
                        "h4": t.h_times_4.to_string(),
                        "alpha": t.alpha,
                        "table": rat_json(&t.table),
                        "general": rat_json(&t.general),
                    })).collect::<Vec<_>>(),
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { grid, seed } => {
            let full = match grid.as_str() {
                "small" => false,
                "full" => true,
                other => {
                    return Err(Error::Invalid(format!(
                        "unknown grid {other:?}; use small or full"
                    )))
                }
            };
            let ok = verify::run(full, seed);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::UniversalityScan {
            m,
            a,
            l,
            s_primes,
            n_max,
            out,
        } => {
            let s = arith::PrimeSetS::new(&s_primes)?;
            let mut rows = Vec::new();
            let mut first_failure: Option<i64> = None;
            for n in 0..=n_max {
                let prob = polygonal::PolygonalProblem::new(m, &a, n)?;
                let c = polygonal::SolutionConstraint {
                    almost_prime: Some((l, s.clone())),
                    ..Default::default()
                };
                let represented = !polygonal::enumerate_representations(&prob, &c)?.is_empty();
                if !represented && first_failure.is_none() {
                    first_failure = Some(n);
                }
                rows.push(vec![n.to_string(), represented.to_string()]);
            }
            let mut sink = Sink::new(&out)?;
            match out.format {
                Format::Csv => sink.emit_csv(&["n", "represented"], &rows)?,
                Format::Json => sink.emit_json(&json!({
                    "m": m, "a": a, "L": l,
                    "first_failure": first_failure,
                    "rows": rows.iter().map(|r| json!({"n": r[0], "represented": r[1] == "true"})).collect::<Vec<_>>(),
                }))?,
            }
            if let Some(n) = first_failure {
                eprintln!("first unrepresented target: n = {n}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve_target(m: u32, a: &[u64], h4: Option<i128>, n: Option<i64>) -> Result<i128, Error> {
    match (h4, n) {
        (Some(h4), _) => Ok(h4),
        (None, Some(n)) => Ok(polygonal::PolygonalProblem::new(m, a, n)?
            .scaled_target()
            .h_times_4),
        (None, None) => Err(Error::Invalid("provide --h4 or --n".into())),
    }
}
