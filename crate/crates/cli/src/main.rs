//! Command-line front end for the `surdcf` library: expand quadratic surds
//! `√(D/Q)`, print unit ladders of the associated orders, verify the
//! convergent-unit correspondences on a single surd, or sweep them over every
//! admissible pair up to a bound.
//!
//! Exit codes: 0 success, 1 a verified claim failed on the given input,
//! 2 invalid input or usage.

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use surdcf::cfrac::CfError;
use surdcf::rings::RingError;
use surdcf::theorems::TheoremError;
use surdcf::{
    fundamental_unit, link_unit, shift_by_period, sweep, unit_ladder, verify_convergent_match,
    verify_period_end_units, verify_scaled_expansion, ConvergentStep, NullSink, PeriodicCf,
    QPolicy, RingContext, Surd, SweepConfig, UnitClass,
};

#[derive(Parser)]
#[command(
    name = "surdcf",
    version,
    about = "Periodic continued fractions of √(D/Q) and units of the associated quadratic orders"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Expand √(D/Q) into its periodic continued fraction
    Expand {
        d: String,
        /// Defaults to 1, i.e. a plain square root
        q: Option<String>,
    },
    /// Print powers of the fundamental unit of Z[√D1] with their convergent
    /// links and regularity
    Units {
        d: String,
        q: String,
        /// Highest power to print
        #[arg(long, default_value_t = 4)]
        count: u32,
    },
    /// Check the convergent-unit correspondences on one surd
    Verify {
        d: String,
        q: String,
        /// Which check to run (t1 unit links, t2 period-end units,
        /// c1 convergent match, t3 scaled expansion)
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        /// Periods covered by t2/c1 (default 2); exact period index for t3
        /// (default 1)
        #[arg(long)]
        l: Option<u32>,
        /// Divisor of s_k for t3 (default 1)
        #[arg(long)]
        t: Option<String>,
        /// Highest unit power linked by t1
        #[arg(long, default_value_t = 4)]
        powers: u32,
    },
    /// Run every check on every admissible (D, Q) with D ≤ dmax
    Sweep {
        #[arg(long, default_value_t = 500)]
        dmax: u64,
        /// Periods covered by the period-end checks
        #[arg(long, default_value_t = 2)]
        lmax: u32,
        /// Restrict to a single denominator Q
        #[arg(long)]
        q: Option<u64>,
        /// Worker threads (0 picks the rayon default)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Also write one JSON object per check row to this file
        #[arg(long)]
        ndjson: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    T1,
    T2,
    C1,
    T3,
    All,
}

/// Failure channel deciding the exit code.
enum Failure {
    /// A verified claim is false on this input: exit 1.
    Violation(String),
    /// Bad input or an internal engine error: exit 2.
    Invalid(String),
}

impl From<TheoremError> for Failure {
    fn from(e: TheoremError) -> Self {
        match e {
            TheoremError::Violation { .. } => Failure::Violation(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<CfError> for Failure {
    fn from(e: CfError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<RingError> for Failure {
    fn from(e: RingError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn parse_big(label: &str, s: &str) -> Result<BigUint, Failure> {
    s.parse()
        .map_err(|_| Failure::Invalid(format!("{label} must be a nonnegative integer, got {s:?}")))
}

fn class_name(class: UnitClass) -> &'static str {
    match class {
        UnitClass::Regular => "regular",
        UnitClass::Irregular => "irregular",
    }
}

fn period_strings(cf: &PeriodicCf) -> Vec<String> {
    cf.period().iter().map(|b| b.to_string()).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Expand { d, q } => cmd_expand(&d, q.as_deref().unwrap_or("1"), cli.format),
        Command::Units { d, q, count } => cmd_units(&d, &q, count, cli.format),
        Command::Verify {
            d,
            q,
            which,
            l,
            t,
            powers,
        } => cmd_verify(&d, &q, which, l, t.as_deref(), powers, cli.format),
        Command::Sweep {
            dmax,
            lmax,
            q,
            jobs,
            ndjson,
        } => cmd_sweep(dmax, lmax, q, jobs, ndjson.as_deref(), cli.format),
    }
}

fn expansion_cap() -> Result<Option<u64>, Failure> {
    match std::env::var("SURD_MAX_ITER") {
        Ok(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| Failure::Invalid(format!("SURD_MAX_ITER must be an integer, got {raw:?}"))),
        Err(_) => Ok(None),
    }
}

fn cmd_expand(d: &str, q: &str, format: Format) -> Result<(), Failure> {
    let surd = Surd::new(parse_big("D", d)?, parse_big("Q", q)?)?;
    let cf = match expansion_cap()? {
        Some(cap) => surd.expand_capped(cap)?,
        None => surd.expand()?,
    };
    match format {
        Format::Text => {
            println!("{surd} = {cf}");
            println!("b0 = {}", cf.b0());
            println!("period length = {} (m = {})", cf.period_len(), cf.m());
        }
        Format::Json => {
            let doc = json!({
                "D": surd.d().to_string(),
                "Q": surd.q().to_string(),
                "b0": cf.b0().to_string(),
                "period": period_strings(&cf),
                "period_length": cf.period_len(),
                "m": cf.m(),
            });
            println!("{doc}");
        }
    }
    Ok(())
}

fn cmd_units(d: &str, q: &str, count: u32, format: Format) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::Invalid("--count must be at least 1".into()));
    }
    let ctx = RingContext::new(parse_big("D", d)?, parse_big("Q", q)?)?;
    let ladder = unit_ladder(&ctx, count)?;
    match format {
        Format::Text => {
            println!(
                "D1 = {}, D2 = {}, q = {}, η = ε^{}",
                ctx.d1(),
                ctx.d2(),
                ctx.small_q(),
                ladder.eta_power
            );
            println!(
                "{:>3}  {:>14}  {:>14}  {:>4}  {:>6}  {:>5}  class",
                "j", "r", "s", "norm", "t", "k"
            );
            for rung in &ladder.rungs {
                let u = &rung.link.unit;
                println!(
                    "{:>3}  {:>14}  {:>14}  {:>4}  {:>6}  {:>5}  {}",
                    rung.power,
                    u.r(),
                    u.s(),
                    u.norm(),
                    rung.link.t,
                    rung.link.k,
                    class_name(rung.class)
                );
            }
        }
        Format::Json => {
            let units: Vec<Value> = ladder
                .rungs
                .iter()
                .map(|rung| {
                    let u = &rung.link.unit;
                    json!({
                        "j": rung.power,
                        "r": u.r().to_string(),
                        "s": u.s().to_string(),
                        "norm": u.norm().as_i8(),
                        "t": rung.link.t.to_string(),
                        "k": rung.link.k,
                        "class": class_name(rung.class),
                    })
                })
                .collect();
            let doc = json!({
                "D": ctx.surd().d().to_string(),
                "Q": ctx.surd().q().to_string(),
                "q": ctx.small_q().to_string(),
                "D1": ctx.d1().to_string(),
                "D2": ctx.d2().to_string(),
                "eta_power": ladder.eta_power,
                "units": units,
            });
            println!("{doc}");
        }
    }
    Ok(())
}

/// Outcome of one named check: human line plus machine detail.
struct CheckOutcome {
    text: String,
    detail: Value,
}

fn check_t1(ctx: &RingContext, powers: u32) -> Result<CheckOutcome, Failure> {
    let powers = powers.max(1);
    let cf = ctx.surd().expand()?;
    let horizon = cf.period_len() * (powers as usize + 1);
    let steps: Vec<ConvergentStep> = ctx.surd().convergents().take(horizon).collect();
    let eps = fundamental_unit(ctx.d1())?;
    let mut u = eps.clone();
    let mut parts = Vec::new();
    let mut links = Vec::new();
    for j in 1..=powers {
        let link = link_unit(ctx, &u, &steps)?;
        shift_by_period(ctx, &link, cf.period_len(), &steps)?;
        parts.push(format!("ε^{j} → k = {}, t = {}", link.k, link.t));
        links.push(json!({
            "j": j,
            "k": link.k,
            "t": link.t.to_string(),
            "r": link.unit.r().to_string(),
            "s": link.unit.s().to_string(),
        }));
        if j < powers {
            u = u.mul(&eps)?;
        }
    }
    Ok(CheckOutcome {
        text: parts.join("; "),
        detail: json!({ "links": links }),
    })
}

fn check_t2(ctx: &RingContext, l_max: u32) -> Result<CheckOutcome, Failure> {
    let ends = verify_period_end_units(ctx, l_max)?;
    let parts: Vec<String> = ends
        .iter()
        .map(|e| format!("l = {}: k = {}, η^{}", e.l, e.k, e.eta_power))
        .collect();
    let detail: Vec<Value> = ends
        .iter()
        .map(|e| {
            json!({
                "l": e.l,
                "k": e.k,
                "r": e.unit.r().to_string(),
                "s": e.unit.s().to_string(),
                "eta_power": e.eta_power,
            })
        })
        .collect();
    Ok(CheckOutcome {
        text: parts.join("; "),
        detail: json!({ "period_end_units": detail }),
    })
}

fn check_c1(ctx: &RingContext, l_max: u32) -> Result<CheckOutcome, Failure> {
    let matched = verify_convergent_match(ctx, l_max)?;
    let parts: Vec<String> = matched
        .entries
        .iter()
        .map(|e| format!("l = {}: r = {}, s = {}·Q", e.l, e.r, e.s_d2))
        .collect();
    let entries: Vec<Value> = matched
        .entries
        .iter()
        .map(|e| {
            json!({
                "l": e.l,
                "k": e.k,
                "k_d2": e.k_d2,
                "r": e.r.to_string(),
                "s": e.s.to_string(),
                "s_d2": e.s_d2.to_string(),
            })
        })
        .collect();
    Ok(CheckOutcome {
        text: format!(
            "periods {}/{}; {}",
            matched.period_len,
            matched.period_len_d2,
            parts.join("; ")
        ),
        detail: json!({
            "period_length": matched.period_len,
            "period_length_d2": matched.period_len_d2,
            "entries": entries,
        }),
    })
}

fn check_t3(ctx: &RingContext, l: u32, t: &BigUint) -> Result<CheckOutcome, Failure> {
    let got = verify_scaled_expansion(ctx, l, t)?;
    let rational: Vec<String> = got.rational.terms().iter().map(|c| c.to_string()).collect();
    Ok(CheckOutcome {
        text: format!(
            "t = {}: r_{}/t = [{}], predicted = computed = {}, D' = {}, Q' = {}, a = {}",
            got.t,
            got.k,
            rational.join(", "),
            got.predicted,
            got.d_scaled,
            got.q_scaled,
            got.a
        ),
        detail: json!({
            "k": got.k,
            "t": got.t.to_string(),
            "rational": rational,
            "predicted_b0": got.predicted.b0().to_string(),
            "predicted_period": period_strings(&got.predicted),
            "computed_b0": got.computed.b0().to_string(),
            "computed_period": period_strings(&got.computed),
            "D_scaled": got.d_scaled.to_string(),
            "Q_scaled": got.q_scaled.to_string(),
            "a": got.a.to_string(),
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    d: &str,
    q: &str,
    which: Which,
    l: Option<u32>,
    t: Option<&str>,
    powers: u32,
    format: Format,
) -> Result<(), Failure> {
    let ctx = RingContext::new(parse_big("D", d)?, parse_big("Q", q)?)?;
    let l_max = l.unwrap_or(2).max(1);
    let l_scaled = l.unwrap_or(1).max(1);
    let t_scaled = match t {
        Some(raw) => parse_big("t", raw)?,
        None => BigUint::from(1u32),
    };

    let mut outcomes: Vec<(&'static str, Result<CheckOutcome, Failure>)> = Vec::new();
    if matches!(which, Which::T1 | Which::All) {
        outcomes.push(("t1", check_t1(&ctx, powers)));
    }
    if matches!(which, Which::T2 | Which::All) {
        outcomes.push(("t2", check_t2(&ctx, l_max)));
    }
    if matches!(which, Which::C1 | Which::All) {
        outcomes.push(("c1", check_c1(&ctx, l_max)));
    }
    if matches!(which, Which::T3 | Which::All) {
        if t.is_none() && matches!(which, Which::T3) {
            // explicit t3 without --t is almost certainly a mistake; keep the
            // implicit t = 1 for `--which all` only
            return Err(Failure::Invalid("t3 needs --t DIVISOR (and --l for later periods)".into()));
        }
        outcomes.push(("t3", check_t3(&ctx, l_scaled, &t_scaled)));
    }

    let mut failure: Option<Failure> = None;
    let mut rendered = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(c) => rendered.push((id, "pass", c.text, c.detail)),
            Err(Failure::Violation(msg)) => {
                rendered.push((id, "fail", msg.clone(), Value::Null));
                if failure.is_none() {
                    failure = Some(Failure::Violation(msg));
                }
            }
            Err(invalid) => return Err(invalid),
        }
    }

    match format {
        Format::Text => {
            println!(
                "{}: D1 = {}, D2 = {}, q = {}",
                ctx.surd(),
                ctx.d1(),
                ctx.d2(),
                ctx.small_q()
            );
            for (id, status, text, _) in &rendered {
                println!("{id}: {status}  ({text})");
            }
        }
        Format::Json => {
            let checks: Vec<Value> = rendered
                .iter()
                .map(|(id, status, text, detail)| {
                    json!({
                        "check": id,
                        "status": status,
                        "summary": text,
                        "detail": detail,
                    })
                })
                .collect();
            let doc = json!({
                "D": ctx.surd().d().to_string(),
                "Q": ctx.surd().q().to_string(),
                "q": ctx.small_q().to_string(),
                "D1": ctx.d1().to_string(),
                "D2": ctx.d2().to_string(),
                "checks": checks,
            });
            println!("{doc}");
        }
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_sweep(
    dmax: u64,
    lmax: u32,
    q: Option<u64>,
    jobs: usize,
    ndjson: Option<&std::path::Path>,
    format: Format,
) -> Result<(), Failure> {
    if dmax < 2 {
        return Err(Failure::Invalid("--dmax must be at least 2".into()));
    }
    let cfg = SweepConfig {
        d_max: dmax,
        l_max: lmax.max(1),
        q_policy: match q {
            Some(q) => QPolicy::Only(q),
            None => QPolicy::All,
        },
        ..SweepConfig::default()
    };
    let report = if jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Failure::Invalid(e.to_string()))?;
        pool.install(|| sweep(&cfg, &NullSink))
    } else {
        sweep(&cfg, &NullSink)
    };

    if let Some(path) = ndjson {
        let file = std::fs::File::create(path)?;
        report.write_ndjson(std::io::BufWriter::new(file))?;
    }

    match format {
        Format::Text => print!("{}", report.summary()),
        Format::Json => {
            let violations: Vec<Value> = report.violations().map(|r| r.to_json()).collect();
            let doc = json!({
                "d_max": cfg.d_max,
                "l_max": cfg.l_max,
                "surds": report.stats.surds,
                "units": report.stats.units,
                "irregular_units": report.stats.irregular_units,
                "max_period": report.stats.max_period,
                "minus_norms_d1": report.stats.minus_norms_d1,
                "minus_norms_d2": report.stats.minus_norms_d2,
                "unit_candidate_indices": report.stats.unit_candidate_indices,
                "rows": report.rows.len(),
                "violations": violations,
            });
            println!("{doc}");
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Violation(format!(
            "{} of {} rows failed",
            report.violations().count(),
            report.rows.len()
        )))
    }
}
