//! Command-line surface: construction, analysis, verification, simulation.
//!
//! Exit codes: 0 success/PASS, 1 usage error, 2 domain error,
//! 3 verification counterexample, 4 budget-limited (Unknown).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::assignment::{fixture, Assignment, ShapeVector, FIXTURE_NAMES};
use crate::combinatorics::{decimal_string, parse_rational, rational_string};
use crate::moments::{
    mean_random, mean_uniform, variance_random, variance_uniform, MomentReport, StragglerModel,
};
use crate::report::{Instance, ReportEnvelope};
use crate::search::{
    brute_moments, nearest_realizable, realize_shape, verify_extremal, EnumerationBudget,
    RealizeOutcome,
};
use crate::shapes::classify;
use crate::simulator::{compare, simulate, SimConfig};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "cloneplan",
    version,
    about = "Balanced job-cloning assignments: exact recovery moments, extremal designs, simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct an assignment and emit it as JSON
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Exact mean/variance of the number of distinct jobs recovered
    Analyze(AnalyzeArgs),
    /// Verify extremal-variance properties or shape realizability
    Verify(VerifyArgs),
    /// Seeded Monte Carlo simulation cross-checked against exact values
    Simulate(SimulateArgs),
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Cyclic (n,k,k,n) assignment: server j holds jobs j..j+k-1 mod n
    Cyclic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repetition assignment: n/k job groups, each cloned onto r servers
    Stretched {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in worked example (table1, table2, table3, table4)
    Fixture {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate an assignment from a JSON or CSV 0/1-matrix file
    FromFile {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Assignment file (JSON or CSV 0/1 matrix)
    pub file: PathBuf,
    /// Single subset size to analyze
    #[arg(long, conflicts_with = "x_range")]
    pub x: Option<usize>,
    /// Inclusive subset-size range, e.g. 1..6 (default 0..c)
    #[arg(long, value_name = "A..B")]
    pub x_range: Option<String>,
    /// Straggler model row instead of per-x rows, e.g. bernoulli:1/2
    #[arg(long)]
    pub model: Option<String>,
    /// Cross-check closed forms against brute-force enumeration
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub c: usize,
    /// Cap on search nodes before reporting Unknown
    #[arg(long)]
    pub budget_nodes: Option<u64>,
    /// Cap on wall-clock seconds before reporting Unknown
    #[arg(long)]
    pub budget_seconds: Option<u64>,
    /// Cap on enumerated assignments
    #[arg(long)]
    pub budget_assignments: Option<u64>,
    /// Check realizability of one shape (comma-separated counts) instead of
    /// running the full extremal verification
    #[arg(long, value_name = "C0,C1,...")]
    pub target_shape: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Assignment file (JSON or CSV 0/1 matrix)
    pub file: PathBuf,
    /// uniform:X, bernoulli:P, or explicit:p0,p1,...,pc
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the d-histogram as CSV
    #[arg(long)]
    pub histogram_csv: Option<PathBuf>,
}

/// Parses `uniform:X`, `bernoulli:P`, `explicit:p0,p1,...`.
pub fn parse_model(s: &str) -> Result<StragglerModel> {
    let (kind, arg) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("model `{s}` missing `:`")))?;
    match kind {
        "uniform" => {
            let x: usize = arg
                .parse()
                .map_err(|_| Error::Parse(format!("bad subset size `{arg}`")))?;
            Ok(StragglerModel::UniformSubset(x))
        }
        "bernoulli" => Ok(StragglerModel::BernoulliStraggle(parse_rational(arg)?)),
        "explicit" => {
            let pmf = arg
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            Ok(StragglerModel::ExplicitX(pmf))
        }
        other => Err(Error::Parse(format!(
            "unknown model `{other}` (expected uniform, bernoulli, or explicit)"
        ))),
    }
}

fn parse_x_range(s: &str, c: usize) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("bad range `{s}`, expected A..B")))?;
    let lo: usize = a.parse().map_err(|_| Error::Parse(format!("bad range start `{a}`")))?;
    let hi: usize = b.parse().map_err(|_| Error::Parse(format!("bad range end `{b}`")))?;
    if lo > hi || hi > c {
        return Err(Error::ParameterDomain(format!(
            "range {lo}..{hi} outside 0..{c}"
        )));
    }
    Ok((lo, hi))
}

fn parse_shape_counts(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad shape entry `{t}`")))
        })
        .collect()
}

fn read_assignment(path: &Path) -> Result<(Assignment, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let a = if text.trim_start().starts_with('{') {
        Assignment::from_json(&text)?
    } else {
        Assignment::from_csv_matrix(&text)?
    };
    Ok((a, bytes))
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{content}"),
    }
    Ok(())
}

fn budget_from(args: &VerifyArgs) -> EnumerationBudget {
    let mut b = EnumerationBudget::default();
    if let Some(n) = args.budget_nodes {
        b.max_nodes = n;
    }
    if let Some(s) = args.budget_seconds {
        b.time_cap = Duration::from_secs(s);
    }
    if let Some(a) = args.budget_assignments {
        b.max_assignments = a;
    }
    b
}

/// Runs a parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            }
        }
    }
}

fn cmd_gen(kind: GenKind) -> Result<i32> {
    let (a, out) = match kind {
        GenKind::Cyclic { n, k, out } => (Assignment::cyclic(n, k)?, out),
        GenKind::Stretched { n, k, r, out } => (Assignment::stretched(n, k, r)?, out),
        GenKind::Fixture { name, out } => {
            if !FIXTURE_NAMES.contains(&name.as_str()) {
                return Err(Error::UnknownFixture(name));
            }
            (fixture(&name)?, out)
        }
        GenKind::FromFile { path, out } => (read_assignment(&path)?.0, out),
    };
    let shape = a.shape_vector();
    let summary = format!(
        "(n={}, k={}, r={}, c={}) shape {:?} classification {}",
        a.n(),
        a.k(),
        a.r(),
        a.c(),
        shape.counts(),
        classify(&shape)
    );
    match out {
        Some(path) => {
            fs::write(&path, a.to_json())?;
            eprintln!("wrote {}", path.display());
            println!("{summary}");
        }
        None => {
            println!("{}", a.to_json());
            eprintln!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    let (a, bytes) = read_assignment(&args.file)?;
    let shape = a.shape_vector();
    let (n, k, r, c) = (a.n(), a.k(), a.r(), a.c());
    let mut rows = Vec::new();
    let mut mismatch = false;

    if let Some(model_str) = &args.model {
        let model = parse_model(model_str)?;
        let mean = mean_random(n, k, r, c, &model)?;
        let variance = variance_random(&shape, &model)?;
        let mut row = json!({
            "model": model.describe(),
            "mean": rational_string(&mean),
            "mean_decimal": decimal_string(&mean, 12),
            "variance": rational_string(&variance),
            "variance_decimal": decimal_string(&variance, 12),
        });
        if args.oracle {
            // mix per-x brute-force moments through the law of total variance
            let pmf = model.x_pmf(c)?;
            let mut e_mean = num::BigRational::from_integer(0.into());
            let mut e_mean_sq = e_mean.clone();
            let mut e_var = e_mean.clone();
            for (x, w) in pmf.iter().enumerate() {
                if num::Zero::is_zero(w) {
                    continue;
                }
                let b = brute_moments(&a, x)?;
                e_var += w * &b.variance;
                e_mean_sq += w * (&b.mean * &b.mean);
                e_mean += w * &b.mean;
            }
            let brute_var = e_var + e_mean_sq - &e_mean * &e_mean;
            let ok = e_mean == mean && brute_var == variance;
            mismatch |= !ok;
            row["oracle"] = json!(if ok { "MATCH" } else { "MISMATCH" });
        }
        rows.push(row);
    } else {
        let (lo, hi) = match (&args.x, &args.x_range) {
            (Some(x), _) => {
                if *x > c {
                    return Err(Error::ParameterDomain(format!("x={x} exceeds c={c}")));
                }
                (*x, *x)
            }
            (None, Some(range)) => parse_x_range(range, c)?,
            (None, None) => (0, c),
        };
        for x in lo..=hi {
            let mean = mean_uniform(n, k, r, c, x)?;
            let variance = variance_uniform(&shape, x)?;
            let mut row = json!({
                "x": x,
                "mean": rational_string(&mean),
                "mean_decimal": decimal_string(&mean, 12),
                "variance": rational_string(&variance),
                "variance_decimal": decimal_string(&variance, 12),
            });
            if args.oracle {
                let b = brute_moments(&a, x)?;
                let ok = b.mean == mean && b.variance == variance;
                mismatch |= !ok;
                row["oracle"] = json!(if ok { "MATCH" } else { "MISMATCH" });
            }
            rows.push(row);
        }
    }

    let content = match args.format {
        OutputFormat::Json => {
            let payload = json!({
                "shape": shape.counts(),
                "classification": classify(&shape).to_string(),
                "rows": rows,
            });
            ReportEnvelope::new(
                "analyze",
                Some(Instance { n, k, r, c }),
                &bytes,
                payload,
            )
            .to_json()
        }
        OutputFormat::Csv => {
            let mut s = String::from("x,mean,variance\n");
            for row in &rows {
                let x = row
                    .get("x")
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| row["model"].as_str().unwrap_or("model").to_string());
                s.push_str(&format!(
                    "{},{},{}\n",
                    x,
                    row["mean"].as_str().unwrap_or(""),
                    row["variance"].as_str().unwrap_or("")
                ));
            }
            s
        }
    };
    write_or_print(args.out.as_deref(), &content)?;
    Ok(if mismatch { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let budget = budget_from(&args);
    let instance = Instance { n: args.n, k: args.k, r: args.r, c: args.c };
    let digest_input = format!(
        "{} {} {} {} target={:?}",
        args.n, args.k, args.r, args.c, args.target_shape
    );

    if let Some(target) = &args.target_shape {
        let counts = parse_shape_counts(target)?;
        let shape = ShapeVector::new(args.n, args.k, args.r, args.c, counts)?;
        let outcome = realize_shape(&shape, &budget)?;
        let nearest = nearest_realizable(&shape, &budget)?;
        let payload = json!({
            "target": shape.counts(),
            "outcome": outcome.label(),
            "witness": match &outcome {
                RealizeOutcome::Found(a) => Some(serde_json::to_value(a.as_ref())?),
                _ => None,
            },
            "nearest": {
                "distance": nearest.distance,
                "shapes": nearest.shapes.iter().map(|s| s.counts().to_vec()).collect::<Vec<_>>(),
                "complete": nearest.complete,
            },
        });
        let envelope =
            ReportEnvelope::new("verify", Some(instance), digest_input.as_bytes(), payload);
        write_or_print(args.out.as_deref(), &envelope.to_json())?;
        println!("target {:?}: {}", shape.counts(), outcome.label());
        for s in &nearest.shapes {
            println!("nearest (L1 distance {}): {:?}", nearest.distance, s.counts());
        }
        let code = if matches!(outcome, RealizeOutcome::Unknown) || !nearest.complete {
            EXIT_UNKNOWN
        } else {
            EXIT_OK
        };
        return Ok(code);
    }

    let report = verify_extremal(args.n, args.k, args.r, args.c, &budget)?;
    let payload = serde_json::to_value(&report)?;
    let envelope = ReportEnvelope::new("verify", Some(instance), digest_input.as_bytes(), payload);
    write_or_print(args.out.as_deref(), &envelope.to_json())?;
    println!(
        "min-variance {} | max-variance {} | duality {} | overall {}",
        report.min_variance_verdict,
        report.max_variance_verdict,
        report.duality_verdict,
        report.overall
    );
    for ce in &report.counterexamples {
        println!("counterexample: {ce}");
    }
    Ok(report.exit_code())
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let (a, bytes) = read_assignment(&args.file)?;
    let model = parse_model(&args.model)?;
    let cfg = SimConfig { model: model.clone(), trials: args.trials, seed: args.seed };
    let sim = simulate(&a, &cfg)?;

    let shape = a.shape_vector();
    let (n, k, r, c) = (a.n(), a.k(), a.r(), a.c());
    let exact = MomentReport::new(
        mean_random(n, k, r, c, &model)?,
        variance_random(&shape, &model)?,
        model.describe(),
    );
    let cmp = compare(&exact, &sim);
    let payload = json!({
        "simulation": serde_json::to_value(&sim)?,
        "exact": {
            "mean": rational_string(&exact.mean),
            "mean_decimal": decimal_string(&exact.mean, 12),
            "variance": rational_string(&exact.variance),
            "variance_decimal": decimal_string(&exact.variance, 12),
        },
        "comparison": serde_json::to_value(&cmp)?,
    });
    let envelope = ReportEnvelope::new(
        "simulate",
        Some(Instance { n, k, r, c }),
        &bytes,
        payload,
    );
    if let Some(path) = &args.histogram_csv {
        fs::write(path, sim.histogram_csv())?;
        eprintln!("wrote {}", path.display());
    }
    write_or_print(args.out.as_deref(), &envelope.to_json())?;
    Ok(if cmp.hard_failure || cmp.flagged {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_OK
    })
}
