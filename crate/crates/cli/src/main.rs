//! Command-line front end: fixture construction, property campaigns, and
//! exact evaluation of stored payloads.
//!
//! Exit codes: 0 all checks pass, 1 property failure, 2 usage or parse
//! error, 3 domain error (singular point, uncovered point, probe budget).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use localg_core::json::parse_eval_input;
use localg_core::local_fun::ConstRule;
use localg_core::report::SuiteReport;
use localg_core::suites::{
    axioms_suite, demo_example112, equiv_suite, ideal_suite, leibniz_suite, offdiag_suite,
    restrict_suite, CampaignConfig, DemoConfig, DemoDetails,
};
use localg_core::{Endpoint, Error, Interval, MultiIndex, OpenBox, Point, Rational};

#[derive(Parser)]
#[command(
    name = "localg",
    version,
    about = "Exact algebras of locally defined functions with dense singularities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the dense-anchor chart family and verify its checklist.
    DemoExample112 {
        /// Bound on half the total interval length.
        #[arg(long, default_value = "1/1000")]
        epsilon: String,
        /// Number of charts to materialize.
        #[arg(long, default_value_t = 200)]
        charts: usize,
        /// Constant rule for the components.
        #[arg(long, value_enum, default_value_t = ConstantsKind::Index)]
        constants: ConstantsKind,
        /// One-dimensional domain as "lo,hi"; endpoints may be -inf/+inf.
        #[arg(long, default_value = "-inf,+inf")]
        domain: String,
        #[arg(long, env = "LOCALG_SEED", default_value_t = 0)]
        seed: u64,
        /// Density witnesses to sample.
        #[arg(long, default_value_t = 20)]
        witnesses: usize,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a property campaign and report per-case results.
    Check {
        #[arg(value_enum)]
        suite: SuiteKind,
        #[arg(long, env = "LOCALG_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of randomized cases (defaults per suite).
        #[arg(long)]
        cases: Option<usize>,
        /// Witness points per case.
        #[arg(long, default_value_t = 20)]
        witnesses: usize,
        /// Probe depth for generated net bodies.
        #[arg(long = "probe-depth", default_value_t = 8)]
        probe_depth: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a stored local function or net element exactly.
    Eval {
        /// JSON file holding the payload.
        input: PathBuf,
        /// Evaluation point "p/q" or "p/q,p/q,...".
        #[arg(long)]
        point: String,
        /// Derivative multi-index "k" or "k,k,...".
        #[arg(long)]
        derive: Option<String>,
        /// Net component index (net elements only).
        #[arg(long, default_value_t = 0)]
        lambda: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstantsKind {
    Index,
    Factorial,
    Zero,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteKind {
    Axioms,
    Offdiag,
    Ideal,
    Leibniz,
    Restrict,
    Equiv,
}

impl SuiteKind {
    fn default_cases(self) -> usize {
        match self {
            SuiteKind::Axioms | SuiteKind::Offdiag => 500,
            _ => 200,
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Precondition(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_DOMAIN),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::DemoExample112 {
            epsilon,
            charts,
            constants,
            domain,
            seed,
            witnesses,
            json,
        } => {
            let cfg = DemoConfig {
                epsilon: Rational::from_str(&epsilon)?,
                charts,
                witnesses,
                seed,
                constants: match constants {
                    ConstantsKind::Index => ConstRule::Index,
                    ConstantsKind::Factorial => ConstRule::Factorial,
                    ConstantsKind::Zero => ConstRule::Zero,
                },
                domain: parse_domain(&domain)?,
            };
            let (report, details) = demo_example112(&cfg)?;
            print_demo(&report, &details);
            if let Some(path) = json {
                write_json(
                    &path,
                    &serde_json::json!({ "report": report, "details": details }),
                )?;
            }
            Ok(exit_for(&report))
        }
        Command::Check {
            suite,
            seed,
            cases,
            witnesses,
            probe_depth,
            json,
        } => {
            let mut cfg = CampaignConfig::new(seed, cases.unwrap_or(suite.default_cases()));
            cfg.witnesses = witnesses;
            cfg.probe_depth = probe_depth;
            let report = match suite {
                SuiteKind::Axioms => axioms_suite(&cfg)?,
                SuiteKind::Offdiag => offdiag_suite(&cfg)?,
                SuiteKind::Ideal => ideal_suite(&cfg)?,
                SuiteKind::Leibniz => leibniz_suite(&cfg)?,
                SuiteKind::Restrict => restrict_suite(&cfg)?,
                SuiteKind::Equiv => equiv_suite(&cfg)?,
            };
            println!("{}", report.summary());
            for failure in report.failures(10) {
                println!(
                    "  [FAIL] case {} {}{}",
                    failure.case,
                    failure.name,
                    failure
                        .detail
                        .as_deref()
                        .map(|d| format!(": {d}"))
                        .unwrap_or_default()
                );
            }
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
            Ok(exit_for(&report))
        }
        Command::Eval {
            input,
            point,
            derive,
            lambda,
            json,
        } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
            let payload = parse_eval_input(&text)?;
            let x = parse_point(&point)?;
            let p = derive.as_deref().map(parse_multi_index).transpose()?;
            let value = payload.eval(lambda, &x, p.as_ref())?;
            println!("{value}");
            if let Some(path) = json {
                write_json(&path, &serde_json::json!({ "value": value }))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(report: &SuiteReport) -> ExitCode {
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn parse_point(s: &str) -> Result<Point, Error> {
    s.split(',').map(|c| Rational::from_str(c.trim())).collect()
}

fn parse_multi_index(s: &str) -> Result<MultiIndex, Error> {
    let entries = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("invalid derivative index {c:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiIndex(entries))
}

fn parse_domain(s: &str) -> Result<OpenBox, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("domain must be \"lo,hi\", got {s:?}")));
    }
    let endpoint = |part: &str| -> Result<Endpoint, Error> {
        match part {
            "-inf" => Ok(Endpoint::NegInf),
            "+inf" | "inf" => Ok(Endpoint::PosInf),
            _ => Ok(Endpoint::Value(Rational::from_str(part)?)),
        }
    };
    let interval = Interval::new(endpoint(parts[0])?, endpoint(parts[1])?)?;
    Ok(OpenBox::new(vec![interval]))
}

fn print_demo(report: &SuiteReport, details: &DemoDetails) {
    println!(
        "dense-anchor family: {} charts, epsilon {}",
        details.chart_count, details.epsilon
    );
    for check in &report.checks {
        println!(
            "  [{}] {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name
        );
    }
    println!(
        "total interval length {} (bound {})",
        details.length_sum, details.length_bound
    );
    let anchors: Vec<String> = details
        .first_anchors
        .iter()
        .map(|a| a.to_string())
        .collect();
    println!("first anchors: {}", anchors.join(", "));
    for (x, v) in &details.sample_values {
        println!("  f({x}) = {v}");
    }
    match &details.strong_violation {
        Some(v) => println!(
            "strong-compatibility violation witness: x={}, y={}, components {} vs {}",
            localg_core::regions::fmt_point(&v.x),
            localg_core::regions::fmt_point(&v.y),
            v.term_x,
            v.term_y
        ),
        None => println!("no strong-compatibility violation among materialized charts"),
    }
    if let Some(failing) = &details.moderateness_failures {
        println!(
            "polynomial moderateness fails for degrees {failing:?} over the probed range"
        );
    }
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text.as_bytes())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
