//! Command-line front end. Exit codes: 0 all checks pass, 1 a check or
//! identity failed, 2 bad input, 3 a configured cap was exceeded.

mod commands;
mod instance;
mod report;
mod suite;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{integral, norm, parse_free_expression, summing, NormKind, RouteChoice, SummingKind};
pub use instance::{
    gen_random, Instance, InstanceFile, NamedLinearMap, NamedMap, NamedOperator, NamedSample, NamedTensor,
    NamedTwoLipschitz, NormSpec, Q,
};
pub use report::{Check, CheckKind, Entry, Report, Timing, Value};
pub use suite::{verify_suite, Suites};

use crate::config::Caps;
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Instances shipped with the binary, used by `verify --builtin`.
pub const BUILTIN: &[(&str, &str)] =
    &[("x3", include_str!("../../instances/x3.json")), ("x3prime", include_str!("../../instances/x3prime.json"))];

#[derive(Parser, Debug)]
#[command(
    name = "lipbox",
    version,
    about = "Exact norms and certificates for Lip-Linear operators on finite metric spaces"
)]
struct Cli {
    /// Also write the report as JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    cap_points: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    cap_dim: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    cap_vertices: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    cap_iters: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// A norm of one object: `free` takes an expression such as "a+b" or "2a - 1/2 b".
    Norm { kind: NormArg, instance: PathBuf, object: String },
    /// Summing norms with their Pietsch certificates.
    Summing {
        kind: SummingArg,
        instance: PathBuf,
        object: String,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, value_enum, default_value = "both")]
        route: RouteArg,
    },
    /// Integral norm with its atomic representation.
    Integral {
        instance: PathBuf,
        object: String,
        /// Also build the discrete L∞ factorization (scalar codomain only).
        #[arg(long)]
        factorize: bool,
    },
    /// Replay every identity on an instance, the built-in instances, or a seeded random one.
    Verify {
        #[arg(required_unless_present_any = ["builtin", "seed"])]
        instance: Option<PathBuf>,
        #[arg(long, conflicts_with = "instance")]
        builtin: bool,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Also check a random instance generated from this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a random instance with one object of every kind.
    Gen {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum NormArg {
    Lipl,
    Lip,
    Blip,
    Free,
    Pi,
    Eps,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SummingArg {
    Lipp,
    Q,
    Dominated,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RouteArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    All,
    S2,
    S3,
    S4,
}

impl Cli {
    fn caps(&self) -> Result<Caps> {
        let mut caps = Caps::from_env()?;
        let flags = [
            (self.cap_points, &mut caps.points),
            (self.cap_dim, &mut caps.dim),
            (self.cap_vertices, &mut caps.vertices),
            (self.cap_iters, &mut caps.iterations),
        ];
        for (flag, slot) in flags {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        Ok(caps)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidMetric(_)
        | Error::InvalidNorm(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidExponent(_)
        | Error::PointOutOfRange(_)
        | Error::DegenerateSample(_)
        | Error::NonScalarCodomain(_)
        | Error::InvalidOperator(_) => EXIT_INPUT,
        _ => EXIT_FAILED,
    }
}

fn execute(cli: &Cli, report: &mut Report) -> Result<()> {
    let caps = cli.caps()?;
    match &cli.command {
        Command::Norm { kind, instance, object } => {
            let inst = Instance::parse_file(instance, &caps)?;
            let kind = match kind {
                NormArg::Lipl => NormKind::LipL,
                NormArg::Lip => NormKind::Lip,
                NormArg::Blip => NormKind::BLip,
                NormArg::Free => NormKind::Free,
                NormArg::Pi => NormKind::Pi,
                NormArg::Eps => NormKind::Eps,
            };
            report.push(norm(kind, &inst, object, &caps)?);
        }
        Command::Summing { kind, instance, object, p, q, route } => {
            let inst = Instance::parse_file(instance, &caps)?;
            let kind = match kind {
                SummingArg::Lipp => SummingKind::LipP,
                SummingArg::Q => SummingKind::Q,
                SummingArg::Dominated => SummingKind::Dominated,
            };
            let route = match route {
                RouteArg::A => RouteChoice::A,
                RouteArg::B => RouteChoice::B,
                RouteArg::Both => RouteChoice::Both,
            };
            report.results.extend(summing(kind, &inst, object, p, q, route, &caps)?);
        }
        Command::Integral { instance, object, factorize } => {
            let inst = Instance::parse_file(instance, &caps)?;
            report.results.extend(integral(&inst, object, *factorize, &caps)?);
        }
        Command::Verify { instance, builtin, suite, seed } => {
            let mut instances = Vec::new();
            if let Some(path) = instance {
                instances.push((String::new(), Instance::parse_file(path, &caps)?));
            }
            if *builtin {
                for (name, text) in BUILTIN {
                    instances.push((name.to_string(), Instance::parse_str(text, &caps)?));
                }
            }
            if let Some(seed) = seed {
                let file = gen_random(4, 2, *seed, &caps)?;
                instances.push((format!("seed{seed}"), file.validate(&caps)?));
            }
            let suites = match suite {
                SuiteArg::All => Suites::ALL,
                SuiteArg::S2 => Suites { s2: true, s3: false, s4: false },
                SuiteArg::S3 => Suites { s2: false, s3: true, s4: false },
                SuiteArg::S4 => Suites { s2: false, s3: false, s4: true },
            };
            report.checks = verify_suite(&instances, suites, &caps)?;
        }
        Command::Gen { points, dim, seed, out } => {
            let file = gen_random(*points, *dim, *seed, &caps)?;
            if let Some(path) = out {
                std::fs::write(path, file.to_json() + "\n")?;
            }
            report.output = Some(serde_json::to_value(&file).expect("instance files serialize"));
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command, prints the report
/// and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    let command = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut report = Report::new(command);
    let start = Instant::now();
    if let Err(err) = execute(&cli, &mut report) {
        eprintln!("error: {err}");
        return exit_code(&err);
    }
    report.finish();
    match &report.output {
        Some(out) => println!("{}", serde_json::to_string_pretty(out).expect("json")),
        None => print!("{}", report.render()),
    }
    if let Some(path) = &cli.report {
        report.timing = Some(Timing { elapsed_seconds: start.elapsed().as_secs_f64() });
        if let Err(err) = std::fs::write(path, report.to_json() + "\n") {
            eprintln!("error: cannot write report {}: {err}", path.display());
            return EXIT_INPUT;
        }
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
