mod cache;
mod commands;
mod expr;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use commands::{CliError, ModeArg, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "qmeasure", version, about = "Haar states, quantum traces and c-functions on compact quantum groups")]
struct Cli {
    /// Output format; `verify` defaults to text, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Module cache directory (overrides $QMEASURE_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the module cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Numeric {
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Per-slot truncation for float mode.
    #[arg(long, default_value_t = 40)]
    trunc: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Haar state of a product of coefficients.
    Haar {
        #[arg(long)]
        group: String,
        #[arg(long)]
        expr: String,
        /// Reduced word for the longest element (default: a fixed one).
        #[arg(long)]
        word: Option<String>,
        #[command(flatten)]
        num: Numeric,
    },
    /// Quantum quasi-trace of an operator on pi_{w,t}.
    Qtr {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        op: String,
        /// Torus angles in turns, e.g. "1/4,0.5"; empty keeps t symbolic.
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        num: Numeric,
    },
    /// Quantum c-function, as a trace and as a product.
    Cfunc {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
        /// Complex pairs per coordinate: "re,im;re,im".
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Scale lambda over FROM:TO:N and emit CSV.
        #[arg(long, allow_hyphen_values = true)]
        sweep: Option<String>,
        #[command(flatten)]
        num: Numeric,
    },
    /// Run verification suites.
    Verify {
        /// Suite name; repeat for several, omit for all.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Root datum, Weyl group and optionally a module.
    Info {
        #[arg(long)]
        group: String,
        /// Highest weight, e.g. "[1,0]" or "rho".
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
}

fn emit(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
        Format::Text | Format::Csv => {
            let Some(obj) = v.as_object() else {
                println!("{v}");
                return;
            };
            let cell = |x: &Value| match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            if format == Format::Text {
                for (k, x) in obj {
                    println!("{k}: {}", cell(x));
                }
            } else {
                let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
                println!("{}", keys.join(","));
                let row: Vec<String> = obj.values().map(|x| format!("\"{}\"", cell(x).replace('"', "\"\""))).collect();
                println!("{}", row.join(","));
            }
        }
    }
}

fn parse_expr(what: &'static str, s: &str) -> Result<expr::Expression, CliError> {
    expr::parse_expression(s).map_err(|err| CliError::Parse { what, err })
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let format = cli.format;
    let done = |o: Outcome| {
        emit(&o.report, format.unwrap_or(Format::Json));
        o.failed
    };
    Ok(match &cli.cmd {
        Command::Haar { group, expr, word, num } => {
            let cfg = RunConfig::new(group, word.as_deref(), None, num.q, num.mode, num.trunc, num.tol)?;
            done(commands::haar(&cfg, &parse_expr("--expr", expr)?)?)
        }
        Command::Qtr { group, word, op, t, num } => {
            let cfg = RunConfig::new(group, Some(word), t.as_deref(), num.q, num.mode, num.trunc, num.tol)?;
            done(commands::qtr_cmd(&cfg, &parse_expr("--op", op)?)?)
        }
        Command::Cfunc { group, word, lambda, sweep, num } => {
            let cfg = RunConfig::new(group, Some(word), None, num.q, num.mode, num.trunc, num.tol)?;
            match sweep {
                Some(s) => {
                    let (csv, failed) = commands::cfunc_sweep(&cfg, lambda, s)?;
                    print!("{csv}");
                    failed
                }
                None => done(commands::cfunc(&cfg, lambda)?),
            }
        }
        Command::Verify { suite, q, seed } => {
            let (reports, failed) = commands::verify(suite, *q, *seed)?;
            match format.unwrap_or(Format::Text) {
                Format::Json => {
                    let v: Vec<Value> = reports.iter().map(|r| r.to_json()).collect();
                    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Format::Csv => {
                    println!("suite,status,checks,failures,max_residual,seconds");
                    for r in &reports {
                        let status = if r.passed() { "pass" } else { "fail" };
                        println!(
                            "{},{status},{},{},{:e},{:.3}",
                            r.name,
                            r.checks,
                            r.failures.len(),
                            r.max_residual,
                            r.elapsed.as_secs_f64()
                        );
                    }
                }
                Format::Text => {
                    for r in &reports {
                        println!("{}", r.line());
                    }
                }
            }
            failed
        }
        Command::Info { group, lambda } => {
            let cfg = RunConfig::new(group, None, None, 2.0, ModeArg::Auto, 1, 0.0)?;
            done(commands::info(&cfg, lambda.as_deref())?)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = if cli.no_cache { None } else { cache::resolve_dir(cli.cache_dir.as_deref()) };
    if let Some(d) = &dir {
        cache::load(d);
    }
    let result = run(&cli);
    if let Some(d) = &dir {
        // the cache is an optimisation; failing to write it is not an error
        let _ = cache::store(d);
    }
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).expect("serializable"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
