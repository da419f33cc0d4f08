//! `secdec` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 internal error.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use secdec_core::api::{self, ApiError, ApiErrorCode};
use secdec_core::fixtures;
use secdec_core::report::{
    render_catalog_table, render_decision_table, render_evaluation_table, render_json, render_optimize_table,
    render_sensitivity_table, render_volume_table,
};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

/// Securitization decision engine.
///
/// FILE arguments accept a path, `-` for standard input, or `@name` for a
/// bundled fixture (`@base_scenario`, `@example_market`, ...).
#[derive(Debug, Parser)]
#[command(name = "secdec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Profit rates, all conditions and the default decision for a scenario.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        scenario: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Weighted decision for a scenario under a decision model.
    Decide {
        #[arg(long, value_name = "FILE")]
        scenario: String,
        #[arg(long, value_name = "FILE")]
        weights: String,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Optimal securitized fractions.
    Optimize {
        #[arg(long, value_name = "FILE")]
        scenario: String,
        /// Points per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Full optimization config document; --grid overrides its grid.
        #[arg(long, value_name = "FILE")]
        config: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Market volume conditions and the feasible-volume scan.
    Volume {
        #[arg(long, value_name = "FILE")]
        market: String,
        #[arg(long)]
        v_min: Option<f64>,
        #[arg(long)]
        v_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Values of named derivatives or levels.
    Sensitivity {
        #[arg(long, value_name = "FILE")]
        scenario: String,
        /// Quantity name such as `d1(I_gs|I_ts)`; repeatable.
        #[arg(long = "name", required = true)]
        names: Vec<String>,
        /// Finite-difference step.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the condition catalog.
    Conditions {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Allowed CORS origin; repeatable. Any origin when omitted.
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Api(ApiError),
    Internal(String),
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure::Api(e)
    }
}

fn read_source(arg: &str) -> Result<String, Failure> {
    if let Some(name) = arg.strip_prefix('@') {
        return fixtures::load(name).map_err(|e| Failure::Input(format!("fixture `{name}`: {e}")));
    }
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("standard input: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

fn read_json(arg: &str) -> Result<Value, Failure> {
    let text = read_source(arg)?;
    Ok(api::parse_body(&text)?)
}

fn read_object(arg: &str) -> Result<Map<String, Value>, Failure> {
    match read_json(arg)? {
        Value::Object(map) => Ok(map),
        _ => Err(Failure::Input(format!("{arg}: expected a JSON object"))),
    }
}

fn output<T: serde::Serialize>(value: &T, format: Format, table: fn(&T) -> String) -> String {
    match format {
        Format::Json => render_json(value),
        Format::Table => table(value),
    }
}

fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Evaluate { scenario, format } => {
            let report = api::evaluate(read_json(&scenario)?)?;
            Ok(output(&report, format, render_evaluation_table))
        }
        Command::Decide {
            scenario,
            weights,
            threshold,
            format,
        } => {
            let mut body = read_object(&weights)?;
            if let Some(t) = threshold {
                body.insert("threshold".into(), Value::from(t));
            }
            body.insert("scenario".into(), read_json(&scenario)?);
            let r = api::decide(Value::Object(body))?;
            Ok(output(&r, format, render_decision_table))
        }
        Command::Optimize {
            scenario,
            grid,
            config,
            format,
        } => {
            let mut body = Map::new();
            body.insert("scenario".into(), read_json(&scenario)?);
            let mut cfg = match config {
                Some(path) => Some(read_object(&path)?),
                None => None,
            };
            if let Some(n) = grid {
                cfg.get_or_insert_with(Map::new).insert("grid".into(), Value::from(n));
            }
            if let Some(cfg) = cfg {
                body.insert("config".into(), Value::Object(cfg));
            }
            let r = api::optimize(Value::Object(body))?;
            Ok(output(&r, format, render_optimize_table))
        }
        Command::Volume {
            market,
            v_min,
            v_max,
            step,
            format,
        } => {
            let mut body = read_object(&market)?;
            if v_min.is_some() || v_max.is_some() || step.is_some() {
                let scan = body.entry("scan").or_insert_with(|| Value::Object(Map::new()));
                let Value::Object(scan) = scan else {
                    return Err(Failure::Input("market `scan` must be an object".into()));
                };
                for (key, v) in [("v_min", v_min), ("v_max", v_max), ("step", step)] {
                    if let Some(v) = v {
                        scan.insert(key.into(), Value::from(v));
                    }
                }
            }
            let r = api::volume(Value::Object(body))?;
            Ok(output(&r, format, render_volume_table))
        }
        Command::Sensitivity {
            scenario,
            names,
            step,
            format,
        } => {
            let mut body = Map::new();
            body.insert("scenario".into(), read_json(&scenario)?);
            body.insert("names".into(), Value::from(names));
            if let Some(h) = step {
                body.insert("step".into(), Value::from(h));
            }
            let r = api::sensitivity(Value::Object(body))?;
            Ok(output(&r, format, render_sensitivity_table))
        }
        Command::Conditions { format } => Ok(output(&api::conditions(), format, render_catalog_table)),
        Command::Serve {
            port,
            host,
            cors_origins,
        } => {
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| Failure::Internal(e.to_string()))?;
            let config = secdec_service::ServiceConfig {
                allowed_origins: cors_origins,
            };
            runtime
                .block_on(secdec_service::serve(&host, port, config))
                .map_err(|e| Failure::Internal(format!("serve on {host}:{port}: {e}")))?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let default_level = if matches!(cli.command, Command::Serve { .. }) {
        "info"
    } else {
        "warn"
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level)).init();

    match execute(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Api(e)) => {
            eprintln!("error: {}", e.message);
            match e.code {
                ApiErrorCode::Internal => ExitCode::from(2),
                ApiErrorCode::Validation | ApiErrorCode::DerivativeName => ExitCode::from(1),
            }
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
