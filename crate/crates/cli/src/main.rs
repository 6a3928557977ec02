//! `holeqd`: run one named experiment from a TOML config and write CSV/JSON
//! artifacts plus `manifest.json` into the output directory.
//!
//! Exit status: 0 on success, 2 for command-line or config errors, 1 for
//! compute or I/O errors. Failures print a JSON error record on stderr and,
//! when the output directory is known, write it to `error.json`.

mod config;
mod experiments;
mod output;

use clap::Parser;
use config::{Experiment, RunConfig};
use output::Artifacts;
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Parser)]
#[command(name = "holeqd", version, about = "Hole-spin quantum-dot simulations")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `experiment` from the config.
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker-thread cap; results do not depend on it.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Print the built-in constants and exit.
    #[arg(long)]
    list_presets: bool,
}

fn error_record(kind: &str, message: &str, extra: serde_json::Value) -> serde_json::Value {
    let mut v = json!({ "status": "error", "kind": kind, "message": message });
    if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

fn fail(code: u8, record: serde_json::Value, out: Option<&Path>) -> ExitCode {
    let text = serde_json::to_string_pretty(&record).unwrap_or_default();
    eprintln!("{text}");
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(dir.join("error.json"), text + "\n");
        }
    }
    ExitCode::from(code)
}

fn config_error(message: String) -> ExitCode {
    fail(2, error_record("config", &message, json!({})), None)
}

fn list_presets() {
    // Write errors (closed pipe) end the listing quietly.
    let mut out = std::io::stdout().lock();
    for p in holeqd::presets::catalog() {
        let values: Vec<String> = p.values.iter().map(|v| v.to_string()).collect();
        let line = writeln!(out, "{:<9} {:<40} {:<28} {:<6} {}", p.group, p.name, values.join(", "), p.unit, p.provenance);
        if line.is_err() {
            return;
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str::<RunConfig>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if cli.experiment.is_some() {
        cfg.experiment = cli.experiment;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if cfg.experiment.is_none() {
        return Err("no experiment given (set `experiment` in the config or pass --experiment)".into());
    }
    if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from("out"));
    }
    if cfg.threads == Some(0) {
        return Err("threads must be at least 1".into());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return config_error(e.to_string().trim().to_string()),
    };
    if cli.list_presets {
        list_presets();
        return ExitCode::SUCCESS;
    }
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(msg) => return config_error(msg),
    };
    let exp = cfg.experiment.expect("checked in load");
    let out_dir = cfg.out.clone().expect("defaulted in load");

    if let Some(n) = cfg.threads {
        if let Err(e) = holeqd::exec::limit_threads(n) {
            return fail(1, error_record("compute", &e, json!({ "module": "exec", "operation": "limit_threads" })), Some(&out_dir));
        }
    }
    let mut art = match Artifacts::create(&out_dir) {
        Ok(a) => a,
        Err(e) => return fail(1, error_record("io", &e.to_string(), json!({})), None),
    };
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    if let Err(e) = experiments::run(exp, &cfg, &mut art) {
        let extra = json!({ "experiment": exp.name(), "module": e.module, "operation": e.operation });
        return fail(1, error_record("compute", &e.message, extra), Some(&out_dir));
    }
    let manifest = json!({
        "tool": "holeqd",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": exp.name(),
        "seed": cfg.seed,
        "started_unix_s": started,
        "files": art.files,
        "config": cfg,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    if let Err(e) = std::fs::write(art.path("manifest.json"), text) {
        return fail(1, error_record("io", &e.to_string(), json!({})), None);
    }
    ExitCode::SUCCESS
}
