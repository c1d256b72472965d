// SPDX-License-Identifier: Apache-2.0

//! `gp3d` command-line driver.
//!
//! Exit codes: 0 optimal, 1 I/O failure, 2 usage error, 3 infeasible,
//! 4 unbounded, 5 malformed input, 6 solver did not converge.

mod args;
mod commands;
mod context;
mod manifest;
mod sweep;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, FILE_FLAGS};
use context::{status_code, CliError, Ctx};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let code = match Cli::try_parse_from(&argv) {
        Ok(cli) => {
            let recorded = recorded_args(&argv[1..]);
            finish(execute(cli, recorded))
        }
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn finish(r: Result<i32, CliError>) -> i32 {
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

/// Invocation arguments without `--out`, with input paths made absolute.
fn recorded_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        if let Some((flag, v)) = a.split_once('=') {
            if FILE_FLAGS.contains(&flag) {
                out.push(flag.to_string());
                out.push(absolute(v));
                continue;
            }
        }
        out.push(a.clone());
        if FILE_FLAGS.contains(&a.as_str()) {
            if let Some(v) = it.next() {
                out.push(absolute(v));
            }
        }
    }
    out
}

fn absolute(p: &str) -> String {
    std::fs::canonicalize(Path::new(p)).map_or_else(|_| p.to_string(), |q| q.display().to_string())
}

fn execute(cli: Cli, recorded: Vec<String>) -> Result<i32, CliError> {
    if let Command::Rerun(r) = &cli.command {
        let (args, m) = manifest::load_for_rerun(&r.manifest)?;
        let mut argv = vec!["gp3d".to_string()];
        argv.extend(args.iter().cloned());
        argv.push("--out".into());
        argv.push(cli.out.display().to_string());
        let inner = Cli::try_parse_from(&argv).map_err(|e| CliError::Input(format!("recorded arguments: {e}")))?;
        if matches!(inner.command, Command::Rerun(_)) {
            return Err(CliError::Input("a manifest cannot record a rerun".into()));
        }
        log::info!("rerunning `{}` recorded with seed {}", m.command, m.seed);
        return execute(inner, args);
    }
    let cfg = cli.solver.config();
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut ctx = Ctx::new(cfg, cli.seed, cli.jobs as usize, cli.out.clone());
    let name = command_name(&cli.command);
    let status = match &cli.command {
        Command::Solve(a) => commands::solve::run(&mut ctx, a)?,
        Command::Paths(a) => commands::paths::run(&mut ctx, a)?,
        Command::Size(a) => commands::size::run(&mut ctx, a)?,
        Command::Interconnect(a) => commands::interconnect::run(&mut ctx, a)?,
        Command::Floorplan(a) => commands::floorplan::run(&mut ctx, a)?,
        Command::Fit(a) => commands::fit::run(&mut ctx, a)?,
        Command::Rerun(_) => unreachable!("handled above"),
    };
    let code = status_code(status);
    manifest::write(&mut ctx, name, recorded, status, code)?;
    Ok(code)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve(_) => "solve",
        Command::Paths(_) => "paths",
        Command::Size(_) => "size",
        Command::Interconnect(_) => "interconnect",
        Command::Floorplan(_) => "floorplan",
        Command::Fit(_) => "fit",
        Command::Rerun(_) => "rerun",
    }
}
