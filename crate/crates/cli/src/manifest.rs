// SPDX-License-Identifier: Apache-2.0

//! Run manifest: enough to repeat a run and check that its inputs are unchanged.

use std::fs;
use std::path::Path;

use gp3d_core::Status;
use serde::{Deserialize, Serialize};

use crate::context::{digest, CliError, Ctx, InputRecord, PointStats};

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, `--out` removed.
    pub args: Vec<String>,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
    pub points: Vec<PointStats>,
    pub status: String,
    pub exit_code: i32,
}

pub fn write(ctx: &mut Ctx, command: &str, args: Vec<String>, status: Status, exit_code: i32) -> Result<(), CliError> {
    let mut outputs = ctx.outputs.clone();
    outputs.sort();
    let m = Manifest {
        tool: "gp3d".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        args,
        seed: ctx.seed,
        config: serde_json::to_value(&ctx.cfg).expect("config serializes"),
        inputs: ctx.inputs.clone(),
        outputs,
        points: ctx.points.clone(),
        status: status.as_str().into(),
        exit_code,
    };
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
    ctx.write(FILE_NAME, &text)
}

/// Loads a manifest and checks every recorded input against its digest.
pub fn load_for_rerun(path: &Path) -> Result<(Vec<String>, Manifest), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let m: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for i in &m.inputs {
        let bytes = fs::read(&i.path)
            .map_err(|e| CliError::Usage(format!("recorded input {}: {e}", i.path.display())))?;
        if digest(&bytes) != i.sha256 {
            return Err(CliError::Input(format!(
                "recorded input {} changed since the run",
                i.path.display()
            )));
        }
    }
    Ok((m.args.clone(), m))
}
