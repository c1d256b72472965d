// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use gp3d_core::{GgpSolution, SolverConfig, Status};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 5,
            CliError::Io(_) => 1,
        }
    }
}

pub fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub fn status_code(s: Status) -> i32 {
    match s {
        Status::Optimal => 0,
        Status::Infeasible => 3,
        Status::Unbounded => 4,
        Status::IterationLimit | Status::NumericalFailure => 6,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Solver statistics of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub label: String,
    pub status: String,
    pub objective: Option<f64>,
    pub newton_steps: usize,
    pub phase1_steps: usize,
    pub outer_iterations: usize,
}

impl PointStats {
    pub fn from_solution(label: impl Into<String>, s: &GgpSolution) -> Self {
        PointStats {
            label: label.into(),
            status: s.status.as_str().to_string(),
            objective: (s.status == Status::Optimal).then_some(s.objective_value),
            newton_steps: s.gp.iterations,
            phase1_steps: s.gp.phase1_iterations,
            outer_iterations: s.gp.trace.len(),
        }
    }

    /// A point rejected before solving.
    pub fn rejected(label: impl Into<String>, status: Status) -> Self {
        PointStats {
            label: label.into(),
            status: status.as_str().to_string(),
            objective: None,
            newton_steps: 0,
            phase1_steps: 0,
            outer_iterations: 0,
        }
    }
}

pub struct Ctx {
    pub cfg: SolverConfig,
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
    pub points: Vec<PointStats>,
}

impl Ctx {
    pub fn new(cfg: SolverConfig, seed: u64, jobs: usize, out: PathBuf) -> Self {
        Ctx {
            cfg,
            seed,
            jobs,
            out,
            inputs: Vec::new(),
            outputs: Vec::new(),
            points: Vec::new(),
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
        self.inputs.push(InputRecord {
            path: fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf()),
            sha256: digest(text.as_bytes()),
        });
        Ok(text)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out.display())))?;
        let p = self.out.join(name);
        fs::write(&p, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(())
    }
}

/// Fixed-precision float for CSV cells; empty when undefined.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

pub fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Overall status of a sweep: Optimal if any point is, else the first point's.
pub fn sweep_status(points: &[Status]) -> Status {
    if points.contains(&Status::Optimal) {
        Status::Optimal
    } else {
        points.first().copied().unwrap_or(Status::Infeasible)
    }
}

pub fn summarize(statuses: &[Status]) {
    let ok = statuses.iter().filter(|s| **s == Status::Optimal).count();
    println!("points: {} optimal of {}", ok, statuses.len());
    if ok == 0 {
        eprintln!("no sweep point solved to optimality");
    }
}
