// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gp3d_core::SolverConfig;

use crate::sweep::SweepSpec;

pub const OUT_ENV: &str = "GP3D_OUT";

#[derive(Debug, Parser)]
#[command(name = "gp3d", version, about = "Generalized geometric programming for 3D IC design")]
pub struct Cli {
    /// Directory for CSV results and the run manifest.
    #[arg(long, global = true, env = OUT_ENV, default_value = "gp3d-out")]
    pub out: PathBuf,

    /// Concurrent sweep points.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,

    /// Seed for generated instances and fitting restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub solver: SolverArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem given in the JSON interchange format.
    Solve(SolveArgs),
    /// Count (and list) the input-to-output paths of a netlist.
    Paths(PathsArgs),
    /// Gate sizing under power and volume caps.
    Size(SizeArgs),
    /// Wire sizing of an RC tree.
    Interconnect(InterconnectArgs),
    /// Temperature-aware floorplanning.
    Floorplan(FloorplanArgs),
    /// Fit a monomial or posynomial to data.
    Fit(FitArgs),
    /// Repeat a recorded run.
    Rerun(RerunArgs),
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Barrier parameter growth factor.
    #[arg(long, global = true)]
    pub barrier_mu: Option<f64>,
    /// Initial barrier parameter.
    #[arg(long, global = true)]
    pub t0: Option<f64>,
    /// Newton decrement tolerance.
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    /// Duality gap tolerance.
    #[arg(long, global = true)]
    pub gap_tol: Option<f64>,
    /// Inequality violation tolerance.
    #[arg(long, global = true)]
    pub primal_tol: Option<f64>,
    /// Equality residual tolerance.
    #[arg(long, global = true)]
    pub equality_tol: Option<f64>,
    /// Margin phase I must clear for a strict start.
    #[arg(long, global = true)]
    pub feasibility_margin: Option<f64>,
    /// Newton step limit per centering.
    #[arg(long, global = true)]
    pub max_newton: Option<usize>,
    /// Outer iteration limit.
    #[arg(long, global = true)]
    pub max_outer: Option<usize>,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            barrier_mu: self.barrier_mu.unwrap_or(d.barrier_mu),
            t0: self.t0.unwrap_or(d.t0),
            newton_tol: self.newton_tol.unwrap_or(d.newton_tol),
            duality_gap_tol: self.gap_tol.unwrap_or(d.duality_gap_tol),
            primal_tol: self.primal_tol.unwrap_or(d.primal_tol),
            equality_tol: self.equality_tol.unwrap_or(d.equality_tol),
            feasibility_margin: self.feasibility_margin.unwrap_or(d.feasibility_margin),
            max_newton: self.max_newton.unwrap_or(d.max_newton),
            max_outer: self.max_outer.unwrap_or(d.max_outer),
            ..d
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[arg(long)]
    pub bench: PathBuf,
    /// Largest path count that is still listed in `paths.csv`.
    #[arg(long, default_value_t = gp3d_core::netlist::DEFAULT_PATH_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DelayArg {
    /// One constraint per input-to-output path.
    Paths,
    /// Arrival-time variables per gate.
    Arrival,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    #[arg(long)]
    pub bench: PathBuf,
    /// Gate parameter CSV; drawn from `--seed` when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = f64::INFINITY)]
    pub pmax: f64,
    #[arg(long, default_value_t = f64::INFINITY)]
    pub volmax: f64,
    /// Upper bound for every gate scale factor.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Read `--pmax` and `--volmax` as multiples of their values with every gate at unit size.
    #[arg(long)]
    pub relative: bool,
    #[arg(long, value_enum, default_value_t = DelayArg::Paths)]
    pub delay: DelayArg,
    /// `volmax:lo:hi:steps[:log]` or `pmax:...`.
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Args)]
pub struct InterconnectArgs {
    /// Tree CSV; a five-segment tree is drawn from `--seed` when absent.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Source drive resistance.
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub volmax: f64,
    /// Read `--volmax` as a multiple of the minimum tree volume.
    #[arg(long)]
    pub relative: bool,
    /// Segment whose width bounds are swept; the first listed segment by default.
    #[arg(long)]
    pub segment: Option<String>,
    /// `w1max:...`, `w1min:...` or `volmax:...`.
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InstanceArg {
    /// Four modules, stacked, with the coplanar arrangement as baseline.
    Four,
    /// 150 modules on a lattice.
    Random,
}

#[derive(Debug, Args)]
pub struct FloorplanArgs {
    #[arg(long, requires = "arrangement", conflicts_with = "instance")]
    pub modules: Option<PathBuf>,
    #[arg(long, requires = "modules")]
    pub arrangement: Option<PathBuf>,
    /// Second arrangement solved at every point for comparison.
    #[arg(long, requires = "modules")]
    pub baseline: Option<PathBuf>,
    /// Generated instance, drawn from `--seed`.
    #[arg(long, value_enum, required_unless_present = "modules")]
    pub instance: Option<InstanceArg>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Overrides the arrangement's Z cap.
    #[arg(long)]
    pub zmax: Option<f64>,
    /// `alpha:...` or `zmax:...`.
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub terms: usize,
    /// Multi-start count for posynomial fits.
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// `terms:lo:hi:steps`.
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Flags whose values are input files, recorded with absolute paths and digests.
pub const FILE_FLAGS: &[&str] = &[
    "--problem",
    "--bench",
    "--params",
    "--tree",
    "--modules",
    "--arrangement",
    "--baseline",
    "--data",
];
