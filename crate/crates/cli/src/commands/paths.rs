// SPDX-License-Identifier: Apache-2.0

use gp3d_core::netlist::{count_paths_dp, enumerate_paths, parse_bench};
use gp3d_core::Status;

use crate::args::PathsArgs;
use crate::context::{input_err, CliError, Ctx};

/// Prints the path count; lists the paths when there are at most `--cap`.
pub fn run(ctx: &mut Ctx, a: &PathsArgs) -> Result<Status, CliError> {
    let text = ctx.read(&a.bench)?;
    let g = parse_bench(&text).map_err(input_err)?;
    let count = count_paths_dp(&g);
    if count <= a.cap as u128 {
        let paths = enumerate_paths(&g, a.cap).map_err(input_err)?;
        ctx.write("paths.csv", &paths.to_csv(&g))?;
    } else {
        log::warn!("{count} paths exceed --cap {}; paths.csv not written", a.cap);
    }
    println!("{count}");
    Ok(Status::Optimal)
}
