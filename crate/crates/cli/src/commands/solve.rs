// SPDX-License-Identifier: Apache-2.0

use gp3d_core::json::parse_problem;
use gp3d_core::{solve_ggp, Status, VarId};

use crate::args::SolveArgs;
use crate::context::{csv_string, input_err, num, CliError, Ctx, PointStats};

pub fn run(ctx: &mut Ctx, a: &SolveArgs) -> Result<Status, CliError> {
    let text = ctx.read(&a.problem)?;
    let p = parse_problem(&text).map_err(input_err)?;
    let s = solve_ggp(&p, &ctx.cfg).map_err(input_err)?;
    let rows: Vec<Vec<String>> = s
        .x
        .iter()
        .enumerate()
        .map(|(i, v)| vec![p.vars.name(VarId(i)).to_string(), num(*v)])
        .collect();
    ctx.write("solution.csv", &csv_string(&["variable".into(), "value".into()], &rows))?;
    ctx.points.push(PointStats::from_solution("problem", &s));
    println!("status: {}", s.status.as_str());
    if s.status == Status::Optimal {
        println!("objective: {}", num(s.objective_value));
    }
    Ok(s.status)
}
