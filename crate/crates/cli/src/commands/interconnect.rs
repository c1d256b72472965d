// SPDX-License-Identifier: Apache-2.0

use gp3d_core::instances::branching_tree;
use gp3d_core::interconnect::{solve_interconnect, InterconnectSolution, RcTree, TreeError};
use gp3d_core::{SolverConfig, Status};

use crate::args::InterconnectArgs;
use crate::context::{csv_string, input_err, num, summarize, sweep_status, CliError, Ctx, PointStats};
use crate::sweep::run_points;

fn solve(t: &RcTree, vol_max: f64, cfg: &SolverConfig) -> Result<Option<InterconnectSolution>, CliError> {
    match solve_interconnect(t, vol_max, cfg) {
        Ok(s) => Ok(Some(s)),
        Err(e @ TreeError::VolumeInfeasible { .. }) => {
            log::info!("{e}");
            Ok(None)
        }
        Err(e) => Err(input_err(e)),
    }
}

fn status_of(s: &Option<InterconnectSolution>) -> Status {
    s.as_ref().map_or(Status::Infeasible, |s| s.status)
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn run(ctx: &mut Ctx, a: &InterconnectArgs) -> Result<Status, CliError> {
    let tree = match &a.tree {
        Some(p) => RcTree::from_csv(&ctx.read(p)?, a.r0).map_err(input_err)?,
        None => {
            let mut t = branching_tree(ctx.seed);
            if a.r0.is_some() {
                t.r0 = a.r0;
            }
            ctx.write("tree.csv", &t.to_csv())?;
            t
        }
    };
    if let Some(r0) = tree.r0 {
        println!("r0: {}", num(r0));
    }
    let target = match &a.segment {
        Some(id) => tree
            .index(id)
            .ok_or_else(|| CliError::Usage(format!("unknown segment `{id}`")))?,
        None => 0,
    };
    let min_volume = tree.min_volume();
    let scale = |v: f64| if a.relative { v * min_volume } else { v };
    let vol_max = scale(a.volmax);
    println!("min_volume: {}", num(min_volume));

    let Some(spec) = &a.sweep else {
        let s = solve(&tree, vol_max, &ctx.cfg)?;
        let status = status_of(&s);
        println!("status: {}", status.as_str());
        let Some(s) = s else {
            ctx.points.push(PointStats::rejected("point", status));
            return Ok(status);
        };
        ctx.points.push(PointStats::from_solution("point", &s.raw));
        if status == Status::Optimal {
            let segs: Vec<Vec<String>> = tree
                .segments()
                .iter()
                .enumerate()
                .map(|(i, g)| vec![g.id.clone(), num(s.l[i]), num(s.w[i])])
                .collect();
            ctx.write("segments.csv", &csv_string(&strings(&["id", "l", "w"]), &segs))?;
            let leaves: Vec<Vec<String>> = s.leaf_delays.iter().map(|(id, d)| vec![id.clone(), num(*d)]).collect();
            ctx.write("delays.csv", &csv_string(&strings(&["leaf", "delay"]), &leaves))?;
            let cons: Vec<Vec<String>> = s
                .constraints
                .iter()
                .map(|b| vec![b.label.clone(), num(b.slack), b.binding.to_string()])
                .collect();
            ctx.write("constraints.csv", &csv_string(&strings(&["constraint", "slack", "binding"]), &cons))?;
            println!("delay: {}", num(s.worst));
        }
        return Ok(status);
    };
    spec.expect(&["w1max", "w1min", "volmax"]).map_err(CliError::Usage)?;
    let values = spec.values();
    let cfg = ctx.cfg.clone();
    let results = run_points(&values, ctx.jobs, |v| {
        let mut t = tree.clone();
        let mut vm = vol_max;
        match spec.param.as_str() {
            "w1max" => t.segment_mut(target).wmax = v,
            "w1min" => t.segment_mut(target).wmin = v,
            _ => vm = scale(v),
        }
        solve(&t, vm, &cfg)
    });
    let header = strings(&[&spec.param, "status", "delay", "w1", "l1", "volume", "newton_steps"]);
    let mut rows = Vec::new();
    let mut statuses = Vec::new();
    for (v, r) in values.iter().zip(results) {
        let s = r?;
        let status = status_of(&s);
        statuses.push(status);
        let label = format!("{}={}", spec.param, num(*v));
        let mut row = vec![num(*v), status.as_str().to_string()];
        match &s {
            Some(s) if status == Status::Optimal => {
                let vol: f64 = s.l.iter().zip(&s.w).map(|(l, w)| l * w * w).sum();
                row.extend([
                    num(s.worst),
                    num(s.w[target]),
                    num(s.l[target]),
                    num(vol),
                    s.raw.gp.iterations.to_string(),
                ]);
            }
            _ => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        ctx.points.push(match &s {
            Some(s) => PointStats::from_solution(label, &s.raw),
            None => PointStats::rejected(label, status),
        });
        rows.push(row);
    }
    ctx.write("sweep.csv", &csv_string(&header, &rows))?;
    summarize(&statuses);
    Ok(sweep_status(&statuses))
}
