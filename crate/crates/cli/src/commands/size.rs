// SPDX-License-Identifier: Apache-2.0

use gp3d_core::instances::sizing_params;
use gp3d_core::netlist::{enumerate_paths, parse_bench_with, CircuitGraph, OutputPolicy, PathList, DEFAULT_PATH_CAP};
use gp3d_core::sizing::{
    build_sizing_ggp, evaluate_report, longest_path_delay, numeric_power, solve_sizing, DelayMode,
    SizingConstraints, SizingError, SizingOutcome, SizingParams,
};
use gp3d_core::Status;

use crate::args::{DelayArg, SizeArgs};
use crate::context::{csv_string, input_err, num, opt, summarize, sweep_status, CliError, Ctx, PointStats};
use crate::sweep::run_points;

struct Setup {
    g: CircuitGraph,
    params: SizingParams,
    mode: DelayMode,
    paths: Option<PathList>,
    unit_power: f64,
    unit_volume: f64,
    unit_delay: f64,
}

impl Setup {
    fn solve(&self, cons: &SizingConstraints, cfg: &gp3d_core::SolverConfig) -> Result<Option<SizingOutcome>, CliError> {
        match solve_sizing(&self.g, &self.params, cons, self.mode, self.paths.as_ref(), cfg) {
            Ok(o) => Ok(Some(o)),
            Err(SizingError::Bounds(msg)) => {
                log::info!("infeasible before solving: {msg}");
                Ok(None)
            }
            Err(e) => Err(input_err(e)),
        }
    }
}

fn status_of(o: &Option<SizingOutcome>) -> Status {
    o.as_ref().map_or(Status::Infeasible, |o| o.solution.status)
}

pub fn run(ctx: &mut Ctx, a: &SizeArgs) -> Result<Status, CliError> {
    let text = ctx.read(&a.bench)?;
    let g = parse_bench_with(&text, OutputPolicy::DedicatedSink).map_err(input_err)?;
    let params = match &a.params {
        Some(p) => SizingParams::from_csv(&ctx.read(p)?).map_err(input_err)?,
        None => {
            let p = sizing_params(&g, ctx.seed);
            ctx.write("params.csv", &p.to_csv())?;
            p
        }
    };
    params.validate(&g).map_err(input_err)?;
    let mode = match a.delay {
        DelayArg::Paths => DelayMode::PathEnumeration,
        DelayArg::Arrival => DelayMode::ArrivalTime,
    };
    let paths = match mode {
        DelayMode::PathEnumeration => Some(enumerate_paths(&g, DEFAULT_PATH_CAP).map_err(input_err)?),
        DelayMode::ArrivalTime => enumerate_paths(&g, DEFAULT_PATH_CAP).ok(),
    };
    let base = build_sizing_ggp(&g, &params, &SizingConstraints::default(), mode, paths.as_ref(), DEFAULT_PATH_CAP)
        .map_err(input_err)?;
    let ones = vec![1.0; base.gates.len()];
    let setup = Setup {
        unit_power: numeric_power(&g, &params, &ones),
        unit_volume: base.volume.eval(&ones).map_err(input_err)?,
        unit_delay: longest_path_delay(&g, &params, &ones),
        g,
        params,
        mode,
        paths,
    };
    let scale = |v: f64, unit: f64| if a.relative { v * unit } else { v };
    let cons = SizingConstraints {
        p_max: scale(a.pmax, setup.unit_power),
        vol_max: scale(a.volmax, setup.unit_volume),
        x_max: a.xmax,
    };
    println!("unit_delay: {}", num(setup.unit_delay));
    println!("unit_power: {}", num(setup.unit_power));
    println!("unit_volume: {}", num(setup.unit_volume));

    let Some(spec) = &a.sweep else {
        let o = setup.solve(&cons, &ctx.cfg)?;
        let status = status_of(&o);
        println!("status: {}", status.as_str());
        match &o {
            Some(o) => ctx.points.push(PointStats::from_solution("point", &o.solution)),
            None => ctx.points.push(PointStats::rejected("point", status)),
        }
        if let Some(o) = o.filter(|o| o.solution.status == Status::Optimal) {
            let delay = longest_path_delay(&setup.g, &setup.params, &o.x);
            if let Some(p) = &setup.paths {
                let r = evaluate_report(&setup.g, &setup.params, p, &o.x);
                ctx.write("report.csv", &r.report_csv())?;
                ctx.write("sizes.csv", &r.sizes_csv())?;
            } else {
                let rows: Vec<Vec<String>> = o
                    .problem
                    .gates
                    .iter()
                    .zip(&o.x)
                    .map(|(&i, x)| vec![setup.g.name(i).to_string(), num(*x)])
                    .collect();
                ctx.write("sizes.csv", &csv_string(&["gate".into(), "x_star".into()], &rows))?;
            }
            println!("delay: {}", num(delay));
            println!("improvement_pct: {}", num((setup.unit_delay - delay) / setup.unit_delay * 100.0));
        }
        return Ok(status);
    };
    spec.expect(&["volmax", "pmax"]).map_err(CliError::Usage)?;
    let values = spec.values();
    let cfg = ctx.cfg.clone();
    let results = run_points(&values, ctx.jobs, |v| {
        let mut c = cons;
        match spec.param.as_str() {
            "volmax" => c.vol_max = scale(v, setup.unit_volume),
            _ => c.p_max = scale(v, setup.unit_power),
        }
        setup.solve(&c, &cfg)
    });
    let header: Vec<String> = [spec.param.as_str(), "status", "delay", "improvement_pct", "power", "volume", "newton_steps"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    let mut statuses = Vec::new();
    for (v, r) in values.iter().zip(results) {
        let o = r?;
        let status = status_of(&o);
        statuses.push(status);
        let label = format!("{}={}", spec.param, num(*v));
        let mut row = vec![num(*v), status.as_str().to_string()];
        match &o {
            Some(o) if status == Status::Optimal => {
                let d = longest_path_delay(&setup.g, &setup.params, &o.x);
                row.push(num(d));
                row.push(num((setup.unit_delay - d) / setup.unit_delay * 100.0));
                row.push(num(numeric_power(&setup.g, &setup.params, &o.x)));
                row.push(opt(o.problem.volume.eval(&o.x).ok()));
                row.push(o.solution.gp.iterations.to_string());
            }
            _ => row.extend([String::new(), String::new(), String::new(), String::new(), String::new()]),
        }
        ctx.points.push(match &o {
            Some(o) => PointStats::from_solution(label, &o.solution),
            None => PointStats::rejected(label, status),
        });
        rows.push(row);
    }
    ctx.write("sweep.csv", &csv_string(&header, &rows))?;
    summarize(&statuses);
    Ok(sweep_status(&statuses))
}
