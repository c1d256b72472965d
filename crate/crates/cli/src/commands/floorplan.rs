// SPDX-License-Identifier: Apache-2.0

use gp3d_core::floorplan::{
    modules_to_csv, parse_modules, solve_floorplan, ArrangementSpec, FloorplanError, FloorplanSolution, ModuleSpec,
};
use gp3d_core::instances::{four_module, random_floorplan};
use gp3d_core::{SolverConfig, Status};

use crate::args::{FloorplanArgs, InstanceArg};
use crate::context::{csv_string, input_err, num, summarize, sweep_status, CliError, Ctx, PointStats};
use crate::sweep::run_points;

fn solve(mods: &[ModuleSpec], arr: &ArrangementSpec, alpha: f64, cfg: &SolverConfig) -> Result<FloorplanSolution, CliError> {
    solve_floorplan(mods, arr, alpha, cfg).map_err(|e| match e {
        FloorplanError::Alpha(_) | FloorplanError::EmptyObjective => CliError::Usage(e.to_string()),
        e => input_err(e),
    })
}

fn arrangement(ctx: &mut Ctx, path: &std::path::Path) -> Result<ArrangementSpec, CliError> {
    ArrangementSpec::from_json(&ctx.read(path)?).map_err(input_err)
}

fn max_temp(s: &FloorplanSolution) -> f64 {
    s.temperatures.iter().copied().fold(0.0, f64::max)
}

pub fn run(ctx: &mut Ctx, a: &FloorplanArgs) -> Result<Status, CliError> {
    let (mods, mut arr, mut baseline) = match (&a.modules, a.instance) {
        (Some(m), _) => {
            let mods = parse_modules(&ctx.read(m)?).map_err(input_err)?;
            let arr = arrangement(ctx, a.arrangement.as_deref().expect("clap requires it"))?;
            let base = a.baseline.as_deref().map(|p| arrangement(ctx, p)).transpose()?;
            (mods, arr, base)
        }
        (None, Some(InstanceArg::Four)) => {
            let (m, s, c) = four_module(ctx.seed);
            (m, s, Some(c))
        }
        (None, Some(InstanceArg::Random)) => {
            let (m, s) = random_floorplan(ctx.seed);
            (m, s, None)
        }
        (None, None) => return Err(CliError::Usage("give --modules/--arrangement or --instance".into())),
    };
    if let Some(z) = a.zmax {
        arr.zmax = z;
        if let Some(b) = &mut baseline {
            b.zmax = z;
        }
    }
    arr.validate(&mods).map_err(input_err)?;
    if let Some(b) = &baseline {
        b.validate(&mods).map_err(input_err)?;
    }
    if a.instance.is_some() {
        ctx.write("modules.csv", &modules_to_csv(&mods))?;
        ctx.write("arrangement.json", &arr.to_json())?;
        if let Some(b) = &baseline {
            ctx.write("baseline.json", &b.to_json())?;
        }
    }

    let Some(spec) = &a.sweep else {
        let s = solve(&mods, &arr, a.alpha, &ctx.cfg)?;
        ctx.points.push(PointStats::from_solution("arrangement", &s.raw));
        println!("status: {}", s.raw.status.as_str());
        if s.raw.status == Status::Optimal {
            let rows: Vec<Vec<String>> = mods
                .iter()
                .zip(&s.dims)
                .zip(&s.temperatures)
                .map(|((m, d), t)| vec![m.id.clone(), num(d[0]), num(d[1]), num(d[2]), num(*t)])
                .collect();
            let header: Vec<String> = ["id", "x", "y", "z", "temperature"].iter().map(|s| s.to_string()).collect();
            ctx.write("placement.csv", &csv_string(&header, &rows))?;
            println!("objective: {}", num(s.objective));
            println!("bounds: {} {} {}", num(s.bounds[0]), num(s.bounds[1]), num(s.bounds[2]));
            println!("max_temperature: {}", num(max_temp(&s)));
        }
        if let Some(b) = &baseline {
            let t = solve(&mods, b, a.alpha, &ctx.cfg)?;
            ctx.points.push(PointStats::from_solution("baseline", &t.raw));
            if t.raw.status == Status::Optimal {
                println!("baseline_objective: {}", num(t.objective));
            }
        }
        return Ok(s.raw.status);
    };
    spec.expect(&["alpha", "zmax"]).map_err(CliError::Usage)?;
    let values = spec.values();
    let cfg = ctx.cfg.clone();
    let results = run_points(&values, ctx.jobs, |v| {
        let (alpha, zmax) = match spec.param.as_str() {
            "alpha" => (v, None),
            _ => (a.alpha, Some(v)),
        };
        let with_z = |x: &ArrangementSpec| ArrangementSpec {
            zmax: zmax.unwrap_or(x.zmax),
            ..x.clone()
        };
        let s = solve(&mods, &with_z(&arr), alpha, &cfg)?;
        let b = baseline.as_ref().map(|b| solve(&mods, &with_z(b), alpha, &cfg)).transpose()?;
        Ok::<_, CliError>((s, b))
    });
    let mut header: Vec<String> = [spec.param.as_str(), "status", "objective", "X", "Y", "Z", "max_temperature", "newton_steps"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if baseline.is_some() {
        header.extend(["baseline_status".to_string(), "baseline_objective".to_string()]);
    }
    let mut rows = Vec::new();
    let mut statuses = Vec::new();
    for (v, r) in values.iter().zip(results) {
        let (s, b) = r?;
        let status = s.raw.status;
        statuses.push(status);
        let label = format!("{}={}", spec.param, num(*v));
        let mut row = vec![num(*v), status.as_str().to_string()];
        if status == Status::Optimal {
            row.extend([
                num(s.objective),
                num(s.bounds[0]),
                num(s.bounds[1]),
                num(s.bounds[2]),
                num(max_temp(&s)),
                s.raw.gp.iterations.to_string(),
            ]);
        } else {
            row.extend(std::iter::repeat_n(String::new(), 6));
        }
        ctx.points.push(PointStats::from_solution(label.clone(), &s.raw));
        if let Some(b) = b {
            row.push(b.raw.status.as_str().to_string());
            row.push(if b.raw.status == Status::Optimal { num(b.objective) } else { String::new() });
            ctx.points.push(PointStats::from_solution(format!("{label} baseline"), &b.raw));
        }
        rows.push(row);
    }
    ctx.write("sweep.csv", &csv_string(&header, &rows))?;
    summarize(&statuses);
    Ok(sweep_status(&statuses))
}
