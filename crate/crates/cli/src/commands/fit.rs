// SPDX-License-Identifier: Apache-2.0

use gp3d_core::fit::{fit_posynomial, Fit, FitConfig, FitDataset, FitError};
use gp3d_core::Status;

use crate::args::FitArgs;
use crate::context::{csv_string, input_err, num, CliError, Ctx, PointStats};
use crate::sweep::run_points;

fn model_csv(f: &Fit, n: usize) -> String {
    let mut header = vec!["term".to_string(), "c".to_string()];
    header.extend((1..=n).map(|j| format!("a{j}")));
    let rows: Vec<Vec<String>> = f
        .coeffs
        .iter()
        .zip(&f.exponents)
        .enumerate()
        .map(|(k, (c, a))| {
            let mut r = vec![(k + 1).to_string(), num(*c)];
            r.extend(a.iter().map(|v| num(*v)));
            r
        })
        .collect();
    csv_string(&header, &rows)
}

fn stats(label: String, f: &Fit) -> PointStats {
    PointStats {
        label,
        status: if f.converged { "converged" } else { "not_converged" }.into(),
        objective: Some(f.residual),
        newton_steps: 0,
        phase1_steps: 0,
        outer_iterations: 0,
    }
}

fn fit_err(e: FitError) -> CliError {
    match e {
        FitError::ZeroTerms => CliError::Usage(e.to_string()),
        e => input_err(e),
    }
}

pub fn run(ctx: &mut Ctx, a: &FitArgs) -> Result<Status, CliError> {
    let d = FitDataset::from_csv(&ctx.read(&a.data)?).map_err(input_err)?;
    let cfg = FitConfig {
        starts: a.starts,
        seed: ctx.seed,
        ..FitConfig::default()
    };
    let Some(spec) = &a.sweep else {
        let f = fit_posynomial(&d, a.terms, &cfg).map_err(fit_err)?;
        ctx.write("model.csv", &model_csv(&f, d.n_vars()))?;
        ctx.points.push(stats(format!("terms={}", a.terms), &f));
        println!("residual: {}", num(f.residual));
        println!("converged: {}", f.converged);
        return Ok(Status::Optimal);
    };
    spec.expect(&["terms"]).map_err(CliError::Usage)?;
    let values = spec.values();
    if values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
        return Err(CliError::Usage("term counts must be whole numbers of at least 1".into()));
    }
    let fits = run_points(&values, ctx.jobs, |v| fit_posynomial(&d, v as usize, &cfg));
    let header: Vec<String> = ["terms", "residual", "converged"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (v, f) in values.iter().zip(fits) {
        let f = f.map_err(fit_err)?;
        let k = *v as usize;
        ctx.write(&format!("model_k{k}.csv"), &model_csv(&f, d.n_vars()))?;
        rows.push(vec![k.to_string(), num(f.residual), f.converged.to_string()]);
        ctx.points.push(stats(format!("terms={k}"), &f));
    }
    ctx.write("sweep.csv", &csv_string(&header, &rows))?;
    Ok(Status::Optimal)
}
