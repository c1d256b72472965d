// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, one PASS/FAIL line each. Runs with its own harness.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use common::rel;
use gp3d_core::fit::{fit_monomial, fit_posynomial, FitConfig, FitDataset};
use gp3d_core::floorplan::{all_min_point, objective_at};
use gp3d_core::instances::{branching_tree, random_floorplan, rc_tree, sizing_params};
use gp3d_core::interconnect::{build_rc_exprs, elmore_delay_expr, elmore_delay_numeric};
use gp3d_core::netlist::{enumerate_paths, parse_bench_with, OutputPolicy};
use gp3d_core::sizing::{build_sizing_ggp, evaluate_report, longest_path_delay, DelayMode, SizingConstraints};
use gp3d_core::solver::LseBlock;
use gp3d_core::{solve_ggp, SolverConfig, Status};
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: f64, what: &str) -> Result<(), String> {
    let s = t.elapsed().as_secs_f64();
    ensure(s < limit, || format!("{what} took {s:.2} s, limit {limit} s"))
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn gp3d(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gp3d"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("GP3D_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(o: &Output, key: &str) -> Result<f64, String> {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("no `{key}` in output: {}", stdout(o)))
}

/// Sweep CSV as header plus rows.
fn read_sweep(dir: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), String> {
    let text = fs::read_to_string(dir.join("sweep.csv")).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty sweep.csv")?.split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    Ok((header, rows))
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Result<Vec<f64>, String> {
    let j = header.iter().position(|h| h == name).ok_or(format!("no column `{name}`"))?;
    rows.iter()
        .map(|r| r[j].parse::<f64>().map_err(|_| format!("`{name}` cell `{}` is not a number", r[j])))
        .collect()
}

fn all_optimal(header: &[String], rows: &[Vec<String>], name: &str) -> Result<(), String> {
    let j = header.iter().position(|h| h == name).ok_or(format!("no column `{name}`"))?;
    for r in rows {
        ensure(r[j] == "optimal", || format!("point {} has {name} = {}", r[0], r[j]))?;
    }
    Ok(())
}

fn c1_path_counts() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    for (bench, want) in [("c17.bench", "11"), ("c499.bench", "9440")] {
        let t = Instant::now();
        let o = gp3d(dir.path(), &["paths", "--bench", core_fixture(bench).to_str().unwrap()]);
        within(t, 5.0, bench)?;
        let s = stdout(&o);
        ensure(o.status.success() && s.trim() == want, || format!("{bench}: printed `{}`, want {want}", s.trim()))?;
        got.push(format!("{bench} = {}", s.trim()));
    }
    Ok(got.join(", "))
}

fn c2_analytic_suite() -> Check {
    let cfg = SolverConfig::default();
    let suite = common::analytic_suite();
    ensure(suite.len() == 10, || format!("suite has {} problems", suite.len()))?;
    let mut worst: f64 = 0.0;
    for (name, p, want) in suite {
        let t = Instant::now();
        let s = solve_ggp(&p, &cfg).map_err(|e| format!("{name}: {e}"))?;
        within(t, 1.0, name)?;
        ensure(s.status == Status::Optimal, || format!("{name}: {:?}", s.status))?;
        let e = rel(s.objective_value, want);
        ensure(e <= 1e-6, || format!("{name}: {} vs {want}", s.objective_value))?;
        worst = worst.max(e);
    }
    Ok(format!("10 problems, worst relative error {worst:.1e}"))
}

fn c3_grid_oracle() -> Check {
    let cfg = SolverConfig::default();
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let p = common::random_small_ggp(seed);
        let s = solve_ggp(&p, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(s.status == Status::Optimal, || format!("seed {seed}: {:?}", s.status))?;
        let (oracle, _) = common::grid_oracle(&p).ok_or(format!("seed {seed}: oracle found no feasible point"))?;
        let e = rel(s.objective_value, oracle);
        ensure(e <= 1e-3, || format!("seed {seed}: solver {} vs grid {oracle}", s.objective_value))?;
        worst = worst.max(e);
    }
    within(t, 60.0, "50 solves with oracles")?;
    Ok(format!("50 GGPs, worst relative gap {worst:.1e}"))
}

fn c4_numerical_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_grad: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=6);
        let rows: Vec<(Vec<f64>, f64)> = (0..k)
            .map(|_| ((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(), rng.gen_range(-3.0..3.0)))
            .collect();
        let b = LseBlock::from_dense_rows(&rows);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let e = b.eval(&y);
        let g = b.dense_grad(n, &e);
        let h = b.dense_hess(n, &e);
        let step = 1e-6;
        for j in 0..n {
            let mut up = y.clone();
            let mut dn = y.clone();
            up[j] += step;
            dn[j] -= step;
            let fd = (b.value(&up) - b.value(&dn)) / (2.0 * step);
            let err = (fd - g[j]).abs() / g[j].abs().max(1.0);
            worst_grad = worst_grad.max(err);
        }
        ensure((&h - h.transpose()).amax() <= 1e-12, || "Hessian is not symmetric".into())?;
        min_eig = min_eig.min(SymmetricEigen::new(h).eigenvalues.min());
    }
    ensure(worst_grad <= 1e-5, || format!("gradient error {worst_grad:.2e}"))?;
    ensure(min_eig >= -1e-8, || format!("Hessian eigenvalue {min_eig:.2e}"))?;

    let cfg = SolverConfig::default();
    let mut certified = 0;
    let problems = common::analytic_suite()
        .into_iter()
        .map(|(_, p, _)| p)
        .chain((0..50).map(common::random_small_ggp));
    for p in problems {
        let s = solve_ggp(&p, &cfg).map_err(|e| e.to_string())?;
        if s.status == Status::Optimal {
            ensure(s.gp.kkt.within(&cfg), || format!("KKT residuals {:?} exceed tolerances", s.gp.kkt))?;
            certified += 1;
        }
    }
    Ok(format!(
        "gradient error {worst_grad:.1e}, min eigenvalue {min_eig:.1e}, {certified} Optimal exits certified"
    ))
}

fn c5_oracle_agreement() -> Check {
    let text = fs::read_to_string(core_fixture("c17.bench")).map_err(|e| e.to_string())?;
    let g = parse_bench_with(&text, OutputPolicy::DedicatedSink).map_err(|e| e.to_string())?;
    let paths = enumerate_paths(&g, 100).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_d: f64 = 0.0;
    for i in 0..100 {
        let p = sizing_params(&g, i);
        let sp = build_sizing_ggp(&g, &p, &SizingConstraints::default(), DelayMode::PathEnumeration, None, 100)
            .map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..sp.gates.len()).map(|_| rng.gen_range(-2.0f64..3.0).exp()).collect();
        let expr = sp.ggp.objective.eval(&x).map_err(|e| e.to_string())?;
        let traversal = evaluate_report(&g, &p, &paths, &x).worst_after;
        let dp = longest_path_delay(&g, &p, &x);
        worst_d = worst_d.max(rel(expr, traversal)).max(rel(traversal, dp));
    }
    ensure(worst_d <= 1e-10, || format!("sizing delay disagreement {worst_d:.2e}"))?;

    let mut worst_e: f64 = 0.0;
    for i in 0..100u64 {
        let n = rng.gen_range(1..=9);
        let ids: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
        let parents: Vec<Option<String>> = (0..n)
            .map(|k| (k > 0).then(|| ids[rng.gen_range(0..k)].clone()))
            .collect();
        let spec: Vec<(&str, Option<&str>)> = ids.iter().zip(&parents).map(|(id, p)| (id.as_str(), p.as_deref())).collect();
        let t = if n == 5 { branching_tree(i) } else { rc_tree(&spec, i) };
        let ex = build_rc_exprs(&t).map_err(|e| e.to_string())?;
        let l: Vec<f64> = (0..t.len()).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
        let w: Vec<f64> = (0..t.len()).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
        let x: Vec<f64> = l.iter().zip(&w).flat_map(|(a, b)| [*a, *b]).collect();
        for leaf in t.leaves() {
            let a = elmore_delay_expr(&t, &ex, leaf).and_then(|p| Ok(p.eval(&x)?)).map_err(|e| e.to_string())?;
            let b = elmore_delay_numeric(&t, &l, &w, leaf).map_err(|e| e.to_string())?;
            worst_e = worst_e.max(rel(a, b));
        }
    }
    ensure(worst_e <= 1e-10, || format!("Elmore disagreement {worst_e:.2e}"))?;
    Ok(format!("sizing {worst_d:.1e}, Elmore {worst_e:.1e} over 100 points each"))
}

fn c6_volume_tradeoff() -> Check {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let c17 = core_fixture("c17.bench");
    let c17 = c17.to_str().unwrap();
    let o = gp3d(dir.path(), &["size", "--bench", c17, "--seed", "11", "--relative", "--sweep", "volmax:1:10:10"]);
    ensure(o.status.success(), || format!("sweep exited {:?}", o.status.code()))?;
    let (h, rows) = read_sweep(dir.path())?;
    ensure(rows.len() == 10, || format!("{} sweep rows", rows.len()))?;
    all_optimal(&h, &rows, "status")?;
    let d = column(&h, &rows, "delay")?;
    // Solver accuracy bounds how far a larger cap may appear to lose.
    let tol = 1e-7;
    let mut saturated = None;
    for i in 0..d.len() - 1 {
        ensure(d[i + 1] <= d[i] * (1.0 + tol), || format!("delay rises from {} to {} at point {}", d[i], d[i + 1], i + 1))?;
        if saturated.is_none() && d[i] - d[i + 1] <= tol * d[i] {
            saturated = Some(i);
        }
    }
    if let Some(s) = saturated {
        for v in &d[s..] {
            ensure(rel(*v, d[s]) <= 1e-6, || format!("delay changes after saturation at point {s}"))?;
        }
    }
    let dir2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o = gp3d(dir2.path(), &["size", "--bench", c17, "--seed", "11", "--relative", "--volmax", "10"]);
    ensure(o.status.success(), || format!("10x volume run exited {:?}", o.status.code()))?;
    let (unit, opt) = (field(&o, "unit_delay")?, field(&o, "delay")?);
    ensure(opt < unit, || format!("optimized delay {opt} is not below unit delay {unit}"))?;
    within(t, 30.0, "sweep")?;
    let sat = saturated.map_or("none".to_string(), |s| format!("point {}", s + 1));
    Ok(format!(
        "delay {:.4} -> {:.4}, saturation {sat}; 10x volume improves {:.2}%",
        d[0],
        d[9],
        (unit - opt) / unit * 100.0
    ))
}

fn c7_interconnect_saturation() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o = gp3d(dir.path(), &["interconnect", "--seed", "7", "--volmax", "1e9", "--sweep", "w1max:0.1:100:16:log"]);
    ensure(o.status.success(), || format!("w1max sweep exited {:?}", o.status.code()))?;
    let (h, rows) = read_sweep(dir.path())?;
    all_optimal(&h, &rows, "status")?;
    let v = column(&h, &rows, "w1max")?;
    let d = column(&h, &rows, "delay")?;
    let w = column(&h, &rows, "w1")?;
    let w_sat = *w.last().unwrap();
    let below = v.iter().filter(|x| **x < w_sat).count();
    ensure(below >= 2 && v.len() - below >= 2, || format!("saturation width {w_sat} not inside the sweep"))?;
    for i in 0..d.len() - 1 {
        ensure(d[i + 1] <= d[i] * (1.0 + 1e-9), || format!("delay rises at w1max = {}", v[i + 1]))?;
    }
    let d_sat = *d.last().unwrap();
    for i in 0..v.len() {
        if v[i] >= w_sat {
            ensure(rel(d[i], d_sat) <= 1e-6, || format!("delay not constant at w1max = {}", v[i]))?;
        }
        let want = v[i].min(w_sat);
        ensure((w[i] - want).abs() <= 1e-4, || format!("w1* = {} at w1max = {}, want {want}", w[i], v[i]))?;
    }
    let dir2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o = gp3d(dir2.path(), &["interconnect", "--seed", "7", "--volmax", "1e9", "--sweep", "w1min:0.1:50:12:log"]);
    ensure(o.status.success(), || format!("w1min sweep exited {:?}", o.status.code()))?;
    let (h, rows) = read_sweep(dir2.path())?;
    all_optimal(&h, &rows, "status")?;
    let dm = column(&h, &rows, "delay")?;
    for i in 0..dm.len() - 1 {
        ensure(dm[i + 1] >= dm[i] * (1.0 - 1e-9), || format!("delay falls at w1min point {}", i + 1))?;
    }
    Ok(format!(
        "saturation width {w_sat:.6}, saturated delay {d_sat:.6}; w1min sweep {:.4} -> {:.4}",
        dm[0],
        dm[dm.len() - 1]
    ))
}

fn c8_floorplan_dominance() -> Check {
    let t = Instant::now();
    let mut margin = f64::INFINITY;
    for seed in 0..5 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let s = seed.to_string();
        let o = gp3d(dir.path(), &["floorplan", "--instance", "four", "--seed", &s, "--sweep", "alpha:0.1:0.9:9", "--jobs", "4"]);
        ensure(o.status.success(), || format!("seed {seed} exited {:?}", o.status.code()))?;
        let (h, rows) = read_sweep(dir.path())?;
        ensure(rows.len() == 9, || format!("{} sweep rows", rows.len()))?;
        all_optimal(&h, &rows, "status")?;
        all_optimal(&h, &rows, "baseline_status")?;
        let a = column(&h, &rows, "alpha")?;
        let s3 = column(&h, &rows, "objective")?;
        let s2 = column(&h, &rows, "baseline_objective")?;
        for i in 0..9 {
            ensure(s3[i] <= s2[i], || format!("seed {seed}, alpha {}: 3D {} > 2D {}", a[i], s3[i], s2[i]))?;
            margin = margin.min((s2[i] - s3[i]) / s2[i]);
        }
    }
    within(t, 20.0, "five 9-point sweeps")?;
    Ok(format!("5 seeds x 9 alphas, smallest relative advantage {:.2}%", margin * 100.0))
}

fn c9_large_floorplan() -> Check {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o = gp3d(dir.path(), &["floorplan", "--instance", "random", "--seed", "2024", "--alpha", "0.6"]);
    let elapsed = t.elapsed();
    ensure(o.status.code() == Some(0), || format!("exited {:?}: {}", o.status.code(), stdout(&o)))?;
    let obj = field(&o, "objective")?;
    let (mods, arr) = random_floorplan(2024);
    ensure(mods.len() == 150, || format!("{} modules", mods.len()))?;
    let base = objective_at(&mods, 0.6, &all_min_point(&mods, &arr));
    ensure(obj <= base, || format!("optimized {obj} above all-minimum {base}"))?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!("objective {obj:.4} vs all-minimum {base:.4}, {:.1} s", elapsed.as_secs_f64()))
}

fn c10_fitting() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_mono: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let c = rng.gen_range(-3.0f64..3.0).exp();
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let x: Vec<Vec<f64>> = (0..30).map(|_| (0..n).map(|_| rng.gen_range(-1.5f64..1.5).exp()).collect()).collect();
        let f = x.iter().map(|p| c * p.iter().zip(&a).map(|(v, e)| v.powf(*e)).product::<f64>()).collect();
        let fit = fit_monomial(&FitDataset::new(x, f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        worst_mono = worst_mono.max(fit.residual);
    }
    ensure(worst_mono <= 1e-10, || format!("monomial residual {worst_mono:.2e}"))?;
    let cfg = FitConfig::default();
    let mut seq = Vec::new();
    for seed in 0..3u64 {
        let mut r = ChaCha8Rng::seed_from_u64(100 + seed);
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..2).map(|_| r.gen_range(-1.0f64..1.0).exp()).collect()).collect();
        let f: Vec<f64> = x.iter().map(|p| (p[0] + p[1]).sqrt() + 0.5 / (p[0] * p[1]) + r.gen_range(0.0..0.05)).collect();
        let allowance = 64.0 * f64::EPSILON * f.iter().map(|v| v.ln().abs()).fold(1.0, f64::max);
        let d = FitDataset::new(x, f).map_err(|e| e.to_string())?;
        let mut prev = f64::INFINITY;
        let mut res = Vec::new();
        for k in 1..=4 {
            let fit = fit_posynomial(&d, k, &cfg).map_err(|e| e.to_string())?;
            ensure(fit.residual <= prev + allowance, || format!("dataset {seed}: K = {k} residual {} after {prev}", fit.residual))?;
            prev = fit.residual;
            res.push(format!("{:.2e}", fit.residual));
        }
        seq.push(res.join(" >= "));
    }
    Ok(format!("monomial residual {worst_mono:.1e}; posynomial K = 1..4: {}", seq.join("; ")))
}

fn c11_determinism() -> Check {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = root.path().join("fit.csv");
    let mut text = String::from("x1,x2,f\n");
    for i in 1..=6 {
        for j in 1..=5 {
            let (a, b) = (0.4 * i as f64, 0.5 * j as f64);
            text.push_str(&format!("{a},{b},{}\n", a * a + 1.0 / b + 0.3 * a.sqrt()));
        }
    }
    fs::write(&data, text).map_err(|e| e.to_string())?;
    let amgm = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/amgm.json");
    let c17 = core_fixture("c17.bench");
    let c499 = core_fixture("c499.bench");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("solve", vec!["solve", "--problem", amgm.to_str().unwrap()]),
        ("paths", vec!["paths", "--bench", c499.to_str().unwrap()]),
        ("size", vec!["size", "--bench", c17.to_str().unwrap(), "--seed", "3", "--relative", "--sweep", "volmax:1:5:5", "--jobs", "4"]),
        ("interconnect", vec!["interconnect", "--seed", "2", "--volmax", "3", "--relative", "--sweep", "w1max:0.1:10:6:log"]),
        ("floorplan", vec!["floorplan", "--instance", "four", "--seed", "1", "--sweep", "alpha:0.1:0.9:9", "--jobs", "3"]),
        ("fit", vec!["fit", "--data", data.to_str().unwrap(), "--sweep", "terms:1:3:3", "--seed", "5"]),
    ];
    let mut files = 0;
    for (name, args) in runs {
        let first = root.path().join(format!("{name}-a"));
        let second = root.path().join(format!("{name}-b"));
        let o = gp3d(&first, &args);
        ensure(o.status.success(), || format!("{name} exited {:?}", o.status.code()))?;
        let m = first.join("manifest.json");
        let o = gp3d(&second, &["rerun", "--manifest", m.to_str().unwrap()]);
        ensure(o.status.success(), || format!("{name} rerun exited {:?}", o.status.code()))?;
        let mut names: Vec<String> = fs::read_dir(&first)
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect();
        names.sort();
        ensure(names.iter().any(|n| n.ends_with(".csv")), || format!("{name} wrote no CSV"))?;
        for f in &names {
            let a = fs::read(first.join(f)).map_err(|e| e.to_string())?;
            let b = fs::read(second.join(f)).map_err(|e| format!("{name} rerun lacks {f}: {e}"))?;
            ensure(a == b, || format!("{name}: {f} differs on rerun"))?;
            files += 1;
        }
    }
    Ok(format!("6 pipelines, {files} files byte-identical on rerun"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("path counts", c1_path_counts),
        ("analytic suite", c2_analytic_suite),
        ("grid-oracle equivalence", c3_grid_oracle),
        ("numerical soundness", c4_numerical_soundness),
        ("expression/oracle agreement", c5_oracle_agreement),
        ("volume trade-off", c6_volume_tradeoff),
        ("interconnect saturation", c7_interconnect_saturation),
        ("floorplan dominance", c8_floorplan_dominance),
        ("150-module floorplan", c9_large_floorplan),
        ("fitting", c10_fitting),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
