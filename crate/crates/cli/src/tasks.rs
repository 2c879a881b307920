//! Task runners: each consumes its config section, evaluates via the core
//! library, and writes CSV artifacts into the output directory. Batch
//! items are evaluated in parallel with index-derived seeds and merged in
//! index order, so outputs never depend on scheduling or worker count.

use crate::config::*;
use crate::io::{fmt_f64, read_cloud, read_grid_function, read_net, read_weighted_points, write_csv};
use crate::scene::load_scene;
use anyhow::{anyhow, bail, Context, Result};
use eps2_core::cloud::WeightedCloud;
use eps2_core::coeffs::{evaluate_record, Kernel, SearchCfg};
use eps2_core::corona::{corona, CoronaParams};
use eps2_core::fourier::GridFunction;
use eps2_core::geom::{Ball, Point};
use eps2_core::region::RegionPair;
use eps2_core::rng::{derive_seed, SplitMix64};
use rayon::prelude::*;
use std::path::Path;

pub fn load_cloud(src: &CloudSource, master_seed: u64) -> Result<WeightedCloud> {
    match src {
        CloudSource::Csv { path, dim } => Ok(read_cloud(path, *dim)?),
        CloudSource::Graph { n, r0, slope, seed } => {
            let mut rng = SplitMix64::new(seed.unwrap_or_else(|| derive_seed(master_seed, 1)));
            let pts: Vec<Point> = (0..*n)
                .map(|_| {
                    let s = r0 * (2.0 * rng.next_f64() - 1.0);
                    [s, slope * (s * 7.0 / r0).sin() * r0 / 7.0, 0.0]
                })
                .collect();
            WeightedCloud::uniform(2, pts).map_err(|e| anyhow!(e.to_string()))
        }
    }
}

pub fn load_net(src: &NetSource) -> Result<(Vec<Point>, Option<f64>)> {
    match src {
        NetSource::Csv { path, dim } => Ok((read_net(path, *dim)?, None)),
        NetSource::Ball { center, radius, dim, target } => {
            let (pts, step) = eps2_core::capacity::ball_net(*center, *radius, *dim, *target);
            Ok((pts, Some(step)))
        }
    }
}

fn scene_for(cfg: &RunConfig) -> Result<RegionPair> {
    let path = cfg
        .scene
        .as_ref()
        .ok_or_else(|| anyhow!("this task needs a `scene` entry in the config"))?;
    Ok(load_scene(path)?)
}

pub fn run_coeff(cfg: &RunConfig, task: &CoeffTask, out: &Path) -> Result<()> {
    let pair = scene_for(cfg)?;
    let mut items: Vec<(usize, Point, f64)> = Vec::new();
    for req in &task.batch {
        for r in req.radii().map_err(|e| anyhow!(e))? {
            items.push((items.len(), req.x, r));
        }
    }
    let rows: Vec<Vec<String>> = items
        .par_iter()
        .map(|&(i, x, r)| {
            let mut sc = SearchCfg::default();
            sc.seed = derive_seed(cfg.seed, i as u64);
            let rec = evaluate_record(&pair, x, r, task.nodes, task.radial_grid, &sc);
            vec![
                fmt_f64(x[0]),
                fmt_f64(x[1]),
                fmt_f64(x[2]),
                fmt_f64(r),
                fmt_f64(rec.eps),
                fmt_f64(rec.a_sym),
                fmt_f64(rec.gamma_sym),
                fmt_f64(rec.g_ball),
                fmt_f64(rec.a_psi_plus),
                fmt_f64(rec.a_psi_minus),
                fmt_f64(rec.quad_error),
            ]
        })
        .collect();
    write_csv(
        &out.join("coefficients.csv"),
        "x1,x2,x3,r,eps,a_sym,gamma_sym,g_ball,a_psi_plus,a_psi_minus,quad_error",
        &rows,
    )?;
    Ok(())
}

pub fn run_dini(cfg: &RunConfig, task: &DiniTask, out: &Path) -> Result<bool> {
    let pair = scene_for(cfg)?;
    let radii = task.r_grid.radii();
    let sc = SearchCfg::default();
    let report = eps2_core::dini::verify_chain(&pair, task.x, &radii, task.nodes, task.tol, &sc);
    let rows: Vec<Vec<String>> = report
        .per_scale
        .iter()
        .map(|&(r, lhs, rhs)| vec![fmt_f64(r), fmt_f64(lhs), fmt_f64(rhs)])
        .collect();
    write_csv(&out.join("dini_chain.csv"), "r,lhs,rhs", &rows)?;
    println!("{}", report.render());
    Ok(report.verdict == eps2_core::dini::Verdict::Pass)
}

pub fn run_beta(cfg: &RunConfig, task: &BetaTask, out: &Path) -> Result<()> {
    let mu = load_cloud(&task.cloud, cfg.seed)?;
    let rows: Vec<Vec<String>> = task
        .balls
        .par_iter()
        .map(|spec| {
            let b = Ball { center: spec.center, radius: spec.radius };
            let beta = eps2_core::flatness::beta_inf(&mu.points, &b, mu.dim)
                .map(|(v, _)| v)
                .unwrap_or(f64::NAN);
            vec![
                fmt_f64(spec.center[0]),
                fmt_f64(spec.center[1]),
                fmt_f64(spec.center[2]),
                fmt_f64(spec.radius),
                fmt_f64(beta),
            ]
        })
        .collect();
    write_csv(&out.join("beta.csv"), "c1,c2,c3,r,beta_inf", &rows)?;
    Ok(())
}

pub fn run_corona(cfg: &RunConfig, task: &CoronaTask, out: &Path) -> Result<()> {
    let mu = load_cloud(&task.cloud, cfg.seed)?;
    let mut params = CoronaParams::default();
    if let Some(t) = task.theta {
        params.theta = t;
    }
    if let Some(a) = task.alpha {
        params.alpha = a;
    }
    if let Some(e) = task.eps {
        params.eps = e;
    }
    let b0 = Ball { center: task.center, radius: task.r0 };
    let res = corona(&mu, &b0, &params).map_err(|e| anyhow!(e.to_string()))?;
    // per-point table
    let rows: Vec<Vec<String>> = res
        .e0
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let p = mu.points[i];
            vec![
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(p[2]),
                format!("{:?}", res.labels[k]),
                fmt_f64(res.h[k]),
                fmt_f64(res.d[k]),
            ]
        })
        .collect();
    write_csv(&out.join("corona_points.csv"), "x1,x2,x3,label,h,d", &rows)?;
    // graph trace
    let graph_rows: Vec<Vec<String>> = res
        .graph
        .breakpoints
        .iter()
        .map(|&(s, t)| vec![fmt_f64(s), fmt_f64(t)])
        .collect();
    write_csv(&out.join("corona_graph.csv"), "s,t", &graph_rows)?;
    // structured result (round-trips losslessly via serde)
    std::fs::write(
        out.join("corona_result.json"),
        serde_json::to_string_pretty(&res)?,
    )?;
    println!(
        "corona: mu(E0) {} | Z {} LD {} BA {} | slope {}",
        res.stats.mu_e0, res.stats.mu_z, res.stats.mu_ld, res.stats.mu_ba, res.stats.slope
    );
    Ok(())
}

pub fn run_capacity(_cfg: &RunConfig, task: &CapacityTask, out: &Path) -> Result<()> {
    let (net, step) = load_net(&task.net)?;
    let spacing = task
        .spacing
        .or(step)
        .unwrap_or_else(|| eps2_core::capacity::net_spacing(&net));
    let est = if task.s == 0.0 {
        eps2_core::capacity::capacity_log(&net, spacing)
    } else {
        eps2_core::capacity::capacity_s(&net, task.s, spacing)
            .map_err(|e| anyhow!(e.to_string()))?
    };
    let rows = vec![vec![
        fmt_f64(est.s),
        fmt_f64(est.delta),
        fmt_f64(est.value),
        fmt_f64(est.energy),
        est.iterations.to_string(),
        fmt_f64(est.residual),
        est.net_size.to_string(),
    ]];
    write_csv(
        &out.join("capacity.csv"),
        "s,delta,capacity,energy,iterations,residual,net_size",
        &rows,
    )?;
    println!("capacity: s {} value {} residual {}", est.s, est.value, est.residual);
    Ok(())
}

pub fn run_slice(_cfg: &RunConfig, task: &SliceTask, out: &Path) -> Result<()> {
    let (k, _) = load_net(&task.k)?;
    let g = read_weighted_points(&task.g)?;
    let grid = task.r_grid.radii();
    let rep = eps2_core::capacity::slicing_check(&k, &g, task.r0, task.s, &grid)
        .map_err(|e| anyhow!(e.to_string()))?;
    let rows = vec![vec![
        fmt_f64(rep.s),
        fmt_f64(rep.lhs),
        fmt_f64(rep.rhs),
        fmt_f64(rep.ratio),
        fmt_f64(rep.cap_k.value),
        fmt_f64(rep.net_spacing),
    ]];
    write_csv(&out.join("slicing.csv"), "s,lhs,rhs,ratio,cap_k,net_spacing", &rows)?;
    println!("slicing: lhs {} rhs {} ratio {}", rep.lhs, rep.rhs, rep.ratio);
    Ok(())
}

pub fn run_spectral(cfg: &RunConfig, task: &SpectralTask, out: &Path) -> Result<bool> {
    let pair = scene_for(cfg)?;
    let grid = task.r_grid.radii();
    let report = eps2_core::spectral::akn_check(&pair, task.x, &grid, task.pinned_c)
        .map_err(|e| anyhow!(e.to_string()))?;
    let rows: Vec<Vec<String>> = report
        .per_scale
        .iter()
        .map(|&(r, lhs, rhs)| vec![fmt_f64(r), fmt_f64(lhs), fmt_f64(rhs)])
        .collect();
    write_csv(&out.join("spectral_akn.csv"), "r,eps_sq,c_times_defect", &rows)?;
    println!("{}", report.render());
    Ok(report.verdict == eps2_core::dini::Verdict::Pass)
}

pub fn load_function(src: &FunctionSource, master_seed: u64) -> Result<GridFunction> {
    match src {
        FunctionSource::Bump { n, window, half_width, height } => {
            Ok(GridFunction::bump(*n, *window, *half_width, *height))
        }
        FunctionSource::Random { n, window, slope, seed } => Ok(GridFunction::random_lipschitz(
            *n,
            *window,
            *slope,
            seed.unwrap_or_else(|| derive_seed(master_seed, 2)),
        )),
        FunctionSource::Csv { path } => Ok(read_grid_function(path)?),
    }
}

pub fn run_fourier(cfg: &RunConfig, task: &FourierTask, out: &Path) -> Result<bool> {
    let f = load_function(&task.function, cfg.seed)?;
    let kernel = Kernel::Bump;
    match task.check {
        FourierCheck::Identity => {
            let rep = eps2_core::fourier::verify_fourier_identity(&f, kernel, task.tol);
            write_fourier_report(&rep, &out.join("fourier_identity.csv"))?;
            println!("{}", rep.render());
            Ok(rep.pass)
        }
        FourierCheck::SecondDiff => {
            let rep = eps2_core::fourier::verify_second_diff(&f, kernel, task.tol);
            write_fourier_report(&rep, &out.join("fourier_second_diff.csv"))?;
            println!("{}", rep.render());
            Ok(rep.pass)
        }
        FourierCheck::Lips => {
            let rep = eps2_core::fourier::lips_profile(&f, kernel, 4);
            let rows = vec![vec![
                fmt_f64(rep.slope),
                fmt_f64(rep.ratio),
                fmt_f64(rep.gap_constant),
                fmt_f64(rep.grad_sq),
                fmt_f64(rep.a_rho_sq),
                fmt_f64(rep.a_psi_sq),
                fmt_f64(rep.gap),
            ]];
            write_csv(
                &out.join("fourier_lips.csv"),
                "slope,ratio,gap_constant,grad_sq,a_rho_sq,a_psi_sq,gap",
                &rows,
            )?;
            let pass = rep.ratio > 1.0 / 8.0 && rep.ratio < 8.0;
            println!(
                "check: lips comparability | ratio {} in (1/8, 8) | {}",
                rep.ratio,
                if pass { "PASS" } else { "FAIL" }
            );
            Ok(pass)
        }
    }
}

fn write_fourier_report(rep: &eps2_core::fourier::FourierReport, path: &Path) -> Result<()> {
    let rows = vec![vec![
        fmt_f64(rep.lhs),
        fmt_f64(rep.rhs),
        fmt_f64(rep.constant),
        fmt_f64(rep.rel_error),
        fmt_f64(rep.tolerance),
        rep.pass.to_string(),
    ]];
    write_csv(path, "lhs,rhs,constant,rel_error,tolerance,pass", &rows)?;
    Ok(())
}

/// Dispatches one task by name. Returns false when the task ran but its
/// verification verdict failed.
pub fn run_named(cfg: &RunConfig, name: &str, out: &Path) -> Result<bool> {
    let missing = |n: &str| anyhow!("config has no `{n}` section");
    match name {
        "coeff" => {
            run_coeff(cfg, cfg.coeff.as_ref().ok_or_else(|| missing("coeff"))?, out)?;
            Ok(true)
        }
        "dini" => run_dini(cfg, cfg.dini.as_ref().ok_or_else(|| missing("dini"))?, out),
        "beta" => {
            run_beta(cfg, cfg.beta.as_ref().ok_or_else(|| missing("beta"))?, out)?;
            Ok(true)
        }
        "corona" => {
            run_corona(cfg, cfg.corona.as_ref().ok_or_else(|| missing("corona"))?, out)?;
            Ok(true)
        }
        "capacity" => {
            run_capacity(cfg, cfg.capacity.as_ref().ok_or_else(|| missing("capacity"))?, out)?;
            Ok(true)
        }
        "slice" => {
            run_slice(cfg, cfg.slice.as_ref().ok_or_else(|| missing("slice"))?, out)?;
            Ok(true)
        }
        "spectral" => run_spectral(cfg, cfg.spectral.as_ref().ok_or_else(|| missing("spectral"))?, out),
        "fourier" => run_fourier(cfg, cfg.fourier.as_ref().ok_or_else(|| missing("fourier"))?, out),
        other => bail!("unknown task `{other}`"),
    }
}

/// Writes the manifest echoing the fully resolved config and version.
pub fn write_manifest(cfg: &RunConfig, task: &str, out: &Path) -> Result<()> {
    let manifest = serde_json::json!({
        "tool": "eps2",
        "version": env!("CARGO_PKG_VERSION"),
        "task": task,
        "config": cfg,
    });
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}
