//! One function per subcommand. Each writes its tables into a run directory
//! and finishes with a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gasket_hydro::calculus::{effective_resistance, energy_scale, fitted_cell_constant, ResistanceMetric};
use gasket_hydro::fluct::{
    chi, fit_decay_rate, fluctuation_drift, fluctuation_functional, martingale_qv_diagnostic, ou_covariance_empirical,
    ou_covariance_theory, covariance_csv, CovarianceRow,
};
use gasket_hydro::gasket::{edge_count, vertex_count, MAX_LEVEL};
use gasket_hydro::linalg::DENSE_CAP;
use gasket_hydro::pde::{self, HeatProblem, TestFunction, TimeProfile};
use gasket_hydro::sim::config::{from_mask, to_mask};
use gasket_hydro::sim::oracle::{detailed_balance_check, product_bernoulli, total_variation, MAX_ORACLE_SITES};
use gasket_hydro::sim::{
    density_functional, BoundarySpec, Configuration, Engine, Generator, InitialCondition, MeasurementSeries,
    Observable, RngStream,
};
use gasket_hydro::spectral::{weyl_exponent, BoundaryCondition, CornerCondition, Spectrum};
use gasket_hydro::stats::{ls_slope, mean_estimate, Estimate};
use gasket_hydro::{Corner, Field, GasketGraph};
use rayon::prelude::*;
use serde_json::json;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::RunDir;

fn spectrum(g: &GasketGraph, bc: &BoundaryCondition<f64>) -> CliResult<Spectrum<f64>> {
    Ok(Spectrum::compute(g, bc)?)
}

pub fn graph(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let mut run = RunDir::create("graph", cfg, root)?;
    run.write("graph.json", &(g.to_json()? + "\n"))?;
    println!("level {}: {} vertices, {} edges", g.level(), g.num_vertices(), g.num_edges());
    run.finish(cfg)
}

pub fn resistance(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let mut corners = String::from("level,r_a0_a1,r_a0_a2,r_a1_a2,two_thirds_scale\n");
    for n in 0..=cfg.level {
        let h = GasketGraph::build(n)?;
        let r = |x, y| effective_resistance::<f64>(&h, x, y);
        let formula = 2.0 / 3.0 * energy_scale::<f64>(n);
        writeln!(corners, "{n},{},{},{},{formula}", r(0, 1)?, r(0, 2)?, r(1, 2)?).expect("string write");
    }
    let metric = ResistanceMetric::<f64>::new(&g)?;
    let mut cells = String::from("corner,depth,diameter,scale,ratio\n");
    for c in Corner::ALL {
        for j in 0..=cfg.level {
            let d = metric.corner_cell_diameter(&g, c, j)?;
            let scale = energy_scale::<f64>(cfg.level - j);
            writeln!(cells, "{},{j},{d},{scale},{}", c.index(), d / scale).expect("string write");
        }
    }
    let c = fitted_cell_constant::<f64>(&g)?;
    let mut run = RunDir::create("resistance", cfg, root)?;
    run.write("corner_resistance.csv", &corners)?;
    run.write("cell_diameters.csv", &cells)?;
    run.write_json("summary.json", &json!({ "level": cfg.level, "fitted_cell_constant": c }))?;
    println!("level {}: fitted cell constant C = {c}", cfg.level);
    run.finish(cfg)
}

pub fn spectrum_cmd(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let bc = cfg.boundary_condition()?;
    let s = spectrum(&g, &bc)?;
    let slope = s.weyl_slope().ok();
    let mut run = RunDir::create("spectrum", cfg, root)?;
    run.write("eigenvalues.csv", &s.to_csv())?;
    run.write("counting.csv", &s.counting_csv())?;
    run.write("spectrum.json", &(s.to_json(cfg.export_vectors)? + "\n"))?;
    run.write_json(
        "summary.json",
        &json!({
            "level": cfg.level,
            "bc": bc.label(),
            "count": s.len(),
            "lowest": s.eigenvalues().iter().take(5).collect::<Vec<_>>(),
            "weyl_slope": slope,
            "weyl_target": weyl_exponent(),
        }),
    )?;
    let low: Vec<String> = s.eigenvalues().iter().take(6).map(|l| format!("{l:.6}")).collect();
    println!("{} eigenvalues ({}); lowest: {}", s.len(), bc.label(), low.join(", "));
    if let Some(w) = slope {
        println!("Weyl slope {w:.4} (target {:.4})", weyl_exponent());
    }
    run.finish(cfg)
}

fn heat_problem(cfg: &ExperimentConfig, g: &GasketGraph, bc: BoundaryCondition<f64>) -> CliResult<HeatProblem<f64>> {
    let bs = cfg.boundary_spec()?;
    HeatProblem::new(bc, bs.rho_bars(), cfg.initial_profile(g)?, cfg.horizon).map_err(CliError::config)
}

fn vanishes_at_dirichlet(phi: &Field<f64>, bc: &BoundaryCondition<f64>) -> bool {
    (0..3).all(|k| !bc.is_dirichlet_at(k) || phi[k].abs() <= 1e-12)
}

pub fn pde_cmd(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let bc = cfg.boundary_condition()?;
    let s = spectrum(&g, &bc)?;
    let p = heat_problem(cfg, &g, bc.clone())?;
    let times = pde::uniform_grid(cfg.horizon, cfg.steps);
    let traj = pde::trajectory(&g, &p, &s, &times)?;
    let ss = pde::steady_state(&g, &p)?;
    let energies = pde::energy_along(&g, &traj)?;
    let mut energy = String::from("t,energy,min,max\n");
    for ((t, e), f) in times.iter().zip(&energies).zip(&traj) {
        let (lo, hi) = pde::range_along(std::slice::from_ref(f));
        writeln!(energy, "{t},{e},{lo},{hi}").expect("string write");
    }

    let mut residuals = String::from("test_function,steps,dt,theta\n");
    let mut slopes = serde_json::Map::new();
    for (name, phi) in cfg.test_functions(&g, Some(&s))? {
        if !vanishes_at_dirichlet(&phi, &bc) {
            slopes.insert(name, json!("skipped: nonzero at a Dirichlet corner"));
            continue;
        }
        let test = TestFunction { profile: TimeProfile::Cosine { omega: 2.0 * std::f64::consts::PI / cfg.horizon }, phi };
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for steps in [cfg.pde_steps, 2 * cfg.pde_steps, 4 * cfg.pde_steps] {
            let grid = pde::uniform_grid(cfg.horizon, steps);
            let path = pde::trajectory(&g, &p, &s, &grid)?;
            let theta = pde::weak_residual(&g, &p, &grid, &path, &test)?;
            let dt = cfg.horizon / steps as f64;
            writeln!(residuals, "{name},{steps},{dt},{theta}").expect("string write");
            xs.push(dt.ln());
            ys.push(theta.abs().max(f64::MIN_POSITIVE).ln());
        }
        slopes.insert(name, json!(ls_slope(&xs, &ys)));
    }

    let mut run = RunDir::create("pde", cfg, root)?;
    run.write("trajectory.csv", &pde::trajectory_csv(&times, &traj))?;
    run.write("steady_state.csv", &ss.to_csv())?;
    run.write("energy.csv", &energy)?;
    run.write("weak_residual.csv", &residuals)?;
    let final_gap = traj.last().expect("nonempty grid").max_abs_diff(&ss)?;
    run.write_json(
        "summary.json",
        &json!({
            "bc": bc.label(),
            "steady_corner_values": pde::steady_corner_values(&p)?,
            "final_distance_to_steady_state": final_gap,
            "weak_residual_slopes": slopes,
        }),
    )?;
    println!("pde ({}) solved to t = {}; distance to steady state {final_gap:.3e}", bc.label(), cfg.horizon);
    run.finish(cfg)
}

/// Test functions for simulations: eigenfunctions come from the limiting condition
/// (or `bc`), and need the dense spectrum only when requested.
fn sim_test_functions(cfg: &ExperimentConfig, g: &GasketGraph) -> CliResult<(Vec<(String, Field<f64>)>, Option<Spectrum<f64>>)> {
    let needs_spectrum = cfg.observables.iter().any(|o| matches!(o, crate::config::ObservableConfig::Eigen { .. }));
    let s = if needs_spectrum { Some(spectrum(g, &cfg.boundary_condition()?)?) } else { None };
    Ok((cfg.test_functions(g, s.as_ref())?, s))
}

fn run_replicas(
    g: &GasketGraph,
    bs: &BoundarySpec<f64>,
    init: &InitialCondition<f64>,
    grid: &[f64],
    obs: &[Observable<f64>],
    replicas: u64,
    seed: u64,
) -> CliResult<Vec<(MeasurementSeries<f64>, Configuration<f64>)>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut e = Engine::start(g, bs, init, RngStream::new(seed, r))?;
            let series = e.sample_path(grid, obs)?;
            Ok((series, e.configuration()))
        })
        .collect::<gasket_hydro::Result<Vec<_>>>()
        .map_err(CliError::from)
}

pub fn simulate(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let bs = cfg.boundary_spec()?;
    let init = cfg.initial_condition(&g)?;
    let (tests, _) = sim_test_functions(cfg, &g)?;
    let mut obs = vec![Observable::new("mass", density_functional(&Field::constant(&g, 1.0)))];
    obs.extend(tests.iter().map(|(n, f)| Observable::new(n.clone(), density_functional(f))));
    let grid = pde::uniform_grid(cfg.horizon, cfg.steps);
    let runs = run_replicas(&g, &bs, &init, &grid, &obs, cfg.replicas, cfg.seed)?;

    let mut csv = String::from(MeasurementSeries::<f64>::csv_header());
    let mut snapshots = format!("# final configurations at t = {}, one line per replica\n", cfg.horizon);
    for (r, (series, conf)) in runs.iter().enumerate() {
        series.to_csv_rows(r as u64, &mut csv);
        snapshots.push_str(&conf.to_bits());
        snapshots.push('\n');
    }
    let finals: Vec<serde_json::Value> = obs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let xs: Vec<f64> = runs.iter().map(|(s, _)| *s.values[i].last().expect("nonempty grid")).collect();
            let e = summarize(&xs);
            json!({ "observable": o.name, "mean": e.0, "stderr": e.1 })
        })
        .collect();

    let mut run = RunDir::create("simulate", cfg, root)?;
    run.set_streams("replica r uses stream r");
    run.write("measurements.csv", &csv)?;
    run.write("final_configurations.txt", &snapshots)?;
    run.write_json("summary.json", &json!({ "replicas": cfg.replicas, "regimes": bs.regimes(), "final": finals }))?;
    println!("simulated {} replicas at level {} to t = {}", cfg.replicas, cfg.level, cfg.horizon);
    run.finish(cfg)
}

/// Mean and standard error; a single replica has no error bar.
fn summarize(xs: &[f64]) -> (f64, f64) {
    match mean_estimate(xs) {
        Ok(Estimate { mean, stderr, .. }) => (mean, stderr),
        Err(_) => (xs.iter().sum::<f64>() / xs.len().max(1) as f64, f64::NAN),
    }
}

pub fn hydro_compare(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let bs = cfg.boundary_spec()?;
    let bc = cfg.boundary_condition()?;
    let s = spectrum(&g, &bc)?;
    let p = heat_problem(cfg, &g, bc.clone())?;
    let tests = cfg.test_functions(&g, Some(&s))?;
    let grid = pde::uniform_grid(cfg.horizon, cfg.steps);
    let traj = pde::trajectory(&g, &p, &s, &grid)?;
    let obs: Vec<Observable<f64>> = tests.iter().map(|(n, f)| Observable::new(n.clone(), density_functional(f))).collect();
    let init = cfg.initial_condition(&g)?;
    let runs = run_replicas(&g, &bs, &init, &grid, &obs, cfg.replicas, cfg.seed)?;

    let mut comparison = String::from("t,observable,simulated_mean,stderr,pde\n");
    let mut deviation = String::from("observable,sup_deviation\n");
    let mut sups = serde_json::Map::new();
    for (i, (name, phi)) in tests.iter().enumerate() {
        let mut sup = 0.0f64;
        for (k, t) in grid.iter().enumerate() {
            let xs: Vec<f64> = runs.iter().map(|(s, _)| s.values[i][k]).collect();
            let (mean, se) = summarize(&xs);
            let theory = traj[k].inner(phi)?;
            sup = sup.max((mean - theory).abs());
            writeln!(comparison, "{t},{name},{mean},{se},{theory}").expect("string write");
        }
        writeln!(deviation, "{name},{sup}").expect("string write");
        sups.insert(name.clone(), json!(sup));
    }
    let mut run = RunDir::create("hydro-compare", cfg, root)?;
    run.set_streams("replica r uses stream r");
    run.write("comparison.csv", &comparison)?;
    run.write("deviation.csv", &deviation)?;
    run.write_json(
        "summary.json",
        &json!({ "bc": bc.label(), "regimes": bs.regimes(), "replicas": cfg.replicas, "sup_deviation": sups }),
    )?;
    print!("{deviation}");
    run.finish(cfg)
}

pub fn fluct(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let bs = cfg.boundary_spec()?;
    if !bs.is_equilibrium() {
        return Err(CliError::Config("fluct needs equal reservoir densities at all corners".into()));
    }
    let rho = bs.rho_bar(0);
    let bc = cfg.boundary_condition()?;
    let s = spectrum(&g, &bc)?;
    let tests = cfg.test_functions(&g, Some(&s))?;
    let decay: Vec<Option<f64>> = cfg
        .observables
        .iter()
        .map(|o| match o {
            crate::config::ObservableConfig::Eigen { eigen } => s.eigenvalue(*eigen).ok().map(|l| 2.0 / 3.0 * l),
            _ => None,
        })
        .collect();
    let f = &cfg.fluct;
    let slowest = decay.iter().flatten().cloned().filter(|r| *r > 1e-9).fold(f64::INFINITY, f64::min);
    let max_lag = f.max_lag.unwrap_or(if slowest.is_finite() { (1.0 / slowest).min(0.5) } else { 0.5 });
    let step = ((max_lag / f.lags as f64) / f.dt).round().max(1.0) as usize;

    // One long stationary path.
    let init = InitialCondition::Profile(Field::constant(&g, rho));
    let samples = (f.length / f.dt).round() as usize;
    let mut e = Engine::start(&g, &bs, &init, RngStream::new(cfg.seed, 0))?;
    e.advance_to(f.burn_in)?;
    let handles: Vec<usize> = tests
        .iter()
        .map(|(_, phi)| e.track(&fluctuation_functional(phi, rho)?))
        .collect::<gasket_hydro::Result<_>>()?;
    let mut ys = vec![Vec::with_capacity(samples); tests.len()];
    for k in 1..=samples {
        e.advance_to(f.burn_in + k as f64 * f.dt)?;
        for (i, h) in handles.iter().enumerate() {
            ys[i].push(e.value(*h));
        }
    }

    // Martingale second moments over independent replicas.
    let functionals: Vec<_> = tests
        .iter()
        .map(|(_, phi)| Ok((fluctuation_functional(phi, rho)?, fluctuation_drift(&g, &bs, phi)?)))
        .collect::<gasket_hydro::Result<_>>()?;
    let martingales: Vec<Vec<f64>> = (0..f.qv_replicas)
        .into_par_iter()
        .map(|r| {
            let mut e = Engine::start(&g, &bs, &init, RngStream::new(cfg.seed, 1 + r))?;
            let hs: Vec<(usize, usize)> =
                functionals.iter().map(|(y, d)| Ok((e.track(y)?, e.track(d)?))).collect::<gasket_hydro::Result<_>>()?;
            let y0: Vec<f64> = hs.iter().map(|(hy, _)| e.value(*hy)).collect();
            e.advance_to(f.qv_time)?;
            Ok(hs.iter().zip(&y0).map(|((hy, hd), y0)| e.value(*hy) - y0 - e.integral(*hd)).collect())
        })
        .collect::<gasket_hydro::Result<_>>()?;

    let mut run = RunDir::create("fluct", cfg, root)?;
    run.set_streams("stream 0 is the stationary path, stream 1 + r is martingale replica r");
    let mut summary = Vec::new();
    for (i, (name, phi)) in tests.iter().enumerate() {
        let mut rows = Vec::new();
        for k in 0..=f.lags {
            let lag = k * step;
            let est = ou_covariance_empirical(&ys[i], &ys[i], lag, f.batches)?;
            let t = lag as f64 * f.dt;
            rows.push(CovarianceRow { lag: t, theory: ou_covariance_theory(&s, phi, phi, t, rho)?, estimate: est.mean, stderr: est.stderr });
        }
        run.write(&format!("covariance_{name}.csv"), &covariance_csv(&rows))?;
        let lags: Vec<f64> = rows.iter().map(|r| r.lag).collect();
        let cov: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
        let fitted = fit_decay_rate(&lags, &cov).ok();
        let ms: Vec<f64> = martingales.iter().map(|m| m[i]).collect();
        let qv = martingale_qv_diagnostic(&g, &bs, phi, f.qv_time, rho, &ms)?;
        summary.push(json!({
            "test_function": name,
            "lag0_estimate": rows[0].estimate,
            "lag0_stderr": rows[0].stderr,
            "lag0_theory": chi(rho) * phi.inner(phi)?,
            "fitted_decay_rate": fitted,
            "limit_decay_rate": decay[i],
            "qv_estimate": qv.estimate.mean,
            "qv_stderr": qv.estimate.stderr,
            "qv_theory": qv.theory,
            "qv_z": qv.z_score(),
        }));
        println!(
            "{name}: lag-0 {:.4}±{:.4} (theory {:.4}), decay {} (limit {}), QV z = {:.2}",
            rows[0].estimate,
            rows[0].stderr,
            rows[0].theory,
            fitted.map_or("n/a".into(), |r| format!("{r:.3}")),
            decay[i].map_or("n/a".into(), |r| format!("{r:.3}")),
            qv.z_score()
        );
    }
    run.write_json("summary.json", &json!({ "rho": rho, "bc": bc.label(), "test_functions": summary }))?;
    run.finish(cfg)
}

fn product_law(profile: &Field<f64>) -> Vec<f64> {
    let n = profile.len();
    (0..1u64 << n)
        .map(|m| (0..n).map(|v| if (m >> v) & 1 == 1 { profile[v] } else { 1.0 - profile[v] }).product())
        .collect()
}

/// Pearson statistic with bins of expected count below 5 pooled; returns `(p-value, dof)`.
fn chi_square(counts: &[u64], probs: &[f64], total: u64) -> (f64, usize) {
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (c, p) in counts.iter().zip(probs) {
        let e = p * total as f64;
        if e < 5.0 {
            pool_obs += *c as f64;
            pool_exp += e;
        } else {
            stat += (*c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp.max(1.0);
        bins += usize::from(pool_exp >= 5.0);
    }
    let dof = bins.max(2) - 1;
    (1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat), dof)
}

pub fn oracle(cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<PathBuf> {
    let g = cfg.graph()?;
    let n = g.num_vertices();
    if n > MAX_ORACLE_SITES {
        return Err(CliError::Capacity(format!("the master equation needs |V_N| <= {MAX_ORACLE_SITES}, level {} has {n}", cfg.level)));
    }
    let bs = cfg.boundary_spec()?;
    let generator = Generator::build(&g, &bs)?;
    let p0 = product_law(&cfg.initial_profile(&g)?);
    let p = generator.evolve(&p0, cfg.horizon)?;
    let init = cfg.initial_condition(&g)?;
    let states: Vec<u64> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut e = Engine::start(&g, &bs, &init, RngStream::new(cfg.seed, r))?;
            e.advance_to(cfg.horizon)?;
            Ok(to_mask(e.occupation()))
        })
        .collect::<gasket_hydro::Result<_>>()?;
    let mut counts = vec![0u64; 1 << n];
    for m in states {
        counts[m as usize] += 1;
    }
    let total = cfg.replicas as f64;
    let empirical: Vec<f64> = counts.iter().map(|c| *c as f64 / total).collect();
    let (pvalue, dof) = chi_square(&counts, &p, cfg.replicas);
    let stationary = generator.stationary()?;

    let mut table = String::from("state,oracle,empirical,stationary\n");
    for m in 0..1u64 << n {
        let bits = Configuration::<f64>::new(&g, from_mask(m, n))?.to_bits();
        let i = m as usize;
        writeln!(table, "{bits},{},{},{}", p[i], empirical[i], stationary[i]).expect("string write");
    }
    let equilibrium = bs.is_equilibrium().then(|| {
        let rho = bs.rho_bar(0);
        json!({
            "rho": rho,
            "stationary_tv_to_product": total_variation(&stationary, &product_bernoulli(n, &rho)),
            "detailed_balance_max_violation": detailed_balance_check(&g, &bs, &1e-12).map(|d| d.max_violation).ok(),
        })
    });
    let mut run = RunDir::create("oracle", cfg, root)?;
    run.set_streams("replica r uses stream r");
    run.write("distribution.csv", &table)?;
    run.write_json(
        "summary.json",
        &json!({
            "t": cfg.horizon,
            "replicas": cfg.replicas,
            "total_variation": total_variation(&p, &empirical),
            "chi_square_p_value": pvalue,
            "chi_square_dof": dof,
            "equilibrium": equilibrium,
        }),
    )?;
    println!("level {}: TV(oracle, empirical) = {:.4}, chi-square p = {pvalue:.4} (dof {dof})", cfg.level, total_variation(&p, &empirical));
    run.finish(cfg)
}

/// Dry run: schema, capacity and regime report. Never fails; problems are listed.
pub fn validate(cfg: Result<ExperimentConfig, CliError>) -> String {
    let mut out = String::new();
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(out, "problem: {e}");
            return out;
        }
    };
    let mut problems = Vec::new();
    let _ = writeln!(out, "level {}: |V| = {}, |E| = {}", cfg.level, vertex_count(cfg.level), edge_count(cfg.level));
    match cfg.boundary_spec() {
        Ok(bs) => {
            for k in 0..3 {
                let _ = writeln!(
                    out,
                    "corner a{k}: b = {}, regime {}, lambda+ = {}, lambda- = {}, rho_bar = {:.6}",
                    bs.b[k],
                    bs.regime(k),
                    bs.lambda_plus[k],
                    bs.lambda_minus[k],
                    bs.rho_bar(k)
                );
            }
            let _ = writeln!(out, "equilibrium (equal reservoir densities): {}", bs.is_equilibrium());
        }
        Err(e) => problems.push(e.to_string()),
    }
    match cfg.boundary_condition() {
        Ok(bc) => {
            let labels: Vec<&str> = bc.corners.iter().map(CornerCondition::label).collect();
            let _ = writeln!(out, "bc `{}`: {}", cfg.bc, labels.join(", "));
        }
        Err(e) => problems.push(e.to_string()),
    }
    let v = if cfg.level <= MAX_LEVEL { vertex_count(cfg.level) } else { usize::MAX };
    let feasible = |ok: bool| if ok { "ok" } else { "exceeds cap" };
    let _ = writeln!(out, "graph / simulate: {}", feasible(cfg.level <= MAX_LEVEL));
    let _ = writeln!(out, "spectrum / pde / hydro-compare / fluct / resistance: {}", feasible(v <= DENSE_CAP));
    let _ = writeln!(out, "oracle: {}", feasible(v <= MAX_ORACLE_SITES));
    if cfg.level > MAX_LEVEL {
        problems.push(format!("level {} exceeds the cap {MAX_LEVEL}", cfg.level));
    }
    if problems.is_empty() {
        out.push_str("no problems found\n");
    }
    for p in problems {
        let _ = writeln!(out, "problem: {p}");
    }
    out
}
