//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedl_core::datagen::{generate_synthetic, SyntheticSpec};
use fedl_core::fedl::{
    global_loss, local_iteration_bound, local_solve, run_fedavg, run_fedl, theta_rate, Batch,
    LocalParams, LocalSolverConstants, TrainConfig,
};
use fedl_core::math::{estimate_curvature, lambert_w0};
use fedl_core::wireless::{
    classify_kappa, energy_co_slope, energy_cp, g_inv, heterogeneous_instance, kkt_check_sub1,
    kkt_check_sub2, log_grid, optimal_tau, pareto_sweep, reference_instance, solve_fedl_alloc,
    solve_sub1, solve_sub2, solve_sub3, sub3_objective, tau_bounds, threshold_partition,
    RoundCosts, SystemParams, UEProfile, ETA_RANGE, THETA_RANGE,
};
use fedl_core::{LossModel, ModelVector, UEDataset};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ------------------------------------------------------------------------

fn theta_reference() -> Outcome {
    let rows = [
        (0.033, 0.253, 1.4, 0.094),
        (0.016, 0.177, 2.0, 0.041),
        (0.002, 0.036, 5.0, 0.003),
    ];
    let mut got = Vec::new();
    for (theta, eta, rho, expected) in rows {
        let v = theta_rate(theta, eta, rho);
        check((v - expected).abs() <= 0.002, || {
            format!("rho {rho}: Theta {v:.5}, expected {expected}")
        })?;
        got.push(format!("{v:.4}"));
    }
    Ok(format!("Theta = {}", got.join("/")))
}

// 2 ------------------------------------------------------------------------

/// `min_w (1/D)‖Xw − y‖²` over the pooled training data.
fn least_squares_optimum(train: &[UEDataset]) -> ModelVector {
    let d = train[0].dim();
    let rows: usize = train.iter().map(|u| u.len()).sum();
    let mut x = DMatrix::<f64>::zeros(rows, d);
    let mut y = DVector::<f64>::zeros(rows);
    let mut r = 0;
    for ue in train {
        for i in 0..ue.len() {
            for (j, v) in ue.row(i).iter().enumerate() {
                x[(r, j)] = *v;
            }
            y[r] = ue.label(i);
            r += 1;
        }
    }
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &y;
    let w = xtx
        .cholesky()
        .expect("pooled Gram matrix is positive definite")
        .solve(&xty);
    ModelVector::from_vec(w.iter().copied().collect())
}

fn linear_rate() -> Outcome {
    let mut spec = SyntheticSpec::new(20, 10, 1.5, [2000, 4000], 2024);
    spec.scale_range = [1.0, 1.0];
    let data = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let model = LossModel::MseLinear;
    let curv = estimate_curvature(&model, &data.train).map_err(|e| e.to_string())?;
    let rho = curv.rho();
    let theta = 0.05;
    let (eta, rate) = log_grid(1e-4, 10.0, 2000)
        .into_iter()
        .map(|eta| (eta, theta_rate(theta, eta, rho)))
        .fold(
            (0.0, f64::NEG_INFINITY),
            |b, c| if c.1 > b.1 { c } else { b },
        );
    check(rate > 0.0 && rate < 1.0, || {
        format!("rho_hat {rho:.3} gives no Theta in (0,1)")
    })?;
    let cfg = TrainConfig {
        eta,
        theta,
        k_g: 100,
        k_l: 100_000,
        h: 1.0 / curv.l,
        batch: Batch::Full,
        subset: 20,
        seed: 1,
    };
    let trace = run_fedl(&cfg, &data.train, None, &model).map_err(|e| e.to_string())?;
    let w_star = least_squares_optimum(&data.train);
    let f_star = global_loss(&w_star, &data.train, &model).map_err(|e| e.to_string())?;
    let gap0 = trace.initial_loss - f_star;
    let mut worst = f64::NEG_INFINITY;
    for r in &trace.records {
        let bound = (1.0 - rate).powi(r.round as i32) * gap0;
        let gap = r.global_loss - f_star;
        worst = worst.max(gap / bound);
        check(gap <= bound, || {
            format!("round {}: gap {gap:.3e} > bound {bound:.3e}", r.round)
        })?;
        check(r.certified.iter().all(|&c| c), || {
            format!("round {}: local solve hit the cap", r.round)
        })?;
    }
    check(trace.records.len() == 100, || "missing rounds".into())?;
    Ok(format!(
        "rho_hat {rho:.3}, eta {eta:.4}, Theta {rate:.4}, max gap/bound {worst:.3e}"
    ))
}

// 3 ------------------------------------------------------------------------

/// Brute force over per-UE log grids of 200 frequencies: for each candidate
/// deadline every UE picks its slowest grid frequency that meets it. One
/// refinement pass repeats this on a grid spanning the neighbours of the
/// best frequencies.
fn sub1_brute_force(ues: &[UEProfile], sys: &SystemParams) -> f64 {
    let grids: Vec<Vec<f64>> = ues
        .iter()
        .map(|u| log_grid(u.f_min, u.f_max, 200))
        .collect();
    let (best, f_best) = sub1_grid_pass(ues, sys, &grids);
    let refined: Vec<Vec<f64>> = grids
        .iter()
        .zip(&f_best)
        .map(|(g, &f)| {
            let i = g.iter().position(|&x| x == f).unwrap();
            let lo = g[i.saturating_sub(1)];
            let hi = g[(i + 1).min(g.len() - 1)];
            let mut r = log_grid(lo, hi, 200);
            r.push(f);
            r.sort_by(f64::total_cmp);
            r
        })
        .collect();
    let (best2, _) = sub1_grid_pass(ues, sys, &refined);
    best.min(best2)
}

fn sub1_grid_pass(ues: &[UEProfile], sys: &SystemParams, grids: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let mut deadlines: Vec<f64> = ues
        .iter()
        .zip(grids)
        .flat_map(|(u, g)| g.iter().map(move |&f| u.load() / f))
        .collect();
    deadlines.sort_by(f64::total_cmp);
    let mut best = (f64::INFINITY, Vec::new());
    for &t in &deadlines {
        let mut f = Vec::with_capacity(ues.len());
        for (u, g) in ues.iter().zip(grids) {
            match g.iter().find(|&&x| u.load() / x <= t) {
                Some(&x) => f.push(x),
                None => break,
            }
        }
        if f.len() < ues.len() {
            continue;
        }
        let t_cp = ues
            .iter()
            .zip(&f)
            .map(|(u, &x)| u.load() / x)
            .fold(0.0, f64::max);
        let obj = ues
            .iter()
            .zip(&f)
            .map(|(u, &x)| energy_cp(u, x))
            .sum::<f64>()
            + sys.kappa * t_cp;
        if obj < best.0 {
            best = (obj, f);
        }
    }
    best
}

fn region_kappas(ues: &[UEProfile], sys: &SystemParams) -> Option<[f64; 4]> {
    let (_, t) = classify_kappa(ues, sys).ok()?;
    if !(t.ab < t.bc && t.bc < t.cd) {
        return None;
    }
    Some([
        0.5 * t.ab,
        (t.ab * t.bc).sqrt(),
        (t.bc * t.cd).sqrt(),
        2.0 * t.cd,
    ])
}

fn sub1_oracle() -> Outcome {
    let (mut instances, mut seed) = (0, 0u64);
    let (mut worst_rel, mut worst_kkt) = (0.0f64, 0.0f64);
    while instances < 200 {
        seed += 1;
        let inst = reference_instance(5, 10_000 + seed).map_err(|e| e.to_string())?;
        let Some(kappas) = region_kappas(&inst.ues, &inst.system) else {
            continue;
        };
        instances += 1;
        for (region, kappa) in ["a", "b", "c", "d"].iter().zip(kappas) {
            let sys = inst.system.with_kappa(kappa);
            let sol = solve_sub1(&inst.ues, &sys).map_err(|e| e.to_string())?;
            let oracle = sub1_brute_force(&inst.ues, &sys);
            let rel = (sol.objective - oracle).abs() / oracle;
            worst_rel = worst_rel.max(rel);
            check(rel <= 1e-3, || {
                format!(
                    "seed {seed} region {region}: closed form {} vs oracle {oracle}",
                    sol.objective
                )
            })?;
            check(sol.objective <= oracle * (1.0 + 1e-12), || {
                format!("seed {seed} region {region}: oracle beats closed form")
            })?;
            let kkt = kkt_check_sub1(&sol, &inst.ues, &sys).max();
            worst_kkt = worst_kkt.max(kkt);
            check(kkt < 1e-6, || {
                format!("seed {seed} region {region}: KKT residual {kkt:.3e}")
            })?;
        }
    }
    Ok(format!(
        "{instances} instances x 4 regions, max rel gap {worst_rel:.2e}, max KKT {worst_kkt:.2e} ({seed} drawn)"
    ))
}

// 4 ------------------------------------------------------------------------

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `f(b) − f(a)` for `f = E_co + κτ`, as the integral of `f'` (composite
/// 5-point Gauss–Legendre). Differencing two values of `f` loses about half
/// the digits near the minimum; the integral does not.
fn objective_rise(ue: &UEProfile, sys: &SystemParams, a: f64, b: f64) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            let t = mid + 0.5 * h * x;
            total += w * 0.5 * h * (energy_co_slope(ue, sys, t) + sys.kappa);
        }
    }
    total
}

/// Golden-section minimisation of `E_co(τ) + κτ` on `[τ_min, τ_max]`.
fn golden_tau(ue: &UEProfile, sys: &SystemParams) -> f64 {
    let (mut a, mut b) = tau_bounds(ue, sys);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    while b - a > 1e-13 * b {
        // f(c) <= f(d)
        if objective_rise(ue, sys, c, d) >= 0.0 {
            b = d;
            d = c;
            c = b - INV_PHI * (b - a);
        } else {
            a = c;
            c = d;
            d = a + INV_PHI * (b - a);
        }
    }
    0.5 * (a + b)
}

fn sub2_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let (mut worst, mut interior) = (0.0f64, 0);
    for i in 0..500 {
        let inst = reference_instance(1, 20_000 + i).map_err(|e| e.to_string())?;
        let ue = &inst.ues[0];
        // log-uniform over a band three times wider than the interior regime
        let (lo, hi) = tau_bounds(ue, &inst.system);
        let k_lo = (g_inv(ue, &inst.system, hi) / 3.0).ln();
        let k_hi = (g_inv(ue, &inst.system, lo) * 3.0).ln();
        let kappa = rng.gen_range(k_lo..k_hi).exp();
        let sys = inst.system.with_kappa(kappa);
        let tau = optimal_tau(ue, &sys).map_err(|e| e.to_string())?;
        let oracle = golden_tau(ue, &sys);
        let (lo, hi) = tau_bounds(ue, &sys);
        if tau > lo && tau < hi {
            interior += 1;
        }
        worst = worst.max((tau - oracle).abs());
        check((tau - oracle).abs() <= 1e-8, || {
            format!("pair {i}: kappa {kappa:.3e}, tau {tau} vs golden {oracle}")
        })?;
        let sol = solve_sub2(&inst.ues, &sys).map_err(|e| e.to_string())?;
        let kkt = kkt_check_sub2(&sol, &inst.ues, &sys).max();
        check(kkt < 1e-6, || format!("pair {i}: KKT residual {kkt:.3e}"))?;
    }
    let mut grid: Vec<f64> = (0..5000)
        .map(|i| -(-1.0f64).exp() + (1.0 + (-1.0f64).exp()) * (i as f64 / 4999.0).powi(2))
        .collect();
    grid.extend(log_grid(1.0, 1e12, 5000));
    let mut lw = 0.0f64;
    for &x in &grid {
        let w = lambert_w0(x).map_err(|e| e.to_string())?;
        let r = (w * w.exp() - x).abs() / x.abs().max(1.0);
        lw = lw.max(r);
        check(r <= 1e-12, || format!("W({x}) = {w}, residual {r:.3e}"))?;
    }
    Ok(format!(
        "max |tau - golden| {worst:.2e} ({interior}/500 interior), Lambert residual {lw:.2e} on {} points",
        grid.len()
    ))
}

// 5 ------------------------------------------------------------------------

fn regions() -> Outcome {
    let mut transitions = 0;
    let mut raw_mismatch = 0;
    for seed in 0..10 {
        let inst = reference_instance(5, 30_000 + seed).map_err(|e| e.to_string())?;
        let (_, t) = classify_kappa(&inst.ues, &inst.system).map_err(|e| e.to_string())?;
        let kappas = log_grid(t.ab / 20.0, t.cd * 20.0, 100);
        let mut prev = None;
        for &k in &kappas {
            let sys = inst.system.with_kappa(k);
            let (region, _) = classify_kappa(&inst.ues, &sys).map_err(|e| e.to_string())?;
            let sol = solve_sub1(&inst.ues, &sys).map_err(|e| e.to_string())?;
            let from_solution = sol.partition.region();
            check(from_solution == Some(region), || {
                format!(
                    "seed {seed} kappa {k:.4e}: classify {region}, partition {:?}",
                    sol.partition.pattern()
                )
            })?;
            let (alg2, _) = threshold_partition(&inst.ues, &sys).map_err(|e| e.to_string())?;
            if alg2.region() != Some(region) {
                raw_mismatch += 1;
            }
            if prev.is_some_and(|p| p != region) {
                transitions += 1;
            }
            prev = Some(region);
        }
    }
    check(transitions > 0, || "no region transitions in sweep".into())?;
    Ok(format!(
        "10 instances x 100 kappa, {transitions} transitions, unreconciled partition differs at {raw_mismatch} points"
    ))
}

// 6 ------------------------------------------------------------------------

fn sub3_trends() -> Outcome {
    let inst = reference_instance(5, 1).map_err(|e| e.to_string())?;
    let sys = inst.system.with_kappa(1.0);
    let s1 = solve_sub1(&inst.ues, &sys).map_err(|e| e.to_string())?;
    let s2 = solve_sub2(&inst.ues, &sys).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for rho in [1.4, 2.0, 5.0] {
        let consts = LocalSolverConstants::gradient_descent(rho).map_err(|e| e.to_string())?;
        rows.push(solve_sub3(&s1, &s2, &consts, rho, 1.0).map_err(|e| e.to_string())?);
    }
    for w in rows.windows(2) {
        check(w[1].theta_star < w[0].theta_star, || {
            format!("theta* not decreasing: {rows:?}")
        })?;
        check(w[1].eta_star < w[0].eta_star, || {
            format!("eta* not decreasing: {rows:?}")
        })?;
        check(w[1].theta_rate < w[0].theta_rate, || {
            format!("Theta not decreasing: {rows:?}")
        })?;
    }
    let table: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "({:.4},{:.3},{:.4})",
                r.theta_star, r.eta_star, r.theta_rate
            )
        })
        .collect();

    let coarse_t = log_grid(THETA_RANGE.0, THETA_RANGE.1, 20);
    let coarse_e = log_grid(ETA_RANGE.0, ETA_RANGE.1, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for i in 0..20 {
        let inst = reference_instance(5, 40_000 + i).map_err(|e| e.to_string())?;
        let kappa = 10f64.powf(rng.gen_range(-3.0..1.0));
        let rho = rng.gen_range(1.2..5.0);
        let sys = inst.system.with_kappa(kappa);
        let s1 = solve_sub1(&inst.ues, &sys).map_err(|e| e.to_string())?;
        let s2 = solve_sub2(&inst.ues, &sys).map_err(|e| e.to_string())?;
        let consts = LocalSolverConstants::gradient_descent(rho).map_err(|e| e.to_string())?;
        let sol = solve_sub3(&s1, &s2, &consts, rho, kappa).map_err(|e| e.to_string())?;
        let costs = RoundCosts::new(&s1, &s2, kappa);
        let oracle = coarse_t
            .iter()
            .flat_map(|&t| coarse_e.iter().map(move |&e| (t, e)))
            .filter_map(|(t, e)| sub3_objective(t, e, costs, &consts, rho))
            .fold(f64::INFINITY, f64::min);
        check(sol.objective <= oracle, || {
            format!(
                "instance {i}: solver {} > coarse grid {oracle}",
                sol.objective
            )
        })?;
    }
    Ok(format!(
        "(theta*, eta*, Theta) at rho 1.4/2/5: {}; 20/20 beat 20x20 grid",
        table.join(" ")
    ))
}

// 7 ------------------------------------------------------------------------

fn pareto() -> Outcome {
    let rho = 2.0;
    let consts = LocalSolverConstants::gradient_descent(rho).map_err(|e| e.to_string())?;
    let gap = std::f64::consts::E;
    let kappas = log_grid(1e-4, 1e2, 20);
    let inst = reference_instance(5, 1).map_err(|e| e.to_string())?;
    let pts = pareto_sweep(&inst.ues, &inst.system, &consts, rho, gap, &kappas)
        .map_err(|e| e.to_string())?;
    check(pts.len() == 20, || "wrong point count".into())?;
    for w in pts.windows(2) {
        check(w[1].total_time <= w[0].total_time, || {
            format!("time rises at kappa {}", w[1].kappa)
        })?;
        check(w[1].total_energy >= w[0].total_energy, || {
            format!("energy falls at kappa {}", w[1].kappa)
        })?;
    }

    let low = heterogeneous_instance(50, 3, 1.0, 1.0).map_err(|e| e.to_string())?;
    let high = heterogeneous_instance(50, 3, 0.2, 1.0).map_err(|e| e.to_string())?;
    let (l_low, _) =
        fedl_core::wireless::heterogeneity(&low.ues, &low.system).map_err(|e| e.to_string())?;
    let (l_high, _) =
        fedl_core::wireless::heterogeneity(&high.ues, &high.system).map_err(|e| e.to_string())?;
    check(l_low < l_high, || "heterogeneity ordering".into())?;
    let mut worst = f64::INFINITY;
    for &k in &kappas {
        let a = solve_fedl_alloc(&low.ues, &low.system.with_kappa(k), &consts, rho, gap)
            .map_err(|e| e.to_string())?;
        let b = solve_fedl_alloc(&high.ues, &high.system.with_kappa(k), &consts, rho, gap)
            .map_err(|e| e.to_string())?;
        check(
            a.total_energy + k * a.total_time <= b.total_energy + k * b.total_time,
            || {
                format!(
                    "kappa {k:.3e}: low-heterogeneity cost {} > {}",
                    a.objective, b.objective
                )
            },
        )?;
        worst = worst.min(b.objective / a.objective);
    }
    Ok(format!(
        "20-point sweep monotone; L_cp {l_low:.3} frontier below L_cp {l_high:.3} (min cost ratio {worst:.4})"
    ))
}

// 8 ------------------------------------------------------------------------

fn fedl_vs_fedavg() -> Outcome {
    let model = LossModel::MseLinear;
    let mut lines = Vec::new();
    for seed in 0..5u64 {
        let spec = SyntheticSpec::new(100, 40, 5.0, [500, 5326], 500 + seed);
        let data = generate_synthetic(&spec).map_err(|e| e.to_string())?;
        let l = estimate_curvature(&model, &data.train)
            .map_err(|e| e.to_string())?
            .l;
        let base = TrainConfig {
            eta: 1.0,
            theta: 0.0,
            k_g: 200,
            k_l: 20,
            h: 1.0 / l,
            batch: Batch::Full,
            subset: 10,
            seed,
        };
        let mut best_fedl = f64::INFINITY;
        let mut best_avg = f64::INFINITY;
        for k in 0..8 {
            let step = 2f64.powi(-k);
            let fedl = TrainConfig {
                eta: 0.4 * step,
                ..base.clone()
            };
            if let Ok(t) = run_fedl(&fedl, &data.train, None, &model) {
                best_fedl = best_fedl.min(t.final_loss());
            }
            let avg = TrainConfig {
                h: 0.04 * step,
                ..base.clone()
            };
            if let Ok(t) = run_fedavg(&avg, &data.train, None, &model) {
                best_avg = best_avg.min(t.final_loss());
            }
        }
        check(best_fedl <= best_avg, || {
            format!("seed {seed}: FEDL {best_fedl:.6} > FedAvg {best_avg:.6}")
        })?;
        let f_star = global_loss(&least_squares_optimum(&data.train), &data.train, &model)
            .map_err(|e| e.to_string())?;
        lines.push(format!("{:.2}", (best_fedl - f_star) / (best_avg - f_star)));
    }
    Ok(format!(
        "FEDL/FedAvg optimality gap per seed {}",
        lines.join(", ")
    ))
}

// 9 ------------------------------------------------------------------------

fn local_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let model = LossModel::MseLinear;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = rng.gen_range(2..12);
        let n = rng.gen_range(5 * d..40 * d);
        let spread: Vec<f64> = (0..d)
            .map(|_| 10f64.powf(rng.gen_range(-0.5..0.5)))
            .collect();
        let features: Vec<f64> = (0..n * d)
            .map(|k| spread[k % d] * rng.gen_range(-1.0..1.0))
            .collect();
        let labels: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ue = UEDataset::new(features, labels, d).map_err(|e| e.to_string())?;
        let curv =
            estimate_curvature(&model, std::slice::from_ref(&ue)).map_err(|e| e.to_string())?;
        let rho = curv.rho();
        let consts = LocalSolverConstants::gradient_descent(rho).map_err(|e| e.to_string())?;
        let theta = 10f64.powf(rng.gen_range(-6.0..-0.05));
        let bound = local_iteration_bound(theta, &consts);
        let w_prev = ModelVector::from_vec((0..d).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let gbar = ModelVector::from_vec((0..d).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let params = LocalParams {
            eta: rng.gen_range(0.01..2.0),
            theta,
            max_iters: bound + 1000,
            h: 1.0 / curv.l,
            batch: Batch::Full,
        };
        let sol = local_solve(&w_prev, &gbar, &params, &ue, 0, &model, &mut rng)
            .map_err(|e| e.to_string())?;
        check(sol.certified && sol.iterations <= bound, || {
            format!(
                "problem {i}: {} iterations, bound {bound}, rho {rho:.2}",
                sol.iterations
            )
        })?;
        worst = worst.max(sol.iterations as f64 / bound.max(1) as f64);
    }
    Ok(format!("100 problems, max iterations/bound {worst:.3}"))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "theta rate reference values",
            theta_reference,
            Duration::from_secs(1),
        ),
        ("linear-rate bound", linear_rate, Duration::from_secs(30)),
        (
            "frequency subproblem oracle",
            sub1_oracle,
            Duration::from_secs(60),
        ),
        (
            "upload-time subproblem oracle",
            sub2_oracle,
            Duration::from_secs(10),
        ),
        ("kappa regions", regions, Duration::from_secs(5)),
        ("(theta, eta) trends", sub3_trends, Duration::from_secs(30)),
        ("pareto monotonicity", pareto, Duration::from_secs(60)),
        ("FEDL vs FedAvg", fedl_vs_fedavg, Duration::from_secs(300)),
        (
            "local iteration bound",
            local_bound,
            Duration::from_secs(10),
        ),
    ];
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let over = took > *budget;
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; runtime over {budget:?}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {id} [{name}]: {status} in {:.2}s | {detail}",
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
