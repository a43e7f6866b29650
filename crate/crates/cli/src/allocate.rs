use std::path::Path;

use serde::Serialize;

use fedl_core::datagen::fmt_f64;
use fedl_core::fedl::LocalSolverConstants;
use fedl_core::wireless::{
    heterogeneity, log_grid, pareto_sweep, solve_fedl_alloc, FedlAllocation, Instance, Region,
};

use crate::failure::{read_config, Failure};
use crate::output::Run;

/// A κ grid given as `MIN:MAX:COUNT[:log|lin]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl KappaGrid {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("expected MIN:MAX:COUNT[:log|lin], got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let (min, max) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| format!("{:?}: {e}", parts[2]))?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("log") => true,
            Some("lin") => false,
            Some(other) => return Err(format!("grid scale must be log or lin, got {other:?}")),
        };
        if !(min.is_finite() && max.is_finite() && min >= 0.0 && min <= max) {
            return Err(format!("need 0 <= MIN <= MAX, got {min}..{max}"));
        }
        if log && min <= 0.0 {
            return Err("log grid needs MIN > 0".into());
        }
        Ok(Self {
            min,
            max,
            count,
            log,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        match (self.count, self.log) {
            (0, _) => Vec::new(),
            (1, _) => vec![self.min],
            (n, true) => log_grid(self.min, self.max, n),
            (n, false) => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct AllocSummary<'a> {
    kappa: f64,
    region: Region,
    #[serde(rename = "T_cp")]
    t_cp: f64,
    #[serde(rename = "T_co")]
    t_co: f64,
    theta_star: f64,
    eta_star: f64,
    #[serde(rename = "Theta")]
    theta_rate: f64,
    total_energy: f64,
    total_time: f64,
    objective: f64,
    #[serde(rename = "L_cp")]
    l_cp: f64,
    #[serde(rename = "L_co")]
    l_co: f64,
    allocation: &'a FedlAllocation,
}

fn load_instance(config: &Path) -> Result<Instance, Failure> {
    let inst: Instance = read_config(config)?;
    inst.validate()?;
    Ok(inst)
}

fn allocation_csv(alloc: &FedlAllocation) -> String {
    let mut out = String::from("ue,class,f_star,tau_star,energy_cp,energy_co\n");
    let p = &alloc.sub1.partition;
    for (n, f) in alloc.sub1.f_star.iter().enumerate() {
        let class = if p.n1.contains(&n) {
            "N1"
        } else if p.n2.contains(&n) {
            "N2"
        } else {
            "N3"
        };
        let cells = [
            fmt_f64(*f),
            fmt_f64(alloc.sub2.tau_star[n]),
            fmt_f64(alloc.sub1.energy_cp[n]),
            fmt_f64(alloc.sub2.energy_co[n]),
        ];
        out.push_str(&format!("{n},{class},{}\n", cells.join(",")));
    }
    out
}

pub fn run_allocate(config: &Path, out: &Path, kappa: Option<f64>) -> Result<(), Failure> {
    let inst = load_instance(config)?;
    let sys = match kappa {
        Some(k) => inst.system.with_kappa(k),
        None => inst.system.clone(),
    };
    sys.validate()?;
    let learning = inst.learning.clone().unwrap_or_default();
    let consts = LocalSolverConstants::gradient_descent(learning.rho)?;
    let mut run = Run::start("allocate", config, out)?;
    let alloc = solve_fedl_alloc(
        &inst.ues,
        &sys,
        &consts,
        learning.rho,
        learning.gap0_over_eps,
    )?;
    let (l_cp, l_co) = heterogeneity(&inst.ues, &sys)?;
    let summary = AllocSummary {
        kappa: alloc.kappa,
        region: alloc.region,
        t_cp: alloc.sub1.t_cp_star,
        t_co: alloc.sub2.t_co_star,
        theta_star: alloc.sub3.theta_star,
        eta_star: alloc.sub3.eta_star,
        theta_rate: alloc.sub3.theta_rate,
        total_energy: alloc.total_energy,
        total_time: alloc.total_time,
        objective: alloc.objective,
        l_cp,
        l_co,
        allocation: &alloc,
    };
    run.write("allocation.csv", allocation_csv(&alloc).as_bytes())?;
    run.write_json("summary.json", &summary)?;
    run.finish(true)?;
    println!(
        "kappa {}: region {}, energy {:.6e} J, time {:.6e} s",
        alloc.kappa, alloc.region, alloc.total_energy, alloc.total_time
    );
    Ok(())
}

pub fn run_pareto(config: &Path, out: &Path, grid: &KappaGrid) -> Result<(), Failure> {
    let inst = load_instance(config)?;
    let kappas = grid.points();
    if kappas.is_empty() {
        return Err(Failure::input("empty kappa grid"));
    }
    let learning = inst.learning.clone().unwrap_or_default();
    let consts = LocalSolverConstants::gradient_descent(learning.rho)?;
    let mut run = Run::start("pareto", config, out)?;
    let points = pareto_sweep(
        &inst.ues,
        &inst.system,
        &consts,
        learning.rho,
        learning.gap0_over_eps,
        &kappas,
    )?;
    let mut csv = String::from("kappa,total_time,total_energy,theta_star,eta_star,Theta\n");
    for p in &points {
        let cells = [
            p.kappa,
            p.total_time,
            p.total_energy,
            p.theta_star,
            p.eta_star,
            p.theta_rate,
        ]
        .map(fmt_f64);
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    run.write("frontier.csv", csv.as_bytes())?;
    run.finish(true)?;
    println!("wrote {} frontier points", points.len());
    Ok(())
}
