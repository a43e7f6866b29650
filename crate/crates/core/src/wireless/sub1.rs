use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{energy_cp, validate_all, SystemParams, UEProfile};
use crate::error::Result;

/// Relative slack used when deciding whether a UE sits on a bound.
const SNAP: f64 = 1e-12;

/// The three UE classes of the closed-form CPU-frequency solution.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Bottleneck UEs running at `f_max`.
    pub n1: Vec<usize>,
    /// UEs finishing early at `f_min`.
    pub n2: Vec<usize>,
    /// UEs paced exactly to the common deadline.
    pub n3: Vec<usize>,
}

impl Partition {
    /// Emptiness pattern `(N1, N2, N3)`; `true` means non-empty.
    pub fn pattern(&self) -> (bool, bool, bool) {
        (
            !self.n1.is_empty(),
            !self.n2.is_empty(),
            !self.n3.is_empty(),
        )
    }

    /// The κ region this pattern belongs to, if any.
    pub fn region(&self) -> Option<Region> {
        match self.pattern() {
            (true, _, _) => Some(Region::D),
            (false, true, false) => Some(Region::A),
            (false, true, true) => Some(Region::B),
            (false, false, true) => Some(Region::C),
            (false, false, false) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sub1Solution {
    pub f_star: Vec<f64>,
    #[serde(rename = "T_cp_star")]
    pub t_cp_star: f64,
    pub partition: Partition,
    pub energy_cp: Vec<f64>,
    /// `Σ E_cp + κ·T_cp`.
    pub objective: f64,
}

fn t_n3(ues: &[UEProfile], set: &[usize], kappa: f64) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let s: f64 = set
        .iter()
        .map(|&n| ues[n].alpha_n * ues[n].load().powi(3))
        .sum();
    (s / kappa).cbrt()
}

fn slow_time(ue: &UEProfile) -> f64 {
    ue.load() / ue.f_min
}

fn fast_time(ue: &UEProfile) -> f64 {
    ue.load() / ue.f_max
}

/// Threshold partition of the UEs: returns `(N1, N2, N3)` and the three deadlines.
pub fn threshold_partition(ues: &[UEProfile], sys: &SystemParams) -> Result<(Partition, [f64; 3])> {
    validate_all(ues, sys)?;
    let kappa = sys.kappa;
    let mut order: Vec<usize> = (0..ues.len()).collect();
    order.sort_by(|&a, &b| {
        slow_time(&ues[a])
            .total_cmp(&slow_time(&ues[b]))
            .then(a.cmp(&b))
    });

    let t_n1_max = ues.iter().map(fast_time).fold(f64::MIN, f64::max);
    let mut n1: Vec<usize> = Vec::new();
    let mut n2: Vec<usize> = Vec::new();
    let mut in_n3 = vec![true; ues.len()];
    let n3_of = |in_n3: &[bool]| -> Vec<usize> { (0..ues.len()).filter(|&n| in_n3[n]).collect() };
    let mut t3 = t_n3(ues, &n3_of(&in_n3), kappa);

    for &i in &order {
        if n1.is_empty() && t3 > 0.0 && t_n1_max >= t3 {
            for (m, ue) in ues.iter().enumerate() {
                if fast_time(ue) == t_n1_max {
                    n1.push(m);
                    in_n3[m] = false;
                }
            }
            t3 = t_n3(ues, &n3_of(&in_n3), kappa);
        }
        // a UE already placed in N1 keeps its class
        if in_n3[i] && slow_time(&ues[i]) <= t3 {
            n2.push(i);
            in_n3[i] = false;
            t3 = t_n3(ues, &n3_of(&in_n3), kappa);
        }
    }
    n1.sort_unstable();
    n2.sort_unstable();
    let n3 = n3_of(&in_n3);
    let t1 = if n1.is_empty() { 0.0 } else { t_n1_max };
    let t2 = n2.iter().map(|&n| slow_time(&ues[n])).fold(0.0, f64::max);
    Ok((Partition { n1, n2, n3 }, [t1, t2, t3]))
}

/// Closed-form optimum of the CPU-frequency subproblem.
///
/// `T*_cp = max{T_N1, T_N2, T_N3}` from the partition, then
/// `f*_n = clamp(c_nD_n/T*_cp, f_min, f_max)`. The reported partition is
/// re-derived from the final frequencies so that it always agrees with them.
pub fn solve_sub1(ues: &[UEProfile], sys: &SystemParams) -> Result<Sub1Solution> {
    let (_, deadlines) = threshold_partition(ues, sys)?;
    let t_floor = ues.iter().map(fast_time).fold(f64::MIN, f64::max);
    let t_star = deadlines.iter().copied().fold(t_floor, f64::max);
    Ok(assemble(ues, sys, t_star))
}

/// Frequencies, classes and energies for a given common deadline.
pub(crate) fn assemble(ues: &[UEProfile], sys: &SystemParams, t_star: f64) -> Sub1Solution {
    let mut partition = Partition::default();
    let mut f_star = Vec::with_capacity(ues.len());
    for (n, ue) in ues.iter().enumerate() {
        let paced = ue.load() / t_star;
        let f = if paced >= ue.f_max * (1.0 - SNAP) {
            partition.n1.push(n);
            ue.f_max
        } else if paced <= ue.f_min * (1.0 + SNAP) {
            partition.n2.push(n);
            ue.f_min
        } else {
            partition.n3.push(n);
            paced
        };
        f_star.push(f);
    }
    let energy: Vec<f64> = ues
        .iter()
        .zip(&f_star)
        .map(|(u, &f)| energy_cp(u, f))
        .collect();
    let objective = energy.iter().sum::<f64>() + sys.kappa * t_star;
    Sub1Solution {
        f_star,
        t_cp_star: t_star,
        partition,
        energy_cp: energy,
        objective,
    }
}

/// Objective of the frequency subproblem for arbitrary feasible frequencies,
/// with `T_cp` set to the slowest UE.
pub fn sub1_objective(ues: &[UEProfile], sys: &SystemParams, f: &[f64]) -> f64 {
    let t = ues
        .iter()
        .zip(f)
        .map(|(u, &f)| u.load() / f)
        .fold(0.0, f64::max);
    ues.iter()
        .zip(f)
        .map(|(u, &f)| energy_cp(u, f))
        .sum::<f64>()
        + sys.kappa * t
}

/// The four κ regimes of the frequency solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Every UE at `f_min`.
    A,
    /// Some UEs at `f_min`, the rest paced to the deadline.
    B,
    /// Every UE paced to the deadline.
    C,
    /// Bottleneck UEs at `f_max` set the deadline.
    D,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::A => "a",
            Region::B => "b",
            Region::C => "c",
            Region::D => "d",
        })
    }
}

/// Region boundaries on the κ axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaThresholds {
    pub ab: f64,
    pub bc: f64,
    pub cd: f64,
}

/// Which region `sys.kappa` falls in, with the three boundaries.
///
/// Region a is `κ ≤ ab`, b is `ab < κ ≤ bc`, c is `bc < κ < cd` and d is
/// `κ ≥ cd`. When the lightest UE cannot be paced below the bottleneck's
/// fastest time, region c is empty and `bc = cd`.
pub fn classify_kappa(ues: &[UEProfile], sys: &SystemParams) -> Result<(Region, KappaThresholds)> {
    validate_all(ues, sys)?;
    let cube = |u: &UEProfile| u.alpha_n * u.load().powi(3);
    let l_max = ues.iter().map(slow_time).fold(f64::MIN, f64::max);
    let l_min = ues.iter().map(slow_time).fold(f64::MAX, f64::min);
    let t_n1 = ues.iter().map(fast_time).fold(f64::MIN, f64::max);

    let cd = ues
        .iter()
        .filter(|u| slow_time(u) > t_n1)
        .map(cube)
        .sum::<f64>()
        / t_n1.powi(3);
    let ab = ues
        .iter()
        .filter(|u| slow_time(u) == l_max)
        .map(|u| u.alpha_n * u.f_min.powi(3))
        .sum::<f64>()
        .min(cd);
    let bc = if l_min > t_n1 {
        ues.iter().map(cube).sum::<f64>() / l_min.powi(3)
    } else {
        cd
    }
    .clamp(ab, cd);

    let k = sys.kappa;
    let region = if k >= cd {
        Region::D
    } else if k <= ab {
        Region::A
    } else if k <= bc {
        Region::B
    } else {
        Region::C
    };
    Ok((region, KappaThresholds { ab, bc, cd }))
}
