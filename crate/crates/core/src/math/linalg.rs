//! Small dense symmetric-matrix routines for curvature estimation.

use crate::data::UEDataset;

/// Dense symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// `scale · XᵀX` over the rows of `data`.
    pub fn gram(data: &UEDataset, scale: f64) -> Self {
        let d = data.dim();
        let mut m = Self::zeros(d);
        for i in 0..data.len() {
            let x = data.row(i);
            for r in 0..d {
                let xr = x[r];
                if xr == 0.0 {
                    continue;
                }
                let row = &mut m.a[r * d..(r + 1) * d];
                for c in r..d {
                    row[c] += xr * x[c];
                }
            }
        }
        for r in 0..d {
            for c in r..d {
                let v = m.a[r * d + c] * scale;
                m.a[r * d + c] = v;
                m.a[c * d + r] = v;
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.a[r * self.n..(r + 1) * self.n]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    /// Lower-triangular Cholesky factor, or `None` when the matrix is not
    /// numerically positive definite.
    pub fn cholesky(&self) -> Option<Cholesky> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        let max_diag = (0..n).map(|i| self.get(i, i)).fold(0.0, f64::max);
        let floor = max_diag * n as f64 * f64::EPSILON;
        for j in 0..n {
            let mut s = self.get(j, j);
            for k in 0..j {
                s -= l[j * n + k] * l[j * n + k];
            }
            if s <= floor {
                return None;
            }
            let ljj = s.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Some(Cholesky { n, l })
    }
}

pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Solve `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = b[i] - row.iter().zip(&b[..i]).map(|(l, x)| l * x).sum::<f64>();
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let s = b[i]
                - (i + 1..n)
                    .zip(&b[i + 1..])
                    .map(|(k, x)| self.l[k * n + i] * x)
                    .sum::<f64>();
            b[i] = s / self.l[i * n + i];
        }
    }
}

const MAX_ITERS: usize = 100_000;

fn start_vector(n: usize) -> Vec<f64> {
    // Non-symmetric start so no eigenvector is orthogonal to it by construction.
    let v: Vec<f64> = (0..n)
        .map(|i| 1.0 + (i as f64 + 1.0).sqrt() * 1e-3)
        .collect();
    normalized(v)
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    v
}

fn rayleigh(m: &SymMatrix, v: &[f64], scratch: &mut [f64]) -> f64 {
    m.mul_vec(v, scratch);
    v.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum()
}

/// Largest eigenvalue by power iteration; stops when successive Rayleigh
/// quotients agree to `tol` relative.
pub fn power_iteration(m: &SymMatrix, tol: f64) -> f64 {
    let n = m.dim();
    let mut v = start_vector(n);
    let mut w = vec![0.0; n];
    let mut lambda = rayleigh(m, &v, &mut w);
    for _ in 0..MAX_ITERS {
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return 0.0;
        }
        v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / nrm);
        let next = rayleigh(m, &v, &mut w);
        if (next - lambda).abs() <= tol * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Smallest eigenvalue by inverse iteration on the Cholesky factor.
/// Returns 0 for a matrix that is not positive definite.
pub fn inverse_iteration(m: &SymMatrix, tol: f64) -> f64 {
    let Some(chol) = m.cholesky() else {
        return 0.0;
    };
    let n = m.dim();
    let mut v = start_vector(n);
    let mut scratch = vec![0.0; n];
    let mut lambda = rayleigh(m, &v, &mut scratch);
    for _ in 0..MAX_ITERS {
        chol.solve_in_place(&mut v);
        v = normalized(v);
        let next = rayleigh(m, &v, &mut scratch);
        if (next - lambda).abs() <= tol * next.abs() {
            return next.max(0.0);
        }
        lambda = next;
    }
    lambda.max(0.0)
}
