//! Extreme rays of a pointed polyhedral cone `{x : G x >= 0}` by the double description
//! method.

use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix};

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    x: Vec<f64>,
    zeros: Bits,
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let n = linalg::norm(&x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    x
}

/// Greedily picks `dim` linearly independent rows of `g`.
fn independent_rows(g: &[Vec<f64>], dim: usize) -> Option<Vec<usize>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut picked = Vec::new();
    for (i, row) in g.iter().enumerate() {
        let mut r = row.clone();
        for b in &basis {
            let p = linalg::dot(&r, b);
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let n = linalg::norm(&r);
        if n > 1e-9 * linalg::norm(row).max(1e-300) {
            basis.push(r.into_iter().map(|v| v / n).collect());
            picked.push(i);
            if picked.len() == dim {
                return Some(picked);
            }
        }
    }
    None
}

/// Extreme rays of `{x in R^dim : g_i . x >= 0 for all rows}`, each scaled to unit
/// Euclidean norm. The cone must be pointed (the rows must span `R^dim`).
pub fn extreme_rays(g: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    for row in g {
        crate::error::check_len(dim, row.len())?;
    }
    let m = g.len();
    let rows: Vec<Vec<f64>> = g.iter().map(|r| normalized(r.clone())).collect();
    let Some(init) = independent_rows(&rows, dim) else {
        return Err(Error::InvalidArgument("cone is not pointed".into()));
    };
    let a0 = linalg::rows_to_matrix(&init.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>(), dim);
    let inv: RMatrix = a0
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("initial basis is singular".into()))?;
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let mut zeros = Bits::new(m);
            for (k, &row) in init.iter().enumerate() {
                if k != j {
                    zeros.set(row);
                }
            }
            Ray { x: normalized(inv.column(j).iter().copied().collect()), zeros }
        })
        .collect();
    let tol = 1e-9;
    for i in (0..m).filter(|i| !init.contains(i)) {
        let a = &rows[i];
        let vals: Vec<f64> = rays.iter().map(|r| linalg::dot(a, &r.x)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > tol).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -tol).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (k, r) in rays.iter().enumerate() {
            if vals[k] >= -tol {
                let mut zeros = r.zeros.clone();
                if vals[k] <= tol {
                    zeros.set(i);
                }
                next.push(Ray { x: r.x.clone(), zeros });
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == n || !r.zeros.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let x: Vec<f64> = rays[p]
                    .x
                    .iter()
                    .zip(&rays[n].x)
                    .map(|(xp, xn)| vals[p] * xn - vals[n] * xp)
                    .collect();
                let mut zeros = common;
                zeros.set(i);
                next.push(Ray { x: normalized(x), zeros });
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.x).collect())
}
