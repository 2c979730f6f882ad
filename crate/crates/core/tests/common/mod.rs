//! Brute-force oracles that share no code with the LP engine.
#![allow(dead_code)]

use rand::Rng;

pub const ORACLE_TOL: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant by Laplace expansion along the first row.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| *v).collect()).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Generalized cross product: a vector orthogonal to the `k - 1` given vectors in `R^k`.
pub fn normal(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<f64>> =
                rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * det(&minor)
        })
        .collect()
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Facet normals of the cone over `points` (in `R^k`), oriented inward and unit length.
pub fn cone_facets(points: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    if k == 1 {
        return vec![vec![1.0]];
    }
    let mut facets: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(points.len(), k - 1) {
        let rows: Vec<Vec<f64>> = subset.iter().map(|&i| points[i].clone()).collect();
        let n = normal(&rows, k);
        let len = dot(&n, &n).sqrt();
        if len < 1e-9 {
            continue;
        }
        let n: Vec<f64> = n.iter().map(|v| v / len).collect();
        let vals: Vec<f64> = points.iter().map(|p| dot(&n, p)).collect();
        let oriented = if vals.iter().all(|&v| v >= -1e-10) {
            n
        } else if vals.iter().all(|&v| v <= 1e-10) {
            n.iter().map(|v| -v).collect()
        } else {
            continue;
        };
        if !facets.iter().any(|f| f.iter().zip(&oriented).all(|(a, b)| (a - b).abs() < 1e-9)) {
            facets.push(oriented);
        }
    }
    facets
}

/// Membership from the facet list: normalization plus every facet inequality.
pub fn oracle_contains(facets: &[Vec<f64>], unit: &[f64], x: &[f64]) -> bool {
    (dot(unit, x) - 1.0).abs() <= ORACLE_TOL && facets.iter().all(|f| dot(f, x) >= -ORACLE_TOL)
}

/// Smallest `|f . x|` over the facets, to skip points numerically on the boundary.
pub fn boundary_distance(facets: &[Vec<f64>], x: &[f64]) -> f64 {
    facets.iter().map(|f| dot(f, x).abs()).fold(f64::INFINITY, f64::min)
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Vertices of the effect polytope `{e : 0 <= e.v <= 1 for all vertices v}` by solving
/// every `k`-subset of the bounding hyperplanes.
pub fn effect_polytope_vertices(vertices: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let planes: Vec<(Vec<f64>, f64)> = vertices
        .iter()
        .flat_map(|v| [(v.clone(), 0.0), (v.clone(), 1.0)])
        .collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(planes.len(), k) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| planes[i].1).collect();
        let Some(e) = solve(a, b) else { continue };
        let feasible = vertices.iter().all(|v| {
            let p = dot(&e, v);
            (-1e-9..=1.0 + 1e-9).contains(&p)
        });
        if feasible && !out.iter().any(|o| o.iter().zip(&e).all(|(x, y)| (x - y).abs() < 1e-9)) {
            out.push(e);
        }
    }
    out
}

/// `max_e e(w1) - e(w2)` over the effect polytope; the pair is perfectly distinguishable
/// exactly when this reaches 1.
pub fn best_effect_gap(effect_vertices: &[Vec<f64>], w1: &[f64], w2: &[f64]) -> f64 {
    effect_vertices
        .iter()
        .map(|e| dot(e, w1) - dot(e, w2))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random convex combination of a few of the given points.
pub fn random_mixture<R: Rng>(points: &[Vec<f64>], rng: &mut R) -> Vec<f64> {
    let k = rng.random_range(1..=points.len().min(3));
    let mut idx: Vec<usize> = (0..points.len()).collect();
    for i in 0..k {
        let j = rng.random_range(i..points.len());
        idx.swap(i, j);
    }
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    let dim = points[0].len();
    let mut x = vec![0.0; dim];
    for (wi, &i) in w.iter().zip(&idx[..k]) {
        for d in 0..dim {
            x[d] += wi / total * points[i][d];
        }
    }
    x
}
