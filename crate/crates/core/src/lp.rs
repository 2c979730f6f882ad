//! Dense two-phase simplex solver.
//!
//! Every convex decision procedure in the crate reduces to an [`LpProblem`]. The solver
//! works on a dense tableau: Bland's rule picks the entering column, a Harris ratio test
//! picks the leaving row (falling back to Bland's smallest index on long degenerate runs),
//! and the basis is periodically reinverted from the original data. Infeasibility is only
//! reported after the phase-one dual vector has been checked as a Farkas certificate.

use crate::error::{Error, Result};

/// Shared feasibility tolerance for the whole crate.
pub const FEAS_TOL: f64 = 1e-9;

/// Tolerance used when checking Farkas certificates of infeasibility.
pub const CERT_TOL: f64 = 1e-7;

/// Pivot cap after which the solver gives up with [`Error::NumericalFailure`].
pub const MAX_PIVOTS: usize = 1_000_000;

const PIVOT_TOL: f64 = 1e-9;

const HARRIS_TOL: f64 = 1e-11;

/// Consecutive degenerate pivots tolerated before falling back to Bland's rule.
const DEGENERATE_RUN_LIMIT: usize = 50;

/// A linear program: maximize `objective · x` subject to
/// `eq_matrix · x = eq_rhs`, `ge_matrix · x >= ge_rhs` and per-variable bounds.
///
/// Variables without bounds are free.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ge_matrix: Vec<Vec<f64>>,
    pub ge_rhs: Vec<f64>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub solution: Option<Vec<f64>>,
    /// `-inf` when infeasible, `+inf` when unbounded.
    pub objective_value: f64,
}

impl LpResult {
    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }
}

impl LpProblem {
    /// A feasibility problem over `num_vars` free variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            objective: vec![0.0; num_vars],
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            ge_matrix: Vec::new(),
            ge_rhs: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) {
        self.ge_matrix.push(row);
        self.ge_rhs.push(rhs);
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.ge_matrix.push(row.into_iter().map(|v| -v).collect());
        self.ge_rhs.push(-rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Constrain every variable to be nonnegative.
    pub fn nonnegative(mut self) -> Self {
        self.lower.iter_mut().for_each(|l| *l = Some(0.0));
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let check = |expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, got })
            }
        };
        check(self.eq_matrix.len(), self.eq_rhs.len())?;
        check(self.ge_matrix.len(), self.ge_rhs.len())?;
        check(n, self.lower.len())?;
        check(n, self.upper.len())?;
        for row in self.eq_matrix.iter().chain(self.ge_matrix.iter()) {
            check(n, row.len())?;
        }
        let finite = self
            .objective
            .iter()
            .chain(self.eq_rhs.iter())
            .chain(self.ge_rhs.iter())
            .chain(self.eq_matrix.iter().flatten())
            .chain(self.ge_matrix.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite LP coefficient".into()));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let eq = self
            .eq_matrix
            .iter()
            .zip(&self.eq_rhs)
            .map(|(row, b)| (dot(row) - b).abs());
        let ge = self
            .ge_matrix
            .iter()
            .zip(&self.ge_rhs)
            .map(|(row, h)| (h - dot(row)).max(0.0));
        let lo = self
            .lower
            .iter()
            .zip(x)
            .filter_map(|(l, v)| l.map(|l| (l - v).max(0.0)));
        let hi = self
            .upper
            .iter()
            .zip(x)
            .filter_map(|(u, v)| u.map(|u| (v - u).max(0.0)));
        eq.chain(ge).chain(lo).chain(hi).fold(0.0, f64::max)
    }
}

/// How an original variable is expressed through nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + sign * col
    Shift { col: usize, offset: f64, sign: f64 },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

/// Standard form: `a x = b`, `x >= 0`, minimize `cost · x`.
struct StandardForm {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    maps: Vec<VarMap>,
}

fn to_standard_form(p: &LpProblem) -> Option<StandardForm> {
    let n = p.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        match (p.lower[j], p.upper[j]) {
            (Some(l), Some(u)) => {
                if u < l - FEAS_TOL {
                    return None;
                }
                maps.push(VarMap::Shift { col: ncols, offset: l, sign: 1.0 });
                upper_rows.push((ncols, (u - l).max(0.0)));
                ncols += 1;
            }
            (Some(l), None) => {
                maps.push(VarMap::Shift { col: ncols, offset: l, sign: 1.0 });
                ncols += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap::Shift { col: ncols, offset: u, sign: -1.0 });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
    }
    let n_structural = ncols;
    let n_slack = p.ge_matrix.len() + upper_rows.len();
    let width = n_structural + n_slack;

    let translate = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; width];
        let mut rhs = rhs;
        for (j, &coef) in row.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset, sign } => {
                    out[col] += coef * sign;
                    rhs -= coef * offset;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += coef;
                    out[neg] -= coef;
                }
            }
        }
        (out, rhs)
    };

    let mut a = Vec::new();
    let mut b = Vec::new();
    for (row, &rhs) in p.eq_matrix.iter().zip(&p.eq_rhs) {
        let (r, v) = translate(row, rhs);
        a.push(r);
        b.push(v);
    }
    let mut slack = n_structural;
    for (row, &rhs) in p.ge_matrix.iter().zip(&p.ge_rhs) {
        let (mut r, v) = translate(row, rhs);
        r[slack] = -1.0;
        slack += 1;
        a.push(r);
        b.push(v);
    }
    for &(col, bound) in &upper_rows {
        let mut r = vec![0.0; width];
        r[col] = 1.0;
        r[slack] = 1.0;
        slack += 1;
        a.push(r);
        b.push(bound);
    }

    // maximize c·x  ==  minimize -c·x
    let (cost_row, _) = translate(&p.objective, 0.0);
    let cost = cost_row.into_iter().map(|v| -v).collect();
    Some(StandardForm { a, b, cost, maps })
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// rows x (cols + 1); last column is the rhs.
    t: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    /// The initial tableau, kept for reinversion.
    orig: Vec<f64>,
}

/// Pivots between reinversions of the basis.
const REFACTOR_EVERY: usize = 50;

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.t[r * w + j];
                if v != 0.0 {
                    self.t[i * w + j] -= f * v;
                }
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Rebuilds the tableau as `B^-1 [A | b]` from the initial data to shed accumulated
    /// rounding. Leaves the tableau unchanged if the basis matrix is singular.
    fn refactor(&mut self) {
        let (m, w) = (self.rows, self.cols + 1);
        // Gauss-Jordan on [B | A b] with partial pivoting.
        let bw = m + w;
        let mut aug = vec![0.0; m * bw];
        for i in 0..m {
            for k in 0..m {
                aug[i * bw + k] = self.orig[i * w + self.basis[k]];
            }
            aug[i * bw + m..(i + 1) * bw].copy_from_slice(&self.orig[i * w..(i + 1) * w]);
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&i, &j| aug[i * bw + col].abs().total_cmp(&aug[j * bw + col].abs()))
                .expect("nonempty range");
            let p = aug[piv * bw + col];
            if p.abs() < PIVOT_TOL {
                return;
            }
            if piv != col {
                for j in 0..bw {
                    aug.swap(piv * bw + j, col * bw + j);
                }
            }
            for j in 0..bw {
                aug[col * bw + j] /= p;
            }
            for i in 0..m {
                let f = aug[i * bw + col];
                if i == col || f == 0.0 {
                    continue;
                }
                for j in col..bw {
                    aug[i * bw + j] -= f * aug[col * bw + j];
                }
            }
        }
        if aug.iter().any(|v| !v.is_finite()) {
            return;
        }
        for i in 0..m {
            self.t[i * w..(i + 1) * w].copy_from_slice(&aug[i * bw + m..(i + 1) * bw]);
            for k in 0..m {
                self.t[k * w + self.basis[i]] = if k == i { 1.0 } else { 0.0 };
            }
        }
    }

    /// Reduced costs `cost_j - c_B B^-1 A_j` for every column.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                *dj -= cb * self.at(i, j);
            }
        }
        d
    }

    /// Runs Bland's-rule simplex minimizing `cost`. Columns with `allowed[j] == false`
    /// never enter. Returns `false` if the problem is unbounded.
    fn minimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        let mut d = self.reduced_costs(cost);
        let mut fresh = true;
        let mut since_refactor = 0;
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded {MAX_PIVOTS} pivots"
                )));
            }
            if since_refactor >= REFACTOR_EVERY {
                self.refactor();
                d = self.reduced_costs(cost);
                fresh = true;
                since_refactor = 0;
            }
            let entering = (0..self.cols).find(|&j| allowed[j] && d[j] < -FEAS_TOL);
            let Some(c) = entering else {
                if fresh {
                    return Ok(true);
                }
                // Confirm optimality on a freshly inverted basis.
                self.refactor();
                d = self.reduced_costs(cost);
                fresh = true;
                since_refactor = 0;
                continue;
            };
            fresh = false;
            since_refactor += 1;
            // Harris ratio test: bound the step with a small tolerance, then take the
            // largest pivot among rows within that bound. Long degenerate runs switch to
            // Bland's smallest-index choice, which cannot cycle.
            let slack = if bland { 0.0 } else { HARRIS_TOL };
            let mut bound = f64::INFINITY;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    bound = bound.min((self.rhs(i).max(0.0) + slack) / a);
                }
            }
            let bound = if bland { bound + 1e-12 * (1.0 + bound) } else { bound };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL && self.rhs(i).max(0.0) / a <= bound {
                    let keep = |li: usize, la: f64| {
                        if bland {
                            self.basis[li] < self.basis[i]
                        } else {
                            la > a || (la == a && self.basis[li] < self.basis[i])
                        }
                    };
                    leave = match leave {
                        Some((li, la)) if keep(li, la) => Some((li, la)),
                        _ => Some((i, a)),
                    };
                }
            }
            if let Some((r, a)) = leave {
                if self.rhs(r).max(0.0) / a <= 1e-12 {
                    degenerate_run += 1;
                    bland |= degenerate_run > DEGENERATE_RUN_LIMIT;
                } else {
                    degenerate_run = 0;
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, c);
            let dc = d[c];
            if dc != 0.0 {
                for (j, dj) in d.iter_mut().enumerate() {
                    let v = self.at(r, j);
                    if v != 0.0 {
                        *dj -= dc * v;
                    }
                }
            }
            d[c] = 0.0;
        }
    }
}

/// Solve `problem` with the two-phase simplex method.
pub fn solve(problem: &LpProblem) -> Result<LpResult> {
    problem.validate()?;
    let infeasible = LpResult {
        status: LpStatus::Infeasible,
        solution: None,
        objective_value: f64::NEG_INFINITY,
    };
    let Some(sf) = to_standard_form(problem) else {
        return Ok(infeasible);
    };
    let m = sf.a.len();
    let n = sf.cost.len();

    // Rows with negative rhs are negated so artificials start feasible.
    let mut signs = vec![1.0; m];
    let cols = n + m;
    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    for i in 0..m {
        let s = if sf.b[i] < 0.0 { -1.0 } else { 1.0 };
        signs[i] = s;
        for j in 0..n {
            t[i * w + j] = s * sf.a[i][j];
        }
        t[i * w + n + i] = 1.0;
        t[i * w + cols] = s * sf.b[i];
    }
    let orig = t.clone();
    let mut tab = Tableau { rows: m, cols, t, basis: (n..n + m).collect(), pivots: 0, orig };

    // Phase one.
    let mut phase1_cost = vec![0.0; cols];
    phase1_cost[n..].iter_mut().for_each(|c| *c = 1.0);
    let all = vec![true; cols];
    tab.minimize(&phase1_cost, &all)?;
    let phase1_obj: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i))
        .sum();
    if phase1_obj > FEAS_TOL {
        verify_farkas(&tab, &phase1_cost, &sf, &signs, n)?;
        return Ok(infeasible);
    }

    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.at(i, j).abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase two.
    let mut cost = sf.cost.clone();
    cost.extend(std::iter::repeat_n(0.0, m));
    let mut allowed = vec![true; cols];
    allowed[n..].iter_mut().for_each(|a| *a = false);
    if !tab.minimize(&cost, &allowed)? {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            solution: None,
            objective_value: f64::INFINITY,
        });
    }

    let mut xs = vec![0.0; n];
    for i in 0..m {
        let b = tab.basis[i];
        if b < n {
            xs[b] = tab.rhs(i).max(0.0);
        }
    }
    let x: Vec<f64> = sf
        .maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, offset, sign } => offset + sign * xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect();
    let viol = problem.max_violation(&x);
    if viol > FEAS_TOL {
        return Err(Error::NumericalFailure(format!(
            "optimal point violates constraints by {viol:e}"
        )));
    }
    let objective_value = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpResult { status: LpStatus::Optimal, solution: Some(x), objective_value })
}

/// Checks the phase-one dual vector as a Farkas certificate for `a x = b, x >= 0`:
/// some `z` with `a^T z >= 0` and `b · z < 0`.
fn verify_farkas(
    tab: &Tableau,
    phase1_cost: &[f64],
    sf: &StandardForm,
    signs: &[f64],
    n: usize,
) -> Result<()> {
    let m = sf.a.len();
    let d = tab.reduced_costs(phase1_cost);
    // y_i = 1 - d_{artificial i} on the sign-normalized rows; z = -y on the original rows.
    let mut z: Vec<f64> = (0..m).map(|i| -(1.0 - d[n + i]) * signs[i]).collect();
    let scale = z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::NumericalFailure("empty Farkas certificate".into()));
    }
    z.iter_mut().for_each(|v| *v /= scale);
    let min_col = (0..n)
        .map(|j| (0..m).map(|i| sf.a[i][j] * z[i]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let bz: f64 = sf.b.iter().zip(&z).map(|(b, z)| b * z).sum();
    if min_col >= -CERT_TOL && bz < 0.0 {
        Ok(())
    } else {
        Err(Error::NumericalFailure(format!(
            "infeasibility certificate failed: min(A^T z) = {min_col:e}, b.z = {bz:e}"
        )))
    }
}

/// Is `target` a convex combination of `points`? Returns the weights if so.
pub fn convex_weights(points: &[Vec<f64>], target: &[f64]) -> Result<Option<Vec<f64>>> {
    let k = points.len();
    let mut lp = LpProblem::new(k).nonnegative();
    for (d, &t) in target.iter().enumerate() {
        let row = points
            .iter()
            .map(|p| {
                if p.len() != target.len() {
                    Err(Error::DimensionMismatch { expected: target.len(), got: p.len() })
                } else {
                    Ok(p[d])
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        lp.add_eq(row, t);
    }
    lp.add_eq(vec![1.0; k], 1.0);
    let res = solve(&lp)?;
    Ok(res.solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_distinguishability_problem_resolves() {
        // Two vertices of a random 3-polytope: the pair LP has redundant equalities and
        // a highly degenerate vertex, which once drove the tableau into huge pivots.
        let v = [
            [1.0, -0.39224254652951807, 0.7814155039292698, -0.8930025366802381],
            [1.0, -0.7047281984369591, -0.4044996134016188, -0.9020505362011861],
            [1.0, -0.09305694236805984, -0.9601452588811421, -0.5829430446399502],
            [1.0, 0.6218434931372223, 0.0717568167114524, 0.5174943715646418],
            [1.0, -0.021470081608266245, -0.08263711584584632, -0.7558121806370965],
            [1.0, 0.9090429547764542, 0.18982379433930952, 0.6790634444347425],
            [1.0, -0.8677343251277922, 0.8592419743131541, 0.6645515058586517],
            [1.0, -0.24073370330303456, -0.8983098547950528, -0.902182636349171],
        ];
        let (w1, w2) = (v[4], v[5]);
        let block = |k: usize, row: &[f64]| {
            let mut r = vec![0.0; 8];
            r[4 * k..4 * k + 4].copy_from_slice(row);
            r
        };
        let mut lp = LpProblem::new(8);
        for d in 0..4 {
            let mut r = vec![0.0; 8];
            r[d] = 1.0;
            r[4 + d] = 1.0;
            lp.add_eq(r, if d == 0 { 1.0 } else { 0.0 });
        }
        lp.add_eq(block(0, &w1), 1.0);
        lp.add_eq(block(0, &w2), 0.0);
        lp.add_eq(block(1, &w1), 0.0);
        lp.add_eq(block(1, &w2), 1.0);
        for k in 0..2 {
            for row in &v {
                lp.add_ge(block(k, row), 0.0);
            }
        }
        let r = solve(&lp).unwrap();
        if let Some(x) = &r.solution {
            assert!(lp.max_violation(x) <= FEAS_TOL);
        }
    }

    #[test]
    fn single_variable_box() {
        let mut lp = LpProblem::new(1).maximize(vec![1.0]);
        lp.set_bounds(0, Some(0.0), Some(1.0));
        let r = solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.solution.unwrap()[0] - 1.0).abs() < 1e-12);
        assert!((r.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn barycentric_feasibility() {
        let simplex = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = convex_weights(&simplex, &[0.25, 0.25]).unwrap().unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(w.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn outside_hull_is_infeasible() {
        // Separating functional x + y <= 1 holds on the simplex but not at the target.
        let simplex = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let target = [0.8, 0.7];
        assert!(simplex.iter().all(|p| p[0] + p[1] <= 1.0));
        assert!(target[0] + target[1] > 1.0);
        assert!(convex_weights(&simplex, &target).unwrap().is_none());
    }

    #[test]
    fn unbounded_detected() {
        let lp = LpProblem::new(2).maximize(vec![1.0, 1.0]).nonnegative();
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // maximize -x0 + x1 with x0 free, x0 >= -3 via a row, x1 <= 2.
        let mut lp = LpProblem::new(2).maximize(vec![-1.0, 1.0]);
        lp.add_ge(vec![1.0, 0.0], -3.0);
        lp.set_bounds(1, None, Some(2.0));
        lp.add_ge(vec![0.0, 1.0], -10.0);
        let r = solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective_value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn crossed_bounds_infeasible() {
        let mut lp = LpProblem::new(1);
        lp.set_bounds(0, Some(1.0), Some(0.0));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut lp = LpProblem::new(2);
        lp.add_eq(vec![1.0], 1.0);
        assert!(matches!(solve(&lp), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_redundant_equalities() {
        let mut lp = LpProblem::new(3).maximize(vec![1.0, 2.0, 0.0]).nonnegative();
        lp.add_eq(vec![1.0, 1.0, 1.0], 1.0);
        lp.add_eq(vec![2.0, 2.0, 2.0], 2.0);
        let r = solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective_value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_solves_identical() {
        let mut lp = LpProblem::new(3).maximize(vec![3.0, -1.0, 2.0]).nonnegative();
        lp.add_le(vec![1.0, 1.0, 1.0], 4.0);
        lp.add_le(vec![1.0, 0.0, 3.0], 6.0);
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
    }
}
