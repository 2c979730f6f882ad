//! State spaces, effects, measurements and linear maps between them.
//!
//! A [`StateSpace`] is a compact convex set of normalized states living in a real vector
//! space of dimension `ambient_dim`, together with its normalization functional `u`. Three
//! representations are supported:
//!
//! * polytopic: the convex hull of an explicit, minimal vertex list;
//! * quantum: `N x N` density matrices in a fixed orthonormal Hermitian basis;
//! * ball: vectors `(1, r)` with `|r| <= 1`.
//!
//! Effects are the full dual interval (every functional with values in `[0, 1]` on states).
//!
//! Quantum coordinates use the Hilbert-Schmidt orthonormal basis made of the `N` diagonal
//! units `|i><i|`, followed for each `i < j` (lexicographic) by `(|i><j| + |j><i|)/sqrt2`
//! and `(i|i><j| - i|j><i|)/sqrt2`. Coordinates are `x_k = tr(B_k rho)`, so effects act by
//! the plain dot product.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, c, CMatrix, RMatrix};
use crate::lp::{self, FEAS_TOL};

/// Relative cutoff below which a linear map counts as singular.
pub const SINGULAR_REL_TOL: f64 = 1e-10;

/// Number of sampled pure states used by the one-sided checks on non-polytopic spaces.
pub const SAMPLE_COUNT: usize = 1000;

/// Seed used by [`are_equivalent`] and the sampled transformation checks.
pub const DEFAULT_SAMPLE_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Polytopic,
    Quantum,
    Ball,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Polytopic => "polytopic",
            SpaceKind::Quantum => "quantum",
            SpaceKind::Ball => "ball",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Polytopic { vertices: Vec<Vec<f64>> },
    Quantum { n: usize },
    Ball { d: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    repr: Repr,
    ambient_dim: usize,
    unit: Vec<f64>,
}

/// A linear functional in the dual coordinates of a state space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect(pub Vec<f64>);

impl Effect {
    pub fn eval(&self, state: &[f64]) -> f64 {
        linalg::dot(&self.0, state)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }
}

/// A finite list of effects summing to the unit functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    effects: Vec<Effect>,
}

impl Measurement {
    pub fn new(space: &StateSpace, effects: Vec<Effect>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidArgument("measurement needs at least one effect".into()));
        }
        let k = space.ambient_dim();
        let mut total = vec![0.0; k];
        for e in &effects {
            check_len(k, e.0.len())?;
            if !space.is_effect(e)? {
                return Err(Error::InvalidArgument("component is not a valid effect".into()));
            }
            total.iter_mut().zip(&e.0).for_each(|(t, v)| *t += v);
        }
        if linalg::sup_dist(&total, space.unit()) > FEAS_TOL {
            return Err(Error::InvalidArgument("effects do not sum to the unit functional".into()));
        }
        Ok(Measurement { effects })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn probabilities(&self, state: &[f64]) -> Vec<f64> {
        self.effects.iter().map(|e| e.eval(state)).collect()
    }
}

/// A real matrix mapping one coordinate system to another (`out_dim x in_dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: RMatrix,
}

impl LinearMap {
    pub fn new(matrix: RMatrix) -> Self {
        LinearMap { matrix }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in rows {
            check_len(ncols, r.len())?;
        }
        Ok(LinearMap { matrix: linalg::rows_to_matrix(rows, ncols) })
    }

    pub fn identity(n: usize) -> Self {
        LinearMap { matrix: RMatrix::identity(n, n) }
    }

    pub fn in_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.matrix, x)
    }

    pub fn compose(&self, inner: &LinearMap) -> LinearMap {
        LinearMap { matrix: &self.matrix * &inner.matrix }
    }

    /// Square and smallest singular value at least `1e-10` times the largest.
    pub fn is_invertible(&self) -> bool {
        if !self.matrix.is_square() || self.matrix.nrows() == 0 {
            return false;
        }
        let s = linalg::singular_values(&self.matrix);
        let top = s[0];
        top > 0.0 && s[s.len() - 1] >= SINGULAR_REL_TOL * top
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        if !self.is_invertible() {
            return Err(Error::SingularMap);
        }
        self.matrix
            .clone()
            .try_inverse()
            .map(LinearMap::new)
            .ok_or(Error::SingularMap)
    }
}

// ---------------------------------------------------------------------------
// Hermitian coordinates

/// The fixed orthonormal Hermitian basis of `N x N` matrices.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut m = CMatrix::zeros(n, n);
        m[(i, i)] = c(1.0, 0.0);
        basis.push(m);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut re = CMatrix::zeros(n, n);
            re[(i, j)] = c(s, 0.0);
            re[(j, i)] = c(s, 0.0);
            basis.push(re);
            let mut im = CMatrix::zeros(n, n);
            im[(i, j)] = c(0.0, s);
            im[(j, i)] = c(0.0, -s);
            basis.push(im);
        }
    }
    basis
}

/// Rebuilds the Hermitian matrix with coordinates `x` in the fixed basis.
pub fn coords_to_hermitian(x: &[f64], n: usize) -> Result<CMatrix> {
    check_len(n * n, x.len())?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(x[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (x[k], x[k + 1]);
            m[(i, j)] = c(s * a, s * b);
            m[(j, i)] = c(s * a, -s * b);
            k += 2;
        }
    }
    Ok(m)
}

/// Coordinates `tr(B_k M)` of a Hermitian matrix in the fixed basis.
pub fn hermitian_to_coords(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut x = Vec::with_capacity(n * n);
    for i in 0..n {
        x.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            // tr(B m) for B = (E_ij + E_ji)/sqrt2 and (iE_ij - iE_ji)/sqrt2, with
            // m Hermitian.
            let mij = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            x.push(s * mij.re);
            x.push(s * mij.im);
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Constructors

impl StateSpace {
    /// A polytopic space from an explicit vertex list. Every vertex must be normalized,
    /// extremal, and together they must span the ambient space.
    pub fn polytopic(vertices: Vec<Vec<f64>>, unit: Vec<f64>) -> Result<Self> {
        let space = Self::polytopic_unchecked(vertices, unit)?;
        let vs = space.vertices().unwrap_or_default();
        for i in 0..vs.len() {
            let others: Vec<Vec<f64>> = vs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if !others.is_empty() && lp::convex_weights(&others, &vs[i])?.is_some() {
                return Err(Error::InvalidArgument(format!("vertex {i} is not extremal")));
            }
        }
        Ok(space)
    }

    /// Like [`StateSpace::polytopic`] but silently drops duplicate and non-extremal points.
    pub fn polytopic_hull(points: Vec<Vec<f64>>, unit: Vec<f64>) -> Result<Self> {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for p in points {
            if !pts.iter().any(|q| linalg::sup_dist(q, &p) <= 1e-8) {
                pts.push(p);
            }
        }
        let mut keep = Vec::new();
        for i in 0..pts.len() {
            let others: Vec<Vec<f64>> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if others.is_empty() || lp::convex_weights(&others, &pts[i])?.is_none() {
                keep.push(pts[i].clone());
            }
        }
        Self::polytopic_unchecked(keep, unit)
    }

    pub(crate) fn polytopic_unchecked(vertices: Vec<Vec<f64>>, unit: Vec<f64>) -> Result<Self> {
        let k = unit.len();
        if k == 0 || vertices.is_empty() {
            return Err(Error::InvalidArgument("empty polytopic space".into()));
        }
        for v in &vertices {
            check_len(k, v.len())?;
            if (linalg::dot(&unit, v) - 1.0).abs() > FEAS_TOL {
                return Err(Error::InvalidArgument("vertex is not normalized".into()));
            }
        }
        let m = linalg::rows_to_matrix(&vertices, k);
        if linalg::rank(&m, 1e-10) != k {
            return Err(Error::InvalidArgument(
                "vertices do not span the ambient space".into(),
            ));
        }
        Ok(StateSpace { repr: Repr::Polytopic { vertices }, ambient_dim: k, unit })
    }

    /// Classical probability simplex on `n` outcomes.
    pub fn classical(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("classical space needs N >= 1".into()));
        }
        let vertices = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::polytopic_unchecked(vertices, vec![1.0; n])
    }

    /// Density matrices of an `n`-level system.
    pub fn quantum(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("quantum space needs N >= 1".into()));
        }
        let unit = hermitian_to_coords(&linalg::identity(n));
        Ok(StateSpace { repr: Repr::Quantum { n }, ambient_dim: n * n, unit })
    }

    /// The square state space with four pure states.
    pub fn gbit() -> Self {
        let vertices = vec![
            vec![-1.0, -1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0],
        ];
        Self::polytopic_unchecked(vertices, vec![0.0, 0.0, 1.0]).expect("gbit is well formed")
    }

    /// Euclidean unit ball of dimension `d`, embedded as `(1, r)`.
    pub fn ball(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument("ball needs d >= 1".into()));
        }
        let mut unit = vec![0.0; d + 1];
        unit[0] = 1.0;
        Ok(StateSpace { repr: Repr::Ball { d }, ambient_dim: d + 1, unit })
    }

    pub fn kind(&self) -> SpaceKind {
        match self.repr {
            Repr::Polytopic { .. } => SpaceKind::Polytopic,
            Repr::Quantum { .. } => SpaceKind::Quantum,
            Repr::Ball { .. } => SpaceKind::Ball,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn unit_effect(&self) -> Effect {
        Effect(self.unit.clone())
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        match &self.repr {
            Repr::Polytopic { vertices } => Some(vertices),
            _ => None,
        }
    }

    pub fn hilbert_dim(&self) -> Option<usize> {
        match self.repr {
            Repr::Quantum { n } => Some(n),
            _ => None,
        }
    }

    pub fn ball_dim(&self) -> Option<usize> {
        match self.repr {
            Repr::Ball { d } => Some(d),
            _ => None,
        }
    }

    // -----------------------------------------------------------------------
    // Decision procedures

    pub fn contains_state(&self, x: &[f64]) -> Result<bool> {
        check_len(self.ambient_dim, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        match &self.repr {
            Repr::Polytopic { vertices } => {
                if (linalg::dot(&self.unit, x) - 1.0).abs() > FEAS_TOL {
                    return Ok(false);
                }
                Ok(lp::convex_weights(vertices, x)?.is_some())
            }
            Repr::Quantum { n } => {
                let rho = coords_to_hermitian(x, *n)?;
                let tr = linalg::trace(&rho).re;
                Ok((tr - 1.0).abs() <= FEAS_TOL && linalg::min_eigenvalue(&rho) >= -FEAS_TOL)
            }
            Repr::Ball { .. } => {
                Ok((x[0] - 1.0).abs() <= FEAS_TOL && linalg::norm(&x[1..]) <= 1.0 + FEAS_TOL)
            }
        }
    }

    pub fn is_effect(&self, e: &Effect) -> Result<bool> {
        check_len(self.ambient_dim, e.0.len())?;
        match &self.repr {
            Repr::Polytopic { vertices } => Ok(vertices.iter().all(|v| {
                let p = e.eval(v);
                (-FEAS_TOL..=1.0 + FEAS_TOL).contains(&p)
            })),
            Repr::Quantum { n } => {
                let m = coords_to_hermitian(&e.0, *n)?;
                let ev = linalg::hermitian_eigenvalues(&m);
                Ok(ev[0] >= -FEAS_TOL && ev[ev.len() - 1] <= 1.0 + FEAS_TOL)
            }
            Repr::Ball { .. } => {
                let c0 = e.0[0];
                let s = linalg::norm(&e.0[1..]);
                Ok(c0 - s >= -FEAS_TOL && c0 + s <= 1.0 + FEAS_TOL)
            }
        }
    }

    pub fn is_pure(&self, omega: &[f64]) -> Result<bool> {
        if !self.contains_state(omega)? {
            return Err(Error::NotAState);
        }
        match &self.repr {
            Repr::Polytopic { vertices } => {
                let Some(idx) = vertices
                    .iter()
                    .position(|v| linalg::sup_dist(v, omega) <= FEAS_TOL)
                else {
                    return Ok(false);
                };
                let others: Vec<Vec<f64>> = vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != idx)
                    .map(|(_, v)| v.clone())
                    .collect();
                if others.is_empty() {
                    return Ok(true);
                }
                Ok(lp::convex_weights(&others, omega)?.is_none())
            }
            Repr::Quantum { n } => {
                let rho = coords_to_hermitian(omega, *n)?;
                Ok(linalg::max_eigenvalue(&rho) >= 1.0 - FEAS_TOL)
            }
            Repr::Ball { .. } => Ok(linalg::norm(&omega[1..]) >= 1.0 - FEAS_TOL),
        }
    }

    fn check_square_map(&self, t: &LinearMap) -> Result<()> {
        check_len(self.ambient_dim, t.in_dim())?;
        check_len(self.ambient_dim, t.out_dim())
    }

    fn preserves_unit(&self, t: &LinearMap) -> bool {
        // u . T == u
        let ut: Vec<f64> = (0..t.in_dim())
            .map(|j| (0..t.out_dim()).map(|i| self.unit[i] * t.matrix[(i, j)]).sum())
            .collect();
        linalg::sup_dist(&ut, &self.unit) <= FEAS_TOL
    }

    /// Does `t` map every normalized state to a normalized state?
    ///
    /// For quantum spaces with `N >= 3` this is a seeded sampled check over pure states and
    /// can only refute; complete positivity is never tested.
    pub fn is_transformation(&self, t: &LinearMap) -> Result<bool> {
        self.check_square_map(t)?;
        match &self.repr {
            Repr::Polytopic { vertices } => {
                for v in vertices {
                    if !self.contains_state(&t.apply(v))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Repr::Ball { .. } => {
                if !self.preserves_unit(t) {
                    return Ok(false);
                }
                let (shift, block) = affine_parts(t);
                Ok(max_norm_on_ball(&shift, &block) <= 1.0 + FEAS_TOL)
            }
            Repr::Quantum { n } => {
                if !self.preserves_unit(t) {
                    return Ok(false);
                }
                if *n == 1 {
                    return Ok((t.matrix[(0, 0)] - 1.0).abs() <= FEAS_TOL);
                }
                if *n == 2 {
                    let ball = StateSpace::ball(3)?;
                    return ball.is_transformation(&qubit_to_ball(t)?);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SAMPLE_SEED);
                let mut probes = basis_probe_states(*n);
                probes.extend((0..SAMPLE_COUNT).map(|_| random_pure_coords(*n, &mut rng)));
                for p in probes {
                    if !self.contains_state(&t.apply(&p))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Is `t` an invertible symmetry of the state space (`T(Omega) = Omega`)?
    pub fn is_reversible_transformation(&self, t: &LinearMap) -> Result<bool> {
        self.check_square_map(t)?;
        if !t.is_invertible() {
            return Ok(false);
        }
        match &self.repr {
            Repr::Polytopic { vertices } => {
                let mut used = vec![false; vertices.len()];
                for v in vertices {
                    let image = t.apply(v);
                    let hit = vertices
                        .iter()
                        .enumerate()
                        .position(|(j, w)| !used[j] && linalg::sup_dist(w, &image) <= FEAS_TOL);
                    match hit {
                        Some(j) => used[j] = true,
                        None => return Ok(false),
                    }
                }
                Ok(true)
            }
            Repr::Ball { d } => {
                if !self.preserves_unit(t) {
                    return Ok(false);
                }
                let (shift, block) = affine_parts(t);
                if linalg::norm(&shift) > FEAS_TOL {
                    return Ok(false);
                }
                let gram = block.transpose() * &block;
                let dev = (gram - RMatrix::identity(*d, *d)).abs().max();
                Ok(dev <= FEAS_TOL)
            }
            Repr::Quantum { n } => {
                if *n == 2 {
                    let ball = StateSpace::ball(3)?;
                    return ball.is_reversible_transformation(&qubit_to_ball(t)?);
                }
                Ok(self.is_transformation(t)? && self.is_transformation(&t.inverse()?)?)
            }
        }
    }

    /// Pure states used as probes by the sampled checks: vertices for polytopes, seeded
    /// random pure states otherwise.
    pub fn probe_pure_states(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match &self.repr {
            Repr::Polytopic { vertices } => vertices.clone(),
            Repr::Quantum { n } => {
                let mut probes = basis_probe_states(*n);
                probes.extend((0..count).map(|_| random_pure_coords(*n, &mut rng)));
                probes
            }
            Repr::Ball { d } => {
                let mut probes = Vec::with_capacity(count + 2 * d);
                for i in 0..*d {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; d + 1];
                        v[0] = 1.0;
                        v[i + 1] = s;
                        probes.push(v);
                    }
                }
                for _ in 0..count {
                    let mut v = vec![1.0];
                    v.extend(random_unit_vector(*d, &mut rng));
                    probes.push(v);
                }
                probes
            }
        }
    }
}

/// `T = [[1, 0], [shift, block]]` for maps on ball coordinates.
fn affine_parts(t: &LinearMap) -> (Vec<f64>, RMatrix) {
    let k = t.matrix.nrows();
    let shift = (1..k).map(|i| t.matrix[(i, 0)]).collect();
    let block = t.matrix.view((1, 1), (k - 1, k - 1)).into_owned();
    (shift, block)
}

/// Conjugates a map on qubit Hermitian coordinates into Bloch-ball coordinates.
fn qubit_to_ball(t: &LinearMap) -> Result<LinearMap> {
    let l = crate::bloch::ball_to_qubit_map();
    let l_inv = l.inverse()?;
    Ok(l_inv.compose(t).compose(&l))
}

/// `max_{|r| <= 1} |shift + block r|`, solved exactly through the secular equation.
pub(crate) fn max_norm_on_ball(shift: &[f64], block: &RMatrix) -> f64 {
    let d = block.ncols();
    let t = DVector::from_column_slice(shift);
    let a = block.transpose() * block;
    let b = block.transpose() * &t;
    let eig = a.clone().symmetric_eigen();
    let evals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let q = eig.eigenvectors;
    let beta: Vec<f64> = (0..d).map(|i| q.column(i).dot(&b)).collect();
    let a_max = evals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let value = |r: &DVector<f64>| (&t + block * r).norm();
    if d == 0 {
        return t.norm();
    }
    let scale = a_max.abs().max(1.0);
    let top: Vec<usize> = (0..d).filter(|&i| evals[i] >= a_max - 1e-12 * scale).collect();
    let top_weight: f64 = top.iter().map(|&i| beta[i] * beta[i]).sum();
    let r_at = |lambda: f64, skip_top: bool| -> DVector<f64> {
        let mut r = DVector::zeros(d);
        for i in 0..d {
            if skip_top && top.contains(&i) {
                continue;
            }
            let coef = beta[i] / (lambda - evals[i]);
            r += q.column(i) * coef;
        }
        r
    };
    if top_weight <= 1e-24 {
        // Hard case candidate: fill the remainder along a top eigenvector.
        let r0 = r_at(a_max, true);
        let n0 = r0.norm();
        if n0 <= 1.0 {
            let tau = (1.0 - n0 * n0).max(0.0).sqrt();
            let r = &r0 + q.column(top[0]) * tau;
            let r_neg = &r0 - q.column(top[0]) * tau;
            return value(&r).max(value(&r_neg));
        }
    }
    let phi = |lambda: f64| -> f64 {
        (0..d)
            .map(|i| {
                let den = lambda - evals[i];
                if den <= 0.0 {
                    if beta[i] == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    beta[i] * beta[i] / (den * den)
                }
            })
            .sum()
    };
    let bnorm: f64 = beta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut lo = a_max;
    let mut hi = a_max + bnorm + 1.0;
    if phi(hi) > 1.0 {
        hi = a_max + 2.0 * bnorm + 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = r_at(hi, false);
    let r = if r.norm() > 0.0 { &r / r.norm().max(1.0) } else { r };
    value(&r)
}

fn basis_probe_states(n: usize) -> Vec<Vec<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..n {
        let mut psi = vec![c(0.0, 0.0); n];
        psi[i] = c(1.0, 0.0);
        out.push(hermitian_to_coords(&linalg::outer(&psi)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for phase in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
                let mut psi = vec![c(0.0, 0.0); n];
                psi[i] = c(s, 0.0);
                psi[j] = phase * s;
                out.push(hermitian_to_coords(&linalg::outer(&psi)));
            }
        }
    }
    out
}

pub(crate) fn random_unit_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = linalg::norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Haar-random pure state vector in `C^n`.
pub fn random_ket<R: Rng>(n: usize, rng: &mut R) -> Vec<num_complex::Complex64> {
    let v = random_unit_vector(2 * n, rng);
    (0..n).map(|i| c(v[2 * i], v[2 * i + 1])).collect()
}

pub(crate) fn random_pure_coords<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    hermitian_to_coords(&linalg::outer(&random_ket(n, rng)))
}

/// Equivalence of two state spaces under `l`: `l`
/// invertible with `l(Omega_A) ⊆ Omega_B` and `l^-1(Omega_B) ⊆ Omega_A`.
///
/// Polytopic sides are checked exactly on vertices. Quantum and ball sides use
/// [`SAMPLE_COUNT`] seeded pure states, which can refute but only probabilistically confirm.
pub fn are_equivalent(a: &StateSpace, b: &StateSpace, l: &LinearMap) -> Result<bool> {
    are_equivalent_seeded(a, b, l, DEFAULT_SAMPLE_SEED)
}

pub fn are_equivalent_seeded(
    a: &StateSpace,
    b: &StateSpace,
    l: &LinearMap,
    seed: u64,
) -> Result<bool> {
    check_len(a.ambient_dim(), l.in_dim())?;
    check_len(b.ambient_dim(), l.out_dim())?;
    if a.ambient_dim() != b.ambient_dim() {
        return Ok(false);
    }
    if let (Some(va), Some(vb)) = (a.vertices(), b.vertices()) {
        if va.len() != vb.len() {
            return Ok(false);
        }
    }
    let l_inv = l.inverse()?;
    for p in a.probe_pure_states(SAMPLE_COUNT, seed) {
        if !b.contains_state(&l.apply(&p))? {
            return Ok(false);
        }
    }
    for p in b.probe_pure_states(SAMPLE_COUNT, seed.wrapping_add(1)) {
        if !a.contains_state(&l_inv.apply(&p))? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// JSON

/// Serialized form: `{"kind", "vertices", "N", "d", "u"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpaceJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
}

impl StateSpace {
    pub fn to_json(&self) -> StateSpaceJson {
        let mut out = StateSpaceJson {
            kind: self.kind().name().to_string(),
            vertices: None,
            n: None,
            d: None,
            u: Some(self.unit.clone()),
        };
        match &self.repr {
            Repr::Polytopic { vertices } => out.vertices = Some(vertices.clone()),
            Repr::Quantum { n } => out.n = Some(*n),
            Repr::Ball { d } => out.d = Some(*d),
        }
        out
    }

    pub fn from_json(doc: &StateSpaceJson) -> Result<Self> {
        let missing = |f: &str| Error::InvalidArgument(format!("state space JSON lacks \"{f}\""));
        match doc.kind.as_str() {
            "polytopic" | "min" | "max" => {
                let vertices = doc.vertices.clone().ok_or_else(|| missing("vertices"))?;
                let unit = doc.u.clone().ok_or_else(|| missing("u"))?;
                StateSpace::polytopic(vertices, unit)
            }
            "quantum" => {
                let space = StateSpace::quantum(doc.n.ok_or_else(|| missing("N"))?)?;
                if let Some(u) = &doc.u {
                    check_len(space.ambient_dim, u.len())?;
                    if linalg::sup_dist(u, &space.unit) > FEAS_TOL {
                        return Err(Error::InvalidArgument("quantum u is not the identity".into()));
                    }
                }
                Ok(space)
            }
            "ball" => {
                let space = StateSpace::ball(doc.d.ok_or_else(|| missing("d"))?)?;
                if let Some(u) = &doc.u {
                    check_len(space.ambient_dim, u.len())?;
                    if linalg::sup_dist(u, &space.unit) > FEAS_TOL {
                        return Err(Error::InvalidArgument("ball u must be (1, 0, ..)".into()));
                    }
                }
                Ok(space)
            }
            other => Err(Error::InvalidArgument(format!("unknown space kind {other:?}"))),
        }
    }
}
