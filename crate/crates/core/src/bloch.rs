//! Qubit Bloch-ball machinery: the ball/density-matrix correspondence, unitaries as
//! rotations, Haar sampling on SO(3), group averaging, and the geometric checks built on them.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, RMatrix};
use crate::lp::FEAS_TOL;
use crate::space::{LinearMap, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub r: [f64; 3],
}

impl BlochVector {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        BlochVector { r: [r1, r2, r3] }
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.r)
    }

    pub fn is_state(&self) -> bool {
        self.norm() <= 1.0 + FEAS_TOL
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= FEAS_TOL
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::from(self.r)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        BlochVector { r: [v[0], v[1], v[2]] }
    }

    /// Ball coordinates `(1, r)`.
    pub fn ball_coords(&self) -> Vec<f64> {
        vec![1.0, self.r[0], self.r[1], self.r[2]]
    }
}

/// `½(𝟙 + r·σ)` for any `r`, without the `|r| <= 1` check.
pub fn bloch_matrix(r: &BlochVector) -> CMatrix {
    let [r1, r2, r3] = r.r;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r3), 0.0),
            c(0.5 * r1, -0.5 * r2),
            c(0.5 * r1, 0.5 * r2),
            c(0.5 * (1.0 - r3), 0.0),
        ],
    )
}

pub fn bloch_to_density(r: &BlochVector) -> Result<CMatrix> {
    if !r.is_state() {
        return Err(Error::NotAState);
    }
    Ok(bloch_matrix(r))
}

/// Inverse of [`bloch_to_density`]: `r_i = tr(σ_i ρ)`.
pub fn density_to_bloch(rho: &CMatrix) -> Result<BlochVector> {
    if rho.shape() != (2, 2) {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.nrows() });
    }
    if !linalg::is_hermitian(rho, FEAS_TOL)
        || (linalg::trace(rho).re - 1.0).abs() > FEAS_TOL
        || linalg::min_eigenvalue(rho) < -FEAS_TOL
    {
        return Err(Error::NotAState);
    }
    let [sx, sy, sz] = linalg::paulis();
    Ok(BlochVector::new(
        linalg::trace(&(&sx * rho)).re,
        linalg::trace(&(&sy * rho)).re,
        linalg::trace(&(&sz * rho)).re,
    ))
}

/// The linear map taking ball coordinates `(1, r)` to qubit Hermitian coordinates.
pub fn ball_to_qubit_map() -> LinearMap {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = RMatrix::from_row_slice(
        4,
        4,
        &[
            0.5, 0.0, 0.0, 0.5, //
            0.5, 0.0, 0.0, -0.5, //
            0.0, s, 0.0, 0.0, //
            0.0, 0.0, -s, 0.0,
        ],
    );
    LinearMap::new(m)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && linalg::max_abs_diff(&(u.adjoint() * u), &linalg::identity(u.nrows())) <= tol
}

/// `R_ij = ½ tr(σ_i U σ_j U†)`.
pub fn unitary_to_rotation(u: &CMatrix) -> Result<Matrix3<f64>> {
    if u.shape() != (2, 2) {
        return Err(Error::DimensionMismatch { expected: 2, got: u.nrows() });
    }
    if !is_unitary(u, FEAS_TOL) {
        return Err(Error::NotUnitary);
    }
    let p = linalg::paulis();
    let ud = u.adjoint();
    Ok(Matrix3::from_fn(|i, j| {
        0.5 * linalg::trace(&(&p[i] * u * &p[j] * &ud)).re
    }))
}

/// Block-diagonal `diag(1, R)` acting on ball coordinates.
pub fn rotation_to_ball_map(r: &Matrix3<f64>) -> LinearMap {
    let mut m = RMatrix::identity(4, 4);
    for i in 0..3 {
        for j in 0..3 {
            m[(i + 1, j + 1)] = r[(i, j)];
        }
    }
    LinearMap::new(m)
}

fn unit_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = linalg::norm(&q);
        if n > 1e-12 {
            return q.map(|v| v / n);
        }
    }
}

fn quaternion_to_rotation([w, x, y, z]: [f64; 4]) -> Matrix3<f64> {
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// `n` Haar-distributed rotations from a seeded generator.
pub fn haar_rotations(n: usize, seed: u64) -> Vec<Matrix3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| quaternion_to_rotation(unit_quaternion(&mut rng))).collect()
}

/// Haar-distributed element of SU(2).
pub fn haar_unitary<R: Rng>(rng: &mut R) -> CMatrix {
    let [w, x, y, z] = unit_quaternion(rng);
    // w𝟙 - i(xσx + yσy + zσz)
    CMatrix::from_row_slice(2, 2, &[c(w, -z), c(-y, -x), c(y, -x), c(w, z)])
}

/// Average of `T ω` over the sampled rotations.
pub fn group_average_state(samples: &[Matrix3<f64>], omega: &BlochVector) -> Result<BlochVector> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    let v = omega.as_vector();
    let sum: Vector3<f64> = samples.iter().map(|t| t * v).sum();
    Ok(BlochVector::from_vector(&(sum / samples.len() as f64)))
}

/// Minimum number of samples accepted by [`invariant_inner_product`].
pub const MIN_AVERAGE_SAMPLES: usize = 10;

/// Averages a random positive-definite Gram matrix `G0` over the samples (`avg Tᵀ G0 T`)
/// and scales it so that unit vectors have norm 1 on average (`tr = 3`).
pub fn invariant_inner_product(samples: &[Matrix3<f64>], seed: u64) -> Result<Matrix3<f64>> {
    if samples.len() < MIN_AVERAGE_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_AVERAGE_SAMPLES, got: samples.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let g0 = a.transpose() * a + Matrix3::identity() * 0.1;
    let sum: Matrix3<f64> = samples.iter().map(|t| t.transpose() * g0 * t).sum();
    let avg = sum / samples.len() as f64;
    Ok(avg * (3.0 / avg.trace()))
}

#[derive(Debug, Clone, Serialize)]
pub struct StrictConvexityReport {
    pub d: usize,
    pub pairs_checked: usize,
    /// Smallest `1 - |λp + (1-λ)q|` over the checked pairs and interior grid points.
    pub min_gap: f64,
    pub strict: bool,
}

/// Samples pairs of distinct boundary points of the unit `d`-ball and checks that convex
/// combinations at `λ = 0.1, 0.2, ..., 0.9` lie strictly inside.
pub fn check_strict_convexity_ball(d: usize, trials: usize, seed: u64) -> StrictConvexityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if d == 1 {
        pairs.push((vec![-1.0], vec![1.0]));
    } else if d > 1 {
        while pairs.len() < trials {
            let p = crate::space::random_unit_vector(d, &mut rng);
            let q = crate::space::random_unit_vector(d, &mut rng);
            if linalg::sup_dist(&p, &q) > 1e-6 {
                pairs.push((p, q));
            }
        }
    }
    let mut min_gap = f64::INFINITY;
    for (p, q) in &pairs {
        for k in 1..10 {
            let l = k as f64 / 10.0;
            let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| l * a + (1.0 - l) * b).collect();
            min_gap = min_gap.min(1.0 - linalg::norm(&m));
        }
    }
    StrictConvexityReport {
        d,
        pairs_checked: pairs.len(),
        min_gap,
        strict: pairs.is_empty() || min_gap > 0.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionRow {
    pub system: String,
    pub ambient_dim: usize,
    pub expected_dim: usize,
    pub capacity: usize,
    pub expected_capacity: usize,
    /// Verified product lower bound `N_A N_B`, for composites.
    pub lower_bound: Option<usize>,
}

impl DimensionRow {
    pub fn ok(&self) -> bool {
        self.ambient_dim == self.expected_dim
            && self.capacity == self.expected_capacity
            && self.lower_bound.is_none_or(|l| l <= self.capacity)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionLawReport {
    pub rows: Vec<DimensionRow>,
    pub all_ok: bool,
}

/// Largest classical composite `MN` whose capacity is recomputed by subset LP.
pub const CLASSICAL_LP_COMPOSITE_LIMIT: usize = 9;

/// Checks `K = N` (classical), `K = N^2` (quantum), and for pairs of factors up to `n_max`
/// that composite dimensions and capacities multiply.
///
/// Larger classical composites take the capacity from the verified product lower bound,
/// which is tight when it reaches `K_AB` since distinguishable states are linearly
/// independent.
pub fn check_dimension_law(n_max: usize) -> Result<DimensionLawReport> {
    use crate::composite::{check_supermultiplicativity, check_supermultiplicativity_quantum, min_tensor};
    use crate::distinguish::capacity;
    if n_max < 2 {
        return Err(Error::InvalidArgument("dimension law needs N_max >= 2".into()));
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let cl = StateSpace::classical(n)?;
        rows.push(DimensionRow {
            system: format!("classical({n})"),
            ambient_dim: cl.ambient_dim(),
            expected_dim: n,
            capacity: capacity(&cl, None, n + 1)?,
            expected_capacity: n,
            lower_bound: None,
        });
        let q = StateSpace::quantum(n)?;
        rows.push(DimensionRow {
            system: format!("quantum({n})"),
            ambient_dim: q.ambient_dim(),
            expected_dim: n * n,
            capacity: capacity(&q, None, n + 1)?,
            expected_capacity: n,
            lower_bound: None,
        });
    }
    for m in 2..=n_max {
        for n in m..=n_max {
            let (a, b) = (StateSpace::classical(m)?, StateSpace::classical(n)?);
            let comp = min_tensor(&a, &b)?;
            let lower = check_supermultiplicativity(&a, &b, &comp)?.lower_bound;
            let k = comp.ambient_dim();
            let cap = if m * n <= CLASSICAL_LP_COMPOSITE_LIMIT {
                capacity(comp.as_space()?, None, m * n + 1)?
            } else if lower == k {
                lower
            } else {
                0
            };
            rows.push(DimensionRow {
                system: format!("classical({m}) x classical({n})"),
                ambient_dim: k,
                expected_dim: a.ambient_dim() * b.ambient_dim(),
                capacity: cap,
                expected_capacity: capacity(&a, None, m)? * capacity(&b, None, n)?,
                lower_bound: Some(lower),
            });
            let (qa, qb) = (StateSpace::quantum(m)?, StateSpace::quantum(n)?);
            let joint = StateSpace::quantum(m * n)?;
            let lower = check_supermultiplicativity_quantum(&qa, &qb)?.lower_bound;
            rows.push(DimensionRow {
                system: format!("quantum({m}) x quantum({n})"),
                ambient_dim: joint.ambient_dim(),
                expected_dim: qa.ambient_dim() * qb.ambient_dim(),
                capacity: capacity(&joint, None, m * n + 1)?,
                expected_capacity: capacity(&qa, None, m)? * capacity(&qb, None, n)?,
                lower_bound: Some(lower),
            });
        }
    }
    let all_ok = rows.iter().all(DimensionRow::ok);
    Ok(DimensionLawReport { rows, all_ok })
}
