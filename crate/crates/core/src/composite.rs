//! Minimal and maximal tensor products of polytopic state spaces, reduced states, and the
//! quantum counterparts used for comparison.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::extreme_rays;
use crate::distinguish::{max_distinguishable_subset, perfectly_distinguishable};
use crate::error::{check_len, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::lp::FEAS_TOL;
use crate::space::{
    coords_to_hermitian, hermitian_to_coords, random_ket, Effect, Measurement, StateSpace,
    StateSpaceJson,
};

/// Largest ambient dimension accepted by [`effect_cone_generators`].
pub const MAX_GENERATOR_DIM: usize = 10;
/// Largest inequality count accepted by [`CompositeSpace::enumerate_vertices`].
pub const MAX_INEQUALITIES: usize = 64;
/// Largest ambient dimension accepted by [`CompositeSpace::enumerate_vertices`].
pub const MAX_ENUM_DIM: usize = 16;
/// Sup-norm tolerance for merging duplicate vertices.
pub const DEDUP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositeKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Extreme rays of the effect cone, scaled so that `max_v e(v) = 1` over the vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectConeGenerators {
    pub generators: Vec<Effect>,
}

pub fn effect_cone_generators(space: &StateSpace) -> Result<EffectConeGenerators> {
    let Some(vertices) = space.vertices() else {
        return Err(Error::UnsupportedKind(space.kind().name()));
    };
    let k = space.ambient_dim();
    if k > MAX_GENERATOR_DIM {
        return Err(Error::ScaleLimit(format!(
            "effect cone of a {k}-dimensional space (limit {MAX_GENERATOR_DIM})"
        )));
    }
    let rays = extreme_rays(vertices, k)?;
    let generators = rays
        .into_iter()
        .map(|r| {
            let top = vertices.iter().map(|v| linalg::dot(&r, v)).fold(0.0, f64::max);
            Effect(r.iter().map(|x| x / top).collect())
        })
        .collect();
    Ok(EffectConeGenerators { generators })
}

fn dedup(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| linalg::sup_dist(q, &p) <= DEDUP_TOL) {
            out.push(p);
        }
    }
    out
}

/// A bipartite composite of two polytopic spaces.
#[derive(Debug)]
pub struct CompositeSpace {
    factor_a: StateSpace,
    factor_b: StateSpace,
    kind: CompositeKind,
    unit: Vec<f64>,
    /// Min: the product vertices. Max: `e_i ⊗ f_j` over effect-cone generators.
    rows: Vec<Vec<f64>>,
    vertices: OnceLock<StateSpace>,
}

impl Clone for CompositeSpace {
    fn clone(&self) -> Self {
        let vertices = OnceLock::new();
        if let Some(s) = self.vertices.get() {
            let _ = vertices.set(s.clone());
        }
        CompositeSpace {
            factor_a: self.factor_a.clone(),
            factor_b: self.factor_b.clone(),
            kind: self.kind,
            unit: self.unit.clone(),
            rows: self.rows.clone(),
            vertices,
        }
    }
}

fn require_polytopic(s: &StateSpace) -> Result<&[Vec<f64>]> {
    s.vertices().ok_or(Error::UnsupportedKind(s.kind().name()))
}

/// `conv{ω_A ⊗ ω_B}`.
pub fn min_tensor(a: &StateSpace, b: &StateSpace) -> Result<CompositeSpace> {
    let va = require_polytopic(a)?;
    let vb = require_polytopic(b)?;
    let products: Vec<Vec<f64>> = va
        .iter()
        .flat_map(|x| vb.iter().map(move |y| linalg::kron_vec(x, y)))
        .collect();
    let rows = dedup(products);
    let unit = linalg::kron_vec(a.unit(), b.unit());
    let vertices = OnceLock::new();
    let _ = vertices.set(StateSpace::polytopic_unchecked(rows.clone(), unit.clone())?);
    Ok(CompositeSpace {
        factor_a: a.clone(),
        factor_b: b.clone(),
        kind: CompositeKind::Min,
        unit,
        rows,
        vertices,
    })
}

/// All normalized vectors on which every product effect is nonnegative.
pub fn max_tensor(a: &StateSpace, b: &StateSpace) -> Result<CompositeSpace> {
    require_polytopic(a)?;
    require_polytopic(b)?;
    let ga = effect_cone_generators(a)?.generators;
    let gb = effect_cone_generators(b)?.generators;
    let rows: Vec<Vec<f64>> = ga
        .iter()
        .flat_map(|e| gb.iter().map(move |f| linalg::kron_vec(&e.0, &f.0)))
        .collect();
    Ok(CompositeSpace {
        factor_a: a.clone(),
        factor_b: b.clone(),
        kind: CompositeKind::Max,
        unit: linalg::kron_vec(a.unit(), b.unit()),
        rows,
        vertices: OnceLock::new(),
    })
}

impl CompositeSpace {
    pub fn kind(&self) -> CompositeKind {
        self.kind
    }

    pub fn factors(&self) -> (&StateSpace, &StateSpace) {
        (&self.factor_a, &self.factor_b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.unit.len()
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    /// The product inequalities of a max composite (empty for min composites).
    pub fn inequalities(&self) -> &[Vec<f64>] {
        match self.kind {
            CompositeKind::Min => &[],
            CompositeKind::Max => &self.rows,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_len(self.ambient_dim(), x.len())?;
        match self.kind {
            CompositeKind::Min => self.vertices.get().expect("min vertices").contains_state(x),
            CompositeKind::Max => Ok((linalg::dot(&self.unit, x) - 1.0).abs() <= FEAS_TOL
                && self.rows.iter().all(|r| linalg::dot(r, x) >= -FEAS_TOL)),
        }
    }

    /// Vertex list: the products for min composites, double description for max ones.
    /// Max results are cached; each vertex is certified extremal by LP.
    pub fn enumerate_vertices(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self.as_space()?.vertices().expect("polytopic").to_vec())
    }

    /// The composite as a polytopic state space.
    pub fn as_space(&self) -> Result<&StateSpace> {
        if let Some(s) = self.vertices.get() {
            return Ok(s);
        }
        let k = self.ambient_dim();
        if self.rows.len() > MAX_INEQUALITIES || k > MAX_ENUM_DIM {
            return Err(Error::ScaleLimit(format!(
                "{} inequalities in dimension {k} (limits {MAX_INEQUALITIES}, {MAX_ENUM_DIM})",
                self.rows.len()
            )));
        }
        let mut points = Vec::new();
        for ray in extreme_rays(&self.rows, k)? {
            let scale = linalg::dot(&self.unit, &ray);
            if scale <= 1e-12 {
                return Err(Error::NumericalFailure("ray with nonpositive normalization".into()));
            }
            points.push(ray.iter().map(|x| x / scale).collect::<Vec<f64>>());
        }
        let space = StateSpace::polytopic(dedup(points), self.unit.clone())?;
        let _ = self.vertices.set(space);
        Ok(self.vertices.get().expect("just set"))
    }

    pub fn to_json(&self, include_vertices: bool) -> CompositeJson {
        let vertices = match self.kind {
            CompositeKind::Min => Some(self.rows.clone()),
            CompositeKind::Max if include_vertices => {
                self.vertices.get().and_then(|s| s.vertices().map(<[_]>::to_vec))
            }
            CompositeKind::Max => None,
        };
        CompositeJson {
            kind: self.kind,
            factors: vec![self.factor_a.to_json(), self.factor_b.to_json()],
            u: self.unit.clone(),
            vertices,
            inequalities: (self.kind == CompositeKind::Max).then(|| self.rows.clone()),
        }
    }

    pub fn from_json(doc: &CompositeJson) -> Result<Self> {
        let [fa, fb] = doc.factors.as_slice() else {
            return Err(Error::InvalidArgument("composite needs exactly two factors".into()));
        };
        let (a, b) = (StateSpace::from_json(fa)?, StateSpace::from_json(fb)?);
        let comp = match doc.kind {
            CompositeKind::Min => min_tensor(&a, &b)?,
            CompositeKind::Max => max_tensor(&a, &b)?,
        };
        if linalg::sup_dist(&comp.unit, &doc.u) > FEAS_TOL || comp.unit.len() != doc.u.len() {
            return Err(Error::InvalidArgument("composite u does not match its factors".into()));
        }
        if let (CompositeKind::Max, Some(vs)) = (doc.kind, &doc.vertices) {
            let space = StateSpace::polytopic(vs.clone(), comp.unit.clone())?;
            let _ = comp.vertices.set(space);
        }
        Ok(comp)
    }
}

/// Serialized composite: the state-space fields plus `factors` and `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositeJson {
    pub kind: CompositeKind,
    pub factors: Vec<StateSpaceJson>,
    pub u: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<Vec<Vec<f64>>>,
}

/// Parses either a state-space document or a composite document into a state space.
/// Max composites without a vertex list are enumerated.
pub fn load_space_json(text: &str) -> Result<StateSpace> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    if value.get("factors").is_some() {
        let doc: CompositeJson =
            serde_json::from_value(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        return Ok(CompositeSpace::from_json(&doc)?.as_space()?.clone());
    }
    let doc: StateSpaceJson =
        serde_json::from_value(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    StateSpace::from_json(&doc)
}

pub fn product_state(omega_a: &[f64], omega_b: &[f64]) -> Vec<f64> {
    linalg::kron_vec(omega_a, omega_b)
}

/// Contracts the other factor with its unit functional.
pub fn reduced_state(composite: &CompositeSpace, omega: &[f64], side: Side) -> Result<Vec<f64>> {
    if !composite.contains(omega)? {
        return Err(Error::NotAState);
    }
    let (ua, ub) = (composite.factor_a.unit(), composite.factor_b.unit());
    let (ka, kb) = (ua.len(), ub.len());
    Ok(match side {
        Side::A => (0..ka)
            .map(|i| (0..kb).map(|j| omega[i * kb + j] * ub[j]).sum())
            .collect(),
        Side::B => (0..kb)
            .map(|j| (0..ka).map(|i| ua[i] * omega[i * kb + j]).sum())
            .collect(),
    })
}

/// Partial trace of a density matrix on `C^da ⊗ C^db`, keeping `side`.
pub fn partial_trace(rho: &CMatrix, da: usize, db: usize, side: Side) -> Result<CMatrix> {
    check_len(da * db, rho.nrows())?;
    check_len(da * db, rho.ncols())?;
    Ok(match side {
        Side::A => CMatrix::from_fn(da, da, |i, k| (0..db).map(|j| rho[(i * db + j, k * db + j)]).sum()),
        Side::B => CMatrix::from_fn(db, db, |j, l| (0..da).map(|i| rho[(i * db + j, i * db + l)]).sum()),
    })
}

/// Seeded check of `⟨a b| ρ |a b⟩ >= 0` over random product pure effects, plus trace one.
/// Can refute membership in the quantum max tensor product, but only probabilistically
/// confirms it.
pub fn quantum_max_tensor_contains_sampled(
    rho: &CMatrix,
    da: usize,
    db: usize,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    check_len(da * db, rho.nrows())?;
    if !linalg::is_hermitian(rho, FEAS_TOL) || (linalg::trace(rho).re - 1.0).abs() > FEAS_TOL {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = random_ket(da, &mut rng);
        let b = random_ket(db, &mut rng);
        let ab: Vec<_> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        let v = nalgebra::DVector::from_vec(ab);
        let val = (v.adjoint() * rho * &v)[(0, 0)].re;
        if val < -FEAS_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct SupermultiplicativityReport {
    pub capacity_a: usize,
    pub capacity_b: usize,
    /// Number of product states verified jointly distinguishable in the composite.
    pub lower_bound: usize,
    pub max_deviation: f64,
}

fn product_measurement_report(
    joint: &StateSpace,
    states: Vec<Vec<f64>>,
    effects: Vec<Effect>,
    capacity_a: usize,
    capacity_b: usize,
) -> Result<SupermultiplicativityReport> {
    for s in &states {
        if !joint.contains_state(s)? {
            return Err(Error::NumericalFailure("product state outside the composite".into()));
        }
    }
    let measurement = Measurement::new(joint, effects)?;
    let witness = crate::distinguish::DistinguishabilityWitness { measurement, states };
    let dev = witness.max_deviation();
    if dev > crate::distinguish::WITNESS_TOL {
        return Err(Error::NumericalFailure(format!("product witness deviates by {dev:.3e}")));
    }
    Ok(SupermultiplicativityReport {
        capacity_a,
        capacity_b,
        lower_bound: witness.states.len(),
        max_deviation: dev,
    })
}

/// Builds `N_A N_B` product states with the product witness and verifies them in the
/// composite, giving the lower bound `N_AB >= N_A N_B`.
pub fn check_supermultiplicativity(
    a: &StateSpace,
    b: &StateSpace,
    composite: &CompositeSpace,
) -> Result<SupermultiplicativityReport> {
    let best = |s: &StateSpace| -> Result<(Vec<Vec<f64>>, Vec<Effect>)> {
        let vs = require_polytopic(s)?;
        let (idx, w) = max_distinguishable_subset(s, vs, s.ambient_dim())?
            .ok_or_else(|| Error::NumericalFailure("no distinguishable subset".into()))?;
        Ok((idx.iter().map(|&i| vs[i].clone()).collect(), w.measurement.effects().to_vec()))
    };
    let (sa, ea) = best(a)?;
    let (sb, eb) = best(b)?;
    let states = sa.iter().flat_map(|x| sb.iter().map(move |y| product_state(x, y))).collect();
    let effects = ea
        .iter()
        .flat_map(|e| eb.iter().map(move |f| Effect(linalg::kron_vec(&e.0, &f.0))))
        .collect();
    product_measurement_report(composite.as_space()?, states, effects, sa.len(), sb.len())
}

/// The quantum analogue: basis-state products in `quantum(MN)` with the product basis
/// measurement.
pub fn check_supermultiplicativity_quantum(
    a: &StateSpace,
    b: &StateSpace,
) -> Result<SupermultiplicativityReport> {
    let (Some(m), Some(n)) = (a.hilbert_dim(), b.hilbert_dim()) else {
        return Err(Error::UnsupportedKind("non-quantum"));
    };
    let joint = StateSpace::quantum(m * n)?;
    let basis = |d: usize, i: usize| {
        let mut psi = vec![linalg::c(0.0, 0.0); d];
        psi[i] = linalg::c(1.0, 0.0);
        linalg::outer(&psi)
    };
    let mut states = Vec::new();
    let mut effects = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let p = linalg::kron(&basis(m, i), &basis(n, j));
            states.push(hermitian_to_coords(&p));
            effects.push(Effect(hermitian_to_coords(&p)));
        }
    }
    if perfectly_distinguishable(&joint, &states)?.is_none() {
        return Err(Error::NumericalFailure("product basis not distinguishable".into()));
    }
    product_measurement_report(&joint, states, effects, m, n)
}

/// Quantum coordinates of `ρ_A ⊗ ρ_B`.
pub fn quantum_product_coords(a: &[f64], da: usize, b: &[f64], db: usize) -> Result<Vec<f64>> {
    let ra = coords_to_hermitian(a, da)?;
    let rb = coords_to_hermitian(b, db)?;
    Ok(hermitian_to_coords(&linalg::kron(&ra, &rb)))
}
