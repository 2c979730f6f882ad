//! Perfect distinguishability of state sets and the capacity of a state space.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::lp::{LpProblem, LpStatus};
use crate::space::{coords_to_hermitian, hermitian_to_coords, Effect, Measurement, SpaceKind, StateSpace};

/// Tolerance for the `e_i(ω_j) = δ_ij` condition on returned witnesses.
pub const WITNESS_TOL: f64 = 1e-7;

/// Largest number of subsets of a single size that capacity search will enumerate.
pub const MAX_SUBSETS: u128 = 1_000_000;

const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinguishabilityWitness {
    pub measurement: Measurement,
    pub states: Vec<Vec<f64>>,
}

impl DistinguishabilityWitness {
    /// `max_ij |e_i(ω_j) - δ_ij|`.
    pub fn max_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, e) in self.measurement.effects().iter().enumerate() {
            for (j, w) in self.states.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((e.eval(w) - target).abs());
            }
        }
        worst
    }
}

/// Returns a measurement with `e_i(ω_j) = δ_ij` if one exists.
pub fn perfectly_distinguishable(
    space: &StateSpace,
    states: &[Vec<f64>],
) -> Result<Option<DistinguishabilityWitness>> {
    for s in states {
        check_len(space.ambient_dim(), s.len())?;
        if !space.contains_state(s)? {
            return Err(Error::NotAState);
        }
    }
    if states.is_empty() {
        return Err(Error::InvalidArgument("no states given".into()));
    }
    if states.len() == 1 {
        let m = Measurement::new(space, vec![space.unit_effect()])?;
        return Ok(Some(DistinguishabilityWitness { measurement: m, states: states.to_vec() }));
    }
    let effects = match space.kind() {
        SpaceKind::Polytopic => polytopic_witness(space, states)?,
        SpaceKind::Quantum => quantum_witness(space, states)?,
        SpaceKind::Ball => ball_witness(states),
    };
    let Some(effects) = effects else {
        return Ok(None);
    };
    let witness = DistinguishabilityWitness {
        measurement: Measurement::new(space, effects)?,
        states: states.to_vec(),
    };
    if witness.max_deviation() > WITNESS_TOL {
        return Err(Error::NumericalFailure(format!(
            "witness deviates by {:.3e}",
            witness.max_deviation()
        )));
    }
    Ok(Some(witness))
}

fn polytopic_witness(space: &StateSpace, states: &[Vec<f64>]) -> Result<Option<Vec<Effect>>> {
    let k = space.ambient_dim();
    let n = states.len();
    let vertices = space.vertices().expect("polytopic space");
    let mut lp = LpProblem::new(n * k);
    for i in 0..n {
        for v in vertices {
            let mut row = vec![0.0; n * k];
            row[i * k..(i + 1) * k].copy_from_slice(v);
            lp.add_ge(row, 0.0);
        }
    }
    for c in 0..k {
        let mut row = vec![0.0; n * k];
        for i in 0..n {
            row[i * k + c] = 1.0;
        }
        lp.add_eq(row, space.unit()[c]);
    }
    for i in 0..n {
        for (j, w) in states.iter().enumerate() {
            let mut row = vec![0.0; n * k];
            row[i * k..(i + 1) * k].copy_from_slice(w);
            lp.add_eq(row, if i == j { 1.0 } else { 0.0 });
        }
    }
    let res = crate::lp::solve(&lp)?;
    if res.status != LpStatus::Optimal {
        return Ok(None);
    }
    let x = res.solution.expect("optimal solution");
    Ok(Some((0..n).map(|i| Effect(x[i * k..(i + 1) * k].to_vec())).collect()))
}

fn support_projector(rho: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(rho);
    let n = rho.nrows();
    let mut p = CMatrix::zeros(n, n);
    for (idx, &v) in vals.iter().enumerate() {
        if v > SUPPORT_TOL {
            let col = vecs.column(idx);
            p += col * col.adjoint();
        }
    }
    p
}

fn quantum_witness(space: &StateSpace, states: &[Vec<f64>]) -> Result<Option<Vec<Effect>>> {
    let n = space.hilbert_dim().expect("quantum space");
    let rhos: Vec<CMatrix> =
        states.iter().map(|s| coords_to_hermitian(s, n)).collect::<Result<_>>()?;
    for i in 0..rhos.len() {
        for j in (i + 1)..rhos.len() {
            if linalg::trace(&(&rhos[i] * &rhos[j])).re > SUPPORT_TOL {
                return Ok(None);
            }
        }
    }
    let mut projectors: Vec<CMatrix> = rhos.iter().map(support_projector).collect();
    let covered: CMatrix = projectors.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
    let last = projectors.len() - 1;
    projectors[last] += linalg::identity(n) - covered;
    Ok(Some(projectors.iter().map(|p| Effect(hermitian_to_coords(p))).collect()))
}

fn ball_witness(states: &[Vec<f64>]) -> Option<Vec<Effect>> {
    if states.len() != 2 {
        return None;
    }
    let (r, s) = (&states[0][1..], &states[1][1..]);
    let antipodal = (linalg::norm(r) - 1.0).abs() <= SUPPORT_TOL
        && r.iter().zip(s).all(|(a, b)| (a + b).abs() <= SUPPORT_TOL);
    if !antipodal {
        return None;
    }
    let e = |dir: &[f64]| {
        let mut v = vec![0.5];
        v.extend(dir.iter().map(|x| 0.5 * x));
        Effect(v)
    };
    let neg: Vec<f64> = r.iter().map(|x| -x).collect();
    Some(vec![e(r), e(&neg)])
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < m - k + pos {
            idx[pos] += 1;
            for p in pos + 1..k {
                idx[p] = idx[p - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The largest perfectly distinguishable subset of `candidates` with at most `n_max`
/// elements, searched by size descending. Returns candidate indices and the witness.
pub fn max_distinguishable_subset(
    space: &StateSpace,
    candidates: &[Vec<f64>],
    n_max: usize,
) -> Result<Option<(Vec<usize>, DistinguishabilityWitness)>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    for s in candidates {
        check_len(space.ambient_dim(), s.len())?;
        if !space.contains_state(s)? {
            return Err(Error::NotAState);
        }
    }
    let m = candidates.len();
    for size in (1..=n_max.min(m)).rev() {
        let count = binomial(m, size);
        if count > MAX_SUBSETS {
            return Err(Error::ScaleLimit(format!(
                "C({m}, {size}) = {count} subsets exceeds {MAX_SUBSETS}"
            )));
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let subset: Vec<Vec<f64>> = idx.iter().map(|&i| candidates[i].clone()).collect();
            if let Some(w) = perfectly_distinguishable(space, &subset)? {
                return Ok(Some((idx, w)));
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    Ok(None)
}

/// Capacity relative to a candidate set.
///
/// Without candidates, polytopic spaces search their vertices while quantum (`N`) and ball
/// (2) spaces use the analytic value. With explicit candidates the result is the largest
/// distinguishable subset, a lower bound on the true capacity.
pub fn capacity(space: &StateSpace, candidates: Option<&[Vec<f64>]>, n_max: usize) -> Result<usize> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let cands: &[Vec<f64>] = match (candidates, space.kind()) {
        (Some(c), _) => c,
        (None, SpaceKind::Polytopic) => space.vertices().expect("polytopic space"),
        (None, SpaceKind::Quantum) => {
            return Ok(space.hilbert_dim().expect("quantum space").min(n_max))
        }
        (None, SpaceKind::Ball) => return Ok(2.min(n_max)),
    };
    if cands.is_empty() {
        return Err(Error::InvalidArgument("candidate list is empty".into()));
    }
    Ok(max_distinguishable_subset(space, cands, n_max)?.map_or(0, |(idx, _)| idx.len()))
}
