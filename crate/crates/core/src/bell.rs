//! The (2,2,2) Bell scenario: probability tables, the local and no-signalling polytopes,
//! CHSH, PR boxes, qubit tables and see-saw maximization of the quantum CHSH value.
//!
//! Outcomes are `±1` and map to indices by `(v + 1) / 2`. Tables are flattened
//! lexicographically in `(x, y, a, b)` with `-1` before `+1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composite::{max_tensor, partial_trace, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::lp::{self, LpProblem, LpStatus, FEAS_TOL};
use crate::space::StateSpace;

/// Entries may dip this far below zero and still form a valid table.
pub const NEG_TOL: f64 = 1e-12;
/// Tolerance for reproducing a table from a hidden-variable model.
pub const MODEL_TOL: f64 = 1e-7;
/// Tolerance for matching tables in the vertex classification.
pub const MATCH_TOL: f64 = 1e-8;

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Position of `p(a, b | x, y)` in the flattened table.
pub fn index(x: usize, y: usize, a: i8, b: i8) -> usize {
    let ai = usize::from(a > 0);
    let bi = usize::from(b > 0);
    ((x * 2 + y) * 2 + ai) * 2 + bi
}

const OUTCOMES: [i8; 2] = [-1, 1];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbTable222 {
    p: [f64; 16],
}

impl ProbTable222 {
    pub fn new(p: [f64; 16]) -> Result<Self> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("non-finite entry".into()));
        }
        if let Some(i) = p.iter().position(|&v| v < -NEG_TOL) {
            return Err(Error::InvalidTable(format!("entry {i} is negative ({})", p[i])));
        }
        for x in 0..2 {
            for y in 0..2 {
                let s: f64 = (0..4).map(|k| p[(x * 2 + y) * 4 + k]).sum();
                if (s - 1.0).abs() > FEAS_TOL {
                    return Err(Error::InvalidTable(format!(
                        "inputs ({x},{y}) sum to {s} instead of 1"
                    )));
                }
            }
        }
        Ok(ProbTable222 { p })
    }

    pub fn from_slice(p: &[f64]) -> Result<Self> {
        let arr: [f64; 16] = p
            .try_into()
            .map_err(|_| Error::InvalidTable(format!("expected 16 entries, got {}", p.len())))?;
        Self::new(arr)
    }

    pub fn uniform() -> Self {
        ProbTable222 { p: [0.25; 16] }
    }

    pub fn p(&self, x: usize, y: usize, a: i8, b: i8) -> f64 {
        self.p[index(x, y, a, b)]
    }

    pub fn entries(&self) -> &[f64; 16] {
        &self.p
    }

    pub fn distance(&self, other: &ProbTable222) -> f64 {
        linalg::sup_dist(&self.p, &other.p)
    }

    /// Alice's marginal `p(a | x)` computed with Bob's input `y`.
    pub fn marginal_a(&self, x: usize, y: usize, a: i8) -> f64 {
        OUTCOMES.iter().map(|&b| self.p(x, y, a, b)).sum()
    }

    pub fn marginal_b(&self, x: usize, y: usize, b: i8) -> f64 {
        OUTCOMES.iter().map(|&a| self.p(x, y, a, b)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            p: Vec<f64>,
        }
        let doc: Doc =
            serde_json::from_str(text).map_err(|e| Error::InvalidTable(e.to_string()))?;
        Self::from_slice(&doc.p)
    }

    /// Human-readable table with one `x y a b p` row per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::from("x y  a  b  p\n");
        for x in 0..2 {
            for y in 0..2 {
                for a in OUTCOMES {
                    for b in OUTCOMES {
                        out.push_str(&format!(
                            "{x} {y} {a:+} {b:+}  {}\n",
                            self.p(x, y, a, b)
                        ));
                    }
                }
            }
        }
        out
    }

    /// Parses the output of [`ProbTable222::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut p = [f64::NAN; 16];
        let mut seen = 0;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 5 || tok[0] == "x" {
                continue;
            }
            let bad = || Error::InvalidTable(format!("cannot parse row {line:?}"));
            let x: usize = tok[0].parse().map_err(|_| bad())?;
            let y: usize = tok[1].parse().map_err(|_| bad())?;
            let a: i8 = tok[2].parse().map_err(|_| bad())?;
            let b: i8 = tok[3].parse().map_err(|_| bad())?;
            let v: f64 = tok[4].parse().map_err(|_| bad())?;
            if x > 1 || y > 1 || a.abs() != 1 || b.abs() != 1 {
                return Err(bad());
            }
            p[index(x, y, a, b)] = v;
            seen += 1;
        }
        if seen != 16 || p.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidTable("text table needs all 16 entries".into()));
        }
        Self::new(p)
    }

    /// Accepts either the JSON or the text form.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(text)
        }
    }

    /// Correlator grid as CSV: `x,y,E`.
    pub fn correlators_csv(&self) -> String {
        let mut out = String::from("x,y,E\n");
        for x in 0..2 {
            for y in 0..2 {
                out.push_str(&format!("{x},{y},{}\n", expectation(self, x, y)));
            }
        }
        out
    }
}

pub fn is_nonsignalling(table: &ProbTable222) -> bool {
    for x in 0..2 {
        for a in OUTCOMES {
            if (table.marginal_a(x, 0, a) - table.marginal_a(x, 1, a)).abs() > FEAS_TOL {
                return false;
            }
        }
    }
    for y in 0..2 {
        for b in OUTCOMES {
            if (table.marginal_b(0, y, b) - table.marginal_b(1, y, b)).abs() > FEAS_TOL {
                return false;
            }
        }
    }
    true
}

/// `p(a,b|x,y) = δ_{a,f(x)} δ_{b,g(y)}` with `f = (f0, f1)` and `g = (g0, g1)`.
pub fn deterministic_table(f: [i8; 2], g: [i8; 2]) -> ProbTable222 {
    let mut p = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            p[index(x, y, f[x], g[y])] = 1.0;
        }
    }
    ProbTable222 { p }
}

/// Response functions of deterministic strategy `k`, with
/// `k = 8 f(0)' + 4 f(1)' + 2 g(0)' + g(1)'` and `v' = (v + 1) / 2`.
pub fn deterministic_strategy(k: usize) -> ([i8; 2], [i8; 2]) {
    let bit = |s: usize| if (k >> s) & 1 == 1 { 1 } else { -1 };
    ([bit(3), bit(2)], [bit(1), bit(0)])
}

pub fn deterministic_tables() -> Vec<ProbTable222> {
    (0..16)
        .map(|k| {
            let (f, g) = deterministic_strategy(k);
            deterministic_table(f, g)
        })
        .collect()
}

/// Weights over the 16 deterministic strategies, in [`deterministic_tables`] order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HiddenVariableModel {
    pub weights: [f64; 16],
}

impl HiddenVariableModel {
    pub fn mixture(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (w, t) in self.weights.iter().zip(deterministic_tables()) {
            out.iter_mut().zip(t.entries()).for_each(|(o, v)| *o += w * v);
        }
        out
    }
}

/// Decomposes the table over deterministic strategies if it lies in the local polytope.
pub fn classical_membership(table: &ProbTable222) -> Result<Option<HiddenVariableModel>> {
    let dets = deterministic_tables();
    let mut lp = LpProblem::new(16).nonnegative();
    lp.add_eq(vec![1.0; 16], 1.0);
    for i in 0..16 {
        lp.add_eq(dets.iter().map(|d| d.entries()[i]).collect(), table.entries()[i]);
    }
    let res = lp::solve(&lp)?;
    if res.status != LpStatus::Optimal {
        return Ok(None);
    }
    let x = res.solution.expect("optimal solution");
    let mut weights = [0.0; 16];
    weights.iter_mut().zip(&x).for_each(|(w, v)| *w = v.max(0.0));
    let model = HiddenVariableModel { weights };
    let err = linalg::sup_dist(&model.mixture(), table.entries());
    if err > MODEL_TOL {
        return Err(Error::NumericalFailure(format!("model reproduces table only to {err:.3e}")));
    }
    Ok(Some(model))
}

/// `E_xy = p(++) + p(--) - p(+-) - p(-+)`.
pub fn expectation(table: &ProbTable222, x: usize, y: usize) -> f64 {
    OUTCOMES
        .iter()
        .flat_map(|&a| OUTCOMES.iter().map(move |&b| (a, b)))
        .map(|(a, b)| f64::from(a * b) * table.p(x, y, a, b))
        .sum()
}

/// `E00 + E01 + E10 - E11`.
pub fn chsh(table: &ProbTable222) -> f64 {
    chsh_variant(table, 0, 0, 0)
}

/// `Σ (-1)^{xy ⊕ αx ⊕ βy ⊕ γ} E_xy`, the CHSH expression matched to `pr_box(α, β, γ)`.
pub fn chsh_variant(table: &ProbTable222, alpha: u8, beta: u8, gamma: u8) -> f64 {
    let mut total = 0.0;
    for x in 0..2u8 {
        for y in 0..2u8 {
            let parity = (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma;
            let sign = if parity & 1 == 0 { 1.0 } else { -1.0 };
            total += sign * expectation(table, x as usize, y as usize);
        }
    }
    total
}

/// `p = ½` where `a·b = (-1)^{xy ⊕ αx ⊕ βy ⊕ γ}`, else 0.
pub fn pr_box(alpha: u8, beta: u8, gamma: u8) -> ProbTable222 {
    let mut p = [0.0; 16];
    for x in 0..2u8 {
        for y in 0..2u8 {
            let parity = ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma) & 1;
            let product: i8 = if parity == 0 { 1 } else { -1 };
            for a in OUTCOMES {
                p[index(x as usize, y as usize, a, a * product)] = 0.5;
            }
        }
    }
    ProbTable222 { p }
}

// ---------------------------------------------------------------------------
// Quantum tables

/// A two-qubit state with two-outcome POVMs per input; `alice[x][a']` with `a' = (a+1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitBellSetup {
    state: CMatrix,
    alice: [[CMatrix; 2]; 2],
    bob: [[CMatrix; 2]; 2],
}

fn check_povm(pair: &[CMatrix; 2], who: &str) -> Result<()> {
    for e in pair {
        if e.shape() != (2, 2) || !linalg::is_hermitian(e, FEAS_TOL) {
            return Err(Error::InvalidSetup(format!("{who} effect is not a 2x2 Hermitian matrix")));
        }
        if linalg::min_eigenvalue(e) < -FEAS_TOL {
            return Err(Error::InvalidSetup(format!("{who} effect is not positive")));
        }
    }
    if linalg::max_abs_diff(&(&pair[0] + &pair[1]), &linalg::identity(2)) > FEAS_TOL {
        return Err(Error::InvalidSetup(format!("{who} effects do not sum to the identity")));
    }
    Ok(())
}

/// `(𝟙 - A)/2, (𝟙 + A)/2` for a `±1`-valued observable.
fn povm_from_observable(obs: &CMatrix) -> [CMatrix; 2] {
    let id = linalg::identity(2);
    [(&id - obs) * c(0.5, 0.0), (&id + obs) * c(0.5, 0.0)]
}

impl QubitBellSetup {
    pub fn new(state: CMatrix, alice: [[CMatrix; 2]; 2], bob: [[CMatrix; 2]; 2]) -> Result<Self> {
        if state.shape() != (4, 4) || !linalg::is_hermitian(&state, FEAS_TOL) {
            return Err(Error::InvalidSetup("state must be a 4x4 Hermitian matrix".into()));
        }
        if (linalg::trace(&state).re - 1.0).abs() > FEAS_TOL
            || linalg::min_eigenvalue(&state) < -FEAS_TOL
        {
            return Err(Error::InvalidSetup("state is not a density matrix".into()));
        }
        for pair in &alice {
            check_povm(pair, "Alice")?;
        }
        for pair in &bob {
            check_povm(pair, "Bob")?;
        }
        Ok(QubitBellSetup { state, alice, bob })
    }

    /// Projective setup from `±1`-valued observables.
    pub fn from_observables(state: CMatrix, alice: [CMatrix; 2], bob: [CMatrix; 2]) -> Result<Self> {
        let [a0, a1] = &alice;
        let [b0, b1] = &bob;
        Self::new(
            state,
            [povm_from_observable(a0), povm_from_observable(a1)],
            [povm_from_observable(b0), povm_from_observable(b1)],
        )
    }

    pub fn state(&self) -> &CMatrix {
        &self.state
    }

    pub fn alice_effects(&self) -> &[[CMatrix; 2]; 2] {
        &self.alice
    }

    pub fn bob_effects(&self) -> &[[CMatrix; 2]; 2] {
        &self.bob
    }

    /// `E^{+1} - E^{-1}` for each of Alice's inputs.
    pub fn alice_observables(&self) -> [CMatrix; 2] {
        [&self.alice[0][1] - &self.alice[0][0], &self.alice[1][1] - &self.alice[1][0]]
    }

    pub fn bob_observables(&self) -> [CMatrix; 2] {
        [&self.bob[0][1] - &self.bob[0][0], &self.bob[1][1] - &self.bob[1][0]]
    }
}

/// `P(a,b|x,y) = tr[ρ (E_x^a ⊗ F_y^b)]`.
pub fn quantum_table(setup: &QubitBellSetup) -> Result<ProbTable222> {
    let mut p = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in OUTCOMES {
                for b in OUTCOMES {
                    let e = &setup.alice[x][usize::from(a > 0)];
                    let f = &setup.bob[y][usize::from(b > 0)];
                    let v = linalg::trace(&(&setup.state * linalg::kron(e, f))).re;
                    p[index(x, y, a, b)] = if v.abs() < NEG_TOL { 0.0 } else { v };
                }
            }
        }
    }
    ProbTable222::new(p)
}

/// `cos θ σz + sin θ σx`.
pub fn xz_observable(theta: f64) -> CMatrix {
    linalg::pauli_z() * c(theta.cos(), 0.0) + linalg::pauli_x() * c(theta.sin(), 0.0)
}

pub fn singlet_state() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    linalg::outer(&[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)])
}

pub fn phi_plus_state() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    linalg::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)])
}

/// Singlet with Alice at angles `{0, π/2}` and Bob at `{π/4, -π/4}` in the x-z plane.
///
/// The singlet anticorrelates equal-angle outcomes, so Bob's outcome labels are swapped
/// (his observables are negated) to make the CHSH value `+2√2` rather than `-2√2`.
pub fn singlet_setup() -> QubitBellSetup {
    use std::f64::consts::FRAC_PI_4;
    QubitBellSetup::from_observables(
        singlet_state(),
        [xz_observable(0.0), xz_observable(2.0 * FRAC_PI_4)],
        [-xz_observable(FRAC_PI_4), -xz_observable(-FRAC_PI_4)],
    )
    .expect("singlet setup is valid")
}

/// The CHSH operator `A0⊗(B0+B1) + A1⊗(B0-B1)` of a setup.
pub fn chsh_operator(setup: &QubitBellSetup) -> CMatrix {
    let [a0, a1] = setup.alice_observables();
    let [b0, b1] = setup.bob_observables();
    linalg::kron(&a0, &(&b0 + &b1)) + linalg::kron(&a1, &(&b0 - &b1))
}

/// Largest absolute eigenvalue of the CHSH operator.
pub fn chsh_operator_norm(setup: &QubitBellSetup) -> f64 {
    let ev = linalg::hermitian_eigenvalues(&chsh_operator(setup));
    ev.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

#[derive(Debug, Clone)]
pub struct SeeSawResult {
    pub value: f64,
    pub setup: QubitBellSetup,
    /// CHSH value after each iteration (non-decreasing).
    pub history: Vec<f64>,
}

fn random_observable<R: Rng>(rng: &mut R) -> CMatrix {
    let n = crate::space::random_unit_vector(3, rng);
    let [sx, sy, sz] = linalg::paulis();
    sx * c(n[0], 0.0) + sy * c(n[1], 0.0) + sz * c(n[2], 0.0)
}

const SIGN_TOL: f64 = 1e-12;

/// `sign(M)` through the eigendecomposition; zero eigenvalues get a random sign and an
/// (almost) vanishing `M` gives a random observable.
fn sign_of<R: Rng>(m: &CMatrix, rng: &mut R) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let scale = vals.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    if scale < SIGN_TOL {
        return random_observable(rng);
    }
    let mut out = CMatrix::zeros(2, 2);
    for (k, &v) in vals.iter().enumerate() {
        let s = if v > SIGN_TOL * scale.max(1.0) {
            1.0
        } else if v < -SIGN_TOL * scale.max(1.0) {
            -1.0
        } else if rng.random::<bool>() {
            1.0
        } else {
            -1.0
        };
        let col = vecs.column(k);
        out += col * col.adjoint() * c(s, 0.0);
    }
    out
}

fn chsh_value(rho: &CMatrix, a: &[CMatrix; 2], b: &[CMatrix; 2]) -> f64 {
    let op = linalg::kron(&a[0], &(&b[0] + &b[1])) + linalg::kron(&a[1], &(&b[0] - &b[1]));
    linalg::trace(&(rho * op)).re
}

/// See-saw ascent on `|Φ+⟩` from seeded random observables.
pub fn maximize_chsh_quantum(seed: u64, iterations: usize) -> SeeSawResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alice = [random_observable(&mut rng), random_observable(&mut rng)];
    let bob = [random_observable(&mut rng), random_observable(&mut rng)];
    see_saw(alice, bob, &mut rng, iterations)
}

/// See-saw from given starting observables, e.g. the degenerate start with all `𝟙`.
pub fn maximize_chsh_quantum_from(
    alice: [CMatrix; 2],
    bob: [CMatrix; 2],
    seed: u64,
    iterations: usize,
) -> SeeSawResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    see_saw(alice, bob, &mut rng, iterations)
}

fn see_saw<R: Rng>(
    mut alice: [CMatrix; 2],
    mut bob: [CMatrix; 2],
    rng: &mut R,
    iterations: usize,
) -> SeeSawResult {
    let rho = phi_plus_state();
    let id = linalg::identity(2);
    let mut history = Vec::with_capacity(iterations);
    let mut best = chsh_value(&rho, &alice, &bob);
    let mut best_obs = (alice.clone(), bob.clone());
    for _ in 0..iterations.max(1) {
        // Alice: maximize Σ_x tr(A_x M_x), M_x = tr_B[ρ (𝟙 ⊗ C_x)].
        let cs = [&bob[0] + &bob[1], &bob[0] - &bob[1]];
        for x in 0..2 {
            let m = partial_trace(&(&rho * linalg::kron(&id, &cs[x])), 2, 2, Side::A)
                .expect("4x4 state");
            alice[x] = sign_of(&m, rng);
        }
        // Bob: maximize Σ_y tr(B_y N_y), N_y = tr_A[ρ (D_y ⊗ 𝟙)].
        let ds = [&alice[0] + &alice[1], &alice[0] - &alice[1]];
        for y in 0..2 {
            let n = partial_trace(&(&rho * linalg::kron(&ds[y], &id)), 2, 2, Side::B)
                .expect("4x4 state");
            bob[y] = sign_of(&n, rng);
        }
        let v = chsh_value(&rho, &alice, &bob);
        if v > best {
            best = v;
            best_obs = (alice.clone(), bob.clone());
        }
        history.push(best);
    }
    let setup = QubitBellSetup::from_observables(rho, best_obs.0, best_obs.1)
        .expect("see-saw observables are valid");
    SeeSawResult { value: best, setup, history }
}

// ---------------------------------------------------------------------------
// The max tensor product of two gbits and the no-signalling polytope

/// Gbit effect for input `x` and outcome `a`: `x = 0` uses `(ē^(x), e^(x))`, `x = 1` uses
/// `(ē^(y), e^(y))` for outcomes `(-1, +1)`.
pub fn gbit_effect(x: usize, a: i8) -> [f64; 3] {
    let s = 0.5 * f64::from(a);
    if x == 0 {
        [s, 0.0, 0.5]
    } else {
        [0.0, s, 0.5]
    }
}

/// `P(a,b|x,y) = (e_x^a ⊗ e_y^b)(ω)` for a state of the gbit max tensor product.
pub fn table_from_composite_state(omega: &[f64]) -> Result<ProbTable222> {
    crate::error::check_len(9, omega.len())?;
    let unit = linalg::kron_vec(&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]);
    if (linalg::dot(&unit, omega) - 1.0).abs() > FEAS_TOL {
        return Err(Error::NotAState);
    }
    let mut p = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in OUTCOMES {
                for b in OUTCOMES {
                    let e = linalg::kron_vec(&gbit_effect(x, a), &gbit_effect(y, b));
                    let v = linalg::dot(&e, omega);
                    if v < -FEAS_TOL {
                        return Err(Error::NotAState);
                    }
                    p[index(x, y, a, b)] = v.max(0.0);
                }
            }
        }
    }
    ProbTable222::new(p).map_err(|_| Error::NotAState)
}

/// Inverse of [`table_from_composite_state`] on non-signalling tables.
pub fn composite_state_from_table(table: &ProbTable222) -> Result<Vec<f64>> {
    if !is_nonsignalling(table) {
        return Err(Error::InvalidTable("table is signalling".into()));
    }
    // Gbit coordinate k is read off by e - ē for input k (k < 2) or by e + ē = u (k = 2).
    let input = |k: usize| if k == 1 { 1 } else { 0 };
    let weight = |k: usize, a: i8| if k == 2 { 1.0 } else { f64::from(a) };
    let mut omega = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            omega[i * 3 + j] = OUTCOMES
                .iter()
                .flat_map(|&a| OUTCOMES.iter().map(move |&b| (a, b)))
                .map(|(a, b)| weight(i, a) * weight(j, b) * table.p(input(i), input(j), a, b))
                .sum();
        }
    }
    Ok(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum VertexClass {
    Deterministic { index: usize },
    PrBox { alpha: u8, beta: u8, gamma: u8 },
    Other,
}

pub fn classify_table(table: &ProbTable222) -> VertexClass {
    if let Some(index) = deterministic_tables().iter().position(|d| d.distance(table) <= MATCH_TOL) {
        return VertexClass::Deterministic { index };
    }
    for k in 0..8u8 {
        let (alpha, beta, gamma) = (k >> 2 & 1, k >> 1 & 1, k & 1);
        if pr_box(alpha, beta, gamma).distance(table) <= MATCH_TOL {
            return VertexClass::PrBox { alpha, beta, gamma };
        }
    }
    VertexClass::Other
}

/// Affine dimension of a set of tables.
pub fn affine_dimension(tables: &[ProbTable222]) -> usize {
    let Some(first) = tables.first() else {
        return 0;
    };
    let rows: Vec<Vec<f64>> = tables[1..]
        .iter()
        .map(|t| t.entries().iter().zip(first.entries()).map(|(a, b)| a - b).collect())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    linalg::rank(&linalg::rows_to_matrix(&rows, 16), 1e-9)
}

#[derive(Debug, Clone, Serialize)]
pub struct NsPolytopeReport {
    pub vertices: usize,
    pub deterministic: usize,
    pub pr_type: usize,
    pub other: usize,
    pub affine_dim: usize,
    pub tables: Vec<ProbTable222>,
    pub classes: Vec<VertexClass>,
}

impl NsPolytopeReport {
    pub fn summary(&self) -> String {
        format!(
            "{} vertices: {} deterministic, {} PR-type",
            self.vertices, self.deterministic, self.pr_type
        )
    }
}

/// Enumerates the gbit max tensor product and classifies its vertices as tables.
pub fn ns_polytope() -> Result<NsPolytopeReport> {
    let g = StateSpace::gbit();
    let comp = max_tensor(&g, &g)?;
    let tables: Vec<ProbTable222> = comp
        .enumerate_vertices()?
        .iter()
        .map(|v| table_from_composite_state(v))
        .collect::<Result<_>>()?;
    let classes: Vec<VertexClass> = tables.iter().map(classify_table).collect();
    let count = |f: fn(&VertexClass) -> bool| classes.iter().filter(|c| f(c)).count();
    Ok(NsPolytopeReport {
        vertices: tables.len(),
        deterministic: count(|c| matches!(c, VertexClass::Deterministic { .. })),
        pr_type: count(|c| matches!(c, VertexClass::PrBox { .. })),
        other: count(|c| matches!(c, VertexClass::Other)),
        affine_dim: affine_dimension(&tables),
        tables,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flattening_order() {
        assert_eq!(index(0, 0, -1, -1), 0);
        assert_eq!(index(0, 0, -1, 1), 1);
        assert_eq!(index(0, 0, 1, -1), 2);
        assert_eq!(index(0, 1, -1, -1), 4);
        assert_eq!(index(1, 1, 1, 1), 15);
    }

    #[test]
    fn table_validation() {
        assert!(ProbTable222::new([0.25; 16]).is_ok());
        assert!(matches!(ProbTable222::new([0.3; 16]), Err(Error::InvalidTable(_))));
        let mut p = [0.25; 16];
        p[0] = -0.1;
        p[1] = 0.6;
        assert!(ProbTable222::new(p).is_err());
        assert!(ProbTable222::from_slice(&[0.25; 15]).is_err());
    }

    #[test]
    fn signalling_table_detected() {
        // Alice outputs +1 for sure when y = 0 and is uniform when y = 1.
        let mut p = [0.0; 16];
        for x in 0..2 {
            p[index(x, 0, 1, -1)] = 0.5;
            p[index(x, 0, 1, 1)] = 0.5;
            for a in OUTCOMES {
                for b in OUTCOMES {
                    p[index(x, 1, a, b)] = 0.25;
                }
            }
        }
        let t = ProbTable222::new(p).unwrap();
        assert!((t.marginal_a(0, 0, 1) - 1.0).abs() < 1e-15);
        assert!((t.marginal_a(0, 1, 1) - 0.5).abs() < 1e-15);
        assert!(!is_nonsignalling(&t));
        assert!(is_nonsignalling(&ProbTable222::uniform()));
    }

    #[test]
    fn deterministic_enumeration() {
        let d = deterministic_tables();
        assert_eq!(d.len(), 16);
        // Index 0: f = g = -1 everywhere.
        assert_eq!(d[0].p(1, 1, -1, -1), 1.0);
        // Index 9 = 8 + 1: f(0) = +1, f(1) = -1, g(0) = -1, g(1) = +1.
        assert_eq!(d[9].p(0, 1, 1, 1), 1.0);
        assert_eq!(d[9].p(1, 0, -1, -1), 1.0);
        let values: Vec<f64> = d.iter().map(chsh).collect();
        assert!(values.iter().all(|v| (v.abs() - 2.0).abs() < 1e-15));
        assert_eq!(values.iter().cloned().fold(f64::MIN, f64::max), 2.0);
        for t in &d {
            assert!(is_nonsignalling(t));
        }
    }

    #[test]
    fn pr_box_facts() {
        let pr = pr_box(0, 0, 0);
        assert!(is_nonsignalling(&pr));
        assert_eq!(chsh(&pr), 4.0);
        assert_eq!(expectation(&pr, 1, 1), -1.0);
        assert!(classical_membership(&pr).unwrap().is_none());
        let flipped = pr_box(0, 0, 1);
        for x in 0..2 {
            for y in 0..2 {
                for a in OUTCOMES {
                    for b in OUTCOMES {
                        assert_eq!(flipped.p(x, y, a, b), pr.p(x, y, a, -b));
                    }
                }
            }
        }
        for k in 0..8u8 {
            let (al, be, ga) = (k >> 2 & 1, k >> 1 & 1, k & 1);
            let t = pr_box(al, be, ga);
            assert!(is_nonsignalling(&t));
            assert_eq!(chsh_variant(&t, al, be, ga), 4.0);
        }
    }

    #[test]
    fn uniform_and_deterministic_membership() {
        assert_eq!(chsh(&ProbTable222::uniform()), 0.0);
        let m = classical_membership(&ProbTable222::uniform()).unwrap().unwrap();
        assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (k, d) in deterministic_tables().iter().enumerate() {
            let m = classical_membership(d).unwrap().unwrap();
            assert!((m.weights[k] - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn singlet_reaches_tsirelson() {
        let t = quantum_table(&singlet_setup()).unwrap();
        assert!((chsh(&t) - TSIRELSON).abs() < 1e-9);
        assert!(is_nonsignalling(&t));
        assert!(classical_membership(&t).unwrap().is_none());
    }

    #[test]
    fn maximally_mixed_gives_uniform() {
        let setup = QubitBellSetup::from_observables(
            linalg::identity(4) * c(0.25, 0.0),
            [xz_observable(0.3), xz_observable(1.1)],
            [xz_observable(-0.7), linalg::pauli_y()],
        )
        .unwrap();
        assert!(quantum_table(&setup).unwrap().distance(&ProbTable222::uniform()) < 1e-15);
    }

    #[test]
    fn product_state_tables_are_classical() {
        let a = crate::bloch::bloch_to_density(&crate::bloch::BlochVector::new(0.6, 0.0, 0.8)).unwrap();
        let b = crate::bloch::bloch_to_density(&crate::bloch::BlochVector::new(0.0, -1.0, 0.0)).unwrap();
        let setup = QubitBellSetup::from_observables(
            linalg::kron(&a, &b),
            [xz_observable(0.2), linalg::pauli_y()],
            [xz_observable(2.0), xz_observable(-1.0)],
        )
        .unwrap();
        let t = quantum_table(&setup).unwrap();
        assert!(classical_membership(&t).unwrap().is_some());
    }

    #[test]
    fn invalid_setup_rejected() {
        let bad = QubitBellSetup::from_observables(
            phi_plus_state(),
            [linalg::pauli_x() * c(2.0, 0.0), linalg::pauli_z()],
            [linalg::pauli_x(), linalg::pauli_z()],
        );
        assert!(matches!(bad, Err(Error::InvalidSetup(_))));
    }

    #[test]
    fn see_saw_reaches_bound_monotonically() {
        for seed in 0..3 {
            let r = maximize_chsh_quantum(seed, 200);
            assert!(r.value >= TSIRELSON - 1e-6, "seed {seed}: {}", r.value);
            assert!(chsh_operator_norm(&r.setup) <= TSIRELSON + 1e-9);
            assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
            let t = quantum_table(&r.setup).unwrap();
            assert!((chsh(&t) - r.value).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_start_escapes() {
        let id = linalg::identity(2);
        let r = maximize_chsh_quantum_from([id.clone(), id.clone()], [id.clone(), id], 0, 200);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.value >= TSIRELSON - 1e-6, "{}", r.value);
    }

    #[test]
    fn composite_map_examples() {
        let g = StateSpace::gbit();
        let v = g.vertices().unwrap();
        let t = table_from_composite_state(&linalg::kron_vec(&v[0], &v[0])).unwrap();
        assert!(matches!(classify_table(&t), VertexClass::Deterministic { index: 0 }));
        let pr_state = composite_state_from_table(&pr_box(0, 0, 0)).unwrap();
        let max = max_tensor(&g, &g).unwrap();
        assert!(max.contains(&pr_state).unwrap());
        let back = table_from_composite_state(&pr_state).unwrap();
        assert!(back.distance(&pr_box(0, 0, 0)) < 1e-15);
        let reduced = crate::composite::reduced_state(&max, &pr_state, Side::A).unwrap();
        assert!(linalg::sup_dist(&reduced, &[0.0, 0.0, 1.0]) < 1e-15);
        assert!(matches!(
            table_from_composite_state(&[0.0; 9]),
            Err(Error::NotAState)
        ));
    }

    #[test]
    fn ns_polytope_structure() {
        let r = ns_polytope().unwrap();
        assert_eq!(r.summary(), "24 vertices: 16 deterministic, 8 PR-type");
        assert_eq!(r.affine_dim, 8);
        for i in 0..r.tables.len() {
            for j in (i + 1)..r.tables.len() {
                assert!(r.tables[i].distance(&r.tables[j]) > 1e-6);
            }
        }
    }

    #[test]
    fn text_and_json_forms_parse_back() {
        let t = pr_box(1, 0, 1);
        assert_eq!(ProbTable222::parse(&t.to_json()).unwrap(), t);
        assert_eq!(ProbTable222::parse(&t.to_text()).unwrap(), t);
        assert!(t.correlators_csv().starts_with("x,y,E\n0,0,"));
    }

    fn mixture_strategy() -> impl Strategy<Value = [f64; 16]> {
        prop::array::uniform16(0.0f64..1.0).prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-3)
    }

    fn mix(w: &[f64; 16]) -> ProbTable222 {
        let total: f64 = w.iter().sum();
        let mut p = [0.0; 16];
        for (wi, d) in w.iter().zip(deterministic_tables()) {
            p.iter_mut().zip(d.entries()).for_each(|(o, v)| *o += wi / total * v);
        }
        ProbTable222::new(p).unwrap()
    }

    proptest! {
        #[test]
        fn classical_mixtures_obey_chsh(w in mixture_strategy()) {
            let t = mix(&w);
            prop_assert!(chsh(&t).abs() <= 2.0 + 1e-9);
            let model = classical_membership(&t).unwrap();
            prop_assert!(model.is_some());
            prop_assert!(linalg::sup_dist(&model.unwrap().mixture(), t.entries()) <= MODEL_TOL);
        }

        #[test]
        fn quantum_tables_are_nonsignalling(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = crate::space::random_ket(4, &mut rng);
            let setup = QubitBellSetup::from_observables(
                linalg::outer(&psi),
                [random_observable(&mut rng), random_observable(&mut rng)],
                [random_observable(&mut rng), random_observable(&mut rng)],
            ).unwrap();
            let t = quantum_table(&setup).unwrap();
            prop_assert!(is_nonsignalling(&t));
            prop_assert!(chsh(&t) <= TSIRELSON + 1e-9);
        }

        #[test]
        fn noisy_pr_boxes_beyond_two_are_not_classical(v in 0.51f64..1.0) {
            // v PR + (1 - v) uniform has CHSH 4v > 2.
            let pr = pr_box(0, 0, 0);
            let mut p = [0.0; 16];
            for (pi, e) in p.iter_mut().zip(pr.entries()) {
                *pi = v * e + (1.0 - v) * 0.25;
            }
            let t = ProbTable222::new(p).unwrap();
            prop_assert!(chsh(&t) > 2.0);
            prop_assert!(classical_membership(&t).unwrap().is_none());
        }
    }
}
