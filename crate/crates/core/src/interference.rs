//! Sorkin interference terms for two- and three-slit arrangements.
//!
//! Slits are labelled `1..=M` and correspond to the standard basis vectors. Opening the
//! slits in `I` projects the which-slit state with `P_I = Σ_{i∈I} |i⟩⟨i|`, and the click
//! probability is `tr(P_I ρ P_I Q)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::lp::FEAS_TOL;

/// The seven nonempty subsets of three slits, in the order expected for blocker lists.
pub const SUBSETS3: [&[usize]; 7] = [&[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]];

#[derive(Debug, Clone, PartialEq)]
pub struct SlitExperiment {
    m: usize,
    rho: CMatrix,
    q: CMatrix,
}

fn check_density(rho: &CMatrix, m: usize) -> Result<()> {
    if rho.shape() != (m, m) {
        return Err(Error::DimensionMismatch { expected: m, got: rho.nrows() });
    }
    if !linalg::is_hermitian(rho, FEAS_TOL)
        || (linalg::trace(rho).re - 1.0).abs() > FEAS_TOL
        || linalg::min_eigenvalue(rho) < -FEAS_TOL
    {
        return Err(Error::NotAState);
    }
    Ok(())
}

fn check_effect(q: &CMatrix, m: usize) -> Result<()> {
    if q.shape() != (m, m) {
        return Err(Error::DimensionMismatch { expected: m, got: q.nrows() });
    }
    let ok = linalg::is_hermitian(q, FEAS_TOL) && {
        let ev = linalg::hermitian_eigenvalues(q);
        ev[0] >= -FEAS_TOL && ev[m - 1] <= 1.0 + FEAS_TOL
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument("detector effect must satisfy 0 <= Q <= 1".into()))
    }
}

impl SlitExperiment {
    pub fn new(m: usize, rho: CMatrix, q: CMatrix) -> Result<Self> {
        if !(2..=3).contains(&m) {
            return Err(Error::InvalidArgument(format!("slit count must be 2 or 3, got {m}")));
        }
        check_density(&rho, m)?;
        check_effect(&q, m)?;
        Ok(SlitExperiment { m, rho, q })
    }

    pub fn slits(&self) -> usize {
        self.m
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn detector(&self) -> &CMatrix {
        &self.q
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ExperimentJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::new(doc.m, grid_to_matrix(&doc.rho)?, grid_to_matrix(&doc.q)?)
    }

    pub fn to_json(&self) -> String {
        let doc = ExperimentJson {
            rho: matrix_to_grid(&self.rho),
            q: matrix_to_grid(&self.q),
            m: self.m,
        };
        serde_json::to_string(&doc).expect("experiment serializes")
    }
}

/// A square complex matrix as rows of `[re, im]` pairs.
pub type Grid = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_grid(m: &CMatrix) -> Grid {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn grid_to_matrix(g: &Grid) -> Result<CMatrix> {
    let n = g.len();
    for row in g {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| c(g[i][j][0], g[i][j][1])))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExperimentJson {
    rho: Grid,
    #[serde(rename = "Q")]
    q: Grid,
    #[serde(rename = "M")]
    m: usize,
}

/// `Σ_{i∈I} |i⟩⟨i|` for 1-based slit labels.
pub fn slit_projector(m: usize, open: &[usize]) -> Result<CMatrix> {
    if open.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut p = CMatrix::zeros(m, m);
    for &i in open {
        if i == 0 || i > m {
            return Err(Error::InvalidArgument(format!("slit {i} outside 1..={m}")));
        }
        p[(i - 1, i - 1)] = c(1.0, 0.0);
    }
    Ok(p)
}

/// `tr(P_I ρ P_I Q)`.
pub fn click_probability(exp: &SlitExperiment, open: &[usize]) -> Result<f64> {
    let p = slit_projector(exp.m, open)?;
    Ok(linalg::trace(&(&p * &exp.rho * &p * &exp.q)).re)
}

/// `P_12 - P_1 - P_2`.
pub fn sorkin_i2(exp: &SlitExperiment) -> Result<f64> {
    if exp.m != 2 {
        return Err(Error::WrongSlitCount { expected: 2, got: exp.m });
    }
    let p = |s: &[usize]| click_probability(exp, s);
    Ok(p(&[1, 2])? - p(&[1])? - p(&[2])?)
}

/// `P_123 - P_12 - P_13 - P_23 + P_1 + P_2 + P_3`.
pub fn sorkin_i3(exp: &SlitExperiment) -> Result<f64> {
    if exp.m != 3 {
        return Err(Error::WrongSlitCount { expected: 3, got: exp.m });
    }
    let probs: Vec<f64> = SUBSETS3.iter().map(|s| click_probability(exp, s)).collect::<Result<_>>()?;
    Ok(signed_sum3(&probs))
}

/// Combines values listed in [`SUBSETS3`] order with the third-order signs.
fn signed_sum3<T>(v: &[T]) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    v[6].clone() - v[3].clone() - v[4].clone() - v[5].clone() + v[0].clone() + v[1].clone()
        + v[2].clone()
}

/// `ρ_123 - ρ_12 - ρ_13 - ρ_23 + ρ_1 + ρ_2 + ρ_3` with `ρ_I = P_I ρ P_I`.
pub fn decomposition_residual(rho: &CMatrix) -> Result<CMatrix> {
    if rho.shape() != (3, 3) {
        return Err(Error::WrongSlitCount { expected: 3, got: rho.nrows() });
    }
    let parts: Vec<CMatrix> = SUBSETS3
        .iter()
        .map(|s| slit_projector(3, s).map(|p| &p * rho * &p))
        .collect::<Result<_>>()?;
    Ok(signed_sum3(&parts))
}

/// A completely positive, trace-nonincreasing map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockingMap {
    kraus: Vec<CMatrix>,
}

impl BlockingMap {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidKraus("empty Kraus list".into()));
        };
        let n = first.nrows();
        if kraus.iter().any(|k| k.shape() != (n, n)) {
            return Err(Error::InvalidKraus("Kraus operators must share one square shape".into()));
        }
        let total = kraus.iter().fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
        if linalg::max_eigenvalue(&total) > 1.0 + FEAS_TOL {
            return Err(Error::InvalidKraus("sum of K†K exceeds the identity".into()));
        }
        Ok(BlockingMap { kraus })
    }

    pub fn projector(m: usize, open: &[usize]) -> Result<Self> {
        Self::new(vec![slit_projector(m, open)?])
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.kraus.iter().fold(CMatrix::zeros(rho.nrows(), rho.ncols()), |acc, k| {
            acc + k * rho * k.adjoint()
        })
    }
}

/// `I_3` with `ρ_I` replaced by `B_I(ρ)` for the seven blockers listed in [`SUBSETS3`] order.
pub fn sorkin_i3_with_blockers(rho: &CMatrix, blockers: &[BlockingMap], q: &CMatrix) -> Result<f64> {
    if blockers.len() != 7 {
        return Err(Error::InvalidKraus(format!("need 7 blockers, got {}", blockers.len())));
    }
    check_density(rho, 3)?;
    check_effect(q, 3)?;
    if let Some(b) = blockers.iter().find(|b| b.dim() != 3) {
        return Err(Error::InvalidKraus(format!("blocker acts on dimension {}", b.dim())));
    }
    let probs: Vec<f64> =
        blockers.iter().map(|b| linalg::trace(&(b.apply(rho) * q)).re).collect();
    Ok(signed_sum3(&probs))
}

pub fn orthogonal_blockers() -> Vec<BlockingMap> {
    SUBSETS3.iter().map(|s| BlockingMap::projector(3, s).expect("valid subset")).collect()
}

/// Canonical blockers except that slit 1 alone is blocked by the projector onto
/// `cos θ |1⟩ + sin θ |2⟩`.
pub fn rotated_blockers(theta: f64) -> Vec<BlockingMap> {
    let mut out = orthogonal_blockers();
    let v = [c(theta.cos(), 0.0), c(theta.sin(), 0.0), c(0.0, 0.0)];
    out[0] = BlockingMap::new(vec![linalg::outer(&v)]).expect("rank-one projector");
    out
}

/// `B_I(ρ) = P_I((1 - p_I) ρ + p_I tr(ρ) 𝟙/3) P_I` with `p_I = 0.05 (3 - |I|)`.
pub fn depolarize_then_project_blockers() -> Vec<BlockingMap> {
    SUBSETS3
        .iter()
        .map(|s| {
            let p = 0.05 * (3 - s.len()) as f64;
            depolarize_then_project(s, p)
        })
        .collect()
}

/// Kraus form of depolarizing with strength `p` followed by opening `open`.
pub fn depolarize_then_project(open: &[usize], p: f64) -> BlockingMap {
    let proj = slit_projector(3, open).expect("valid subset");
    let mut kraus = vec![&proj * c((1.0 - p).sqrt(), 0.0)];
    let w = (p / 3.0).sqrt();
    for i in 0..3 {
        for j in 0..3 {
            let mut e = CMatrix::zeros(3, 3);
            e[(i, j)] = c(w, 0.0);
            kraus.push(&proj * e);
        }
    }
    BlockingMap::new(kraus).expect("trace-preserving before projection")
}

/// The fixed nonzero instance: `ρ = Q = |ψ⟩⟨ψ|` with `ψ = (1,1,1)/√3`, blockers from
/// [`rotated_blockers`] at `θ = 0.1`.
pub fn rotated_blocker_instance() -> (CMatrix, Vec<BlockingMap>, CMatrix) {
    let s = 1.0 / 3f64.sqrt();
    let psi = linalg::outer(&[c(s, 0.0), c(s, 0.0), c(s, 0.0)]);
    (psi.clone(), rotated_blockers(0.1), psi)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockerJson {
    pub subset: Vec<usize>,
    pub kraus: Vec<Grid>,
}

/// Parses `{"blockers": [{"subset": [..], "kraus": [grid, ..]}, ..]}` into [`SUBSETS3`] order.
pub fn blockers_from_json(text: &str) -> Result<Vec<BlockingMap>> {
    #[derive(Deserialize)]
    struct Doc {
        blockers: Vec<BlockerJson>,
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| Error::InvalidKraus(e.to_string()))?;
    let mut out = Vec::with_capacity(7);
    for subset in SUBSETS3 {
        let entry = doc
            .blockers
            .iter()
            .find(|b| {
                let mut s = b.subset.clone();
                s.sort_unstable();
                s == subset
            })
            .ok_or_else(|| Error::InvalidKraus(format!("no blocker for subset {subset:?}")))?;
        let kraus = entry.kraus.iter().map(grid_to_matrix).collect::<Result<_>>()?;
        out.push(BlockingMap::new(kraus)?);
    }
    Ok(out)
}

pub fn blockers_to_json(blockers: &[BlockingMap]) -> String {
    #[derive(Serialize)]
    struct Doc {
        blockers: Vec<BlockerJson>,
    }
    let doc = Doc {
        blockers: SUBSETS3
            .iter()
            .zip(blockers)
            .map(|(s, b)| BlockerJson {
                subset: s.to_vec(),
                kraus: b.kraus.iter().map(matrix_to_grid).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("blockers serialize")
}

/// Density matrix `G G† / tr(G G†)` with a complex Gaussian `G`.
pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    let m = &g * g.adjoint();
    let t = linalg::trace(&m);
    m / t
}

/// Effect `U diag(λ) U†` with `λ` uniform in `[0, 1]` and a random eigenbasis.
pub fn random_effect<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let basis = random_density(n, rng);
    let (_, u) = linalg::hermitian_eigen(&basis);
    let lam = CMatrix::from_fn(n, n, |i, j| if i == j { c(rng.random::<f64>(), 0.0) } else { c(0.0, 0.0) });
    &u * lam * u.adjoint()
}

/// Density matrix diagonal in the slit basis, weights uniform on the simplex.
pub fn random_diagonal_density<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(w[i] / total, 0.0) } else { c(0.0, 0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus2() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        linalg::outer(&[c(s, 0.0), c(s, 0.0)])
    }

    #[test]
    fn full_opening_with_identity_detector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let exp = SlitExperiment::new(3, random_density(3, &mut rng), linalg::identity(3)).unwrap();
        assert!((click_probability(&exp, &[1, 2, 3]).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(click_probability(&exp, &[]), Err(Error::EmptySubset)));
        assert!(click_probability(&exp, &[4]).is_err());
    }

    #[test]
    fn diagonal_state_adds_up() {
        let rho = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.2, 0.0),
            c(0.3, 0.0),
            c(0.5, 0.0),
        ]));
        let exp = SlitExperiment::new(3, rho, linalg::identity(3)).unwrap();
        assert!((click_probability(&exp, &[1, 3]).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn plus_state_double_slit() {
        let exp = SlitExperiment::new(2, plus2(), plus2()).unwrap();
        assert!((click_probability(&exp, &[1, 2]).unwrap() - 1.0).abs() < 1e-15);
        assert!((click_probability(&exp, &[1]).unwrap() - 0.25).abs() < 1e-15);
        assert!((click_probability(&exp, &[2]).unwrap() - 0.25).abs() < 1e-15);
        assert!((sorkin_i2(&exp).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(sorkin_i3(&exp), Err(Error::WrongSlitCount { expected: 3, got: 2 })));
    }

    #[test]
    fn orthogonal_blockers_match_plain_i3() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(3, &mut rng);
        let q = random_effect(3, &mut rng);
        let exp = SlitExperiment::new(3, rho.clone(), q.clone()).unwrap();
        let plain = sorkin_i3(&exp).unwrap();
        let blocked = sorkin_i3_with_blockers(&rho, &orthogonal_blockers(), &q).unwrap();
        assert!((plain - blocked).abs() < 1e-14);
        assert!(blocked.abs() < 1e-12);
    }

    #[test]
    fn rotated_instance_value() {
        let (rho, blockers, q) = rotated_blocker_instance();
        let i3 = sorkin_i3_with_blockers(&rho, &blockers, &q).unwrap();
        // Only P_1 changes: |<v|ψ>|^4 with v = (cos 0.1, sin 0.1, 0), minus the canonical 1/9.
        let overlap2 = (0.1f64.cos() + 0.1f64.sin()).powi(2) / 3.0;
        assert!((i3 - (overlap2 * overlap2 - 1.0 / 9.0)).abs() < 1e-14);
        assert!(i3.abs() > 1e-6);
    }

    #[test]
    fn uniform_depolarizing_keeps_i3_zero() {
        let (rho, _, q) = rotated_blocker_instance();
        let uniform: Vec<BlockingMap> =
            SUBSETS3.iter().map(|s| depolarize_then_project(s, 0.1)).collect();
        assert!(sorkin_i3_with_blockers(&rho, &uniform, &q).unwrap().abs() < 1e-14);
        let graded = sorkin_i3_with_blockers(&rho, &depolarize_then_project_blockers(), &q).unwrap();
        assert!(graded.abs() > 1e-6);
    }

    #[test]
    fn invalid_kraus_rejected() {
        assert!(matches!(
            BlockingMap::new(vec![linalg::identity(3) * c(1.1, 0.0)]),
            Err(Error::InvalidKraus(_))
        ));
        assert!(matches!(BlockingMap::new(vec![]), Err(Error::InvalidKraus(_))));
        let (rho, _, q) = rotated_blocker_instance();
        assert!(sorkin_i3_with_blockers(&rho, &orthogonal_blockers()[..6], &q).is_err());
    }

    #[test]
    fn json_forms_parse_back() {
        let exp = SlitExperiment::new(2, plus2(), plus2()).unwrap();
        assert_eq!(SlitExperiment::from_json(&exp.to_json()).unwrap(), exp);
        let b = rotated_blockers(0.1);
        assert_eq!(blockers_from_json(&blockers_to_json(&b)).unwrap(), b);
    }

    #[test]
    fn decomposition_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r = decomposition_residual(&random_density(3, &mut rng)).unwrap();
            assert!(r.iter().all(|z| z.norm() < 1e-13));
        }
    }

    #[test]
    fn i2_and_i3_are_affine_in_state_and_detector() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let (r1, r2) = (random_density(3, &mut rng), random_density(3, &mut rng));
            let (q1, q2) = (random_effect(3, &mut rng), random_effect(3, &mut rng));
            let t: f64 = rng.random();
            let i3 = |r: &CMatrix, q: &CMatrix| sorkin_i3(&SlitExperiment::new(3, r.clone(), q.clone()).unwrap()).unwrap();
            let mixed_r = &r1 * c(t, 0.0) + &r2 * c(1.0 - t, 0.0);
            let mixed_q = &q1 * c(t, 0.0) + &q2 * c(1.0 - t, 0.0);
            assert!((i3(&mixed_r, &q1) - (t * i3(&r1, &q1) + (1.0 - t) * i3(&r2, &q1))).abs() < 1e-12);
            assert!((i3(&r1, &mixed_q) - (t * i3(&r1, &q1) + (1.0 - t) * i3(&r1, &q2))).abs() < 1e-12);
            let (s1, s2) = (random_density(2, &mut rng), random_density(2, &mut rng));
            let q = random_effect(2, &mut rng);
            let i2 = |r: &CMatrix| sorkin_i2(&SlitExperiment::new(2, r.clone(), q.clone()).unwrap()).unwrap();
            let mixed = &s1 * c(t, 0.0) + &s2 * c(1.0 - t, 0.0);
            assert!((i2(&mixed) - (t * i2(&s1) + (1.0 - t) * i2(&s2))).abs() < 1e-12);
        }
    }
}
