//! Classical tables sit inside the quantum set, which sits inside the no-signalling set.

use gptkit::bell::{self, ProbTable222, QubitBellSetup, TSIRELSON};
use gptkit::linalg::{self, c};
use proptest::prelude::*;

#[test]
fn every_deterministic_table_is_a_diagonal_quantum_table() {
    let ket00 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let state = linalg::outer(&ket00);
    let z = linalg::pauli_z();
    for k in 0..16 {
        let (f, g) = bell::deterministic_strategy(k);
        let obs = |s: i8| &z * c(s as f64, 0.0);
        let setup = QubitBellSetup::from_observables(
            state.clone(),
            [obs(f[0]), obs(f[1])],
            [obs(g[0]), obs(g[1])],
        )
        .unwrap();
        let q = bell::quantum_table(&setup).unwrap();
        let d = bell::deterministic_table(f, g);
        assert!(q.distance(&d) < 1e-12, "strategy {k}");
        assert!(bell::is_nonsignalling(&d));
    }
}

#[test]
fn inclusions_are_strict() {
    let singlet = bell::quantum_table(&bell::singlet_setup()).unwrap();
    assert!(bell::is_nonsignalling(&singlet));
    assert!(bell::chsh(&singlet) > 2.0 + 1e-6);
    assert!(bell::classical_membership(&singlet).unwrap().is_none());

    let pr = bell::pr_box(0, 0, 0);
    assert!(bell::is_nonsignalling(&pr));
    assert!(bell::chsh(&pr) > TSIRELSON + 1e-6);
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 16).prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-3)
}

proptest! {
    #[test]
    fn local_mixtures_have_reproducing_models(w in weights()) {
        let total: f64 = w.iter().sum();
        let mut p = [0.0; 16];
        for (wk, t) in w.iter().zip(bell::deterministic_tables()) {
            for (pi, ti) in p.iter_mut().zip(t.entries()) {
                *pi += wk / total * ti;
            }
        }
        let table = ProbTable222::new(p).unwrap();
        let model = bell::classical_membership(&table).unwrap();
        prop_assert!(model.is_some());
        let mix = model.unwrap().mixture();
        let err = mix.iter().zip(table.entries()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-7);
    }

    #[test]
    fn mixing_toward_pr_box_leaves_local_set_past_two(t in 0.0f64..1.0) {
        // (1 - t) uniform + t PR has CHSH 4t; it is local iff 4t <= 2.
        let pr = bell::pr_box(0, 0, 0);
        let u = ProbTable222::uniform();
        let mut p = [0.0; 16];
        for ((pi, ui), ri) in p.iter_mut().zip(u.entries()).zip(pr.entries()) {
            *pi = (1.0 - t) * ui + t * ri;
        }
        let table = ProbTable222::new(p).unwrap();
        let value = bell::chsh(&table);
        prop_assert!((value - 4.0 * t).abs() < 1e-12);
        let local = bell::classical_membership(&table).unwrap().is_some();
        if value > 2.0 + 1e-6 {
            prop_assert!(!local);
        } else if value < 2.0 - 1e-6 {
            prop_assert!(local);
        }
    }
}
