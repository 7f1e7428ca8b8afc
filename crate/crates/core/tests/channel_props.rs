mod common;

use common::*;
use proptest::prelude::*;
use qfilter_core::channels::ChannelJson;
use qfilter_core::{CliffordTableau, PauliChannel};

/// ρ ↦ Σ p_P P ρ P† with the test-side Pauli matrices.
fn apply(ch: &PauliChannel, rho: &M) -> M {
    let d = rho.nrows();
    let mut out = M::zeros(d, d);
    for (q, w) in ch.iter() {
        let m = matrix(q);
        out += &m * rho * m.adjoint() * c(w, 0.0);
    }
    out
}

fn random_input(n: usize, seed: u64) -> M {
    use rand::Rng;
    let mut r = rng(seed);
    let d = 1 << n;
    M::from_fn(d, d, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

proptest! {
    #[test]
    fn compose_matches_dense(a in arb_pauli_channel(2), b in arb_pauli_channel(2), seed in any::<u64>()) {
        let rho = random_input(2, seed);
        let ab = PauliChannel::compose(&a, &b).unwrap();
        prop_assert!(close(&apply(&ab, &rho), &apply(&b, &apply(&a, &rho))));
        prop_assert!((ab.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_matches_dense(ch in arb_pauli_channel(2), circ in arb_circuit(2, 8), seed in any::<u64>()) {
        let rho = random_input(2, seed);
        let u = circuit_oracle(&circ);
        let t = CliffordTableau::from_circuit(&circ).unwrap();
        let conj = ch.conjugate(&t).unwrap();
        let want = &u * apply(&ch, &(u.adjoint() * &rho * &u)) * u.adjoint();
        prop_assert!(close(&apply(&conj, &rho), &want));
        prop_assert!((conj.fidelity() - ch.fidelity()).abs() < 1e-12);
    }

    #[test]
    fn tensor_and_fidelity(a in arb_pauli_channel(1), b in arb_pauli_channel(2)) {
        let t = a.tensor(&b);
        prop_assert_eq!(t.n_qubits(), 3);
        prop_assert!((t.fidelity() - a.fidelity() * b.fidelity()).abs() < 1e-12);
        prop_assert!((t.total() - 1.0).abs() < 1e-12);
        let f = t.fidelity();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((t.average_fidelity() - (8.0 * f + 1.0) / 9.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip(ch in arb_pauli_channel(2)) {
        let text = serde_json::to_string(&ch.to_json()).unwrap();
        let back: ChannelJson = serde_json::from_str(&text).unwrap();
        let back = PauliChannel::from_json(&back).unwrap();
        prop_assert!(back.max_abs_diff(&ch) == 0.0);
    }
}

#[test]
fn normalization_is_enforced() {
    assert!(PauliChannel::new(1, [(p("I"), 0.5), (p("X"), 0.4)]).is_err());
    assert!(PauliChannel::new(1, [(p("I"), 1.1), (p("X"), -0.1)]).is_err());
    assert!(PauliChannel::depolarizing(2, 1.2).is_err());
    let d = PauliChannel::depolarizing(2, 0.3).unwrap();
    assert!((d.fidelity() - 0.49).abs() < 1e-15);
    assert!((d.prob(&p("XY")) - 0.01).abs() < 1e-15);
}
