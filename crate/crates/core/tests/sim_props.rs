mod common;

use common::*;
use proptest::prelude::*;
use qfilter_core::analytics::f_critical;
use qfilter_core::channels::dense::CMatrix;
use qfilter_core::filters::commutation_filter;
use qfilter_core::noisy_sim::*;
use qfilter_core::{CliffordCircuit, PauliChannel};

const SEEDS: [u64; 5] = [1, 2, 3, 5, 8];
const SHOTS: u64 = 100_000;

fn within_3_sigma(est: f64, exact: f64, n: u64) -> bool {
    let exact = exact.clamp(0.0, 1.0);
    let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
    (est - exact).abs() <= 3.0 * sigma + 1e-12
}

/// Exact (accept probability, fidelity) from the dense simulator.
fn exact(c: &NoisyCircuit, u: &CMatrix) -> (f64, f64) {
    let run = dense_oracle_run(c).unwrap();
    (run.accept_probability, run.accepted.unwrap().entanglement_fidelity(u))
}

fn check(c: &NoisyCircuit, u: &CMatrix) {
    let (ps, f) = exact(c, u);
    for seed in SEEDS {
        let r = monte_carlo(c, SHOTS, seed).unwrap();
        assert!(within_3_sigma(r.postselect_rate, ps, r.shots), "seed {seed}: rate {} vs {ps}", r.postselect_rate);
        assert!(within_3_sigma(r.fidelity_estimate, f, r.accepted), "seed {seed}: F {} vs {f}", r.fidelity_estimate);
    }
}

#[test]
fn commutation_filter_rate_matches_exact() {
    let ch = PauliChannel::depolarizing(1, 0.3).unwrap();
    let (b0, _) = commutation_filter(&ch, &p("Z")).unwrap();
    let mut c = build_commutation_filter_circuit(&p("Z"), FaultModel::depolarizing([0], 0.3), 0.0, 0.0).unwrap();
    c.postselect(0, 0).unwrap();
    for seed in SEEDS {
        let r = monte_carlo(&c, SHOTS, seed).unwrap();
        assert!(within_3_sigma(r.postselect_rate, b0.probability, SHOTS));
        assert!(within_3_sigma(r.fidelity_estimate, b0.channel.as_ref().unwrap().fidelity(), r.accepted));
    }
}

#[test]
fn noisy_circuits_match_dense_oracle() {
    let id = CMatrix::identity(2, 2);
    // correction filter with noisy gates: 1 system + 2 ancillae
    let c = build_correction_filter_circuit(1, 0.05, 0.02, FaultModel::depolarizing([0], 0.1)).unwrap();
    check(&c, &id);

    // two-ancilla filter around a one-qubit Clifford with noisy filter gates
    let circ = CliffordCircuit::from_text(1, "H 0\nS 0").unwrap();
    let u = circuit_oracle(&circ);
    let noise = AeNoise { pc_filter: 0.03, pt_filter: 0.02, ..AeNoise::default() };
    let c = build_ae_filter_circuit(&circ, noise, Some(FaultModel::depolarizing([0], 0.2))).unwrap();
    check(&c, &u);

    // two system qubits with a noisy circuit gate and idle ancilla noise is
    // too large for the dense path; use a bare two-qubit circuit instead
    let circ = CliffordCircuit::from_text(2, "CX 0 1\nH 1\nCZ 1 0").unwrap();
    let u = circuit_oracle(&circ);
    let c = build_bare_circuit(&circ, 0.04, 0.07, Some(FaultModel::depolarizing([0, 1], 0.02))).unwrap();
    check(&c, &u);
}

#[test]
fn weight_two_fault_survives_filter() {
    let circ = CliffordCircuit::from_text(2, "CX 0 1").unwrap();
    let xx = PauliChannel::pauli(&p("XX"));
    let c = build_ae_filter_circuit(&circ, AeNoise::default(), Some(FaultModel::Pauli { qubits: vec![0, 1], channel: xx }))
        .unwrap();
    let r = monte_carlo(&c, 1000, 4).unwrap();
    assert_eq!((r.accepted, r.identity_residual), (1000, 0));
    let site = c.site_with_stream(CHANNEL_STREAM).unwrap();
    let fp = propagate_fault(&c, site, &p("XXII")).unwrap();
    assert_eq!(fp.flips, vec![0, 0]);
    assert_eq!(fp.system_residual(2), p("XX"));

    // a weight-one fault is always caught
    let fp = propagate_fault(&c, site, &p("XIII")).unwrap();
    assert!(fp.flips.contains(&1));
}

#[test]
fn zero_noise_is_perfect() {
    let circ = qfilter_core::brickwork_circuit(6, 5).unwrap();
    let c = build_ae_filter_circuit(&circ, AeNoise::uniform(0.0), None).unwrap();
    let r = monte_carlo(&c, 5000, 1).unwrap();
    assert_eq!(r.postselect_rate, 1.0);
    assert_eq!(r.fidelity_estimate, 1.0);
}

#[test]
fn noisy_single_qubit_correction_beats_critical_fidelity() {
    let c = build_correction_filter_circuit(1, 0.01, 0.01, FaultModel::depolarizing([0], 0.1)).unwrap();
    let r = monte_carlo(&c, 1_000_000, 17).unwrap();
    let bound = f_critical(0.01, 0.01).unwrap();
    assert!(r.fidelity_estimate >= bound - 3.0 * r.fidelity_stderr, "{} < {bound}", r.fidelity_estimate);
}

#[test]
fn determinism() {
    let circ = qfilter_core::brickwork_circuit(8, 6).unwrap();
    let c = build_ae_filter_circuit(&circ, AeNoise::uniform(0.01), None).unwrap();
    let a = monte_carlo(&c, 20_000, 99).unwrap();
    let b = monte_carlo(&c, 20_000, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_ne!(a, monte_carlo(&c, 20_000, 100).unwrap());
}

#[test]
fn kraus_sites_are_rejected_by_sampler() {
    let c = build_t_filter_circuit(&PauliChannel::depolarizing(1, 0.1).unwrap()).unwrap();
    assert!(monte_carlo(&c, 10, 0).is_err());
}

fn arb_local_channel() -> impl Strategy<Value = PauliChannel> {
    arb_pauli_channel(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noiseless_correction_fixes_every_trajectory(chs in prop::collection::vec(arb_local_channel(), 1..4), seed in any::<u64>()) {
        let n = chs.len();
        let mut ch = chs[0].clone();
        for c in &chs[1..] {
            ch = ch.tensor(c);
        }
        let c = build_correction_filter_circuit(n, 0.0, 0.0, FaultModel::Pauli { qubits: (0..n).collect(), channel: ch }).unwrap();
        let r = monte_carlo(&c, 2000, seed).unwrap();
        prop_assert_eq!(r.identity_residual, r.shots);
    }

    #[test]
    fn counts_are_ordered(seed in any::<u64>(), p in 0.0f64..0.3) {
        let circ = qfilter_core::brickwork_circuit(4, 3).unwrap();
        let c = build_ae_filter_circuit(&circ, AeNoise::uniform(p), None).unwrap();
        let r = monte_carlo(&c, 500, seed).unwrap();
        prop_assert!(r.identity_residual <= r.accepted && r.accepted <= r.shots);
        prop_assert!((0.0..=1.0).contains(&r.fidelity_estimate));
        prop_assert!((0.0..=1.0).contains(&r.postselect_rate));
    }

    #[test]
    fn propagation_is_linear(site_pick in any::<prop::sample::Index>(), a in arb_pauli(3), b in arb_pauli(3)) {
        // residuals multiply and outcome flips add mod 2
        let c = build_correction_filter_circuit(1, 0.0, 0.0, FaultModel::depolarizing([0], 0.0)).unwrap();
        let site = site_pick.index(c.fault_sites().len());
        let ra = propagate_fault(&c, site, &a).unwrap();
        let rb = propagate_fault(&c, site, &b).unwrap();
        let rab = propagate_fault(&c, site, &a.multiply(&b).unwrap()).unwrap();
        prop_assert_eq!(rab.residual, ra.residual.multiply(&rb.residual).unwrap().unsigned());
        let xor: Vec<u8> = ra.flips.iter().zip(&rb.flips).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(rab.flips, xor);
    }
}
