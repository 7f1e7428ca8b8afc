#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qfilter_core::channels::dense::{CMatrix, DenseChannel};
use qfilter_core::{CliffordCircuit, Gate, Pauli, PauliChannel, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn p(s: &str) -> PauliString {
    s.parse().unwrap()
}

pub fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n), 0u8..4)
        .prop_map(|(x, z, k)| PauliString::from_bits(&x, &z, k).unwrap())
}

pub fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
    let single = (0..n, 0usize..5).prop_map(|(q, k)| match k {
        0 => Gate::H(q),
        1 => Gate::S(q),
        2 => Gate::X(q),
        3 => Gate::Y(q),
        _ => Gate::Z(q),
    });
    if n < 2 {
        return single.boxed();
    }
    let pair = (0..n, 1..n, 0usize..3).prop_map(move |(a, off, k)| {
        let b = (a + off) % n;
        match k {
            0 => Gate::CX(a, b),
            1 => Gate::CZ(a, b),
            _ => Gate::CY(a, b),
        }
    });
    prop_oneof![single, pair].boxed()
}

pub fn arb_circuit(n: usize, max_len: usize) -> impl Strategy<Value = CliffordCircuit> {
    prop::collection::vec(arb_gate(n), 0..=max_len).prop_map(move |g| CliffordCircuit::from_gates(n, g).unwrap())
}

/// Random Pauli channel on n qubits with every component present.
pub fn arb_pauli_channel(n: usize) -> impl Strategy<Value = PauliChannel> {
    prop::collection::vec(0.001f64..1.0, 1 << (2 * n)).prop_map(move |w| random_channel_from(n, &w))
}

fn random_channel_from(n: usize, w: &[f64]) -> PauliChannel {
    let paulis: Vec<_> = qfilter_core::enumerate_paulis(n, None).unwrap().collect();
    PauliChannel::from_weights(n, paulis.into_iter().zip(w.iter().copied())).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Pauli channel with a sparse or dense support.
pub fn random_pauli_channel(n: usize, r: &mut ChaCha8Rng) -> PauliChannel {
    let w: Vec<f64> = (0..1 << (2 * n))
        .map(|_| if r.gen_bool(0.3) { 0.0 } else { r.gen::<f64>() })
        .collect();
    let mut w = w;
    w[0] += 0.5;
    random_channel_from(n, &w)
}

/// Random CPTP map from a random isometry of Kraus rank `rank`.
pub fn random_dense_channel(n: usize, rank: usize, r: &mut ChaCha8Rng) -> DenseChannel {
    let d = 1usize << n;
    let g = DMatrix::from_fn(rank * d, d, |_, _| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let q = g.qr().q();
    let kraus: Vec<CMatrix> = (0..rank).map(|k| q.rows(k * d, d).into_owned()).collect();
    DenseChannel::new(n, kraus).unwrap()
}

/// exp(iθX) on one qubit.
pub fn x_rotation(theta: f64) -> DenseChannel {
    let c = Complex64::new(theta.cos(), 0.0);
    let s = Complex64::new(0.0, theta.sin());
    DenseChannel::from_unitary(1, DMatrix::from_row_slice(2, 2, &[c, s, s, c])).unwrap()
}

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent matrix model: Kronecker product with qubit 0 as the least
/// significant index bit, times the overall phase i^k read off the text form.
pub fn matrix(ps: &PauliString) -> M {
    let one = |l: Pauli| -> M {
        match l {
            Pauli::I => M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
            Pauli::X => M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            Pauli::Y => M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            Pauli::Z => M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        }
    };
    let mut m = M::from_element(1, 1, c(1., 0.));
    for q in 0..ps.n_qubits() {
        m = one(ps.letter(q)).kronecker(&m);
    }
    let text = ps.to_string();
    let phase = if text.starts_with("-i") {
        c(0., -1.)
    } else if text.starts_with('-') {
        c(-1., 0.)
    } else if text.starts_with("+i") {
        c(0., 1.)
    } else {
        c(1., 0.)
    };
    m * phase
}

pub fn close(a: &M, b: &M) -> bool {
    (a - b).iter().all(|v| v.norm() < 1e-12)
}


fn single(n: usize, q: usize, l: Pauli) -> M {
    matrix(&PauliString::single(n, q, l).unwrap())
}

/// Gate unitaries assembled from Pauli matrices, without the library's
/// gate table: controlled-P = (I + Z_c)/2 + (I − Z_c)/2 · P_t.
pub fn gate_oracle(g: &Gate, n: usize) -> M {
    let d = 1usize << n;
    let id = M::identity(d, d);
    let half = c(0.5, 0.0);
    let controlled = |ctl: usize, t: usize, l: Pauli| {
        let zc = single(n, ctl, Pauli::Z);
        (&id + &zc) * half + (&id - &zc) * half * single(n, t, l)
    };
    match *g {
        Gate::H(q) => (single(n, q, Pauli::X) + single(n, q, Pauli::Z)) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Gate::S(q) => {
            let z = single(n, q, Pauli::Z);
            (&id + &z) * half + (&id - &z) * c(0.0, 0.5)
        }
        Gate::X(q) => single(n, q, Pauli::X),
        Gate::Y(q) => single(n, q, Pauli::Y),
        Gate::Z(q) => single(n, q, Pauli::Z),
        Gate::CX(a, b) => controlled(a, b, Pauli::X),
        Gate::CY(a, b) => controlled(a, b, Pauli::Y),
        Gate::CZ(a, b) => controlled(a, b, Pauli::Z),
    }
}

pub fn circuit_oracle(circ: &CliffordCircuit) -> M {
    let d = 1usize << circ.n_qubits();
    circ.gates().iter().fold(M::identity(d, d), |u, g| gate_oracle(g, circ.n_qubits()) * u)
}
