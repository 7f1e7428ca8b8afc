//! Exact density-matrix evolution of small noisy circuits, branching on
//! every measurement. Used as the reference for the frame sampler and for
//! non-Pauli elements such as T gates or coherent channels.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Element, FaultModel, NoisyCircuit};
use crate::channels::dense::{
    check_size, embed_operator, gate_matrix, identity_matrix, pauli_matrix, CMatrix, DenseChannel, Superoperator,
    MAX_DENSE_QUBITS,
};
use crate::channels::PauliChannel;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug)]
pub struct DenseBranch {
    /// Actual measurement outcomes, indexed by outcome bit.
    pub bits: Vec<u8>,
    /// Unnormalized map from system input to system output on this branch.
    pub map: Superoperator,
    /// Branch probability for a maximally mixed system input.
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct DenseRun {
    pub n_system: usize,
    pub branches: Vec<DenseBranch>,
    /// Probability that the post-selection is met (maximally mixed input).
    pub accept_probability: f64,
    /// Accepted map renormalized by `accept_probability`; `None` if no
    /// branch is accepted.
    pub accepted: Option<Superoperator>,
}

impl DenseRun {
    /// Sum of the branch maps whose outcomes satisfy `keep`.
    pub fn sum_where(&self, keep: impl Fn(&[u8]) -> bool) -> Result<Superoperator> {
        let mut acc = Superoperator::zero(self.n_system)?;
        for b in self.branches.iter().filter(|b| keep(&b.bits)) {
            acc = acc.add(&b.map)?;
        }
        Ok(acc)
    }
}

fn kraus_of(model: &FaultModel, n: usize) -> Result<Vec<Vec<CMatrix>>> {
    // one Kraus set per independent factor
    let embed_set = |ch: &DenseChannel, qubits: &[usize]| -> Result<Vec<CMatrix>> {
        ch.kraus().iter().map(|k| embed_operator(k, qubits, n)).collect()
    };
    match model {
        FaultModel::Depolarizing(v) => v
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|&(q, p)| embed_set(&DenseChannel::from_pauli(&PauliChannel::depolarizing(1, p)?)?, &[q]))
            .collect(),
        FaultModel::Pauli { qubits, channel } => Ok(vec![embed_set(&DenseChannel::from_pauli(channel)?, qubits)?]),
        FaultModel::Kraus { qubits, channel } => Ok(vec![embed_set(channel, qubits)?]),
    }
}

enum Step {
    Unitary(CMatrix),
    Channel(Vec<CMatrix>),
    Measure(CMatrix, CMatrix, usize),
    Cond(usize, CMatrix),
}

/// Exact simulation of a circuit on at most three qubits in total.
pub fn dense_oracle_run(circ: &NoisyCircuit) -> Result<DenseRun> {
    let n = circ.n_total();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!("{n} qubits exceed the dense limit of {MAX_DENSE_QUBITS}")));
    }
    let ns = circ.n_system();
    check_size(ns)?;
    let ds = 1usize << ns;
    let sys: Vec<usize> = (0..ns).collect();
    let half = Complex64::new(0.5, 0.0);

    let mut steps = Vec::new();
    for e in circ.elements() {
        match e {
            Element::Gate(g) => steps.push(Step::Unitary(gate_matrix(g, n)?)),
            Element::Fault(site) => {
                for set in kraus_of(&site.model, n)? {
                    steps.push(Step::Channel(set));
                }
            }
            Element::MeasureX { qubit, bit } => {
                let x = pauli_matrix(&PauliString::single(n, *qubit, Pauli::X)?);
                let id = identity_matrix(n);
                steps.push(Step::Measure((&id + &x) * half, (&id - &x) * half, *bit));
            }
            Element::ConditionalPauli { bit, pauli } => {
                steps.push(Step::Cond(*bit, pauli_matrix(&pauli.embed(n, &sys)?)));
            }
        }
    }

    let n_bits = circ.bit_names().len();
    let mut images: BTreeMap<Vec<u8>, Vec<CMatrix>> = BTreeMap::new();
    for i in 0..ds {
        for j in 0..ds {
            let mut rho = CMatrix::zeros(1 << n, 1 << n);
            rho[(i, j)] = Complex64::new(1.0, 0.0);
            let mut branches: Vec<(Vec<u8>, CMatrix)> = vec![(vec![0; n_bits], rho)];
            for step in &steps {
                match step {
                    Step::Unitary(u) => {
                        for (_, r) in branches.iter_mut() {
                            *r = u * &*r * u.adjoint();
                        }
                    }
                    Step::Channel(ks) => {
                        for (_, r) in branches.iter_mut() {
                            let mut out = CMatrix::zeros(r.nrows(), r.ncols());
                            for k in ks {
                                out += k * &*r * k.adjoint();
                            }
                            *r = out;
                        }
                    }
                    Step::Measure(p0, p1, bit) => {
                        let mut next = Vec::with_capacity(branches.len() * 2);
                        for (bits, r) in branches {
                            let mut b1 = bits.clone();
                            b1[*bit] = 1;
                            next.push((bits, p0 * &r * p0));
                            next.push((b1, p1 * &r * p1));
                        }
                        branches = next;
                    }
                    Step::Cond(bit, p) => {
                        for (bits, r) in branches.iter_mut() {
                            if bits[*bit] == 1 {
                                *r = p * &*r * p;
                            }
                        }
                    }
                }
            }
            for (bits, r) in branches {
                let mut out = CMatrix::zeros(ds, ds);
                for k in 0..(1usize << (n - ns)) {
                    for a in 0..ds {
                        for b in 0..ds {
                            out[(a, b)] += r[(a + k * ds, b + k * ds)];
                        }
                    }
                }
                images.entry(bits).or_default().push(out);
            }
        }
    }

    let branches: Vec<DenseBranch> = images
        .into_iter()
        .map(|(bits, imgs)| {
            let map = Superoperator::from_images(ns, imgs);
            let probability = map.trace_on_mixed();
            DenseBranch { bits, map, probability }
        })
        .collect();
    let post = circ.postselection();
    let accept = |bits: &[u8]| post.iter().all(|&(b, v)| bits[b] == v);
    let mut run = DenseRun {
        n_system: ns,
        branches,
        accept_probability: 0.0,
        accepted: None,
    };
    let acc = run.sum_where(accept)?;
    let p = acc.trace_on_mixed();
    run.accept_probability = p;
    if p > 0.0 {
        run.accepted = Some(acc.scale(1.0 / p));
    }
    Ok(run)
}
