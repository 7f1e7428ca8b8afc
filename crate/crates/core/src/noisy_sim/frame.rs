//! Pauli-frame tracking. Because every gate is Clifford and every sampled
//! fault is a Pauli, a trajectory is fully described by the Pauli frame
//! relative to the noiseless run; measurement outcomes are the reference
//! outcomes XOR the frame's Z bit on the measured ancilla.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::CounterRng;
use super::{Element, FaultModel, NoisyCircuit};
use crate::clifford::Gate;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub shots: u64,
    pub accepted: u64,
    pub identity_residual: u64,
    pub fidelity_estimate: f64,
    pub postselect_rate: f64,
    pub fidelity_stderr: f64,
    pub postselect_stderr: f64,
    pub seed: u64,
}

fn binomial_stderr(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

impl SimResult {
    pub fn new(shots: u64, accepted: u64, identity_residual: u64, seed: u64) -> SimResult {
        assert!(identity_residual <= accepted && accepted <= shots);
        let ratio = |k: u64, n: u64| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        SimResult {
            shots,
            accepted,
            identity_residual,
            fidelity_estimate: ratio(identity_residual, accepted),
            postselect_rate: ratio(accepted, shots),
            fidelity_stderr: binomial_stderr(identity_residual, accepted),
            postselect_stderr: binomial_stderr(accepted, shots),
            seed,
        }
    }
}

/// Effect of one injected fault on a noiseless run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultPropagation {
    /// Net Pauli left on the register at the end (measured qubits cleared).
    pub residual: PauliString,
    /// One entry per outcome bit: 1 if that outcome flips.
    pub flips: Vec<u8>,
}

impl FaultPropagation {
    /// The residual restricted to the system qubits.
    pub fn system_residual(&self, n_system: usize) -> PauliString {
        self.residual.restrict(&(0..n_system).collect::<Vec<_>>())
    }
}

/// Inject `fault` (on the full register) at fault site number `site` and push
/// it through the rest of the circuit.
pub fn propagate_fault(circ: &NoisyCircuit, site: usize, fault: &PauliString) -> Result<FaultPropagation> {
    let sites = circ.fault_sites();
    let Some(&start) = sites.get(site) else {
        return Err(Error::InvalidArgument(format!("fault site {site} out of range ({} sites)", sites.len())));
    };
    let n = circ.n_total();
    if fault.n_qubits() != n {
        return Err(Error::DimensionMismatch(fault.n_qubits(), n));
    }
    let sys: Vec<usize> = (0..circ.n_system()).collect();
    let mut frame = fault.unsigned();
    let mut flips = vec![0u8; circ.bit_names().len()];
    for e in &circ.elements()[start + 1..] {
        match e {
            Element::Gate(g) => g.conjugate(&mut frame),
            Element::Fault(_) => {}
            Element::MeasureX { qubit, bit } => {
                flips[*bit] = frame.z_bit(*qubit) as u8;
                frame.set_letter(*qubit, Pauli::I);
            }
            Element::ConditionalPauli { bit, pauli } => {
                if flips[*bit] == 1 {
                    frame = pauli.embed(n, &sys)?.mul_unchecked(&frame);
                }
            }
        }
    }
    Ok(FaultPropagation { residual: frame.unsigned(), flips })
}

// ---- compiled form for sampling ----

#[derive(Clone, Copy)]
enum Op {
    H(usize),
    S(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    Cy(usize, usize),
    Sample(usize),
    Measure(usize, usize),
    Cond(usize, usize),
}

/// Cumulative table over joint Pauli outcomes of one fault site, identity
/// first, most likely outcomes early.
struct SiteTable {
    stream: u64,
    cum: Vec<f64>,
    /// For each non-identity outcome: (qubit, x, z) flips.
    outcomes: Vec<Vec<(usize, bool, bool)>>,
}

fn site_table(stream: u64, model: &FaultModel) -> Result<Option<SiteTable>> {
    // joint distribution as a list of (prob, flips)
    let mut joint: Vec<(f64, Vec<(usize, bool, bool)>)> = vec![(1.0, Vec::new())];
    match model {
        FaultModel::Depolarizing(v) => {
            for &(q, p) in v {
                if p == 0.0 {
                    continue;
                }
                let mut next = Vec::with_capacity(joint.len() * 4);
                for (w, f) in &joint {
                    next.push((w * (1.0 - p), f.clone()));
                    for (x, z) in [(true, false), (true, true), (false, true)] {
                        let mut g = f.clone();
                        g.push((q, x, z));
                        next.push((w * p / 3.0, g));
                    }
                }
                joint = next;
            }
        }
        FaultModel::Pauli { qubits, channel } => {
            joint = channel
                .iter()
                .map(|(p, w)| {
                    let f = qubits
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| p.x_bit(*j) || p.z_bit(*j))
                        .map(|(j, &q)| (q, p.x_bit(j), p.z_bit(j)))
                        .collect::<Vec<_>>();
                    (w, f)
                })
                .collect();
        }
        FaultModel::Kraus { .. } => {
            return Err(Error::Unsupported("Kraus faults need the dense simulator".into()));
        }
    }
    let (id, mut rest): (Vec<_>, Vec<_>) = joint.into_iter().partition(|(_, f)| f.is_empty());
    if rest.iter().all(|(w, _)| *w == 0.0) {
        return Ok(None);
    }
    rest.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut cum = Vec::with_capacity(rest.len() + 1);
    let mut acc: f64 = id.iter().map(|(w, _)| w).sum();
    cum.push(acc);
    let mut outcomes = Vec::with_capacity(rest.len());
    for (w, f) in rest {
        acc += w;
        cum.push(acc);
        outcomes.push(f);
    }
    Ok(Some(SiteTable { stream, cum, outcomes }))
}

struct Program {
    ops: Vec<Op>,
    tables: Vec<SiteTable>,
    conds: Vec<(Vec<u64>, Vec<u64>)>,
    words: usize,
    sys_mask: Vec<u64>,
    reference: Vec<u8>,
    postselect: Vec<(usize, u8)>,
    n_bits: usize,
}

fn compile(circ: &NoisyCircuit) -> Result<Program> {
    let n = circ.n_total();
    let words = n.div_ceil(64);
    let reference = circ.reference_outcomes()?;
    let mut ops = Vec::new();
    let mut tables = Vec::new();
    let mut conds = Vec::new();
    for e in circ.elements() {
        match e {
            Element::Gate(g) => match *g {
                Gate::H(q) => ops.push(Op::H(q)),
                Gate::S(q) => ops.push(Op::S(q)),
                Gate::X(_) | Gate::Y(_) | Gate::Z(_) => {}
                Gate::CX(c, t) => ops.push(Op::Cx(c, t)),
                Gate::CZ(a, b) => ops.push(Op::Cz(a, b)),
                Gate::CY(c, t) => ops.push(Op::Cy(c, t)),
            },
            Element::Fault(site) => {
                if let Some(t) = site_table(site.stream, &site.model)? {
                    ops.push(Op::Sample(tables.len()));
                    tables.push(t);
                }
            }
            Element::MeasureX { qubit, bit } => ops.push(Op::Measure(*qubit, *bit)),
            Element::ConditionalPauli { bit, pauli } => {
                let sys: Vec<usize> = (0..circ.n_system()).collect();
                let full = pauli.embed(n, &sys)?;
                ops.push(Op::Cond(*bit, conds.len()));
                conds.push((full.x_words().to_vec(), full.z_words().to_vec()));
            }
        }
    }
    let mut sys_mask = vec![0u64; words];
    for q in 0..circ.n_system() {
        sys_mask[q / 64] |= 1 << (q % 64);
    }
    Ok(Program {
        ops,
        tables,
        conds,
        words,
        sys_mask,
        reference,
        postselect: circ.postselection().to_vec(),
        n_bits: circ.bit_names().len(),
    })
}

#[inline]
fn get(v: &[u64], q: usize) -> bool {
    (v[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
fn flip(v: &mut [u64], q: usize, b: bool) {
    v[q >> 6] ^= (b as u64) << (q & 63);
}

struct Scratch {
    x: Vec<u64>,
    z: Vec<u64>,
    flips: Vec<u8>,
}

impl Program {
    /// Returns (accepted, identity residual) for one shot.
    fn shot(&self, rng: &CounterRng, shot: u64, s: &mut Scratch) -> (bool, bool) {
        s.x.iter_mut().for_each(|w| *w = 0);
        s.z.iter_mut().for_each(|w| *w = 0);
        s.flips.iter_mut().for_each(|b| *b = 0);
        let r = rng.shot(shot);
        let (x, z) = (&mut s.x, &mut s.z);
        for op in &self.ops {
            match *op {
                Op::H(q) => {
                    let (a, b) = (get(x, q), get(z, q));
                    flip(x, q, a ^ b);
                    flip(z, q, a ^ b);
                }
                Op::S(q) => {
                    let a = get(x, q);
                    flip(z, q, a);
                }
                Op::Cx(c, t) => {
                    let xc = get(x, c);
                    let zt = get(z, t);
                    flip(x, t, xc);
                    flip(z, c, zt);
                }
                Op::Cz(a, b) => {
                    let xa = get(x, a);
                    let xb = get(x, b);
                    flip(z, a, xb);
                    flip(z, b, xa);
                }
                Op::Cy(c, t) => {
                    // S† on t, CX, S on t; phases are irrelevant for the frame
                    let xt = get(x, t);
                    flip(z, t, xt);
                    let xc = get(x, c);
                    let zt = get(z, t);
                    flip(x, t, xc);
                    flip(z, c, zt);
                    let xt = get(x, t);
                    flip(z, t, xt);
                }
                Op::Sample(k) => {
                    let t = &self.tables[k];
                    let u = r.uniform(t.stream);
                    if u >= t.cum[0] {
                        // past the identity bucket; fall back to the last
                        // bucket if rounding leaves u above the final sum
                        let idx = t.cum[1..].iter().position(|&c| u < c).unwrap_or(t.outcomes.len() - 1);
                        for &(q, fx, fz) in &t.outcomes[idx] {
                            flip(x, q, fx);
                            flip(z, q, fz);
                        }
                    }
                }
                Op::Measure(q, bit) => {
                    s.flips[bit] = get(z, q) as u8;
                    let (a, b) = (get(x, q), get(z, q));
                    flip(x, q, a);
                    flip(z, q, b);
                }
                Op::Cond(bit, k) => {
                    if s.flips[bit] == 1 {
                        let (cx, cz) = &self.conds[k];
                        for w in 0..self.words {
                            x[w] ^= cx[w];
                            z[w] ^= cz[w];
                        }
                    }
                }
            }
        }
        let accepted = self
            .postselect
            .iter()
            .all(|&(b, v)| self.reference[b] ^ s.flips[b] == v);
        let clean = (0..self.words).all(|w| (x[w] | z[w]) & self.sys_mask[w] == 0);
        (accepted, accepted && clean)
    }
}

const CHUNK: u64 = 1 << 13;

/// Pauli-frame Monte Carlo. Every fault site draws one uniform per shot from
/// the counter RNG keyed by (seed, shot, site stream key), so the result does
/// not depend on the thread count.
pub fn monte_carlo(circ: &NoisyCircuit, shots: u64, seed: u64) -> Result<SimResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let prog = compile(circ)?;
    let rng = CounterRng::new(seed);
    let chunks = shots.div_ceil(CHUNK);
    let (acc, id) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = Scratch {
                x: vec![0; prog.words],
                z: vec![0; prog.words],
                flips: vec![0; prog.n_bits],
            };
            let (mut a, mut i) = (0u64, 0u64);
            for shot in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                let (ok, clean) = prog.shot(&rng, shot, &mut s);
                a += ok as u64;
                i += clean as u64;
            }
            (a, i)
        })
        .reduce(|| (0, 0), |l, r| (l.0 + r.0, l.1 + r.1));
    Ok(SimResult::new(shots, acc, id, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::PauliChannel;
    use crate::noisy_sim::*;

    #[test]
    fn noiseless_runs_are_perfect() {
        let c = build_correction_filter_circuit(2, 0.0, 0.0, FaultModel::depolarizing([0, 1], 0.0)).unwrap();
        let r = monte_carlo(&c, 1000, 1).unwrap();
        assert_eq!((r.accepted, r.identity_residual), (1000, 1000));
    }

    #[test]
    fn correction_filter_fixes_every_trajectory() {
        let c = build_correction_filter_circuit(1, 0.0, 0.0, FaultModel::depolarizing([0], 0.3)).unwrap();
        let r = monte_carlo(&c, 20_000, 5).unwrap();
        assert_eq!(r.fidelity_estimate, 1.0);
        assert_eq!(r.postselect_rate, 1.0);
    }

    #[test]
    fn commutation_filter_rate() {
        let mut c = build_commutation_filter_circuit(&"Z".parse().unwrap(), FaultModel::depolarizing([0], 0.3), 0.0, 0.0)
            .unwrap();
        c.postselect(0, 0).unwrap();
        let r = monte_carlo(&c, 100_000, 11).unwrap();
        assert!((r.postselect_rate - 0.8).abs() < 3.0 * r.postselect_stderr, "{r:?}");
        // accepted components are I and Z: fidelity 0.7/0.8
        assert!((r.fidelity_estimate - 0.875).abs() < 3.0 * r.fidelity_stderr, "{r:?}");
    }

    #[test]
    fn schedule_independent() {
        let c = build_correction_filter_circuit(2, 0.05, 0.02, FaultModel::depolarizing([0, 1], 0.1)).unwrap();
        let a = monte_carlo(&c, 30_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| monte_carlo(&c, 30_000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn pauli_fault_model() {
        let ch = PauliChannel::single_qubit(0.6, 0.4, 0.0, 0.0).unwrap();
        let mut c = NoisyCircuit::new(1, 0).unwrap();
        c.fault(0, FaultModel::Pauli { qubits: vec![0], channel: ch }).unwrap();
        let r = monte_carlo(&c, 50_000, 2).unwrap();
        assert!((r.fidelity_estimate - 0.6).abs() < 3.0 * r.fidelity_stderr);
    }

    #[test]
    fn table_entries() {
        let fz = build_table_filter_circuit(FilterKind::Z).unwrap();
        let fx = build_table_filter_circuit(FilterKind::X).unwrap();
        let d = propagate_fault(&fx, table_site("D").unwrap(), &"ZI".parse().unwrap()).unwrap();
        assert_eq!(d.residual.to_string(), "ZI");
        let i = propagate_fault(&fz, 0, &PauliString::identity(2)).unwrap();
        assert!(i.residual.is_identity());
        assert!(propagate_fault(&fz, 9, &PauliString::identity(2)).is_err());
    }
}
