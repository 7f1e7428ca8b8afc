//! Physical filter circuits with noisy gates: construction, fault
//! propagation, Pauli-frame Monte Carlo and a dense reference simulator.
//!
//! Register layout: system qubits are `0..n_system`, ancillae follow.

mod builders;
mod dense_run;
mod frame;
pub mod rng;

use std::collections::BTreeSet;

pub use builders::*;
pub use dense_run::{dense_oracle_run, DenseBranch, DenseRun};
pub use frame::{monte_carlo, propagate_fault, FaultPropagation, SimResult};

use crate::channels::dense::DenseChannel;
use crate::channels::PauliChannel;
use crate::clifford::Gate;
use crate::error::{check_rate, Error, Result};
use crate::pauli::PauliString;

/// What a fault site does to the qubits it lists.
#[derive(Clone, Debug)]
pub enum FaultModel {
    /// Independent depolarizing noise with its own rate on each listed qubit.
    Depolarizing(Vec<(usize, f64)>),
    /// A joint Pauli channel on the listed qubits (qubit j of the channel is `qubits[j]`).
    Pauli { qubits: Vec<usize>, channel: PauliChannel },
    /// Arbitrary Kraus map; only the dense oracle can simulate it.
    Kraus { qubits: Vec<usize>, channel: DenseChannel },
}

impl FaultModel {
    pub fn depolarizing(qubits: impl IntoIterator<Item = usize>, p: f64) -> FaultModel {
        FaultModel::Depolarizing(qubits.into_iter().map(|q| (q, p)).collect())
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            FaultModel::Depolarizing(v) => v.iter().map(|(q, _)| *q).collect(),
            FaultModel::Pauli { qubits, .. } | FaultModel::Kraus { qubits, .. } => qubits.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FaultModel::Depolarizing(v) => {
                for (_, p) in v {
                    check_rate("depolarizing rate", *p)?;
                }
            }
            FaultModel::Pauli { qubits, channel } => {
                if channel.n_qubits() != qubits.len() {
                    return Err(Error::DimensionMismatch(channel.n_qubits(), qubits.len()));
                }
            }
            FaultModel::Kraus { qubits, channel } => {
                let d = channel.kraus()[0].nrows();
                if d != 1 << qubits.len() {
                    return Err(Error::DimensionMismatch(d, 1 << qubits.len()));
                }
            }
        }
        let qs = self.qubits();
        let distinct: BTreeSet<_> = qs.iter().collect();
        if distinct.len() != qs.len() {
            return Err(Error::InvalidArgument("fault site lists a qubit twice".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FaultSite {
    /// Random-number stream key. Sites that should see identical samples in
    /// two different circuits (common random numbers) share a key.
    pub stream: u64,
    pub model: FaultModel,
}

#[derive(Clone, Debug)]
pub enum Element {
    Gate(Gate),
    Fault(FaultSite),
    /// X-basis measurement of an ancilla into outcome bit `bit`.
    MeasureX { qubit: usize, bit: usize },
    /// Apply `pauli` (on the system register) when outcome `bit` is 1.
    ConditionalPauli { bit: usize, pauli: PauliString },
}

#[derive(Clone, Debug)]
pub struct NoisyCircuit {
    n_system: usize,
    n_ancilla: usize,
    elements: Vec<Element>,
    bit_names: Vec<String>,
    postselect: Vec<(usize, u8)>,
    measured: Vec<bool>,
    streams: BTreeSet<u64>,
}

impl NoisyCircuit {
    pub fn new(n_system: usize, n_ancilla: usize) -> Result<NoisyCircuit> {
        if n_system == 0 {
            return Err(Error::InvalidArgument("need at least one system qubit".into()));
        }
        Ok(NoisyCircuit {
            n_system,
            n_ancilla,
            elements: Vec::new(),
            bit_names: Vec::new(),
            postselect: Vec::new(),
            measured: vec![false; n_system + n_ancilla],
            streams: BTreeSet::new(),
        })
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_total(&self) -> usize {
        self.n_system + self.n_ancilla
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn bit_names(&self) -> &[String] {
        &self.bit_names
    }

    pub fn postselection(&self) -> &[(usize, u8)] {
        &self.postselect
    }

    /// Index of the `k`-th ancilla in the full register.
    pub fn ancilla(&self, k: usize) -> usize {
        self.n_system + k
    }

    fn check_live(&self, q: usize) -> Result<()> {
        if q >= self.n_total() {
            return Err(Error::QubitOutOfRange { index: q, n: self.n_total() });
        }
        if self.measured[q] {
            return Err(Error::InvalidArgument(format!("qubit {q} is used after its measurement")));
        }
        Ok(())
    }

    pub fn gate(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n_total())?;
        for q in g.qubits() {
            self.check_live(q)?;
        }
        self.elements.push(Element::Gate(g));
        Ok(())
    }

    pub fn gates(&mut self, gs: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gs {
            self.gate(g)?;
        }
        Ok(())
    }

    pub fn fault(&mut self, stream: u64, model: FaultModel) -> Result<()> {
        model.validate()?;
        for q in model.qubits() {
            self.check_live(q)?;
        }
        if !self.streams.insert(stream) {
            return Err(Error::InvalidArgument(format!("stream key {stream} used twice")));
        }
        self.elements.push(Element::Fault(FaultSite { stream, model }));
        Ok(())
    }

    /// Gate followed by depolarizing noise: rate `pc` on the first operand
    /// (control) and `pt` on the second (target) of a two-qubit gate.
    /// Single-qubit gates are noiseless.
    pub fn noisy_gate(&mut self, g: Gate, pc: f64, pt: f64, stream: u64) -> Result<()> {
        self.gate(g)?;
        if g.is_two_qubit() {
            let q = g.qubits();
            self.fault(stream, FaultModel::Depolarizing(vec![(q[0], pc), (q[1], pt)]))?;
        }
        Ok(())
    }

    pub fn measure_x(&mut self, qubit: usize, name: &str) -> Result<usize> {
        self.check_live(qubit)?;
        if qubit < self.n_system {
            return Err(Error::InvalidArgument(format!("qubit {qubit} is a system qubit")));
        }
        if self.bit_names.iter().any(|b| b == name) {
            return Err(Error::InvalidArgument(format!("outcome bit {name:?} already exists")));
        }
        let bit = self.bit_names.len();
        self.bit_names.push(name.to_string());
        self.measured[qubit] = true;
        self.elements.push(Element::MeasureX { qubit, bit });
        Ok(bit)
    }

    pub fn conditional_pauli(&mut self, bit: usize, pauli: PauliString) -> Result<()> {
        if bit >= self.bit_names.len() {
            return Err(Error::InvalidArgument(format!("outcome bit {bit} not measured yet")));
        }
        if pauli.n_qubits() != self.n_system {
            return Err(Error::DimensionMismatch(pauli.n_qubits(), self.n_system));
        }
        self.elements.push(Element::ConditionalPauli { bit, pauli });
        Ok(())
    }

    /// Accept a shot only when outcome `bit` equals `value`.
    pub fn postselect(&mut self, bit: usize, value: u8) -> Result<()> {
        if bit >= self.bit_names.len() || value > 1 {
            return Err(Error::InvalidArgument(format!("bad post-selection ({bit}, {value})")));
        }
        self.postselect.push((bit, value));
        Ok(())
    }

    /// Element indices of the fault sites, in circuit order.
    pub fn fault_sites(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Element::Fault(_)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Ordinal of the fault site with the given stream key.
    pub fn site_with_stream(&self, stream: u64) -> Option<usize> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                Element::Fault(f) => Some(f.stream),
                _ => None,
            })
            .position(|s| s == stream)
    }

    /// Outcome of every measurement when no fault fires.
    ///
    /// Each measured X is pulled back to the start of the circuit through
    /// the ideal gates; it has to end up as ±(Z-type on ancillae only), whose
    /// sign on |0…0⟩ fixes the outcome independently of the system input.
    pub fn reference_outcomes(&self) -> Result<Vec<u8>> {
        let n = self.n_total();
        let mut refs = vec![0u8; self.bit_names.len()];
        for (k, e) in self.elements.iter().enumerate() {
            let Element::MeasureX { qubit, bit } = e else { continue };
            let mut obs = PauliString::single(n, *qubit, crate::pauli::Pauli::X)?;
            for earlier in self.elements[..k].iter().rev() {
                match earlier {
                    Element::Gate(g) => g.conjugate_inverse(&mut obs),
                    Element::Fault(_) => {}
                    Element::MeasureX { qubit: q, .. } => {
                        if obs.x_bit(*q) != obs.z_bit(*q) || obs.z_bit(*q) {
                            return Err(Error::NonDeterministic(format!(
                                "outcome {} depends on an earlier measurement",
                                self.bit_names[*bit]
                            )));
                        }
                    }
                    Element::ConditionalPauli { bit: b, pauli } => {
                        if refs[*b] == 1 {
                            let full = pauli.embed(n, &(0..self.n_system).collect::<Vec<_>>())?;
                            if !obs.commutes_unchecked(&full) {
                                obs.add_phase(2);
                            }
                        }
                    }
                }
            }
            let sys_clean = (0..self.n_system).all(|q| !obs.x_bit(q) && !obs.z_bit(q));
            let z_only = (0..n).all(|q| !obs.x_bit(q));
            if !sys_clean || !z_only {
                return Err(Error::NonDeterministic(format!(
                    "outcome {} is not fixed by the initial ancilla state (observable {obs})",
                    self.bit_names[*bit]
                )));
            }
            refs[*bit] = match obs.phase_exp() {
                0 => 0,
                2 => 1,
                _ => return Err(Error::NonDeterministic("non-Hermitian observable".into())),
            };
        }
        Ok(refs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut c = NoisyCircuit::new(1, 1).unwrap();
        assert!(c.gate(Gate::CX(0, 2)).is_err());
        assert!(c.measure_x(0, "m").is_err());
        c.gate(Gate::H(1)).unwrap();
        assert!(c.conditional_pauli(0, "X".parse().unwrap()).is_err());
        let m = c.measure_x(1, "m").unwrap();
        assert!(c.gate(Gate::H(1)).is_err());
        assert!(c.measure_x(1, "m2").is_err());
        c.conditional_pauli(m, "X".parse().unwrap()).unwrap();
        assert!(c.conditional_pauli(m, "XX".parse().unwrap()).is_err());
        c.fault(3, FaultModel::depolarizing([0], 0.1)).unwrap();
        assert!(c.fault(3, FaultModel::depolarizing([0], 0.1)).is_err());
        assert!(c.fault(4, FaultModel::depolarizing([0], 1.5)).is_err());
        assert!(c.postselect(m, 2).is_err());
    }

    #[test]
    fn reference_outcomes() {
        let mut c = NoisyCircuit::new(1, 1).unwrap();
        c.gates([Gate::H(1), Gate::CZ(1, 0), Gate::CZ(1, 0)]).unwrap();
        c.measure_x(1, "m").unwrap();
        assert_eq!(c.reference_outcomes().unwrap(), vec![0]);

        let mut c = NoisyCircuit::new(1, 1).unwrap();
        c.gates([Gate::H(1), Gate::Z(1)]).unwrap();
        c.measure_x(1, "m").unwrap();
        assert_eq!(c.reference_outcomes().unwrap(), vec![1]);

        // outcome depends on the system state
        let mut c = NoisyCircuit::new(1, 1).unwrap();
        c.gates([Gate::H(1), Gate::CZ(1, 0)]).unwrap();
        c.measure_x(1, "m").unwrap();
        assert!(c.reference_outcomes().is_err());
    }
}
