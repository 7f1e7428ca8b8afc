//! Stochastic Pauli channels.

pub mod dense;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordTableau;
use crate::error::{check_rate, Error, Result};
use crate::pauli::{enumerate_paulis, Pauli, PauliString, MAX_ENUM_QUBITS};

pub const NORM_TOL: f64 = 1e-12;
pub const RENORM_DRIFT_TOL: f64 = 1e-9;

/// Compensated (Neumaier) summation.
pub fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Probability map over sign-free Pauli labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel {
    n: usize,
    probs: BTreeMap<PauliString, f64>,
}

impl PauliChannel {
    /// Builds a channel from (label, probability) pairs; repeated labels add up.
    pub fn new(n: usize, entries: impl IntoIterator<Item = (PauliString, f64)>) -> Result<PauliChannel> {
        let ch = PauliChannel::collect(n, entries)?;
        let total = stable_sum(ch.probs.values().copied());
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(ch)
    }

    /// Builds a channel from non-negative weights, dividing by their total.
    pub fn from_weights(n: usize, entries: impl IntoIterator<Item = (PauliString, f64)>) -> Result<PauliChannel> {
        let mut ch = PauliChannel::collect(n, entries)?;
        let total = stable_sum(ch.probs.values().copied());
        if total <= 0.0 {
            return Err(Error::NotNormalized(total));
        }
        for v in ch.probs.values_mut() {
            *v /= total;
        }
        let drift = stable_sum(ch.probs.values().copied()) - 1.0;
        assert!(drift.abs() < RENORM_DRIFT_TOL, "renormalization drift {drift}");
        Ok(ch)
    }

    fn collect(n: usize, entries: impl IntoIterator<Item = (PauliString, f64)>) -> Result<PauliChannel> {
        let mut probs = BTreeMap::new();
        for (p, v) in entries {
            if p.n_qubits() != n {
                return Err(Error::DimensionMismatch(n, p.n_qubits()));
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("probability {v} for {p}")));
            }
            if v > 0.0 {
                *probs.entry(p.unsigned()).or_insert(0.0) += v;
            }
        }
        Ok(PauliChannel { n, probs })
    }

    pub fn identity(n: usize) -> PauliChannel {
        PauliChannel::pauli(&PauliString::identity(n))
    }

    /// The unitary channel ρ ↦ PρP†.
    pub fn pauli(p: &PauliString) -> PauliChannel {
        let mut probs = BTreeMap::new();
        probs.insert(p.unsigned(), 1.0);
        PauliChannel { n: p.n_qubits(), probs }
    }

    /// Single-qubit channel with probabilities for I, X, Y, Z.
    pub fn single_qubit(pi: f64, px: f64, py: f64, pz: f64) -> Result<PauliChannel> {
        let e = |l| PauliString::from_letters(&[l]);
        PauliChannel::new(1, [(e(Pauli::I), pi), (e(Pauli::X), px), (e(Pauli::Y), py), (e(Pauli::Z), pz)])
    }

    /// n-fold tensor power of {I: 1−p, X: p/3, Y: p/3, Z: p/3}.
    pub fn depolarizing(n: usize, p: f64) -> Result<PauliChannel> {
        check_rate("p", p)?;
        let one = PauliChannel::single_qubit(1.0 - p, p / 3.0, p / 3.0, p / 3.0)?;
        PauliChannel::tensor_power(&one, n)
    }

    pub fn tensor_power(ch: &PauliChannel, k: usize) -> Result<PauliChannel> {
        if k == 0 {
            return Err(Error::InvalidArgument("tensor power needs k >= 1".into()));
        }
        if ch.n * k > MAX_ENUM_QUBITS && ch.probs.len() > 1 {
            return Err(Error::TooLarge(format!(
                "expanding a {}-qubit product channel; use the symmetric engine",
                ch.n * k
            )));
        }
        let mut out = ch.clone();
        for _ in 1..k {
            out = out.tensor(ch);
        }
        Ok(out)
    }

    /// `self ⊗ other` with `self` on the low qubits.
    pub fn tensor(&self, other: &PauliChannel) -> PauliChannel {
        let mut probs = BTreeMap::new();
        for (a, pa) in &self.probs {
            for (b, pb) in &other.probs {
                *probs.entry(a.tensor(b).unsigned()).or_insert(0.0) += pa * pb;
            }
        }
        PauliChannel { n: self.n + other.n, probs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn prob(&self, p: &PauliString) -> f64 {
        self.probs.get(&p.unsigned()).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &BTreeMap<PauliString, f64> {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.probs.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        stable_sum(self.probs.values().copied())
    }

    /// Probability on the identity Pauli (entanglement fidelity).
    pub fn fidelity(&self) -> f64 {
        self.prob(&PauliString::identity(self.n))
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity()
    }

    /// Single-qubit average fidelity from entanglement fidelity, F_avg = (d F + 1)/(d + 1).
    pub fn average_fidelity(&self) -> f64 {
        let d = (1u64 << self.n.min(62)) as f64;
        (d * self.fidelity() + 1.0) / (d + 1.0)
    }

    /// Apply `a` first, then `b`. Phases of the products are dropped.
    pub fn compose(a: &PauliChannel, b: &PauliChannel) -> Result<PauliChannel> {
        if a.n != b.n {
            return Err(Error::DimensionMismatch(a.n, b.n));
        }
        let mut probs = BTreeMap::new();
        for (p, pp) in &a.probs {
            for (q, pq) in &b.probs {
                *probs.entry(q.mul_unchecked(p).unsigned()).or_insert(0.0) += pp * pq;
            }
        }
        Ok(PauliChannel { n: a.n, probs })
    }

    /// Relabels every component P by C P C†.
    pub fn conjugate(&self, c: &CliffordTableau) -> Result<PauliChannel> {
        if c.n_qubits() != self.n {
            return Err(Error::DimensionMismatch(c.n_qubits(), self.n));
        }
        let mut probs = BTreeMap::new();
        for (p, v) in &self.probs {
            *probs.entry(c.conjugate_forward(p)?.unsigned()).or_insert(0.0) += v;
        }
        Ok(PauliChannel { n: self.n, probs })
    }

    /// Largest absolute probability difference over all labels of either channel.
    pub fn max_abs_diff(&self, other: &PauliChannel) -> f64 {
        let mut m: f64 = 0.0;
        for (k, v) in &self.probs {
            m = m.max((v - other.prob(k)).abs());
        }
        for (k, v) in &other.probs {
            m = m.max((v - self.prob(k)).abs());
        }
        m
    }

    /// Every label of the n-qubit Pauli group with its probability, zeros included.
    pub fn dense_probs(&self) -> Result<Vec<(PauliString, f64)>> {
        Ok(enumerate_paulis(self.n, None)?.map(|p| {
            let v = self.prob(&p);
            (p, v)
        }).collect())
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            n: self.n,
            probs: self.probs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn from_json(j: &ChannelJson) -> Result<PauliChannel> {
        let mut entries = Vec::new();
        for (k, v) in &j.probs {
            let p: PauliString = k.parse()?;
            if p.letter_phase_exp() != 0 {
                return Err(Error::ParsePauli(format!("channel keys carry no sign: {k}")));
            }
            entries.push((p, *v));
        }
        PauliChannel::new(j.n, entries)
    }
}

/// Serialized channel: {"n": 2, "probs": {"II": 0.9, "XZ": 0.1}}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub n: usize,
    pub probs: BTreeMap<String, f64>,
}

impl Serialize for PauliChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ChannelJson::deserialize(d)?;
        PauliChannel::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{CliffordCircuit, Gate};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn depolarizing_values() {
        let d = PauliChannel::depolarizing(1, 0.3).unwrap();
        assert!((d.prob(&p("I")) - 0.7).abs() < 1e-15);
        for l in ["X", "Y", "Z"] {
            assert!((d.prob(&p(l)) - 0.1).abs() < 1e-15);
        }
        assert_eq!(PauliChannel::depolarizing(1, 0.0).unwrap(), PauliChannel::identity(1));
        let d2 = PauliChannel::depolarizing(2, 0.2).unwrap();
        assert!((d2.fidelity() - 0.64).abs() < 1e-15);
        assert_eq!(d2.len(), 16);
        let d4 = PauliChannel::depolarizing(4, 0.01).unwrap();
        assert!((d4.fidelity() - 0.96059601).abs() < 1e-14);
        assert!(PauliChannel::depolarizing(1, 1.5).is_err());
        assert!(PauliChannel::depolarizing(12, 0.1).is_err());
    }

    #[test]
    fn compose_bit_flips() {
        let q = 0.2;
        let b = PauliChannel::new(1, [(p("I"), 1.0 - q), (p("X"), q)]).unwrap();
        let c = PauliChannel::compose(&b, &b).unwrap();
        assert!((c.prob(&p("I")) - (1.0 - 2.0 * q + 2.0 * q * q)).abs() < 1e-15);
        assert!((c.prob(&p("X")) - 2.0 * q * (1.0 - q)).abs() < 1e-15);
        assert_eq!(PauliChannel::compose(&PauliChannel::identity(1), &b).unwrap(), b);
    }

    #[test]
    fn conjugation() {
        let cx = CliffordTableau::from_circuit(&CliffordCircuit::from_gates(2, vec![Gate::CX(0, 1)]).unwrap()).unwrap();
        let ch = PauliChannel::pauli(&p("XI")).conjugate(&cx).unwrap();
        assert_eq!(ch, PauliChannel::pauli(&p("XX")));
        let h = CliffordTableau::from_circuit(&CliffordCircuit::from_gates(1, vec![Gate::H(0)]).unwrap()).unwrap();
        let d = PauliChannel::depolarizing(1, 0.3).unwrap();
        assert!(d.conjugate(&h).unwrap().max_abs_diff(&d) < 1e-15);
    }

    #[test]
    fn validation_and_json() {
        assert!(PauliChannel::new(1, [(p("I"), 0.5)]).is_err());
        assert!(PauliChannel::new(1, [(p("I"), 1.5), (p("X"), -0.5)]).is_err());
        assert!(PauliChannel::new(2, [(p("I"), 1.0)]).is_err());
        let d = PauliChannel::depolarizing(2, 0.1).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: PauliChannel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let j = r#"{"n":1,"probs":{"I":0.7,"X":0.1,"Y":0.1,"Z":0.1}}"#;
        let c: PauliChannel = serde_json::from_str(j).unwrap();
        assert!((c.fidelity() - 0.7).abs() < 1e-15);
        assert!(serde_json::from_str::<PauliChannel>(r#"{"n":1,"probs":{"-X":1.0}}"#).is_err());
    }

    #[test]
    fn renormalization() {
        let c = PauliChannel::from_weights(1, [(p("I"), 0.3), (p("Z"), 0.1)]).unwrap();
        assert!((c.fidelity() - 0.75).abs() < 1e-15);
        assert!(PauliChannel::from_weights(1, [(p("I"), 0.0)]).is_err());
    }
}
