//! Constructors for the physical filter circuits.

use super::{FaultModel, NoisyCircuit};
use crate::channels::dense::{t_gate_matrix, DenseChannel};
use crate::channels::PauliChannel;
use crate::clifford::{controlled_pauli_gates, CliffordCircuit, CliffordTableau, Gate};
use crate::error::{check_rate, Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Stream key of the fault after gate `k` of the main circuit. Shared by the
/// bare and the filtered circuit so the two see the same samples.
pub const CIRCUIT_STREAM_BASE: u64 = 0;
/// Stream keys of faults on filter gates.
pub const FILTER_STREAM_BASE: u64 = 1 << 40;
/// Stream key of the target channel (one per circuit).
pub const CHANNEL_STREAM: u64 = 2 << 40;
/// Stream keys of idle noise on the filter ancillae.
pub const IDLE_STREAM_BASE: u64 = 3 << 40;

/// Gate noise of the ancilla-efficient filter experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AeNoise {
    pub pc_filter: f64,
    pub pt_filter: f64,
    pub pc_circuit: f64,
    pub pt_circuit: f64,
    /// Depolarizing rate applied to both ancillae after every two-qubit gate
    /// of the main circuit. Zero keeps the ancillae idle and clean.
    pub idle: f64,
}

impl AeNoise {
    pub fn uniform(p: f64) -> AeNoise {
        AeNoise { pc_filter: p, pt_filter: p, pc_circuit: p, pt_circuit: p, idle: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("pc_filter", self.pc_filter)?;
        check_rate("pt_filter", self.pt_filter)?;
        check_rate("pc_circuit", self.pc_circuit)?;
        check_rate("pt_circuit", self.pt_circuit)?;
        check_rate("idle", self.idle)
    }
}

struct Counter(u64);

impl Counter {
    fn next(&mut self) -> u64 {
        self.0 += 1;
        FILTER_STREAM_BASE + self.0 - 1
    }
}

fn controlled_noisy(
    c: &mut NoisyCircuit,
    control: usize,
    p: &PauliString,
    pc: f64,
    pt: f64,
    streams: &mut Counter,
) -> Result<()> {
    for g in controlled_pauli_gates(control, p)? {
        c.noisy_gate(g, pc, pt, streams.next())?;
    }
    Ok(())
}

/// Per-qubit channel correction: every system qubit j gets an X filter
/// (ancilla `n + 2j`, outer) and a Z filter (ancilla `n + 2j + 1`, inner),
/// measured into bits `x{j}` and `z{j}`. A `z` flip is undone with X and an
/// `x` flip with Z. Nothing is post-selected.
pub fn build_correction_filter_circuit(n: usize, pc: f64, pt: f64, channel: FaultModel) -> Result<NoisyCircuit> {
    check_rate("pc", pc)?;
    check_rate("pt", pt)?;
    let mut c = NoisyCircuit::new(n, 2 * n)?;
    let mut s = Counter(0);
    let ax = |j: usize| n + 2 * j;
    let az = |j: usize| n + 2 * j + 1;
    for j in 0..n {
        c.gate(Gate::H(ax(j)))?;
        c.gate(Gate::H(az(j)))?;
    }
    for j in 0..n {
        c.noisy_gate(Gate::CX(ax(j), j), pc, pt, s.next())?;
        c.noisy_gate(Gate::CZ(az(j), j), pc, pt, s.next())?;
    }
    c.fault(CHANNEL_STREAM, channel)?;
    for j in 0..n {
        c.noisy_gate(Gate::CZ(az(j), j), pc, pt, s.next())?;
        c.noisy_gate(Gate::CX(ax(j), j), pc, pt, s.next())?;
    }
    for j in 0..n {
        let mx = c.measure_x(ax(j), &format!("x{j}"))?;
        let mz = c.measure_x(az(j), &format!("z{j}"))?;
        c.conditional_pauli(mz, PauliString::single(n, j, Pauli::X)?)?;
        c.conditional_pauli(mx, PauliString::single(n, j, Pauli::Z)?)?;
    }
    Ok(c)
}

/// Single commutation filter probing `probe`, outcome bit `m`.
pub fn build_commutation_filter_circuit(
    probe: &PauliString,
    channel: FaultModel,
    pc: f64,
    pt: f64,
) -> Result<NoisyCircuit> {
    build_successive_filtration_circuit(std::slice::from_ref(probe), channel, pc, pt)
}

/// Nested commutation filters, the first probe innermost (it acts on the
/// channel first). Outcome bits are `m0, m1, …` in probe order.
pub fn build_successive_filtration_circuit(
    probes: &[PauliString],
    channel: FaultModel,
    pc: f64,
    pt: f64,
) -> Result<NoisyCircuit> {
    check_rate("pc", pc)?;
    check_rate("pt", pt)?;
    let Some(first) = probes.first() else {
        return Err(Error::InvalidArgument("no probes".into()));
    };
    let n = first.n_qubits();
    let m = probes.len();
    if let Some(bad) = probes.iter().find(|p| p.n_qubits() != n) {
        return Err(Error::DimensionMismatch(bad.n_qubits(), n));
    }
    let mut c = NoisyCircuit::new(n, m)?;
    let mut s = Counter(0);
    for k in 0..m {
        c.gate(Gate::H(n + k))?;
    }
    for k in (0..m).rev() {
        controlled_noisy(&mut c, n + k, &probes[k], pc, pt, &mut s)?;
    }
    c.fault(CHANNEL_STREAM, channel)?;
    for k in 0..m {
        controlled_noisy(&mut c, n + k, &probes[k], pc, pt, &mut s)?;
    }
    for k in 0..m {
        c.measure_x(n + k, &format!("m{k}"))?;
    }
    Ok(c)
}

/// Main circuit gates with their faults, plus the optional extra channel.
fn push_main_circuit(
    c: &mut NoisyCircuit,
    circ: &CliffordCircuit,
    pc: f64,
    pt: f64,
    idle: Option<(f64, [usize; 2])>,
    channel: Option<FaultModel>,
) -> Result<()> {
    for (k, g) in circ.gates().iter().enumerate() {
        c.noisy_gate(*g, pc, pt, CIRCUIT_STREAM_BASE + k as u64)?;
        if let Some((rate, anc)) = idle {
            if g.is_two_qubit() && rate > 0.0 {
                c.fault(IDLE_STREAM_BASE + k as u64, FaultModel::depolarizing(anc, rate))?;
            }
        }
    }
    if let Some(ch) = channel {
        c.fault(CHANNEL_STREAM, ch)?;
    }
    Ok(())
}

/// The unfiltered noisy circuit. Uses the same stream keys as
/// [`build_ae_filter_circuit`] for its gates and channel.
pub fn build_bare_circuit(circ: &CliffordCircuit, pc: f64, pt: f64, channel: Option<FaultModel>) -> Result<NoisyCircuit> {
    check_rate("pc", pc)?;
    check_rate("pt", pt)?;
    let mut c = NoisyCircuit::new(circ.n_qubits(), 0)?;
    push_main_circuit(&mut c, circ, pc, pt, None, channel)?;
    Ok(c)
}

/// Two-ancilla filter around a Clifford circuit. Ancilla `n` controls the
/// Z-type SELECT, ancilla `n + 1` the X-type one. The backward-propagated
/// operators go in front of the circuit, the plain ones after it, and the
/// run is accepted on outcomes (0, 0).
pub fn build_ae_filter_circuit(circ: &CliffordCircuit, noise: AeNoise, channel: Option<FaultModel>) -> Result<NoisyCircuit> {
    noise.validate()?;
    let n = circ.n_qubits();
    let (a1, a2) = (n, n + 1);
    let tab = CliffordTableau::from_circuit(circ)?;
    let zn = PauliString::uniform(n, Pauli::Z);
    let xn = PauliString::uniform(n, Pauli::X);
    let zb = tab.conjugate_backward(&zn)?;
    let xb = tab.conjugate_backward(&xn)?;

    let mut c = NoisyCircuit::new(n, 2)?;
    let mut s = Counter(0);
    let (pc, pt) = (noise.pc_filter, noise.pt_filter);
    c.gate(Gate::H(a1))?;
    c.gate(Gate::H(a2))?;
    controlled_noisy(&mut c, a1, &zb, pc, pt, &mut s)?;
    controlled_noisy(&mut c, a2, &xb, pc, pt, &mut s)?;
    push_main_circuit(&mut c, circ, noise.pc_circuit, noise.pt_circuit, Some((noise.idle, [a1, a2])), channel)?;
    controlled_noisy(&mut c, a2, &xn, pc, pt, &mut s)?;
    controlled_noisy(&mut c, a1, &zn, pc, pt, &mut s)?;
    let m1 = c.measure_x(a1, "mz")?;
    let m2 = c.measure_x(a2, "mx")?;
    c.postselect(m1, 0)?;
    c.postselect(m2, 0)?;
    Ok(c)
}

/// Z filter around a T gate on one qubit with correction X on outcome 1.
/// `noise` is the Pauli channel following the T gate.
pub fn build_t_filter_circuit(noise: &PauliChannel) -> Result<NoisyCircuit> {
    if noise.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(noise.n_qubits(), 1));
    }
    let mut c = NoisyCircuit::new(1, 1)?;
    c.gate(Gate::H(1))?;
    c.gate(Gate::CZ(1, 0))?;
    let t = DenseChannel::from_unitary(1, t_gate_matrix())?;
    c.fault(CHANNEL_STREAM, FaultModel::Kraus { qubits: vec![0], channel: t })?;
    c.fault(CHANNEL_STREAM + 1, FaultModel::Pauli { qubits: vec![0], channel: noise.clone() })?;
    c.gate(Gate::CZ(1, 0))?;
    let m = c.measure_x(1, "m")?;
    c.conditional_pauli(m, PauliString::single(1, 0, Pauli::X)?)?;
    Ok(c)
}

/// Which single-qubit Pauli filter of the fault-propagation table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterKind {
    /// Probe Z, coherent correction CX.
    Z,
    /// Probe X, coherent correction CZ.
    X,
}

/// Fault locations in the single-qubit filter circuits, in circuit order:
/// A (ancilla) and B (target) after the first controlled gate, C (ancilla)
/// and D (target) after the second.
pub const TABLE_LOCATIONS: [&str; 4] = ["A", "B", "C", "D"];

/// Measurement-free single-qubit filter with a coherent correction, used to
/// tabulate fault propagation. System qubit 0 is the target, qubit 1 the
/// ancilla. Fault sites (ordinal 0..4) follow [`TABLE_LOCATIONS`], all at
/// rate zero.
pub fn build_table_filter_circuit(kind: FilterKind) -> Result<NoisyCircuit> {
    let (q, r) = (1, 0);
    let probe = match kind {
        FilterKind::Z => Gate::CZ(q, r),
        FilterKind::X => Gate::CX(q, r),
    };
    let fix = match kind {
        FilterKind::Z => Gate::CX(q, r),
        FilterKind::X => Gate::CZ(q, r),
    };
    let mut c = NoisyCircuit::new(1, 1)?;
    c.gate(Gate::H(q))?;
    c.gate(probe)?;
    c.fault(FILTER_STREAM_BASE, FaultModel::depolarizing([q], 0.0))?;
    c.fault(FILTER_STREAM_BASE + 1, FaultModel::depolarizing([r], 0.0))?;
    c.fault(FILTER_STREAM_BASE + 2, FaultModel::depolarizing([r], 0.0))?; // channel slot
    c.gate(probe)?;
    c.fault(FILTER_STREAM_BASE + 3, FaultModel::depolarizing([q], 0.0))?;
    c.fault(FILTER_STREAM_BASE + 4, FaultModel::depolarizing([r], 0.0))?;
    c.gate(Gate::H(q))?;
    c.gate(fix)?;
    Ok(c)
}

/// Fault-site ordinal of a table location in [`build_table_filter_circuit`].
pub fn table_site(location: &str) -> Option<usize> {
    match location {
        "A" => Some(0),
        "B" => Some(1),
        "C" => Some(3),
        "D" => Some(4),
        _ => None,
    }
}
