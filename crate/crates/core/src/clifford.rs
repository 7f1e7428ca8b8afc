//! Clifford gates, circuits and tableaux.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Gate library. `CY` is not needed by brickwork circuits but appears when a
/// backward-propagated Pauli with Y letters has to be applied conditionally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CY(usize, usize),
    CZ(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::CX(a, b) | Gate::CY(a, b) | Gate::CZ(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::CX(..) | Gate::CY(..) | Gate::CZ(..))
    }

    pub fn is_pauli(&self) -> bool {
        matches!(self, Gate::X(_) | Gate::Y(_) | Gate::Z(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::CX(..) => "CX",
            Gate::CY(..) => "CY",
            Gate::CZ(..) => "CZ",
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidArgument(format!("{self}: operands must differ")));
        }
        Ok(())
    }

    /// Forward conjugation in place: p ← G p G†.
    pub fn conjugate(&self, p: &mut PauliString) {
        match *self {
            Gate::H(q) => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                if x && z {
                    p.add_phase(2);
                }
                p.set_bits(q, z, x);
            }
            Gate::S(q) => s_conj(p, q, 1),
            Gate::X(q) => {
                if p.z_bit(q) {
                    p.add_phase(2)
                }
            }
            Gate::Z(q) => {
                if p.x_bit(q) {
                    p.add_phase(2)
                }
            }
            Gate::Y(q) => {
                if p.x_bit(q) ^ p.z_bit(q) {
                    p.add_phase(2)
                }
            }
            Gate::CX(c, t) => {
                let (xc, zt) = (p.x_bit(c), p.z_bit(t));
                let (xt, zc) = (p.x_bit(t), p.z_bit(c));
                p.set_bits(t, xt ^ xc, zt);
                p.set_bits(c, xc, zc ^ zt);
            }
            Gate::CZ(a, b) => {
                let (xa, za, xb, zb) = (p.x_bit(a), p.z_bit(a), p.x_bit(b), p.z_bit(b));
                if xa && xb {
                    p.add_phase(2);
                }
                p.set_bits(a, xa, za ^ xb);
                p.set_bits(b, xb, zb ^ xa);
            }
            Gate::CY(c, t) => {
                // CY = S_t · CX · S_t†
                s_conj(p, t, 3);
                Gate::CX(c, t).conjugate(p);
                s_conj(p, t, 1);
            }
        }
    }

    /// Backward conjugation in place: p ← G† p G.
    pub fn conjugate_inverse(&self, p: &mut PauliString) {
        match *self {
            Gate::S(q) => s_conj(p, q, 3),
            _ => self.conjugate(p),
        }
    }
}

/// Conjugation by S (k = 1) or S† (k = 3): X ↦ ±Y, Z fixed.
fn s_conj(p: &mut PauliString, q: usize, k: u8) {
    let (x, z) = (p.x_bit(q), p.z_bit(q));
    if x {
        p.add_phase(k);
        p.set_bits(q, x, !z);
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                write!(f, "{} {}", self.name(), q)
            }
            Gate::CX(a, b) | Gate::CY(a, b) | Gate::CZ(a, b) => write!(f, "{} {} {}", self.name(), a, b),
        }
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Gate, String> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let arg = |i: usize| -> std::result::Result<usize, String> {
            toks.get(i)
                .ok_or_else(|| format!("missing operand for {}", toks[0]))?
                .parse::<usize>()
                .map_err(|e| format!("bad qubit index: {e}"))
        };
        let name = toks.first().ok_or("empty gate")?.to_ascii_uppercase();
        let (gate, arity) = match name.as_str() {
            "H" => (Gate::H(arg(1)?), 1),
            "S" => (Gate::S(arg(1)?), 1),
            "X" => (Gate::X(arg(1)?), 1),
            "Y" => (Gate::Y(arg(1)?), 1),
            "Z" => (Gate::Z(arg(1)?), 1),
            "CX" | "CNOT" => (Gate::CX(arg(1)?, arg(2)?), 2),
            "CY" => (Gate::CY(arg(1)?, arg(2)?), 2),
            "CZ" => (Gate::CZ(arg(1)?, arg(2)?), 2),
            other => return Err(format!("unknown gate {other:?}")),
        };
        if toks.len() != arity + 1 {
            return Err(format!("{name} takes {arity} operand(s)"));
        }
        Ok(gate)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n: usize) -> CliffordCircuit {
        CliffordCircuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<CliffordCircuit> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(CliffordCircuit { n, gates })
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Parses one gate per line. Blank lines and `#` comments are skipped.
    pub fn from_text(n: usize, text: &str) -> Result<CliffordCircuit> {
        let mut c = CliffordCircuit::new(n);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let g: Gate = line
                .parse()
                .map_err(|msg| Error::ParseCircuit { line: i + 1, msg })?;
            c.push(g).map_err(|e| Error::ParseCircuit {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }
}

/// Layered nearest-neighbour CX circuit. Layer 1, 3, … pairs (0,1),(2,3),…;
/// layer 2, 4, … pairs (1,2),(3,4),…; the lower index is the control.
pub fn brickwork_circuit(n: usize, depth: usize) -> Result<CliffordCircuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("brickwork needs n >= 2, got {n}")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("brickwork depth must be >= 1".into()));
    }
    let mut gates = Vec::new();
    for layer in 1..=depth {
        let start = if layer % 2 == 1 { 0 } else { 1 };
        let mut a = start;
        while a + 1 < n {
            gates.push(Gate::CX(a, a + 1));
            a += 2;
        }
    }
    CliffordCircuit::from_gates(n, gates)
}

/// Gates implementing |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ P with `control` outside the
/// support of `p`. Letters are applied in ascending qubit order and a sign
/// on `p` becomes a phase gate on the control.
pub fn controlled_pauli_gates(control: usize, p: &PauliString) -> Result<Vec<Gate>> {
    if control < p.n_qubits() && p.letter(control) != Pauli::I {
        return Err(Error::InvalidArgument("control lies in the Pauli's support".into()));
    }
    let mut gates = Vec::new();
    for q in 0..p.n_qubits() {
        match p.letter(q) {
            Pauli::I => {}
            Pauli::X => gates.push(Gate::CX(control, q)),
            Pauli::Y => gates.push(Gate::CY(control, q)),
            Pauli::Z => gates.push(Gate::CZ(control, q)),
        }
    }
    match p.letter_phase_exp() {
        0 => {}
        1 => gates.push(Gate::S(control)),
        2 => gates.push(Gate::Z(control)),
        _ => {
            gates.push(Gate::Z(control));
            gates.push(Gate::S(control));
        }
    }
    Ok(gates)
}

/// Clifford map stored as images of the generators under C·C† and C†·C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    image_x: Vec<PauliString>,
    image_z: Vec<PauliString>,
    inv_x: Vec<PauliString>,
    inv_z: Vec<PauliString>,
}

fn generators(n: usize) -> (Vec<PauliString>, Vec<PauliString>) {
    let xs = (0..n).map(|q| PauliString::single(n, q, Pauli::X).unwrap()).collect();
    let zs = (0..n).map(|q| PauliString::single(n, q, Pauli::Z).unwrap()).collect();
    (xs, zs)
}

fn apply_images(gens_x: &[PauliString], gens_z: &[PauliString], p: &PauliString) -> PauliString {
    let n = p.n_qubits();
    let mut out = PauliString::identity(n).with_phase(p.phase_exp());
    for q in 0..n {
        if p.x_bit(q) {
            out = out.mul_unchecked(&gens_x[q]);
        }
    }
    for q in 0..n {
        if p.z_bit(q) {
            out = out.mul_unchecked(&gens_z[q]);
        }
    }
    out
}

impl CliffordTableau {
    pub fn identity(n: usize) -> CliffordTableau {
        let (xs, zs) = generators(n);
        CliffordTableau {
            n,
            image_x: xs.clone(),
            image_z: zs.clone(),
            inv_x: xs,
            inv_z: zs,
        }
    }

    pub fn from_circuit(circ: &CliffordCircuit) -> Result<CliffordTableau> {
        for g in circ.gates() {
            g.validate(circ.n_qubits())?;
        }
        let mut t = CliffordTableau::identity(circ.n_qubits());
        for g in circ.gates() {
            for p in t.image_x.iter_mut().chain(t.image_z.iter_mut()) {
                g.conjugate(p);
            }
        }
        for g in circ.gates().iter().rev() {
            for p in t.inv_x.iter_mut().chain(t.inv_z.iter_mut()) {
                g.conjugate_inverse(p);
            }
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn image_x(&self) -> &[PauliString] {
        &self.image_x
    }

    pub fn image_z(&self) -> &[PauliString] {
        &self.image_z
    }

    fn check(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(Error::DimensionMismatch(self.n, p.n_qubits()));
        }
        Ok(())
    }

    /// C P C†.
    pub fn conjugate_forward(&self, p: &PauliString) -> Result<PauliString> {
        self.check(p)?;
        Ok(apply_images(&self.image_x, &self.image_z, p))
    }

    /// C† P C.
    pub fn conjugate_backward(&self, p: &PauliString) -> Result<PauliString> {
        self.check(p)?;
        Ok(apply_images(&self.inv_x, &self.inv_z, p))
    }

    pub fn inverse(&self) -> CliffordTableau {
        CliffordTableau {
            n: self.n,
            image_x: self.inv_x.clone(),
            image_z: self.inv_z.clone(),
            inv_x: self.image_x.clone(),
            inv_z: self.image_z.clone(),
        }
    }

    /// The map "apply `first`, then `second`".
    pub fn compose(first: &CliffordTableau, second: &CliffordTableau) -> Result<CliffordTableau> {
        if first.n != second.n {
            return Err(Error::DimensionMismatch(first.n, second.n));
        }
        let fwd = |p: &PauliString| apply_images(&second.image_x, &second.image_z, p);
        let bwd = |p: &PauliString| apply_images(&first.inv_x, &first.inv_z, p);
        Ok(CliffordTableau {
            n: first.n,
            image_x: first.image_x.iter().map(fwd).collect(),
            image_z: first.image_z.iter().map(fwd).collect(),
            inv_x: second.inv_x.iter().map(bwd).collect(),
            inv_z: second.inv_z.iter().map(bwd).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        let (xs, zs) = generators(self.n);
        self.image_x == xs && self.image_z == zs
    }
}
