//! Dense matrix oracle for at most three qubits.
//!
//! Basis index bit `q` is the state of qubit `q`. Everything here is brute
//! force and only used to cross-check the Pauli-frame and channel algebra.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PauliChannel;
use crate::clifford::Gate;
use crate::error::{Error, Result};
use crate::pauli::{enumerate_paulis, PauliString};

pub type CMatrix = DMatrix<Complex64>;

pub const MAX_DENSE_QUBITS: usize = 3;
pub const TP_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!(
            "dense oracle supports 1..={MAX_DENSE_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

pub fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn identity_matrix(n: usize) -> CMatrix {
    CMatrix::identity(1 << n, 1 << n)
}

/// Matrix of `i^k X^x Z^z`: column b has the entry i^k (−1)^{|z∧b|} at row b⊕x.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let n = p.n_qubits();
    let d = 1usize << n;
    let mut xm = 0usize;
    let mut zm = 0usize;
    for q in 0..n {
        xm |= (p.x_bit(q) as usize) << q;
        zm |= (p.z_bit(q) as usize) << q;
    }
    let ph = i_pow(p.phase_exp());
    let mut m = CMatrix::zeros(d, d);
    for b in 0..d {
        let sign = if (zm & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[(b ^ xm, b)] = ph * sign;
    }
    m
}

/// Embeds a 2^k × 2^k operator acting on `qubits` (qubit j of the operator is
/// `qubits[j]`) into an n-qubit register.
pub fn embed_operator(op: &CMatrix, qubits: &[usize], n: usize) -> Result<CMatrix> {
    let k = qubits.len();
    if op.nrows() != 1 << k || op.ncols() != 1 << k {
        return Err(Error::DimensionMismatch(op.nrows(), 1 << k));
    }
    for &q in qubits {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
    }
    let d = 1usize << n;
    let local = |b: usize| -> usize {
        qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((b >> q) & 1) << j))
    };
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        let rest = col & !mask;
        let lc = local(col);
        for lr in 0..(1usize << k) {
            let v = op[(lr, lc)];
            if v == ZERO {
                continue;
            }
            let row = qubits.iter().enumerate().fold(rest, |acc, (j, &q)| acc | (((lr >> j) & 1) << q));
            m[(row, col)] = v;
        }
    }
    Ok(m)
}

fn small(rows: &[[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| rows[r][c])
}

pub fn gate_matrix(g: &Gate, n: usize) -> Result<CMatrix> {
    g.validate(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let single = |m: CMatrix, q: usize| embed_operator(&m, &[q], n);
    let controlled = |u: CMatrix, a: usize, b: usize| {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        // operator qubit 0 = control, qubit 1 = target; index = c + 2 t
        m[(2, 2)] = ONE;
        m[(1, 1)] = u[(0, 0)];
        m[(3, 1)] = u[(1, 0)];
        m[(1, 3)] = u[(0, 1)];
        m[(3, 3)] = u[(1, 1)];
        embed_operator(&m, &[a, b], n)
    };
    let x = small(&[[ZERO, ONE], [ONE, ZERO]]);
    let y = small(&[[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]);
    let z = small(&[[ONE, ZERO], [ZERO, c(-1.0, 0.0)]]);
    match *g {
        Gate::H(q) => single(small(&[[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]), q),
        Gate::S(q) => single(small(&[[ONE, ZERO], [ZERO, c(0.0, 1.0)]]), q),
        Gate::X(q) => single(x, q),
        Gate::Y(q) => single(y, q),
        Gate::Z(q) => single(z, q),
        Gate::CX(a, b) => controlled(x, a, b),
        Gate::CY(a, b) => controlled(y, a, b),
        Gate::CZ(a, b) => controlled(z, a, b),
    }
}

pub fn t_gate_matrix() -> CMatrix {
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    small(&[[ONE, ZERO], [ZERO, w]])
}

/// CCZ on three qubits.
pub fn ccz_matrix() -> CMatrix {
    let mut m = CMatrix::identity(8, 8);
    m[(7, 7)] = Complex64::new(-1.0, 0.0);
    m
}

/// Hilbert–Schmidt inner product Tr(A† B).
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// A linear map on operators of an n-qubit system.
pub trait LinearMap {
    fn n_qubits(&self) -> usize;
    fn apply_op(&self, op: &CMatrix) -> CMatrix;
}

/// Trace-preserving channel given by Kraus operators.
#[derive(Clone, Debug)]
pub struct DenseChannel {
    n: usize,
    kraus: Vec<CMatrix>,
}

impl DenseChannel {
    pub fn new(n: usize, kraus: Vec<CMatrix>) -> Result<DenseChannel> {
        check_size(n)?;
        let d = 1usize << n;
        let mut sum = CMatrix::zeros(d, d);
        for k in &kraus {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch(k.nrows(), d));
            }
            sum += k.adjoint() * k;
        }
        let err = (sum - CMatrix::identity(d, d)).norm();
        if err > TP_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not trace preserving (error {err:.3e})"
            )));
        }
        Ok(DenseChannel { n, kraus })
    }

    pub fn identity(n: usize) -> Result<DenseChannel> {
        DenseChannel::new(n, vec![identity_matrix(n)])
    }

    pub fn from_unitary(n: usize, u: CMatrix) -> Result<DenseChannel> {
        DenseChannel::new(n, vec![u])
    }

    pub fn from_pauli(ch: &PauliChannel) -> Result<DenseChannel> {
        check_size(ch.n_qubits())?;
        let kraus = ch
            .iter()
            .map(|(p, v)| pauli_matrix(p) * Complex64::new(v.sqrt(), 0.0))
            .collect();
        DenseChannel::new(ch.n_qubits(), kraus)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Σ K ρ K†.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = 1usize << self.n;
        let mut out = CMatrix::zeros(d, d);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }
}

impl LinearMap for DenseChannel {
    fn n_qubits(&self) -> usize {
        self.n
    }
    fn apply_op(&self, op: &CMatrix) -> CMatrix {
        self.apply(op)
    }
}

pub fn dense_from_pauli(ch: &PauliChannel) -> Result<DenseChannel> {
    DenseChannel::from_pauli(ch)
}

/// General linear map stored as the images of the matrix units |i⟩⟨j|.
#[derive(Clone, Debug)]
pub struct Superoperator {
    n: usize,
    images: Vec<CMatrix>,
}

impl Superoperator {
    pub fn from_fn(n: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Result<Superoperator> {
        check_size(n)?;
        let d = 1usize << n;
        let mut images = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                images.push(f(&e));
            }
        }
        Ok(Superoperator { n, images })
    }

    pub fn from_map(m: &dyn LinearMap) -> Result<Superoperator> {
        Superoperator::from_fn(m.n_qubits(), |e| m.apply_op(e))
    }

    pub fn zero(n: usize) -> Result<Superoperator> {
        let d = 1usize << n;
        Superoperator::from_fn(n, |_| CMatrix::zeros(d, d))
    }

    pub(crate) fn from_images(n: usize, images: Vec<CMatrix>) -> Superoperator {
        Superoperator { n, images }
    }

    pub fn scale(&self, s: f64) -> Superoperator {
        Superoperator {
            n: self.n,
            images: self.images.iter().map(|m| m * Complex64::new(s, 0.0)).collect(),
        }
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(Superoperator {
            n: self.n,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        })
    }

    /// Tr M(I/d): the acceptance probability for a maximally mixed input.
    pub fn trace_on_mixed(&self) -> f64 {
        let d = 1usize << self.n;
        (0..d).map(|i| self.images[i * d + i].trace().re).sum::<f64>() / d as f64
    }

    /// (1/d²) Σ_ij [A† M(|i⟩⟨j|) A]_ij = ⟨⟨A|J(M)|A⟩⟩/d².
    pub fn process_overlap(&self, a: &CMatrix) -> f64 {
        let d = 1usize << self.n;
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                let m = a.adjoint() * &self.images[i * d + j] * a;
                acc += m[(i, j)];
            }
        }
        acc.re / (d * d) as f64
    }

    /// Diagonal of the process matrix in the Pauli basis.
    pub fn pauli_probs(&self) -> Result<BTreeMap<PauliString, f64>> {
        Ok(enumerate_paulis(self.n, None)?
            .map(|p| {
                let v = self.process_overlap(&pauli_matrix(&p));
                (p, v)
            })
            .collect())
    }

    /// Reads the map as a Pauli channel after checking it is one.
    pub fn to_pauli_channel(&self, tol: f64) -> Result<PauliChannel> {
        let probs = self.pauli_probs()?;
        let entries: Vec<_> = probs.into_iter().map(|(p, v)| (p, if v.abs() < tol { 0.0 } else { v })).collect();
        let ch = PauliChannel::from_weights(self.n, entries)?;
        let dist = channel_distance(self, &DenseChannel::from_pauli(&ch)?)?;
        if dist > tol {
            return Err(Error::InvalidArgument(format!("map is not a Pauli channel (distance {dist:.3e})")));
        }
        Ok(ch)
    }

    /// Entanglement fidelity with the unitary `u`.
    pub fn entanglement_fidelity(&self, u: &CMatrix) -> f64 {
        self.process_overlap(u)
    }
}

impl LinearMap for Superoperator {
    fn n_qubits(&self) -> usize {
        self.n
    }
    fn apply_op(&self, op: &CMatrix) -> CMatrix {
        let d = 1usize << self.n;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let c = op[(i, j)];
                if c != ZERO {
                    out += &self.images[i * d + j] * c;
                }
            }
        }
        out
    }
}

/// max over Pauli inputs P of ‖a(P) − b(P)‖_F.
pub fn channel_distance(a: &dyn LinearMap, b: &dyn LinearMap) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch(a.n_qubits(), b.n_qubits()));
    }
    check_size(a.n_qubits())?;
    let mut worst: f64 = 0.0;
    for p in enumerate_paulis(a.n_qubits(), None)? {
        let m = pauli_matrix(&p);
        worst = worst.max((a.apply_op(&m) - b.apply_op(&m)).norm());
    }
    Ok(worst)
}
