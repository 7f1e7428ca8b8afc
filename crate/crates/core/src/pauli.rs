//! Bit-packed n-qubit Pauli operators.
//!
//! A [`PauliString`] stores `i^k · X^x · Z^z` where `x` and `z` are packed
//! bit vectors (qubit `j` lives in bit `j % 64` of word `j / 64`). Because
//! `Y = i·X·Z`, a string that reads `Y` has `k = 1` on that position; the text
//! form hides this and prints the sign of the letter product instead.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full enumeration of 4^n Paulis is refused above this size.
pub const MAX_ENUM_QUBITS: usize = 10;

/// Cap on the number of Paulis produced by a truncated enumeration.
const MAX_ENUM_COUNT: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Counts of X, Y and Z positions in a Pauli string.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliTypeCount {
    pub x_count: usize,
    pub y_count: usize,
    pub z_count: usize,
}

impl PauliTypeCount {
    pub fn weight(&self) -> usize {
        self.x_count + self.y_count + self.z_count
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

#[inline]
pub(crate) fn n_words(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn popcount(words: impl Iterator<Item = u64>) -> u32 {
    words.map(u64::count_ones).sum()
}

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        let w = n_words(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Builds `i^phase_exp · X^x · Z^z` from explicit bit vectors.
    pub fn from_bits(x: &[bool], z: &[bool], phase_exp: u8) -> Result<PauliString> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch(x.len(), z.len()));
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("Pauli string needs at least one qubit".into()));
        }
        let mut p = PauliString::identity(x.len());
        for q in 0..x.len() {
            p.set_bits(q, x[q], z[q]);
        }
        p.phase = phase_exp % 4;
        Ok(p)
    }

    /// Builds the Hermitian operator whose letters are `letters`, with sign +1.
    pub fn from_letters(letters: &[Pauli]) -> PauliString {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Single-qubit Pauli `letter` on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Pauli) -> Result<PauliString> {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        let mut p = PauliString::identity(n);
        p.set_letter(q, letter);
        Ok(p)
    }

    /// Hermitian Pauli from packed masks (bit j = qubit j), for n ≤ 64.
    pub fn from_masks(n: usize, x_mask: u64, z_mask: u64) -> PauliString {
        debug_assert!(n <= 64);
        let mut p = PauliString::identity(n);
        if n > 0 {
            let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            p.x[0] = x_mask & keep;
            p.z[0] = z_mask & keep;
        }
        p.phase = ((p.x[0] & p.z[0]).count_ones() % 4) as u8;
        p
    }

    /// Tensor product of the given letter on every qubit, sign +1.
    pub fn uniform(n: usize, letter: Pauli) -> PauliString {
        PauliString::from_letters(&vec![letter; n])
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Exponent k of the stored form i^k · X^x · Z^z.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    /// Exponent of the sign in front of the letter product, e.g. 2 for "-XYZ".
    pub fn letter_phase_exp(&self) -> u8 {
        let ys = (self.type_count().y_count % 4) as u8;
        (self.phase + 4 - ys) % 4
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn with_phase(mut self, phase_exp: u8) -> PauliString {
        self.phase = phase_exp % 4;
        self
    }

    /// Same letters with sign +1: the canonical Hermitian representative.
    pub fn unsigned(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (self.type_count().y_count % 4) as u8;
        p
    }

    /// True if the operator is ±I or ±iI.
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// True for +I exactly.
    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.is_identity_up_to_phase()
    }

    pub fn weight(&self) -> usize {
        popcount(self.x.iter().zip(&self.z).map(|(a, b)| a | b)) as usize
    }

    pub fn type_count(&self) -> PauliTypeCount {
        let mut c = PauliTypeCount::default();
        for (&a, &b) in self.x.iter().zip(&self.z) {
            c.x_count += (a & !b).count_ones() as usize;
            c.y_count += (a & b).count_ones() as usize;
            c.z_count += (b & !a).count_ones() as usize;
        }
        c
    }

    fn check_dims(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Group product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_dims(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// X^a Z^b X^c Z^d = (-1)^{b·c} X^{a+c} Z^{b+d}.
    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let swaps = popcount(self.z.iter().zip(&other.x).map(|(a, b)| a & b));
        let phase = ((self.phase as u32 + other.phase as u32 + 2 * swaps) % 4) as u8;
        PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase,
        }
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_dims(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let s = popcount(
            self.x
                .iter()
                .zip(&self.z)
                .zip(other.x.iter().zip(&other.z))
                .map(|((xa, za), (xb, zb))| (xa & zb) ^ (za & xb)),
        );
        s % 2 == 0
    }

    /// `self ⊗ other`, with `self` on the low qubit indices.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut p = PauliString::identity(self.n + other.n);
        for q in 0..self.n {
            p.set_bits(q, self.x_bit(q), self.z_bit(q));
        }
        for q in 0..other.n {
            p.set_bits(self.n + q, other.x_bit(q), other.z_bit(q));
        }
        p.phase = (self.phase + other.phase) % 4;
        p
    }

    /// Places this string on `qubits` of an `n_total`-qubit register.
    pub fn embed(&self, n_total: usize, qubits: &[usize]) -> Result<PauliString> {
        if qubits.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, qubits.len()));
        }
        let mut p = PauliString::identity(n_total);
        for (j, &q) in qubits.iter().enumerate() {
            if q >= n_total {
                return Err(Error::QubitOutOfRange { index: q, n: n_total });
            }
            p.set_bits(q, self.x_bit(j), self.z_bit(j));
        }
        p.phase = self.phase;
        Ok(p)
    }

    /// Restriction to the listed qubits. The phase is kept only when the
    /// dropped qubits carry no Y (otherwise letter signs would not be preserved).
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut p = PauliString::identity(qubits.len());
        for (j, &q) in qubits.iter().enumerate() {
            p.set_bits(j, self.x_bit(q), self.z_bit(q));
        }
        let kept_y = p.type_count().y_count;
        p.phase = ((self.letter_phase_exp() as usize + kept_y) % 4) as u8;
        p
    }

    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// Overwrites qubit `q` with `letter`, keeping the letter-product sign.
    pub(crate) fn set_letter(&mut self, q: usize, letter: Pauli) {
        let sign = self.letter_phase_exp();
        let (x, z) = letter.bits();
        self.set_bits(q, x, z);
        let ys = (self.type_count().y_count % 4) as u8;
        self.phase = (sign + ys) % 4;
    }

    pub(crate) fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) % 4;
    }

    /// Key used for ordering: (z, x) as big unsigned integers, most significant word first.
    fn cmp_bits(&self, other: &PauliString) -> Ordering {
        self.z
            .iter()
            .rev()
            .cmp(other.z.iter().rev())
            .then_with(|| self.x.iter().rev().cmp(other.x.iter().rev()))
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.cmp_bits(other))
            .then_with(|| self.phase.cmp(&other.phase))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.letter_phase_exp() {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<PauliString> {
        let (sign, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(Error::ParsePauli(s.to_string()));
        }
        let letters = body
            .chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::ParsePauli(s.to_string()))?;
        let mut p = PauliString::from_letters(&letters);
        p.add_phase(sign);
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of n-qubit Paulis of weight ≤ k: Σ_{i≤k} C(n,i)·3^i.
pub fn count_up_to_weight(n: usize, k: usize) -> Option<u128> {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut pow3: u128 = 1;
    for i in 0..=k.min(n) {
        if i > 0 {
            binom = binom.checked_mul((n - i + 1) as u128)? / i as u128;
            pow3 = pow3.checked_mul(3)?;
        }
        total = total.checked_add(binom.checked_mul(pow3)?)?;
    }
    Some(total)
}

/// Every sign-free n-qubit Pauli (optionally of weight ≤ `max_weight`), in
/// lexicographic order of (z bits, x bits) read as unsigned integers.
pub fn enumerate_paulis(
    n: usize,
    max_weight: Option<usize>,
) -> Result<Box<dyn Iterator<Item = PauliString> + Send>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let k = max_weight.unwrap_or(n).min(n);
    if n <= MAX_ENUM_QUBITS {
        let side = 1u64 << n;
        let it = (0..side)
            .flat_map(move |z| (0..side).map(move |x| (z, x)))
            .filter(move |&(z, x)| ((x | z).count_ones() as usize) <= k)
            .map(move |(z, x)| PauliString::from_masks(n, x, z));
        return Ok(Box::new(it));
    }
    if k == n {
        return Err(Error::TooLarge(format!(
            "full enumeration needs n <= {MAX_ENUM_QUBITS}, got {n}"
        )));
    }
    match count_up_to_weight(n, k) {
        Some(c) if c <= MAX_ENUM_COUNT => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "{n}-qubit Paulis of weight <= {k} exceed the enumeration cap"
            )))
        }
    }
    let mut out = Vec::new();
    let mut support = Vec::with_capacity(k);
    low_weight_rec(n, k, 0, &mut support, &mut out);
    out.sort();
    Ok(Box::new(out.into_iter()))
}

fn low_weight_rec(n: usize, k: usize, start: usize, support: &mut Vec<usize>, out: &mut Vec<PauliString>) {
    let w = support.len();
    // every letter assignment on the current support
    let mut letters = vec![Pauli::X; w];
    loop {
        let mut p = PauliString::identity(n);
        for (j, &q) in support.iter().enumerate() {
            p.set_letter(q, letters[j]);
        }
        out.push(p);
        let mut j = 0;
        while j < w {
            letters[j] = match letters[j] {
                Pauli::X => Pauli::Y,
                Pauli::Y => Pauli::Z,
                _ => Pauli::X,
            };
            if letters[j] != Pauli::X {
                break;
            }
            j += 1;
        }
        if j == w {
            break;
        }
    }
    if w == k {
        return;
    }
    for q in start..n {
        support.push(q);
        low_weight_rec(n, k, q + 1, support, out);
        support.pop();
    }
}
