//! Exact filter superchannels on Pauli channels.
//!
//! Everything here works in the noise frame: the ideal Clifford has been
//! factored out, so a filter only multiplies each Pauli component by a scalar.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::dense::{pauli_matrix, CMatrix};
use crate::channels::{stable_sum, PauliChannel};
use crate::clifford::CliffordTableau;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliTypeCount};

#[derive(Clone, Debug, PartialEq)]
pub struct FilterOutcome {
    /// One outcome bit per filtering ancilla.
    pub branch: Vec<u8>,
    /// Renormalized channel, `None` when the branch has probability zero.
    pub channel: Option<PauliChannel>,
    pub probability: f64,
}

impl FilterOutcome {
    fn from_weights(n: usize, branch: Vec<u8>, weights: Vec<(PauliString, f64)>) -> Result<FilterOutcome> {
        let probability = stable_sum(weights.iter().map(|(_, w)| *w));
        let channel = if probability > 0.0 {
            Some(PauliChannel::from_weights(n, weights)?)
        } else {
            None
        };
        Ok(FilterOutcome {
            branch,
            channel,
            probability,
        })
    }

    pub fn branch_label(&self) -> String {
        self.branch.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
    }
}

fn check_n(ch: &PauliChannel, p: &PauliString) -> Result<()> {
    if ch.n_qubits() != p.n_qubits() {
        return Err(Error::DimensionMismatch(ch.n_qubits(), p.n_qubits()));
    }
    Ok(())
}

/// Splits the channel into the components commuting (branch 0) and
/// anticommuting (branch 1) with the probe.
pub fn commutation_filter(ch: &PauliChannel, probe: &PauliString) -> Result<(FilterOutcome, FilterOutcome)> {
    check_n(ch, probe)?;
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for (p, v) in ch.iter() {
        if p.commutes_unchecked(probe) {
            plus.push((p.clone(), v));
        } else {
            minus.push((p.clone(), v));
        }
    }
    let n = ch.n_qubits();
    Ok((
        FilterOutcome::from_weights(n, vec![0], plus)?,
        FilterOutcome::from_weights(n, vec![1], minus)?,
    ))
}

/// Applies one commutation filter per probe, keeping the requested branch each time.
pub fn successive_filtration(ch: &PauliChannel, probes: &[PauliString], postselect: &[u8]) -> Result<FilterOutcome> {
    if probes.len() != postselect.len() {
        return Err(Error::InvalidArgument(format!(
            "{} probes but {} post-selection bits",
            probes.len(),
            postselect.len()
        )));
    }
    let mut current = ch.clone();
    let mut prob = 1.0;
    for (probe, &bit) in probes.iter().zip(postselect) {
        let (b0, b1) = commutation_filter(&current, probe)?;
        let chosen = if bit == 0 { b0 } else { b1 };
        match chosen.channel {
            Some(c) => {
                prob *= chosen.probability;
                current = c;
            }
            None => return Err(Error::InconsistentPostselection),
        }
    }
    Ok(FilterOutcome {
        branch: postselect.to_vec(),
        channel: Some(current),
        probability: prob,
    })
}

/// Per-qubit syndrome bits (u0, u1): u0 is the Z-filter outcome (the x bit),
/// u1 the X-filter outcome (the z bit). P_00 = I, P_01 = Z, P_10 = X, P_11 = Y.
pub fn syndrome_of(p: &PauliString) -> Vec<u8> {
    (0..p.n_qubits())
        .flat_map(|q| [p.x_bit(q) as u8, p.z_bit(q) as u8])
        .collect()
}

/// The correction applied for a syndrome: X where the Z filter fired, Z where the X filter fired.
pub fn correction_for(syndrome: &[u8]) -> PauliString {
    let n = syndrome.len() / 2;
    let mut c = PauliString::identity(n);
    for q in 0..n {
        if syndrome[2 * q] == 1 {
            c = c.mul_unchecked(&PauliString::single(n, q, Pauli::X).unwrap());
        }
        if syndrome[2 * q + 1] == 1 {
            c = c.mul_unchecked(&PauliString::single(n, q, Pauli::Z).unwrap());
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionResult {
    pub channel: PauliChannel,
    /// Probability of each syndrome string (two bits per qubit, u0 u1).
    pub syndromes: BTreeMap<String, f64>,
}

/// Noiseless channel-correction filter on every qubit.
pub fn channel_correction(ch: &PauliChannel) -> Result<CorrectionResult> {
    let n = ch.n_qubits();
    let mut syndromes = BTreeMap::new();
    let mut out = Vec::new();
    for (p, v) in ch.iter() {
        let s = syndrome_of(p);
        let residual = correction_for(&s).mul_unchecked(p);
        debug_assert!(residual.is_identity_up_to_phase());
        out.push((residual.unsigned(), v));
        let label: String = s.iter().map(|b| char::from(b'0' + b)).collect();
        *syndromes.entry(label).or_insert(0.0) += v;
    }
    Ok(CorrectionResult {
        channel: PauliChannel::from_weights(n, out)?,
        syndromes,
    })
}

fn pm(p: Pauli) -> CMatrix {
    pauli_matrix(&PauliString::from_letters(&[p]))
}

/// Single-qubit commutation filter with outcome-conditioned correction:
/// F_b[E] = C^b (E + (−1)^b P E P)/2.
fn filter_step(e: &CMatrix, probe: Pauli, correction: Pauli, outcome: u8) -> CMatrix {
    let p = pm(probe);
    let conj = &p * e * &p;
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    let half = (e + conj * Complex64::new(sign, 0.0)) * Complex64::new(0.5, 0.0);
    if outcome == 0 {
        half
    } else {
        pm(correction) * half
    }
}

/// The four super-Kraus images F_u[E], u = 00, 01, 10, 11: the Z filter
/// (with X correction) acts first and sets u0, the X filter (with Z
/// correction) acts second and sets u1.
pub fn correction_superkraus_apply(e: &CMatrix) -> Result<[CMatrix; 4]> {
    if e.nrows() != 2 || e.ncols() != 2 {
        return Err(Error::DimensionMismatch(e.nrows(), 2));
    }
    let f = |u0: u8, u1: u8| {
        let inner = filter_step(e, Pauli::Z, Pauli::X, u0);
        filter_step(&inner, Pauli::X, Pauli::Z, u1)
    };
    Ok([f(0, 0), f(0, 1), f(1, 0), f(1, 1)])
}

/// Commutation filter with correction acting on a whole Kraus set: every
/// K becomes the two operators C^b (K + (−1)^b P K P)/2, b = 0, 1. `probe`
/// and `correction` are full-register Pauli operators.
pub fn commutation_filter_kraus(kraus: &[CMatrix], probe: &PauliString, correction: &PauliString) -> Result<Vec<CMatrix>> {
    if probe.n_qubits() != correction.n_qubits() {
        return Err(Error::DimensionMismatch(probe.n_qubits(), correction.n_qubits()));
    }
    let p = pauli_matrix(probe);
    let c = pauli_matrix(correction);
    let half = Complex64::new(0.5, 0.0);
    let mut out = Vec::with_capacity(2 * kraus.len());
    for k in kraus {
        if k.nrows() != p.nrows() {
            return Err(Error::DimensionMismatch(k.nrows(), p.nrows()));
        }
        let conj = &p * k * &p;
        out.push((k + &conj) * half);
        out.push(&c * ((k - &conj) * half));
    }
    Ok(out)
}

/// Prepare weights and (P_i, Q_i) pairs of a general filter; `prepare` is
/// the full ancilla unitary V when outcomes other than 0 are needed.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralFilterSpec {
    weights: Vec<f64>,
    pairs: Vec<(PauliString, PauliString)>,
    prepare: Option<CMatrix>,
}

impl GeneralFilterSpec {
    pub fn new(weights: Vec<f64>, pairs: Vec<(PauliString, PauliString)>, prepare: Option<CMatrix>) -> Result<GeneralFilterSpec> {
        if weights.is_empty() || weights.len() != pairs.len() {
            return Err(Error::InvalidArgument("need one weight per Pauli pair".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total = stable_sum(weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(total));
        }
        let n = pairs[0].0.n_qubits();
        for (p, q) in &pairs {
            if p.n_qubits() != n || q.n_qubits() != n {
                return Err(Error::DimensionMismatch(n, p.n_qubits().max(q.n_qubits())));
            }
        }
        if let Some(v) = &prepare {
            let m = weights.len();
            if v.nrows() != m || v.ncols() != m {
                return Err(Error::DimensionMismatch(v.nrows(), m));
            }
            let err = (v.adjoint() * v - CMatrix::identity(m, m)).norm();
            if err > 1e-10 {
                return Err(Error::InvalidArgument(format!("prepare matrix not unitary ({err:.2e})")));
            }
            for (i, w) in weights.iter().enumerate() {
                if (v[(i, 0)].norm_sqr() - w).abs() > 1e-10 {
                    return Err(Error::InvalidArgument("prepare column 0 does not match weights".into()));
                }
            }
        }
        Ok(GeneralFilterSpec { weights, pairs, prepare })
    }

    /// The symmetric filter Σ_i p_i P_i (·) P_i.
    pub fn symmetric(weights: Vec<f64>, paulis: Vec<PauliString>) -> Result<GeneralFilterSpec> {
        let pairs = paulis.into_iter().map(|p| (p.clone(), p)).collect();
        GeneralFilterSpec::new(weights, pairs, None)
    }

    /// Noise-frame spec of the two-ancilla filter: SELECT over I, Z^n, X^n, Y^n with V = H⊗H.
    pub fn ancilla_efficient(n: usize) -> GeneralFilterSpec {
        let paulis = [Pauli::I, Pauli::Z, Pauli::X, Pauli::Y]
            .map(|l| PauliString::uniform(n, l))
            .to_vec();
        let h = Complex64::new(0.5, 0.0);
        let signs = [[1., 1., 1., 1.], [1., -1., 1., -1.], [1., 1., -1., -1.], [1., -1., -1., 1.]];
        let v = CMatrix::from_fn(4, 4, |r, c| h * signs[r][c]);
        let pairs = paulis.into_iter().map(|p| (p.clone(), p)).collect();
        GeneralFilterSpec::new(vec![0.25; 4], pairs, Some(v)).expect("valid by construction")
    }

    pub fn n_qubits(&self) -> usize {
        self.pairs[0].0.n_qubits()
    }

    pub fn m_ancilla_states(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pairs(&self) -> &[(PauliString, PauliString)] {
        &self.pairs
    }

    pub fn prepare(&self) -> Option<&CMatrix> {
        self.prepare.as_ref()
    }

    /// s_i with Q_i N P_i = s_i N.
    fn signs(&self, nn: &PauliString) -> Result<Vec<Complex64>> {
        let base = nn.unsigned();
        self.pairs
            .iter()
            .map(|(p, q)| {
                let m = q.mul_unchecked(&base).mul_unchecked(p);
                if m.x_words() != base.x_words() || m.z_words() != base.z_words() {
                    return Err(Error::NotDiagonal);
                }
                Ok(crate::channels::dense::i_pow((m.phase_exp() + 4 - base.phase_exp()) % 4))
            })
            .collect()
    }

    /// Coefficients α_ij = v_i0 · conj(v_ij) for outcome j (α_i0 = p_i without V).
    fn alphas(&self, outcome: usize) -> Result<Vec<Complex64>> {
        match (&self.prepare, outcome) {
            (None, 0) => Ok(self.weights.iter().map(|w| Complex64::new(*w, 0.0)).collect()),
            (None, _) => Err(Error::InvalidArgument("outcomes j > 0 need the prepare matrix".into())),
            (Some(v), j) if j < v.ncols() => Ok((0..v.nrows()).map(|i| v[(i, 0)] * v[(i, j)].conj()).collect()),
            _ => Err(Error::InvalidArgument(format!("outcome {outcome} out of range"))),
        }
    }

    /// Amplitude c_N^{(j)} multiplying component N in outcome j.
    pub fn amplitude(&self, nn: &PauliString, outcome: usize) -> Result<Complex64> {
        let s = self.signs(nn)?;
        let a = self.alphas(outcome)?;
        Ok(a.iter().zip(&s).map(|(a, s)| a * s).sum())
    }

    pub fn to_json(&self) -> FilterSpecJson {
        FilterSpecJson {
            weights: self.weights.clone(),
            pairs: self.pairs.iter().map(|(p, q)| (p.to_string(), q.to_string())).collect(),
            prepare: self.prepare.as_ref().map(|v| {
                (0..v.nrows())
                    .map(|r| (0..v.ncols()).map(|c| [v[(r, c)].re, v[(r, c)].im]).collect())
                    .collect()
            }),
        }
    }

    pub fn from_json(j: &FilterSpecJson) -> Result<GeneralFilterSpec> {
        let pairs = j
            .pairs
            .iter()
            .map(|(p, q)| Ok((p.parse()?, q.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        let prepare = match &j.prepare {
            None => None,
            Some(rows) => {
                let m = rows.len();
                if rows.iter().any(|r| r.len() != m) {
                    return Err(Error::InvalidArgument("prepare matrix must be square".into()));
                }
                Some(CMatrix::from_fn(m, m, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
            }
        };
        GeneralFilterSpec::new(j.weights.clone(), pairs, prepare)
    }
}

/// Serialized filter spec: {"weights": [...], "pairs": [["P","Q"], ...], "prepare": [[[re, im], ...], ...]}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpecJson {
    pub weights: Vec<f64>,
    pub pairs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepare: Option<Vec<Vec<[f64; 2]>>>,
}

/// Outcome j of a general filter: component N kept with weight p_N |c_N^{(j)}|².
pub fn general_filter_outcome(ch: &PauliChannel, spec: &GeneralFilterSpec, outcome: usize) -> Result<FilterOutcome> {
    if ch.n_qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch(ch.n_qubits(), spec.n_qubits()));
    }
    let alphas = spec.alphas(outcome)?;
    let mut weights = Vec::with_capacity(ch.len());
    for (p, v) in ch.iter() {
        let s = spec.signs(p)?;
        let c: Complex64 = alphas.iter().zip(&s).map(|(a, s)| a * s).sum();
        weights.push((p.clone(), v * c.norm_sqr()));
    }
    let m = spec.m_ancilla_states();
    let bits = usize::BITS - (m - 1).leading_zeros();
    let branch = (0..bits).map(|b| ((outcome >> b) & 1) as u8).collect();
    FilterOutcome::from_weights(ch.n_qubits(), branch, weights)
}

pub fn general_filter_outcome0(ch: &PauliChannel, spec: &GeneralFilterSpec) -> Result<FilterOutcome> {
    general_filter_outcome(ch, spec, 0)
}

/// True iff exactly two of (w, x, y, z) are odd.
pub fn ae_removes(tc: &PauliTypeCount) -> bool {
    let odd = [tc.weight(), tc.x_count, tc.y_count, tc.z_count]
        .iter()
        .filter(|v| *v % 2 == 1)
        .count();
    odd == 2
}

/// Two-ancilla filter in the noise frame. `ch` is the noise after the
/// Clifford; the tableau only fixes the register size.
pub fn ae_filter(ch: &PauliChannel, clifford: &CliffordTableau) -> Result<FilterOutcome> {
    if ch.n_qubits() != clifford.n_qubits() {
        return Err(Error::DimensionMismatch(ch.n_qubits(), clifford.n_qubits()));
    }
    let spec = GeneralFilterSpec::ancilla_efficient(ch.n_qubits());
    let mut kept = Vec::new();
    for (p, v) in ch.iter() {
        let removed = ae_removes(&p.type_count());
        let c = spec.amplitude(p, 0)?;
        let expected = if removed { 0.0 } else { 1.0 };
        assert!(
            (c - Complex64::new(expected, 0.0)).norm() < 1e-12,
            "acceptance scalar {c} for {p} disagrees with the parity rule"
        );
        if !removed {
            kept.push((p.clone(), v));
        }
    }
    FilterOutcome::from_weights(ch.n_qubits(), vec![0, 0], kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn z_filter_on_depolarizing() {
        let pr = 0.3;
        let d = PauliChannel::depolarizing(1, pr).unwrap();
        let (b0, b1) = commutation_filter(&d, &p("Z")).unwrap();
        let ps = 1.0 - 2.0 * pr / 3.0;
        assert!((b0.probability - ps).abs() < 1e-15);
        let c0 = b0.channel.unwrap();
        assert!((c0.prob(&p("I")) - (1.0 - pr) / ps).abs() < 1e-15);
        assert!((c0.prob(&p("Z")) - (pr / 3.0) / ps).abs() < 1e-15);
        assert_eq!(c0.len(), 2);
        assert!((b0.probability + b1.probability - 1.0).abs() < 1e-15);

        let (b0, b1) = commutation_filter(&PauliChannel::pauli(&p("X")), &p("Z")).unwrap();
        assert_eq!(b0.probability, 0.0);
        assert!(b0.channel.is_none());
        assert_eq!(b1.probability, 1.0);
    }

    #[test]
    fn successive_examples() {
        let pr = 0.2;
        let d = PauliChannel::depolarizing(1, pr).unwrap();
        let r = successive_filtration(&d, &[p("Z"), p("X")], &[0, 0]).unwrap();
        assert_eq!(r.channel.unwrap(), PauliChannel::identity(1));
        assert!((r.probability - (1.0 - pr)).abs() < 1e-15);
        let err = successive_filtration(&PauliChannel::identity(1), &[p("Z")], &[1]);
        assert_eq!(err, Err(Error::InconsistentPostselection));
        let d3 = PauliChannel::depolarizing(3, pr).unwrap();
        let probes: Vec<_> = ["ZII", "XII", "IZI", "IXI", "IIZ", "IIX"].iter().map(|s| p(s)).collect();
        let r = successive_filtration(&d3, &probes, &[0; 6]).unwrap();
        assert_eq!(r.channel.unwrap(), PauliChannel::identity(3));
        assert!((r.probability - (1.0 - pr).powi(3)).abs() < 1e-14);
    }

    #[test]
    fn correction_examples() {
        let r = channel_correction(&PauliChannel::depolarizing(1, 0.3).unwrap()).unwrap();
        assert_eq!(r.channel, PauliChannel::identity(1));
        let s = |k: &str| r.syndromes.get(k).copied().unwrap_or(0.0);
        assert!((s("00") - 0.7).abs() < 1e-15);
        for k in ["01", "10", "11"] {
            assert!((s(k) - 0.1).abs() < 1e-15);
        }
        let r = channel_correction(&PauliChannel::identity(1)).unwrap();
        assert_eq!(r.syndromes.len(), 1);
        assert_eq!(r.syndromes["00"], 1.0);
    }

    #[test]
    fn superkraus_examples() {
        let id = pm(Pauli::I);
        let z = correction_superkraus_apply(&pm(Pauli::Z)).unwrap();
        assert!((&z[1] - &id).norm() < 1e-15);
        for u in [0, 2, 3] {
            assert!(z[u].norm() < 1e-15);
        }
        let i = correction_superkraus_apply(&id).unwrap();
        assert!((&i[0] - &id).norm() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = (pm(Pauli::X) + pm(Pauli::Y)) * Complex64::new(s, 0.0);
        let out = correction_superkraus_apply(&e).unwrap();
        for (u, want) in [(0, 0.0), (1, 0.0), (2, 0.5), (3, 0.5)] {
            // |c|² where F_u[E] = c·I
            let c = out[u][(0, 0)];
            assert!((&out[u] - &id * c).norm() < 1e-15);
            assert!((c.norm_sqr() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn general_filter_examples() {
        let d = PauliChannel::depolarizing(1, 0.3).unwrap();
        let spec = GeneralFilterSpec::symmetric(vec![0.5, 0.5], vec![p("I"), p("Z")]).unwrap();
        let g = general_filter_outcome0(&d, &spec).unwrap();
        let (b0, _) = commutation_filter(&d, &p("Z")).unwrap();
        assert!((g.probability - b0.probability).abs() < 1e-15);
        assert!(g.channel.unwrap().max_abs_diff(&b0.channel.unwrap()) < 1e-15);

        let trivial = GeneralFilterSpec::symmetric(vec![1.0], vec![p("I")]).unwrap();
        let g = general_filter_outcome0(&d, &trivial).unwrap();
        assert!((g.probability - 1.0).abs() < 1e-15);
        assert!(g.channel.unwrap().max_abs_diff(&d) < 1e-15);

        let ae = GeneralFilterSpec::ancilla_efficient(3);
        assert_eq!(ae.amplitude(&p("IXI"), 0).unwrap(), Complex64::new(0.0, 0.0));

        let bad = GeneralFilterSpec::new(vec![1.0], vec![(p("X"), p("Z"))], None).unwrap();
        assert_eq!(general_filter_outcome0(&d, &bad), Err(Error::NotDiagonal));
    }

    #[test]
    fn general_filter_all_outcomes_sum_to_one() {
        let d = PauliChannel::depolarizing(2, 0.25).unwrap();
        let spec = GeneralFilterSpec::ancilla_efficient(2);
        let total: f64 = (0..4).map(|j| general_filter_outcome(&d, &spec, j).unwrap().probability).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ae_examples() {
        let t = CliffordTableau::identity(2);
        let d = PauliChannel::depolarizing(2, 0.3).unwrap();
        let r = ae_filter(&d, &t).unwrap();
        let q: f64 = 0.7;
        assert!((r.probability - (q * q + 0.3 * 0.3 / 3.0)).abs() < 1e-15);
        let c = r.channel.unwrap();
        let keys: Vec<String> = c.probs().keys().map(|k| k.to_string()).collect();
        assert_eq!(keys, ["II", "XX", "ZZ", "YY"]);
        assert!(!ae_removes(&p("XX").type_count()));
        for s in ["XI", "IY", "ZI"] {
            assert!(ae_removes(&p(s).type_count()));
        }
        let json = spec_json_round_trip(&GeneralFilterSpec::ancilla_efficient(2));
        assert_eq!(json, GeneralFilterSpec::ancilla_efficient(2));
    }

    fn spec_json_round_trip(s: &GeneralFilterSpec) -> GeneralFilterSpec {
        let text = serde_json::to_string(&s.to_json()).unwrap();
        GeneralFilterSpec::from_json(&serde_json::from_str(&text).unwrap()).unwrap()
    }
}
