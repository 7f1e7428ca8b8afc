//! Closed-form bounds and the exact enumerators used to check them.

use serde::{Deserialize, Serialize};

use crate::channels::{stable_sum, PauliChannel};
use crate::error::{check_rate, Error, Result};
use crate::filters::ae_removes;
use crate::pauli::{enumerate_paulis, PauliTypeCount, MAX_ENUM_QUBITS};

const BOUND_TOL: f64 = 1e-12;

/// C(n, k) with overflow checking.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n−i) / (i+1) stays an integer at every step
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

fn binom_f64(n: usize, k: usize) -> Result<f64> {
    binomial(n as u64, k as u64)
        .map(|v| v as f64)
        .ok_or_else(|| Error::TooLarge(format!("C({n},{k}) overflows")))
}

/// Number of weight-w Paulis with type counts (x, y, z): C(n,w)·w!/(x!y!z!).
pub fn type_class_size(n: usize, tc: &PauliTypeCount) -> Option<u128> {
    let w = tc.weight() as u64;
    let c = binomial(n as u64, w)?;
    let m = binomial(w, tc.x_count as u64)?.checked_mul(binomial(w - tc.x_count as u64, tc.y_count as u64)?)?;
    c.checked_mul(m)
}

fn type_counts(w: usize) -> impl Iterator<Item = PauliTypeCount> {
    (0..=w).flat_map(move |x| {
        (0..=w - x).map(move |y| PauliTypeCount {
            x_count: x,
            y_count: y,
            z_count: w - x - y,
        })
    })
}

fn check_weight(n: usize, w: usize) -> Result<()> {
    if n == 0 || w == 0 || w > n {
        return Err(Error::InvalidArgument(format!("need 1 <= w <= n, got n={n}, w={w}")));
    }
    Ok(())
}

/// Exact number of weight-w Paulis removed by the two-ancilla filter.
pub fn removed_count_exact(n: usize, w: usize) -> Result<u128> {
    check_weight(n, w)?;
    let mut total: u128 = 0;
    for tc in type_counts(w).filter(ae_removes) {
        let c = type_class_size(n, &tc).ok_or_else(|| Error::TooLarge(format!("count for n={n}")))?;
        total = total.checked_add(c).ok_or_else(|| Error::TooLarge(format!("count for n={n}")))?;
    }
    Ok(total)
}

/// Brute-force count over all 4^n Paulis, for cross-checking the closed form.
pub fn removed_count_enumerated(n: usize) -> Result<Vec<u128>> {
    let mut counts = vec![0u128; n + 1];
    for p in enumerate_paulis(n, None)? {
        if ae_removes(&p.type_count()) {
            counts[p.weight()] += 1;
        }
    }
    Ok(counts)
}

/// C(n,w)·3^w / (1 + w(w−1)).
pub fn removed_count_lower_bound(n: usize, w: usize) -> Result<f64> {
    check_weight(n, w)?;
    Ok(binom_f64(n, w)? * 3f64.powi(w as i32) / (1 + w * (w - 1)) as f64)
}

/// The weaker C(n,w)·3^w / w² form. For w ≥ 2, 1 + w(w−1) < w², so the
/// other form is the tighter one; both coincide at w = 1.
pub fn removed_count_lower_bound_w2(n: usize, w: usize) -> Result<f64> {
    check_weight(n, w)?;
    Ok(binom_f64(n, w)? * 3f64.powi(w as i32) / (w * w) as f64)
}

/// Mean weight of the Paulis the filter removes.
pub fn average_removed_weight(n: usize) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for w in 1..=n {
        let c = removed_count_exact(n, w)? as f64;
        num += w as f64 * c;
        den += c;
    }
    Ok(num / den)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    Ok(())
}

/// 1 − (1 − q^n)(1 + n)/(1 + n³) with q = 1 − p.
pub fn ae_success_prob_bound(n: usize, p: f64) -> Result<f64> {
    check_n(n)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} not in [0, 1)")));
    }
    let nf = n as f64;
    let qn = (1.0 - p).powi(n as i32);
    Ok(1.0 - (1.0 - qn) * (1.0 + nf) / (1.0 + nf * nf * nf))
}

/// 1 − p²/ε_in, the other published success-probability form (1 at p = 0).
pub fn ae_success_prob_bound_eps(n: usize, p: f64) -> Result<f64> {
    check_n(n)?;
    check_rate("p", p)?;
    let eps = input_infidelity(n, p);
    Ok(if eps == 0.0 { 1.0 } else { 1.0 - p * p / eps })
}

/// ε_in = 1 − (1 − p)^n.
pub fn input_infidelity(n: usize, p: f64) -> f64 {
    1.0 - (1.0 - p).powi(n as i32)
}

/// 2·ε_in².
pub fn ae_infidelity_bound(eps_in: f64) -> Result<f64> {
    check_rate("eps_in", eps_in)?;
    Ok(2.0 * eps_in * eps_in)
}

/// Exact statistics of the two-ancilla filter on an i.i.d. single-qubit
/// Pauli channel, obtained by summing over type classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricStats {
    pub n: usize,
    pub input_fidelity: f64,
    pub success_prob: f64,
    pub output_fidelity: f64,
    pub output_infidelity: f64,
    /// Probability of each type class in the input channel.
    pub distribution: Vec<(PauliTypeCount, f64)>,
}

/// `local` must be a single-qubit channel applied identically to all n qubits.
pub fn symmetric_channel_engine(n: usize, local: &PauliChannel) -> Result<SymmetricStats> {
    check_n(n)?;
    if local.n_qubits() != 1 {
        return Err(Error::InvalidArgument(
            "symmetric engine needs an i.i.d. single-qubit channel".into(),
        ));
    }
    let get = |s: &str| local.prob(&s.parse().unwrap());
    let (pi, px, py, pz) = (get("I"), get("X"), get("Y"), get("Z"));
    let mut distribution = Vec::new();
    let mut kept = Vec::new();
    for w in 0..=n {
        let cw = binom_f64(n, w)?;
        for tc in type_counts(w) {
            let m = binom_f64(w, tc.x_count)? * binom_f64(w - tc.x_count, tc.y_count)?;
            let pr = cw
                * m
                * px.powi(tc.x_count as i32)
                * py.powi(tc.y_count as i32)
                * pz.powi(tc.z_count as i32)
                * pi.powi((n - w) as i32);
            distribution.push((tc, pr));
            if !ae_removes(&tc) {
                kept.push(pr);
            }
        }
    }
    let input_fidelity = pi.powi(n as i32);
    let success_prob = stable_sum(kept);
    let output_fidelity = input_fidelity / success_prob;
    Ok(SymmetricStats {
        n,
        input_fidelity,
        success_prob,
        output_fidelity,
        output_infidelity: 1.0 - output_fidelity,
        distribution,
    })
}

pub fn symmetric_depolarizing(n: usize, p: f64) -> Result<SymmetricStats> {
    symmetric_channel_engine(n, &PauliChannel::depolarizing(1, p)?)
}

/// {I: 1 − p + pX, Z: pY + pZ}: Z filter on a T gate followed by an X
/// correction on the anticommuting outcome.
pub fn t_gate_purified(px: f64, py: f64, pz: f64) -> Result<PauliChannel> {
    for (name, v) in [("pX", px), ("pY", py), ("pZ", pz)] {
        check_rate(name, v)?;
    }
    let p = px + py + pz;
    if p > 1.0 + 1e-15 {
        return Err(Error::InvalidArgument(format!("pX + pY + pZ = {p} > 1")));
    }
    PauliChannel::new(1, [("I".parse()?, 1.0 - p + px), ("Z".parse()?, py + pz)])
}

/// (1 − 2p/3)³.
pub fn ccz_purified_fidelity(p: f64) -> Result<f64> {
    check_rate("p", p)?;
    Ok((1.0 - 2.0 * p / 3.0).powi(3))
}

/// F_in · (1/√(1 − p))^k for k removed single-qubit filters (k even).
pub fn full_correction_scaling(f_in: f64, p: f64, k: usize) -> Result<f64> {
    check_rate("F_in", f_in)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} not in [0, 1)")));
    }
    if k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("k = {k} must be even")));
    }
    Ok(f_in * (1.0 - p).powf(-(k as f64) / 2.0))
}

/// CX/CZ count of the n-qubit correction filter's SELECT gates, 2n² + 2n.
pub fn select_gate_count(n: usize) -> u64 {
    let n = n as u64;
    2 * n * n + 2 * n
}

/// k·log2(n/k): order of growth only, not a certified constant.
pub fn ancilla_lower_bound(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(k as f64 * (n as f64 / k as f64).log2())
}

/// log2(4^n) = 2n ancillae for full correction.
pub fn full_correction_ancillae(n: usize) -> usize {
    2 * n
}

/// (1−pc)(1−pt)(1−2pc/3)²(1−2pt/3)²(1−2pc/3).
pub fn f_critical(pc: f64, pt: f64) -> Result<f64> {
    check_rate("pc", pc)?;
    check_rate("pt", pt)?;
    let a = 1.0 - 2.0 * pc / 3.0;
    let b = 1.0 - 2.0 * pt / 3.0;
    Ok((1.0 - pc) * (1.0 - pt) * a * a * b * b * a)
}

/// Variant with (1−2pc)²(1−2pt)² factors, kept for comparison only.
pub fn f_critical_alt(pc: f64, pt: f64) -> Result<f64> {
    check_rate("pc", pc)?;
    check_rate("pt", pt)?;
    let a = 1.0 - 2.0 * pc;
    let b = 1.0 - 2.0 * pt;
    Ok((1.0 - pc) * (1.0 - pt) * a * a * b * b * (1.0 - 2.0 * pc / 3.0))
}

/// Weight-class masses F·ε^w for w = 0..n−1, F = (1 − ε)/(1 − ε^n), and the
/// filtered-fidelity bound 1 − 2ε².
pub fn global_noise_model(n: usize, eps: f64) -> Result<(f64, f64)> {
    check_n(n)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("eps = {eps} not in [0, 1)")));
    }
    let f = (1.0 - eps) / (1.0 - eps.powi(n as i32));
    Ok((f, 1.0 - 2.0 * eps * eps))
}

/// The global model as an explicit channel: mass F·ε^w on weight class w,
/// spread evenly over the C(n,w)·3^w Paulis of that weight.
pub fn global_noise_channel(n: usize, eps: f64) -> Result<PauliChannel> {
    if n > MAX_ENUM_QUBITS {
        return Err(Error::TooLarge(format!("global noise channel on {n} qubits")));
    }
    let (f, _) = global_noise_model(n, eps)?;
    let mut entries = Vec::new();
    for p in enumerate_paulis(n, Some(n - 1))? {
        let w = p.weight();
        let size = binom_f64(n, w)? * 3f64.powi(w as i32);
        entries.push((p, f * eps.powi(w as i32) / size));
    }
    PauliChannel::from_weights(n, entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundDirection {
    /// exact ≤ bound
    Upper,
    /// exact ≥ bound
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: String,
    pub n: usize,
    pub p: f64,
    pub w: Option<usize>,
    pub direction: BoundDirection,
    pub bound: f64,
    pub exact: Option<f64>,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(kind: &str, n: usize, p: f64, w: Option<usize>, direction: BoundDirection, bound: f64, exact: Option<f64>) -> BoundReport {
        let (satisfied, slack) = match exact {
            None => (true, f64::NAN),
            Some(e) => {
                let slack = match direction {
                    BoundDirection::Upper => bound - e,
                    BoundDirection::Lower => e - bound,
                };
                (slack >= -BOUND_TOL, slack)
            }
        };
        BoundReport {
            kind: kind.to_string(),
            n,
            p,
            w,
            direction,
            bound,
            exact,
            satisfied,
            slack,
        }
    }
}

/// Quadratic-reduction checks for D_p^{⊗n}: success probability (both forms)
/// and output infidelity.
pub fn quadratic_reduction_reports(n: usize, p: f64) -> Result<Vec<BoundReport>> {
    let s = symmetric_depolarizing(n, p)?;
    let eps = input_infidelity(n, p);
    Ok(vec![
        BoundReport::new("success_prob", n, p, None, BoundDirection::Upper, ae_success_prob_bound(n, p)?, Some(s.success_prob)),
        BoundReport::new("success_prob_eps", n, p, None, BoundDirection::Upper, ae_success_prob_bound_eps(n, p)?, Some(s.success_prob)),
        BoundReport::new("infidelity", n, p, None, BoundDirection::Upper, ae_infidelity_bound(eps)?, Some(s.output_infidelity)),
    ])
}

/// Removed-count checks for every weight, both lower-bound forms.
pub fn removed_count_reports(n: usize) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for w in 1..=n {
        let exact = removed_count_exact(n, w)? as f64;
        out.push(BoundReport::new("removed_count", n, 0.0, Some(w), BoundDirection::Lower, removed_count_lower_bound(n, w)?, Some(exact)));
        out.push(BoundReport::new("removed_count_w2", n, 0.0, Some(w), BoundDirection::Lower, removed_count_lower_bound_w2(n, w)?, Some(exact)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(100, 50), Some(100891344545564193334812497256));
        assert_eq!(binomial(3, 5), Some(0));
        assert!(binomial(200, 100).is_none());
    }

    #[test]
    fn removed_counts() {
        assert_eq!(removed_count_exact(2, 1).unwrap(), 6);
        assert_eq!(removed_count_exact(2, 2).unwrap(), 6);
        assert_eq!(removed_count_exact(3, 1).unwrap(), 9);
        assert_eq!(removed_count_exact(1, 1).unwrap(), 3);
        assert!((removed_count_lower_bound(2, 1).unwrap() - 6.0).abs() < 1e-12);
        assert!((removed_count_lower_bound(2, 2).unwrap() - 3.0).abs() < 1e-12);
        assert!((removed_count_lower_bound(1, 1).unwrap() - 3.0).abs() < 1e-12);
        assert!(removed_count_exact(3, 0).is_err());
        assert!(removed_count_exact(3, 4).is_err());
        for n in 1..=6 {
            let e = removed_count_enumerated(n).unwrap();
            for w in 1..=n {
                assert_eq!(e[w], removed_count_exact(n, w).unwrap());
            }
        }
    }

    #[test]
    fn average_weight_trend() {
        let a4 = average_removed_weight(4).unwrap();
        let a8 = average_removed_weight(8).unwrap();
        assert!(a4 >= 2.0 && a8 >= 4.0);
        assert!(a8 > a4);
    }

    #[test]
    fn success_and_infidelity_examples() {
        let eps = input_infidelity(4, 0.01);
        assert!((eps - 0.03940399).abs() < 1e-12);
        assert!((ae_infidelity_bound(eps).unwrap() - 2.0 * eps * eps).abs() < 1e-15);
        assert!((2.0 * eps * eps - 0.003105).abs() < 1e-6);
        assert_eq!(ae_success_prob_bound(5, 0.0).unwrap(), 1.0);
        assert_eq!(ae_infidelity_bound(0.0).unwrap(), 0.0);
        let s = symmetric_depolarizing(2, 0.3).unwrap();
        assert!((s.success_prob - 0.52).abs() < 1e-15);
        assert!((ae_success_prob_bound(2, 0.3).unwrap() - 0.83).abs() < 1e-12);
    }

    #[test]
    fn symmetric_small_cases() {
        let p = 0.07;
        let s1 = symmetric_depolarizing(1, p).unwrap();
        assert!((s1.success_prob - (1.0 - p)).abs() < 1e-15);
        assert!((s1.output_fidelity - 1.0).abs() < 1e-15);
        let s2 = symmetric_depolarizing(2, p).unwrap();
        let q: f64 = 1.0 - p;
        assert!((s2.success_prob - (q * q + p * p / 3.0)).abs() < 1e-15);
        let total: f64 = s2.distribution.iter().map(|(_, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(symmetric_channel_engine(2, &PauliChannel::depolarizing(2, p).unwrap()).is_err());
        assert!(symmetric_depolarizing(100, 0.01).unwrap().success_prob > 0.0);
    }

    #[test]
    fn t_and_ccz() {
        let p = 0.3;
        let t = t_gate_purified(p / 3.0, p / 3.0, p / 3.0).unwrap();
        assert!((t.fidelity() - 0.8).abs() < 1e-15);
        assert!((t.prob(&"Z".parse().unwrap()) - 0.2).abs() < 1e-15);
        assert_eq!(t_gate_purified(0.2, 0.0, 0.0).unwrap(), PauliChannel::identity(1));
        assert!((ccz_purified_fidelity(0.3).unwrap() - 0.512).abs() < 1e-15);
        assert!(t_gate_purified(0.5, 0.4, 0.3).is_err());
    }

    #[test]
    fn resource_counts() {
        assert_eq!(full_correction_scaling(0.9, 0.1, 0).unwrap(), 0.9);
        let p: f64 = 0.05;
        let n = 3;
        let v = full_correction_scaling((1.0 - p).powi(n), p, 2 * n as usize).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(full_correction_scaling(0.9, 0.1, 3).is_err());
        assert_eq!(select_gate_count(4), 40);
        assert_eq!(full_correction_ancillae(5), 10);
        assert!((ancilla_lower_bound(8, 2).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn f_critical_values() {
        assert_eq!(f_critical(0.0, 0.0).unwrap(), 1.0);
        let a = 1.0 - 0.01 * 2.0 / 3.0;
        let want = 0.99 * 0.99 * a * a * a * a * a;
        assert!((f_critical(0.01, 0.01).unwrap() - want).abs() < 1e-15);
        let grid = [0.0, 0.005, 0.01, 0.02, 0.05];
        for &x in &grid {
            for &y in &grid {
                if x > y {
                    assert!(f_critical(x, y).unwrap() < f_critical(y, x).unwrap());
                }
            }
        }
        assert!(f_critical(1.2, 0.0).is_err());
    }

    #[test]
    fn global_model() {
        assert_eq!(global_noise_model(5, 0.0).unwrap(), (1.0, 1.0));
        let (f, b) = global_noise_model(40, 0.1).unwrap();
        assert!((f - 0.9).abs() < 1e-12 && (b - 0.98).abs() < 1e-15);
        let ch = global_noise_channel(4, 0.1).unwrap();
        assert!((ch.fidelity() - global_noise_model(4, 0.1).unwrap().0).abs() < 1e-14);
    }

    #[test]
    fn reports() {
        let r = quadratic_reduction_reports(2, 0.1).unwrap();
        assert!(r.iter().all(|b| b.satisfied));
        assert!((r[0].exact.unwrap() - 0.8133333333333334).abs() < 1e-12);
        assert!((r[2].exact.unwrap() - 0.0040983606557377).abs() < 1e-12);
        assert!(removed_count_reports(5).unwrap().iter().all(|b| b.satisfied));
    }
}
