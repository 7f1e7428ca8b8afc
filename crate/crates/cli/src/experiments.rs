//! Sweep drivers. Each returns rows in grid order; cells run on the rayon
//! pool but are collected in order, so output never depends on scheduling.

use anyhow::{bail, Context, Result};
use qfilter_core::analytics::{
    ccz_purified_fidelity, f_critical, global_noise_channel, global_noise_model, removed_count_enumerated, removed_count_exact,
    removed_count_reports, t_gate_purified, quadratic_reduction_reports, BoundDirection, BoundReport,
};
use qfilter_core::channels::dense::{ccz_matrix, embed_operator, hs_inner, t_gate_matrix, DenseChannel, LinearMap, Superoperator};
use qfilter_core::filters::{ae_filter, commutation_filter_kraus};
use qfilter_core::noisy_sim::{
    build_ae_filter_circuit, build_bare_circuit, build_correction_filter_circuit, build_t_filter_circuit, build_table_filter_circuit,
    dense_oracle_run, monte_carlo, propagate_fault, table_site, AeNoise, FaultModel, FilterKind, SimResult,
};
use qfilter_core::{brickwork_circuit, CliffordCircuit, CliffordTableau, Pauli, PauliChannel, PauliString};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::*;

/// Dense-oracle agreement threshold for the exact experiments.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig5Row {
    pub pc: f64,
    pub pt: f64,
    pub fidelity: f64,
    pub delta_f: f64,
    pub stderr: f64,
    pub postselect_rate: f64,
    /// Per-qubit critical fidelity raised to the n-th power.
    pub f_critical: f64,
    pub shots: u64,
}

pub fn run_fig5(cfg: &Fig5Config) -> Result<Vec<Fig5Row>> {
    let cells: Vec<(f64, f64)> = cfg.rates.iter().flat_map(|&pc| cfg.rates.iter().map(move |&pt| (pc, pt))).collect();
    let sims: Vec<SimResult> = cells
        .par_iter()
        .map(|&(pc, pt)| {
            let channel = FaultModel::depolarizing(0..cfg.n, cfg.channel_rate);
            let circ = build_correction_filter_circuit(cfg.n, pc, pt, channel)?;
            Ok(monte_carlo(&circ, cfg.shots, cfg.seed)?)
        })
        .collect::<Result<_>>()?;

    let max = cfg.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reference = cells
        .iter()
        .position(|&c| c == (max, max))
        .map(|k| sims[k].fidelity_estimate)
        .context("grid has no (max, max) cell")?;
    cells
        .iter()
        .zip(&sims)
        .map(|(&(pc, pt), r)| {
            Ok(Fig5Row {
                pc,
                pt,
                fidelity: r.fidelity_estimate,
                delta_f: r.fidelity_estimate - reference,
                stderr: r.fidelity_stderr,
                postselect_rate: r.postselect_rate,
                f_critical: f_critical(pc, pt)?.powi(cfg.n as i32),
                shots: r.shots,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig6Row {
    pub variant: &'static str,
    pub depth: usize,
    pub p: f64,
    pub original_fidelity: f64,
    pub original_stderr: f64,
    pub filtered_fidelity: f64,
    pub filtered_stderr: f64,
    pub postselect_rate: f64,
    pub postselect_stderr: f64,
    /// filtered / original; NaN when the original fidelity is zero.
    pub gain: f64,
    pub shots: u64,
}

impl Fig6Row {
    /// Standard error of filtered − original, treating the two as independent.
    pub fn diff_stderr(&self) -> f64 {
        self.original_stderr.hypot(self.filtered_stderr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossover {
    pub p: f64,
    /// First grid depth where filtered beats original by more than 2σ.
    pub depth: Option<usize>,
}

/// Gate noise for one variant at swept rate `p`.
pub fn fig6_noise(cfg: &Fig6Config, p: f64) -> AeNoise {
    let f = cfg.fixed_rate;
    let (pc_filter, pt_filter, pc_circuit, pt_circuit) = match cfg.variant {
        Fig6Variant::SameNoise => (p, p, p, p),
        Fig6Variant::CleanFilterPartial => (p, f, f, f),
        Fig6Variant::NoiselessFilter => (0.0, 0.0, p, p),
    };
    AeNoise { pc_filter, pt_filter, pc_circuit, pt_circuit, idle: cfg.idle_rate }
}

pub fn run_fig6(cfg: &Fig6Config) -> Result<Vec<Fig6Row>> {
    let cells: Vec<(f64, usize)> = cfg.rates.iter().flat_map(|&p| cfg.depths.iter().map(move |&d| (p, d))).collect();
    cells
        .par_iter()
        .map(|&(p, depth)| {
            let circ = brickwork_circuit(cfg.n, depth)?;
            let noise = fig6_noise(cfg, p);
            // same seed and stream keys: both runs see the same circuit faults
            let orig = monte_carlo(&build_bare_circuit(&circ, noise.pc_circuit, noise.pt_circuit, None)?, cfg.shots, cfg.seed)?;
            let filt = monte_carlo(&build_ae_filter_circuit(&circ, noise, None)?, cfg.shots, cfg.seed)?;
            let gain = if orig.fidelity_estimate > 0.0 { filt.fidelity_estimate / orig.fidelity_estimate } else { f64::NAN };
            Ok(Fig6Row {
                variant: cfg.variant.name(),
                depth,
                p,
                original_fidelity: orig.fidelity_estimate,
                original_stderr: orig.fidelity_stderr,
                filtered_fidelity: filt.fidelity_estimate,
                filtered_stderr: filt.fidelity_stderr,
                postselect_rate: filt.postselect_rate,
                postselect_stderr: filt.postselect_stderr,
                gain,
                shots: cfg.shots,
            })
        })
        .collect()
}

/// Crossover depth per rate, scanning depths in grid order.
pub fn fig6_crossovers(rows: &[Fig6Row]) -> Vec<Crossover> {
    let mut rates: Vec<f64> = Vec::new();
    for r in rows {
        if !rates.contains(&r.p) {
            rates.push(r.p);
        }
    }
    rates
        .into_iter()
        .map(|p| Crossover {
            p,
            depth: rows
                .iter()
                .filter(|r| r.p == p)
                .find(|r| r.filtered_fidelity - r.original_fidelity > 2.0 * r.diff_stderr())
                .map(|r| r.depth),
        })
        .collect()
}

pub fn run_bounds(cfg: &BoundsConfig) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &n in &cfg.n_values {
        for &p in &cfg.rates {
            out.extend(quadratic_reduction_reports(n, p)?);
        }
    }
    for n in 1..=cfg.count_n_max {
        let brute = removed_count_enumerated(n)?;
        for (w, &b) in brute.iter().enumerate().skip(1) {
            let closed = removed_count_exact(n, w)? as f64;
            let mut r = BoundReport::new("removed_count_enumeration", n, 0.0, Some(w), BoundDirection::Lower, closed, Some(b as f64));
            r.satisfied = closed == b as f64;
            out.push(r);
        }
        out.extend(removed_count_reports(n)?);
    }
    for n in 2..=cfg.global_n_max {
        for &eps in &cfg.global_eps {
            let (_, bound) = global_noise_model(n, eps)?;
            let filtered = ae_filter(&global_noise_channel(n, eps)?, &CliffordTableau::identity(n))?;
            let f = filtered.channel.map(|c| c.fidelity()).unwrap_or(0.0);
            out.push(BoundReport::new("global_model_fidelity", n, eps, None, BoundDirection::Lower, bound, Some(f)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub filter: &'static str,
    pub location: &'static str,
    pub fault: char,
    /// Propagated fault on the ancilla (q1) and the target (q2).
    pub q1: char,
    pub q2: char,
    pub expected_q1: char,
    pub expected_q2: char,
    pub literal_match: bool,
    /// Match up to a Z on the ancilla, which acts trivially once it is
    /// rotated back to |0⟩.
    pub equivalent: bool,
}

/// Reference propagation table: for each filter, the (fault, location)
/// columns X_A Z_A X_C Z_C X_D Z_D and the resulting ancilla/target letters.
const TABLE1_COLUMNS: [(char, &str); 6] = [('X', "A"), ('Z', "A"), ('X', "C"), ('Z', "C"), ('X', "D"), ('Z', "D")];
const TABLE1_EXPECTED: [(&str, &str, &str); 2] = [("F_Z", "ZXZXIZ", "ZXIXXZ"), ("F_X", "ZXZXZI", "XZIZXZ")];

pub fn run_table1() -> Result<Vec<Table1Row>> {
    let mut rows = Vec::new();
    for (name, exp_q1, exp_q2) in TABLE1_EXPECTED {
        let kind = if name == "F_Z" { FilterKind::Z } else { FilterKind::X };
        let circ = build_table_filter_circuit(kind)?;
        for (k, &(fault, location)) in TABLE1_COLUMNS.iter().enumerate() {
            // qubit 1 is the ancilla, qubit 0 the target
            let on = if location == "D" { 0 } else { 1 };
            let letter = if fault == 'X' { Pauli::X } else { Pauli::Z };
            let site = table_site(location).context("unknown table location")?;
            let prop = propagate_fault(&circ, site, &PauliString::single(2, on, letter)?)?;
            let q1 = prop.residual.letter(1).to_char();
            let q2 = prop.residual.letter(0).to_char();
            let expected_q1 = exp_q1.as_bytes()[k] as char;
            let expected_q2 = exp_q2.as_bytes()[k] as char;
            let strip_z = |c: char| if c == 'Z' { 'I' } else { c };
            rows.push(Table1Row {
                filter: name,
                location,
                fault,
                q1,
                q2,
                expected_q1,
                expected_q2,
                literal_match: q1 == expected_q1 && q2 == expected_q2,
                equivalent: strip_z(q1) == strip_z(expected_q1) && q2 == expected_q2,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TgateRow {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub expected_p_i: f64,
    pub expected_p_z: f64,
    pub input_fidelity: f64,
    pub distance: f64,
    pub pass: bool,
}

pub fn run_tgate(cfg: &TgateConfig) -> Result<Vec<TgateRow>> {
    let t = t_gate_matrix();
    let letter = |s: &str| -> Result<PauliString> { Ok(s.parse()?) };
    cfg.rates
        .iter()
        .map(|&[px, py, pz]| {
            let noise = PauliChannel::single_qubit(1.0 - px - py - pz, px, py, pz)?;
            let run = dense_oracle_run(&build_t_filter_circuit(&noise)?)?;
            let m = run.accepted.context("filter never accepts")?;
            // undo the ideal gate to read off the residual Pauli noise
            let residual = Superoperator::from_fn(1, |e| m.apply_op(&(t.adjoint() * e * &t)))?.to_pauli_channel(EXACT_TOL)?;
            let expected = t_gate_purified(px, py, pz)?;
            let distance = residual.max_abs_diff(&expected);
            Ok(TgateRow {
                px,
                py,
                pz,
                p_i: residual.prob(&letter("I")?),
                p_x: residual.prob(&letter("X")?),
                p_y: residual.prob(&letter("Y")?),
                p_z: residual.prob(&letter("Z")?),
                expected_p_i: expected.prob(&letter("I")?),
                expected_p_z: expected.prob(&letter("Z")?),
                input_fidelity: noise.fidelity(),
                distance,
                pass: distance < EXACT_TOL,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CczRow {
    pub p: f64,
    pub input_fidelity: f64,
    pub filtered_fidelity: f64,
    pub expected_fidelity: f64,
    pub pass: bool,
}

/// Per-qubit Z filters (X correction) around CCZ with local depolarizing
/// noise, evaluated on the 3-qubit Kraus operators.
pub fn ccz_filtered_fidelity(p: f64) -> Result<f64> {
    let ccz = ccz_matrix();
    let local = DenseChannel::from_pauli(&PauliChannel::depolarizing(1, p)?)?;
    let mut kraus = vec![ccz.clone()];
    for q in 0..3 {
        let ops = local.kraus().iter().map(|k| embed_operator(k, &[q], 3)).collect::<qfilter_core::Result<Vec<_>>>()?;
        kraus = kraus.iter().flat_map(|k| ops.iter().map(move |l| l * k)).collect();
    }
    for q in 0..3 {
        let z = PauliString::single(3, q, Pauli::Z)?;
        let x = PauliString::single(3, q, Pauli::X)?;
        kraus = commutation_filter_kraus(&kraus, &z, &x)?;
    }
    // validates trace preservation of the filtered map
    DenseChannel::new(3, kraus.clone())?;
    Ok(kraus.iter().map(|k| hs_inner(&ccz, k).norm_sqr()).sum::<f64>() / 64.0)
}

pub fn run_ccz(cfg: &CczConfig) -> Result<Vec<CczRow>> {
    cfg.rates
        .iter()
        .map(|&p| {
            let filtered = ccz_filtered_fidelity(p)?;
            let expected = ccz_purified_fidelity(p)?;
            Ok(CczRow {
                p,
                input_fidelity: (1.0 - p).powi(3),
                filtered_fidelity: filtered,
                expected_fidelity: expected,
                pass: (filtered - expected).abs() < EXACT_TOL,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRow {
    pub circuit: &'static str,
    pub fidelity: f64,
    pub stderr: f64,
    pub postselect_rate: f64,
    pub postselect_stderr: f64,
    pub accepted: u64,
    pub shots: u64,
}

pub fn run_single(cfg: &RunConfig) -> Result<Vec<RunRow>> {
    let c = &cfg.circuit;
    let circ = match &c.gates {
        Some(text) => CliffordCircuit::from_text(c.n, text)?,
        None if c.n >= 2 => brickwork_circuit(c.n, c.depth)?,
        None if c.depth == 0 => CliffordCircuit::new(c.n),
        None => bail!("brickwork circuits need n >= 2"),
    };
    let n = &cfg.noise;
    let noise = AeNoise { pc_filter: n.pc_filter, pt_filter: n.pt_filter, pc_circuit: n.pc_circuit, pt_circuit: n.pt_circuit, idle: n.idle };
    let orig = monte_carlo(&build_bare_circuit(&circ, noise.pc_circuit, noise.pt_circuit, None)?, cfg.shots, cfg.seed)?;
    let filt = monte_carlo(&build_ae_filter_circuit(&circ, noise, None)?, cfg.shots, cfg.seed)?;
    let row = |name, r: &SimResult| RunRow {
        circuit: name,
        fidelity: r.fidelity_estimate,
        stderr: r.fidelity_stderr,
        postselect_rate: r.postselect_rate,
        postselect_stderr: r.postselect_stderr,
        accepted: r.accepted,
        shots: r.shots,
    };
    Ok(vec![row("original", &orig), row("filtered", &filt)])
}
