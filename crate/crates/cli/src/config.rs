//! Experiment configuration files.
//!
//! Every config is a JSON object tagged by `"experiment"`. Missing fields take
//! the defaults below, so `{"experiment": "fig5"}` is a complete config.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MIN_MC_SHOTS: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Fig5(Fig5Config),
    Fig6(Fig6Config),
    Bounds(BoundsConfig),
    Table1(Table1Config),
    Tgate(TgateConfig),
    Ccz(CczConfig),
    Run(RunConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig5Config {
    pub n: usize,
    /// Grid used for both pc and pt.
    pub rates: Vec<f64>,
    /// Depolarizing rate of the channel being corrected, on every qubit.
    pub channel_rate: f64,
    pub shots: u64,
    pub seed: u64,
}

impl Default for Fig5Config {
    fn default() -> Self {
        Fig5Config {
            n: 4,
            rates: vec![0.0, 0.005, 0.01, 0.02, 0.05],
            channel_rate: 0.1,
            shots: 1_000_000,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fig6Variant {
    /// Filter and circuit gates share the swept rate.
    SameNoise,
    /// Only the filter control rate is swept; the rest is fixed.
    CleanFilterPartial,
    /// Filter gates are perfect; circuit gates use the swept rate.
    NoiselessFilter,
}

impl Fig6Variant {
    pub const ALL: [Fig6Variant; 3] = [Fig6Variant::SameNoise, Fig6Variant::CleanFilterPartial, Fig6Variant::NoiselessFilter];

    pub fn name(self) -> &'static str {
        match self {
            Fig6Variant::SameNoise => "same-noise",
            Fig6Variant::CleanFilterPartial => "clean-filter-partial",
            Fig6Variant::NoiselessFilter => "noiseless-filter",
        }
    }

    pub fn parse(s: &str) -> Result<Fig6Variant> {
        match Fig6Variant::ALL.iter().find(|v| v.name() == s) {
            Some(v) => Ok(*v),
            None => bail!("unknown fig6 variant {s:?} (expected same-noise, clean-filter-partial or noiseless-filter)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig6Config {
    pub n: usize,
    pub depths: Vec<usize>,
    pub rates: Vec<f64>,
    pub variant: Fig6Variant,
    /// Rate of the non-swept gates in the clean-filter-partial variant.
    pub fixed_rate: f64,
    pub idle_rate: f64,
    pub shots: u64,
    pub seed: u64,
}

impl Default for Fig6Config {
    fn default() -> Self {
        Fig6Config {
            n: 12,
            depths: (1..=40).collect(),
            rates: vec![0.003, 0.01, 0.03],
            variant: Fig6Variant::SameNoise,
            fixed_rate: 0.01,
            idle_rate: 0.0,
            shots: 100_000,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub n_values: Vec<usize>,
    pub rates: Vec<f64>,
    /// Removed-count checks run for n = 1..=count_n_max (4^n enumeration).
    pub count_n_max: usize,
    pub global_eps: Vec<f64>,
    /// Global-model checks run for n = 2..=global_n_max.
    pub global_n_max: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            n_values: (2..=8).collect(),
            rates: vec![0.001, 0.005, 0.01, 0.05, 0.1],
            count_n_max: 6,
            global_eps: vec![0.001, 0.01, 0.05, 0.1],
            global_n_max: 6,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Config {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TgateConfig {
    /// (pX, pY, pZ) of the noise after the T gate.
    pub rates: Vec<[f64; 3]>,
}

impl Default for TgateConfig {
    fn default() -> Self {
        TgateConfig {
            rates: vec![[0.1, 0.1, 0.1], [0.01, 0.01, 0.01], [0.05, 0.0, 0.0], [0.0, 0.05, 0.01], [0.02, 0.01, 0.1]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CczConfig {
    pub rates: Vec<f64>,
}

impl Default for CczConfig {
    fn default() -> Self {
        CczConfig { rates: vec![0.01, 0.1, 0.3] }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub pc_filter: f64,
    pub pt_filter: f64,
    pub pc_circuit: f64,
    pub pt_circuit: f64,
    pub idle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub n: usize,
    /// Brickwork depth; ignored when `gates` is given.
    #[serde(default)]
    pub depth: usize,
    /// Gate list in text form, one gate per line (`CX 0 1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gates: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default = "default_run_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_run_shots() -> u64 {
    100_000
}

fn check_rates(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        bail!("{name} grid is empty");
    }
    if let Some(bad) = v.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        bail!("{name} contains {bad}, outside [0, 1]");
    }
    Ok(())
}

fn check_shots(shots: u64) -> Result<()> {
    if shots < MIN_MC_SHOTS {
        bail!("shots = {shots}; Monte Carlo experiments need at least {MIN_MC_SHOTS}");
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::Fig5(_) => "fig5",
            ExperimentConfig::Fig6(_) => "fig6",
            ExperimentConfig::Bounds(_) => "bounds",
            ExperimentConfig::Table1(_) => "table1",
            ExperimentConfig::Tgate(_) => "tgate",
            ExperimentConfig::Ccz(_) => "ccz",
            ExperimentConfig::Run(_) => "run",
        }
    }

    /// Default config for an experiment name.
    pub fn default_for(name: &str) -> Result<ExperimentConfig> {
        Ok(match name {
            "fig5" => ExperimentConfig::Fig5(Fig5Config::default()),
            "fig6" => ExperimentConfig::Fig6(Fig6Config::default()),
            "bounds" => ExperimentConfig::Bounds(BoundsConfig::default()),
            "table1" => ExperimentConfig::Table1(Table1Config::default()),
            "tgate" => ExperimentConfig::Tgate(TgateConfig::default()),
            "ccz" => ExperimentConfig::Ccz(CczConfig::default()),
            _ => bail!("experiment {name:?} has no default config"),
        })
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Fig5(c) => {
                if c.n == 0 {
                    bail!("n must be at least 1");
                }
                check_rates("rates", &c.rates)?;
                check_rates("channel_rate", &[c.channel_rate])?;
                check_shots(c.shots)
            }
            ExperimentConfig::Fig6(c) => {
                if c.n < 2 {
                    bail!("brickwork circuits need n >= 2");
                }
                if c.depths.is_empty() {
                    bail!("depths grid is empty");
                }
                check_rates("rates", &c.rates)?;
                check_rates("fixed_rate", &[c.fixed_rate])?;
                check_rates("idle_rate", &[c.idle_rate])?;
                check_shots(c.shots)
            }
            ExperimentConfig::Bounds(c) => {
                if c.n_values.is_empty() || c.n_values.contains(&0) {
                    bail!("n_values must be non-empty and positive");
                }
                check_rates("rates", &c.rates)?;
                if c.rates.contains(&1.0) {
                    bail!("rates must be below 1");
                }
                if c.count_n_max == 0 || c.count_n_max > 10 {
                    bail!("count_n_max must be in 1..=10");
                }
                check_rates("global_eps", &c.global_eps)?;
                if c.global_n_max > 8 {
                    bail!("global_n_max must be at most 8");
                }
                Ok(())
            }
            ExperimentConfig::Table1(_) => Ok(()),
            ExperimentConfig::Tgate(c) => {
                if c.rates.is_empty() {
                    bail!("rates grid is empty");
                }
                for r in &c.rates {
                    check_rates("rates", r)?;
                    if r.iter().sum::<f64>() > 1.0 {
                        bail!("pX + pY + pZ exceeds 1 in {r:?}");
                    }
                }
                Ok(())
            }
            ExperimentConfig::Ccz(c) => check_rates("rates", &c.rates),
            ExperimentConfig::Run(c) => {
                if c.circuit.n == 0 {
                    bail!("circuit.n must be at least 1");
                }
                let n = &c.noise;
                check_rates("noise", &[n.pc_filter, n.pt_filter, n.pc_circuit, n.pt_circuit, n.idle])?;
                check_shots(c.shots)
            }
        }
    }

    /// Applies `--shots` / `--seed` overrides where the experiment has them.
    pub fn override_with(&mut self, shots: Option<u64>, seed: Option<u64>) -> Result<()> {
        let slots = match self {
            ExperimentConfig::Fig5(c) => Some((&mut c.shots, &mut c.seed)),
            ExperimentConfig::Fig6(c) => Some((&mut c.shots, &mut c.seed)),
            ExperimentConfig::Run(c) => Some((&mut c.shots, &mut c.seed)),
            _ => None,
        };
        match slots {
            Some((sh, se)) => {
                if let Some(s) = shots {
                    *sh = s;
                }
                if let Some(s) = seed {
                    *se = s;
                }
            }
            None if shots.is_some() => bail!("{} is exact and takes no --shots", self.name()),
            None => {}
        }
        self.validate()
    }

    /// Seed recorded in output rows (0 for exact experiments).
    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Fig5(c) => c.seed,
            ExperimentConfig::Fig6(c) => c.seed,
            ExperimentConfig::Run(c) => c.seed,
            _ => 0,
        }
    }

    pub fn to_canonical_json(&self) -> String {
        // serde_json writes struct fields in declaration order, so this is stable
        serde_json::to_string(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_canonical_json().as_bytes());
        hex::encode(&digest[..8])
    }
}
