//! Scenario files: TOML with sections `[radio]`, `[network]`, `[protocol]`,
//! `[energy]`, `[topology]`. The radio section is optional so a shared profile
//! file can supply it instead; everything else validates into checked types
//! before any event executes.

use std::path::Path;

use panda_core::baselines::{SlotProtocolParams, DEFAULT_GUARD, DEFAULT_SLOT};
use panda_core::dynamic::PandaDLaw;
use panda_core::optimizer::{pca, PcaSettings};
use panda_core::{NetworkParams, PandaConfig, RadioProfile};
use serde::Deserialize;

use crate::engine::{run_renewal_sim, EnergyConfig, Protocol, RenewalSimConfig};
use crate::metrics::SimReport;
use crate::slots::simulate_slot_protocol;
use crate::topology::Topology;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolChoice {
    Panda,
    PandaD,
    SearchlightE,
    BdE,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub radio: Option<RadioProfile>,
    pub nodes: usize,
    pub p_budget_mw: Option<f64>,
    pub protocol: ProtocolChoice,
    /// Fixed mean sleeps (ms): one entry for all nodes or one per node.
    /// Empty means "derive from the budget".
    pub sleep_mean_ms: Vec<f64>,
    pub listen_ms: Option<f64>,
    pub bounded_sleep: bool,
    /// Budget estimate driving the voltage-adaptive law; falls back to the
    /// network budget.
    pub p_budget_est_mw: Option<f64>,
    pub slot_ms: f64,
    pub guard_ms: f64,
    pub energy: Option<EnergyConfig>,
    pub topology: Topology,
}

// Raw file shape. Kept separate from the checked type so partial or
// misspelled sections fail loudly instead of defaulting silently.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    radio: Option<RawRadio>,
    network: RawNetwork,
    protocol: RawProtocol,
    energy: Option<RawEnergy>,
    topology: Option<RawTopology>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadio {
    p_tx_mw: f64,
    p_rx_mw: f64,
    #[serde(default)]
    p_sleep_mw: f64,
    msg_dur_ms: f64,
    c_sr_uj: f64,
    c_rs_uj: f64,
    c_st_uj: Option<f64>,
    c_ts_uj: f64,
    #[serde(default)]
    t_cca_ms: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    nodes: usize,
    p_budget_mw: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    protocol: ProtocolChoice,
    sleep_mean_ms: Option<ScalarOrVec>,
    listen_ms: Option<f64>,
    #[serde(default)]
    bounded_sleep: bool,
    p_budget_est_mw: Option<f64>,
    slot_ms: Option<f64>,
    guard_ms: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnergy {
    capacitance_mf: Option<f64>,
    harvest_mw: ScalarOrVec,
    efficiency: Option<f64>,
    v_init_v: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarOrVec {
    Scalar(f64),
    Vec(Vec<f64>),
}

impl ScalarOrVec {
    fn into_vec(self) -> Vec<f64> {
        match self {
            ScalarOrVec::Scalar(x) => vec![x],
            ScalarOrVec::Vec(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    kind: Option<String>,
    edges: Option<Vec<(usize, usize)>>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        let nodes = raw.network.nodes;
        if nodes == 0 {
            return Err(Error::Scenario("network.nodes must be positive".into()));
        }
        let radio = raw.radio.map(|r| RadioProfile {
            p_tx: r.p_tx_mw,
            p_rx: r.p_rx_mw,
            p_sleep: r.p_sleep_mw,
            msg_dur: r.msg_dur_ms,
            c_sr: r.c_sr_uj,
            c_rs: r.c_rs_uj,
            c_st: r.c_st_uj.unwrap_or(r.c_sr_uj),
            c_ts: r.c_ts_uj,
            t_cca: r.t_cca_ms,
        });
        if let Some(r) = &radio {
            r.validate()?;
        }
        let topology = match raw.topology {
            None => Topology::clique(nodes),
            Some(t) => match (t.kind.as_deref(), t.edges) {
                (Some("clique") | None, None) => Topology::clique(nodes),
                (Some("line"), None) => Topology::line(nodes),
                (None, Some(edges)) => Topology::from_edges(nodes, &edges)
                    .map_err(|e| Error::Scenario(e.to_string()))?,
                (Some(k), None) => {
                    return Err(Error::Scenario(format!(
                        "unknown topology kind {k:?} (use clique, line, or edges)"
                    )))
                }
                (Some(_), Some(_)) => {
                    return Err(Error::Scenario(
                        "give either a topology kind or an edge list, not both".into(),
                    ))
                }
            },
        };
        let energy = raw
            .energy
            .map(|e| -> Result<EnergyConfig> {
                let harvest = e.harvest_mw.into_vec();
                if harvest.is_empty() || (harvest.len() != 1 && harvest.len() != nodes) {
                    return Err(Error::Scenario(format!(
                        "need 1 or {nodes} harvest entries, got {}",
                        harvest.len()
                    )));
                }
                Ok(EnergyConfig {
                    capacitance_mf: e.capacitance_mf.unwrap_or(30.0),
                    harvest_mw: harvest,
                    efficiency: e.efficiency.unwrap_or(0.5),
                    v_init: e.v_init_v.unwrap_or(3.8),
                })
            })
            .transpose()?;
        let sleep_mean_ms = match raw.protocol.sleep_mean_ms {
            None => Vec::new(),
            Some(s) => {
                let v = s.into_vec();
                if v.is_empty() || (v.len() != 1 && v.len() != nodes) {
                    return Err(Error::Scenario(format!(
                        "need 1 or {nodes} sleep means, got {}",
                        v.len()
                    )));
                }
                v
            }
        };
        Ok(Scenario {
            radio,
            nodes,
            p_budget_mw: raw.network.p_budget_mw,
            protocol: raw.protocol.protocol,
            sleep_mean_ms,
            listen_ms: raw.protocol.listen_ms,
            bounded_sleep: raw.protocol.bounded_sleep,
            p_budget_est_mw: raw.protocol.p_budget_est_mw,
            slot_ms: raw.protocol.slot_ms.unwrap_or(DEFAULT_SLOT),
            guard_ms: raw.protocol.guard_ms.unwrap_or(DEFAULT_GUARD),
            energy,
            topology,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Fill the radio from a profile file when the scenario omits it.
    pub fn with_radio(mut self, radio: RadioProfile) -> Self {
        self.radio.get_or_insert(radio);
        self
    }

    fn radio(&self) -> Result<&RadioProfile> {
        self.radio.as_ref().ok_or_else(|| {
            Error::Scenario("no [radio] section; supply one or pass a profile".into())
        })
    }

    fn budget(&self) -> Result<f64> {
        self.p_budget_mw.ok_or_else(|| {
            Error::Scenario("network.p_budget_mw required for this protocol setup".into())
        })
    }

    /// Resolve the fixed-sleep configs, tuning from the budget when the file
    /// gives no explicit rates.
    fn panda_configs(&self) -> Result<Vec<PandaConfig>> {
        let radio = self.radio()?;
        if self.sleep_mean_ms.is_empty() {
            let net = NetworkParams::new(self.nodes.max(2) as u32, self.budget()?)?;
            let sol = pca(radio, &net, &PcaSettings::default())?;
            return Ok(vec![sol.config]);
        }
        let listen = match self.listen_ms {
            Some(l) => l,
            None => {
                let net = NetworkParams::new(self.nodes.max(2) as u32, self.budget()?)?;
                pca(radio, &net, &PcaSettings::default())?.config.listen
            }
        };
        self.sleep_mean_ms
            .iter()
            .map(|&m| Ok(PandaConfig::from_sleep_mean(m, listen)?))
            .collect()
    }

    pub fn run(&self, duration_ms: f64, seed: u64) -> Result<SimReport> {
        let radio = self.radio()?.clone();
        match self.protocol {
            ProtocolChoice::Panda => {
                let cfg = RenewalSimConfig {
                    radio,
                    topology: self.topology.clone(),
                    protocol: Protocol::Panda(self.panda_configs()?),
                    energy: self.energy.clone(),
                    bounded_sleep: self.bounded_sleep,
                };
                run_renewal_sim(&cfg, duration_ms, seed)
            }
            ProtocolChoice::PandaD => {
                let p_est = self.p_budget_est_mw.or(self.p_budget_mw).ok_or_else(|| {
                    Error::Scenario(
                        "voltage-adaptive protocol needs p_budget_est_mw or a network budget"
                            .into(),
                    )
                })?;
                let law = match self.listen_ms {
                    Some(l) => PandaDLaw::new(&radio, p_est, l)?,
                    None => PandaDLaw::derive(&radio, p_est)?,
                };
                let cfg = RenewalSimConfig {
                    radio,
                    topology: self.topology.clone(),
                    protocol: Protocol::PandaD(law),
                    energy: self.energy.clone(),
                    bounded_sleep: self.bounded_sleep,
                };
                run_renewal_sim(&cfg, duration_ms, seed)
            }
            ProtocolChoice::SearchlightE | ProtocolChoice::BdE => {
                if self.energy.is_some() {
                    return Err(Error::Scenario(
                        "capacitor supplies are not modeled for the slotted baselines".into(),
                    ));
                }
                let budget = self.budget()?;
                let params = if self.protocol == ProtocolChoice::SearchlightE {
                    SlotProtocolParams::searchlight_with_slot(
                        &radio,
                        budget,
                        self.slot_ms,
                        self.guard_ms,
                    )?
                } else {
                    SlotProtocolParams::birthday_with_slot(
                        &radio,
                        budget,
                        self.slot_ms,
                        self.guard_ms,
                    )?
                };
                simulate_slot_protocol(&radio, &params, &self.topology, duration_ms, seed)
            }
        }
    }
}
