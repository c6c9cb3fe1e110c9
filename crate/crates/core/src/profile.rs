//! Radio-profile files: flat `key = value` text with `#` comments.
//!
//! Keys (see `profiles/ti_ez430_seh.profile` for the reference board):
//! `p_tx_mw`, `p_rx_mw`, `p_sleep_mw`, `msg_dur_ms`, `c_sr_uj`, `c_rs_uj`,
//! `c_st_uj`, `c_ts_uj`, `t_cca_ms`. `p_sleep_mw` and `t_cca_ms` default to 0,
//! `c_st_uj` to `c_sr_uj`; the rest are required.

use std::collections::HashMap;
use std::path::Path;

use crate::model::RadioProfile;
use crate::{Error, Result};

/// The TI eZ430 + solar harvester measurements used throughout the test and
/// reference tables. Must match the bundled profile file byte-for-value.
pub fn reference_radio() -> RadioProfile {
    RadioProfile {
        p_tx: 59.23,
        p_rx: 64.85,
        p_sleep: 0.0,
        msg_dur: 0.92,
        c_sr: 74.36,
        c_rs: 13.48,
        c_st: 74.36,
        c_ts: 4.83,
        t_cca: 0.0,
    }
}

pub fn parse_profile(text: &str) -> Result<RadioProfile> {
    let mut seen: HashMap<&str, f64> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Profile(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Profile(format!("line {}: bad number for {key}", lineno + 1)))?;
        const KEYS: [&str; 9] = [
            "p_tx_mw", "p_rx_mw", "p_sleep_mw", "msg_dur_ms", "c_sr_uj", "c_rs_uj", "c_st_uj",
            "c_ts_uj", "t_cca_ms",
        ];
        let canonical = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::Profile(format!("line {}: unknown key {key}", lineno + 1)))?;
        if seen.insert(canonical, value).is_some() {
            return Err(Error::Profile(format!("duplicate key {key}")));
        }
    }
    let required = |key: &str| {
        seen.get(key)
            .copied()
            .ok_or_else(|| Error::Profile(format!("missing required key {key}")))
    };
    let c_sr = required("c_sr_uj")?;
    let radio = RadioProfile {
        p_tx: required("p_tx_mw")?,
        p_rx: required("p_rx_mw")?,
        p_sleep: seen.get("p_sleep_mw").copied().unwrap_or(0.0),
        msg_dur: required("msg_dur_ms")?,
        c_sr,
        c_rs: required("c_rs_uj")?,
        c_st: seen.get("c_st_uj").copied().unwrap_or(c_sr),
        c_ts: required("c_ts_uj")?,
        t_cca: seen.get("t_cca_ms").copied().unwrap_or(0.0),
    };
    radio.validate()?;
    Ok(radio)
}

pub fn load_profile(path: &Path) -> Result<RadioProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Profile(format!("{}: {e}", path.display())))?;
    parse_profile(&text)
}
