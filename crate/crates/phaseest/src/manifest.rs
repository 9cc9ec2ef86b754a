//! Run manifests and the key=value config-file format.
//!
//! Every output file is accompanied by `<file>.manifest.json` recording the
//! command, the fully resolved configuration, the seed and timestamps, so
//! any run can be reproduced from its manifest alone.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Fully resolved `simulate` configuration (flags after config-file merge).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSpec {
    pub scheme: String,
    pub k_max: u32,
    pub mk: u32,
    pub mu: u32,
    /// Standard budget; `None` means the scheme's default.
    pub ns: Option<u32>,
    pub trials: usize,
    pub seed: u64,
    pub format: String,
    pub phi_policy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: SimulateSpec,
    pub seed: u64,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Path of the manifest that accompanies `out`.
    pub fn path_for(out: &str) -> String {
        format!("{out}.manifest.json")
    }
}

/// Parses the `key = value` config-file format. Blank lines and `#`
/// comments are ignored; keys use the flag spelling (`k-max`, `phi-policy`).
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_json_round_trip() {
        let m = RunManifest {
            command: "simulate".into(),
            config: SimulateSpec {
                scheme: "hybrid".into(),
                k_max: 5,
                mk: 1,
                mu: 0,
                ns: None,
                trials: 1000,
                seed: 1,
                format: "csv".into(),
                phi_policy: "uniform".into(),
            },
            seed: 1,
            version: "0.1.0".into(),
            started_at: "2026-08-23T00:00:00Z".into(),
            finished_at: "2026-08-23T00:00:01Z".into(),
            outputs: vec!["out.csv".into()],
        };
        let back = RunManifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn key_values_parse_with_comments() {
        let text = "# comment\nscheme = qpea\nk-max=4\n\ntrials = 500\n";
        let map = parse_key_values(text).unwrap();
        assert_eq!(map["scheme"], "qpea");
        assert_eq!(map["k-max"], "4");
        assert_eq!(map["trials"], "500");
    }

    #[test]
    fn key_values_reject_garbage() {
        assert!(parse_key_values("just words\n").is_err());
        assert!(parse_key_values("= value\n").is_err());
    }
}
