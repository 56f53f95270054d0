use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::case::CaseConfig;
use crate::error::{Error, Result};
use crate::planner::BeamConfig;
use crate::reasoner::{HeuristicReasoner, NullReasoner, Reasoner, RemoteConfig, RemoteReasoner};
use crate::retrieval::RetrievalConfig;
use crate::sim::FleetSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReasonerChoice {
    Null,
    Heuristic,
    Remote(RemoteConfig),
}

impl ReasonerChoice {
    pub fn build(&self) -> Result<Box<dyn Reasoner>> {
        Ok(match self {
            ReasonerChoice::Null => Box::new(NullReasoner),
            ReasonerChoice::Heuristic => Box::new(HeuristicReasoner),
            ReasonerChoice::Remote(c) => Box::new(RemoteReasoner::new(c.clone())?),
        })
    }
}

/// Beam settings for the grid-town fleet. Blocks are 50 m and exits run
/// at 5 to 10 m/s, so a 3 s step covers most of a block and 8 steps reach
/// about two blocks past the exit.
pub fn fleet_beam() -> BeamConfig {
    BeamConfig {
        width: 30,
        depth: 8,
        step_dt: 3.0,
        kappa_curv: 0.3,
        delta_fusion: 4.0,
        v_floor: 5.0,
        ..BeamConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Town, cameras, seed and scenario count.
    pub fleet: FleetSpec,
    /// Perception thresholds, exit window, beam and scoring settings.
    pub case: CaseConfig,
    pub retrieval: RetrievalConfig,
    pub reasoner: ReasonerChoice,
    pub output_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            fleet: FleetSpec::default(),
            case: CaseConfig {
                beam: fleet_beam(),
                ..CaseConfig::default()
            },
            retrieval: RetrievalConfig::default(),
            reasoner: ReasonerChoice::Null,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        self.fleet.validate()?;
        self.case.validate()?;
        self.retrieval.validate()?;
        if let ReasonerChoice::Remote(r) = &self.reasoner {
            r.validate()?;
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::InvalidInput("output_dir must not be empty".into()));
        }
        Ok(())
    }

    /// Parses JSON text, applies `key=value` overrides (dotted paths; the
    /// value is JSON when it parses as JSON, a string otherwise) and
    /// validates the result.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self> {
        let mut v: Value = if text.trim().is_empty() {
            serde_json::to_value(Config::default())?
        } else {
            serde_json::from_str(text)?
        };
        for o in overrides {
            apply_override(&mut v, o)?;
        }
        let cfg: Config = serde_path_to_error::deserialize(v)
            .map_err(|e| Error::InvalidInput(format!("config field {}: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn apply_override(root: &mut Value, kv: &str) -> Result<()> {
    let (key, raw) = kv
        .split_once('=')
        .ok_or_else(|| Error::InvalidInput(format!("override {kv:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidInput(format!("bad override key {key:?}")));
    }
    let mut cur = root;
    for p in &parts[..parts.len() - 1] {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::InvalidInput(format!("override {key}: {p} is not an object")))?;
        cur = obj.entry(p.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = cur
        .as_object_mut()
        .ok_or_else(|| Error::InvalidInput(format!("override {key}: parent is not an object")))?;
    obj.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default() {
        assert_eq!(Config::load("", &[]).unwrap(), Config::default());
        assert_eq!(Config::load("{}", &[]).unwrap(), Config::default());
    }

    #[test]
    fn overrides_apply_by_path() {
        let c = Config::load("{}", &["fleet.seed=11".into(), "reasoner={\"kind\":\"heuristic\"}".into()]).unwrap();
        assert_eq!(c.fleet.seed, 11);
        assert_eq!(c.reasoner, ReasonerChoice::Heuristic);
        let c = Config::load("{}", &["output_dir=elsewhere".into()]).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn bad_types_and_fields_rejected() {
        let e = Config::load("{}", &["fleet.seed=abc".into()]).unwrap_err().to_string();
        assert!(e.contains("fleet.seed"), "{e}");
        assert!(Config::load("{\"fleet\": {\"sedd\": 1}}", &[]).is_err());
        assert!(Config::load("{}", &["case.top_k=0".into()]).is_err());
        assert!(Config::load("{}", &["noequals".into()]).is_err());
    }

    #[test]
    fn remote_choice_parses() {
        let c = Config::load(r#"{"reasoner": {"kind": "remote", "model": "m", "api_key_env": "K"}}"#, &[]).unwrap();
        let ReasonerChoice::Remote(r) = c.reasoner else { panic!() };
        assert_eq!((r.model.as_str(), r.api_key_env.as_str()), ("m", "K"));
    }
}
