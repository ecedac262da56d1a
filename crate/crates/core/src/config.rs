//! JSON experiment documents.
//!
//! A document either names a builtin scenario and optionally overrides parts of
//! it, or describes a full experiment:
//!
//! ```json
//! { "scenario": "fig1", "controller": "istar_pi" }
//! ```
//!
//! ```json
//! {
//!   "name": "custom",
//!   "bank": [{ "label": "P", "a": [[-10.0]], "b": [10.0], "c": [1.0] }],
//!   "schedule": { "initial": { "plant": 0 }, "events": [] },
//!   "reference": { "kind": "step", "amplitude": 1.0 },
//!   "controller": { "kind": "pi", "kp": 1.0, "ki": 20.0 },
//!   "ts": 0.001,
//!   "horizon": 1.0
//! }
//! ```
//!
//! `controller` is either a kind name (`pi`, `ipi`, `istar_pi`), which selects the
//! scenario's tuning for builtins and the default parameters otherwise, or a full
//! controller object tagged by `kind`. Unknown keys are rejected.

use serde::Deserialize;
use serde_json::Value;

use crate::controller::{ControllerConfig, ControllerKind};
use crate::error::{Error, Result};
use crate::plant::{builtin_bank, StateSpaceSystem};
use crate::scenario::{
    builtin_scenario, ReferenceTrajectory, ScenarioConfig, SwitchingSchedule,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    scenario: Option<String>,
    name: Option<String>,
    bank: Option<Vec<StateSpaceSystem>>,
    schedule: Option<SwitchingSchedule>,
    reference: Option<ReferenceTrajectory>,
    controller: Option<Value>,
    ts: Option<f64>,
    horizon: Option<f64>,
    actuator_limit: Option<f64>,
}

enum ControllerSpec {
    Kind(ControllerKind),
    Full(ControllerConfig),
}

fn controller_spec(value: Value) -> Result<ControllerSpec> {
    match value {
        Value::String(name) => Ok(ControllerSpec::Kind(name.parse()?)),
        Value::Object(_) => serde_json::from_value(value)
            .map(ControllerSpec::Full)
            .map_err(|e| Error::Parse(format!("controller: {e}"))),
        _ => Err(Error::field("controller", "must be a kind name or a controller object")),
    }
}

/// Parses and validates a JSON document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parse_config_value(value)
}

pub fn parse_config_value(value: Value) -> Result<ScenarioConfig> {
    if !value.is_object() {
        return Err(Error::Parse("document must be a JSON object".into()));
    }
    let doc: Document = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let controller = doc.controller.map(controller_spec).transpose()?;

    let mut config = match &doc.scenario {
        Some(name) => {
            let builtin = builtin_scenario(name).ok_or_else(|| {
                Error::field("scenario", format!("no builtin scenario named `{name}`"))
            })?;
            let kind = match &controller {
                Some(ControllerSpec::Kind(k)) => *k,
                _ => ControllerKind::IstarPi,
            };
            builtin.config(kind)
        }
        None => {
            let schedule = doc
                .schedule
                .clone()
                .ok_or_else(|| Error::field("schedule", "required when no scenario is named"))?;
            let ts = doc.ts.ok_or_else(|| Error::field("ts", "required when no scenario is named"))?;
            let horizon = doc
                .horizon
                .ok_or_else(|| Error::field("horizon", "required when no scenario is named"))?;
            let kind = match &controller {
                Some(ControllerSpec::Kind(k)) => *k,
                _ => ControllerKind::IstarPi,
            };
            ScenarioConfig {
                name: "custom".into(),
                bank: builtin_bank(),
                schedule,
                reference: ReferenceTrajectory::unit_step(),
                controller: ControllerConfig::default_for(kind),
                ts,
                horizon,
                actuator_limit: None,
            }
        }
    };

    if let Some(name) = doc.name {
        config.name = name;
    }
    if let Some(bank) = doc.bank {
        config.bank = bank;
    }
    if let Some(schedule) = doc.schedule {
        config.schedule = schedule;
    }
    if let Some(reference) = doc.reference {
        config.reference = reference;
    }
    if let Some(ControllerSpec::Full(c)) = controller {
        config.controller = c;
    }
    if let Some(ts) = doc.ts {
        config.ts = ts;
    }
    if let Some(horizon) = doc.horizon {
        config.horizon = horizon;
    }
    if doc.actuator_limit.is_some() {
        config.actuator_limit = doc.actuator_limit;
    }
    config.validate()?;
    Ok(config)
}

/// Full document for `config`; parsing it yields an identical configuration.
pub fn to_document(config: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::S2;

    #[test]
    fn minimal_builtin_document() {
        let cfg = parse_config(r#"{"scenario": "fig1", "controller": "istar_pi"}"#).unwrap();
        let expected = builtin_scenario("fig1").unwrap().config(ControllerKind::IstarPi);
        assert_eq!(cfg, expected);
        assert_eq!(cfg.schedule.initial.plant, S2);
    }

    #[test]
    fn zero_ts_names_key() {
        let err = parse_config(r#"{"scenario": "fig1", "ts": 0}"#).unwrap_err();
        assert_eq!(err, Error::field("ts", "must be > 0"));
        assert!(err.to_string().contains("`ts`"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config(r#"{"scenario": "fig1", "tss": 0.1}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("tss")), "{err}");
        let err = parse_config(
            r#"{"scenario": "fig1", "controller": {"kind": "ipi", "ultra": {"alpha": 1.0, "beta": 2}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
    }

    #[test]
    fn unknown_scenario_and_controller() {
        assert!(parse_config(r#"{"scenario": "fig99"}"#).unwrap_err().to_string().contains("scenario"));
        assert!(parse_config(r#"{"scenario": "fig1", "controller": "pid"}"#)
            .unwrap_err()
            .to_string()
            .contains("controller"));
    }

    #[test]
    fn custom_document_requires_schedule() {
        let err = parse_config(r#"{"ts": 0.001, "horizon": 1.0}"#).unwrap_err();
        assert!(err.to_string().contains("schedule"));
    }

    #[test]
    fn custom_document() {
        let text = r#"{
            "name": "custom",
            "bank": [{ "label": "P", "a": [[-10.0]], "b": [10.0], "c": [1.0] }],
            "schedule": { "initial": { "plant": 0 } },
            "reference": { "kind": "step", "amplitude": 1.0 },
            "controller": { "kind": "pi", "kp": 1.0, "ki": 20.0 },
            "ts": 0.001,
            "horizon": 1.0
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.bank.len(), 1);
        assert_eq!(cfg.controller.kind(), ControllerKind::Pi);
        assert_eq!(parse_config(&to_document(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn bad_bank_dimensions_name_the_plant() {
        let text = r#"{
            "bank": [{ "label": "P", "a": [[-1.0, 0.0], [0.0, -1.0]], "b": [1.0], "c": [1.0, 0.0] }],
            "schedule": { "initial": { "plant": 0 } },
            "ts": 0.001, "horizon": 1.0
        }"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("bank[P].b"), "{err}");
    }
}
