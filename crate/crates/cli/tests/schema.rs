use gsqg_cli::config::{
    config_schema, parse_config, LpConfig, RunConfig, SweepConfig, VerifyConfig,
};
use serde::Serialize;
use serde_json::Value;
use std::path::PathBuf;

fn schema_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/config.schema.json")
}

/// Set `GSQG_UPDATE_SCHEMA=1` to rewrite the shipped schema.
#[test]
fn shipped_schema_is_current() {
    let fresh = config_schema();
    let path = schema_path();
    if std::env::var_os("GSQG_UPDATE_SCHEMA").is_some() {
        let mut body = serde_json::to_string_pretty(&fresh).unwrap();
        body.push('\n');
        std::fs::write(&path, body).unwrap();
    }
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(shipped, fresh, "docs/config.schema.json is stale");
}

/// `{property: default}` as stated in the schema for one definition.
fn defaults_of(def: &str) -> Value {
    let schema = config_schema();
    let props = schema["$defs"][def]["properties"]
        .as_object()
        .unwrap()
        .clone();
    props
        .into_iter()
        .map(|(k, v)| (k, v["default"].clone()))
        .collect()
}

fn check<T: Serialize + Default>(def: &str) {
    assert_eq!(
        defaults_of(def),
        serde_json::to_value(T::default()).unwrap(),
        "{def}"
    );
}

#[test]
fn schema_states_every_default() {
    check::<RunConfig>("RunConfig");
    check::<SweepConfig>("ConvergenceConfig");
    check::<VerifyConfig>("VerifyConfig");
    check::<LpConfig>("LpConfig");
    check::<gsqg::solver::SolverConfig>("SolverConfig");
}

#[test]
fn empty_objects_parse_to_defaults() {
    assert_eq!(
        parse_config::<RunConfig>("{}").unwrap(),
        RunConfig::default()
    );
    assert_eq!(
        parse_config::<SweepConfig>("{}").unwrap(),
        SweepConfig::default()
    );
    assert_eq!(
        parse_config::<VerifyConfig>("{}").unwrap(),
        VerifyConfig::default()
    );
    assert_eq!(parse_config::<LpConfig>("{}").unwrap(), LpConfig::default());
}

#[test]
fn errors_carry_json_pointers() {
    let e = parse_config::<VerifyConfig>(r#"{"kpv": {"exponents": {"p": "two"}}}"#).unwrap_err();
    assert!(e.to_string().contains("/kpv/exponents/p"), "{e}");
    let e = parse_config::<SweepConfig>(r#"{"alphas": [0.4, null]}"#).unwrap_err();
    assert!(e.to_string().contains("/alphas/1"), "{e}");
    let e = parse_config::<RunConfig>(r#"{"initial": {"profile": "nope"}}"#).unwrap_err();
    assert!(e.to_string().contains("/initial"), "{e}");
    assert_eq!(e.exit_code(), gsqg_cli::EXIT_CONFIG);
}
