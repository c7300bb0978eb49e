//! The shipped config files must describe exactly the built-in defaults.

use std::path::PathBuf;

use tfqsim::experiment::{ExperimentConfig, ExperimentKind};
use tfqsim::photonic::{build_cinc_circuit, Circuit, CircuitParams, PhysicalGrid};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn shipped_configs_equal_defaults() {
    for kind in ExperimentKind::ALL {
        let path = configs_dir().join(format!("{}.toml", kind.name()));
        let mut loaded = ExperimentConfig::load(&path).unwrap();
        let mut expected = ExperimentConfig::default_for(kind);
        if kind == ExperimentKind::Custom {
            assert!(loaded.circuit.as_ref().unwrap().exists());
            loaded.circuit = None;
            expected.circuit = None;
        }
        assert_eq!(loaded, expected, "{}", path.display());
    }
}

#[test]
fn shipped_circuit_matches_builder() {
    let loaded = Circuit::load(&configs_dir().join("circuits/cinc3.toml")).unwrap();
    let params = CircuitParams {
        mzm_extinction_db: 25.0,
        dwdm_extinction_db: f64::INFINITY,
    };
    assert_eq!(loaded, build_cinc_circuit(&PhysicalGrid::microring(), 3, &params).unwrap());
}

#[test]
fn circuit_file_round_trip_is_whitespace_stable() {
    let text = std::fs::read_to_string(configs_dir().join("circuits/cinc3.toml")).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let reserialized = Circuit::from_toml_str(&text).unwrap().to_toml_string().unwrap();
    let squash = |s: &str| s.split_whitespace().collect::<String>();
    assert_eq!(squash(&reserialized), squash(&body));
}
