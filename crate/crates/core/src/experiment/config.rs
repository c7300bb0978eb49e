use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::lambda_from_visibility;
use crate::photonic::{CircuitParams, PhysicalGrid};
use crate::stats::VisibilityErrorModel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Xgate,
    Fringe,
    Cinc,
    Sum3,
    Sum16,
    Custom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Xgate,
        ExperimentKind::Fringe,
        ExperimentKind::Cinc,
        ExperimentKind::Sum3,
        ExperimentKind::Sum16,
        ExperimentKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Xgate => "xgate",
            ExperimentKind::Fringe => "fringe",
            ExperimentKind::Cinc => "cinc",
            ExperimentKind::Sum3 => "sum3",
            ExperimentKind::Sum16 => "sum16",
            ExperimentKind::Custom => "custom",
        }
    }

    /// Qudit dimension of the built-in layouts (`None` for custom circuits).
    pub fn dimension(self) -> Option<usize> {
        match self {
            ExperimentKind::Sum16 => Some(16),
            ExperimentKind::Custom => None,
            _ => Some(3),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }
}

/// Extinction ratios in dB per component class; `inf` is ideal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extinctions {
    pub intensity_modulator_db: f64,
    pub pulse_shaper_db: f64,
    pub mzm_db: f64,
    pub dwdm_db: f64,
}

impl Extinctions {
    pub fn ideal() -> Self {
        Self {
            intensity_modulator_db: f64::INFINITY,
            pulse_shaper_db: f64::INFINITY,
            mzm_db: f64::INFINITY,
            dwdm_db: f64::INFINITY,
        }
    }

    pub fn circuit_params(&self) -> CircuitParams {
        CircuitParams {
            mzm_extinction_db: self.mzm_db,
            dwdm_extinction_db: self.dwdm_db,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSettings {
    /// Photons sent per basis input (gates) or per fringe measurement.
    pub shots: u64,
    /// Mean Poisson background per detected outcome.
    pub background_rate: f64,
    /// Coincidence-to-accidental ratio. When set, accidentals are added and
    /// then subtracted before estimation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accidental_ratio: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSettings {
    /// Depolarizing parameter: the gate output is `λ ρ + (1 − λ) I/d`.
    pub lambda: f64,
    /// Standard deviation of the per-shot interferometer phase noise.
    pub phase_jitter_rad: f64,
    /// Jitter draws averaged per input or per fringe measurement.
    pub jitter_samples: usize,
}

impl NoiseSettings {
    pub fn ideal() -> Self {
        Self {
            lambda: 1.0,
            phase_jitter_rad: 0.0,
            jitter_samples: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeSettings {
    /// Phase points over `[0, 2π)`.
    pub steps: usize,
    pub repeats: usize,
    /// Subtract the mean background from every measurement.
    pub subtract_background: bool,
    #[serde(default)]
    pub error_model: VisibilityErrorModel,
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// Circuit file for `custom` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub grid: PhysicalGrid,
    pub extinction: Extinctions,
    pub counts: CountSettings,
    pub noise: NoiseSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe: Option<FringeSettings>,
}

impl ExperimentConfig {
    /// The shipped default for each experiment. Values not stated in the
    /// source measurements are fitted (see `configs/*.toml`).
    pub fn default_for(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            seed: 1,
            circuit: None,
            output_dir: None,
            grid: PhysicalGrid::microring(),
            extinction: Extinctions {
                intensity_modulator_db: 25.0,
                pulse_shaper_db: 40.0,
                mzm_db: f64::INFINITY,
                dwdm_db: f64::INFINITY,
            },
            counts: CountSettings {
                shots: 400,
                background_rate: 0.0,
                accidental_ratio: None,
            },
            noise: NoiseSettings::ideal(),
            fringe: None,
        };
        match kind {
            ExperimentKind::Xgate => Self {
                extinction: Extinctions { intensity_modulator_db: 29.0, ..base.extinction },
                counts: CountSettings { shots: 2600, ..base.counts },
                ..base
            },
            ExperimentKind::Fringe => Self {
                counts: CountSettings { shots: 40_000, background_rate: 200.0, accidental_ratio: None },
                noise: NoiseSettings {
                    lambda: lambda_from_visibility(0.94).expect("0.94 is a valid visibility"),
                    ..base.noise
                },
                fringe: Some(FringeSettings {
                    steps: 24,
                    repeats: 5,
                    subtract_background: true,
                    error_model: VisibilityErrorModel::Poisson,
                }),
                ..base
            },
            ExperimentKind::Cinc => Self {
                counts: CountSettings { shots: 170, background_rate: 0.0, accidental_ratio: Some(3.7) },
                ..base
            },
            ExperimentKind::Sum3 => Self {
                counts: CountSettings { shots: 450, background_rate: 0.0, accidental_ratio: Some(3.0) },
                ..base
            },
            ExperimentKind::Sum16 => Self {
                grid: PhysicalGrid::broadband16(),
                extinction: Extinctions { intensity_modulator_db: 28.9, ..base.extinction },
                counts: CountSettings { shots: 1300, ..base.counts },
                ..base
            },
            ExperimentKind::Custom => base,
        }
    }

    /// Same run with every noise knob zeroed: ideal extinction, no
    /// background or accidentals, `λ = 1`, no phase jitter.
    pub fn ideal(&self) -> Self {
        Self {
            extinction: Extinctions::ideal(),
            counts: CountSettings {
                shots: self.counts.shots,
                background_rate: 0.0,
                accidental_ratio: None,
            },
            noise: NoiseSettings {
                jitter_samples: self.noise.jitter_samples,
                ..NoiseSettings::ideal()
            },
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        self.grid.validate()?;
        let ext = &self.extinction;
        for (name, v) in [
            ("intensity_modulator_db", ext.intensity_modulator_db),
            ("pulse_shaper_db", ext.pulse_shaper_db),
            ("mzm_db", ext.mzm_db),
            ("dwdm_db", ext.dwdm_db),
        ] {
            if v.is_nan() || v < 0.0 {
                return invalid(format!("extinction {name} must be ≥ 0 dB, got {v}"));
            }
        }
        if !(self.counts.background_rate.is_finite() && self.counts.background_rate >= 0.0) {
            return invalid(format!("background_rate must be ≥ 0, got {}", self.counts.background_rate));
        }
        if let Some(car) = self.counts.accidental_ratio {
            if !(car.is_finite() && car > 0.0) {
                return invalid(format!("accidental_ratio must be positive, got {car}"));
            }
        }
        if !(0.0..=1.0).contains(&self.noise.lambda) {
            return invalid(format!("lambda must lie in [0, 1], got {}", self.noise.lambda));
        }
        if !(self.noise.phase_jitter_rad.is_finite() && self.noise.phase_jitter_rad >= 0.0) {
            return invalid(format!("phase_jitter_rad must be ≥ 0, got {}", self.noise.phase_jitter_rad));
        }
        if self.noise.phase_jitter_rad > 0.0 && self.noise.jitter_samples == 0 {
            return invalid("jitter_samples must be positive when phase jitter is on".into());
        }
        match self.experiment {
            ExperimentKind::Custom if self.circuit.is_none() => {
                return invalid("custom experiments need a `circuit` file".into());
            }
            ExperimentKind::Fringe => {
                let f = self.fringe.ok_or_else(|| Error::InvalidParameter("fringe experiments need a [fringe] table".into()))?;
                if f.steps < 2 || f.repeats == 0 {
                    return invalid(format!(
                        "fringe needs ≥ 2 phase steps and ≥ 1 repeat, got {} and {}",
                        f.steps, f.repeats
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Reads a config file. A relative `circuit` path is taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let (Some(circuit), Some(dir)) = (&cfg.circuit, path.parent()) {
            if circuit.is_relative() {
                cfg.circuit = Some(dir.join(circuit));
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let mut cfg = ExperimentConfig::default_for(kind);
            if kind == ExperimentKind::Custom {
                cfg.circuit = Some("circuit.toml".into());
            }
            cfg.validate().unwrap();
            let text = cfg.to_toml_string().unwrap();
            let back = ExperimentConfig::from_toml_str(&text).unwrap();
            assert_eq!(back, cfg, "{kind}");
            assert_eq!(back.to_toml_string().unwrap(), text);
        }
    }

    #[test]
    fn ideal_zeroes_noise() {
        let cfg = ExperimentConfig::default_for(ExperimentKind::Cinc).ideal();
        assert_eq!(cfg.extinction, Extinctions::ideal());
        assert_eq!(cfg.counts.accidental_ratio, None);
        assert_eq!(cfg.noise.lambda, 1.0);
        assert_eq!(cfg.counts.shots, 170);
    }

    #[test]
    fn kind_names_parse() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("sum4".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let mut cfg = ExperimentConfig::default_for(ExperimentKind::Fringe);
        cfg.noise.lambda = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default_for(ExperimentKind::Fringe);
        cfg.fringe = None;
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::default_for(ExperimentKind::Custom);
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"xgate\"").is_err());
    }
}
