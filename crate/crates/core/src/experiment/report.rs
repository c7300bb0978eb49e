use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::run::{ExperimentOutput, FringeRun, GateRun};
use crate::csvio::write_real_matrix;
use crate::stats::{Posterior, VisibilityErrorModel};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub mean: f64,
    pub std: f64,
    pub accidental_subtracted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Posterior>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub mean: f64,
    pub std: f64,
    pub error_model: VisibilityErrorModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessFidelityReport {
    pub mean: f64,
    pub std: f64,
    pub visibility: f64,
    pub lambda_from_visibility: f64,
    pub lambda_simulated: f64,
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes every artifact of a run into `dir` (created if missing) and
/// returns the written paths in order.
pub fn write_outputs(cfg: &ExperimentConfig, output: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match output {
        ExperimentOutput::Gate(run) => write_gate(run, dir, &mut written)?,
        ExperimentOutput::Fringe(run) => write_fringe(cfg, run, dir, &mut written)?,
    }
    let path = dir.join("config.toml");
    fs::write(&path, cfg.to_toml_string()?).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

fn write_gate(run: &GateRun, dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join("transfer_matrix.csv");
    write_real_matrix(create(&path)?, &run.transfer)?;
    written.push(path);

    let path = dir.join("measured_matrix.csv");
    write_real_matrix(create(&path)?, &run.measured)?;
    written.push(path);

    let path = dir.join("counts.csv");
    run.counts.write_csv(create(&path)?)?;
    written.push(path);

    let path = dir.join("fidelity.json");
    write_json(
        &path,
        &FidelityReport {
            mean: run.fidelity.mean,
            std: run.fidelity.std,
            accidental_subtracted: run.accidental_subtracted,
            blocks: run.block_fidelity.clone(),
        },
    )?;
    written.push(path);
    Ok(())
}

fn write_fringe(cfg: &ExperimentConfig, run: &FringeRun, dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join("fringe.csv");
    let mut wtr = csv::Writer::from_writer(create(&path)?);
    for row in &run.rows {
        wtr.serialize(row)?;
    }
    wtr.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let error_model = cfg.fringe.map(|f| f.error_model).unwrap_or_default();
    let path = dir.join("visibility.json");
    write_json(
        &path,
        &VisibilityReport {
            mean: run.visibility.mean,
            std: run.visibility.std,
            error_model,
        },
    )?;
    written.push(path);

    let v = run.visibility.mean.clamp(0.0, 1.0);
    let path = dir.join("process_fidelity.json");
    write_json(
        &path,
        &ProcessFidelityReport {
            mean: run.process_fidelity.mean,
            std: run.process_fidelity.std,
            visibility: run.visibility.mean,
            lambda_from_visibility: crate::channel::lambda_from_visibility(v)?,
            lambda_simulated: run.lambda,
        },
    )?;
    written.push(path);
    Ok(())
}

/// Values reported for the physical experiments, for side-by-side output.
pub fn reference_values(kind: ExperimentKind) -> &'static [(&'static str, f64, f64)] {
    match kind {
        ExperimentKind::Xgate => &[("F_C", 0.996, 0.001)],
        ExperimentKind::Cinc => &[("F_C", 0.90, 0.01)],
        ExperimentKind::Sum3 => &[("F_C", 0.92, 0.01)],
        ExperimentKind::Sum16 => &[("mean F_C", 0.9589, 0.0005)],
        ExperimentKind::Fringe => &[("V", 0.94, 0.01), ("F_P", 0.92, 0.01)],
        ExperimentKind::Custom => &[],
    }
}

fn gate_label(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Xgate => "X gate",
        ExperimentKind::Fringe => "X gate fringe",
        ExperimentKind::Cinc => "CINC",
        ExperimentKind::Sum3 => "SUM (3x3)",
        ExperimentKind::Sum16 => "SUM (16x16)",
        ExperimentKind::Custom => "custom circuit",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub gate: String,
    pub quantity: String,
    pub simulated: Posterior,
    pub seed: u64,
    pub reference: Option<(f64, f64)>,
}

/// One line per reported quantity of a finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads the artifacts in `dir` back and pairs them with the reference
/// values.
pub fn report_summary(dir: &Path) -> Result<Summary> {
    let cfg_path = dir.join("config.toml");
    let cfg_text = fs::read_to_string(&cfg_path).map_err(|e| Error::io(&cfg_path, e))?;
    let cfg = ExperimentConfig::from_toml_str(&cfg_text)?;
    let reference = reference_values(cfg.experiment);
    let reference_for = |q: &str| reference.iter().find(|r| r.0 == q).map(|r| (r.1, r.2));
    let row = |quantity: &str, simulated: Posterior| SummaryRow {
        gate: gate_label(cfg.experiment).into(),
        quantity: quantity.into(),
        simulated,
        seed: cfg.seed,
        reference: reference_for(quantity),
    };
    let rows = match cfg.experiment {
        ExperimentKind::Fringe => {
            let v: VisibilityReport = read_json(&dir.join("visibility.json"))?;
            let fp: ProcessFidelityReport = read_json(&dir.join("process_fidelity.json"))?;
            vec![
                row("V", Posterior { mean: v.mean, std: v.std }),
                row("F_P", Posterior { mean: fp.mean, std: fp.std }),
            ]
        }
        kind => {
            let f: FidelityReport = read_json(&dir.join("fidelity.json"))?;
            let quantity = if kind == ExperimentKind::Sum16 { "mean F_C" } else { "F_C" };
            vec![row(quantity, Posterior { mean: f.mean, std: f.std })]
        }
    };
    Ok(Summary { rows })
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let reference = match r.reference {
                Some((m, s)) => {
                    let digits = (-s.log10() - 1e-9).ceil().max(0.0) as usize;
                    format!("paper {m:.digits$}±{s:.digits$}")
                }
                None => "paper n/a".into(),
            };
            writeln!(
                f,
                "{:<14} | {}={:.4}±{:.4} | seed {} | {}",
                r.gate, r.quantity, r.simulated.mean, r.simulated.std, r.seed, reference
            )?;
        }
        Ok(())
    }
}
