use nalgebra::DMatrix;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, FringeSettings};
use crate::channel::process_fidelity_from_visibility_d;
use crate::gates::{cinc_default, generalized_x, outcome_map, sum_gate};
use crate::photonic::{
    build_cinc_circuit, build_fringe_circuit, build_sum_circuit, build_x_gate_circuit, fringe_input,
    output_distribution, prepare_basis_input, run_circuit_jittered, transfer_matrix, Circuit, FieldState,
    ModeKey,
};
use crate::rng::{substream, Domain};
use crate::state::QuditDims;
use crate::stats::{
    computational_fidelity, multinomial, phase_sweep, poisson, visibility_with, CountRow, CountTable,
    Posterior,
};
use crate::{Error, Result};

/// Which detected modes count as outcomes for one input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Readout {
    /// Every computational mode.
    Full,
    /// Only the input's own frequency bin: `d` time-bin outcomes.
    MatchedFrequency,
}

/// Expected detection probabilities for every basis input of a gate.
#[derive(Clone, Debug)]
pub struct GateModel {
    kind: ExperimentKind,
    freq_bins: usize,
    time_bins: usize,
    readout: Readout,
    /// `probs[j][i]`: probability that a photon sent in input `j` is
    /// detected in outcome `i`. Rows sum to at most one; the rest is loss.
    probs: Vec<Vec<f64>>,
    ideal_outcome: Vec<usize>,
}

fn built_in_circuit(cfg: &ExperimentConfig) -> Result<Circuit> {
    let params = cfg.extinction.circuit_params();
    let grid = &cfg.grid;
    match cfg.experiment {
        ExperimentKind::Xgate => build_x_gate_circuit(grid, 3, &params),
        ExperimentKind::Cinc => build_cinc_circuit(grid, 3, &params),
        ExperimentKind::Sum3 => build_sum_circuit(grid, 3, &params),
        ExperimentKind::Sum16 => build_sum_circuit(grid, 16, &params),
        ExperimentKind::Custom => {
            let path = cfg
                .circuit
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("custom experiments need a `circuit` file".into()))?;
            Circuit::load(path)
        }
        ExperimentKind::Fringe => Err(Error::InvalidParameter(
            "the fringe experiment has no gate circuit".into(),
        )),
    }
}

/// The gate circuit a config describes, with its extinction ratios.
pub fn experiment_circuit(cfg: &ExperimentConfig) -> Result<Circuit> {
    built_in_circuit(cfg)
}

fn ideal_outcomes(cfg: &ExperimentConfig, circuit: &Circuit) -> Result<Vec<usize>> {
    let gate = match cfg.experiment {
        ExperimentKind::Xgate => generalized_x(3)?,
        ExperimentKind::Cinc => cinc_default(QuditDims::square(3)?)?,
        ExperimentKind::Sum3 => sum_gate(QuditDims::square(3)?)?,
        ExperimentKind::Sum16 => {
            return Ok((0..256).map(|j| (j % 16 + j / 16) % 16).collect());
        }
        ExperimentKind::Custom => {
            // No algebraic target: take the most likely output of the
            // circuit as described in the file.
            let t = transfer_matrix(circuit)?;
            return Ok((0..t.ncols()).map(|j| t.column(j).imax()).collect());
        }
        ExperimentKind::Fringe => unreachable!("checked by the caller"),
    };
    outcome_map(&gate).ok_or_else(|| Error::InvalidParameter("target gate is not a permutation".into()))
}

fn on_path(s: FieldState, path: usize) -> FieldState {
    s.iter().map(|(k, a)| (ModeKey { path, ..k }, a)).collect()
}

/// Detection probabilities on the computational modes, averaged over
/// `samples` jitter draws when jitter is on.
fn detected(c: &Circuit, input: &FieldState, cfg: &ExperimentConfig, stream: u64) -> Result<Vec<f64>> {
    let sigma = cfg.noise.phase_jitter_rad;
    if sigma == 0.0 {
        return output_distribution(c, input);
    }
    let mut rng = substream(cfg.seed, Domain::Jitter, stream);
    let mut acc = vec![0.0; c.modes()];
    for _ in 0..cfg.noise.jitter_samples {
        let out = run_circuit_jittered(c, input, sigma, &mut rng)?;
        for (i, slot) in acc.iter_mut().enumerate() {
            let key = ModeKey::new(c.output_path, i / c.time_bins, c.readout_offset + i % c.time_bins);
            *slot += out.probability(key);
        }
    }
    let n = cfg.noise.jitter_samples as f64;
    Ok(acc.into_iter().map(|p| p / n).collect())
}

impl GateModel {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let circuit = built_in_circuit(cfg)?;
        let ideal_outcome = ideal_outcomes(cfg, &circuit)?;
        let readout = if cfg.experiment == ExperimentKind::Sum16 {
            Readout::MatchedFrequency
        } else {
            Readout::Full
        };
        let (fb, tb) = (circuit.freq_bins, circuit.time_bins);
        let ext = cfg.extinction;
        let lambda = cfg.noise.lambda;
        let probs = (0..fb * tb)
            .into_par_iter()
            .map(|j| {
                let (m, n) = (j / tb, j % tb);
                let input = prepare_basis_input(m, n, fb, tb, ext.intensity_modulator_db, ext.pulse_shaper_db)?;
                let all = detected(&circuit, &on_path(input, circuit.input_path), cfg, j as u64)?;
                let mut p = match readout {
                    Readout::Full => all,
                    Readout::MatchedFrequency => all[m * tb..(m + 1) * tb].to_vec(),
                };
                let total: f64 = p.iter().sum();
                let floor = (1.0 - lambda) * total / p.len() as f64;
                for x in &mut p {
                    *x = lambda * *x + floor;
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        for (j, p) in probs.iter().enumerate() {
            if p.iter().sum::<f64>() <= 0.0 {
                return Err(Error::AllLightLost { input: j });
            }
        }
        Ok(Self {
            kind: cfg.experiment,
            freq_bins: fb,
            time_bins: tb,
            readout,
            probs,
            ideal_outcome,
        })
    }

    pub fn kind(&self) -> ExperimentKind {
        self.kind
    }

    pub fn inputs(&self) -> usize {
        self.probs.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.probs[0].len()
    }

    pub fn ideal_outcome(&self) -> &[usize] {
        &self.ideal_outcome
    }

    /// Unnormalized detection probabilities for input `j`.
    pub fn probabilities(&self, j: usize) -> &[f64] {
        &self.probs[j]
    }

    /// Column-normalized probabilities. Full readout gives an `N × N`
    /// matrix; matched-frequency readout stacks one `d × d` block per
    /// frequency bin (`d² × d`, row `m·d + n_out`, column `n_in`).
    pub fn transfer_matrix(&self) -> DMatrix<f64> {
        stack_columns(self, |j| {
            let total: f64 = self.probs[j].iter().sum();
            self.probs[j].iter().map(|p| p / total).collect()
        })
    }

    /// Draws counts for every input. Input `j` uses its own substream, so
    /// the table does not depend on the thread count.
    pub fn sample(&self, cfg: &ExperimentConfig, seed: u64) -> Result<CountTable> {
        let counts = cfg.counts;
        let shots = counts.shots;
        let n = self.n_outcomes();
        let rows = (0..self.inputs())
            .into_par_iter()
            .map(|j| {
                let p = &self.probs[j];
                let mut rng = substream(seed, Domain::Counts, j as u64);
                let detected: f64 = p.iter().sum();
                let mut with_loss = p.clone();
                with_loss.push((1.0 - detected).max(0.0));
                let norm: f64 = with_loss.iter().sum();
                with_loss.iter_mut().for_each(|x| *x /= norm);
                let mut raw = multinomial(&with_loss, shots, &mut rng)?;
                raw.truncate(n);
                let accidental = counts
                    .accidental_ratio
                    .map(|car| shots as f64 * detected / (car * n as f64))
                    .unwrap_or(0.0);
                for c in &mut raw {
                    *c += poisson(accidental + counts.background_rate, &mut rng);
                }
                let subtracted = if counts.accidental_ratio.is_some() {
                    accidental + counts.background_rate
                } else {
                    0.0
                };
                Ok(CountRow { input: j, raw, accidental: subtracted })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = CountTable::new(n, shots, counts.background_rate);
        for row in rows {
            table.push(row)?;
        }
        Ok(table)
    }

    /// Column-normalized accidental-subtracted counts, laid out like
    /// [`GateModel::transfer_matrix`]. Inputs with no counts left give a
    /// zero column.
    pub fn measured_matrix(&self, table: &CountTable) -> Result<DMatrix<f64>> {
        let mut cols = Vec::with_capacity(self.inputs());
        for j in 0..self.inputs() {
            let row = table.row(j).ok_or(Error::MissingInput(j))?;
            let c = row.corrected()?.counts;
            let total: f64 = c.iter().sum();
            cols.push(if total > 0.0 { c.iter().map(|x| x / total).collect() } else { vec![0.0; c.len()] });
        }
        Ok(stack_columns(self, |j| cols[j].clone()))
    }
}

impl GateModel {
    fn block_fidelities(&self, table: &CountTable) -> Result<Vec<Posterior>> {
        let tb = self.time_bins;
        (0..self.freq_bins)
            .map(|f| {
                let mut block = CountTable::new(table.n_outcomes(), table.shots, table.background_rate);
                for n in 0..tb {
                    let row = table.row(f * tb + n).ok_or(Error::MissingInput(f * tb + n))?;
                    block.push(CountRow { input: n, ..row.clone() })?;
                }
                computational_fidelity(&block, &self.ideal_outcome[f * tb..(f + 1) * tb])
            })
            .collect()
    }
}

fn stack_columns(model: &GateModel, column: impl Fn(usize) -> Vec<f64>) -> DMatrix<f64> {
    let n = model.n_outcomes();
    match model.readout {
        Readout::Full => {
            let mut m = DMatrix::zeros(n, model.inputs());
            for j in 0..model.inputs() {
                for (i, p) in column(j).into_iter().enumerate() {
                    m[(i, j)] = p;
                }
            }
            m
        }
        Readout::MatchedFrequency => {
            let tb = model.time_bins;
            let mut m = DMatrix::zeros(model.freq_bins * tb, tb);
            for j in 0..model.inputs() {
                let (f, n_in) = (j / tb, j % tb);
                for (n_out, p) in column(j).into_iter().enumerate() {
                    m[(f * tb + n_out, n_in)] = p;
                }
            }
            m
        }
    }
}

/// Result of a gate characterization.
#[derive(Clone, Debug)]
pub struct GateRun {
    pub transfer: DMatrix<f64>,
    pub measured: DMatrix<f64>,
    pub counts: CountTable,
    pub fidelity: Posterior,
    /// Per-frequency-block fidelities for matched-frequency readout.
    pub block_fidelity: Option<Vec<Posterior>>,
    pub accidental_subtracted: bool,
}

pub fn run_gate(model: &GateModel, cfg: &ExperimentConfig, seed: u64) -> Result<GateRun> {
    let counts = model.sample(cfg, seed)?;
    let fidelity = computational_fidelity(&counts, model.ideal_outcome())?;
    let block_fidelity = match model.readout {
        Readout::Full => None,
        Readout::MatchedFrequency => Some(model.block_fidelities(&counts)?),
    };
    Ok(GateRun {
        block_fidelity,
        transfer: model.transfer_matrix(),
        measured: model.measured_matrix(&counts)?,
        accidental_subtracted: counts.any_accidentals(),
        counts,
        fidelity,
    })
}

/// One fringe measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeRow {
    pub phi: f64,
    /// Expected signal counts (no background).
    pub expected: f64,
    pub sampled: u64,
    pub corrected: f64,
}

/// Expected fringe of the X gate followed by the analysis cascade.
#[derive(Clone, Debug)]
pub struct FringeModel {
    settings: FringeSettings,
    phases: Vec<f64>,
    /// Detection probability per measurement, in phase-major order.
    p_detect: Vec<f64>,
}

impl FringeModel {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let settings = cfg
            .fringe
            .ok_or_else(|| Error::InvalidParameter("fringe experiments need a [fringe] table".into()))?;
        let d = 3;
        let params = cfg.extinction.circuit_params();
        let lambda = cfg.noise.lambda;
        let phases = phase_sweep(settings.steps);
        let slot = d - 1;
        // Fully depolarized part: the analyzer response averaged over the
        // basis states.
        let flat = {
            let c = build_fringe_circuit(&cfg.grid, d, 0.0, &params)?;
            let mut acc = 0.0;
            for n in 0..d {
                acc += output_distribution(&c, &c.basis_input(0, n)?)?[slot];
            }
            acc / d as f64
        };
        let measurements: Vec<(usize, f64)> = phases
            .iter()
            .enumerate()
            .flat_map(|(k, &phi)| (0..settings.repeats).map(move |r| (k * settings.repeats + r, phi)))
            .collect();
        let p_detect = measurements
            .par_iter()
            .map(|&(idx, phi)| {
                let c = build_fringe_circuit(&cfg.grid, d, phi, &params)?;
                let coherent = detected(&c, &fringe_input(d), cfg, idx as u64)?[slot];
                Ok(lambda * coherent + (1.0 - lambda) * flat)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { settings, phases, p_detect })
    }

    pub fn settings(&self) -> FringeSettings {
        self.settings
    }

    pub fn sample(&self, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<FringeRow>> {
        let shots = cfg.counts.shots;
        let bg = cfg.counts.background_rate;
        let repeats = self.settings.repeats;
        (0..self.p_detect.len())
            .into_par_iter()
            .map(|idx| {
                let p = self.p_detect[idx].clamp(0.0, 1.0);
                let mut rng = substream(seed, Domain::Fringe, idx as u64);
                let signal = rand_distr::Binomial::new(shots, p)
                    .map_err(|e| Error::InvalidParameter(format!("fringe probability {p}: {e}")))?
                    .sample(&mut rng);
                let sampled = signal + poisson(bg, &mut rng);
                let corrected = if self.settings.subtract_background { sampled as f64 - bg } else { sampled as f64 };
                Ok(FringeRow {
                    phi: self.phases[idx / repeats],
                    expected: shots as f64 * p,
                    sampled,
                    corrected,
                })
            })
            .collect()
    }
}

/// Visibility of a sampled fringe and the process fidelity it implies.
#[derive(Clone, Debug)]
pub struct FringeRun {
    pub rows: Vec<FringeRow>,
    pub lambda: f64,
    pub visibility: Posterior,
    pub process_fidelity: Posterior,
}

pub fn run_fringe(model: &FringeModel, cfg: &ExperimentConfig, seed: u64) -> Result<FringeRun> {
    let rows = model.sample(cfg, seed)?;
    let samples: Vec<_> = rows
        .iter()
        .map(|r| crate::stats::FringeSample {
            phi: r.phi,
            counts: r.corrected,
            raw: Some(r.sampled as f64),
        })
        .collect();
    let visibility = visibility_with(&samples, model.settings.error_model)?;
    let process_fidelity = fidelity_from_visibility(visibility, 3)?;
    Ok(FringeRun {
        rows,
        lambda: cfg.noise.lambda,
        visibility,
        process_fidelity,
    })
}

/// `F_P` at the visibility mean, with the error propagated through the
/// local slope. The visibility is clamped into `[0, 1]` first.
fn fidelity_from_visibility(v: Posterior, d: usize) -> Result<Posterior> {
    let mean_v = v.mean.clamp(0.0, 1.0);
    let mean = process_fidelity_from_visibility_d(mean_v, d)?;
    let h = 1e-6;
    let (lo, hi) = ((mean_v - h).max(0.0), (mean_v + h).min(1.0));
    let slope = (process_fidelity_from_visibility_d(hi, d)? - process_fidelity_from_visibility_d(lo, d)?) / (hi - lo);
    Ok(Posterior { mean, std: slope * v.std })
}

#[derive(Clone, Debug)]
pub enum ExperimentOutput {
    Gate(GateRun),
    Fringe(FringeRun),
}

/// Runs the experiment a config describes on the global thread pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        ExperimentKind::Fringe => {
            let model = FringeModel::build(cfg)?;
            Ok(ExperimentOutput::Fringe(run_fringe(&model, cfg, cfg.seed)?))
        }
        _ => {
            let model = GateModel::build(cfg)?;
            Ok(ExperimentOutput::Gate(run_gate(&model, cfg, cfg.seed)?))
        }
    }
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::fringe_expected;

    #[test]
    fn ideal_gates_have_permutation_transfer_matrices() {
        for kind in [ExperimentKind::Xgate, ExperimentKind::Cinc, ExperimentKind::Sum3] {
            let cfg = ExperimentConfig::default_for(kind).ideal();
            let model = GateModel::build(&cfg).unwrap();
            let t = model.transfer_matrix();
            for (j, &target) in model.ideal_outcome().iter().enumerate() {
                assert!((t[(target, j)] - 1.0).abs() < 1e-12, "{kind} input {j}");
            }
        }
    }

    #[test]
    fn ideal_counts_hit_the_bme_ceiling() {
        let mut cfg = ExperimentConfig::default_for(ExperimentKind::Sum3).ideal();
        cfg.counts.shots = 200;
        let model = GateModel::build(&cfg).unwrap();
        let run = run_gate(&model, &cfg, 3).unwrap();
        assert!(!run.accidental_subtracted);
        // Every detected photon lands on the ideal outcome.
        for row in run.counts.rows() {
            let target = model.ideal_outcome()[row.input];
            assert_eq!(row.raw[target], row.total());
        }
        assert!(run.fidelity.mean < 1.0 && run.fidelity.mean > 0.9);
    }

    #[test]
    fn sum16_stacks_sixteen_blocks() {
        let cfg = ExperimentConfig::default_for(ExperimentKind::Sum16).ideal();
        let model = GateModel::build(&cfg).unwrap();
        let t = model.transfer_matrix();
        assert_eq!(t.shape(), (256, 16));
        for m in 0..16 {
            for n in 0..16 {
                assert_eq!(t[(m * 16 + (n + m) % 16, n)], 1.0);
            }
        }
    }

    #[test]
    fn accidentals_are_flagged_and_subtracted() {
        let cfg = ExperimentConfig::default_for(ExperimentKind::Cinc);
        let model = GateModel::build(&cfg).unwrap();
        let run = run_gate(&model, &cfg, 9).unwrap();
        assert!(run.accidental_subtracted);
        assert!(run.counts.rows().iter().all(|r| r.accidental > 0.0));
    }

    #[test]
    fn fringe_model_matches_closed_form() {
        let cfg = ExperimentConfig::default_for(ExperimentKind::Fringe);
        let model = FringeModel::build(&cfg).unwrap();
        let repeats = model.settings.repeats;
        let peak = model.p_detect[0] / fringe_expected(0.0, cfg.noise.lambda).unwrap();
        for (k, phi) in model.phases.iter().enumerate() {
            let expected = peak * fringe_expected(*phi, cfg.noise.lambda).unwrap();
            assert!((model.p_detect[k * repeats] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = ExperimentConfig::default_for(ExperimentKind::Cinc);
        let a = run_experiment_with_threads(&cfg, 1).unwrap();
        let b = run_experiment_with_threads(&cfg, 4).unwrap();
        match (a, b) {
            (ExperimentOutput::Gate(a), ExperimentOutput::Gate(b)) => {
                assert_eq!(a.counts, b.counts);
                assert_eq!(a.fidelity, b.fidelity);
            }
            _ => panic!("expected gate runs"),
        }
    }
}
