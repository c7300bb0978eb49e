//! Photon-count statistics: multinomial sampling with Poisson background,
//! accidental subtraction, Bayesian mean estimation (uniform prior) of the
//! conditional outcome probabilities, and fringe visibility.

use std::f64::consts::PI;
use std::io::{BufRead, Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mean and standard deviation of an estimated probability (or of a
/// quantity derived from such estimates).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub mean: f64,
    pub std: f64,
}

/// Draws one multinomial sample of `shots` trials.
pub fn multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    check_distribution(probs)?;
    let mut out = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            out[i] = remaining;
            break;
        }
        let ratio = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if ratio == 0.0 {
            0
        } else if ratio == 1.0 {
            remaining
        } else {
            Binomial::new(remaining, ratio)
                .expect("ratio is a probability")
                .sample(rng)
        };
        out[i] = k;
        remaining -= k;
        mass -= p.max(0.0);
    }
    Ok(out)
}

/// One Poisson draw; a zero (or negative) mean yields zero.
pub fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean.is_nan() || mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

fn check_distribution(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidParameter("empty distribution".into()));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(Error::InvalidParameter(format!(
            "distribution has negative or non-finite entries: {probs:?}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "distribution sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// Multinomial signal counts plus independent Poisson background of mean
/// `background_rate` on every outcome.
pub fn sample_counts<R: Rng + ?Sized>(
    probs: &[f64],
    shots: u64,
    background_rate: f64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if background_rate < 0.0 || !background_rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "background rate must be finite and non-negative, got {background_rate}"
        )));
    }
    let mut counts = multinomial(probs, shots, rng)?;
    for c in &mut counts {
        *c += poisson(background_rate, rng);
    }
    Ok(counts)
}

/// Counts after accidental subtraction.
#[derive(Clone, Debug, PartialEq)]
pub struct Corrected {
    pub counts: Vec<f64>,
    /// Set when at least one outcome went negative and was clamped to zero.
    pub floored: bool,
}

/// Subtracts a per-outcome accidental estimate, clamping at zero.
pub fn subtract_accidentals(raw: &[u64], accidental: f64) -> Result<Corrected> {
    if accidental < 0.0 || !accidental.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "accidental estimate must be finite and non-negative, got {accidental}"
        )));
    }
    let mut floored = false;
    let counts = raw
        .iter()
        .map(|&c| {
            let v = c as f64 - accidental;
            if v < 0.0 {
                floored = true;
                0.0
            } else {
                v
            }
        })
        .collect();
    Ok(Corrected { counts, floored })
}

/// Bayesian mean estimate of one outcome probability under a uniform
/// Dirichlet prior over `n_outcomes` outcomes:
///
/// `p = (1 + c_u)/(N + c_tot)`,
/// `σ² = (1 + c_u)(N + c_tot − c_u − 1) / ((N + c_tot)²(N + c_tot + 1))`.
pub fn bme_probability(c_u: u64, c_tot: u64, n_outcomes: usize) -> Result<Posterior> {
    if c_u > c_tot {
        return Err(Error::InvalidParameter(format!(
            "outcome count {c_u} exceeds total {c_tot}"
        )));
    }
    if n_outcomes < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two outcomes, got {n_outcomes}"
        )));
    }
    let a = 1.0 + c_u as f64;
    let total = n_outcomes as f64 + c_tot as f64;
    let mean = a / total;
    let var = a / (total * total) * (total - a) / (total + 1.0);
    Ok(Posterior {
        mean,
        std: var.sqrt(),
    })
}

/// Raw counts for one basis input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub input: usize,
    pub raw: Vec<u64>,
    /// Accidental estimate per outcome, subtracted before estimation.
    pub accidental: f64,
}

impl CountRow {
    pub fn total(&self) -> u64 {
        self.raw.iter().sum()
    }

    pub fn corrected(&self) -> Result<Corrected> {
        subtract_accidentals(&self.raw, self.accidental)
    }
}

/// Counts for every basis input of one gate characterization.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    n_outcomes: usize,
    rows: Vec<CountRow>,
    pub shots: u64,
    pub background_rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CountRecord {
    input: usize,
    outcome: usize,
    raw: u64,
    accidental: f64,
    corrected: f64,
}

impl CountTable {
    pub fn new(n_outcomes: usize, shots: u64, background_rate: f64) -> Self {
        Self {
            n_outcomes,
            rows: Vec::new(),
            shots,
            background_rate,
        }
    }

    pub fn push(&mut self, row: CountRow) -> Result<()> {
        if row.raw.len() != self.n_outcomes {
            return Err(Error::DimensionMismatch {
                expected: self.n_outcomes,
                actual: row.raw.len(),
            });
        }
        if row.accidental < 0.0 || !row.accidental.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "accidental estimate must be finite and non-negative, got {}",
                row.accidental
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn rows(&self) -> &[CountRow] {
        &self.rows
    }

    pub fn row(&self, input: usize) -> Option<&CountRow> {
        self.rows.iter().find(|r| r.input == input)
    }

    pub fn any_accidentals(&self) -> bool {
        self.rows.iter().any(|r| r.accidental > 0.0)
    }

    /// CSV with columns `input,outcome,raw,accidental,corrected`, preceded by
    /// a `#` comment line carrying the sampling metadata.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# outcomes={} shots={} background_rate={}",
            self.n_outcomes, self.shots, self.background_rate
        )
        .map_err(|e| Error::io("<csv>", e))?;
        let mut wtr = csv::Writer::from_writer(w);
        for row in &self.rows {
            let corrected = row.corrected()?;
            for (outcome, (&raw, &corr)) in row.raw.iter().zip(&corrected.counts).enumerate() {
                wtr.serialize(CountRecord {
                    input: row.input,
                    outcome,
                    raw,
                    accidental: row.accidental,
                    corrected: corr,
                })?;
            }
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Reads the format written by [`CountTable::write_csv`]. The metadata
    /// comment is optional; without it the outcome count is inferred.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut buf = std::io::BufReader::new(r);
        let mut first = String::new();
        buf.read_line(&mut first).map_err(|e| Error::io("<csv>", e))?;
        let (meta, rest): (Option<&str>, String) = match first.trim_start().strip_prefix('#') {
            Some(m) => (Some(m), String::new()),
            None => (None, first.clone()),
        };
        let mut declared_outcomes = None;
        let mut shots = 0;
        let mut background_rate = 0.0;
        if let Some(meta) = meta {
            for kv in meta.split_whitespace() {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad metadata entry {kv:?}")))?;
                let bad = || Error::Parse(format!("bad metadata value {kv:?}"));
                match k {
                    "outcomes" => declared_outcomes = Some(v.parse::<usize>().map_err(|_| bad())?),
                    "shots" => shots = v.parse().map_err(|_| bad())?,
                    "background_rate" => background_rate = v.parse().map_err(|_| bad())?,
                    _ => return Err(Error::Parse(format!("unknown metadata key {k:?}"))),
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(rest.as_bytes().chain(buf));
        let mut records: Vec<CountRecord> = Vec::new();
        for rec in rdr.deserialize() {
            records.push(rec?);
        }
        let inferred = records.iter().map(|r| r.outcome + 1).max().unwrap_or(0);
        let n_outcomes = declared_outcomes.unwrap_or(inferred);
        if n_outcomes == 0 || inferred > n_outcomes {
            return Err(Error::Parse(format!(
                "outcome index out of range for {n_outcomes} outcomes"
            )));
        }
        let mut table = CountTable::new(n_outcomes, shots, background_rate);
        let mut current: Option<CountRow> = None;
        for rec in records {
            let same = current.as_ref().is_some_and(|row| row.input == rec.input);
            if !same {
                if let Some(row) = current.take() {
                    table.finish_row(row)?;
                }
                if table.row(rec.input).is_some() {
                    return Err(Error::Parse(format!("input {} is not contiguous", rec.input)));
                }
                current = Some(CountRow {
                    input: rec.input,
                    raw: Vec::with_capacity(n_outcomes),
                    accidental: rec.accidental,
                });
            }
            let row = current.as_mut().expect("row started above");
            if rec.outcome != row.raw.len() {
                return Err(Error::Parse(format!(
                    "input {}: outcome {} out of order",
                    rec.input, rec.outcome
                )));
            }
            if rec.accidental != row.accidental {
                return Err(Error::Parse(format!(
                    "input {}: accidental estimate varies across outcomes",
                    rec.input
                )));
            }
            row.raw.push(rec.raw);
        }
        if let Some(row) = current {
            table.finish_row(row)?;
        }
        Ok(table)
    }

    fn finish_row(&mut self, row: CountRow) -> Result<()> {
        if row.raw.len() != self.n_outcomes {
            return Err(Error::Parse(format!(
                "input {} has {} outcomes, expected {}",
                row.input,
                row.raw.len(),
                self.n_outcomes
            )));
        }
        self.push(row)
    }
}

/// Computational-basis fidelity: the mean BME probability of the ideal
/// outcome over all inputs, errors combined in quadrature.
///
/// `ideal_outcome[j]` is the ideal output for input `j`; rows for every such
/// input must be present. Accidental-subtracted counts are rounded to the
/// nearest integer before estimation.
pub fn computational_fidelity(table: &CountTable, ideal_outcome: &[usize]) -> Result<Posterior> {
    if ideal_outcome.is_empty() {
        return Err(Error::InvalidParameter("empty outcome map".into()));
    }
    let mut sum = 0.0;
    let mut var = 0.0;
    for (input, &target) in ideal_outcome.iter().enumerate() {
        let row = table.row(input).ok_or(Error::MissingInput(input))?;
        if target >= table.n_outcomes {
            return Err(Error::IndexOutOfRange {
                what: "ideal outcome",
                index: target,
                limit: table.n_outcomes,
            });
        }
        let corrected = row.corrected()?;
        let counts: Vec<u64> = corrected.counts.iter().map(|c| c.round() as u64).collect();
        let total = counts.iter().sum();
        let p = bme_probability(counts[target], total, table.n_outcomes)?;
        sum += p.mean;
        var += p.std * p.std;
    }
    let n = ideal_outcome.len() as f64;
    Ok(Posterior {
        mean: sum / n,
        std: var.sqrt() / n,
    })
}

/// Probability of projecting the depolarized, X-shifted phase ramp
/// `|0⟩ + e^{iφ}|1⟩ + e^{2iφ}|2⟩` onto the uniform superposition:
/// `λ |1 + e^{iφ} + e^{2iφ}|² / 9 + (1 − λ)/3`.
pub fn fringe_expected(phi: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let sum: Complex64 = (0..3).map(|k| Complex64::from_polar(1.0, k as f64 * phi)).sum();
    Ok(lambda * sum.norm_sqr() / 9.0 + (1.0 - lambda) / 3.0)
}

/// Phases `2πk/steps` for `k = 0..steps`.
pub fn phase_sweep(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| 2.0 * PI * k as f64 / steps as f64).collect()
}

/// One fringe measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeSample {
    pub phi: f64,
    /// Background-subtracted counts.
    pub counts: f64,
    /// Counts before subtraction, when known; sets the Poisson variance.
    pub raw: Option<f64>,
}

/// How the visibility error bar is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityErrorModel {
    /// Poisson statistics of the two extremal phase points.
    #[default]
    Poisson,
    /// Scatter of the repeated measurements at the two extremal points.
    RepeatScatter,
}

struct PhasePoint {
    mean: f64,
    poisson_var: f64,
    scatter_var: Option<f64>,
}

fn group_by_phase(samples: &[FringeSample]) -> Vec<PhasePoint> {
    let mut groups: Vec<(u64, Vec<&FringeSample>)> = Vec::new();
    for s in samples {
        let key = s.phi.to_bits();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(s),
            None => groups.push((key, vec![s])),
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let n = g.len() as f64;
            let mean = g.iter().map(|s| s.counts).sum::<f64>() / n;
            let raw_mean = g.iter().map(|s| s.raw.unwrap_or(s.counts)).sum::<f64>() / n;
            let scatter_var = (g.len() > 1).then(|| {
                g.iter().map(|s| (s.counts - mean).powi(2)).sum::<f64>() / (n - 1.0) / n
            });
            PhasePoint {
                mean,
                poisson_var: raw_mean.max(0.0) / n,
                scatter_var,
            }
        })
        .collect()
}

/// `(max − min)/(max + min)` from the extremal phase points, Poisson errors.
///
/// Repeats at the same phase are averaged first.
pub fn visibility(samples: &[FringeSample]) -> Result<Posterior> {
    visibility_with(samples, VisibilityErrorModel::Poisson)
}

pub fn visibility_with(samples: &[FringeSample], model: VisibilityErrorModel) -> Result<Posterior> {
    let points = group_by_phase(samples);
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "visibility needs samples at two or more phases".into(),
        ));
    }
    let by_mean = |a: &&PhasePoint, b: &&PhasePoint| a.mean.total_cmp(&b.mean);
    let hi = points.iter().max_by(by_mean).expect("non-empty");
    let lo = points.iter().min_by(by_mean).expect("non-empty");
    let (max, min) = (hi.mean, lo.mean);
    let denom = max + min;
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(
            "fringe maximum plus minimum is zero".into(),
        ));
    }
    let var = |p: &PhasePoint| match model {
        VisibilityErrorModel::Poisson => p.poisson_var,
        VisibilityErrorModel::RepeatScatter => p.scatter_var.unwrap_or(p.poisson_var),
    };
    let d_max = 2.0 * min / (denom * denom);
    let d_min = 2.0 * max / (denom * denom);
    Ok(Posterior {
        mean: (max - min) / denom,
        std: (d_max * d_max * var(hi) + d_min * d_min * var(lo)).sqrt(),
    })
}
