//! Change-of-measure weights linking i.i.d. copies to the interacting law.
//!
//! For i.i.d. copies driven by increments `ΔW^i_k`, the drift mismatch
//!
//! ```text
//! ΔB^i_k = B(t_k, X^i, H^i(μ^N_k)) - B(t_k, X^i, H^i(μ_k))
//! ```
//!
//! gives `M = Σ_i Σ_k ΔB^i_k ΔW^i_k`, `⟨M⟩ = Σ_i Σ_k (ΔB^i_k)² dt` and the
//! weight `Z = exp(M - ⟨M⟩/2)`. Here `μ^N` is the empirical measure of the
//! copies themselves and `μ` the frozen law. The sums use left endpoints and
//! the very increments that generated the batch, so on the Euler grid `Z` is
//! the exact likelihood ratio of the interacting scheme against the i.i.d. one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::sde::{Law, LawTable, MeanFieldMode, StepField, TrajectoryBatch};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub log_weight: f64,
    pub martingale: f64,
    pub quad_variation: f64,
    /// Per particle: `(Σ_k ΔB ΔW, Σ_k ΔB² dt)`.
    pub contributions: Vec<(f64, f64)>,
}

impl WeightRecord {
    /// Builds the record from a row-major `N × steps` array of drift
    /// differences and the matching increments.
    pub fn from_drift_differences(delta_b: &[f64], increments: &[f64], steps: usize, dt: f64) -> Result<Self> {
        if delta_b.len() != increments.len() {
            return Err(Error::LengthMismatch {
                left: delta_b.len(),
                right: increments.len(),
            });
        }
        if steps == 0 || delta_b.len() % steps != 0 {
            return Err(Error::invalid("drift differences are not a whole number of rows"));
        }
        let contributions: Vec<(f64, f64)> = delta_b
            .chunks_exact(steps)
            .zip(increments.chunks_exact(steps))
            .map(|(db, dw)| {
                let stochastic: f64 = db.iter().zip(dw).map(|(b, w)| b * w).sum();
                let quadratic: f64 = db.iter().map(|b| b * b * dt).sum();
                (stochastic, quadratic)
            })
            .collect();
        Ok(Self::from_contributions(contributions))
    }

    fn from_contributions(contributions: Vec<(f64, f64)>) -> Self {
        let martingale: f64 = contributions.iter().map(|c| c.0).sum();
        let quad_variation: f64 = contributions.iter().map(|c| c.1).sum();
        WeightRecord {
            log_weight: martingale - 0.5 * quad_variation,
            martingale,
            quad_variation,
            contributions,
        }
    }

    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// `ΔB^{i,N}` at grid step `k`, with `μ^N` the empirical measure of `batch`.
pub fn delta_b(i: usize, k: usize, batch: &TrajectoryBatch, law: Law<'_>, model: &ModelSpec) -> Result<f64> {
    if i >= batch.particles() || k > batch.steps() {
        return Err(Error::invalid(format!("particle {i} / step {k} outside the batch")));
    }
    let table = LawTable::build(law, model, batch.steps(), batch.t_end(), MeanFieldMode::Fast)?;
    let empirical = StepField::from_ensemble(batch.ensemble(), k, model.kernel().kind(), MeanFieldMode::Fast)?;
    let t = batch.time(k);
    let prefix = batch.prefix(i, k);
    let r_n = empirical.value(model, t, prefix);
    let r = table.value(model, k, prefix);
    Ok(model.drift_interaction(t, prefix, r_n) - model.drift_interaction(t, prefix, r))
}

/// Girsanov weight of one i.i.d. batch against the interacting system.
pub fn girsanov_weight(batch: &TrajectoryBatch, law: Law<'_>, model: &ModelSpec) -> Result<WeightRecord> {
    let table = LawTable::build(law, model, batch.steps(), batch.t_end(), MeanFieldMode::Fast)?;
    girsanov_weight_with_table(batch, &table, model)
}

/// As [`girsanov_weight`] with a prebuilt law table.
pub fn girsanov_weight_with_table(
    batch: &TrajectoryBatch,
    table: &LawTable<'_>,
    model: &ModelSpec,
) -> Result<WeightRecord> {
    let increments = batch.increments().ok_or(Error::MissingIncrements)?;
    if table.steps() != batch.steps() {
        return Err(Error::GridMismatch(format!(
            "law table has {} steps, batch has {}",
            table.steps(),
            batch.steps()
        )));
    }
    let steps = batch.steps();
    let kind = model.kernel().kind();
    let fields = (0..steps)
        .map(|k| StepField::from_ensemble(batch.ensemble(), k, kind, MeanFieldMode::Fast))
        .collect::<Result<Vec<_>>>()?;
    let dt = batch.dt();
    let contributions: Vec<(f64, f64)> = (0..batch.particles())
        .into_par_iter()
        .map(|i| {
            let dw = &increments[i * steps..(i + 1) * steps];
            let mut stochastic = 0.0;
            let mut quadratic = 0.0;
            for (k, field) in fields.iter().enumerate() {
                let t = batch.time(k);
                let prefix = batch.prefix(i, k);
                let db = model.drift_interaction(t, prefix, field.value(model, t, prefix))
                    - model.drift_interaction(t, prefix, table.value(model, k, prefix));
                stochastic += db * dw[k];
                quadratic += db * db * dt;
            }
            (stochastic, quadratic)
        })
        .collect();
    Ok(WeightRecord::from_contributions(contributions))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// `E_Q[φ] = E[φ Z]`, estimated by the sample mean of `φ_r Z_r`.
pub fn reweighted_expectation(values: &[f64], weights: &[f64]) -> Result<Estimate> {
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: weights.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::invalid("reweighted expectation needs at least one replication"));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::invalid(format!("weights must be positive and finite, got {w}")));
    }
    let products: Vec<f64> = values.iter().zip(weights).map(|(v, w)| v * w).collect();
    let n = products.len() as f64;
    let mean = products.iter().sum::<f64>() / n;
    let std_error = if products.len() > 1 {
        let var = products.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        estimate: mean,
        std_error,
    })
}

/// `mean(Z)² / mean(Z²) · R`
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    if weights.is_empty() {
        return 0.0;
    }
    let n = weights.len() as f64;
    let m1 = weights.iter().sum::<f64>() / n;
    let m2 = weights.iter().map(|w| w * w).sum::<f64>() / n;
    if m2 > 0.0 {
        m1 * m1 / m2 * n
    } else {
        0.0
    }
}
