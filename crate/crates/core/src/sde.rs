//! Euler–Maruyama engines for the interacting system, for i.i.d. copies of the
//! McKean–Vlasov limit, and for the Picard construction of a frozen law cloud.
//!
//! Paths are stored row-major: particle `i` occupies
//! `values[i * (steps + 1) .. (i + 1) * (steps + 1)]`, so the prefix
//! `x[0..=k]` handed to the coefficients is a contiguous slice.
//!
//! Each particle draws from its own stream (see [`crate::rng`]): first its
//! initial position, then one standard normal per step. Results therefore do
//! not depend on how rows are scheduled across threads.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GaussianMarginal, KernelKind, ModelSpec};
use crate::rng::{lane_streams, stream_rng, StreamRole};

/// How the mean-field value is reduced over an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanFieldMode {
    /// Use the running mean / sorted-column reductions when the kernel allows.
    #[default]
    Fast,
    /// Always average the kernel over every ensemble member.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub particles: usize,
    pub t_end: f64,
    pub steps: usize,
    pub seed: u64,
    pub replication_id: u64,
    pub record_increments: bool,
    pub mean_field: MeanFieldMode,
}

impl SimConfig {
    pub fn new(particles: usize, t_end: f64, steps: usize, seed: u64) -> Self {
        SimConfig {
            particles,
            t_end,
            steps,
            seed,
            replication_id: 0,
            record_increments: false,
            mean_field: MeanFieldMode::Fast,
        }
    }

    pub fn replication(mut self, replication_id: u64) -> Self {
        self.replication_id = replication_id;
        self
    }

    pub fn with_increments(mut self, record: bool) -> Self {
        self.record_increments = record;
        self
    }

    pub fn with_mean_field(mut self, mode: MeanFieldMode) -> Self {
        self.mean_field = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles < 1 {
            return Err(Error::invalid("particle count must be at least 1"));
        }
        if self.steps < 1 {
            return Err(Error::invalid("step count must be at least 1"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!("terminal time must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }
}

#[inline]
fn grid_time(t_end: f64, steps: usize, k: usize) -> f64 {
    t_end * k as f64 / steps as f64
}

/// A discretized ensemble of particle paths on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBatch {
    particles: usize,
    steps: usize,
    t_end: f64,
    values: Vec<f64>,
    increments: Option<Vec<f64>>,
}

impl TrajectoryBatch {
    pub fn from_parts(
        particles: usize,
        steps: usize,
        t_end: f64,
        values: Vec<f64>,
        increments: Option<Vec<f64>>,
    ) -> Result<Self> {
        if particles == 0 || steps == 0 {
            return Err(Error::invalid("batch needs at least one particle and one step"));
        }
        if values.len() != particles * (steps + 1) {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: particles * (steps + 1),
            });
        }
        if let Some(inc) = &increments {
            if inc.len() != particles * steps {
                return Err(Error::LengthMismatch {
                    left: inc.len(),
                    right: particles * steps,
                });
            }
        }
        Ok(TrajectoryBatch {
            particles,
            steps,
            t_end,
            values,
            increments,
        })
    }

    fn with_initial(config: &SimConfig, streams: &mut [ChaCha8Rng], model: &ModelSpec) -> Self {
        let stride = config.steps + 1;
        let mut values = vec![0.0; config.particles * stride];
        for (row, rng) in values.chunks_exact_mut(stride).zip(streams.iter_mut()) {
            row[0] = model.sample_initial(rng);
        }
        TrajectoryBatch {
            particles: config.particles,
            steps: config.steps,
            t_end: config.t_end,
            values,
            increments: config
                .record_increments
                .then(|| vec![0.0; config.particles * config.steps]),
        }
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        grid_time(self.t_end, self.steps, k)
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let stride = self.steps + 1;
        &self.values[i * stride..(i + 1) * stride]
    }

    pub fn prefix(&self, i: usize, k: usize) -> &[f64] {
        &self.path(i)[..=k]
    }

    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i * (self.steps + 1) + k]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.particles).map(|i| self.value(i, k)).collect()
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.column(self.steps)
    }

    pub fn increments(&self) -> Option<&[f64]> {
        self.increments.as_deref()
    }

    pub fn particle_increments(&self, i: usize) -> Option<&[f64]> {
        self.increments
            .as_deref()
            .map(|inc| &inc[i * self.steps..(i + 1) * self.steps])
    }

    pub fn ensemble(&self) -> PathEnsemble<'_> {
        PathEnsemble {
            data: &self.values,
            stride: self.steps + 1,
        }
    }
}

/// Borrowed view of row-major paths sharing one grid.
#[derive(Debug, Clone, Copy)]
pub struct PathEnsemble<'a> {
    data: &'a [f64],
    stride: usize,
}

impl<'a> PathEnsemble<'a> {
    pub fn new(data: &'a [f64], stride: usize) -> Result<Self> {
        if stride == 0 || data.len() % stride != 0 {
            return Err(Error::invalid("ensemble data is not a whole number of paths"));
        }
        Ok(PathEnsemble { data, stride })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn prefix(&self, j: usize, k: usize) -> &'a [f64] {
        &self.data[j * self.stride..j * self.stride + k + 1]
    }

    fn column(&self, k: usize) -> impl Iterator<Item = f64> + Clone + '_ {
        self.data.iter().skip(k).step_by(self.stride).copied()
    }
}

/// `H(μ) = (1/M) Σ_j g(t, x, y^j)` with `μ` the empirical measure of `ensemble`
/// at grid step `k`. Sums run in index order.
pub fn empirical_mean_field(
    query: &[f64],
    k: usize,
    t: f64,
    ensemble: &PathEnsemble<'_>,
    model: &ModelSpec,
) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let m = ensemble.len();
    let total: f64 = (0..m).map(|j| model.kernel_value(t, query, ensemble.prefix(j, k))).sum();
    Ok(total / m as f64)
}

/// `H(μ⁺) - H(μ⁻)` for the signed measure `μ⁺ - μ⁻` of two ensembles.
pub fn signed_mean_field(
    query: &[f64],
    k: usize,
    t: f64,
    plus: &PathEnsemble<'_>,
    minus: &PathEnsemble<'_>,
    model: &ModelSpec,
) -> Result<f64> {
    Ok(empirical_mean_field(query, k, t, plus, model)? - empirical_mean_field(query, k, t, minus, model)?)
}

#[inline]
pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Mean-field value source for one grid step.
#[derive(Debug, Clone)]
pub enum StepField<'a> {
    /// Kernel average already reduced to a constant (position kernel).
    Constant(f64),
    /// Sorted ensemble column (rank-indicator kernel).
    Sorted(Vec<f64>),
    /// Gaussian CDF at the query's current position (rank-indicator kernel, closed form).
    GaussianCdf { mean: f64, sd: f64 },
    /// Full kernel average over the ensemble at step `k`.
    Direct { ensemble: PathEnsemble<'a>, k: usize },
}

impl<'a> StepField<'a> {
    /// Reduction of `ensemble` at step `k` for the model's kernel.
    pub fn from_ensemble(
        ensemble: PathEnsemble<'a>,
        k: usize,
        kind: KernelKind,
        mode: MeanFieldMode,
    ) -> Result<Self> {
        if ensemble.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(match (kind, mode) {
            (KernelKind::Position, MeanFieldMode::Fast) => {
                let m = ensemble.len() as f64;
                StepField::Constant(ensemble.column(k).sum::<f64>() / m)
            }
            (KernelKind::RankIndicator, MeanFieldMode::Fast) => {
                let mut col: Vec<f64> = ensemble.column(k).collect();
                col.sort_unstable_by(f64::total_cmp);
                StepField::Sorted(col)
            }
            _ => StepField::Direct { ensemble, k },
        })
    }

    /// Closed-form reduction at time `t`.
    pub fn from_closed_form(law: &GaussianMarginal, t: f64, kind: KernelKind) -> Result<Self> {
        match kind {
            KernelKind::Position => Ok(StepField::Constant(law.mean_at(t))),
            KernelKind::RankIndicator => Ok(StepField::GaussianCdf {
                mean: law.mean_at(t),
                sd: law.sd_at(t),
            }),
            KernelKind::General => Err(Error::UnsupportedClosedForm(kind.label())),
        }
    }

    #[inline]
    pub fn value(&self, model: &ModelSpec, t: f64, query: &[f64]) -> f64 {
        match self {
            StepField::Constant(v) => *v,
            StepField::Sorted(col) => {
                let x = *query.last().expect("nonempty prefix");
                col.partition_point(|y| *y <= x) as f64 / col.len() as f64
            }
            StepField::GaussianCdf { mean, sd } => {
                let x = *query.last().expect("nonempty prefix");
                if *sd > 0.0 {
                    std_normal_cdf((x - mean) / sd)
                } else if *mean <= x {
                    1.0
                } else {
                    0.0
                }
            }
            StepField::Direct { ensemble, k } => {
                let m = ensemble.len();
                let total: f64 = (0..m).map(|j| model.kernel_value(t, query, ensemble.prefix(j, *k))).sum();
                total / m as f64
            }
        }
    }
}

#[inline]
fn euler_step(model: &ModelSpec, t: f64, dt: f64, prefix: &[f64], r: f64, dw: f64) -> f64 {
    let x = *prefix.last().expect("nonempty prefix");
    let a = model.diffusion(t, prefix);
    let b = model.drift_interaction(t, prefix, r);
    let c = model.drift_free(t, prefix);
    x + a * (b * dt + dw) + c * dt
}

#[inline]
fn draw_increment(rng: &mut dyn RngCore, sqrt_dt: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sqrt_dt * z
}

/// Advance every particle from step `k` to `k + 1`. All mean-field values are
/// taken from the time-`t_k` ensemble before any particle moves.
pub fn step_interacting(
    batch: &mut TrajectoryBatch,
    k: usize,
    model: &ModelSpec,
    streams: &mut [ChaCha8Rng],
    mode: MeanFieldMode,
) -> Result<()> {
    if k >= batch.steps {
        return Err(Error::invalid(format!("step {k} beyond grid of {} steps", batch.steps)));
    }
    if streams.len() != batch.particles {
        return Err(Error::LengthMismatch {
            left: streams.len(),
            right: batch.particles,
        });
    }
    let t = batch.time(k);
    let dt = batch.dt();
    let sqrt_dt = dt.sqrt();
    let stride = batch.steps + 1;
    let steps = batch.steps;

    let fields: Vec<f64> = {
        let field = StepField::from_ensemble(batch.ensemble(), k, model.kernel().kind(), mode)?;
        (0..batch.particles)
            .map(|i| field.value(model, t, batch.prefix(i, k)))
            .collect()
    };

    for (i, (row, rng)) in batch.values.chunks_exact_mut(stride).zip(streams.iter_mut()).enumerate() {
        let dw = draw_increment(rng, sqrt_dt);
        let next = euler_step(model, t, dt, &row[..=k], fields[i], dw);
        if !next.is_finite() {
            return Err(Error::NonFinite {
                particle: i,
                step: k + 1,
                value: next,
            });
        }
        row[k + 1] = next;
        if let Some(inc) = batch.increments.as_mut() {
            inc[i * steps + k] = dw;
        }
    }
    Ok(())
}

/// The interacting `N`-particle system on the full grid. Deterministic in
/// `(seed, replication_id, config, model)`.
pub fn simulate_interacting(config: &SimConfig, model: &ModelSpec) -> Result<TrajectoryBatch> {
    config.validate()?;
    let mut streams = lane_streams(
        config.seed,
        StreamRole::Interacting,
        config.replication_id,
        config.particles,
    );
    let mut batch = TrajectoryBatch::with_initial(config, &mut streams, model);
    for k in 0..config.steps {
        step_interacting(&mut batch, k, model, &mut streams, config.mean_field)?;
    }
    Ok(batch)
}

/// Frozen ensemble of independent paths approximating the limit law.
#[derive(Debug, Clone, PartialEq)]
pub struct LawCloud {
    paths: usize,
    steps: usize,
    t_end: f64,
    generation: usize,
    values: Vec<f64>,
}

impl LawCloud {
    pub fn from_parts(paths: usize, steps: usize, t_end: f64, generation: usize, values: Vec<f64>) -> Result<Self> {
        if paths < 1 || steps < 1 {
            return Err(Error::invalid("law cloud needs at least one path and one step"));
        }
        if values.len() != paths * (steps + 1) {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: paths * (steps + 1),
            });
        }
        Ok(LawCloud {
            paths,
            steps,
            t_end,
            generation,
            values,
        })
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn path(&self, j: usize) -> &[f64] {
        let stride = self.steps + 1;
        &self.values[j * stride..(j + 1) * stride]
    }

    pub fn ensemble(&self) -> PathEnsemble<'_> {
        PathEnsemble {
            data: &self.values,
            stride: self.steps + 1,
        }
    }

    /// Sample mean and variance of the cloud at step `k`.
    pub fn moments_at(&self, k: usize) -> (f64, f64) {
        mean_var(self.ensemble().column(k))
    }
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// The limit law as seen by i.i.d. copies.
#[derive(Clone, Copy)]
pub enum Law<'a> {
    Cloud(&'a LawCloud),
    ClosedForm(&'a GaussianMarginal),
}

impl Law<'_> {
    fn check_grid(&self, steps: usize, t_end: f64) -> Result<()> {
        if let Law::Cloud(cloud) = self {
            if cloud.steps != steps || (cloud.t_end - t_end).abs() > 1e-12 * t_end.abs().max(1.0) {
                return Err(Error::GridMismatch(format!(
                    "law cloud has {} steps to T={}, batch has {} steps to T={}",
                    cloud.steps, cloud.t_end, steps, t_end
                )));
            }
        }
        Ok(())
    }
}

/// Per-step mean-field reductions of a frozen law over a whole grid.
pub struct LawTable<'a> {
    steps: usize,
    t_end: f64,
    fields: Vec<StepField<'a>>,
}

impl<'a> LawTable<'a> {
    pub fn build(law: Law<'a>, model: &ModelSpec, steps: usize, t_end: f64, mode: MeanFieldMode) -> Result<Self> {
        law.check_grid(steps, t_end)?;
        let kind = model.kernel().kind();
        let fields = (0..=steps)
            .map(|k| match law {
                Law::Cloud(cloud) => StepField::from_ensemble(cloud.ensemble(), k, kind, mode),
                Law::ClosedForm(cf) => StepField::from_closed_form(cf, grid_time(t_end, steps, k), kind),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LawTable { steps, t_end, fields })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// `H^i_{t_k}(μ)` for the querying prefix.
    #[inline]
    pub fn value(&self, model: &ModelSpec, k: usize, query: &[f64]) -> f64 {
        self.fields[k].value(model, grid_time(self.t_end, self.steps, k), query)
    }
}

/// Simulate independent rows against a frozen table. With `table = None`
/// the interaction term `B` is dropped.
#[allow(clippy::too_many_arguments)]
fn simulate_rows(
    rows: usize,
    steps: usize,
    t_end: f64,
    seed: u64,
    role: StreamRole,
    stream_group: u64,
    record_increments: bool,
    model: &ModelSpec,
    table: Option<&LawTable<'_>>,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let stride = steps + 1;
    let dt = t_end / steps as f64;
    let sqrt_dt = dt.sqrt();
    let mut values = vec![0.0; rows * stride];
    let mut increments = if record_increments {
        vec![0.0; rows * steps]
    } else {
        Vec::new()
    };
    let inc_stride = if record_increments { steps } else { 0 };

    let run_row = |i: usize, row: &mut [f64], inc: &mut [f64]| -> Result<()> {
        let mut rng = stream_rng(seed, role, stream_group, i as u64);
        row[0] = model.sample_initial(&mut rng);
        for k in 0..steps {
            let t = grid_time(t_end, steps, k);
            let dw = draw_increment(&mut rng, sqrt_dt);
            let prefix = &row[..=k];
            let next = match table {
                Some(table) => euler_step(model, t, dt, prefix, table.value(model, k, prefix), dw),
                None => {
                    let x = prefix[k];
                    x + model.diffusion(t, prefix) * dw + model.drift_free(t, prefix) * dt
                }
            };
            if !next.is_finite() {
                return Err(Error::NonFinite {
                    particle: i,
                    step: k + 1,
                    value: next,
                });
            }
            row[k + 1] = next;
            if !inc.is_empty() {
                inc[k] = dw;
            }
        }
        Ok(())
    };

    if record_increments {
        values
            .par_chunks_mut(stride)
            .zip(increments.par_chunks_mut(inc_stride))
            .enumerate()
            .try_for_each(|(i, (row, inc))| run_row(i, row, inc))?;
    } else {
        values
            .par_chunks_mut(stride)
            .enumerate()
            .try_for_each(|(i, row)| run_row(i, row, &mut []))?;
    }
    Ok((values, record_increments.then_some(increments)))
}

/// `N` independent copies whose mean-field term reads the frozen law only.
pub fn simulate_iid_copies(config: &SimConfig, model: &ModelSpec, law: Law<'_>) -> Result<TrajectoryBatch> {
    config.validate()?;
    let table = LawTable::build(law, model, config.steps, config.t_end, config.mean_field)?;
    simulate_iid_with_table(config, model, &table)
}

/// As [`simulate_iid_copies`] with a prebuilt table, so replications can share it.
pub fn simulate_iid_with_table(config: &SimConfig, model: &ModelSpec, table: &LawTable<'_>) -> Result<TrajectoryBatch> {
    simulate_copies_in_role(config, model, table, StreamRole::Iid)
}

pub(crate) fn simulate_copies_in_role(
    config: &SimConfig,
    model: &ModelSpec,
    table: &LawTable<'_>,
    role: StreamRole,
) -> Result<TrajectoryBatch> {
    config.validate()?;
    if table.steps != config.steps || (table.t_end - config.t_end).abs() > 1e-12 * config.t_end.max(1.0) {
        return Err(Error::GridMismatch(format!(
            "law table has {} steps to T={}, config has {} steps to T={}",
            table.steps, table.t_end, config.steps, config.t_end
        )));
    }
    let (values, increments) = simulate_rows(
        config.particles,
        config.steps,
        config.t_end,
        config.seed,
        role,
        config.replication_id,
        config.record_increments,
        model,
        Some(table),
    )?;
    TrajectoryBatch::from_parts(config.particles, config.steps, config.t_end, values, increments)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudConfig {
    pub paths: usize,
    pub t_end: f64,
    pub steps: usize,
    pub seed: u64,
    pub picard_iterations: usize,
    /// Allowed shift of the terminal mean between the last two generations,
    /// on top of four combined Monte Carlo standard errors.
    pub tolerance: f64,
    pub mean_field: MeanFieldMode,
}

impl CloudConfig {
    pub fn new(paths: usize, t_end: f64, steps: usize, seed: u64) -> Self {
        CloudConfig {
            paths,
            t_end,
            steps,
            seed,
            picard_iterations: 3,
            tolerance: 0.02,
            mean_field: MeanFieldMode::Fast,
        }
    }

    pub fn iterations(mut self, picard_iterations: usize) -> Self {
        self.picard_iterations = picard_iterations;
        self
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Picard construction of the limit law.
///
/// A drift-free seed cloud (`A dW + C dt` from `ν0`) stands in for the law
/// before the first iteration. Generation 0 reads the seed cloud, generation
/// `j + 1` reads generation `j`, and generation `J` is returned. Each
/// generation uses fresh, distinct streams.
pub fn build_law_cloud(config: &CloudConfig, model: &ModelSpec) -> Result<LawCloud> {
    if config.paths < 2 {
        return Err(Error::invalid("law cloud needs at least two paths"));
    }
    if config.picard_iterations < 1 {
        return Err(Error::invalid("at least one picard iteration is required"));
    }
    SimConfig::new(config.paths, config.t_end, config.steps, config.seed).validate()?;

    let simulate_generation = |group: u64, table: Option<&LawTable<'_>>| {
        simulate_rows(
            config.paths,
            config.steps,
            config.t_end,
            config.seed,
            StreamRole::Cloud,
            group,
            false,
            model,
            table,
        )
        .map(|(values, _)| values)
    };

    let seed_values = simulate_generation(0, None)?;
    let mut previous = LawCloud::from_parts(config.paths, config.steps, config.t_end, 0, seed_values)?;
    let mut previous_terminal: Option<(f64, f64)> = None;
    for generation in 0..=config.picard_iterations {
        let values = {
            let table = LawTable::build(
                Law::Cloud(&previous),
                model,
                config.steps,
                config.t_end,
                config.mean_field,
            )?;
            simulate_generation(generation as u64 + 1, Some(&table))?
        };
        let current = LawCloud::from_parts(config.paths, config.steps, config.t_end, generation, values)?;
        let terminal = current.moments_at(config.steps);
        if generation == config.picard_iterations {
            if let Some((prev_mean, prev_var)) = previous_terminal {
                let (mean, var): (f64, f64) = terminal;
                let se = ((var + prev_var) / config.paths as f64).sqrt();
                let allowed = config.tolerance + 4.0 * se;
                let shift = (mean - prev_mean).abs();
                if !(shift <= allowed) {
                    return Err(Error::NonConvergence {
                        generation,
                        shift,
                        allowed,
                    });
                }
            }
            return Ok(current);
        }
        previous_terminal = Some(terminal);
        previous = current;
    }
    unreachable!("loop returns on the final generation")
}
