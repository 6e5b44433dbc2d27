use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremes::{
    build_point_pattern, count_in_region, empirical_norming, gaussian_norming, gaussian_quantile_norming,
    order_statistics, NormingConstants, NormingSource,
};
use crate::girsanov::{effective_sample_size, girsanov_weight_with_table, reweighted_expectation, WeightRecord};
use crate::harness::config::{ExperimentConfig, LawSource};
use crate::harness::io;
use crate::harness::report::{Bound, Provenance, Report, TestRecord};
use crate::harness::stats::{
    count_distribution_test, ks_one_sample, ks_two_sample, ks_two_sample_threshold, mean_and_se, median, Proportion,
};
use crate::limits::{gev_cdf, poisson_intensity, topk_joint_prob, TailParams, TopkProbability};
use crate::model::ModelSpec;
use crate::rng::StreamRole;
use crate::sde::{
    build_law_cloud, simulate_copies_in_role, simulate_interacting, simulate_iid_with_table, CloudConfig, Law,
    LawCloud, LawTable, SimConfig, TrajectoryBatch,
};

/// Girsanov weight of one replication without the per-particle breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub log_weight: f64,
    pub martingale: f64,
    pub quad_variation: f64,
}

impl From<&WeightRecord> for WeightSummary {
    fn from(w: &WeightRecord) -> Self {
        WeightSummary {
            log_weight: w.log_weight,
            martingale: w.martingale,
            quad_variation: w.quad_variation,
        }
    }
}

/// Terminal positions per replication for both systems, indexed by
/// replication id.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentData {
    pub norming: NormingConstants,
    pub interacting: Vec<Vec<f64>>,
    /// Empty when only the interacting system was simulated.
    pub iid: Vec<Vec<f64>>,
    pub weights: Option<Vec<WeightSummary>>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub data: ExperimentData,
    /// Replication 0 paths (interacting, i.i.d.) when requested.
    pub sample_paths: Option<(TrajectoryBatch, TrajectoryBatch)>,
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

fn wants_cloud(config: &ExperimentConfig, model: &ModelSpec) -> Result<bool> {
    match config.law.source {
        LawSource::Cloud => Ok(true),
        LawSource::ClosedForm if model.closed_form_law().is_none() => Err(Error::Config(format!(
            "model {} has no closed-form law",
            model.name()
        ))),
        LawSource::ClosedForm => Ok(false),
        LawSource::Auto => Ok(model.closed_form_law().is_none()),
    }
}

fn norming_source(config: &ExperimentConfig, model: &ModelSpec) -> NormingSource {
    config.norming.source.unwrap_or(if model.closed_form_law().is_some() {
        NormingSource::AnalyticGaussian
    } else {
        NormingSource::EmpiricalQuantile
    })
}

/// Calibration sample size `factor · N · max(1, ln N)`, at least `10 N`.
pub fn calibration_size(factor: f64, n: usize) -> usize {
    let nf = n as f64;
    ((factor * nf * nf.ln().max(1.0)).ceil() as usize).max(10 * n)
}

fn resolve_norming(config: &ExperimentConfig, model: &ModelSpec, table: &LawTable<'_>) -> Result<NormingConstants> {
    let sim = &config.simulation;
    let n = sim.particles;
    match norming_source(config, model) {
        source @ (NormingSource::AnalyticGaussian | NormingSource::AnalyticGaussianClassical) => {
            let law = model
                .closed_form_law()
                .ok_or_else(|| Error::Config("analytic norming needs a model with a closed-form law".into()))?;
            let (mean, sd) = (law.mean_at(sim.t_end), law.sd_at(sim.t_end));
            if source == NormingSource::AnalyticGaussian {
                gaussian_quantile_norming(n, mean, sd)
            } else {
                gaussian_norming(n, mean, sd)
            }
        }
        NormingSource::EmpiricalQuantile => {
            let size = calibration_size(config.norming.calibration_factor, n);
            let calibration = SimConfig::new(size, sim.t_end, sim.steps, sim.seed).with_mean_field(sim.mean_field);
            let batch = simulate_copies_in_role(&calibration, model, table, StreamRole::Calibration)?;
            empirical_norming(&batch.endpoints(), n)
        }
    }
}

struct Replicate {
    interacting: TrajectoryBatch,
    iid: Option<TrajectoryBatch>,
    weight: Option<WeightSummary>,
}

fn run_replication(
    config: &ExperimentConfig,
    model: &ModelSpec,
    table: &LawTable<'_>,
    replication: u64,
    include_iid: bool,
) -> Result<Replicate> {
    let sim = &config.simulation;
    let base = SimConfig::new(sim.particles, sim.t_end, sim.steps, sim.seed)
        .replication(replication)
        .with_mean_field(sim.mean_field);
    let interacting = simulate_interacting(&base, model)?;
    if !include_iid {
        return Ok(Replicate {
            interacting,
            iid: None,
            weight: None,
        });
    }
    let girsanov = config.tests.girsanov;
    let iid = simulate_iid_with_table(&base.with_increments(girsanov), model, table)?;
    let weight = if girsanov {
        Some(WeightSummary::from(&girsanov_weight_with_table(&iid, table, model)?))
    } else {
        None
    };
    Ok(Replicate {
        interacting,
        iid: Some(iid),
        weight,
    })
}

fn simulate_systems(config: &ExperimentConfig, include_iid: bool) -> Result<SimulationOutput> {
    config.validate()?;
    let model = config.model.build()?;
    let sim = &config.simulation;
    let cloud: Option<LawCloud> = if wants_cloud(config, &model)? {
        let cloud_config = CloudConfig::new(config.law.cloud_paths, sim.t_end, sim.steps, sim.seed)
            .iterations(config.law.picard_iterations)
            .tolerance(config.law.tolerance);
        Some(build_law_cloud(
            &CloudConfig {
                mean_field: sim.mean_field,
                ..cloud_config
            },
            &model,
        )?)
    } else {
        None
    };
    let law = match (&cloud, model.closed_form_law()) {
        (Some(c), _) => Law::Cloud(c),
        (None, Some(l)) => Law::ClosedForm(l),
        (None, None) => unreachable!("wants_cloud covers models without a closed form"),
    };
    let table = LawTable::build(law, &model, sim.steps, sim.t_end, sim.mean_field)?;
    let norming = resolve_norming(config, &model, &table)?;

    let keep_paths = config.output.save_paths && include_iid;
    let results: Vec<(Vec<f64>, Vec<f64>, Option<WeightSummary>, Option<(TrajectoryBatch, TrajectoryBatch)>)> = (0
        ..sim.replications)
        .into_par_iter()
        .map(|r| {
            let rep = run_replication(config, &model, &table, r, include_iid).map_err(|e| e.in_replication(r))?;
            let inter_end = rep.interacting.endpoints();
            let iid_end = rep.iid.as_ref().map(TrajectoryBatch::endpoints).unwrap_or_default();
            let paths = match (keep_paths && r == 0, rep.iid) {
                (true, Some(iid)) => Some((rep.interacting, iid)),
                _ => None,
            };
            Ok((inter_end, iid_end, rep.weight, paths))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut interacting = Vec::with_capacity(results.len());
    let mut iid = Vec::new();
    let mut weights = Vec::new();
    let mut sample_paths = None;
    for (inter, copies, weight, paths) in results {
        interacting.push(inter);
        if include_iid {
            iid.push(copies);
        }
        weights.extend(weight);
        if paths.is_some() {
            sample_paths = paths;
        }
    }
    let weights = (include_iid && config.tests.girsanov).then_some(weights);
    Ok(SimulationOutput {
        data: ExperimentData {
            norming,
            interacting,
            iid,
            weights,
        },
        sample_paths,
    })
}

/// Law, norming and `R` replications of both systems, on a pool of the
/// configured size. Output does not depend on the worker count.
pub fn simulate(config: &ExperimentConfig) -> Result<SimulationOutput> {
    with_pool(config.resolve_workers(), || simulate_systems(config, true))?
}

/// Interacting system only.
pub fn simulate_interacting_only(config: &ExperimentConfig) -> Result<SimulationOutput> {
    with_pool(config.resolve_workers(), || simulate_systems(config, false))?
}

fn normalized(values: &[f64], norming: &NormingConstants) -> Vec<f64> {
    values.iter().map(|x| norming.normalize(*x)).collect()
}

fn normalized_maxima(reps: &[Vec<f64>], norming: &NormingConstants) -> Vec<f64> {
    reps.iter()
        .map(|v| norming.normalize(v.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
        .collect()
}

pub struct TopkSettings {
    pub truncation: usize,
    pub z_limit: f64,
    pub limit_slack: f64,
}

#[derive(Debug, Clone)]
pub struct TopkComparison {
    pub interacting: Proportion,
    pub iid: Proportion,
    pub limit: TopkProbability,
    pub records: Vec<TestRecord>,
}

/// Frequency of `X^(j) ≥ x_j` for every `j ≤ k` across replications.
pub fn joint_exceedance_frequency(replications: &[Vec<f64>], thresholds: &[f64]) -> Result<Proportion> {
    let k = thresholds.len();
    let hits = replications
        .iter()
        .map(|v| {
            let top = order_statistics(v, k)?;
            Ok(top.iter().zip(thresholds).all(|(x, t)| x >= t))
        })
        .collect::<Result<Vec<bool>>>()?;
    Proportion::from_indicators(hits.into_iter())
}

/// Joint top-`k` exceedance frequencies of both systems against each other
/// and against the limit. Inputs are normalized values per replication.
pub fn topk_comparison(
    interacting: &[Vec<f64>],
    iid: &[Vec<f64>],
    thresholds: &[f64],
    tail: &TailParams,
    settings: &TopkSettings,
) -> Result<TopkComparison> {
    let p_int = joint_exceedance_frequency(interacting, thresholds)?;
    let p_iid = joint_exceedance_frequency(iid, thresholds)?;
    let limit = topk_joint_prob(thresholds, tail, settings.truncation)?;
    let z = settings.z_limit;
    let k = thresholds.len();
    let combined = (p_int.std_error.powi(2) + p_iid.std_error.powi(2)).sqrt();
    let detail = format!(
        "interacting {:.4} ± {:.4}, iid {:.4} ± {:.4}, limit {:.4}",
        p_int.estimate, p_int.std_error, p_iid.estimate, p_iid.std_error, limit.value
    );
    let against_limit = |name: &str, p: &Proportion| {
        TestRecord::evaluate(
            format!("top{k}-{name}-vs-limit"),
            Some((p.estimate - limit.value).abs()),
            Bound::at_most(z * p.std_error + settings.limit_slack + limit.error_bound),
            false,
            vec![p.samples],
            detail.clone(),
        )
    };
    let records = vec![
        TestRecord::evaluate(
            format!("top{k}-interacting-vs-iid"),
            Some((p_int.estimate - p_iid.estimate).abs()),
            Bound::at_most(z * combined),
            true,
            vec![p_int.samples, p_iid.samples],
            detail.clone(),
        ),
        against_limit("iid", &p_iid),
        against_limit("interacting", &p_int),
    ];
    Ok(TopkComparison {
        interacting: p_int,
        iid: p_iid,
        limit,
        records,
    })
}

/// Tests of one experiment's data; the verdict covers the mandatory ones.
pub fn analyze(config: &ExperimentConfig, data: &ExperimentData) -> Result<Report> {
    config.validate()?;
    let norming = data.norming;
    let reps = data.interacting.len();
    if reps == 0 || data.iid.len() != reps {
        return Err(Error::Data {
            path: config.output.directory.display().to_string(),
            reason: format!(
                "need matching replications of both systems, got {} and {}",
                reps,
                data.iid.len()
            ),
        });
    }
    for v in data.interacting.iter().chain(&data.iid) {
        if v.len() != norming.n {
            return Err(Error::LengthMismatch {
                left: v.len(),
                right: norming.n,
            });
        }
    }
    let tests_cfg = &config.tests;
    let tail = config.tail()?;
    let z = tests_cfg.z_limit;
    let mut tests = Vec::new();

    let max_int = normalized_maxima(&data.interacting, &norming);
    let max_iid = normalized_maxima(&data.iid, &norming);
    tests.push(TestRecord::evaluate(
        "max-ks-interacting-vs-iid",
        Some(ks_two_sample(&max_int, &max_iid)?),
        Bound::at_most(ks_two_sample_threshold(tests_cfg.ks_coefficient, reps, reps)),
        true,
        vec![reps, reps],
        "two-sample KS of normalized maxima",
    ));
    for (name, sample) in [("iid", &max_iid), ("interacting", &max_int)] {
        tests.push(TestRecord::evaluate(
            format!("max-ks-{name}-vs-gev"),
            Some(ks_one_sample(sample, |x| gev_cdf(x, &tail))?),
            Bound::at_most(tests_cfg.gev_ks_limit),
            false,
            vec![reps],
            "one-sample KS of normalized maxima against the GEV law",
        ));
    }

    let patterns_int = data
        .interacting
        .iter()
        .map(|v| build_point_pattern(v, &norming))
        .collect::<Result<Vec<_>>>()?;
    let patterns_iid = data
        .iid
        .iter()
        .map(|v| build_point_pattern(v, &norming))
        .collect::<Result<Vec<_>>>()?;
    for (idx, region) in config.region_sets()?.iter().enumerate() {
        let nu = poisson_intensity(region, &tail);
        for (system, patterns, mandatory) in [("interacting", &patterns_int, true), ("iid", &patterns_iid, false)] {
            let counts: Vec<u64> = patterns.iter().map(|p| count_in_region(p, region) as u64).collect();
            let mean_name = format!("region{idx}-{system}-count-mean-z");
            let disp_name = format!("region{idx}-{system}-count-dispersion");
            match count_distribution_test(&counts, nu) {
                Ok(t) => {
                    let detail = format!("mean count {:.4}, intensity {:.4}", t.mean, nu);
                    tests.push(TestRecord::evaluate(
                        mean_name,
                        Some(t.mean_z),
                        Bound::within(-z, z),
                        mandatory,
                        vec![t.samples],
                        detail.clone(),
                    ));
                    let [lo, hi] = tests_cfg.dispersion_band;
                    tests.push(TestRecord::evaluate(
                        disp_name,
                        t.dispersion,
                        Bound::within(lo, hi),
                        mandatory,
                        vec![t.samples],
                        detail,
                    ));
                }
                Err(e) => {
                    tests.push(TestRecord::skipped(mean_name, mandatory, vec![reps], e.to_string()));
                    tests.push(TestRecord::skipped(disp_name, mandatory, vec![reps], e.to_string()));
                }
            }
        }
    }

    let thresholds = &tests_cfg.topk_thresholds;
    let k = thresholds.len();
    let top = |reps: &[Vec<f64>]| -> Result<Vec<Vec<f64>>> {
        reps.iter().map(|v| order_statistics(&normalized(v, &norming), k)).collect()
    };
    let comparison = topk_comparison(
        &top(&data.interacting)?,
        &top(&data.iid)?,
        thresholds,
        &tail,
        &TopkSettings {
            truncation: tests_cfg.truncation,
            z_limit: z,
            limit_slack: tests_cfg.topk_limit_slack,
        },
    )?;
    tests.extend(comparison.records);

    let mut ess = None;
    if let Some(weights) = &data.weights {
        if weights.len() != reps {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: reps,
            });
        }
        let z_weights: Vec<f64> = weights.iter().map(|w| w.log_weight.exp()).collect();
        let (mean, se) = mean_and_se(&z_weights)?;
        tests.push(TestRecord::evaluate(
            "girsanov-mean-weight",
            Some((mean - 1.0).abs()),
            Bound::at_most(z * se),
            true,
            vec![reps],
            format!("mean weight {mean:.5} ± {se:.5}"),
        ));
        let cut = median(&max_int)?;
        let direct = Proportion::from_indicators(max_int.iter().map(|m| *m <= cut))?;
        let indicator: Vec<f64> = max_iid.iter().map(|m| f64::from(u8::from(*m <= cut))).collect();
        let reweighted = reweighted_expectation(&indicator, &z_weights)?;
        let combined = (direct.std_error.powi(2) + reweighted.std_error.powi(2)).sqrt();
        tests.push(TestRecord::evaluate(
            "girsanov-reweighted-max-median",
            Some((reweighted.estimate - direct.estimate).abs()),
            Bound::at_most(z * combined),
            true,
            vec![reps, reps],
            format!(
                "P(max <= median): interacting {:.4} ± {:.4}, reweighted iid {:.4} ± {:.4}",
                direct.estimate, direct.std_error, reweighted.estimate, reweighted.std_error
            ),
        ));
        ess = Some(effective_sample_size(&z_weights));
    }

    let notes = vec![
        "comparisons with the GEV and Poisson limits are informational: maxima with Gaussian-like tails approach the Gumbel law at rate 1/ln N".to_string(),
        format!("top-k limit truncation error bound {:.3e}", comparison.limit.error_bound),
    ];
    Ok(Report::new(
        config.name.clone(),
        norming.n,
        reps,
        norming,
        tests,
        ess,
        notes,
        Provenance {
            config_hash: config.config_hash()?,
            seed: config.simulation.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    ))
}

/// Simulate, persist, analyze, and write `report.json`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let output = simulate(config)?;
    io::save_simulation(config, &output)?;
    let report = analyze(config, &output.data)?;
    io::write_report(&config.output.directory.join(io::REPORT), &report)?;
    Ok(report)
}

/// `⌈√N⌉`
pub fn sqrt_rank(n: usize) -> usize {
    let mut k = (n as f64).sqrt().ceil() as usize;
    while k > 0 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    while k * k < n {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub particles: usize,
    pub rank: usize,
    pub frequency: f64,
    pub std_error: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntermediateTrend {
    pub threshold: f64,
    pub points: Vec<TrendPoint>,
    /// Each step up in `N` raises the frequency by at most two combined
    /// standard errors.
    pub nonincreasing_within_noise: bool,
    pub strictly_decreasing: bool,
    pub final_below_half_initial: bool,
}

/// Frequency of `X^(k(N)) ≥ x` across an increasing `N` grid. Each entry
/// holds normalized values per replication (the top `k(N)` suffice).
pub fn intermediate_order_check(
    samples: &[(usize, Vec<Vec<f64>>)],
    rank: impl Fn(usize) -> usize,
    threshold: f64,
) -> Result<IntermediateTrend> {
    if samples.len() < 3 {
        return Err(Error::invalid("intermediate order check needs at least three particle counts"));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("particle counts must increase"));
    }
    let points = samples
        .iter()
        .map(|(n, reps)| {
            let k = rank(*n);
            if k < 1 || k > *n {
                return Err(Error::RankOutOfRange { k, n: *n });
            }
            let p = Proportion::from_indicators(
                reps.iter()
                    .map(|v| order_statistics(v, k).map(|top| top[k - 1] >= threshold))
                    .collect::<Result<Vec<bool>>>()?
                    .into_iter(),
            )?;
            Ok(TrendPoint {
                particles: *n,
                rank: k,
                frequency: p.estimate,
                std_error: p.std_error,
                replications: p.samples,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nonincreasing_within_noise = points.windows(2).all(|w| {
        w[1].frequency <= w[0].frequency + 2.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt()
    });
    let strictly_decreasing = points.windows(2).all(|w| w[1].frequency < w[0].frequency);
    let first = points.first().expect("at least three points").frequency;
    let last = points.last().expect("at least three points").frequency;
    Ok(IntermediateTrend {
        threshold,
        points,
        nonincreasing_within_noise,
        strictly_decreasing,
        final_below_half_initial: last < 0.5 * first,
    })
}

/// Runs the interacting system at each `N` of `grid` (other settings from
/// `config`) and checks the `rank(N)`-th order statistic against `threshold`.
pub fn intermediate_study(
    config: &ExperimentConfig,
    grid: &[usize],
    rank: impl Fn(usize) -> usize,
    threshold: f64,
) -> Result<IntermediateTrend> {
    let mut samples = Vec::with_capacity(grid.len());
    for &n in grid {
        let mut cfg = config.clone();
        cfg.simulation.particles = n;
        cfg.tests.girsanov = false;
        let k = rank(n);
        if k < 1 || k > n {
            return Err(Error::RankOutOfRange { k, n });
        }
        let output = simulate_interacting_only(&cfg)?;
        let norming = output.data.norming;
        let tops = output
            .data
            .interacting
            .iter()
            .map(|v| order_statistics(&normalized(v, &norming), k))
            .collect::<Result<Vec<_>>>()?;
        samples.push((n, tops));
    }
    intermediate_order_check(&samples, rank, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_rank_values() {
        assert_eq!(sqrt_rank(250), 16);
        assert_eq!(sqrt_rank(1000), 32);
        assert_eq!(sqrt_rank(4000), 64);
        assert_eq!(sqrt_rank(4), 2);
        assert_eq!(sqrt_rank(1), 1);
    }

    #[test]
    fn calibration_size_rule() {
        assert_eq!(calibration_size(10.0, 2), 20);
        assert_eq!(calibration_size(10.0, 500), 31_074);
    }

    #[test]
    fn topk_k1_is_the_max_cdf_complement() {
        let a: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 / 10.0, -1.0]).collect();
        let b: Vec<Vec<f64>> = (0..50).map(|i| vec![-1.0, i as f64 / 20.0]).collect();
        let settings = TopkSettings {
            truncation: 40,
            z_limit: 3.0,
            limit_slack: 0.02,
        };
        let c = topk_comparison(&a, &b, &[1.0], &TailParams::gumbel(), &settings).unwrap();
        let max_a: Vec<f64> = a.iter().map(|v| v[0]).collect();
        let expected = max_a.iter().filter(|m| **m >= 1.0).count() as f64 / 50.0;
        assert_eq!(c.interacting.estimate, expected);
        assert!((c.limit.value - (1.0 - gev_cdf(1.0, &TailParams::gumbel()))).abs() < 1e-14);
        assert_eq!(c.records.len(), 3);
    }

    #[test]
    fn topk_saturation() {
        let reps: Vec<Vec<f64>> = (0..20).map(|i| vec![5.0 + i as f64, 4.0, 3.0]).collect();
        let settings = TopkSettings {
            truncation: 40,
            z_limit: 3.0,
            limit_slack: 0.02,
        };
        let c = topk_comparison(&reps, &reps, &[1.0, 0.5, 0.0], &TailParams::gumbel(), &settings).unwrap();
        assert_eq!(c.interacting.estimate, 1.0);
        assert_eq!(c.iid.estimate, 1.0);
        assert!(c.records[0].passed());
        assert!(topk_comparison(&reps, &reps, &[3.0, 2.0, 1.0, 0.0], &TailParams::gumbel(), &settings).is_err());
    }

    #[test]
    fn intermediate_check_fixed_rank_contrast() {
        // fixed rank 1 on exact Gumbel maxima: frequency stays near 1 - Γ(0)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<(usize, Vec<Vec<f64>>)> = [250usize, 1000, 4000]
            .iter()
            .map(|n| {
                let reps = (0..4000)
                    .map(|_| {
                        let u: f64 = rng.random();
                        vec![-(-u.ln()).ln()]
                    })
                    .collect();
                (*n, reps)
            })
            .collect();
        let trend = intermediate_order_check(&samples, |_| 1, 0.0).unwrap();
        for p in &trend.points {
            assert!((p.frequency - (1.0 - (-1.0f64).exp())).abs() < 4.0 * p.std_error);
        }
        assert!(trend.nonincreasing_within_noise);
        assert!(!trend.final_below_half_initial);
    }

    #[test]
    fn intermediate_check_preconditions() {
        let reps = vec![vec![1.0, 0.5]];
        assert!(intermediate_order_check(&[(2, reps.clone()), (3, reps.clone())], |_| 1, 0.0).is_err());
        assert!(intermediate_order_check(&[(3, reps.clone()), (2, reps.clone()), (4, reps.clone())], |_| 1, 0.0).is_err());
        assert!(matches!(
            intermediate_order_check(&[(2, reps.clone()), (3, reps.clone()), (4, reps)], |_| 3, 0.0),
            Err(Error::RankOutOfRange { .. })
        ));
    }
}
