use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn sorted_copy(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::invalid("KS statistic needs a nonempty sample"));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("KS statistic got a NaN sample value"));
    }
    let mut v = sample.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Sup-distance between the empirical CDFs of two samples.
pub fn ks_two_sample(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    let a = sorted_copy(sample_a)?;
    let b = sorted_copy(sample_b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // step past every copy of the smaller value in both samples
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Sup-distance between the empirical CDF of `sample` and a continuous `cdf`.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted_copy(sample)?;
    let n = v.len() as f64;
    Ok(v.iter().enumerate().fold(0.0, |d: f64, (i, x)| {
        let f = cdf(*x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}

/// `c · √((n + m) / (n m))`
pub fn ks_two_sample_threshold(coefficient: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    coefficient * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountTest {
    pub samples: usize,
    pub mean: f64,
    pub target: f64,
    pub mean_z: f64,
    /// Sample variance over sample mean; `None` when every count is zero.
    pub dispersion: Option<f64>,
}

/// Poisson check of region counts: a z-score for the mean against `ν` and
/// the index of dispersion.
///
/// The standard error is the Poisson one, `√(ν/n)`; the sample standard error
/// replaces it when `ν = 0`.
pub fn count_distribution_test(counts: &[u64], target: f64) -> Result<CountTest> {
    const MIN_COUNTS: usize = 100;
    if counts.len() < MIN_COUNTS {
        return Err(Error::invalid(format!(
            "count test needs at least {MIN_COUNTS} counts, got {}",
            counts.len()
        )));
    }
    if !(target >= 0.0 && target.is_finite()) {
        return Err(Error::invalid(format!("target mean must be finite and nonnegative, got {target}")));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|c| *c as f64).sum::<f64>() / n;
    let var = counts.iter().map(|c| (*c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = if target > 0.0 { (target / n).sqrt() } else { (var / n).sqrt() };
    let diff = mean - target;
    let mean_z = if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(CountTest {
        samples: counts.len(),
        mean,
        target,
        mean_z,
        dispersion: (mean > 0.0).then(|| var / mean),
    })
}

/// Sample frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Proportion {
    pub fn from_indicators(hits: impl Iterator<Item = bool>) -> Result<Self> {
        let (mut n, mut k) = (0usize, 0usize);
        for h in hits {
            n += 1;
            k += h as usize;
        }
        if n == 0 {
            return Err(Error::invalid("frequency of an empty sample"));
        }
        let p = k as f64 / n as f64;
        Ok(Proportion {
            estimate: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            samples: n,
        })
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::invalid("mean of an empty sample"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Median of a nonempty sample (average of the middle pair for even sizes).
pub fn median(values: &[f64]) -> Result<f64> {
    let v = sorted_copy(values)?;
    let m = v.len() / 2;
    Ok(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}
