//! Limiting objects for normalized extremes with extreme value index `γ`.
//!
//! Everything is built on the tail function
//!
//! ```text
//! τ(x) = (1 + γx)^(-1/γ)        (γ ≠ 0)
//! τ(x) = exp(-x)                (γ = 0)
//! ```
//!
//! with `τ = ∞` below the lower support endpoint and `τ = 0` above the upper
//! one. The GEV law is `Γ(x) = exp(-τ(x))`, the Poisson intensity of
//! `(a,b] × (c,d]` is `(b - a)(τ(c) - τ(d))`, and the value coordinates of the
//! limit process are `τ⁻¹` of the arrival times of a unit-rate Poisson process.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremes::RegionSet;

/// Below this magnitude `γ` is treated as exactly zero.
pub const GAMMA_ZERO_CUTOFF: f64 = 1e-10;

/// Extreme value index and the support endpoints it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    gamma: f64,
    lower: f64,
    upper: f64,
}

impl TailParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid(format!("extreme value index must be finite, got {gamma}")));
        }
        let (lower, upper) = if gamma.abs() < GAMMA_ZERO_CUTOFF {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else if gamma > 0.0 {
            (-1.0 / gamma, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, -1.0 / gamma)
        };
        Ok(TailParams { gamma, lower, upper })
    }

    pub fn gumbel() -> Self {
        TailParams {
            gamma: 0.0,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    fn is_gumbel(&self) -> bool {
        self.gamma.abs() < GAMMA_ZERO_CUTOFF
    }

    /// `τ(x)`, clipped to `∞` below the support and `0` above it.
    pub fn tail(&self, x: f64) -> f64 {
        if self.is_gumbel() {
            return (-x).exp();
        }
        let base = 1.0 + self.gamma * x;
        if base <= 0.0 {
            if self.gamma > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            base.powf(-1.0 / self.gamma)
        }
    }

    /// `τ⁻¹(s)` for `s > 0`.
    pub fn inverse_tail(&self, s: f64) -> f64 {
        if self.is_gumbel() {
            -s.ln()
        } else {
            (s.powf(-self.gamma) - 1.0) / self.gamma
        }
    }
}

/// `Γ(x) = exp(-τ(x))`
pub fn gev_cdf(x: f64, tail: &TailParams) -> f64 {
    (-tail.tail(x)).exp()
}

/// Intensity `ν` of a union of disjoint rectangles.
pub fn poisson_intensity(region: &RegionSet, tail: &TailParams) -> f64 {
    region
        .rects()
        .iter()
        .map(|r| {
            let upper_tail = tail.tail(r.value_hi);
            if upper_tail.is_infinite() {
                // rectangle lies entirely below the support
                return 0.0;
            }
            (r.index_hi - r.index_lo) * (tail.tail(r.value_lo) - upper_tail)
        })
        .sum()
}

fn check_thresholds(thresholds: &[f64], tail: &TailParams) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::InvalidThresholds);
    }
    if thresholds.iter().any(|x| x.is_nan() || tail.tail(*x).is_infinite()) {
        return Err(Error::InvalidThresholds);
    }
    if thresholds.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidThresholds);
    }
    Ok(())
}

/// `λ_j = τ(x_j) - τ(x_{j-1})`, `x_0 = +∞`, for `x_1 ≥ … ≥ x_k`.
pub fn lambda_weights(thresholds: &[f64], tail: &TailParams) -> Result<Vec<f64>> {
    check_thresholds(thresholds, tail)?;
    let mut previous = 0.0;
    Ok(thresholds
        .iter()
        .map(|x| {
            let current = tail.tail(*x);
            let lambda = (current - previous).max(0.0);
            previous = current;
            lambda
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopkProbability {
    /// Truncated sum over `S_k` with every count at most `truncation`.
    pub value: f64,
    /// `Σ_j P(Poisson(λ_j) > truncation)`, an upper bound on the omitted mass.
    pub error_bound: f64,
    pub truncation: usize,
}

/// Default per-coordinate truncation for the `S_k` sum.
pub const DEFAULT_TRUNCATION: usize = 40;

fn poisson_pmf_upto(lambda: f64, m: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut p = vec![0.0; m + 1];
        p[0] = 1.0;
        return p;
    }
    let ln_lambda = lambda.ln();
    let mut ln_p = -lambda;
    let mut out = Vec::with_capacity(m + 1);
    out.push(ln_p.exp());
    for i in 1..=m {
        ln_p += ln_lambda - (i as f64).ln();
        out.push(ln_p.exp());
    }
    out
}

/// `P(Poisson(λ) > m)` summed directly over the upper tail.
pub fn poisson_upper_tail(lambda: f64, m: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_p = -lambda;
    for i in 1..=m {
        ln_p += ln_lambda - (i as f64).ln();
    }
    let mut total = 0.0;
    let cap = m + 1000 + (20.0 * lambda) as usize;
    for i in (m + 1)..=cap {
        ln_p += ln_lambda - (i as f64).ln();
        let term = ln_p.exp();
        total += term;
        if (i as f64) > lambda && term <= total * 1e-17 {
            break;
        }
    }
    total.min(1.0)
}

/// Limit of `P(X^(j) normalized ≥ x_j for all j ≤ k)`:
/// the sum over `S_k = {i : i_1 + … + i_j ≥ j ∀ j}` of `Π_j Poisson(λ_j)(i_j)`.
///
/// The sum is evaluated by dynamic programming over partial sums capped at
/// `k` (once `i_1 + … + i_j ≥ k` every later constraint holds).
pub fn topk_joint_prob(thresholds: &[f64], tail: &TailParams, truncation: usize) -> Result<TopkProbability> {
    let lambdas = lambda_weights(thresholds, tail)?;
    let k = lambdas.len();
    if truncation < k {
        return Err(Error::invalid(format!("truncation {truncation} must be at least k = {k}")));
    }
    let mut dist = vec![0.0; k + 1];
    dist[0] = 1.0;
    for (j, lambda) in lambdas.iter().enumerate() {
        let pmf = poisson_pmf_upto(*lambda, truncation);
        let mut next = vec![0.0; k + 1];
        for (s, mass) in dist.iter().enumerate() {
            if *mass == 0.0 {
                continue;
            }
            for (i, p) in pmf.iter().enumerate() {
                next[(s + i).min(k)] += mass * p;
            }
        }
        // the constraint for coordinate j + 1: partial sum at least j + 1
        for slot in next.iter_mut().take(j + 1) {
            *slot = 0.0;
        }
        dist = next;
    }
    let value = dist.iter().sum::<f64>().clamp(0.0, 1.0);
    let error_bound = lambdas.iter().map(|l| poisson_upper_tail(*l, truncation)).sum();
    Ok(TopkProbability {
        value,
        error_bound,
        truncation,
    })
}

/// `τ⁻¹` applied to given partial sums `E_1 + … + E_j`.
pub fn spacings_transform(partial_sums: &[f64], tail: &TailParams) -> Result<Vec<f64>> {
    if partial_sums.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::invalid("partial sums must be positive"));
    }
    Ok(partial_sums.iter().map(|s| tail.inverse_tail(*s)).collect())
}

/// Top-`k` limit vector `(τ⁻¹(E_1), τ⁻¹(E_1 + E_2), …)` with i.i.d. standard
/// exponential `E_i`; strictly decreasing.
pub fn sample_spacings_limit<R: Rng + ?Sized>(k: usize, tail: &TailParams, rng: &mut R) -> Vec<f64> {
    let mut sum = 0.0;
    (0..k)
        .map(|_| {
            let e: f64 = rng.sample(Exp1);
            sum += e;
            tail.inverse_tail(sum)
        })
        .collect()
}

/// Points `(index, value)` of the limiting Poisson random measure with value
/// above `cut`. Values come from successive spacings; indices are uniform on
/// `(0, 1]`.
pub fn sample_poisson_pattern<R: Rng + ?Sized>(cut: f64, tail: &TailParams, rng: &mut R) -> Result<Vec<(f64, f64)>> {
    let mass = tail.tail(cut);
    if !mass.is_finite() || cut.is_nan() {
        return Err(Error::invalid(format!("cut {cut} lies below the support")));
    }
    let mut points = Vec::new();
    let mut arrival = 0.0;
    loop {
        let e: f64 = rng.sample(Exp1);
        arrival += e;
        if arrival >= mass {
            break;
        }
        let value = tail.inverse_tail(arrival);
        if value <= cut {
            break;
        }
        let u: f64 = rng.random();
        points.push((1.0 - u, value));
    }
    Ok(points)
}
