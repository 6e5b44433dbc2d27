//! Norming constants, normalized point patterns, region counts and upper
//! order statistics of simulated endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde::std_normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormingSource {
    /// Exact Gaussian quantile: `b = m + s Φ⁻¹(1 - 1/N)`, `a = s / (N φ(z_b))`.
    AnalyticGaussian,
    /// Classical asymptotic expansion of the Gaussian norming sequence.
    AnalyticGaussianClassical,
    /// Quantile / mean-excess estimate from a calibration sample.
    EmpiricalQuantile,
}

impl NormingSource {
    pub fn label(self) -> &'static str {
        match self {
            NormingSource::AnalyticGaussian => "analytic-gaussian",
            NormingSource::AnalyticGaussianClassical => "analytic-gaussian-classical",
            NormingSource::EmpiricalQuantile => "empirical-quantile",
        }
    }
}

/// Scale `a` and location `b` for maxima of `n` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormingConstants {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub source: NormingSource,
}

impl NormingConstants {
    pub fn new(a: f64, b: f64, n: usize, source: NormingSource) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !b.is_finite() {
            return Err(Error::invalid(format!("norming needs a > 0 and finite b, got a={a}, b={b}")));
        }
        Ok(NormingConstants { a, b, n, source })
    }

    #[inline]
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.b) / self.a
    }

    #[inline]
    pub fn denormalize(&self, v: f64) -> f64 {
        v * self.a + self.b
    }
}

fn check_gaussian_scale(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("standard deviation must be positive, got {s}")));
    }
    Ok(())
}

/// Classical Gaussian norming
/// `a = s/√(2 ln N)`, `b = m + s(√(2 ln N) - (ln ln N + ln 4π) / (2√(2 ln N)))`.
pub fn gaussian_norming(n: usize, mean: f64, sd: f64) -> Result<NormingConstants> {
    if n < 3 {
        return Err(Error::invalid(format!("classical gaussian norming needs N >= 3, got {n}")));
    }
    check_gaussian_scale(sd)?;
    let ln_n = (n as f64).ln();
    let root = (2.0 * ln_n).sqrt();
    let b0 = root - (ln_n.ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * root);
    NormingConstants::new(sd / root, mean + sd * b0, n, NormingSource::AnalyticGaussianClassical)
}

/// Gaussian norming through the exact `(1 - 1/N)`-quantile, so that
/// `N (1 - Φ((b - m)/s)) = 1`, with the hazard-rate scale `a = s (1/N) / φ(z)`.
pub fn gaussian_quantile_norming(n: usize, mean: f64, sd: f64) -> Result<NormingConstants> {
    if n < 2 {
        return Err(Error::invalid(format!("quantile gaussian norming needs N >= 2, got {n}")));
    }
    check_gaussian_scale(sd)?;
    let tail = 1.0 / n as f64;
    // Φ⁻¹(1 - p) = √2 erfc⁻¹(2p)
    let z = std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * tail);
    let density = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    NormingConstants::new(sd * tail / density, mean + sd * z, n, NormingSource::AnalyticGaussian)
}

/// `b` = empirical `(1 - 1/N)`-quantile (order statistic `⌈M(1 - 1/N)⌉`),
/// `a` = mean excess of the sample above `b`.
pub fn empirical_norming(sample: &[f64], n: usize) -> Result<NormingConstants> {
    const MIN_EXCEEDANCES: usize = 5;
    if n < 1 {
        return Err(Error::invalid("target count must be at least 1"));
    }
    let m = sample.len();
    if m < 10 * n {
        return Err(Error::invalid(format!(
            "calibration sample of {m} values is smaller than 10·N = {}",
            10 * n
        )));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("calibration sample contains non-finite values"));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    // ⌈M(1 - 1/N)⌉ computed in integers: M - ⌊M/N⌋
    let rank = m - m / n;
    let b = sorted[rank.max(1) - 1];
    let excess: Vec<f64> = sorted.iter().filter(|v| **v > b).map(|v| v - b).collect();
    if excess.len() < MIN_EXCEEDANCES {
        return Err(Error::InsufficientExceedances {
            found: excess.len(),
            required: MIN_EXCEEDANCES,
        });
    }
    let a = excess.iter().sum::<f64>() / excess.len() as f64;
    NormingConstants::new(a, b, n, NormingSource::EmpiricalQuantile)
}

/// Standard normal CDF, exposed for calibration checks.
pub fn std_normal_cdf_value(z: f64) -> f64 {
    std_normal_cdf(z)
}

/// Realization of a normalized point process: `(i/N, (x_i - b)/a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    points: Vec<(f64, f64)>,
}

impl PointPattern {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

pub fn build_point_pattern(endpoints: &[f64], norming: &NormingConstants) -> Result<PointPattern> {
    if endpoints.len() != norming.n {
        return Err(Error::LengthMismatch {
            left: endpoints.len(),
            right: norming.n,
        });
    }
    if !(norming.a > 0.0) {
        return Err(Error::invalid("norming scale must be positive"));
    }
    let n = endpoints.len() as f64;
    let points = endpoints
        .iter()
        .enumerate()
        .map(|(i, x)| ((i + 1) as f64 / n, norming.normalize(*x)))
        .collect();
    Ok(PointPattern { points })
}

/// `(index_lo, index_hi] × (value_lo, value_hi]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub index_lo: f64,
    pub index_hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
}

impl Rect {
    pub fn new(index_lo: f64, index_hi: f64, value_lo: f64, value_hi: f64) -> Result<Self> {
        if !(0.0 <= index_lo && index_lo < index_hi && index_hi <= 1.0) {
            return Err(Error::invalid(format!(
                "index interval ({index_lo}, {index_hi}] must satisfy 0 <= lo < hi <= 1"
            )));
        }
        if !(value_lo < value_hi) || value_lo.is_nan() || value_hi.is_nan() {
            return Err(Error::invalid(format!("value interval ({value_lo}, {value_hi}] is empty")));
        }
        Ok(Rect {
            index_lo,
            index_hi,
            value_lo,
            value_hi,
        })
    }

    /// `(0, 1] × (value_lo, value_hi]`
    pub fn full_index(value_lo: f64, value_hi: f64) -> Result<Self> {
        Rect::new(0.0, 1.0, value_lo, value_hi)
    }

    #[inline]
    pub fn contains(&self, point: (f64, f64)) -> bool {
        let (u, v) = point;
        self.index_lo < u && u <= self.index_hi && self.value_lo < v && v <= self.value_hi
    }

    fn overlaps(&self, other: &Rect) -> bool {
        let index = self.index_lo.max(other.index_lo) < self.index_hi.min(other.index_hi);
        let value = self.value_lo.max(other.value_lo) < self.value_hi.min(other.value_hi);
        index && value
    }
}

/// Finite union of pairwise disjoint half-open rectangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    rects: Vec<Rect>,
}

impl RegionSet {
    pub fn new(rects: Vec<Rect>) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::invalid("region set needs at least one rectangle"));
        }
        for (i, r) in rects.iter().enumerate() {
            Rect::new(r.index_lo, r.index_hi, r.value_lo, r.value_hi)?;
            if let Some(j) = rects[..i].iter().position(|q| q.overlaps(r)) {
                return Err(Error::invalid(format!("rectangles {j} and {i} overlap")));
            }
        }
        Ok(RegionSet { rects })
    }

    pub fn single(rect: Rect) -> Self {
        RegionSet { rects: vec![rect] }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }
}

pub fn count_in_region(pattern: &PointPattern, region: &RegionSet) -> usize {
    pattern
        .points
        .iter()
        .filter(|p| region.rects.iter().any(|r| r.contains(**p)))
        .count()
}

/// `H_N([x, ∞))`: number of normalized values at or above `x`.
pub fn exceedance_count(pattern: &PointPattern, x: f64) -> usize {
    pattern.values().filter(|v| *v >= x).count()
}

/// Top `k` values in descending order, ties kept with multiplicity.
pub fn order_statistics(values: &[f64], k: usize) -> Result<Vec<f64>> {
    if k < 1 || k > values.len() {
        return Err(Error::RankOutOfRange { k, n: values.len() });
    }
    let mut v = values.to_vec();
    let desc = |a: &f64, b: &f64| b.total_cmp(a);
    if k < v.len() {
        v.select_nth_unstable_by(k - 1, desc);
        v.truncate(k);
    }
    v.sort_unstable_by(desc);
    Ok(v)
}

/// Maximum of a nonempty slice.
pub fn maximum(values: &[f64]) -> Result<f64> {
    values
        .iter()
        .copied()
        .max_by(f64::total_cmp)
        .ok_or(Error::RankOutOfRange { k: 1, n: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classical_norming_is_location_scale_equivariant() {
        for n in [3usize, 10, 1000, 1_000_000] {
            let base = gaussian_norming(n, 0.0, 1.0).unwrap();
            let shifted = gaussian_norming(n, 2.5, 3.0).unwrap();
            assert!((shifted.a - 3.0 * base.a).abs() < 1e-14);
            assert!((shifted.b - (2.5 + 3.0 * base.b)).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_norming_scale_decreases() {
        let mut prev = f64::INFINITY;
        for n in [3usize, 5, 10, 100, 1000, 100_000] {
            let c = gaussian_norming(n, 0.0, 1.0).unwrap();
            assert!(c.a > 0.0 && c.a < prev);
            prev = c.a;
        }
        assert!(gaussian_norming(2, 0.0, 1.0).is_err());
        assert!(gaussian_norming(10, 0.0, 0.0).is_err());
    }

    /// Gaussian upper tail by Simpson quadrature of the density from `z` to `z + 40`.
    fn tail_by_quadrature(z: f64) -> f64 {
        let steps = 200_000;
        let h = 40.0 / steps as f64;
        let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut acc = f(z) + f(z + 40.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(z + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn classical_norming_calibration_at_one_million() {
        let n = 1_000_000;
        let c = gaussian_norming(n, 0.0, 1.0).unwrap();
        let calib = n as f64 * tail_by_quadrature(c.b);
        assert!((0.85..=1.15).contains(&calib), "{calib}");
    }

    #[test]
    fn quantile_norming_calibrates_exactly() {
        for n in [2usize, 10, 250, 1000, 4000, 1_000_000] {
            let c = gaussian_quantile_norming(n, 0.0, 1.0).unwrap();
            let calib = n as f64 * tail_by_quadrature(c.b);
            assert!((calib - 1.0).abs() < 1e-6, "N={n}: {calib}");
            let shifted = gaussian_quantile_norming(n, -1.0, 2.0).unwrap();
            assert!((shifted.a - 2.0 * c.a).abs() < 1e-12);
            assert!((shifted.b - (-1.0 + 2.0 * c.b)).abs() < 1e-12);
        }
        let mut prev = f64::INFINITY;
        for n in [2usize, 10, 100, 10_000] {
            let a = gaussian_quantile_norming(n, 0.0, 1.0).unwrap().a;
            assert!(a < prev);
            prev = a;
        }
    }

    #[test]
    fn empirical_norming_direct_evaluation() {
        let sample: Vec<f64> = (1..=100).map(f64::from).collect();
        let c = empirical_norming(&sample, 10).unwrap();
        assert_eq!(c.b, 90.0);
        assert!((c.a - 5.5).abs() < 1e-12);
        assert_eq!(c.source, NormingSource::EmpiricalQuantile);
    }

    #[test]
    fn empirical_norming_rejects_degenerate_samples() {
        assert!(matches!(
            empirical_norming(&[4.0; 200], 10),
            Err(Error::InsufficientExceedances { found: 0, .. })
        ));
        assert!(empirical_norming(&[1.0; 50], 10).is_err());
    }

    #[test]
    fn empirical_norming_gumbel_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let sample: Vec<f64> = (0..2_000_000)
            .map(|_| {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                -(-u.ln()).ln()
            })
            .collect();
        let c = empirical_norming(&sample, 1000).unwrap();
        assert!((c.a - 1.0).abs() < 0.2, "a = {}", c.a);
    }

    #[test]
    fn point_pattern_examples() {
        let norm = NormingConstants::new(2.0, 1.0, 2, NormingSource::EmpiricalQuantile).unwrap();
        let p = build_point_pattern(&[3.0, 5.0], &norm).unwrap();
        assert_eq!(p.points(), &[(0.5, 1.0), (1.0, 2.0)]);

        let id = NormingConstants::new(1.0, 0.0, 3, NormingSource::EmpiricalQuantile).unwrap();
        let p = build_point_pattern(&[-1.5, 0.25, 9.0], &id).unwrap();
        assert_eq!(p.values().collect::<Vec<_>>(), vec![-1.5, 0.25, 9.0]);

        let single = NormingConstants::new(0.5, 2.0, 1, NormingSource::EmpiricalQuantile).unwrap();
        let p = build_point_pattern(&[3.0], &single).unwrap();
        assert_eq!(p.points(), &[(1.0, 2.0)]);

        assert!(build_point_pattern(&[1.0, 2.0, 3.0], &norm).is_err());
        assert!(NormingConstants::new(0.0, 1.0, 2, NormingSource::EmpiricalQuantile).is_err());
    }

    #[test]
    fn region_count_examples() {
        let norm = NormingConstants::new(2.0, 1.0, 2, NormingSource::EmpiricalQuantile).unwrap();
        let p = build_point_pattern(&[3.0, 5.0], &norm).unwrap();
        let r = RegionSet::single(Rect::full_index(1.5, 3.0).unwrap());
        assert_eq!(count_in_region(&p, &r), 1);
        let all = RegionSet::single(Rect::full_index(-1e300, f64::INFINITY).unwrap());
        assert_eq!(count_in_region(&p, &all), 2);
        // left value boundary excluded, right included
        let left = RegionSet::single(Rect::full_index(1.0, 1.5).unwrap());
        assert_eq!(count_in_region(&p, &left), 0);
        let right = RegionSet::single(Rect::full_index(0.0, 1.0).unwrap());
        assert_eq!(count_in_region(&p, &right), 1);
        // index coordinate is half-open too
        let idx = RegionSet::single(Rect::new(0.5, 1.0, -10.0, 10.0).unwrap());
        assert_eq!(count_in_region(&p, &idx), 1);
    }

    #[test]
    fn region_validation() {
        assert!(Rect::new(0.5, 0.5, 0.0, 1.0).is_err());
        assert!(Rect::new(-0.1, 0.5, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 1.1, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 1.0, 1.0, 1.0).is_err());
        let a = Rect::new(0.0, 0.5, 0.0, 1.0).unwrap();
        let b = Rect::new(0.5, 1.0, 0.0, 1.0).unwrap();
        let c = Rect::new(0.2, 0.7, 0.5, 2.0).unwrap();
        assert!(RegionSet::new(vec![a, b]).is_ok());
        assert!(RegionSet::new(vec![a, b, c]).is_err());
        assert!(RegionSet::new(vec![]).is_err());
        let stacked = Rect::new(0.0, 0.5, 1.0, 3.0).unwrap();
        assert!(RegionSet::new(vec![a, stacked]).is_ok());
    }

    #[test]
    fn order_statistic_examples() {
        assert_eq!(order_statistics(&[3.0, 1.0, 2.0], 2).unwrap(), vec![3.0, 2.0]);
        assert_eq!(order_statistics(&[3.0, 1.0, 2.0], 3).unwrap(), vec![3.0, 2.0, 1.0]);
        assert_eq!(order_statistics(&[4.0; 5], 3).unwrap(), vec![4.0; 3]);
        assert!(order_statistics(&[1.0], 0).is_err());
        assert!(order_statistics(&[1.0], 2).is_err());
        assert_eq!(order_statistics(&[0.5, 7.0, -1.0], 1).unwrap()[0], maximum(&[0.5, 7.0, -1.0]).unwrap());
    }

    fn small_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![(-30i32..30).prop_map(|v| v as f64 / 4.0), -5.0f64..5.0], 1..12)
    }

    proptest! {
        #[test]
        fn count_is_additive_over_disjoint_rectangles(values in small_values(), cuts in prop::collection::vec(-5.0f64..5.0, 3)) {
            let n = values.len();
            let norm = NormingConstants::new(1.0, 0.0, n, NormingSource::EmpiricalQuantile).unwrap();
            let p = build_point_pattern(&values, &norm).unwrap();
            let mut c = cuts.clone();
            c.sort_by(f64::total_cmp);
            prop_assume!(c[0] < c[1] && c[1] < c[2]);
            let r1 = Rect::new(0.0, 0.4, c[0], c[1]).unwrap();
            let r2 = Rect::new(0.4, 1.0, c[0], c[2]).unwrap();
            let r3 = Rect::new(0.0, 0.4, c[1], c[2]).unwrap();
            let union = RegionSet::new(vec![r1, r2, r3]).unwrap();
            let separate: usize = [r1, r2, r3].iter().map(|r| count_in_region(&p, &RegionSet::single(*r))).sum();
            prop_assert_eq!(count_in_region(&p, &union), separate);
        }

        #[test]
        fn normalization_round_trips(values in prop::collection::vec(-1e3f64..1e3, 1..20), a in 0.01f64..10.0, b in -100.0f64..100.0) {
            let norm = NormingConstants::new(a, b, values.len(), NormingSource::EmpiricalQuantile).unwrap();
            let p = build_point_pattern(&values, &norm).unwrap();
            for (i, (x, (u, v))) in values.iter().zip(p.points()).enumerate() {
                prop_assert!((norm.denormalize(*v) - x).abs() <= 1e-12 * x.abs().max(1.0));
                prop_assert_eq!(*u, (i + 1) as f64 / values.len() as f64);
            }
        }

        #[test]
        fn exceedance_count_matches_order_statistics(values in small_values(), x in prop_oneof![(-30i32..30).prop_map(|v| v as f64 / 4.0), -6.0f64..6.0]) {
            let norm = NormingConstants::new(1.0, 0.0, values.len(), NormingSource::EmpiricalQuantile).unwrap();
            let p = build_point_pattern(&values, &norm).unwrap();
            let top = order_statistics(&values, values.len()).unwrap();
            for k in 1..=values.len() {
                prop_assert_eq!(exceedance_count(&p, x) >= k, top[k - 1] >= x);
            }
        }
    }
}
