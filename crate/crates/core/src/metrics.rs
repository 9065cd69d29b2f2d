//! Error metrics and dataset summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::Money;

/// Prediction-quality report: mean absolute error in dollars, mean relative
/// error, and the number of scored examples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mae: Money,
    pub mre: f64,
    pub n: usize,
}

impl MetricsReport {
    pub fn mae_dollars(&self) -> f64 {
        self.mae.as_dollars_f64()
    }
}

/// Summary statistics of an income sample: size, mean, sample standard
/// deviation, and skewness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub size: usize,
    pub mean: Money,
    pub stddev: Money,
    pub skew: f64,
    /// Set when size < 2 (stddev/skew undefined and reported as zero) or when
    /// the sample has zero variance (skew reported as zero).
    pub degenerate: bool,
}

/// MAE = mean |pred - actual|, MRE = mean |pred - actual| / actual.
///
/// Errors if the lists differ in length or are empty, and rejects any zero
/// actual (the relative error would be undefined).
pub fn compute_metrics(predictions: &[Money], actuals: &[Money]) -> Result<MetricsReport> {
    if predictions.len() != actuals.len() {
        return Err(Error::Contract(format!(
            "metrics require equal-length lists, got {} predictions and {} actuals",
            predictions.len(),
            actuals.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Contract("metrics require at least one example".into()));
    }
    if let Some(pos) = actuals.iter().position(|a| a.is_zero()) {
        return Err(Error::InvalidInput(format!(
            "actual income at index {pos} is zero; relative error undefined"
        )));
    }
    let n = predictions.len() as f64;
    let mut abs_sum = 0.0_f64;
    let mut rel_sum = 0.0_f64;
    for (p, a) in predictions.iter().zip(actuals) {
        let diff = p.abs_diff(*a).cents() as f64;
        abs_sum += diff;
        rel_sum += diff / a.cents() as f64;
    }
    Ok(MetricsReport {
        mae: Money::from_cents((abs_sum / n).round() as u64),
        mre: rel_sum / n,
        n: predictions.len(),
    })
}

/// Same as [`compute_metrics`] but keeps MAE in fractional dollars; used by
/// report writers that print three decimals.
pub fn mae_mre_dollars(predictions: &[Money], actuals: &[Money]) -> Result<(f64, f64)> {
    let report = compute_metrics(predictions, actuals)?;
    // Recompute the unrounded MAE from the same pass definition.
    let n = predictions.len() as f64;
    let abs_sum: f64 = predictions
        .iter()
        .zip(actuals)
        .map(|(p, a)| p.abs_diff(*a).cents() as f64)
        .sum();
    Ok((abs_sum / n / 100.0, report.mre))
}

/// Mean, sample standard deviation (n-1 denominator) and skewness
/// g1 = m3 / m2^1.5 over central moments with n denominators.
pub fn dataset_stats(incomes: &[Money]) -> Result<DatasetStats> {
    if incomes.is_empty() {
        return Err(Error::Contract("dataset_stats requires a non-empty list".into()));
    }
    let n = incomes.len();
    let xs: Vec<f64> = incomes.iter().map(|m| m.as_dollars_f64()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Ok(DatasetStats {
            size: n,
            mean: Money::from_dollars_f64(mean),
            stddev: Money::ZERO,
            skew: 0.0,
            degenerate: true,
        });
    }
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n as f64;
    let sample_var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let degenerate = m2 <= 0.0;
    let skew = if degenerate { 0.0 } else { m3 / m2.powf(1.5) };
    Ok(DatasetStats {
        size: n,
        mean: Money::from_dollars_f64(mean),
        stddev: Money::from_dollars_f64(sample_var.sqrt()),
        skew,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dollars(values: &[u64]) -> Vec<Money> {
        values.iter().copied().map(Money::from_dollars).collect()
    }

    /// Independent straight-line oracle for the metric definitions: identical
    /// formulas written as one direct accumulation loop, kept free of any
    /// shared helper so the two paths can be compared bit-for-bit.
    fn metrics_oracle(preds: &[Money], actuals: &[Money]) -> (f64, f64) {
        let mut abs = 0.0;
        let mut rel = 0.0;
        for i in 0..preds.len() {
            let p = preds[i].cents() as f64;
            let a = actuals[i].cents() as f64;
            let d = (p - a).abs();
            abs += d;
            rel += d / a;
        }
        (abs / preds.len() as f64, rel / preds.len() as f64)
    }

    #[test]
    fn identity_case_is_zero_error() {
        let v = dollars(&[80_000, 120_000]);
        let r = compute_metrics(&v, &v).unwrap();
        assert_eq!(r.mae, Money::ZERO);
        assert_eq!(r.mre, 0.0);
        assert_eq!(r.n, 2);
    }

    #[test]
    fn single_pair_forced_by_definition() {
        let r = compute_metrics(&dollars(&[100_000]), &dollars(&[80_000])).unwrap();
        assert_eq!(r.mae, Money::from_dollars(20_000));
        assert!((r.mre - 0.25).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_summation_oracle_bit_exactly() {
        let mut rng = crate::rng::Rng::new(7);
        let preds: Vec<Money> = (0..100)
            .map(|_| Money::from_cents(rng.range_inclusive(1, 30_000_000)))
            .collect();
        let actuals: Vec<Money> = (0..100)
            .map(|_| Money::from_cents(rng.range_inclusive(1, 30_000_000)))
            .collect();
        let r = compute_metrics(&preds, &actuals).unwrap();
        let (oracle_abs_cents, oracle_rel) = metrics_oracle(&preds, &actuals);
        assert_eq!(r.mae.cents(), oracle_abs_cents.round() as u64);
        assert_eq!(r.mre, oracle_rel);
        let (mae_dollars, mre) = mae_mre_dollars(&preds, &actuals).unwrap();
        assert_eq!(mae_dollars, oracle_abs_cents / 100.0);
        assert_eq!(mre, oracle_rel);
    }

    #[test]
    fn rejects_bad_shapes_and_zero_actuals() {
        assert!(compute_metrics(&dollars(&[1]), &dollars(&[1, 2])).is_err());
        assert!(compute_metrics(&[], &[]).is_err());
        assert!(compute_metrics(&dollars(&[1]), &[Money::ZERO]).is_err());
    }

    #[test]
    fn constant_sample_has_zero_stddev() {
        let s = dataset_stats(&dollars(&[5_000, 5_000, 5_000])).unwrap();
        assert_eq!(s.stddev, Money::ZERO);
        assert_eq!(s.skew, 0.0);
        assert!(s.degenerate);
    }

    #[test]
    fn symmetric_sample_has_zero_skew() {
        let s = dataset_stats(&dollars(&[1, 2, 3])).unwrap();
        assert_eq!(s.mean, Money::from_dollars(2));
        assert!(s.skew.abs() < 1e-9);
        assert!(!s.degenerate);
        // sample stddev with n-1 denominator: sqrt(((1)^2+(0)^2+(1)^2)/2) = 1
        assert_eq!(s.stddev, Money::from_dollars(1));
    }

    #[test]
    fn singleton_is_flagged_degenerate() {
        let s = dataset_stats(&dollars(&[42])).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.stddev, Money::ZERO);
        assert_eq!(s.skew, 0.0);
        assert_eq!(s.mean, Money::from_dollars(42));
    }

    #[test]
    fn right_skewed_sample_has_positive_skew() {
        let s = dataset_stats(&dollars(&[1, 1, 1, 1, 100])).unwrap();
        assert!(s.skew > 1.0);
    }
}
