use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::model::GammaLaw;

/// Asymptotic two-sided K-S coefficient at level 0.05.
pub const KS_COEFFICIENT_05: f64 = 1.3581;
/// Smallest sample size for which the asymptotic critical value is used.
pub const KS_MIN_SAMPLES: usize = 35;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub critical: f64,
    pub pass: bool,
}

/// `P(X <= x)` for `X ~ law`.
pub fn gamma_cdf(law: &GammaLaw, x: f64) -> f64 {
    law.cdf(x)
}

/// `D = sup_x |F_n(x) − F(x)|` for an arbitrary continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// One-sample K-S test of `samples` against `law` at level 0.05.
///
/// Passes when `D < 1.3581/√n`.
pub fn ks_test(samples: &[f64], law: &GammaLaw) -> Result<KsResult, AnalysisError> {
    if let Some((index, &value)) = samples
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(AnalysisError::InvalidSample { index, value });
    }
    let n = samples.len();
    if n < KS_MIN_SAMPLES {
        return Err(AnalysisError::TooFewSamples {
            n,
            min: KS_MIN_SAMPLES,
        });
    }
    let statistic = ks_statistic(samples, |x| law.cdf(x));
    let critical = KS_COEFFICIENT_05 / (n as f64).sqrt();
    Ok(KsResult {
        statistic,
        n,
        critical,
        pass: statistic < critical,
    })
}
