use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ReportError;

/// Quantile convention. Only linear interpolation between order statistics
/// (`h = (n − 1)·p`) is defined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantileMethod {
    #[default]
    Linear,
}

impl fmt::Display for QuantileMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("linear")
    }
}

impl FromStr for QuantileMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(QuantileMethod::Linear),
            other => Err(format!("unknown quantile method `{other}` (supported: linear)")),
        }
    }
}

/// Box-plot summary. Whiskers sit on the most extreme samples within
/// 1.5 IQR of the quartiles; everything beyond is an outlier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    /// Ascending.
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

pub fn box_stats(samples: &[f64]) -> Result<BoxStats, ReportError> {
    if samples.is_empty() {
        return Err(ReportError::EmptySample);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(ReportError::NonFiniteSample);
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let q1 = quantile(&s, 0.25);
    let median = quantile(&s, 0.5);
    let q3 = quantile(&s, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let inside = |x: &f64| *x >= lo_fence && *x <= hi_fence;
    // The median always lies inside the fences, so there is at least one inlier.
    let whisker_low = *s.iter().find(|x| inside(x)).unwrap_or(&median);
    let whisker_high = *s.iter().rev().find(|x| inside(x)).unwrap_or(&median);
    let outliers = s.iter().copied().filter(|x| !inside(x)).collect();
    Ok(BoxStats {
        n: s.len(),
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singleton() {
        let b = box_stats(&[5.0]).unwrap();
        assert_eq!((b.median, b.q1, b.q3, b.whisker_low, b.whisker_high), (5.0, 5.0, 5.0, 5.0, 5.0));
        assert!(b.outliers.is_empty());
        assert_eq!(b.n, 1);
    }

    #[test]
    fn one_high_outlier() {
        let b = box_stats(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((b.median, b.q1, b.q3, b.iqr()), (3.0, 2.0, 4.0, 2.0));
        assert_eq!((b.whisker_low, b.whisker_high), (1.0, 4.0));
        assert_eq!(b.outliers, vec![100.0]);
    }

    #[test]
    fn interpolates_between_order_statistics() {
        let b = box_stats(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (1.75, 2.5, 3.25));
    }

    #[test]
    fn constant_sample() {
        let b = box_stats(&[0.7; 9]).unwrap();
        assert_eq!((b.q1, b.q3, b.whisker_low, b.whisker_high), (0.7, 0.7, 0.7, 0.7));
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(box_stats(&[]), Err(ReportError::EmptySample)));
        assert!(matches!(box_stats(&[1.0, f64::NAN]), Err(ReportError::NonFiniteSample)));
    }

    #[test]
    fn method_names() {
        assert_eq!("linear".parse::<QuantileMethod>().unwrap(), QuantileMethod::Linear);
        assert!("type6".parse::<QuantileMethod>().is_err());
        assert_eq!(QuantileMethod::Linear.to_string(), "linear");
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![-100.0..100.0f64, (-5i32..5).prop_map(f64::from)], 1..60)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ordering_and_partition(xs in sample()) {
            let b = box_stats(&xs).unwrap();
            prop_assert!(b.q1 <= b.median && b.median <= b.q3);
            prop_assert!(b.whisker_high <= b.q3 + 1.5 * b.iqr());
            prop_assert!(b.whisker_low >= b.q1 - 1.5 * b.iqr());
            prop_assert!(xs.contains(&b.whisker_low) && xs.contains(&b.whisker_high));
            let inside = xs.iter().filter(|x| **x >= b.whisker_low && **x <= b.whisker_high).count();
            prop_assert_eq!(inside + b.outliers.len(), xs.len());
            for o in &b.outliers {
                prop_assert!(*o < b.whisker_low || *o > b.whisker_high);
            }
        }

        #[test]
        fn permutation_invariant(xs in sample(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut ys = xs.clone();
            ys.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(box_stats(&xs).unwrap(), box_stats(&ys).unwrap());
        }

        #[test]
        fn median_stable_under_duplicate(xs in sample()) {
            let m = box_stats(&xs).unwrap().median;
            let mut ys = xs.clone();
            ys.push(m);
            prop_assert_eq!(box_stats(&ys).unwrap().median, m);
        }
    }
}
