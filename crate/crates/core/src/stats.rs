//! Interval estimates used by the experiment summaries and the acceptance
//! gates.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Two-sided confidence interval for a binomial proportion (Wilson score).
/// Well behaved at k = 0 and k = n, which uniform success rates hit often.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Interval {
    assert!(trials > 0, "wilson interval needs at least one trial");
    assert!(successes <= trials);
    assert!((0.0..1.0).contains(&confidence) && confidence > 0.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = Normal::new(0.0, 1.0)
        .unwrap()
        .inverse_cdf(0.5 + confidence / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At k = 0 and k = n the bounds are exactly 0 and 1; evaluating the
    // formula in floats can land a hair inside and fail containment checks.
    Interval {
        mean: p,
        lo: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
        hi: if successes == trials { 1.0 } else { (center + half).min(1.0) },
    }
}

/// Student-t confidence interval for a sample mean. With fewer than two
/// samples the interval collapses to the point estimate.
pub fn t_interval(samples: &[f64], confidence: f64) -> Interval {
    assert!(!samples.is_empty());
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return Interval {
            mean,
            lo: mean,
            hi: mean,
        };
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .unwrap()
        .inverse_cdf(0.5 + confidence / 2.0);
    Interval {
        mean,
        lo: mean - t * se,
        hi: mean + t * se,
    }
}

/// Total variation distance between two pmfs over 0..max(len). Shorter
/// vectors are zero-padded; leftover mass in either pmf counts in full.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut tv = 0.0;
    for i in 0..len {
        tv += (at(p, i) - at(q, i)).abs();
    }
    // Mass beyond the common support (distributions that are not normalized
    // to the listed support) also separates the pmfs.
    let ptail = 1.0 - p.iter().sum::<f64>();
    let qtail = 1.0 - q.iter().sum::<f64>();
    tv += (ptail - qtail).abs();
    tv / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wilson_matches_known_value() {
        // 8/10 at 95%: standard worked example.
        let iv = wilson(8, 10, 0.95);
        assert_abs_diff_eq!(iv.lo, 0.4901, epsilon = 5e-4);
        assert_abs_diff_eq!(iv.hi, 0.9433, epsilon = 5e-4);
    }

    #[test]
    fn wilson_degenerate_counts() {
        let all = wilson(10, 10, 0.95);
        assert!(all.lo > 0.6 && all.hi > 1.0 - 1e-12);
        let none = wilson(0, 10, 0.95);
        assert!(none.lo < 1e-12 && none.hi < 0.4);
    }

    #[test]
    fn t_interval_covers_mean() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let iv = t_interval(&xs, 0.95);
        assert_abs_diff_eq!(iv.mean, 3.0, epsilon = 1e-12);
        // t(4, 0.975) = 2.7764, s = sqrt(2.5), se = sqrt(0.5)
        assert_abs_diff_eq!(iv.hi - iv.mean, 2.7764 * 0.5f64.sqrt(), epsilon = 1e-3);
    }

    #[test]
    fn tv_distance_basics() {
        assert_abs_diff_eq!(
            total_variation(&[0.5, 0.5], &[0.5, 0.5]),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            total_variation(&[1.0], &[0.0, 1.0]),
            1.0,
            epsilon = 1e-15
        );
        // Unlisted tail mass counts: p sums to 1, q leaves 0.3 unlisted.
        assert_abs_diff_eq!(
            total_variation(&[0.7, 0.3], &[0.7]),
            0.3,
            epsilon = 1e-15
        );
    }
}
