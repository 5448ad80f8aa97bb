//! Closed-form predictions for detection success on the idealized tree.
//!
//! The quantities here are exact combinatorics and probability on the
//! two-color tree ([`paths`]) and on its single-type simplification
//! ([`ret`]); the experiment harness compares them against Monte Carlo
//! estimates from the full simulator.

pub mod paths;
pub mod ret;

use crate::error::{Error, Result};

/// Probability that an infected node shows no symptoms by the time the
/// backward walk inspects it: asymptomatic, conditioned on not having been
/// hospitalized first.
///
/// `p = p_a / (p_a + (1 - p_a)(1 - p_h))`.
pub fn p_cond(p_a: f64, p_h: f64) -> Result<f64> {
    for (name, p) in [("p_a", p_a), ("p_h", p_h)] {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::invalid(format!("{name} must lie in [0, 1]")));
        }
    }
    let den = p_a + (1.0 - p_a) * (1.0 - p_h);
    if den <= 0.0 {
        return Err(Error::invalid(
            "p_a = 0 with p_h = 1 leaves no surviving course to condition on",
        ));
    }
    Ok(p_a / den)
}

/// Success probability of the plain backward walk given the distribution of
/// the path length from source to first hospitalized case: conditioned on
/// length `n`, success is a Bernoulli with mean `(1 - p)^n`.
pub fn ls_success_probability(path_dist: &[f64], p: f64) -> f64 {
    path_dist
        .iter()
        .enumerate()
        .map(|(n, w)| w * (1.0 - p).powi(n as i32))
        .sum()
}

/// Lower bound on the household walk's success probability given the path
/// length distribution.
///
/// Conditioned on length `n >= 2`, paths are grouped by how many households
/// they visit once (`k`) versus twice, and whether the endpoint households
/// are among the twice-visited (`alpha`, `beta`). A twice-visited interior
/// household succeeds when either of its two path nodes is symptomatic, a
/// once-visited one needs its single node symptomatic, and the endpoint
/// states are pinned (source symptomatic, endpoint hospitalized), giving the
/// per-class weight `(1-p)^((n+k-1)/2) (1+p)^((n-k+1)/2 - alpha - beta)`.
pub fn ls_plus_success_lower_bound(
    path_dist: &[f64],
    p: f64,
    d_c: usize,
    d_h: usize,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p must lie in [0, 1]"));
    }
    paths::validate_params(d_c, d_h)?;
    let mut total = 0.0;
    for (n, w) in path_dist.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let bound = match n {
            0 => 1.0,
            1 => 1.0 - p,
            _ => {
                let c_n = paths::rb_path_count_f64(d_c, d_h, n);
                let mut acc = 0.0;
                for (k, alpha, beta) in paths::class_indices(n) {
                    let count = paths::rb_path_class_count_f64(d_c, d_h, n, k, alpha, beta);
                    if count == 0.0 {
                        continue;
                    }
                    let singles = (n + k - 1) / 2;
                    let interior_doubles = (n + 1 - k) / 2 - alpha - beta;
                    acc += count
                        * (1.0 - p).powi(singles as i32)
                        * (1.0 + p).powi(interior_doubles as i32);
                }
                acc / c_n
            }
        };
        total += w * bound;
    }
    Ok(total)
}

/// Back-of-envelope success estimate for the backward walk from first
/// principles on a degree-`d` contact structure: the source is detectable
/// if it is symptomatic and either hospitalized itself or every node on the
/// expected chain to the first hospitalization is symptomatic.
///
/// `q = d p_i / (1 + d p_i)` is the chance a given infection came from a
/// node with further descendants; `E` is the expected chain length until
/// some descendant hospitalizes.
pub fn boe_success(p_a: f64, p_h: f64, d: f64, p_i: f64) -> Result<f64> {
    for (name, v) in [("p_a", p_a), ("p_h", p_h), ("p_i", p_i)] {
        if !(0.0..=1.0).contains(&v) || !v.is_finite() {
            return Err(Error::invalid(format!("{name} must lie in [0, 1]")));
        }
    }
    if d < 1.0 || p_i <= 0.0 {
        return Err(Error::invalid("boe needs d >= 1 and p_i > 0"));
    }
    let q = d * p_i / (1.0 + d * p_i);
    let expected_chain = (1.0 + 1.0 / ((1.0 - p_a) * p_h)).ln() / (1.0 + d * p_i).ln();
    let through = ((1.0 - p_a) * q + 1.0 - q).powf(expected_chain);
    Ok((1.0 - p_a) * (p_h + (1.0 - p_h) * through))
}

/// Normalized pmf of observed path lengths.
pub fn empirical_pmf(samples: &[usize]) -> Vec<f64> {
    if samples.is_empty() {
        return Vec::new();
    }
    let max = *samples.iter().max().expect("non-empty");
    let mut pmf = vec![0.0; max + 1];
    for &s in samples {
        pmf[s] += 1.0;
    }
    let n = samples.len() as f64;
    for w in &mut pmf {
        *w /= n;
    }
    pmf
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p_cond_endpoints_and_default() {
        assert_abs_diff_eq!(p_cond(0.0, 0.2).unwrap(), 0.0);
        assert_abs_diff_eq!(p_cond(1.0, 0.2).unwrap(), 1.0);
        // 0.5 / (0.5 + 0.5 * 0.8) = 5/9.
        assert_abs_diff_eq!(p_cond(0.5, 0.2).unwrap(), 5.0 / 9.0, epsilon = 1e-12);
        assert!(p_cond(0.0, 1.0).is_err());
        assert!(p_cond(1.2, 0.0).is_err());
    }

    #[test]
    fn ls_success_is_expectation_of_geometric_decay() {
        let dist = [0.25, 0.5, 0.25];
        let p: f64 = 0.4;
        let expect = 0.25 + 0.5 * 0.6 + 0.25 * 0.36;
        assert_abs_diff_eq!(ls_success_probability(&dist, p), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(ls_success_probability(&dist, 0.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn household_bound_is_certain_at_p_zero() {
        // Every class weight collapses to 1 when nobody is asymptomatic, so
        // the bound must integrate the pmf exactly.
        let dist = [0.1, 0.2, 0.3, 0.25, 0.1, 0.05];
        let lb = ls_plus_success_lower_bound(&dist, 0.0, 3, 2).unwrap();
        assert_abs_diff_eq!(lb, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn household_bound_dominates_plain_and_decreases_in_p() {
        let dist = [0.05, 0.15, 0.3, 0.25, 0.15, 0.1];
        let mut last = f64::INFINITY;
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let lb = ls_plus_success_lower_bound(&dist, p, 3, 2).unwrap();
            let plain = ls_success_probability(&dist, p);
            assert!(lb >= plain - 1e-12, "p={p}: lb {lb} < plain {plain}");
            assert!(lb <= last + 1e-12, "bound must not increase in p");
            assert!((0.0..=1.0 + 1e-12).contains(&lb));
            last = lb;
        }
    }

    #[test]
    fn boe_endpoints() {
        assert_abs_diff_eq!(boe_success(0.0, 0.2, 4.0, 0.1).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(boe_success(1.0, 0.2, 4.0, 0.1).unwrap(), 0.0, epsilon = 1e-12);
        let mid = boe_success(0.5, 0.2, 4.0, 0.1).unwrap();
        assert!(mid > 0.0 && mid < 1.0);
        // More asymptomatic spread strictly hurts.
        let worse = boe_success(0.7, 0.2, 4.0, 0.1).unwrap();
        assert!(worse < mid);
    }

    #[test]
    fn empirical_pmf_normalizes() {
        let pmf = empirical_pmf(&[0, 1, 1, 3]);
        assert_eq!(pmf.len(), 4);
        assert_abs_diff_eq!(pmf[0], 0.25);
        assert_abs_diff_eq!(pmf[1], 0.5);
        assert_abs_diff_eq!(pmf[2], 0.0);
        assert_abs_diff_eq!(pmf[3], 0.25);
    }
}
