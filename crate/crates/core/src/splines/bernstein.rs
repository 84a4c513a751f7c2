use super::{DerivOrder, SplineError};

/// Bernstein polynomials `B_{i,p}(t) = C(p,i) tⁱ (1−t)^{p−i}` on `[0, 1]`,
/// or their first derivatives.
pub fn eval_bernstein(p: usize, t: f64, order: DerivOrder) -> Result<Vec<f64>, SplineError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(SplineError::OutOfDomain(t));
    }
    Ok(match order {
        DerivOrder::Value => bernstein_values(p, t),
        DerivOrder::First => bernstein_derivatives(p, t),
    })
}

/// Values via the triangular de Casteljau-type recursion; no domain check.
pub(crate) fn bernstein_values(p: usize, t: f64) -> Vec<f64> {
    let mut b = vec![0.0; p + 1];
    b[0] = 1.0;
    let s = 1.0 - t;
    for j in 1..=p {
        let mut saved = 0.0;
        for k in 0..j {
            let tmp = b[k];
            b[k] = saved + s * tmp;
            saved = t * tmp;
        }
        b[j] = saved;
    }
    b
}

pub(crate) fn bernstein_derivatives(p: usize, t: f64) -> Vec<f64> {
    if p == 0 {
        return vec![0.0];
    }
    let lower = bernstein_values(p - 1, t);
    let pf = p as f64;
    (0..=p)
        .map(|i| {
            let left = if i > 0 { lower[i - 1] } else { 0.0 };
            let right = if i < p { lower[i] } else { 0.0 };
            pf * (left - right)
        })
        .collect()
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_endpoint_and_midpoint() {
        assert_eq!(eval_bernstein(2, 0.0, DerivOrder::Value).unwrap(), vec![1.0, 0.0, 0.0]);
        let mid = eval_bernstein(2, 0.5, DerivOrder::Value).unwrap();
        for (got, want) in mid.iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn linear_derivative_is_constant() {
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(eval_bernstein(1, t, DerivOrder::First).unwrap(), vec![-1.0, 1.0]);
        }
    }

    #[test]
    fn matches_binomial_formula() {
        for p in 0..7 {
            for &t in &[0.0, 0.13, 0.5, 0.77, 1.0] {
                let b = eval_bernstein(p, t, DerivOrder::Value).unwrap();
                for (i, v) in b.iter().enumerate() {
                    let want = binomial(p, i) * t.powi(i as i32) * (1.0 - t).powi((p - i) as i32);
                    assert_abs_diff_eq!(*v, want, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for p in 1..6 {
            let t = 0.37;
            let d = eval_bernstein(p, t, DerivOrder::First).unwrap();
            let fp = eval_bernstein(p, t + h, DerivOrder::Value).unwrap();
            let fm = eval_bernstein(p, t - h, DerivOrder::Value).unwrap();
            for i in 0..=p {
                assert_abs_diff_eq!(d[i], (fp[i] - fm[i]) / (2.0 * h), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn rejects_points_outside_unit_interval() {
        assert!(eval_bernstein(2, -0.1, DerivOrder::Value).is_err());
        assert!(eval_bernstein(2, 1.0 + 1e-9, DerivOrder::First).is_err());
    }
}
