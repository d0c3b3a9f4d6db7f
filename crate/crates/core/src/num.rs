//! Log-domain helpers shared by the closed-form measures.

/// `ln Σ exp(t)` over the finite-or-minus-infinity terms in `terms`.
pub(crate) fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `ln Σ_{x > 0} x^a` for `a > 0`, scaled by the largest entry.
pub(crate) fn log_power_sum(values: &[f64], a: f64) -> f64 {
    let m = values.iter().copied().fold(0.0, f64::max);
    if m <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let s: f64 = values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| (v / m).powf(a))
        .sum();
    a * m.ln() + s.ln()
}

/// `ln` that maps 0 to -inf without warnings about domain.
pub(crate) fn ln0(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive() {
        let t = [0.1, -2.0, 3.0];
        let naive = t.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(t) - naive).abs() < 1e-14);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp([1.0, f64::INFINITY]), f64::INFINITY);
    }

    #[test]
    fn power_sum_large_exponent() {
        let v = log_power_sum(&[0.5, 0.25, 0.0], 1e6);
        assert!((v - 1e6 * 0.5f64.ln()).abs() < 1e-9);
        let small = log_power_sum(&[0.75, 0.25], 2.0);
        assert!((small - 0.625f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn argmax_ties_pick_lowest() {
        assert_eq!(argmax_lowest(&[0.2, 0.4, 0.4]), 1);
    }
}
