use crate::error::{Error, Result};

/// Below this mean `e^{-lambda}` is a normal float and pmf values are built
/// as `e^{-lambda} * prod(lambda / j)`, which is accurate to a few ulps.
const PRODUCT_LIMIT: f64 = 600.0;

fn check_rate(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 || lambda.is_infinite() {
        return Err(Error::invalid(format!(
            "Poisson mean {lambda} must be finite and >= 0"
        )));
    }
    Ok(())
}

/// `P[Pois(lambda) = i]`.
pub fn pois_pmf(i: usize, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(pmf_unchecked(i, lambda))
}

pub(crate) fn pmf_unchecked(i: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if i == 0 { 1.0 } else { 0.0 };
    }
    if lambda < PRODUCT_LIMIT {
        let mut p = (-lambda).exp();
        for j in 1..=i {
            p *= lambda / j as f64;
            if p == 0.0 {
                break;
            }
        }
        p
    } else {
        let ln_fact: f64 = (2..=i).map(|j| (j as f64).ln()).sum();
        (i as f64 * lambda.ln() - lambda - ln_fact).exp()
    }
}

/// Upper tail `P[Pois(lambda) >= k]`.
///
/// Below `lambda = k + 1` the tail is summed directly as the incomplete-gamma
/// series `pmf(k) * (1 + lambda/(k+1) + lambda^2/((k+1)(k+2)) + ...)`;
/// above it the complement `1 - sum_{i<k} pmf(i)` is used, whose terms are
/// all small there, so neither branch cancels.
pub fn pois_tail(k: usize, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(tail_unchecked(k, lambda))
}

pub(crate) fn tail_unchecked(k: usize, lambda: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if lambda == 0.0 {
        return 0.0;
    }
    if lambda < (k + 1) as f64 {
        let lead = pmf_unchecked(k, lambda);
        if lead == 0.0 {
            return 0.0;
        }
        let mut sum = 1.0;
        let mut term = 1.0;
        let mut j = k + 1;
        loop {
            term *= lambda / j as f64;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            j += 1;
        }
        (lead * sum).min(1.0)
    } else if lambda < PRODUCT_LIMIT {
        let mut term = (-lambda).exp();
        let mut head = term;
        for i in 1..k {
            term *= lambda / i as f64;
            head += term;
        }
        (1.0 - head).max(0.0)
    } else {
        let head: f64 = (0..k).map(|i| pmf_unchecked(i, lambda)).sum();
        (1.0 - head).max(0.0)
    }
}

/// Conditional mean `E[X | X >= k]` for `X ~ Pois(lambda)`, computed as
/// `lambda * P[X >= k-1] / P[X >= k]`.
pub fn truncated_mean(k: usize, lambda: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("truncated mean needs k >= 1"));
    }
    check_rate(lambda)?;
    if lambda <= 0.0 {
        return Err(Error::invalid("truncated mean needs lambda > 0"));
    }
    let below = tail_unchecked(k - 1, lambda);
    let tail = tail_unchecked(k, lambda);
    if !tail.is_normal() {
        return Err(Error::DegenerateInput(format!(
            "P[Pois({lambda}) >= {k}] underflows"
        )));
    }
    Ok(lambda * below / tail)
}
