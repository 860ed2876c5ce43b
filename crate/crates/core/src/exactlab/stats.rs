//! Pearson chi-square goodness-of-fit against the uniform distribution.

use super::LabError;

/// Result of a uniformity test over the cells of a state space.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
    pub degrees_of_freedom: usize,
}

/// Pearson chi-square of observed counts against uniform cell
/// probabilities. Requires an expected count of at least 5 per cell.
pub fn chi_square_uniformity(counts: &[u64]) -> Result<ChiSquare, LabError> {
    let cells = counts.len();
    if cells == 0 {
        return Err(LabError::TooFewSamples { expected_per_cell: 0.0 });
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / cells as f64;
    if expected < 5.0 {
        return Err(LabError::TooFewSamples { expected_per_cell: expected });
    }
    let statistic: f64 = counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let degrees_of_freedom = cells - 1;
    let p_value = if degrees_of_freedom == 0 {
        1.0
    } else {
        gamma_q(degrees_of_freedom as f64 / 2.0, statistic / 2.0)
    };
    Ok(ChiSquare { statistic, p_value, degrees_of_freedom })
}

/// Regularized upper incomplete gamma function Q(a, x); the chi-square
/// survival function is Q(df/2, x/2). Series expansion below a + 1,
/// Lentz's continued fraction above.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 || a <= 0.0 {
        return if x <= 0.0 { 1.0 } else { f64::NAN };
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

const EPS: f64 = 1e-15;
const MAX_ITER: usize = 500;

fn prefactor(a: f64, x: f64) -> f64 {
    libm::exp(-x + a * libm::log(x) - libm::lgamma(a))
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if libm::fabs(term) < libm::fabs(sum) * EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < tiny {
            d = tiny;
        }
        c = b + an / c;
        if libm::fabs(c) < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if libm::fabs(delta - 1.0) < EPS {
            break;
        }
    }
    prefactor(a, x) * h
}
