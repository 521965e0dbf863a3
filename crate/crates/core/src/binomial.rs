//! Binomial tail probabilities evaluated in log space.

/// `ln(n choose j)` for every `j` in `0..=n`, built by the ratio recurrence.
fn ln_choose_row(n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    row.push(acc);
    for j in 1..=n {
        acc += ((n - j + 1) as f64).ln() - (j as f64).ln();
        row.push(acc);
    }
    row
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `P(X >= k)` for `X ~ Bin(n, p)`.
///
/// Sums whichever tail lies away from the mean, so the result never comes
/// from subtracting two numbers close to one.
pub fn upper_tail(n: usize, p: f64, k: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let row = ln_choose_row(n);
    let ln_pmf = |j: usize| row[j] + j as f64 * ln_p + (n - j) as f64 * ln_q;

    let mean = n as f64 * p;
    if k as f64 > mean {
        log_sum_exp((k..=n).map(ln_pmf)).exp().min(1.0)
    } else {
        let lower = log_sum_exp((0..k).map(ln_pmf)).exp();
        (1.0 - lower).clamp(0.0, 1.0)
    }
}
