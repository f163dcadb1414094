//! Statistical kernels used by the trend and stability analyses.
//!
//! Both rank tests are two-sided, use midranks for ties, and switch from
//! exact enumeration to a tie-corrected normal approximation once the exact
//! distribution becomes too large to enumerate (more than 14 pooled values
//! for Mann-Whitney, more than 20 nonzero pairs for Wilcoxon).

mod pca;

pub use pca::{pca_2d, Pca2d};

use crate::{Error, Result};

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    NormalApprox,
    /// All paired differences were zero; the test carries no information.
    Degenerate,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Exact => write!(f, "exact"),
            Method::NormalApprox => write!(f, "normal-approximation"),
            Method::Degenerate => write!(f, "degenerate"),
        }
    }
}

/// Outcome of a rank test.
///
/// For Mann-Whitney, `n1`/`n2` are the two sample sizes and `statistic` is
/// the U of the first sample. For Wilcoxon, `n1` is the number of nonzero
/// pairs that were ranked, `n2` the number of zero differences dropped, and
/// `statistic` is min(W+, W-).
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub n1: usize,
    pub n2: usize,
}

/// Largest pooled size for which Mann-Whitney enumerates the exact null.
pub const MANN_WHITNEY_EXACT_LIMIT: usize = 14;
/// Largest pair count for which Wilcoxon enumerates the exact null.
pub const WILCOXON_EXACT_LIMIT: usize = 20;

const EXTREME_EPS: f64 = 1e-9;

/// Midranks of `values` (average rank within each tied group), 1-based.
fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share the average of ranks i+1..=j.
        let rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        i = j;
    }
    ranks
}

/// Sum of (t^3 - t) over tied groups, for the variance tie correction.
fn tie_term(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        term += t * t * t - t;
        i = j;
    }
    term
}

/// Upper tail of the standard normal, via an erfc rational approximation
/// (fractional error below 1.2e-7).
fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Two-sided Mann-Whitney U test.
///
/// Returns the U statistic of `sample_a`. With at most
/// [`MANN_WHITNEY_EXACT_LIMIT`] pooled values the p-value comes from full
/// enumeration of rank assignments (ties kept as midranks); above that, a
/// normal approximation with tie and continuity corrections.
pub fn mann_whitney_u(sample_a: &[f64], sample_b: &[f64]) -> Result<TestResult> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptySample(
            "mann-whitney requires two non-empty samples".into(),
        ));
    }
    let n1 = sample_a.len();
    let n2 = sample_b.len();
    let n = n1 + n2;

    let mut pooled = Vec::with_capacity(n);
    pooled.extend_from_slice(sample_a);
    pooled.extend_from_slice(sample_b);
    let ranks = midranks(&pooled);

    let rank_sum_a: f64 = ranks[..n1].iter().sum();
    let u_a = rank_sum_a - (n1 * (n1 + 1)) as f64 / 2.0;
    let mean = (n1 * n2) as f64 / 2.0;

    if n <= MANN_WHITNEY_EXACT_LIMIT {
        let p = exact_mann_whitney_p(&ranks, n1, u_a);
        return Ok(TestResult {
            statistic: u_a,
            p_value: p,
            method: Method::Exact,
            n1,
            n2,
        });
    }

    let tie = tie_term(&pooled);
    let nf = n as f64;
    let var = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - tie / (nf * (nf - 1.0)));
    let sd = var.sqrt();
    let p = if sd == 0.0 {
        1.0
    } else {
        let z = ((u_a - mean).abs() - 0.5).max(0.0) / sd;
        (2.0 * normal_sf(z)).min(1.0)
    };
    Ok(TestResult {
        statistic: u_a,
        p_value: p,
        method: Method::NormalApprox,
        n1,
        n2,
    })
}

/// Enumerate every assignment of n1 pooled ranks to sample A and count those
/// with |U - mean| at least as large as observed.
fn exact_mann_whitney_p(ranks: &[f64], n1: usize, u_obs: f64) -> f64 {
    let n = ranks.len();
    let n2 = n - n1;
    let mean = (n1 * n2) as f64 / 2.0;
    let obs_dev = (u_obs - mean).abs();
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;

    // Iterate subsets of size n1 via the standard combination walk.
    let mut comb: Vec<usize> = (0..n1).collect();
    let mut extreme: u64 = 0;
    let mut total: u64 = 0;
    loop {
        let rank_sum: f64 = comb.iter().map(|&i| ranks[i]).sum();
        let u = rank_sum - offset;
        if (u - mean).abs() >= obs_dev - EXTREME_EPS {
            extreme += 1;
        }
        total += 1;

        // Advance to the next combination.
        let mut i = n1;
        loop {
            if i == 0 {
                return extreme as f64 / total as f64;
            }
            i -= 1;
            if comb[i] != i + n - n1 {
                break;
            }
        }
        comb[i] += 1;
        for j in i + 1..n1 {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

/// Two-sided Wilcoxon signed-rank test on paired differences.
///
/// Zero differences are dropped before ranking. With at most
/// [`WILCOXON_EXACT_LIMIT`] nonzero pairs the p-value comes from enumerating
/// all sign assignments; above that, a normal approximation with tie and
/// continuity corrections. All-zero input is degenerate: p = 1.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<TestResult> {
    if diffs.is_empty() {
        return Err(Error::EmptySample(
            "wilcoxon requires at least one pair".into(),
        ));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    let zeros = diffs.len() - nonzero.len();
    if nonzero.is_empty() {
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
            method: Method::Degenerate,
            n1: 0,
            n2: zeros,
        });
    }

    let n = nonzero.len();
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    // `+ 0.0` normalizes the -0.0 that an empty f64 sum produces, so the
    // statistic prints as plain zero when one side has no ranks.
    let w_plus: f64 = ranks
        .iter()
        .zip(&nonzero)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&r, _)| r)
        .sum::<f64>()
        + 0.0;
    let total: f64 = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let statistic = w_plus.min(w_minus);
    let mean = total / 2.0;

    if n <= WILCOXON_EXACT_LIMIT {
        let obs_dev = (w_plus - mean).abs();
        let mut extreme: u64 = 0;
        for pattern in 0u32..(1u32 << n) {
            let mut w: f64 = 0.0;
            for (i, &r) in ranks.iter().enumerate() {
                if pattern & (1 << i) != 0 {
                    w += r;
                }
            }
            if (w - mean).abs() >= obs_dev - EXTREME_EPS {
                extreme += 1;
            }
        }
        return Ok(TestResult {
            statistic,
            p_value: extreme as f64 / (1u64 << n) as f64,
            method: Method::Exact,
            n1: n,
            n2: zeros,
        });
    }

    let nf = n as f64;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&abs) / 48.0;
    let sd = var.sqrt();
    let p = if sd == 0.0 {
        1.0
    } else {
        let z = ((w_plus - mean).abs() - 0.5).max(0.0) / sd;
        (2.0 * normal_sf(z)).min(1.0)
    };
    Ok(TestResult {
        statistic,
        p_value: p,
        method: Method::NormalApprox,
        n1: n,
        n2: zeros,
    })
}

/// Ordinary least-squares line fit, returning (slope, intercept).
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::ConstantAbscissa);
    }
    let slope = sxy / sxx;
    Ok((slope, y_mean - slope * x_mean))
}
