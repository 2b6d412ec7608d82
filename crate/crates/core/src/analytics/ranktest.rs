//! Two-sample Wilcoxon rank-sum (Mann-Whitney U) test with Bonferroni
//! correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Fewest observations per sample accepted by [`rank_test`].
pub const MIN_RANK_SAMPLES: usize = 5;

/// Samples up to this size without ties use the exact null distribution.
const EXACT_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    /// The first sample tends to be larger.
    Greater,
    /// The first sample tends to be smaller.
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTest {
    /// U statistic of the first sample (pairs where it is larger, ties 1/2).
    pub u: f64,
    pub p_value: f64,
    /// `p_value` times the number of comparisons, capped at 1.
    pub p_adjusted: f64,
    /// Sample with the larger values, when `p_adjusted < alpha`.
    pub winner: Option<Winner>,
    pub exact: bool,
}

pub fn bonferroni(p: f64, comparisons: usize) -> f64 {
    (p * comparisons.max(1) as f64).min(1.0)
}

/// Mann-Whitney U test of `a` against `b`. Uses the exact distribution for
/// small tie-free samples, otherwise the normal approximation with tie and
/// continuity correction.
pub fn mann_whitney(a: &[f64], b: &[f64], alternative: Alternative) -> (f64, f64, bool) {
    let n1 = a.len();
    let n2 = b.len();
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|&v| (v, 0))
        .chain(b.iter().map(|&v| (v, 1)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for r in &mut ranks[i..=j] {
            *r = avg;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let rank_sum_a: f64 = pooled
        .iter()
        .zip(&ranks)
        .filter(|((_, g), _)| *g == 0)
        .map(|(_, r)| r)
        .sum();
    let u = rank_sum_a - (n1 * (n1 + 1)) as f64 / 2.0;

    let has_ties = tie_term > 0.0;
    if !has_ties && n1 <= EXACT_LIMIT && n2 <= EXACT_LIMIT {
        let dist = exact_u_distribution(n1, n2);
        let total: f64 = dist.iter().sum();
        let ui = u.round() as usize;
        let lower: f64 = dist[..=ui].iter().sum::<f64>() / total;
        let upper: f64 = dist[ui..].iter().sum::<f64>() / total;
        let p = match alternative {
            Alternative::Greater => upper,
            Alternative::Less => lower,
            Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
        };
        return (u, p, true);
    }

    let nf = (n1 + n2) as f64;
    let mean = (n1 * n2) as f64 / 2.0;
    let var = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return (u, 1.0, false);
    }
    let sd = var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = match alternative {
        Alternative::Greater => std_normal.sf((u - mean - 0.5) / sd),
        Alternative::Less => std_normal.cdf((u - mean + 0.5) / sd),
        Alternative::TwoSided => {
            let z = ((u - mean).abs() - 0.5).max(0.0) / sd;
            (2.0 * std_normal.sf(z)).min(1.0)
        }
    };
    (u, p, false)
}

/// Number of arrangements giving each U value, for `n1` and `n2` distinct
/// observations. Index = U.
fn exact_u_distribution(n1: usize, n2: usize) -> Vec<f64> {
    // counts[i][j][u]: arrangements of i firsts and j seconds with statistic u,
    // built by appending the largest element.
    let max_u = n1 * n2;
    let mut prev: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; n2 + 1];
    for row in prev.iter_mut() {
        row[0] = 1.0;
    }
    for _i in 1..=n1 {
        let mut cur: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; n2 + 1];
        cur[0][0] = 1.0;
        for j in 1..=n2 {
            for u in 0..=max_u {
                // largest is a second-sample value: adds nothing
                let mut c = cur[j - 1][u];
                // largest is a first-sample value: beats all j seconds
                if u >= j {
                    c += prev[j][u - j];
                }
                cur[j][u] = c;
            }
        }
        prev = cur;
    }
    prev.swap_remove(n2)
}

/// Rank test of `a` against `b` with Bonferroni correction over
/// `comparisons` tests. A winner is named when the corrected p-value is
/// below `alpha`.
pub fn rank_test(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    comparisons: usize,
    alpha: f64,
) -> Result<RankTest> {
    let smallest = a.len().min(b.len());
    if smallest < MIN_RANK_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_RANK_SAMPLES,
            got: smallest,
        });
    }
    let (u, p_value, exact) = mann_whitney(a, b, alternative);
    let p_adjusted = bonferroni(p_value, comparisons);
    let mean_u = (a.len() * b.len()) as f64 / 2.0;
    let winner = if p_adjusted < alpha && u != mean_u {
        Some(if u > mean_u { Winner::First } else { Winner::Second })
    } else {
        None
    };
    Ok(RankTest {
        u,
        p_value,
        p_adjusted,
        winner,
        exact,
    })
}
