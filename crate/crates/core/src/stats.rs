//! Pearson chi-square tests for sampled histograms.

use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    fn new(statistic: f64, dof: usize) -> Self {
        let p_value =
            if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN) };
        ChiSquare { statistic, dof, p_value }
    }

    /// True when the null hypothesis survives at `significance`.
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Goodness of fit of `counts` against the uniform distribution over
/// `counts.len()` bins. Bins never observed must still be listed as zeros.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let k = counts.len();
    if k == 0 || total == 0 {
        return ChiSquare::new(0.0, 0);
    }
    let expected = total as f64 / k as f64;
    let stat = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    ChiSquare::new(stat, k - 1)
}

/// Two-sample homogeneity test over aligned bins. Bins empty in both samples
/// are dropped; sample sizes may differ.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len(), "histograms must share bins");
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return ChiSquare::new(0.0, 0);
    }
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut stat = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        bins += 1;
        stat += (ka * x as f64 - kb * y as f64).powi(2) / (x + y) as f64;
    }
    ChiSquare::new(stat, bins.max(1) - 1)
}
