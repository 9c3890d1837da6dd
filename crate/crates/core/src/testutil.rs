//! Shared oracles for unit tests.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

/// Chi-square goodness-of-fit p-value of integer observations against
/// Poisson(mu), merging adjacent cells until each expects at least 5.
pub fn poisson_chi_square(counts: &[usize], mu: f64) -> f64 {
    let n = counts.len() as f64;
    let pmf = Poisson::new(mu).unwrap();
    let top = (mu + 6.0 * mu.sqrt() + 10.0) as usize;
    let mut observed = vec![0.0; top + 1];
    for &c in counts {
        observed[c.min(top)] += 1.0;
    }
    let mut expected: Vec<f64> = (0..top).map(|k| n * pmf.pmf(k as u64)).collect();
    expected.push(n * (1.0 - pmf.cdf(top as u64 - 1)));

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..=top {
        o += observed[k];
        e += expected[k];
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    1.0 - ChiSquared::new((bins.len() - 1) as f64).unwrap().cdf(stat)
}
