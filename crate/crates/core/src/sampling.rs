//! SRSWOR and two-phase sample drawing, sample statistics, and exhaustive
//! sample enumeration.
//!
//! Randomness contract: every replication gets its own counter-derived
//! ChaCha stream ([`replication_rng`]), so a batch of draws is bit-identical
//! no matter how replications are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::population::Population;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplingError {
    #[error("sample size {n} exceeds available units {available}")]
    SampleTooLarge { n: usize, available: usize },
    #[error("sample size must be at least 2 (got {0})")]
    SampleTooSmall(usize),
    #[error("two-phase sizes must satisfy n < n' (n = {n}, n_prime = {n_prime})")]
    PhaseOrderViolation { n: usize, n_prime: usize },
    #[error("C({n_population}, {n}) = {subsets} subsets exceeds the enumeration cap {cap}")]
    EnumerationTooLarge {
        n_population: usize,
        n: usize,
        subsets: u128,
        cap: u128,
    },
}

/// Default ceiling on `C(N, n)` for exact enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Independent RNG stream for one replication of a seeded experiment.
///
/// Streams are indexed, not chained: replication `r` never consumes state
/// from replication `r − 1`, which is what makes parallel execution
/// order-insensitive.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

/// An SRSWOR sample: distinct unit indices in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    indices: Vec<usize>,
}

impl Sample {
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Nested two-phase sample: `second ⊆ first`, `|second| < |first|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPhaseSample {
    first: Vec<usize>,
    second: Vec<usize>,
}

impl TwoPhaseSample {
    pub fn first(&self) -> &[usize] {
        &self.first
    }

    pub fn second(&self) -> &[usize] {
        &self.second
    }
}

/// Draws a simple random sample without replacement of size `n`; every one of
/// the `C(N, n)` subsets is equally likely.
pub fn draw_srswor(
    pop: &Population,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Sample, SamplingError> {
    draw_indices(pop.len(), n, rng).map(Sample::from_indices)
}

fn draw_indices(
    available: usize,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>, SamplingError> {
    if n > available {
        return Err(SamplingError::SampleTooLarge { n, available });
    }
    if n < 2 {
        return Err(SamplingError::SampleTooSmall(n));
    }
    Ok(rand::seq::index::sample(rng, available, n).into_vec())
}

/// Draws a first-phase SRSWOR of size `n'` and a nested second-phase SRSWOR
/// of size `n` from it.
pub fn draw_two_phase(
    pop: &Population,
    n_prime: usize,
    n: usize,
    rng: &mut impl Rng,
) -> Result<TwoPhaseSample, SamplingError> {
    if n >= n_prime {
        return Err(SamplingError::PhaseOrderViolation { n, n_prime });
    }
    let mut first = draw_indices(pop.len(), n_prime, rng)?;
    first.sort_unstable();
    let picks = draw_indices(n_prime, n, rng)?;
    let mut second: Vec<usize> = picks.into_iter().map(|i| first[i]).collect();
    second.sort_unstable();
    Ok(TwoPhaseSample { first, second })
}

/// Sample-level statistics over the drawn units.
///
/// Variance fields use divisor `n − 1`; auxiliary fields are unset when the
/// underlying population column is unset, and `bphi = s_yφ/s_φ²` is unset
/// when the attribute is constant within the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub ybar: f64,
    pub xbar: Option<f64>,
    pub p: Option<f64>,
    pub sy2: f64,
    pub sx2: Option<f64>,
    pub sphi2: Option<f64>,
    pub syphi: Option<f64>,
    pub bphi: Option<f64>,
}

/// Second-phase statistics plus the first-phase auxiliary summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseStats {
    pub second: SampleStats,
    pub xbar_prime: Option<f64>,
    pub p_prime: Option<f64>,
}

pub fn compute_sample_stats(pop: &Population, sample: &Sample) -> SampleStats {
    let idx = sample.indices();
    let n = idx.len();
    let nf = n as f64;
    let denom = (nf - 1.0).max(1.0);

    let ybar = idx.iter().map(|&i| pop.y()[i]).sum::<f64>() / nf;
    let sy2 = idx
        .iter()
        .map(|&i| {
            let d = pop.y()[i] - ybar;
            d * d
        })
        .sum::<f64>()
        / denom;

    let (xbar, sx2) = match pop.x() {
        Some(xs) => {
            let xb = idx.iter().map(|&i| xs[i]).sum::<f64>() / nf;
            let v = idx
                .iter()
                .map(|&i| {
                    let d = xs[i] - xb;
                    d * d
                })
                .sum::<f64>()
                / denom;
            (Some(xb), Some(v))
        }
        None => (None, None),
    };

    let (p, sphi2, syphi, bphi) = match pop.phi() {
        Some(ps) => {
            let pv = idx.iter().map(|&i| ps[i] as f64).sum::<f64>() / nf;
            let v = idx
                .iter()
                .map(|&i| {
                    let d = ps[i] as f64 - pv;
                    d * d
                })
                .sum::<f64>()
                / denom;
            let cov = idx
                .iter()
                .map(|&i| (ps[i] as f64 - pv) * (pop.y()[i] - ybar))
                .sum::<f64>()
                / denom;
            let b = if v > 0.0 { Some(cov / v) } else { None };
            (Some(pv), Some(v), Some(cov), b)
        }
        None => (None, None, None, None),
    };

    SampleStats {
        n,
        ybar,
        xbar,
        p,
        sy2,
        sx2,
        sphi2,
        syphi,
        bphi,
    }
}

pub fn compute_two_phase_stats(pop: &Population, tps: &TwoPhaseSample) -> TwoPhaseStats {
    let second = compute_sample_stats(pop, &Sample::from_indices(tps.second().to_vec()));
    let nf = tps.first().len() as f64;
    let xbar_prime = pop
        .x()
        .map(|xs| tps.first().iter().map(|&i| xs[i]).sum::<f64>() / nf);
    let p_prime = pop
        .phi()
        .map(|ps| tps.first().iter().map(|&i| ps[i] as f64).sum::<f64>() / nf);
    TwoPhaseStats {
        second,
        xbar_prime,
        p_prime,
    }
}

/// `C(n, k)` with saturation at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        let num = (n - i) as u128;
        acc = match acc.checked_mul(num) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Iterator over all `C(N, n)` index subsets in lexicographic order.
#[derive(Debug)]
pub struct SampleEnumeration {
    n_population: usize,
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for SampleEnumeration {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.take()?;
        let out = current.clone();
        // advance to the lexicographic successor
        let mut next = current;
        let n = self.n;
        let max = self.n_population;
        let mut i = n;
        loop {
            if i == 0 {
                self.current = None;
                return Some(out);
            }
            i -= 1;
            if next[i] < max - n + i {
                next[i] += 1;
                for j in i + 1..n {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
    }
}

/// Enumerates every size-`n` subset of `{0, …, N−1}`, provided the count is
/// within `cap` (defaults to [`DEFAULT_ENUMERATION_CAP`]).
pub fn enumerate_samples(
    n_population: usize,
    n: usize,
    cap: Option<u128>,
) -> Result<SampleEnumeration, SamplingError> {
    if n > n_population {
        return Err(SamplingError::SampleTooLarge {
            n,
            available: n_population,
        });
    }
    let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let subsets = binomial(n_population, n);
    if subsets > cap {
        return Err(SamplingError::EnumerationTooLarge {
            n_population,
            n,
            subsets,
            cap,
        });
    }
    Ok(SampleEnumeration {
        n_population,
        n,
        current: Some((0..n).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::summarize;

    fn toy_pop() -> Population {
        Population::new(
            vec![2.0, 5.0, 3.0, 8.0, 1.0, 9.0],
            Some(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
            Some(vec![0.0, 1.0, 0.0, 1.0, 1.0, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn census_sample_returns_all_units() {
        let pop = toy_pop();
        let mut rng = replication_rng(1, 0);
        let s = draw_srswor(&pop, pop.len(), &mut rng).unwrap();
        assert_eq!(s.indices(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn draw_is_deterministic_per_stream() {
        let pop = toy_pop();
        let a = draw_srswor(&pop, 3, &mut replication_rng(9, 5)).unwrap();
        let b = draw_srswor(&pop, 3, &mut replication_rng(9, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subsets_are_uniform() {
        // N = 5, n = 2: all 10 subsets within ±3σ of the binomial expectation.
        let pop = Population::new(vec![0.0; 5], None, None).unwrap();
        let draws = 100_000usize;
        let mut counts = std::collections::HashMap::new();
        for r in 0..draws {
            let s = draw_srswor(&pop, 2, &mut replication_rng(2024, r as u64)).unwrap();
            *counts.entry(s.indices().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        let expect = draws as f64 / 10.0;
        let sigma = (draws as f64 * 0.1 * 0.9).sqrt();
        for (subset, count) in counts {
            assert!(
                (count as f64 - expect).abs() <= 3.0 * sigma,
                "subset {subset:?} drawn {count} times, expected {expect} ± {:.1}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn two_phase_nesting_and_marginals() {
        let pop = toy_pop();
        let draws = 100_000usize;
        let mut inclusion = [0usize; 6];
        for r in 0..draws {
            let tps = draw_two_phase(&pop, 4, 2, &mut replication_rng(77, r as u64)).unwrap();
            assert!(tps.second().iter().all(|i| tps.first().contains(i)));
            for &i in tps.second() {
                inclusion[i] += 1;
            }
        }
        // second phase is marginally SRSWOR of size 2 from N = 6
        let expect = draws as f64 * 2.0 / 6.0;
        let sigma = (draws as f64 * (2.0 / 6.0) * (4.0 / 6.0)).sqrt();
        for (unit, &count) in inclusion.iter().enumerate() {
            assert!(
                (count as f64 - expect).abs() <= 3.0 * sigma,
                "unit {unit} included {count} times, expected {expect:.0}"
            );
        }
    }

    #[test]
    fn phase_order_is_enforced() {
        let pop = toy_pop();
        let err = draw_two_phase(&pop, 2, 4, &mut replication_rng(0, 0)).unwrap_err();
        assert_eq!(err, SamplingError::PhaseOrderViolation { n: 4, n_prime: 2 });
    }

    #[test]
    fn census_stats_reproduce_population_parameters() {
        let pop = toy_pop();
        let all = Sample::from_indices((0..pop.len()).collect());
        let stats = compute_sample_stats(&pop, &all);
        let summary = summarize(&pop).unwrap();
        assert!((stats.ybar - summary.ybar).abs() < 1e-12);
        assert!((stats.sy2 - summary.sy2.unwrap()).abs() < 1e-12);
        assert!((stats.p.unwrap() - summary.p.unwrap()).abs() < 1e-12);
        assert!((stats.sphi2.unwrap() - summary.sphi2.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn two_point_sample_stats() {
        let pop = Population::new(vec![1.0, 3.0], None, None).unwrap();
        let stats = compute_sample_stats(&pop, &Sample::from_indices(vec![0, 1]));
        assert_eq!(stats.ybar, 2.0);
        assert_eq!(stats.sy2, 2.0);
    }

    #[test]
    fn degenerate_attribute_leaves_bphi_unset() {
        let pop = Population::new(
            vec![1.0, 2.0, 3.0],
            None,
            Some(vec![1.0, 1.0, 1.0]),
        )
        .unwrap();
        let stats = compute_sample_stats(&pop, &Sample::from_indices(vec![0, 1, 2]));
        assert_eq!(stats.p, Some(1.0));
        assert_eq!(stats.sphi2, Some(0.0));
        assert!(stats.bphi.is_none());
    }

    #[test]
    fn enumeration_counts_and_uniqueness() {
        let subsets: Vec<_> = enumerate_samples(4, 2, None).unwrap().collect();
        assert_eq!(subsets.len(), 6);
        assert_eq!(subsets[0], vec![0, 1]);
        assert_eq!(subsets[5], vec![2, 3]);

        let census: Vec<_> = enumerate_samples(5, 5, None).unwrap().collect();
        assert_eq!(census.len(), 1);

        let many: Vec<_> = enumerate_samples(12, 4, None).unwrap().collect();
        assert_eq!(many.len(), 495);
        let unique: std::collections::HashSet<_> = many.iter().collect();
        assert_eq!(unique.len(), 495);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let err = enumerate_samples(40, 20, None).unwrap_err();
        assert!(matches!(err, SamplingError::EnumerationTooLarge { .. }));
    }

    #[test]
    fn design_unbiasedness_over_full_enumeration() {
        let pop = toy_pop();
        let summary = summarize(&pop).unwrap();
        let mut mean_ybar = 0.0;
        let mut mean_sy2 = 0.0;
        let mut count = 0usize;
        for subset in enumerate_samples(pop.len(), 3, None).unwrap() {
            let stats = compute_sample_stats(&pop, &Sample::from_indices(subset));
            mean_ybar += stats.ybar;
            mean_sy2 += stats.sy2;
            count += 1;
        }
        mean_ybar /= count as f64;
        mean_sy2 /= count as f64;
        assert!((mean_ybar - summary.ybar).abs() / summary.ybar.abs() < 1e-12);
        assert!((mean_sy2 - summary.sy2.unwrap()).abs() / summary.sy2.unwrap() < 1e-12);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(12, 4), 495);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }
}
