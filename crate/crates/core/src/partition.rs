//! Uniform sampling, counting and enumeration of 2-partitions of
//! `{0, .., n-1}`: the pairing engine behind the global trade chains.

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

/// A partition of `{0, .., n-1}` into unordered pairs, plus one singleton
/// when `n` is odd. Stored normalised: every pair as `(min, max)`, pairs
/// sorted, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwoPartition {
    pairs: Vec<(usize, usize)>,
    singleton: Option<usize>,
}

impl TwoPartition {
    pub fn new(mut pairs: Vec<(usize, usize)>, singleton: Option<usize>) -> Self {
        for pair in pairs.iter_mut() {
            if pair.1 < pair.0 {
                *pair = (pair.1, pair.0);
            }
        }
        pairs.sort_unstable();
        TwoPartition { pairs, singleton }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn singleton(&self) -> Option<usize> {
        self.singleton
    }

    /// Number of covered elements.
    pub fn len(&self) -> usize {
        2 * self.pairs.len() + usize::from(self.singleton.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Draws a 2-partition of `{0, .., n-1}` uniformly at random in O(n).
///
/// For odd `n` the singleton is chosen first. The remaining elements live
/// in an array-backed pool with swap-with-last removal; each round pairs
/// the front element with a uniformly chosen partner. Every partition is
/// produced by exactly one sequence of partner choices, hence uniformity.
pub fn sample_two_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TwoPartition {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut singleton = None;
    if n % 2 == 1 {
        let k = rng.gen_range(0..pool.len());
        singleton = Some(pool.swap_remove(k));
    }
    let mut pairs = Vec::with_capacity(pool.len() / 2);
    while pool.len() > 1 {
        let j = rng.gen_range(1..pool.len());
        let b = pool.swap_remove(j);
        let a = pool.swap_remove(0);
        pairs.push((a, b));
    }
    TwoPartition::new(pairs, singleton)
}

/// Exact number of 2-partitions of an `n`-element set: the double
/// factorial `(n-1)!!` for even `n` and `n!!` for odd `n`. Grows past
/// 64-bit range near n = 30, hence the big integer.
pub fn count_two_partitions(n: usize) -> BigUint {
    let mut count = BigUint::one();
    let start = if n % 2 == 0 { 1 } else { 0 };
    let mut k = start;
    while k < n {
        count *= BigUint::from(n - k);
        k += 2;
    }
    count
}

/// All 2-partitions of `{0, .., n-1}`, in normalised order. Intended for
/// the exact lab and tests only: the count grows as a double factorial.
pub fn enumerate_two_partitions(n: usize) -> Vec<TwoPartition> {
    let elements: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    if n % 2 == 1 {
        for (k, &s) in elements.iter().enumerate() {
            let mut rest = elements.clone();
            rest.remove(k);
            let mut pairs = Vec::new();
            enumerate_pairings(&rest, &mut pairs, &mut |pairs| {
                out.push(TwoPartition::new(pairs.to_vec(), Some(s)));
            });
        }
    } else {
        let mut pairs = Vec::new();
        enumerate_pairings(&elements, &mut pairs, &mut |pairs| {
            out.push(TwoPartition::new(pairs.to_vec(), None));
        });
    }
    out.sort();
    out
}

fn enumerate_pairings(
    remaining: &[usize],
    acc: &mut Vec<(usize, usize)>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    if remaining.is_empty() {
        emit(acc);
        return;
    }
    let anchor = remaining[0];
    for idx in 1..remaining.len() {
        let partner = remaining[idx];
        let rest: Vec<usize> =
            remaining[1..].iter().copied().filter(|&x| x != partner).collect();
        acc.push((anchor, partner));
        enumerate_pairings(&rest, acc, emit);
        acc.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_match_double_factorials() {
        let expected = [(1usize, 1u32), (2, 1), (3, 3), (4, 3), (5, 15), (6, 15), (7, 105)];
        for (n, c) in expected {
            assert_eq!(count_two_partitions(n), BigUint::from(c));
        }
        // past the u64 range the product must still be exact
        let big = count_two_partitions(40);
        assert_eq!(big, "319830986772877770815625".parse::<BigUint>().unwrap());
    }

    #[test]
    fn enumeration_matches_counts() {
        for n in 1..=8 {
            let all = enumerate_two_partitions(n);
            assert_eq!(BigUint::from(all.len()), count_two_partitions(n));
            // pairwise distinct and covering
            for w in all.windows(2) {
                assert!(w[0] < w[1]);
            }
            for p in &all {
                assert_eq!(p.len(), n);
                let mut seen: Vec<usize> = p.pairs().iter().flat_map(|&(a, b)| [a, b]).collect();
                seen.extend(p.singleton());
                seen.sort_unstable();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn single_element_becomes_singleton() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sample_two_partition(1, &mut rng);
        assert_eq!(p.pairs(), []);
        assert_eq!(p.singleton(), Some(0));
    }

    #[test]
    fn sampling_covers_all_partitions_uniformly() {
        // every partition for n <= 6 shows up with near-uniform frequency
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 2..=6usize {
            let all = enumerate_two_partitions(n);
            let samples = 30_000u32;
            let mut freq: BTreeMap<TwoPartition, u32> = BTreeMap::new();
            for _ in 0..samples {
                *freq.entry(sample_two_partition(n, &mut rng)).or_default() += 1;
            }
            assert_eq!(freq.len(), all.len(), "n={n}: not all partitions sampled");
            let expect = f64::from(samples) / all.len() as f64;
            for (p, count) in freq {
                let dev = (f64::from(count) - expect).abs();
                // 5 sigma of a binomial around the uniform expectation
                let sigma = (expect * (1.0 - 1.0 / all.len() as f64)).sqrt();
                assert!(dev < 5.0 * sigma, "n={n}, partition {p:?}: {count} vs {expect}");
            }
        }
    }
}
