//! Exact sampling and marginals for the product-weight distribution over
//! size-K subsets,
//!
//! ```text
//! Pr[I] = prod_{i in I} w_i / e_K(w),
//! ```
//!
//! i.e. a K-DPP whose kernel is `diag(w)`. With a diagonal kernel the
//! eigenvectors are the standard basis, so sampling reduces to choosing K
//! "eigenvalues", which the elementary symmetric polynomial (ESP) table makes
//! an O(NK) backward scan.
//!
//! Arms are 0-based throughout.

use rand::Rng;

use crate::error::{Error, Result};

/// Slack allowed on a computed probability before it is treated as a bug.
const PROB_TOLERANCE: f64 = 1e-9;

/// Nonnegative per-arm weights of a diagonal kernel.
///
/// Weights built with [`WeightVector::new`] are strictly positive. Weights
/// produced by [`stabilize`] have maximum exactly 1 and may contain zeros
/// where `exp` underflowed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weight vector is empty"));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w <= 0.0)
        {
            return Err(Error::invalid(format!(
                "weight {i} is {w}, expected a finite positive value"
            )));
        }
        Ok(WeightVector(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn positive_count(&self) -> usize {
        self.0.iter().filter(|w| **w > 0.0).count()
    }
}

/// Turns cumulative loss estimates into kernel weights
/// `w_i = exp(-eta * (L_i - min_j L_j))`.
///
/// The common factor `exp(eta * min_j L_j)` cancels in every subset
/// probability, so the induced distribution is the unshifted one.
pub fn stabilize(cumulative: &[f64], eta: f64) -> Result<WeightVector> {
    if cumulative.is_empty() {
        return Err(Error::invalid("no cumulative estimates"));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid(format!("learning rate {eta} must be positive")));
    }
    if let Some((i, l)) = cumulative.iter().enumerate().find(|(_, l)| !l.is_finite()) {
        return Err(Error::invalid(format!("estimate {i} is {l}")));
    }
    let min = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(WeightVector(
        cumulative
            .iter()
            .map(|l| (-eta * (l - min)).exp())
            .collect(),
    ))
}

/// Table of elementary symmetric polynomials of weight prefixes:
/// `get(n, k) = e_k(w_0, .., w_{n-1})` for `n <= N`, `k <= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct EspTable {
    arms: usize,
    max_k: usize,
    data: Vec<f64>,
}

impl EspTable {
    /// `e_k` of the first `n` weights.
    pub fn get(&self, n: usize, k: usize) -> f64 {
        assert!(n <= self.arms && k <= self.max_k, "esp index out of range");
        self.data[n * (self.max_k + 1) + k]
    }

    /// The normalizer `e_K(w)` over all arms.
    pub fn normalizer(&self) -> f64 {
        self.get(self.arms, self.max_k)
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }
}

/// Builds the `(N+1) x (K+1)` ESP table with the recurrence
/// `e_k(w_1..w_n) = e_k(w_1..w_{n-1}) + w_n * e_{k-1}(w_1..w_{n-1})`.
pub fn build_esp_table(weights: &WeightVector, k: usize) -> Result<EspTable> {
    build_from_slice(weights.as_slice(), k)
}

fn build_from_slice(w: &[f64], k: usize) -> Result<EspTable> {
    let n = w.len();
    if k > n {
        return Err(Error::invalid(format!(
            "subset size {k} exceeds arm count {n}"
        )));
    }
    let stride = k + 1;
    let mut data = vec![0.0; (n + 1) * stride];
    data[0] = 1.0;
    for row in 1..=n {
        let wn = w[row - 1];
        let (prev, cur) = data.split_at_mut(row * stride);
        let prev = &prev[(row - 1) * stride..];
        cur[0] = 1.0;
        for j in 1..=k.min(row) {
            cur[j] = prev[j] + wn * prev[j - 1];
        }
    }
    Ok(EspTable {
        arms: n,
        max_k: k,
        data,
    })
}

fn checked_probability(p: f64, what: &str) -> Result<f64> {
    if !p.is_finite() || !(-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&p) {
        return Err(Error::NumericalInstability(format!(
            "{what} probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Largest level `j <= K` whose normalizer is positive. Equals `K` unless the
/// weights are degenerate (fewer than K usable arms after underflow).
fn usable_level(table: &EspTable) -> usize {
    (0..=table.max_k())
        .rev()
        .find(|&j| table.get(table.arms(), j) > 0.0)
        .unwrap_or(0)
}

/// Draws a size-K subset with `Pr[I] proportional to prod_{i in I} w_i`.
///
/// Returns the members in ascending order.
pub fn sample_k_subset<R: Rng + ?Sized>(
    weights: &WeightVector,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let table = build_esp_table(weights, k)?;
    sample_with_table(weights, &table, rng)
}

/// Same as [`sample_k_subset`] with a prebuilt table, for repeated draws.
pub fn sample_with_table<R: Rng + ?Sized>(
    weights: &WeightVector,
    table: &EspTable,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let w = weights.as_slice();
    if table.arms() != w.len() {
        return Err(Error::invalid("esp table does not match the weights"));
    }
    let k = table.max_k();
    let level = usable_level(table);

    let mut chosen = vec![false; w.len()];
    let mut remaining = level;
    for i in (0..w.len()).rev() {
        if remaining == 0 {
            break;
        }
        let p = if remaining == i + 1 {
            1.0
        } else {
            let denom = table.get(i + 1, remaining);
            if denom > 0.0 {
                checked_probability(w[i] * table.get(i, remaining - 1) / denom, "inclusion")?
            } else {
                0.0
            }
        };
        if p >= 1.0 || rng.random::<f64>() < p {
            chosen[i] = true;
            remaining -= 1;
        }
    }
    if remaining != 0 {
        return Err(Error::NumericalInstability(format!(
            "backward scan ended with {remaining} slots unfilled"
        )));
    }

    // Degenerate weights: complete uniformly from the arms left out.
    if level < k {
        let mut rest: Vec<usize> = (0..w.len()).filter(|&i| !chosen[i]).collect();
        for _ in level..k {
            let pick = rng.random_range(0..rest.len());
            chosen[rest.swap_remove(pick)] = true;
        }
    }

    Ok(chosen
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| c.then_some(i))
        .collect())
}

/// `Pr[i in I] = w_i * e_{K-1}(w without i) / e_K(w)`.
pub fn marginal_inclusion(weights: &WeightVector, k: usize, arm: usize) -> Result<f64> {
    let n = weights.len();
    if arm >= n {
        return Err(Error::invalid(format!("arm {arm} out of range for {n} arms")));
    }
    let table = build_esp_table(weights, k)?;
    marginal_with_table(weights, &table, arm)
}

/// Marginals of every arm; they sum to K.
pub fn marginals(weights: &WeightVector, k: usize) -> Result<Vec<f64>> {
    let table = build_esp_table(weights, k)?;
    (0..weights.len())
        .map(|i| marginal_with_table(weights, &table, i))
        .collect()
}

fn marginal_with_table(weights: &WeightVector, table: &EspTable, arm: usize) -> Result<f64> {
    let w = weights.as_slice();
    let n = w.len();
    let k = table.max_k();
    if k == 0 {
        return Ok(0.0);
    }
    let level = usable_level(table);
    let without: Vec<f64> = w
        .iter()
        .enumerate()
        .filter_map(|(j, &x)| (j != arm).then_some(x))
        .collect();
    let rest = build_from_slice(&without, (level.max(1) - 1).min(n - 1))?;

    let in_level = if level == 0 {
        0.0
    } else {
        let p = w[arm] * rest.get(n - 1, level - 1) / table.get(n, level);
        checked_probability(p, "marginal")?
    };
    if level == k {
        return Ok(in_level);
    }
    // Degenerate completion: the remaining K - level slots are uniform over
    // the N - level arms not drawn by the reduced sampler.
    let fill = (k - level) as f64 / (n - level) as f64;
    Ok(in_level + (1.0 - in_level) * fill)
}

/// True when at least K weights are positive.
pub fn is_nondegenerate(weights: &WeightVector, k: usize) -> bool {
    weights.positive_count() >= k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn weights(w: &[f64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    /// All size-k subsets with their normalized product weights.
    fn enumerate(w: &[f64], k: usize) -> Vec<(Vec<usize>, f64)> {
        let n = w.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let p = members.iter().map(|&i| w[i]).product::<f64>();
            out.push((members, p));
        }
        let z: f64 = out.iter().map(|(_, p)| p).sum();
        out.iter_mut().for_each(|(_, p)| *p /= z);
        out
    }

    #[test]
    fn esp_unit_weights_are_binomials() {
        let t = build_esp_table(&weights(&[1.0, 1.0, 1.0]), 2).unwrap();
        assert_eq!(t.normalizer(), 3.0);
        let t = build_esp_table(&weights(&[1.0; 6]), 4).unwrap();
        let binom = [[1.0, 6.0, 15.0, 20.0, 15.0]];
        for (k, b) in binom[0].iter().enumerate() {
            assert_eq!(t.get(6, k), *b);
        }
    }

    #[test]
    fn esp_matches_pair_enumeration() {
        let t = build_esp_table(&weights(&[1.0, 2.0, 3.0]), 2).unwrap();
        assert_eq!(t.normalizer(), 11.0);
        assert_eq!(t.get(3, 0), 1.0);
        let t0 = build_esp_table(&weights(&[0.3, 7.0]), 0).unwrap();
        assert_eq!(t0.normalizer(), 1.0);
    }

    #[test]
    fn esp_table_invariants() {
        let w = [0.5, 1.0, 0.25, 0.8, 0.1];
        let t = build_esp_table(&weights(&w), 3).unwrap();
        for n in 0..=5 {
            assert_eq!(t.get(n, 0), 1.0);
            for k in 1..=3 {
                if k > n {
                    assert_eq!(t.get(n, k), 0.0);
                } else {
                    let rec = t.get(n - 1, k) + w[n - 1] * t.get(n - 1, k - 1);
                    assert_eq!(t.get(n, k), rec);
                }
                assert!(t.get(n, k) >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0, -2.0]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
        assert!(build_esp_table(&weights(&[1.0, 1.0]), 3).is_err());
        assert!(marginal_inclusion(&weights(&[1.0, 1.0]), 1, 2).is_err());
        assert!(stabilize(&[0.0, f64::INFINITY], 1.0).is_err());
        assert!(stabilize(&[0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn marginals_of_small_instance() {
        let w = weights(&[1.0, 1.0, 2.0]);
        let m = marginals(&w, 2).unwrap();
        assert!((m[2] - 0.8).abs() < 1e-15);
        assert!((m[0] - 0.6).abs() < 1e-15);
        assert!((m[1] - 0.6).abs() < 1e-15);
        assert!((m.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_marginals_are_k_over_n() {
        let w = weights(&[1.0; 7]);
        for i in 0..7 {
            let m = marginal_inclusion(&w, 3, i).unwrap();
            assert!((m - 3.0 / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_match_enumeration() {
        let w = [0.9, 0.05, 0.4, 1.0, 0.33, 0.71];
        for k in 1..=4 {
            let m = marginals(&weights(&w), k).unwrap();
            let subsets = enumerate(&w, k);
            for (i, mi) in m.iter().enumerate() {
                let brute: f64 = subsets
                    .iter()
                    .filter(|(s, _)| s.contains(&i))
                    .map(|(_, p)| p)
                    .sum();
                assert!((mi - brute).abs() <= 1e-9 * brute.max(1e-300));
            }
        }
    }

    #[test]
    fn sample_frequencies_for_small_instance() {
        let w = weights(&[1.0, 1.0, 2.0]);
        let table = build_esp_table(&w, 2).unwrap();
        let mut rng = rng_from_seed(11);
        let mut counts = std::collections::HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            let s = sample_with_table(&w, &table, &mut rng).unwrap();
            *counts.entry(s).or_insert(0usize) += 1;
        }
        for (subset, p) in [(vec![0, 1], 0.2), (vec![0, 2], 0.4), (vec![1, 2], 0.4)] {
            let freq = counts[&subset] as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "{subset:?}: {freq} vs {p}");
        }
    }

    #[test]
    fn full_set_when_k_equals_n() {
        let w = weights(&[0.2, 0.9, 0.4]);
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            assert_eq!(sample_k_subset(&w, 3, &mut rng).unwrap(), vec![0, 1, 2]);
        }
    }

    #[test]
    fn stabilize_shifts_by_minimum() {
        let w = stabilize(&[4.0, 4.0, 4.0], 0.7).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 1.0, 1.0]);

        let w = stabilize(&[10.0, 11.0, 12.0], 1.0).unwrap();
        let expect = [1.0, (-1.0f64).exp(), (-2.0f64).exp()];
        for (a, b) in w.as_slice().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        // The unshifted weights give the same subset distribution.
        let raw: Vec<f64> = [10.0f64, 11.0, 12.0].iter().map(|l| (-l).exp()).collect();
        let a = enumerate(w.as_slice(), 2);
        let b = enumerate(&raw, 2);
        for ((_, pa), (_, pb)) in a.iter().zip(&b) {
            assert!((pa - pb).abs() <= 1e-12 * pb);
        }
    }

    #[test]
    fn huge_gap_concentrates_away_from_bad_arm() {
        let w = stabilize(&[0.0, 1e6], 1.0).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            assert_eq!(sample_k_subset(&w, 1, &mut rng).unwrap(), vec![0]);
            assert_eq!(sample_k_subset(&w, 2, &mut rng).unwrap(), vec![0, 1]);
        }
        assert_eq!(marginal_inclusion(&w, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_weights_fill_uniformly() {
        // One usable arm, K = 2: arm 0 always in, the other slot uniform over 1..4.
        let w = stabilize(&[0.0, 1e9, 1e9, 1e9], 1.0).unwrap();
        assert!(!is_nondegenerate(&w, 2));
        let mut rng = rng_from_seed(9);
        let mut hits = [0usize; 4];
        let draws = 30_000;
        for _ in 0..draws {
            let s = sample_k_subset(&w, 2, &mut rng).unwrap();
            assert_eq!(s.len(), 2);
            assert_eq!(s[0], 0);
            hits[s[1]] += 1;
        }
        for h in &hits[1..] {
            let f = *h as f64 / draws as f64;
            assert!((f - 1.0 / 3.0).abs() < 0.015);
        }
        let m = marginals(&w, 2).unwrap();
        assert_eq!(m[0], 1.0);
        for mi in &m[1..] {
            assert!((mi - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}
