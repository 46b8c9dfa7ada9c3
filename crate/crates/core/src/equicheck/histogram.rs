use std::collections::BTreeMap;

use serde::Serialize;

use crate::groups::{Element, GroupAction};

/// Outputs are rounded to this resolution before keying.
pub const KEY_RESOLUTION: f64 = 1e-9;

/// Canonical little-endian byte form of a point rounded to [`KEY_RESOLUTION`].
pub fn output_key(y: &[f64]) -> Vec<u8> {
    let mut key = Vec::with_capacity(8 * y.len());
    for &v in y {
        let q = (v / KEY_RESOLUTION).round() as i64;
        key.extend_from_slice(&q.to_le_bytes());
    }
    key
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct Bin {
    point: Vec<f64>,
    count: usize,
}

/// Finite-support histogram of samples from `P(Y | X = x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalConditional {
    condition: Vec<f64>,
    total: usize,
    #[serde(skip)]
    bins: BTreeMap<Vec<u8>, Bin>,
}

impl EmpiricalConditional {
    pub fn new(condition: Vec<f64>) -> Self {
        Self { condition, total: 0, bins: BTreeMap::new() }
    }

    pub fn from_samples(condition: Vec<f64>, samples: impl IntoIterator<Item = Vec<f64>>) -> Self {
        let mut h = Self::new(condition);
        for y in samples {
            h.add(y);
        }
        h
    }

    pub fn add(&mut self, y: Vec<f64>) {
        self.add_count(y, 1);
    }

    fn add_count(&mut self, y: Vec<f64>, count: usize) {
        self.total += count;
        self.bins.entry(output_key(&y)).or_insert(Bin { point: y, count: 0 }).count += count;
    }

    pub fn condition(&self) -> &[f64] {
        &self.condition
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.bins.len()
    }

    /// `(point, count)` pairs in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.bins.values().map(|b| (b.point.as_slice(), b.count))
    }

    pub fn probability(&self, y: &[f64]) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.bins.get(&output_key(y)).map_or(0.0, |b| b.count as f64 / self.total as f64)
    }

    /// Relabels every output by `g·y` (and the condition by `g_in·x`).
    pub fn pushforward(&self, g: Element, action_in: &dyn GroupAction, action_out: &dyn GroupAction) -> Self {
        let mut out = Self::new(action_in.apply(g, &self.condition));
        for bin in self.bins.values() {
            out.add_count(action_out.apply(g, &bin.point), bin.count);
        }
        out
    }

    /// Union of two sample sets for the same condition.
    pub fn merge(&mut self, other: &Self) {
        for bin in other.bins.values() {
            self.add_count(bin.point.clone(), bin.count);
        }
    }

    /// `½ Σ_y |p(y) − q(y)|` between the two empirical laws.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let (na, nb) = (self.total.max(1) as f64, other.total.max(1) as f64);
        let mut sum = 0.0;
        for (key, bin) in &self.bins {
            let q = other.bins.get(key).map_or(0, |b| b.count) as f64 / nb;
            sum += (bin.count as f64 / na - q).abs();
        }
        for (key, bin) in &other.bins {
            if !self.bins.contains_key(key) {
                sum += bin.count as f64 / nb;
            }
        }
        0.5 * sum
    }

    /// Identical support and counts (conditions are not compared).
    pub fn same_bins(&self, other: &Self) -> bool {
        self.total == other.total
            && self.bins.len() == other.bins.len()
            && self.bins.iter().zip(&other.bins).all(|((ka, a), (kb, b))| ka == kb && a.count == b.count)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::groups::{make_cyclic, PermutationAction};

    #[test]
    fn keys_absorb_ulp_noise() {
        assert_eq!(output_key(&[0.3]), output_key(&[0.1 + 0.2]));
        assert_ne!(output_key(&[0.3]), output_key(&[0.3 + 1e-8]));
    }

    #[test]
    fn tv_of_disjoint_and_equal() {
        let a = EmpiricalConditional::from_samples(vec![], [vec![0.0], vec![0.0]]);
        let b = EmpiricalConditional::from_samples(vec![], [vec![1.0]]);
        assert_eq!(a.tv_distance(&b), 1.0);
        assert_eq!(a.tv_distance(&a), 0.0);
    }

    #[test]
    fn pushforward_composes() {
        let act = PermutationAction::natural(Arc::new(make_cyclic(3).unwrap()));
        let h = EmpiricalConditional::from_samples(
            vec![1.0, 2.0, 3.0],
            [vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 5.0, 0.0]],
        );
        let g = Element(1);
        let k = Element(2);
        let twice = h.pushforward(g, &act, &act).pushforward(k, &act, &act);
        let once = h.pushforward(act.group().compose(k, g), &act, &act);
        assert!(twice.same_bins(&once));
        assert_eq!(twice.condition(), once.condition());
    }
}
