//! Canonicalization and inversion kernels.
//!
//! A canonicalization picks `τ(x)` so that `γ(x) = τ(x)⁻¹x` is the same for
//! every point of an orbit. For a self-symmetric `x` every element of the
//! coset `G_x·τ(x)` does the job; the inversion kernel is the uniform law on
//! that coset. Minimizing an energy `E(g⁻¹x)` over the group produces the
//! coset directly as its argmin set, with no stabilizer computation needed.

use rand::Rng as _;
use serde::Serialize;

use crate::error::Result;
use crate::groups::{Element, FiniteGroup, GroupAction};
use crate::rng::{self, Rng};

/// Relative tolerance under which two energies are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub fn energies_tie(reference: f64, other: f64) -> bool {
    (reference - other).abs() <= TIE_TOLERANCE * reference.abs().max(1.0)
}

pub trait EnergyFunction: Send + Sync {
    fn evaluate(&self, x: &[f64]) -> f64;

    fn describe(&self) -> String;
}

/// `E(x) = w · x`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearEnergy {
    weights: Vec<f64>,
    seed: Option<u64>,
}

impl LinearEnergy {
    /// Coefficients drawn once from `Unif(0, 1)`.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let weights = (0..dim).map(|_| rng.random::<f64>()).collect();
        Self { weights, seed: Some(seed) }
    }

    pub fn from_weights(weights: Vec<f64>) -> Self {
        Self { weights, seed: None }
    }

    /// `ρ = [n, n-1, …, 1]`: minimized over `S_n` by ascending order.
    pub fn descending_ranks(n: usize) -> Self {
        Self::from_weights((0..n).map(|i| (n - i) as f64).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

impl EnergyFunction for LinearEnergy {
    fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.weights.len(), "energy dimension mismatch");
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    fn describe(&self) -> String {
        match self.seed {
            Some(s) => format!("linear(dim={}, seed={s})", self.weights.len()),
            None => format!("linear(dim={}, fixed)", self.weights.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonResult {
    /// Deterministic representative of the argmin set (smallest id).
    pub tau: Element,
    /// Orbit representative `τ⁻¹x`.
    pub gamma: Vec<f64>,
    /// The coset `G_x·τ(x)`, sorted by id.
    pub argmin_set: Vec<Element>,
    pub energy_value: f64,
}

impl CanonResult {
    pub fn orbit_representative(&self) -> &[f64] {
        &self.gamma
    }
}

pub fn orbit_representative(result: &CanonResult) -> &[f64] {
    &result.gamma
}

/// Exhaustive minimization of `E(g⁻¹x)` over the group.
pub fn energy_canonicalize(energy: &dyn EnergyFunction, action: &dyn GroupAction, x: &[f64]) -> CanonResult {
    let group = action.group();
    let energies: Vec<f64> = group
        .elements()
        .map(|g| energy.evaluate(&action.apply_inverse(g, x)))
        .collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin_set: Vec<Element> = group
        .elements()
        .zip(&energies)
        .filter(|(_, &e)| energies_tie(min, e))
        .map(|(g, _)| g)
        .collect();
    let tau = argmin_set[0];
    CanonResult { tau, gamma: action.apply_inverse(tau, x), argmin_set, energy_value: min }
}

/// One draw from `Unif(G_x·τ(x))`.
pub fn sample_inversion_kernel(result: &CanonResult, rng: &mut Rng) -> Element {
    let set = &result.argmin_set;
    if set.len() == 1 {
        return set[0];
    }
    set[rng.random_range(0..set.len())]
}

/// Anything that maps a point to its canonicalization over a fixed action.
pub trait Canonicalizer: Send + Sync {
    fn action(&self) -> &dyn GroupAction;

    fn canonicalize(&self, x: &[f64]) -> Result<CanonResult>;
}

/// Energy-based canonicalizer over an arbitrary finite-group action.
pub struct EnergyCanonicalizer<A> {
    energy: Box<dyn EnergyFunction>,
    action: A,
}

impl<A: GroupAction> EnergyCanonicalizer<A> {
    pub fn new(energy: impl EnergyFunction + 'static, action: A) -> Self {
        Self { energy: Box::new(energy), action }
    }

    /// Fixed random linear energy over the action's space.
    pub fn random_linear(action: A, seed: u64) -> Self {
        let energy = LinearEnergy::random(action.dim(), seed);
        Self::new(energy, action)
    }

    pub fn energy(&self) -> &dyn EnergyFunction {
        self.energy.as_ref()
    }
}

impl<A: GroupAction> Canonicalizer for EnergyCanonicalizer<A> {
    fn action(&self) -> &dyn GroupAction {
        &self.action
    }

    fn canonicalize(&self, x: &[f64]) -> Result<CanonResult> {
        if x.len() != self.action.dim() {
            return Err(crate::Error::DimensionMismatch { expected: self.action.dim(), actual: x.len() });
        }
        Ok(energy_canonicalize(self.energy.as_ref(), &self.action, x))
    }
}

/// A sampled sorting canonicalization over `S_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SortSample {
    /// `τ` as the image list of a permutation of `0..n`; `x = τγ`.
    pub tau: Vec<u32>,
    /// Ascending sort of the scores.
    pub gamma: Vec<f64>,
}

impl SortSample {
    pub fn element_in(&self, sym: &FiniteGroup) -> Option<Element> {
        sym.element_of(&self.tau)
    }
}

/// Sorts `scores` ascending, breaking ties with independent uniform keys so
/// that the sampled `τ` is uniform over all tie-compatible permutations.
pub fn sort_canonicalize(scores: &[f64], rng: &mut Rng) -> SortSample {
    let keys: Vec<f64> = (0..scores.len()).map(|_| rng.random::<f64>()).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(keys[a].total_cmp(&keys[b])));
    let gamma = order.iter().map(|&i| scores[i]).collect();
    SortSample { tau: order.into_iter().map(|i| i as u32).collect(), gamma }
}

/// The full sorting argmin set `{τ ∈ S_n : τ⁻¹x = sort(x)}` by enumeration.
/// `sym` must be `S_n` with `n = scores.len()`.
pub fn sort_argmin_set(scores: &[f64], sym: &FiniteGroup) -> Result<CanonResult> {
    if sym.degree() != scores.len() || sym.order() != factorial(scores.len()) {
        return Err(crate::Error::DimensionMismatch { expected: scores.len(), actual: sym.degree() });
    }
    let mut gamma = scores.to_vec();
    gamma.sort_by(f64::total_cmp);
    let argmin_set: Vec<Element> = sym
        .elements()
        .filter(|&g| {
            let p = sym.perm(g);
            // (τ⁻¹x)_i = x_{τ(i)}
            p.iter().zip(&gamma).all(|(&j, &v)| scores[j as usize] == v)
        })
        .collect();
    let energy = LinearEnergy::descending_ranks(scores.len()).evaluate(&gamma);
    Ok(CanonResult { tau: argmin_set[0], gamma, argmin_set, energy_value: energy })
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::groups::{make_cyclic, make_symmetric, stabilizer, PermutationAction};

    fn c6() -> PermutationAction {
        PermutationAction::natural(Arc::new(make_cyclic(6).unwrap()))
    }

    #[test]
    fn period_two_ring_has_three_minimizers() {
        let act = c6();
        let energy = LinearEnergy::from_weights(vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.0]);
        let x = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let res = energy_canonicalize(&energy, &act, &x);
        assert_eq!(res.argmin_set.len(), 3);
        assert_eq!(res.argmin_set.len(), stabilizer(&act, &x).order());
        for &g in &res.argmin_set {
            assert_eq!(act.apply_inverse(g, &x), res.gamma);
        }
    }

    #[test]
    fn constant_input_ties_everywhere() {
        let act = c6();
        let energy = LinearEnergy::random(6, 3);
        let res = energy_canonicalize(&energy, &act, &[2.0; 6]);
        assert_eq!(res.argmin_set.len(), 6);
        assert_eq!(res.tau, Element::IDENTITY);
        assert_eq!(res.gamma, vec![2.0; 6]);
    }

    #[test]
    fn generic_input_has_unique_minimizer() {
        let act = c6();
        let energy = LinearEnergy::random(6, 11);
        let x = [0.1, 0.7, 0.3, 0.9, 0.2, 0.5];
        let res = energy_canonicalize(&energy, &act, &x);
        assert_eq!(res.argmin_set.len(), 1);
        let mut rng = rng::seeded(0);
        for _ in 0..10 {
            assert_eq!(sample_inversion_kernel(&res, &mut rng), res.tau);
        }
    }

    #[test]
    fn sort_example() {
        let mut rng = rng::seeded(1);
        let s = sort_canonicalize(&[3.0, 1.0, 2.0], &mut rng);
        assert_eq!(s.gamma, vec![1.0, 2.0, 3.0]);
        let s3 = make_symmetric(3).unwrap();
        let act = PermutationAction::natural(Arc::new(s3));
        let tau = s.element_in(act.group()).unwrap();
        assert_eq!(act.apply(tau, &s.gamma), vec![3.0, 1.0, 2.0]);
        let full = sort_argmin_set(&[3.0, 1.0, 2.0], act.group()).unwrap();
        assert_eq!(full.argmin_set, vec![tau]);
    }

    #[test]
    fn sorted_input_gives_identity() {
        let mut rng = rng::seeded(2);
        let s = sort_canonicalize(&[0.5, 1.5, 2.5, 9.0], &mut rng);
        assert_eq!(s.tau, vec![0, 1, 2, 3]);
    }

    #[test]
    fn tie_tolerance_is_relative() {
        assert!(energies_tie(1e6, 1e6 + 1e-7));
        assert!(!energies_tie(1e6, 1e6 + 1e-5));
        assert!(energies_tie(0.0, 1e-13));
        assert!(!energies_tie(0.0, 1e-11));
    }
}
