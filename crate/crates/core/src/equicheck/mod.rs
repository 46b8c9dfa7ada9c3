//! Verification engines: Curie's principle, distributional equivariance,
//! inversion-kernel entropy, Reynolds projections and the generalization gap
//! identity.

mod gap;
mod histogram;
mod numeric;
mod report;
mod reynolds;

pub use gap::{generalization_gap, GapReport, GapSetup};
pub use histogram::{output_key, EmpiricalConditional, KEY_RESOLUTION};
pub use numeric::{exact_sum, symmetric_mean};
pub use report::{CheckRecord, Report};
pub use reynolds::{
    is_equivariant_kernel, is_equivariant_table, reynolds_average, reynolds_project, reynolds_project_kernel,
    KernelTable, TabulatedFunction,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::CanonResult;
use crate::error::{Error, Result};
use crate::groups::{stabilizer, Element, FiniteGroup, GroupAction, Subgroup};
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurieReport {
    pub holds: bool,
    /// A stabilizer element of `x` that moves `f(x)`.
    pub witness: Option<Element>,
    pub input_stabilizer: usize,
    pub output_stabilizer: usize,
}

/// Checks `G_x ⊆ G_{f(x)}`.
pub fn check_curie<F>(f: F, action_in: &dyn GroupAction, action_out: &dyn GroupAction, x: &[f64]) -> CurieReport
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let y = f(x);
    let gx = stabilizer(action_in, x);
    let gy = stabilizer(action_out, &y);
    let witness = gx.members().iter().copied().find(|&g| !gy.contains(g));
    CurieReport {
        holds: witness.is_none(),
        witness,
        input_stabilizer: gx.order(),
        output_stabilizer: gy.order(),
    }
}

/// Two-sample TV threshold `sqrt(2 ln(2K/α) / N)`.
pub fn tv_threshold(samples: usize, alpha: f64, tested: usize) -> f64 {
    (2.0 * (2.0 * tested.max(1) as f64 / alpha).ln() / samples as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementCheck {
    pub element: Element,
    pub tv: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub samples: usize,
    pub alpha: f64,
    pub threshold: f64,
    pub checks: Vec<ElementCheck>,
}

impl EquivarianceReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_tv(&self) -> f64 {
        self.checks.iter().map(|c| c.tv).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ElementCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Draws `samples` outputs at `x` and at every `gx`, and compares the law at
/// `gx` with the `g`-pushforward of the law at `x` in total variation.
///
/// Randomness comes from independent streams of `seed`: stream 0 for the
/// reference histogram, stream `1 + g` for the histogram at `gx`.
#[allow(clippy::too_many_arguments)]
pub fn test_distributional_equivariance<S>(
    sampler: S,
    action_in: &dyn GroupAction,
    action_out: &dyn GroupAction,
    x: &[f64],
    samples: usize,
    alpha: f64,
    elements: &[Element],
    seed: u64,
) -> Result<EquivarianceReport>
where
    S: Fn(&[f64], &mut Rng) -> Vec<f64> + Sync,
{
    if samples < 100 {
        return Err(Error::TooFewSamples(samples));
    }
    let draw = |point: &[f64], stream: u64| {
        let mut rng = rng::stream(seed, stream);
        EmpiricalConditional::from_samples(point.to_vec(), (0..samples).map(|_| sampler(point, &mut rng)))
    };
    let reference = draw(x, 0);
    let threshold = tv_threshold(samples, alpha, elements.len());
    let checks = elements
        .par_iter()
        .map(|&g| {
            let gx = action_in.apply(g, x);
            let observed = draw(&gx, 1 + g.0 as u64);
            let expected = reference.pushforward(g, action_in, action_out);
            let tv = observed.tv_distance(&expected);
            ElementCheck { element: g, tv, pass: tv <= threshold }
        })
        .collect();
    Ok(EquivarianceReport { samples, alpha, threshold, checks })
}

/// Shannon entropy in nats of a finite pmf.
pub fn entropy(pmf: &[f64]) -> f64 {
    -exact_sum(pmf.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()))
}

/// Entropy of the inversion kernel `Unif(G_x τ(x))`: `ln |argmin set|`.
pub fn kernel_entropy(result: &CanonResult) -> f64 {
    (result.argmin_set.len() as f64).ln()
}

/// `P(·|x)` on `G` (left-regular action) extends to an equivariant kernel on
/// the orbit of `x` iff it is invariant under left multiplication by `G_x`.
pub fn is_stabilizer_invariant(group: &FiniteGroup, stab: &Subgroup, pmf: &[f64]) -> bool {
    stab.members().iter().all(|&h| group.elements().all(|z| pmf[group.compose(h, z).index()] == pmf[z.index()]))
}

/// Every pmf on `G` with weights in `{0, 1/m, …, 1}` whose support passes the
/// `G_x`-invariance constraint, i.e. every rational-weight equivariant kernel
/// at a point with stabilizer `stab`.
pub fn enumerate_equivariant_kernels(group: &FiniteGroup, stab: &Subgroup, denominator: usize) -> Vec<Vec<f64>> {
    let n = group.order();
    let mut out = Vec::new();
    let mut counts = vec![0usize; n];
    compositions(&mut counts, 0, denominator, &mut |c| {
        let pmf: Vec<f64> = c.iter().map(|&k| k as f64 / denominator as f64).collect();
        if is_stabilizer_invariant(group, stab, &pmf) {
            out.push(pmf);
        }
    });
    out
}

fn compositions(counts: &mut [usize], pos: usize, remaining: usize, visit: &mut dyn FnMut(&[usize])) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[pos] = k;
        compositions(counts, pos + 1, remaining - k, visit);
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::groups::{make_cyclic, PermutationAction};

    fn c6() -> PermutationAction {
        PermutationAction::natural(Arc::new(make_cyclic(6).unwrap()))
    }

    #[test]
    fn equivariant_map_obeys_curie() {
        let act = c6();
        // cyclic convolution with a fixed kernel is shift-equivariant
        let f = |x: &[f64]| (0..6).map(|i| x[i] + 2.0 * x[(i + 5) % 6]).collect::<Vec<f64>>();
        let x = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let r = check_curie(f, &act, &act, &x);
        assert!(r.holds);
        assert_eq!(r.input_stabilizer, 3);
    }

    #[test]
    fn symmetry_breaking_map_violates_curie() {
        let act = c6();
        let v = [0.1, 0.5, 0.2, 0.9, 0.4, 0.7];
        let f = |x: &[f64]| x.iter().zip(&v).map(|(a, b)| a + b).collect::<Vec<f64>>();
        let r = check_curie(f, &act, &act, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert!(w != Element::IDENTITY && w.0 % 2 == 0);
    }

    #[test]
    fn trivial_stabilizer_is_vacuous() {
        let act = c6();
        let f = |x: &[f64]| vec![x[0]; 6];
        assert!(check_curie(f, &act, &act, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).holds);
    }

    #[test]
    fn entropy_values() {
        assert!((entropy(&[1.0 / 6.0; 6]) - 6f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn too_few_samples_rejected() {
        let act = c6();
        let err = test_distributional_equivariance(|x, _| x.to_vec(), &act, &act, &[0.0; 6], 50, 0.01, &[], 0);
        assert_eq!(err.unwrap_err(), Error::TooFewSamples(50));
    }

    #[test]
    fn kernel_enumeration_counts() {
        let c6 = Arc::new(make_cyclic(6).unwrap());
        let stab = Subgroup::new(c6.clone(), [Element(0), Element(2), Element(4)]).unwrap();
        // invariant pmfs are constant on the two cosets {0,2,4} and {1,3,5}:
        // weights (a, a, a, b, b, b) with 3a + 3b = 6 -> a in {0, 1, 2}
        let kernels = enumerate_equivariant_kernels(&c6, &stab, 6);
        assert_eq!(kernels.len(), 3);
        for k in &kernels {
            assert!(entropy(k) >= 3f64.ln() - 1e-12);
        }
    }
}
