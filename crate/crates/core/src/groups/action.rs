use std::sync::Arc;

use super::{Element, FiniteGroup};
use crate::error::{Error, Result};

/// A left action of a finite group on real vectors of fixed length.
pub trait GroupAction: Send + Sync {
    fn group(&self) -> &Arc<FiniteGroup>;

    /// Length of the vectors acted on.
    fn dim(&self) -> usize;

    fn apply(&self, g: Element, x: &[f64]) -> Vec<f64>;

    fn apply_inverse(&self, g: Element, x: &[f64]) -> Vec<f64> {
        self.apply(self.group().inverse(g), x)
    }

    fn kind(&self) -> ActionKind;
}

/// Shape of the space an action works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ActionKind {
    /// `channels` stacked copies of a permuted site set.
    Permutation { sites: usize, channels: usize },
    /// Matrix action on each of `columns` column vectors of length `rows`.
    Linear { rows: usize, columns: usize },
}

/// Site permutation applied identically to each of `channels` channel-major
/// blocks: `(g·x)[c][π_g(i)] = x[c][i]`.
#[derive(Clone, Debug)]
pub struct PermutationAction {
    group: Arc<FiniteGroup>,
    site_perms: Arc<Vec<Vec<u32>>>,
    sites: usize,
    channels: usize,
}

impl PermutationAction {
    /// The group's own permutation representation.
    pub fn natural(group: Arc<FiniteGroup>) -> Self {
        let site_perms = group.elements().map(|g| group.perm(g).to_vec()).collect();
        let sites = group.degree();
        Self { group, site_perms: Arc::new(site_perms), sites, channels: 1 }
    }

    /// An action through explicitly given site permutations, one per element.
    /// The identity must act trivially; the homomorphism law is the caller's
    /// responsibility (see [`PermutationAction::check_homomorphism`]).
    pub fn with_site_perms(group: Arc<FiniteGroup>, site_perms: Vec<Vec<u32>>) -> Result<Self> {
        if site_perms.len() != group.order() {
            return Err(Error::DimensionMismatch { expected: group.order(), actual: site_perms.len() });
        }
        let sites = site_perms[0].len();
        if site_perms.iter().any(|p| p.len() != sites) {
            return Err(Error::InvalidPermutation(sites));
        }
        if site_perms[0].iter().enumerate().any(|(i, &j)| i as u32 != j) {
            return Err(Error::InvalidParameter("identity must act trivially".into()));
        }
        Ok(Self { group, site_perms: Arc::new(site_perms), sites, channels: 1 })
    }

    /// Same site permutation on `channels` stacked copies of the site set.
    pub fn with_channels(&self, channels: usize) -> Self {
        Self { channels: channels.max(1), ..self.clone() }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn site_perm(&self, g: Element) -> &[u32] {
        &self.site_perms[g.index()]
    }

    pub fn check_homomorphism(&self) -> std::result::Result<(), String> {
        let group = &self.group;
        for a in group.elements() {
            for b in group.elements() {
                let ab = group.compose(a, b);
                let lhs = super::compose_perms(self.site_perm(a), self.site_perm(b));
                if lhs != self.site_perm(ab) {
                    return Err(format!("action of {a}·{b} differs from composed actions"));
                }
            }
        }
        Ok(())
    }

    pub fn is_faithful(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.site_perms.iter().all(|p| seen.insert(p.clone()))
    }
}

impl GroupAction for PermutationAction {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn dim(&self) -> usize {
        self.sites * self.channels
    }

    fn kind(&self) -> ActionKind {
        ActionKind::Permutation { sites: self.sites, channels: self.channels }
    }

    fn apply(&self, g: Element, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "point has wrong dimension for this action");
        let perm = self.site_perm(g);
        let mut out = vec![0.0; x.len()];
        for c in 0..self.channels {
            let base = c * self.sites;
            for (i, &j) in perm.iter().enumerate() {
                out[base + j as usize] = x[base + i];
            }
        }
        out
    }
}

/// Matrices `M_g` (row-major, `d × d`) acting on each column of a `d × k`
/// point stored column-major (`k = columns`).
#[derive(Clone, Debug)]
pub struct LinearAction {
    group: Arc<FiniteGroup>,
    matrices: Arc<Vec<Vec<f64>>>,
    d: usize,
    columns: usize,
}

impl LinearAction {
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<Vec<f64>>, d: usize) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::DimensionMismatch { expected: group.order(), actual: matrices.len() });
        }
        if let Some(m) = matrices.iter().find(|m| m.len() != d * d) {
            return Err(Error::DimensionMismatch { expected: d * d, actual: m.len() });
        }
        Ok(Self { group, matrices: Arc::new(matrices), d, columns: 1 })
    }

    /// ℤ₂ acting on `ℝ^d` by `x ↦ -x`.
    pub fn sign_flip(group: Arc<FiniteGroup>, d: usize) -> Result<Self> {
        if group.order() != 2 {
            return Err(Error::InvalidParameter("sign action needs a group of order 2".into()));
        }
        let mut id = vec![0.0; d * d];
        let mut neg = vec![0.0; d * d];
        for i in 0..d {
            id[i * d + i] = 1.0;
            neg[i * d + i] = -1.0;
        }
        Self::new(group, vec![id, neg], d)
    }

    pub fn with_columns(&self, columns: usize) -> Self {
        Self { columns: columns.max(1), ..self.clone() }
    }

    pub fn matrix(&self, g: Element) -> &[f64] {
        &self.matrices[g.index()]
    }

    pub fn rows(&self) -> usize {
        self.d
    }

    pub fn columns(&self) -> usize {
        self.columns
    }
}

impl GroupAction for LinearAction {
    fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    fn dim(&self) -> usize {
        self.d * self.columns
    }

    fn kind(&self) -> ActionKind {
        ActionKind::Linear { rows: self.d, columns: self.columns }
    }

    fn apply(&self, g: Element, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "point has wrong dimension for this action");
        let m = self.matrix(g);
        let d = self.d;
        let mut out = vec![0.0; x.len()];
        for col in 0..self.columns {
            let v = &x[col * d..(col + 1) * d];
            for r in 0..d {
                out[col * d + r] = (0..d).map(|c| m[r * d + c] * v[c]).sum();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_cyclic, make_signed_permutations};

    #[test]
    fn right_rotation_convention() {
        let c3 = Arc::new(make_cyclic(3).unwrap());
        let act = PermutationAction::natural(c3);
        assert_eq!(act.apply(Element(1), &[1.0, 2.0, 3.0]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn channels_share_the_site_permutation() {
        let c3 = Arc::new(make_cyclic(3).unwrap());
        let act = PermutationAction::natural(c3).with_channels(2);
        let x = [1.0, 2.0, 3.0, 10.0, 20.0, 30.0];
        assert_eq!(act.apply(Element(1), &x), vec![3.0, 1.0, 2.0, 30.0, 10.0, 20.0]);
    }

    #[test]
    fn linear_action_is_a_homomorphism() {
        let (b2, act) = make_signed_permutations(2).unwrap();
        let x = [0.3, -1.7];
        for a in b2.elements() {
            for b in b2.elements() {
                let lhs = act.apply(a, &act.apply(b, &x));
                let rhs = act.apply(b2.compose(a, b), &x);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn with_site_perms_requires_trivial_identity() {
        let c2 = Arc::new(make_cyclic(2).unwrap());
        let res = PermutationAction::with_site_perms(c2, vec![vec![1, 0], vec![0, 1]]);
        assert!(res.is_err());
    }
}
