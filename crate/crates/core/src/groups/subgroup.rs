use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use super::{Element, FiniteGroup, GroupAction};
use crate::error::{Error, Result};

/// A subset of a parent group closed under composition and inversion.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<Element>,
}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, members: impl IntoIterator<Item = Element>) -> Result<Self> {
        let set: BTreeSet<Element> = members.into_iter().collect();
        if let Some(g) = set.iter().find(|g| g.index() >= parent.order()) {
            return Err(Error::NotASubgroup(format!("{g} is not an element of {}", parent.name())));
        }
        if !set.contains(&Element::IDENTITY) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        for &a in &set {
            if !set.contains(&parent.inverse(a)) {
                return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &set {
                if !set.contains(&parent.compose(a, b)) {
                    return Err(Error::NotASubgroup(format!("{a}·{b} missing")));
                }
            }
        }
        Ok(Self { parent, members: set.into_iter().collect() })
    }

    pub fn trivial(parent: Arc<FiniteGroup>) -> Self {
        Self { parent, members: vec![Element::IDENTITY] }
    }

    pub fn whole(parent: Arc<FiniteGroup>) -> Self {
        let members = parent.elements().collect();
        Self { parent, members }
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    /// Members in increasing id order.
    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, g: Element) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, g: Element) -> Subgroup {
        let p = &self.parent;
        let ginv = p.inverse(g);
        let mut members: Vec<Element> =
            self.members.iter().map(|&h| p.compose(p.compose(g, h), ginv)).collect();
        members.sort_unstable();
        Subgroup { parent: p.clone(), members }
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.members == other.members
    }
}

/// `G_x = {g : gx = x}`, by exhaustive comparison.
pub fn stabilizer(action: &dyn GroupAction, x: &[f64]) -> Subgroup {
    let group = action.group();
    let members: Vec<Element> = group.elements().filter(|&g| action.apply(g, x) == x).collect();
    Subgroup { parent: action.group().clone(), members }
}

/// Distinct points of `{gx : g ∈ G}`, in order of first appearance.
pub fn orbit(action: &dyn GroupAction, x: &[f64]) -> Vec<Vec<f64>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in action.group().elements() {
        let y = action.apply(g, x);
        let key: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(y);
        }
    }
    out
}

/// `gH`, sorted by id.
pub fn left_coset(h: &Subgroup, g: Element) -> Vec<Element> {
    let p = h.parent();
    let mut out: Vec<Element> = h.members().iter().map(|&m| p.compose(g, m)).collect();
    out.sort_unstable();
    out
}

/// `Hg`, sorted by id.
pub fn right_coset(h: &Subgroup, g: Element) -> Vec<Element> {
    let p = h.parent();
    let mut out: Vec<Element> = h.members().iter().map(|&m| p.compose(m, g)).collect();
    out.sort_unstable();
    out
}
