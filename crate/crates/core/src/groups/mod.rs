//! Fully materialized finite groups, their actions, and derived structure.
//!
//! Every group in this crate is stored as a faithful permutation
//! representation: element `k` is the permutation `perm(k)` of
//! `0..degree`. Composition follows function composition,
//! `compose(a, b) = a ∘ b` (apply `b` first), and element `0` is always the
//! identity.

mod action;
mod constructors;
mod p4m;
mod subgroup;

pub use action::{ActionKind, GroupAction, LinearAction, PermutationAction};
pub use constructors::{
    make_cyclic, make_dihedral, make_signed_permutations, make_symmetric, MAX_SYMMETRIC_DEGREE,
};
pub use p4m::{make_p4m, P4m, P4mLabel};
pub use subgroup::{left_coset, orbit, right_coset, stabilizer, Subgroup};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense element identifier inside one [`FiniteGroup`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element(pub u32);

impl Element {
    pub const IDENTITY: Element = Element(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// Above this many `order² · degree` operations the full Cayley table is not
/// built and products are resolved through the permutation lookup instead.
const TABLE_BUDGET: usize = 1 << 26;

pub struct FiniteGroup {
    name: String,
    degree: usize,
    perms: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, u32>,
    inverse: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order())
            .field("degree", &self.degree)
            .finish()
    }
}

pub(crate) fn compose_perms(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub(crate) fn invert_perm(a: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; a.len()];
    for (i, &j) in a.iter().enumerate() {
        inv[j as usize] = i as u32;
    }
    inv
}

fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    for &j in p {
        let j = j as usize;
        if j >= p.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

impl FiniteGroup {
    /// Builds a group from a set of permutations that must already be closed
    /// under composition. Duplicates are dropped (first occurrence wins); the
    /// identity is moved to position 0 if it is not already there.
    pub fn from_permutations(name: impl Into<String>, perms: Vec<Vec<u32>>) -> Result<Self> {
        let group = Self::assemble(name.into(), perms)?;
        if group.table.is_none() {
            for a in 0..group.order() {
                for b in 0..group.order() {
                    let p = compose_perms(&group.perms[a], &group.perms[b]);
                    if !group.lookup.contains_key(&p) {
                        return Err(Error::NotClosed);
                    }
                }
            }
        }
        Ok(group)
    }

    /// Closure of `generators` under composition, breadth first from the
    /// identity; element ids follow discovery order.
    pub fn generate(name: impl Into<String>, degree: usize, generators: &[Vec<u32>]) -> Result<Self> {
        for g in generators {
            if g.len() != degree || !is_permutation(g) {
                return Err(Error::InvalidPermutation(degree));
            }
        }
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        let mut perms = vec![identity.clone()];
        seen.insert(identity, ());
        let mut head = 0;
        while head < perms.len() {
            let current = perms[head].clone();
            head += 1;
            for g in generators {
                let next = compose_perms(g, &current);
                if seen.insert(next.clone(), ()).is_none() {
                    perms.push(next);
                }
            }
        }
        Self::assemble(name.into(), perms)
    }

    pub(crate) fn assemble(name: String, perms: Vec<Vec<u32>>) -> Result<Self> {
        let degree = perms.first().map_or(0, Vec::len);
        if perms.is_empty() {
            return Err(Error::InvalidParameter("empty element set".into()));
        }
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut ordered = Vec::with_capacity(perms.len());
        let mut lookup = HashMap::with_capacity(perms.len());
        lookup.insert(identity.clone(), 0u32);
        ordered.push(identity);
        for p in perms {
            if p.len() != degree || !is_permutation(&p) {
                return Err(Error::InvalidPermutation(degree));
            }
            if !lookup.contains_key(&p) {
                lookup.insert(p.clone(), ordered.len() as u32);
                ordered.push(p);
            }
        }

        let order = ordered.len();
        let mut inverse = Vec::with_capacity(order);
        for p in &ordered {
            match lookup.get(&invert_perm(p)) {
                Some(&k) => inverse.push(k),
                None => return Err(Error::NotClosed),
            }
        }

        let table = if order.saturating_mul(order).saturating_mul(degree.max(1)) <= TABLE_BUDGET {
            let mut t = Vec::with_capacity(order * order);
            for a in &ordered {
                for b in &ordered {
                    match lookup.get(&compose_perms(a, b)) {
                        Some(&k) => t.push(k),
                        None => return Err(Error::NotClosed),
                    }
                }
            }
            Some(t)
        } else {
            None
        };

        Ok(Self { name, degree, perms: ordered, lookup, inverse, table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    /// Number of points the stored permutation representation acts on.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = Element> + Clone {
        (0..self.order() as u32).map(Element)
    }

    pub fn perm(&self, g: Element) -> &[u32] {
        &self.perms[g.index()]
    }

    pub fn element_of(&self, perm: &[u32]) -> Option<Element> {
        self.lookup.get(perm).map(|&k| Element(k))
    }

    pub fn compose(&self, a: Element, b: Element) -> Element {
        match &self.table {
            Some(t) => Element(t[a.index() * self.order() + b.index()]),
            None => {
                let p = compose_perms(self.perm(a), self.perm(b));
                Element(self.lookup[&p])
            }
        }
    }

    pub fn inverse(&self, g: Element) -> Element {
        Element(self.inverse[g.index()])
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// Smallest `k ≥ 1` with `g^k = e`.
    pub fn element_order(&self, g: Element) -> usize {
        let mut k = 1;
        let mut power = g;
        while power != Element::IDENTITY {
            power = self.compose(g, power);
            k += 1;
        }
        k
    }

    /// Exhaustive check of closure, associativity, identity and inverse laws.
    /// Returns a description of the first violation.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        let e = self.identity();
        for a in self.elements() {
            if self.compose(a, e) != a || self.compose(e, a) != a {
                return Err(format!("identity law fails at {a}"));
            }
            let inv = self.inverse(a);
            if self.compose(a, inv) != e || self.compose(inv, a) != e {
                return Err(format!("inverse law fails at {a}"));
            }
        }
        for a in self.elements() {
            for b in self.elements() {
                let ab = self.compose(a, b);
                if ab.index() >= self.order() {
                    return Err(format!("closure fails at ({a}, {b})"));
                }
                for c in self.elements() {
                    if self.compose(ab, c) != self.compose(a, self.compose(b, c)) {
                        return Err(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_matches_explicit_closure() {
        let shift: Vec<u32> = vec![1, 2, 3, 0];
        let g = FiniteGroup::generate("C4", 4, &[shift]).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.check_axioms().is_ok());
    }

    #[test]
    fn from_permutations_rejects_open_sets() {
        let perms = vec![vec![0, 1, 2], vec![1, 2, 0]];
        assert_eq!(FiniteGroup::from_permutations("bad", perms).unwrap_err(), Error::NotClosed);
    }

    #[test]
    fn rejects_non_permutations() {
        let perms = vec![vec![0, 0, 2]];
        assert!(matches!(
            FiniteGroup::from_permutations("bad", perms),
            Err(Error::InvalidPermutation(3))
        ));
    }

    #[test]
    fn table_free_groups_compose_through_lookup() {
        let s8 = make_symmetric(8).unwrap();
        assert!(!s8.has_table());
        let a = Element(12345);
        let b = Element(40000);
        let ab = s8.compose(a, b);
        assert_eq!(s8.perm(ab), compose_perms(s8.perm(a), s8.perm(b)).as_slice());
        assert_eq!(s8.compose(a, s8.inverse(a)), Element::IDENTITY);
    }
}
