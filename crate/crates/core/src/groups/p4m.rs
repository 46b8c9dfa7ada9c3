//! The wallpaper group p4m on an `L × L` torus.
//!
//! Sites are row-major, `index = y * L + x`, origin top-left, with wraparound.
//! An element is a pair (translation `t`, point operation `r`) acting as
//! `p ↦ r(p) + t`, where `r = R^k F^f` for the counterclockwise quarter turn
//! `R(x, y) = (-y, x)` and the axis reflection `F(x, y) = (x, -y)`; the point
//! group fixes site `(0, 0)`.

use std::sync::Arc;

use serde::Serialize;

use super::{Element, FiniteGroup, PermutationAction, Subgroup};
use crate::error::{Error, Result};

pub const MAX_SIDE: usize = 16;

/// Debug label of a p4m element: `p ↦ R^rotation F^reflect (p) + (tx, ty)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct P4mLabel {
    pub tx: usize,
    pub ty: usize,
    pub rotation: u8,
    pub reflect: bool,
}

impl P4mLabel {
    /// Point operation applied to integer coordinates (not reduced).
    pub fn point(&self, x: i64, y: i64) -> (i64, i64) {
        let (mut x, mut y) = (x, y);
        if self.reflect {
            y = -y;
        }
        for _ in 0..self.rotation {
            (x, y) = (-y, x);
        }
        (x, y)
    }

    /// Quarter or three-quarter turns and the diagonal reflections exchange
    /// the lattice axes.
    pub fn swaps_axes(&self) -> bool {
        self.rotation % 2 == 1
    }
}

#[derive(Clone, Debug)]
pub struct P4m {
    group: Arc<FiniteGroup>,
    labels: Vec<P4mLabel>,
    side: usize,
}

/// p4m(L) with elements deduplicated by their site permutation, so the stored
/// action on sites is faithful.
pub fn make_p4m(side: usize) -> Result<P4m> {
    if side == 0 || side % 2 == 1 {
        return Err(Error::InvalidParameter(format!("p4m lattice side must be even and positive, got {side}")));
    }
    if side > MAX_SIDE {
        return Err(Error::TooLarge { what: format!("p4m({side})"), limit: MAX_SIDE });
    }
    let l = side as i64;
    let mut perms = Vec::new();
    let mut labels = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for r in 0..8u8 {
        for ty in 0..side {
            for tx in 0..side {
                let label = P4mLabel { tx, ty, rotation: r % 4, reflect: r >= 4 };
                let perm: Vec<u32> = (0..side * side)
                    .map(|p| {
                        let (x, y) = label.point((p % side) as i64, (p / side) as i64);
                        let nx = (x + tx as i64).rem_euclid(l);
                        let ny = (y + ty as i64).rem_euclid(l);
                        (ny * l + nx) as u32
                    })
                    .collect();
                if seen.insert(perm.clone()) {
                    perms.push(perm);
                    labels.push(label);
                }
            }
        }
    }
    let group = Arc::new(FiniteGroup::assemble(format!("p4m({side})"), perms)?);
    Ok(P4m { group, labels, side })
}

impl P4m {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn label(&self, g: Element) -> P4mLabel {
        self.labels[g.index()]
    }

    pub fn find(&self, label: P4mLabel) -> Option<Element> {
        self.labels.iter().position(|&l| l == label).map(|k| Element(k as u32))
    }

    /// Counterclockwise quarter turn about site (0, 0).
    pub fn rotation90(&self) -> Element {
        self.find(P4mLabel { tx: 0, ty: 0, rotation: 1, reflect: false }).expect("quarter turn present")
    }

    pub fn translation(&self, tx: usize, ty: usize) -> Element {
        self.find(P4mLabel { tx: tx % self.side, ty: ty % self.side, rotation: 0, reflect: false })
            .expect("translation present")
    }

    pub fn site_action(&self) -> PermutationAction {
        PermutationAction::natural(self.group.clone())
    }

    /// The subgroup pmm: translations, axis reflections and half turns.
    pub fn pmm(&self) -> Subgroup {
        let members = self.group.elements().filter(|&g| !self.label(g).swaps_axes());
        Subgroup::new(self.group.clone(), members).expect("pmm is a subgroup")
    }

    /// Action on `2L × 2L` images (`channels` channel-major planes, pixel
    /// index `v * 2L + u`): pixel `(u, v) ↦ r(u, v) + 2t`. Lattice sites sit at
    /// even pixel coordinates. Needs `L ≥ 4`; at `L = 2` distinct pixel maps
    /// share a site permutation and the deduplicated group cannot carry them.
    pub fn pixel_action(&self, channels: usize) -> Result<PermutationAction> {
        if self.side < 4 {
            return Err(Error::InvalidParameter("pixel action needs L >= 4".into()));
        }
        let w = 2 * self.side as i64;
        let perms = self
            .labels
            .iter()
            .map(|label| {
                (0..(w * w))
                    .map(|p| {
                        let (u, v) = label.point(p % w, p / w);
                        let nu = (u + 2 * label.tx as i64).rem_euclid(w);
                        let nv = (v + 2 * label.ty as i64).rem_euclid(w);
                        (nv * w + nu) as u32
                    })
                    .collect()
            })
            .collect();
        Ok(PermutationAction::with_site_perms(self.group.clone(), perms)?.with_channels(channels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupAction;

    #[test]
    fn order_at_four() {
        let p = make_p4m(4).unwrap();
        assert_eq!(p.group().order(), 128);
        assert!(p.group().check_axioms().is_ok());
    }

    #[test]
    fn odd_side_rejected() {
        assert!(make_p4m(3).is_err());
        assert!(make_p4m(18).is_err());
    }

    #[test]
    fn small_torus_collapses() {
        let p = make_p4m(2).unwrap();
        assert!(p.group().order() < 32);
        assert!(p.site_action().is_faithful());
    }

    #[test]
    fn quarter_turn_has_order_four() {
        let p = make_p4m(4).unwrap();
        let r = p.rotation90();
        assert_eq!(p.group().element_order(r), 4);
        let act = p.site_action();
        let x: Vec<f64> = (0..16).map(f64::from).collect();
        let mut y = x.clone();
        for _ in 0..4 {
            y = act.apply(r, &y);
        }
        assert_eq!(x, y);
    }

    #[test]
    fn pmm_has_half_the_elements() {
        let p = make_p4m(4).unwrap();
        assert_eq!(p.pmm().order(), 64);
    }

    #[test]
    fn pixel_action_is_a_homomorphism() {
        let p = make_p4m(4).unwrap();
        let act = p.pixel_action(1).unwrap();
        act.check_homomorphism().unwrap();
        assert!(act.is_faithful());
    }
}
