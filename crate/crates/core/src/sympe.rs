//! Symmetry-breaking positional encodings.
//!
//! A sampled group element `g̃` is fed to an equivariant network through a
//! vector `v` on which the group acts freely: the network sees `x ⊕ g̃v`.
//! Because `g ↦ gv` is injective, `g̃v` identifies `g̃` completely, and because
//! `(x, g) ↦ x ⊕ gv` is jointly equivariant, so is the composed model.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::canon::{sample_inversion_kernel, Canonicalizer};
use crate::error::{Error, Result};
use crate::groups::{stabilizer, ActionKind, Element, GroupAction};
use crate::rng::Rng;

/// Redraws allowed after the first draw before giving up.
pub const MAX_REDRAWS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymPEVector {
    pub values: Vec<f64>,
    pub representation: ActionKind,
    /// Number of rejected draws before this one.
    pub redraws: usize,
}

/// `gv ≠ v` for every non-identity `g` (exhaustive).
pub fn acts_freely(action: &dyn GroupAction, v: &[f64]) -> bool {
    action.group().elements().skip(1).all(|g| action.apply(g, v) != v)
}

/// Draws `v` with iid `Unif(0, 1)` entries until the action on it is free.
pub fn make_breaking_vector(action: &dyn GroupAction, rng: &mut Rng) -> Result<SymPEVector> {
    let dim = action.dim();
    make_breaking_vector_with(action, || (0..dim).map(|_| rng.random::<f64>()).collect())
}

/// [`make_breaking_vector`] with a caller-supplied sampler.
pub fn make_breaking_vector_with(
    action: &dyn GroupAction,
    mut draw: impl FnMut() -> Vec<f64>,
) -> Result<SymPEVector> {
    for redraws in 0..=MAX_REDRAWS {
        let values = draw();
        if values.len() != action.dim() {
            return Err(Error::DimensionMismatch { expected: action.dim(), actual: values.len() });
        }
        if acts_freely(action, &values) {
            return Ok(SymPEVector { values, representation: action.kind(), redraws });
        }
    }
    Err(Error::NotFree(MAX_REDRAWS + 1))
}

/// The unique `g` with `gv = u`, if any.
pub fn decode_element(action: &dyn GroupAction, v: &[f64], u: &[f64]) -> Option<Element> {
    let mut hits = action.group().elements().filter(|&g| action.apply(g, v) == u);
    let first = hits.next()?;
    match hits.next() {
        None => Some(first),
        Some(_) => None,
    }
}

/// `x ⊕ g̃v`, stored as separate channels over a common site set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncodedInput {
    pub base: Vec<f64>,
    pub encoding: Vec<f64>,
}

impl EncodedInput {
    /// Channel-major concatenation `[base…, encoding…]`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.base.len() + self.encoding.len());
        out.extend_from_slice(&self.base);
        out.extend_from_slice(&self.encoding);
        out
    }

    /// Inverse of [`EncodedInput::flatten`].
    pub fn split(flat: &[f64], encoding_len: usize) -> Result<Self> {
        if encoding_len > flat.len() {
            return Err(Error::DimensionMismatch { expected: encoding_len, actual: flat.len() });
        }
        let (base, encoding) = flat.split_at(flat.len() - encoding_len);
        Ok(Self { base: base.to_vec(), encoding: encoding.to_vec() })
    }

    pub fn base_channels(&self) -> usize {
        if self.encoding.is_empty() { 0 } else { self.base.len() / self.encoding.len() }
    }
}

pub fn encode(x: &[f64], g_tilde: Element, v: &SymPEVector, v_action: &dyn GroupAction) -> Result<EncodedInput> {
    if v.values.len() != v_action.dim() {
        return Err(Error::DimensionMismatch { expected: v_action.dim(), actual: v.values.len() });
    }
    if x.is_empty() || !x.len().is_multiple_of(v.values.len()) {
        return Err(Error::DimensionMismatch { expected: v.values.len(), actual: x.len() });
    }
    Ok(EncodedInput { base: x.to_vec(), encoding: v_action.apply(g_tilde, &v.values) })
}

/// One sample of `f₀(x ⊕ g̃v)` with `g̃` drawn from the canonicalizer's
/// inversion kernel.
pub fn sympe_forward<F>(
    f0: F,
    x: &[f64],
    canonicalizer: &dyn Canonicalizer,
    v: &SymPEVector,
    v_action: &dyn GroupAction,
    rng: &mut Rng,
) -> Result<Vec<f64>>
where
    F: Fn(&EncodedInput) -> Vec<f64>,
{
    let canon = canonicalizer.canonicalize(x)?;
    let g_tilde = sample_inversion_kernel(&canon, rng);
    Ok(f0(&encode(x, g_tilde, v, v_action)?))
}

/// `x ⊕ z` with `z` iid standard normal over `sites` sites, independent of x.
pub fn noise_inject(x: &[f64], sites: usize, rng: &mut Rng) -> Result<EncodedInput> {
    if sites == 0 || !x.len().is_multiple_of(sites) {
        return Err(Error::DimensionMismatch { expected: sites, actual: x.len() });
    }
    let encoding = (0..sites).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(EncodedInput { base: x.to_vec(), encoding })
}

/// Relaxed-equivariant sampling: `Y = g_X · τ(x) · φ(γ(x))` with
/// `g_X ~ Unif(G_x)`.
pub fn relaxed_forward<F>(
    phi: F,
    x: &[f64],
    canonicalizer: &dyn Canonicalizer,
    out_action: &dyn GroupAction,
    rng: &mut Rng,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let canon = canonicalizer.canonicalize(x)?;
    let fx = out_action.apply(canon.tau, &phi(&canon.gamma));
    let stab = stabilizer(canonicalizer.action(), x);
    let g = stab.members()[rng.random_range(0..stab.order())];
    Ok(out_action.apply(g, &fx))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::canon::EnergyCanonicalizer;
    use crate::groups::{make_cyclic, make_signed_permutations, PermutationAction};
    use crate::rng;

    fn c6() -> PermutationAction {
        PermutationAction::natural(Arc::new(make_cyclic(6).unwrap()))
    }

    #[test]
    fn random_vector_is_free_under_c6() {
        let act = c6();
        let v = make_breaking_vector(&act, &mut rng::seeded(4)).unwrap();
        assert_eq!(v.redraws, 0);
        assert!(acts_freely(&act, &v.values));
    }

    #[test]
    fn constant_draw_is_redrawn() {
        let act = c6();
        let mut calls = 0;
        let v = make_breaking_vector_with(&act, || {
            calls += 1;
            if calls == 1 { vec![0.5; 6] } else { vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6] }
        })
        .unwrap();
        assert_eq!(v.redraws, 1);
    }

    #[test]
    fn unfaithful_action_gives_up() {
        // C2 acting trivially on one site can never act freely.
        let c2 = Arc::new(make_cyclic(2).unwrap());
        let act = PermutationAction::with_site_perms(c2, vec![vec![0], vec![0]]).unwrap();
        let err = make_breaking_vector(&act, &mut rng::seeded(0)).unwrap_err();
        assert_eq!(err, Error::NotFree(MAX_REDRAWS + 1));
    }

    #[test]
    fn random_matrix_breaks_signed_permutations() {
        let (_, act) = make_signed_permutations(2).unwrap();
        let act = act.with_columns(2);
        let v = make_breaking_vector(&act, &mut rng::seeded(9)).unwrap();
        assert!(matches!(v.representation, ActionKind::Linear { rows: 2, columns: 2 }));
        assert!(crate::groups::stabilizer(&act, &v.values).is_trivial());
    }

    #[test]
    fn identity_element_encodes_v_itself() {
        let act = c6();
        let v = make_breaking_vector(&act, &mut rng::seeded(5)).unwrap();
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let enc = encode(&x, Element::IDENTITY, &v, &act).unwrap();
        assert_eq!(enc.base, x.to_vec());
        assert_eq!(enc.encoding, v.values);
        let back = EncodedInput::split(&enc.flatten(), 6).unwrap();
        assert_eq!(back, enc);
    }

    #[test]
    fn encode_rejects_mismatched_dimensions() {
        let act = c6();
        let v = make_breaking_vector(&act, &mut rng::seeded(5)).unwrap();
        assert!(matches!(encode(&[1.0; 5], Element(1), &v, &act), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn trivial_stabilizer_makes_forward_deterministic() {
        let act = c6();
        let canon = EnergyCanonicalizer::random_linear(act.clone(), 17);
        let v = make_breaking_vector(&act, &mut rng::seeded(6)).unwrap();
        let x = [0.3, 0.1, 0.4, 0.1, 0.5, 0.9];
        let mut rng = rng::seeded(7);
        let f0 = |e: &EncodedInput| e.flatten();
        let first = sympe_forward(f0, &x, &canon, &v, &act, &mut rng).unwrap();
        for _ in 0..20 {
            assert_eq!(sympe_forward(f0, &x, &canon, &v, &act, &mut rng).unwrap(), first);
        }
    }

    #[test]
    fn noise_channel_is_distinct_almost_surely() {
        let z = noise_inject(&[0.0; 8], 8, &mut rng::seeded(3)).unwrap();
        let mut sorted = z.encoding.clone();
        sorted.sort_by(f64::total_cmp);
        assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    }
}
