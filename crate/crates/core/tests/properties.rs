use std::sync::Arc;

use proptest::prelude::*;
use symbreak_core::canon::{energy_canonicalize, sort_canonicalize, LinearEnergy};
use symbreak_core::equicheck::reynolds_average;
use symbreak_core::graphdemo::{distance_decoder_best_error, equivariant_embed, SmallGraph};
use symbreak_core::groups::{make_cyclic, make_p4m, make_symmetric, P4m};
use symbreak_core::ising::{bond_energy, energy_per_site, image_encode, spins_to_bonds, IsingInstance, SpinConfig};
use symbreak_core::sympe::{acts_freely, make_breaking_vector};
use symbreak_core::{rng, Element, FiniteGroup, GroupAction, PermutationAction};

fn s4() -> Arc<FiniteGroup> {
    Arc::new(make_symmetric(4).unwrap())
}

fn p4m4() -> &'static P4m {
    use std::sync::OnceLock;
    static P: OnceLock<P4m> = OnceLock::new();
    P.get_or_init(|| make_p4m(4).unwrap())
}

fn element(group: &FiniteGroup, k: usize) -> Element {
    group.elements().nth(k % group.order()).unwrap()
}

proptest! {
    #[test]
    fn p4m_composition_is_associative(a in 0usize..128, b in 0usize..128, c in 0usize..128) {
        let g = p4m4().group();
        let (a, b, c) = (element(g, a), element(g, b), element(g, c));
        prop_assert_eq!(g.compose(g.compose(a, b), c), g.compose(a, g.compose(b, c)));
        prop_assert_eq!(g.compose(a, g.inverse(a)), g.identity());
    }

    #[test]
    fn pushforward_respects_composition(a in 0usize..128, b in 0usize..128, x in prop::collection::vec(-5.0f64..5.0, 128)) {
        let p4m = p4m4();
        let g = p4m.group();
        let action = p4m.pixel_action(2).unwrap();
        let (a, b) = (element(g, a), element(g, b));
        prop_assert_eq!(action.apply(g.compose(a, b), &x), action.apply(a, &action.apply(b, &x)));
        prop_assert_eq!(action.apply_inverse(a, &action.apply(a, &x)), x);
    }

    #[test]
    fn argmin_set_moves_with_the_input(x in prop::collection::vec(0u8..3, 4), k in 0usize..24) {
        let group = s4();
        let action = PermutationAction::natural(group.clone());
        let energy = LinearEnergy::random(4, 11);
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let g = element(&group, k);
        let base = energy_canonicalize(&energy, &action, &x);
        let moved = energy_canonicalize(&energy, &action, &action.apply(g, &x));
        let mut expected: Vec<Element> = base.argmin_set.iter().map(|&h| group.compose(g, h)).collect();
        expected.sort();
        prop_assert_eq!(&moved.argmin_set, &expected);
        prop_assert_eq!(&moved.gamma, &base.gamma);
    }

    #[test]
    fn sorting_reconstructs_the_input(x in prop::collection::vec(0u8..4, 1..7), seed in any::<u64>()) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let s = sort_canonicalize(&x, &mut rng::seeded(seed));
        prop_assert!(s.gamma.windows(2).all(|w| w[0] <= w[1]));
        for (i, &t) in s.tau.iter().enumerate() {
            prop_assert_eq!(s.gamma[i], x[t as usize]);
        }
    }

    #[test]
    fn reynolds_average_is_equivariant(x in prop::collection::vec(-2.0f64..2.0, 6), k in 0usize..6) {
        let group = Arc::new(make_cyclic(6).unwrap());
        let action = PermutationAction::natural(group.clone());
        let f = |x: &[f64]| (0..6).map(|i| x[i] * x[i] + 0.3 * x[(i + 1) % 6] - x[0]).collect::<Vec<f64>>();
        let g = element(&group, k);
        let at_gx = reynolds_average(f, &action, &action, &action.apply(g, &x));
        let g_at_x = action.apply(g, &reynolds_average(f, &action, &action, &x));
        for (a, b) in at_gx.iter().zip(&g_at_x) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn ising_energy_is_p4m_invariant(bits in any::<u16>(), k in 0usize..128, jx in -3.0f64..3.0, jy in -3.0f64..3.0, h in -2.0f64..2.0) {
        let p4m = p4m4();
        let inst = IsingInstance::new(4, jx, jy, h).unwrap();
        let sigma = SpinConfig::from_bits(4, u64::from(bits));
        let g = element(p4m.group(), k);
        prop_assert_eq!(energy_per_site(&inst.transform(p4m, g), &sigma.transform(p4m, g)), energy_per_site(&inst, &sigma));
        let direct = energy_per_site(&inst, &sigma) * 16.0;
        prop_assert!((bond_energy(&inst, &spins_to_bonds(&sigma)).unwrap() - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn encoding_commutes_with_the_pixel_action(k in 0usize..128, jx in -3.0f64..3.0, jy in -3.0f64..3.0, h in 0.0f64..2.0) {
        let p4m = p4m4();
        let action = p4m.pixel_action(2).unwrap();
        let inst = IsingInstance::new(4, jx, jy, h).unwrap();
        let g = element(p4m.group(), k);
        prop_assert_eq!(image_encode(&inst.transform(p4m, g)), action.apply(g, &image_encode(&inst)));
    }

    #[test]
    fn decoder_error_is_relabeling_invariant(edges in prop::collection::vec(any::<bool>(), 15), k in 0usize..720) {
        let sym = make_symmetric(6).unwrap();
        let pairs: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
        let chosen: Vec<(usize, usize)> = pairs.into_iter().zip(edges).filter(|(_, e)| *e).map(|(p, _)| p).collect();
        let graph = SmallGraph::from_edges(6, &chosen).unwrap();
        let perm = sym.perm(element(&sym, k)).to_vec();
        let moved = graph.permuted(&perm);
        prop_assert_eq!(equivariant_embed(&moved, 2), equivariant_embed(&graph, 2).permuted(&perm));
        prop_assert_eq!(
            distance_decoder_best_error(&moved, &equivariant_embed(&moved, 2)),
            distance_decoder_best_error(&graph, &equivariant_embed(&graph, 2))
        );
    }

    #[test]
    fn breaking_vectors_act_freely(seed in any::<u64>()) {
        let action = p4m4().pixel_action(1).unwrap();
        let v = make_breaking_vector(&action, &mut rng::seeded(seed)).unwrap();
        prop_assert!(acts_freely(&action, &v.values));
    }
}
