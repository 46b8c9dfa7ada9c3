use symbreak_core::equicheck::test_distributional_equivariance;
use symbreak_core::ising::{analytic_ground_state, IsingInstance};
use symbreak_core::toynet::{afm_fixture, evaluate, test_grid, train, TrainConfig, TrainState, Variant};
use symbreak_core::Element;

fn trained(variant: Variant) -> TrainState {
    let cfg = TrainConfig { variant, ..TrainConfig::default() };
    train(&cfg, &[afm_fixture(cfg.side).unwrap()]).unwrap()
}

/// Inverse of the image encoding for constant-parameter instances.
fn decode(side: usize, image: &[f64]) -> IsingInstance {
    let w = 2 * side;
    IsingInstance::new(side, image[1], image[w], image[w * w]).unwrap()
}

#[test]
fn vanilla_cannot_order_the_antiferromagnet() {
    let state = trained(Variant::Vanilla);
    let afm = afm_fixture(8).unwrap();
    let e = state.expected_energy(&afm, &mut symbreak_core::rng::seeded(0)).unwrap();
    assert!(e >= -1e-6, "vanilla reached {e}");
}

#[test]
fn sympe_sampled_ground_states_are_equivariant() {
    let state = trained(Variant::Sympe);
    let model = &state.model;
    let side = model.geometry().side();
    let afm = afm_fixture(side).unwrap();
    let optimum = analytic_ground_state(&afm).energy_per_site;
    assert!(state.expected_energy(&afm, &mut symbreak_core::rng::seeded(0)).unwrap() <= -1.5);
    assert_eq!(optimum, -2.0);

    let p4m = model.geometry().p4m();
    let pixels = model.geometry().pixel_action().with_channels(2);
    let sites = p4m.site_action();
    let order = p4m.group().order();
    let elements: Vec<Element> = (0..16).map(|k| Element((k * order / 16 + k) as u32 % order as u32)).collect();
    let sampler = |image: &[f64], rng: &mut symbreak_core::Rng| {
        let prep = model.prepare(&decode(side, image)).unwrap();
        model.sample_probs(&prep, rng).iter().map(|&p| if p > 0.5 { 1.0 } else { -1.0 }).collect()
    };
    let x = symbreak_core::ising::image_encode(&afm);
    let report = test_distributional_equivariance(sampler, &pixels, &sites, &x, 1000, 0.01, &elements, 5).unwrap();
    assert!(report.pass(), "max tv {} over threshold {}", report.max_tv(), report.threshold);
}

#[test]
fn rotated_evaluation_matches_in_distribution() {
    let state = trained(Variant::Sympe);
    let grid = test_grid(8, 4).unwrap();
    let id = evaluate(&state.model, &grid, false, 16, 1).unwrap();
    let ood = evaluate(&state.model, &grid, true, 16, 2).unwrap();
    let tolerance = 3.0 * (id.stderr.powi(2) + ood.stderr.powi(2)).sqrt();
    assert!((id.mean - ood.mean).abs() <= tolerance, "id {} ood {} tol {tolerance}", id.mean, ood.mean);
}
