use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use symbreak_core::canon::{Canonicalizer, EnergyCanonicalizer};
use symbreak_core::graphdemo::{c4_vector, compare, erdos_renyi};
use symbreak_core::groups::{make_p4m, make_symmetric};
use symbreak_core::ising::{brute_force_ground_state, image_encode, IsingInstance, BRUTE_FORCE_MAX_SITES};
use symbreak_core::sympe::make_breaking_vector;
use symbreak_core::toynet::{afm_fixture, Geometry, GroupConvNet};
use symbreak_core::{rng, PermutationAction};

fn canonicalize(c: &mut Criterion) {
    for side in [4, 8] {
        let p4m = make_p4m(side).unwrap();
        let canon = EnergyCanonicalizer::random_linear(p4m.pixel_action(2).unwrap(), 1);
        let image = image_encode(&IsingInstance::new(side, -1.0, 0.5, 0.3).unwrap());
        c.bench_function(&format!("canonicalize_p4m_L{side}"), |b| b.iter(|| canon.canonicalize(black_box(&image)).unwrap()));
    }
}

fn brute_force(c: &mut Criterion) {
    let inst = IsingInstance::new(4, -1.0, 0.7, 0.4).unwrap();
    c.bench_function("brute_force_4x4", |b| b.iter(|| brute_force_ground_state(black_box(&inst), BRUTE_FORCE_MAX_SITES).unwrap()));
}

fn network(c: &mut Criterion) {
    let geometry = Arc::new(Geometry::new(8).unwrap());
    let net = GroupConvNet::new(geometry.clone(), 3, 4, &mut rng::seeded(0)).unwrap();
    let mut input = image_encode(&afm_fixture(8).unwrap());
    input.extend((0..geometry.pixels()).map(|q| q as f64 / geometry.pixels() as f64));
    c.bench_function("groupconv_forward_L8", |b| b.iter(|| net.forward(black_box(&input))));
    let fwd = net.forward(&input);
    let dprobs = vec![0.01; geometry.sites()];
    c.bench_function("groupconv_backward_L8", |b| b.iter(|| net.backward(black_box(&fwd), &dprobs, Some(2))));
}

fn graphs(c: &mut Criterion) {
    let sym = Arc::new(make_symmetric(7).unwrap());
    let v = make_breaking_vector(&PermutationAction::natural(sym.clone()), &mut rng::seeded(0)).unwrap();
    let graph = erdos_renyi(7, 0.25, &mut rng::seeded(3)).unwrap();
    c.bench_function("graph_compare_n7", |b| b.iter(|| compare(black_box(&graph), &sym, 2, &v, &mut rng::seeded(1)).unwrap()));
    let s4 = Arc::new(make_symmetric(4).unwrap());
    let c4 = symbreak_core::graphdemo::SmallGraph::cycle(4).unwrap();
    c.bench_function("graph_compare_c4", |b| b.iter(|| compare(black_box(&c4), &s4, 2, &c4_vector(), &mut rng::seeded(1)).unwrap()));
}

criterion_group!(benches, canonicalize, brute_force, network, graphs);
criterion_main!(benches);
