//! The invariant battery behind `symbreak verify`, one function per
//! acceptance criterion.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::StandardNormal;
use symbreak_core::canon::{
    energy_canonicalize, sample_inversion_kernel, sort_argmin_set, sort_canonicalize, CanonResult, Canonicalizer,
    EnergyCanonicalizer, LinearEnergy,
};
use symbreak_core::equicheck::{
    check_curie, entropy, enumerate_equivariant_kernels, generalization_gap, kernel_entropy,
    test_distributional_equivariance, tv_threshold, CheckRecord, GapSetup, Report,
};
use symbreak_core::graphdemo::{c4_vector, compare, run_corpus, CorpusConfig, SmallGraph};
use symbreak_core::groups::{
    make_cyclic, make_dihedral, make_p4m, make_signed_permutations, make_symmetric, orbit, stabilizer, P4m,
};
use symbreak_core::ising::{
    analytic_ground_state, bond_energy, brute_force_ground_state, energy_per_site, image_encode, spins_to_bonds,
    IsingInstance, PhaseLabel, SpinConfig, BRUTE_FORCE_MAX_SITES,
};
use symbreak_core::sympe::{acts_freely, encode, make_breaking_vector, SymPEVector};
use symbreak_core::toynet::{afm_fixture, gradient_check, train, Geometry, GroupConvNet, TrainConfig, Variant};
use symbreak_core::{rng, Element, FiniteGroup, GroupAction, Result, Rng};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Draws per sampled check.
    pub samples: usize,
    pub alpha: f64,
    /// Replace inversion-kernel draws by the fixed representative `τ`.
    pub break_kernel: bool,
    /// Include the two AFM training runs.
    pub train: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, samples: 10_000, alpha: 0.01, break_kernel: false, train: true }
    }
}

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub run: fn(&VerifyOptions) -> Result<Vec<CheckRecord>>,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "group axioms, orbit-stabilizer, stabilizer conjugation", run: groups },
    Criterion { id: 2, title: "inversion-kernel set equivariance and uniform sampling", run: kernels },
    Criterion { id: 3, title: "sorting canonicalization law", run: sorting },
    Criterion { id: 4, title: "Curie principle and SymPE breaking", run: curie },
    Criterion { id: 5, title: "free-action breaking vectors", run: breaking_vectors },
    Criterion { id: 6, title: "inversion-kernel entropy minimality", run: entropies },
    Criterion { id: 7, title: "generalization gap identity", run: gap_identity },
    Criterion { id: 8, title: "analytic ground states against brute force", run: ground_states },
    Criterion { id: 9, title: "p4m invariance of energy and encoding", run: p4m_invariance },
    Criterion { id: 10, title: "toy network gradients, equivariance and training", run: toynet },
    Criterion { id: 11, title: "graph demo errors", run: graph_demo },
];

/// Every criterion's records, names prefixed by the criterion number.
pub fn run_battery(opts: &VerifyOptions) -> Result<Report> {
    let mut report = Report::default();
    for c in CRITERIA {
        report.extend((c.run)(opts)?);
    }
    Ok(report)
}

fn named(id: usize, name: impl AsRef<str>) -> String {
    format!("{id}.{}", name.as_ref())
}

fn violations(id: usize, name: impl AsRef<str>, count: usize) -> CheckRecord {
    CheckRecord::at_most(named(id, name), count as f64, 0.0)
}

fn at_least(id: usize, name: impl AsRef<str>, value: f64, floor: f64) -> CheckRecord {
    CheckRecord::new(named(id, name), value, floor, value >= floor)
}

fn stream(opts: &VerifyOptions, criterion: usize, k: usize) -> Rng {
    rng::stream(opts.seed, (criterion * 1_000_000 + k) as u64)
}

fn draw_kernel(canon: &CanonResult, rng: &mut Rng, broken: bool) -> Element {
    if broken {
        canon.tau
    } else {
        sample_inversion_kernel(canon, rng)
    }
}

fn natural(group: FiniteGroup) -> symbreak_core::PermutationAction {
    symbreak_core::PermutationAction::natural(Arc::new(group))
}

fn p4m4() -> Result<P4m> {
    make_p4m(4)
}

/// The small test groups with a permutation action each.
fn test_actions() -> Result<Vec<(&'static str, symbreak_core::PermutationAction)>> {
    Ok(vec![
        ("C6", natural(make_cyclic(6)?)),
        ("S4", natural(make_symmetric(4)?)),
        ("D4", natural(make_dihedral(4)?)),
        ("p4m4", p4m4()?.site_action()),
    ])
}

/// A self-symmetric point for each of [`test_actions`].
fn symmetric_point(name: &str) -> Vec<f64> {
    match name {
        "C6" => vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0],
        "S4" => vec![1.0, 1.0, 2.0, 2.0],
        "D4" => vec![1.0, 0.0, 1.0, 0.0],
        _ => SpinConfig::row_stripes(4, true).to_f64(),
    }
}

fn random_point(dim: usize, rng: &mut Rng) -> Vec<f64> {
    (0..dim).map(|_| f64::from(rng.random_range(0..3u8))).collect()
}

/// `Σ_j h^j x` over the cyclic subgroup generated by `h`: a point fixed by `h`.
fn symmetrize(action: &dyn GroupAction, h: Element, x: &[f64]) -> Vec<f64> {
    let group = action.group();
    let mut out = vec![0.0; x.len()];
    let mut power = group.identity();
    for _ in 0..group.element_order(h) {
        out.iter_mut().zip(action.apply(power, x)).for_each(|(o, v)| *o += v);
        power = group.compose(h, power);
    }
    out
}

fn groups(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (name, action) in test_actions()? {
        let group = action.group();
        out.push(violations(1, format!("axioms.{name}"), usize::from(group.check_axioms().is_err())));
        let mut rng = stream(opts, 1, out.len());
        let mut points = vec![symmetric_point(name)];
        points.extend((0..20).map(|_| random_point(action.dim(), &mut rng)));
        let (mut os, mut conj) = (0, 0);
        for x in &points {
            let stab = stabilizer(&action, x);
            os += usize::from(orbit(&action, x).len() * stab.order() != group.order());
            conj += group.elements().filter(|&g| stabilizer(&action, &action.apply(g, x)) != stab.conjugate(g)).count();
        }
        out.push(violations(1, format!("orbit_stabilizer.{name}"), os));
        out.push(violations(1, format!("stabilizer_conjugation.{name}"), conj));
    }
    Ok(out)
}

fn kernels(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (k, (name, action)) in test_actions()?.into_iter().enumerate() {
        let group = action.group().clone();
        let energy = LinearEnergy::random(action.dim(), opts.seed ^ 0xC2);
        let mut rng = stream(opts, 2, k);
        let mut bad = 0;
        for i in 0..50 {
            let x0 = random_point(action.dim(), &mut rng);
            let x = if i % 2 == 1 {
                let h = Element(rng.random_range(0..group.order() as u32));
                symmetrize(&action, h, &x0)
            } else {
                x0
            };
            let base = energy_canonicalize(&energy, &action, &x);
            for g in group.elements() {
                let moved = energy_canonicalize(&energy, &action, &action.apply(g, &x));
                let mut expected: Vec<Element> = base.argmin_set.iter().map(|&a| group.compose(g, a)).collect();
                expected.sort_unstable();
                bad += usize::from(moved.argmin_set != expected || moved.gamma != base.gamma);
            }
        }
        out.push(violations(2, format!("argmin_set_equivariance.{name}"), bad));

        let canon = energy_canonicalize(&energy, &action, &symmetric_point(name));
        let mut counts: BTreeMap<Element, usize> = canon.argmin_set.iter().map(|&g| (g, 0)).collect();
        for _ in 0..opts.samples {
            *counts.entry(draw_kernel(&canon, &mut rng, opts.break_kernel)).or_default() += 1;
        }
        let p = 1.0 / canon.argmin_set.len() as f64;
        let n = opts.samples as f64;
        let sigma = (n * p * (1.0 - p)).sqrt().max(f64::MIN_POSITIVE);
        let outside = counts.len() - canon.argmin_set.len();
        let z = counts.values().map(|&c| (c as f64 - n * p).abs() / sigma).fold(0.0, f64::max);
        let z = if p == 1.0 && outside == 0 { 0.0 } else { z };
        out.push(CheckRecord::at_most(named(2, format!("kernel_uniformity_sigma.{name}")), z, 5.0));
    }
    Ok(out)
}

fn sorting(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let fixtures: [&[f64]; 4] =
        [&[1.0, 1.0, 2.0], &[0.0, 0.0, 0.0, 0.0], &[2.0, 1.0, 2.0, 1.0, 3.0, 3.0], &[5.0, 5.0, 5.0, 1.0, 1.0, 0.0]];
    let threshold = tv_threshold(opts.samples, opts.alpha, fixtures.len());
    let mut out = Vec::new();
    for (k, scores) in fixtures.iter().enumerate() {
        let sym = make_symmetric(scores.len())?;
        let exact = sort_argmin_set(scores, &sym)?;
        let mut rng = stream(opts, 3, k);
        let mut counts: BTreeMap<Element, usize> = BTreeMap::new();
        let mut wrong = 0;
        for _ in 0..opts.samples {
            let s = sort_canonicalize(scores, &mut rng);
            let sorted = s.gamma.windows(2).all(|w| w[0] <= w[1]);
            let consistent = s.tau.iter().enumerate().all(|(i, &t)| s.gamma[i] == scores[t as usize]);
            wrong += usize::from(!sorted || !consistent || s.gamma != exact.gamma);
            match s.element_in(&sym) {
                Some(g) => *counts.entry(g).or_default() += 1,
                None => wrong += 1,
            }
        }
        let p = 1.0 / exact.argmin_set.len() as f64;
        let n = opts.samples as f64;
        let inside: f64 = exact.argmin_set.iter().map(|g| (counts.get(g).copied().unwrap_or(0) as f64 / n - p).abs()).sum();
        let outside: f64 =
            counts.iter().filter(|(g, _)| exact.argmin_set.binary_search(g).is_err()).map(|(_, &c)| c as f64 / n).sum();
        let label = format!("n{}_{k}", scores.len());
        out.push(violations(3, format!("ascending_sort.{label}"), wrong));
        out.push(CheckRecord::at_most(named(3, format!("coset_law_tv.{label}")), 0.5 * (inside + outside), threshold));
    }
    Ok(out)
}

/// Exactly equivariant maps paired with each test action.
fn equivariant_map(name: &str) -> fn(&[f64]) -> Vec<f64> {
    match name {
        "C6" => |x| (0..6).map(|i| x[i] + 2.0 * x[(i + 1) % 6]).collect(),
        "S4" => |x| {
            let s: f64 = x.iter().sum();
            x.iter().map(|v| v * v + s).collect()
        },
        "D4" => |x| (0..4).map(|i| 3.0 * x[i] + x[(i + 1) % 4] + x[(i + 3) % 4]).collect(),
        // 4×4 torus: neighbor sum plus the total
        _ => |x| {
            let total: f64 = x.iter().sum();
            let row = |i: usize, dx: usize| (i / 4) * 4 + (i + dx) % 4;
            (0..16).map(|i| x[row(i, 1)] + x[row(i, 3)] + x[(i + 4) % 16] + x[(i + 12) % 16] + total).collect()
        },
    }
}

/// Sum of the four bond pixels around each site plus twice its field pixel.
/// Dyadic inputs keep every sum exact.
fn p4m_bond_sum(side: usize) -> impl Fn(&[f64]) -> Vec<f64> {
    move |img: &[f64]| {
        let w = 2 * side;
        let px = |u: usize, v: usize| img[(v % w) * w + u % w];
        (0..side * side)
            .map(|s| {
                let (x, y) = (2 * (s % side), 2 * (s / side));
                px(x + 1, y) + px(x + w - 1, y) + px(x, y + 1) + px(x, y + w - 1) + 2.0 * img[w * w + y * w + x]
            })
            .collect()
    }
}

fn additive_sympe(x: &[f64], g: Element, v: &SymPEVector, action: &dyn GroupAction) -> Vec<f64> {
    let e = encode(x, g, v, action).expect("dimensions match by construction");
    let n = e.encoding.len();
    (0..n).map(|i| e.base[i] + e.encoding[i]).collect()
}

fn curie(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (k, (name, action)) in test_actions()?.into_iter().enumerate() {
        let x = symmetric_point(name);
        let report = check_curie(equivariant_map(name), &action, &action, &x);
        out.push(violations(4, format!("curie.{name}"), usize::from(!report.holds)));

        let mut rng = stream(opts, 4, k);
        let canonicalizer = EnergyCanonicalizer::random_linear(action.clone(), opts.seed ^ 0xC4);
        let v = make_breaking_vector(&action, &mut rng)?;
        let in_order = stabilizer(&action, &x).order();
        let canon = canonicalizer.canonicalize(&x)?;
        let broken = (0..32)
            .filter(|_| {
                let g = draw_kernel(&canon, &mut rng, opts.break_kernel);
                stabilizer(&action, &additive_sympe(&x, g, &v, &action)).order() < in_order
            })
            .count();
        out.push(at_least(4, format!("sympe_breaks.{name}"), broken as f64, 1.0));

        // The TV test needs an output support well below the sample count;
        // the p4m fixture's |G_x| distinct encodings are too many.
        if in_order > 8 {
            continue;
        }
        let sampler = |point: &[f64], rng: &mut Rng| {
            let canon = canonicalizer.canonicalize(point).expect("dimension fixed");
            additive_sympe(point, draw_kernel(&canon, rng, opts.break_kernel), &v, &action)
        };
        let elements: Vec<Element> = action.group().elements().step_by(action.group().order().div_ceil(16)).collect();
        let eq = test_distributional_equivariance(sampler, &action, &action, &x, opts.samples, opts.alpha, &elements, opts.seed)?;
        out.push(CheckRecord::at_most(named(4, format!("sympe_equivariance_tv.{name}")), eq.max_tv(), eq.threshold));
    }

    let p4m = p4m4()?;
    let pixels = p4m.pixel_action(2)?;
    let image = image_encode(&IsingInstance::new(4, -1.0, 0.5, 0.25)?);
    let report = check_curie(p4m_bond_sum(4), &pixels, &p4m.site_action(), &image);
    out.push(violations(4, "curie.p4m4_image", usize::from(!report.holds)));
    Ok(out)
}

fn breaking_vectors(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut actions: Vec<(&str, Box<dyn GroupAction>)> = vec![
        ("C6", Box::new(natural(make_cyclic(6)?))),
        ("S4", Box::new(natural(make_symmetric(4)?))),
        ("D4", Box::new(natural(make_dihedral(4)?))),
        ("p4m4_pixels", Box::new(p4m4()?.pixel_action(1)?)),
    ];
    actions.push(("B3", Box::new(make_signed_permutations(3)?.1)));
    let mut out = Vec::new();
    for (k, (name, action)) in actions.iter().enumerate() {
        let mut rng = stream(opts, 5, k);
        let (mut not_free, mut redraws) = (0, 0);
        for _ in 0..1000 {
            let v = make_breaking_vector(action.as_ref(), &mut rng)?;
            not_free += usize::from(!acts_freely(action.as_ref(), &v.values));
            redraws += v.redraws;
        }
        out.push(violations(5, format!("free_action.{name}"), not_free));
        out.push(violations(5, format!("redraws.{name}"), redraws));
    }
    Ok(out)
}

fn entropies(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (name, action) in test_actions()? {
        let energy = LinearEnergy::random(action.dim(), opts.seed ^ 0xC6);
        let mut points = vec![symmetric_point(name)];
        let mut rng = stream(opts, 6, out.len());
        points.extend((0..10).map(|_| {
            let h = Element(rng.random_range(0..action.group().order() as u32));
            symmetrize(&action, h, &random_point(action.dim(), &mut rng))
        }));
        let worst = points
            .iter()
            .map(|x| (kernel_entropy(&energy_canonicalize(&energy, &action, x)) - (stabilizer(&action, x).order() as f64).ln()).abs())
            .fold(0.0, f64::max);
        out.push(CheckRecord::at_most(named(6, format!("entropy_is_log_stabilizer.{name}")), worst, 0.0));
    }

    let c6 = natural(make_cyclic(6)?);
    let d4 = natural(make_dihedral(4)?);
    let cases: [(&str, &symbreak_core::PermutationAction, Vec<f64>, usize); 3] = [
        ("C6_order3", &c6, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0], 6),
        ("C6_order2", &c6, vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0], 4),
        ("D4_order4", &d4, vec![1.0, 0.0, 1.0, 0.0], 4),
    ];
    for (label, action, x, denominator) in cases {
        let stab = stabilizer(action, &x);
        let kernels = enumerate_equivariant_kernels(action.group(), &stab, denominator);
        let floor = (stab.order() as f64).ln();
        let min = kernels.iter().map(|k| entropy(k)).fold(f64::INFINITY, f64::min);
        out.push(at_least(6, format!("enumerated_kernels.{label}"), kernels.len() as f64, 1.0));
        out.push(CheckRecord::at_most(named(6, format!("entropy_floor_gap.{label}")), floor - min, 1e-12));
    }
    Ok(out)
}

const GAP_SAMPLES: usize = 100_000;

fn gap_identity(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let c2 = Arc::new(make_cyclic(2)?);
    let flip = symbreak_core::LinearAction::sign_flip(c2, 1)?;
    let setup = GapSetup { action_x: &flip, action_z: &flip, action_y: &flip, samples: GAP_SAMPLES, seed: opts.seed ^ 0xC7 };
    let record = |label: &str, r: &symbreak_core::equicheck::GapReport| {
        let floor = 1e-12 * r.risk_f.abs().max(1.0);
        CheckRecord::new(named(7, format!("gap_identity.{label}")), r.residual().abs(), 4.0 * r.monte_carlo_stderr + floor, r.identity_holds())
    };
    let mut out = Vec::new();

    let eq = generalization_gap(|x, z| vec![2.0 * x[0] + z[0]], |rng| vec![normal(rng)], |x, _| x.to_vec(), |x, rng| vec![x[0] + normal(rng)], &setup)?;
    out.push(record("equivariant", &eq));
    out.push(CheckRecord::at_most(named(7, "equivariant_gap_is_zero"), eq.gap().abs() + eq.orth_norm_sq, 0.0));

    let c = 0.7;
    let constant = generalization_gap(|_, _| vec![c], |rng| vec![normal(rng)], |x, _| x.to_vec(), |x, _| x.to_vec(), &setup)?;
    out.push(record("constant", &constant));
    out.push(CheckRecord::at_most(named(7, "constant_orth_norm_error"), (constant.orth_norm_sq - c * c).abs(), 1e-12));

    let c4 = natural(make_cyclic(4)?);
    let mut table_rng = rng::seeded(opts.seed ^ 0x7AB1E);
    let table: Vec<Vec<f64>> = (0..256).map(|_| (0..4).map(|_| table_rng.random_range(-2.0..2.0)).collect()).collect();
    let bits = |v: &[f64]| v.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum::<usize>();
    let setup = GapSetup { action_x: &c4, action_z: &c4, action_y: &c4, ..setup };
    let tabulated = generalization_gap(
        |x, z| table[bits(x) | (bits(z) << 4)].clone(),
        |rng| (0..4).map(|_| f64::from(rng.random_range(0..2u8))).collect(),
        |_, rng| (0..4).map(|_| f64::from(rng.random_range(0..2u8))).collect(),
        |x, rng| x.iter().map(|v| v + normal(rng)).collect(),
        &setup,
    )?;
    out.push(record("tabulated", &tabulated));
    Ok(out)
}

fn normal(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn quantized(rng: &mut Rng, half_width: i32) -> f64 {
    f64::from(rng.random_range(-half_width..=half_width)) * 0.5
}

fn ground_states(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut rng = stream(opts, 8, 0);
    let mut corpus = Vec::with_capacity(200);
    while corpus.len() < 150 {
        corpus.push(IsingInstance::new(4, quantized(&mut rng, 6), quantized(&mut rng, 6), quantized(&mut rng, 4))?);
    }
    while corpus.len() < 200 {
        let inst = IsingInstance::new(4, quantized(&mut rng, 6), quantized(&mut rng, 6), quantized(&mut rng, 4))?;
        if analytic_ground_state(&inst).phase == PhaseLabel::Boundary {
            corpus.push(inst);
        }
    }
    let mut covered: BTreeMap<String, usize> = BTreeMap::new();
    let mut mismatches = 0;
    for inst in &corpus {
        let analytic = analytic_ground_state(inst);
        *covered.entry(analytic.phase.to_string()).or_default() += 1;
        let brute = brute_force_ground_state(inst, BRUTE_FORCE_MAX_SITES)?;
        mismatches += usize::from(analytic.energy_per_site != brute.energy_per_site);
    }
    let mut out = vec![violations(8, "analytic_equals_brute_force", mismatches)];
    out.push(at_least(8, "phases_covered", covered.len() as f64, 5.0));

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let inst = IsingInstance::new(4, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0))?;
        let sigma = SpinConfig::from_bits(4, rng.random_range(0..1u64 << 16));
        let direct = energy_per_site(&inst, &sigma) * inst.sites() as f64;
        let bonds = bond_energy(&inst, &spins_to_bonds(&sigma))?;
        worst = worst.max((bonds - direct).abs() / direct.abs().max(1.0));
    }
    out.push(CheckRecord::at_most(named(8, "bond_form_relative_error"), worst, 1e-12));
    Ok(out)
}

fn random_instance(side: usize, rng: &mut Rng) -> Result<IsingInstance> {
    IsingInstance::new(side, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0))
}

fn random_config(side: usize, rng: &mut Rng) -> SpinConfig {
    SpinConfig::new(side, (0..side * side).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
        .expect("values are ±1")
}

fn p4m_invariance(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (side, count) in [(4usize, None), (8, Some(64usize))] {
        let p4m = make_p4m(side)?;
        let pixels = p4m.pixel_action(2)?;
        let mut rng = stream(opts, 9, side);
        let order = p4m.group().order() as u32;
        let elements: Vec<Element> = match count {
            None => p4m.group().elements().collect(),
            Some(k) => (0..k).map(|_| Element(rng.random_range(0..order))).collect(),
        };
        let (mut energy_bad, mut encode_bad) = (0, 0);
        for _ in 0..8 {
            let inst = random_instance(side, &mut rng)?;
            let sigma = random_config(side, &mut rng);
            let e = energy_per_site(&inst, &sigma);
            let image = image_encode(&inst);
            for &g in &elements {
                energy_bad += usize::from(energy_per_site(&inst.transform(&p4m, g), &sigma.transform(&p4m, g)) != e);
                encode_bad += usize::from(image_encode(&inst.transform(&p4m, g)) != pixels.apply(g, &image));
            }
        }
        out.push(violations(9, format!("energy_invariance.L{side}"), energy_bad));
        out.push(violations(9, format!("encode_commutes.L{side}"), encode_bad));
    }
    Ok(out)
}

fn toynet(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mut rng = stream(opts, 10, 0);
    let geo4 = Arc::new(Geometry::new(4)?);
    let net = GroupConvNet::new(geo4.clone(), 3, 3, &mut rng)?;
    let inst = IsingInstance::new(4, -1.0, 0.7, 0.4)?;
    let mut input = image_encode(&inst);
    input.extend((0..geo4.pixels()).map(|_| rng.random::<f64>()));
    let worst = gradient_check(&net, &inst, &input, 1e-5)?.iter().map(|c| c.relative_error).fold(0.0, f64::max);
    out.push(CheckRecord::at_most(named(10, "gradient_relative_error"), worst, 1e-4));

    for (side, count) in [(4usize, None), (8, Some(64usize))] {
        let geo = Arc::new(Geometry::new(side)?);
        let net = GroupConvNet::new(geo.clone(), 3, 4, &mut rng)?;
        let p4m = geo.p4m();
        let images = geo.pixel_action().with_channels(3);
        let sites = p4m.site_action();
        let order = p4m.group().order() as u32;
        let elements: Vec<Element> = match count {
            None => p4m.group().elements().collect(),
            Some(k) => (0..k).map(|_| Element(rng.random_range(0..order))).collect(),
        };
        let image: Vec<f64> = (0..3 * geo.pixels()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let base = net.predict(&image);
        let worst = elements
            .iter()
            .map(|&g| {
                let moved = net.predict(&images.apply(g, &image));
                moved.iter().zip(sites.apply(g, &base)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        out.push(CheckRecord::at_most(named(10, format!("network_equivariance.L{side}")), worst, 1e-9));
    }

    if opts.train {
        let afm = afm_fixture(8)?;
        for variant in [Variant::Vanilla, Variant::Sympe] {
            let cfg = TrainConfig { variant, seed: opts.seed, ..TrainConfig::default() };
            let state = train(&cfg, &[afm])?;
            let e = state.expected_energy(&afm, &mut stream(opts, 10, 1))?;
            out.push(match variant {
                Variant::Vanilla => at_least(10, "afm_vanilla_energy", e, -1e-6),
                _ => CheckRecord::at_most(named(10, "afm_sympe_energy"), e, -1.5),
            });
        }
    }
    Ok(out)
}

fn graph_demo(opts: &VerifyOptions) -> Result<Vec<CheckRecord>> {
    let sym = Arc::new(make_symmetric(4)?);
    let c4 = compare(&SmallGraph::cycle(4)?, &sym, 2, &c4_vector(), &mut stream(opts, 11, 0))?;
    let mut out = vec![
        CheckRecord::at_most(named(11, "c4_equivariant_error_offset"), (c4.err_equivariant - 1.0 / 3.0).abs(), 0.0),
        CheckRecord::at_most(named(11, "c4_sympe_error"), c4.err_sympe, 0.0),
    ];
    let records = run_corpus(&CorpusConfig { seed: opts.seed, ..CorpusConfig::default() })?;
    let n = records.len() as f64;
    let mean_eq = records.iter().map(|r| r.err_equivariant).sum::<f64>() / n;
    let mean_sympe = records.iter().map(|r| r.err_sympe).sum::<f64>() / n;
    out.push(CheckRecord::at_most(named(11, "corpus_mean_sympe_minus_equivariant"), mean_sympe - mean_eq, 0.0));
    let affected: Vec<_> = records.iter().filter(|r| r.aut_order > 1 && r.err_equivariant > 0.0).collect();
    let not_strict = affected.iter().filter(|r| r.err_sympe >= r.err_equivariant).count();
    out.push(at_least(11, "corpus_affected_graphs", affected.len() as f64, 1.0));
    out.push(violations(11, "corpus_strict_improvement", not_strict));
    Ok(out)
}
