//! A small p4m-equivariant network that predicts Ising ground states.
//!
//! The network maps the two-channel image of an instance to per-site
//! spin-up probabilities and is trained by minimizing the mean-field energy
//! of its output. Exact equivariance means it cannot split a symmetric
//! instance into an ordered state: on a fully symmetric antiferromagnet its
//! output is constant and the best it can do is `m = 0`. The SymPE variant
//! feeds in a learned image `v` moved by an element sampled from the inversion
//! kernel of the instance image; the noise variant feeds fresh Gaussian noise.

mod loss;
mod net;

pub use loss::{expected_energy_loss, loss_and_grad};
pub use net::{Forward, Geometry, GroupConvNet, Params, INIT_GAIN, MAX_HIDDEN, TENSOR_NAMES};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{sample_inversion_kernel, CanonResult, Canonicalizer, EnergyCanonicalizer};
use crate::error::{Error, Result};
use crate::groups::{Element, GroupAction, PermutationAction};
use crate::ising::{energy_per_site, image_encode, IsingInstance, SpinConfig, IMAGE_CHANNELS};
use crate::rng::{self, Rng};
use crate::sympe::{make_breaking_vector, SymPEVector};

/// Seed of the fixed random linear energy used for canonicalization.
pub const CANON_SEED: u64 = 0x5EED_CA70;

/// The SymPE channel is `SYMPE_CHANNEL_GAIN · g̃v`. Each entry of `v` only
/// receives an `O(1/N)` gradient, so the gain acts as a larger step for `v`.
/// `v` starts as centered uniform noise divided by the gain, making the
/// initial channel uniform on `(−0.5, 0.5)`.
pub const SYMPE_CHANNEL_GAIN: f64 = 32.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Vanilla,
    Sympe,
    Noise,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Vanilla, Variant::Sympe, Variant::Noise];

    pub fn input_channels(self) -> usize {
        match self {
            Variant::Vanilla => IMAGE_CHANNELS,
            Variant::Sympe | Variant::Noise => IMAGE_CHANNELS + 1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Vanilla => "vanilla",
            Variant::Sympe => "sympe",
            Variant::Noise => "noise",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vanilla" => Ok(Variant::Vanilla),
            "sympe" => Ok(Variant::Sympe),
            "noise" => Ok(Variant::Noise),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?} (vanilla, sympe, noise)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrainConfig {
    pub variant: Variant,
    pub side: usize,
    pub hidden: usize,
    pub epochs: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { variant: Variant::Sympe, side: 8, hidden: 4, epochs: 500, step: 0.05, seed: 0 }
    }
}

/// Network plus everything needed to build its inputs.
#[derive(Clone)]
pub struct Model {
    pub variant: Variant,
    pub net: GroupConvNet,
    /// The learned encoding image (SymPE only).
    pub v: Option<SymPEVector>,
    canonicalizer: Arc<EnergyCanonicalizer<PermutationAction>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model").field("variant", &self.variant).field("net", &self.net).field("v", &self.v).finish()
    }
}

/// An instance with its image and, for SymPE, the image's canonicalization.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub instance: IsingInstance,
    pub image: Vec<f64>,
    pub canon: Option<CanonResult>,
}

impl Model {
    pub fn new(variant: Variant, geometry: Arc<Geometry>, hidden: usize, rng: &mut Rng) -> Result<Self> {
        let net = GroupConvNet::new(geometry.clone(), variant.input_channels(), hidden, rng)?;
        let v = match variant {
            Variant::Sympe => {
                let mut v = make_breaking_vector(geometry.pixel_action(), rng)?;
                v.values.iter_mut().for_each(|x| *x = (*x - 0.5) / SYMPE_CHANNEL_GAIN);
                Some(v)
            }
            _ => None,
        };
        let image_action = geometry.pixel_action().with_channels(IMAGE_CHANNELS);
        let canonicalizer = Arc::new(EnergyCanonicalizer::random_linear(image_action, CANON_SEED));
        Ok(Self { variant, net, v, canonicalizer })
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        self.net.geometry()
    }

    pub fn prepare(&self, instance: &IsingInstance) -> Result<Prepared> {
        if instance.side != self.geometry().side() {
            return Err(Error::DimensionMismatch { expected: self.geometry().side(), actual: instance.side });
        }
        let image = image_encode(instance);
        let canon = match self.variant {
            Variant::Sympe => Some(self.canonicalizer.canonicalize(&image)?),
            _ => None,
        };
        Ok(Prepared { instance: *instance, image, canon })
    }

    /// Network input for one forward pass and the sampled `g̃`, if any.
    pub fn build_input(&self, prep: &Prepared, rng: &mut Rng) -> (Vec<f64>, Option<Element>) {
        let mut input = prep.image.clone();
        match self.variant {
            Variant::Vanilla => (input, None),
            Variant::Noise => {
                input.extend((0..self.geometry().pixels()).map(|_| rng.sample::<f64, _>(StandardNormal)));
                (input, None)
            }
            Variant::Sympe => {
                let canon = prep.canon.as_ref().expect("SymPE inputs are prepared with a canonicalization");
                let g = sample_inversion_kernel(canon, rng);
                let v = self.v.as_ref().expect("SymPE model carries v");
                let e = self.geometry().pixel_action().apply(g, &v.values);
                input.extend(e.into_iter().map(|x| SYMPE_CHANNEL_GAIN * x));
                (input, Some(g))
            }
        }
    }

    /// Spin-up probabilities for one sampled forward pass.
    pub fn sample_probs(&self, prep: &Prepared, rng: &mut Rng) -> Vec<f64> {
        let (input, _) = self.build_input(prep, rng);
        self.net.predict(&input)
    }

    /// Loss, parameter gradient and `v` gradient for one sampled pass.
    fn loss_and_gradients(&self, prep: &Prepared, rng: &mut Rng) -> Result<(f64, Params, Option<Vec<f64>>)> {
        let (input, g) = self.build_input(prep, rng);
        let fwd = self.net.forward(&input);
        let (loss, dprobs) = loss_and_grad(&prep.instance, &fwd.probs)?;
        let plane = g.map(|_| IMAGE_CHANNELS);
        let (grad, dinput) = self.net.backward(&fwd, &dprobs, plane);
        // encoding e = g̃v, e[π(q)] = v[q]  ⇒  ∂/∂v[q] = ∂/∂e[π(q)]
        let dv = g.zip(dinput).map(|(g, de)| {
            let perm = self.geometry().pixel_action().site_perm(g);
            perm.iter().map(|&to| SYMPE_CHANNEL_GAIN * de[to as usize]).collect()
        });
        Ok((loss, grad, dv))
    }
}

#[derive(Clone, Debug)]
pub struct TrainState {
    pub config: TrainConfig,
    pub model: Model,
    /// Mean loss at the start of each epoch.
    pub loss_history: Vec<f64>,
}

/// Full-batch gradient descent on the mean expected energy of the corpus.
///
/// Initialization draws from stream 0 of the seed; the pass for instance `i`
/// in epoch `t` draws from stream `1 + t·n + i`, so results do not depend on
/// the thread count.
pub fn train(config: &TrainConfig, instances: &[IsingInstance]) -> Result<TrainState> {
    if instances.is_empty() {
        return Err(Error::InvalidParameter("empty training corpus".into()));
    }
    let geometry = Arc::new(Geometry::new(config.side)?);
    let mut init = rng::stream(config.seed, 0);
    let mut model = Model::new(config.variant, geometry, config.hidden, &mut init)?;
    let prepared = instances.iter().map(|inst| model.prepare(inst)).collect::<Result<Vec<_>>>()?;
    let n = prepared.len();
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let passes = prepared
            .par_iter()
            .enumerate()
            .map(|(i, prep)| {
                let mut rng = rng::stream(config.seed, 1 + (epoch * n + i) as u64);
                model.loss_and_gradients(prep, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let loss = passes.iter().map(|p| p.0).sum::<f64>() / n as f64;
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch, loss });
        }
        history.push(loss);
        let scale = -config.step / n as f64;
        for (_, grad, dv) in &passes {
            model.net.params.axpy(scale, grad);
            if let (Some(v), Some(dv)) = (model.v.as_mut(), dv) {
                v.values.iter_mut().zip(dv).for_each(|(x, d)| *x += scale * d);
            }
        }
        if !model.net.params.is_finite() {
            return Err(Error::Diverged { epoch, loss: f64::NAN });
        }
    }
    Ok(TrainState { config: *config, model, loss_history: history })
}

impl TrainState {
    /// Expected energy of one sampled forward pass on `instance`.
    pub fn expected_energy(&self, instance: &IsingInstance, rng: &mut Rng) -> Result<f64> {
        let prep = self.model.prepare(instance)?;
        expected_energy_loss(instance, &self.model.sample_probs(&prep, rng))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub per_instance: Vec<f64>,
}

pub const EVAL_SAMPLES: usize = 16;

/// Mean energy per site of sampled spin configurations: `samples` forward
/// passes per instance, one Bernoulli draw each. With `ood`, each instance is
/// first rotated a quarter turn with probability ½. Instance `i` draws from
/// stream `i` of `seed`.
pub fn evaluate(model: &Model, instances: &[IsingInstance], ood: bool, samples: usize, seed: u64) -> Result<EvalReport> {
    let p4m = model.geometry().p4m();
    let quarter = p4m.rotation90();
    let energies = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let mut rng = rng::stream(seed, i as u64);
            let inst = if ood && rng.random_bool(0.5) { inst.transform(p4m, quarter) } else { *inst };
            let prep = model.prepare(&inst)?;
            Ok((0..samples)
                .map(|_| {
                    let probs = model.sample_probs(&prep, &mut rng);
                    let spins: Vec<i8> = probs.iter().map(|&p| if rng.random::<f64>() < p { 1 } else { -1 }).collect();
                    energy_per_site(&inst, &SpinConfig::new(inst.side, spins).expect("spins are ±1"))
                })
                .collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let flat: Vec<f64> = energies.iter().flatten().copied().collect();
    let total = flat.len() as f64;
    let mean = flat.iter().sum::<f64>() / total;
    let var = flat.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (total - 1.0).max(1.0);
    let per_instance = energies.iter().map(|e| e.iter().sum::<f64>() / e.len() as f64).collect();
    Ok(EvalReport { mean, stderr: (var / total).sqrt(), samples: flat.len(), per_instance })
}

/// Instances with `Jx = −1`, `Jy ~ Unif(−3, 3)`, `h ~ Unif(0, 2)`.
pub fn training_corpus(side: usize, count: usize, seed: u64) -> Result<Vec<IsingInstance>> {
    let mut rng = rng::seeded(seed);
    (0..count)
        .map(|_| {
            let jy = rng.random_range(-3.0..3.0);
            let h = rng.random_range(0.0..2.0);
            IsingInstance::new(side, -1.0, jy, h)
        })
        .collect()
}

/// `k × k` regular grid over the same `(Jy, h)` box, `Jy` outermost.
pub fn test_grid(side: usize, k: usize) -> Result<Vec<IsingInstance>> {
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (k - 1).max(1) as f64;
    (0..k * k).map(|i| IsingInstance::new(side, -1.0, at(-3.0, 3.0, i / k), at(0.0, 2.0, i % k))).collect()
}

/// The fully p4m-symmetric antiferromagnet `Jx = Jy = −1, h = 0`.
pub fn afm_fixture(side: usize) -> Result<IsingInstance> {
    IsingInstance::new(side, -1.0, -1.0, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorCheck {
    pub name: String,
    pub entries: usize,
    /// `max |fd − analytic| / max |analytic|`.
    pub relative_error: f64,
}

/// Central finite differences of the expected-energy loss against the
/// manual backward pass, for every weight tensor and the last input plane.
pub fn gradient_check(net: &GroupConvNet, instance: &IsingInstance, input: &[f64], step: f64) -> Result<Vec<TensorCheck>> {
    let loss_of = |net: &GroupConvNet, input: &[f64]| expected_energy_loss(instance, &net.predict(input));
    let fwd = net.forward(input);
    let (_, dprobs) = loss_and_grad(instance, &fwd.probs)?;
    let plane = net.input_channels() - 1;
    let (grad, dinput) = net.backward(&fwd, &dprobs, Some(plane));

    let compare = |name: &str, analytic: &[f64], fd: Vec<f64>| {
        let worst = analytic.iter().zip(&fd).map(|(a, f)| (a - f).abs()).fold(0.0, f64::max);
        let scale = analytic.iter().map(|a| a.abs()).fold(0.0, f64::max).max(1e-12);
        TensorCheck { name: name.into(), entries: analytic.len(), relative_error: worst / scale }
    };

    let mut checks = Vec::new();
    for (t, name) in TENSOR_NAMES.iter().enumerate() {
        let len = net.params.tensors()[t].len();
        let mut fd = Vec::with_capacity(len);
        for k in 0..len {
            let mut probe = net.clone();
            probe.params.tensors_mut()[t][k] += step;
            let up = loss_of(&probe, input)?;
            probe.params.tensors_mut()[t][k] -= 2.0 * step;
            let down = loss_of(&probe, input)?;
            fd.push((up - down) / (2.0 * step));
        }
        checks.push(compare(name, grad.tensors()[t], fd));
    }
    let pixels = net.geometry().pixels();
    let fd = (0..pixels)
        .map(|q| {
            let mut probe = input.to_vec();
            probe[plane * pixels + q] += step;
            let up = loss_of(net, &probe)?;
            probe[plane * pixels + q] -= 2.0 * step;
            let down = loss_of(net, &probe)?;
            Ok((up - down) / (2.0 * step))
        })
        .collect::<Result<Vec<f64>>>()?;
    checks.push(compare("input", &dinput.expect("input gradient requested"), fd));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_round_trips_through_strings() {
        for v in Variant::ALL {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert!("mlp".parse::<Variant>().is_err());
    }

    #[test]
    fn zero_instance_has_zero_loss() {
        let cfg = TrainConfig { side: 4, epochs: 3, variant: Variant::Noise, ..TrainConfig::default() };
        let zero = IsingInstance::new(4, 0.0, 0.0, 0.0).unwrap();
        let state = train(&cfg, &[zero]).unwrap();
        assert!(state.loss_history.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let geo = Arc::new(Geometry::new(4).unwrap());
        let mut rng = rng::seeded(2);
        let net = GroupConvNet::new(geo.clone(), 3, 3, &mut rng).unwrap();
        let inst = IsingInstance::new(4, -1.0, 0.7, 0.4).unwrap();
        let mut input = image_encode(&inst);
        input.extend((0..geo.pixels()).map(|_| rng.random::<f64>()));
        for check in gradient_check(&net, &inst, &input, 1e-5).unwrap() {
            assert!(check.relative_error <= 1e-4, "{check:?}");
        }
    }

    #[test]
    fn grid_and_corpus_shapes() {
        let grid = test_grid(8, 8).unwrap();
        assert_eq!(grid.len(), 64);
        assert_eq!((grid[0].jy, grid[0].h), (-3.0, 0.0));
        assert_eq!((grid[63].jy, grid[63].h), (3.0, 2.0));
        let corpus = training_corpus(8, 64, 1).unwrap();
        assert!(corpus.iter().all(|i| i.jx == -1.0 && (-3.0..3.0).contains(&i.jy) && (0.0..2.0).contains(&i.h)));
    }
}
