use std::sync::Arc;

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{make_p4m, Element, P4m, P4mLabel, PermutationAction};
use crate::rng::Rng;

/// Offsets of the lifting stencil: the 3×3 pixel patch around a site.
const STENCIL: usize = 9;

/// Group neighborhood of the group convolution: the point group at the
/// identity and at the four nearest lattice translations.
const NEIGHBOR_TRANSLATIONS: [(i64, i64); 5] = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)];
const NEIGHBORHOOD: usize = 5 * 8;

/// Index tables shared by every network on the same lattice.
#[derive(Debug)]
pub struct Geometry {
    p4m: P4m,
    pixel_action: PermutationAction,
    order: usize,
    sites: usize,
    pixels: usize,
    /// `lift[g * STENCIL + k]`: pixel `g·u_k`.
    lift: Vec<u32>,
    /// `conv[g * NEIGHBORHOOD + j]`: element `g s_j`.
    conv: Vec<u32>,
    /// Site `g·0`; the elements sending the origin to a site form its coset.
    site_of: Vec<u32>,
}

impl Geometry {
    pub fn new(side: usize) -> Result<Self> {
        let p4m = make_p4m(side)?;
        let pixel_action = p4m.pixel_action(1)?;
        let group = p4m.group().clone();
        let order = group.order();
        let w = 2 * side as i64;
        let stencil: Vec<usize> = (-1..=1)
            .flat_map(|dv: i64| (-1..=1).map(move |du: i64| (dv.rem_euclid(w) * w + du.rem_euclid(w)) as usize))
            .collect();
        let l = side as i64;
        let neighborhood: Vec<Element> = NEIGHBOR_TRANSLATIONS
            .iter()
            .flat_map(|&(tx, ty)| (0..8u8).map(move |r| (tx, ty, r)))
            .map(|(tx, ty, r)| {
                let label = P4mLabel {
                    tx: tx.rem_euclid(l) as usize,
                    ty: ty.rem_euclid(l) as usize,
                    rotation: r % 4,
                    reflect: r >= 4,
                };
                p4m.find(label).expect("stencil element present")
            })
            .collect();
        let mut lift = Vec::with_capacity(order * STENCIL);
        let mut conv = Vec::with_capacity(order * NEIGHBORHOOD);
        let mut site_of = Vec::with_capacity(order);
        for g in group.elements() {
            let perm = pixel_action.site_perm(g);
            lift.extend(stencil.iter().map(|&u| perm[u]));
            conv.extend(neighborhood.iter().map(|&s| group.compose(g, s).0));
            site_of.push(group.perm(g)[0]);
        }
        Ok(Self { p4m, pixel_action, order, sites: side * side, pixels: (2 * side) * (2 * side), lift, conv, site_of })
    }

    pub fn p4m(&self) -> &P4m {
        &self.p4m
    }

    pub fn side(&self) -> usize {
        self.p4m.side()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn pixels(&self) -> usize {
        self.pixels
    }

    /// Pixel action on one image plane.
    pub fn pixel_action(&self) -> &PermutationAction {
        &self.pixel_action
    }
}

/// Weight tensors, each flat and row-major in the order of its shape.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    /// `[hidden][in][STENCIL]`
    pub lift: Vec<f64>,
    pub lift_bias: Vec<f64>,
    /// `[hidden][hidden][NEIGHBORHOOD]`
    pub conv: Vec<f64>,
    pub conv_bias: Vec<f64>,
    /// `[hidden]`
    pub head: Vec<f64>,
    pub head_bias: Vec<f64>,
}

pub const TENSOR_NAMES: [&str; 6] = ["lift", "lift_bias", "conv", "conv_bias", "head", "head_bias"];

impl Params {
    pub fn zeros(input_channels: usize, hidden: usize) -> Self {
        Self {
            lift: vec![0.0; hidden * input_channels * STENCIL],
            lift_bias: vec![0.0; hidden],
            conv: vec![0.0; hidden * hidden * NEIGHBORHOOD],
            conv_bias: vec![0.0; hidden],
            head: vec![0.0; hidden],
            head_bias: vec![0.0; 1],
        }
    }

    pub fn tensors(&self) -> [&Vec<f64>; 6] {
        [&self.lift, &self.lift_bias, &self.conv, &self.conv_bias, &self.head, &self.head_bias]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [&mut self.lift, &mut self.lift_bias, &mut self.conv, &mut self.conv_bias, &mut self.head, &mut self.head_bias]
    }

    /// `self += scale · other`.
    pub fn axpy(&mut self, scale: f64, other: &Params) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}

/// Lifting layer, one group convolution, and a per-site sigmoid head that
/// averages each site's coset.
#[derive(Clone, Debug)]
pub struct GroupConvNet {
    geometry: Arc<Geometry>,
    input_channels: usize,
    hidden: usize,
    pub params: Params,
}

/// Activations kept for the backward pass.
#[derive(Clone, Debug)]
pub struct Forward {
    input: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
    pooled: Vec<f64>,
    pub probs: Vec<f64>,
}

pub const MAX_HIDDEN: usize = 8;

/// Weight scale at initialization. Smaller values start every unit in the
/// linear regime of `tanh` and training stalls at the `m = 0` saddle.
pub const INIT_GAIN: f64 = 3.0;

impl GroupConvNet {
    /// Uniform weights scaled by `INIT_GAIN/sqrt(fan_in)`; zero biases.
    pub fn new(geometry: Arc<Geometry>, input_channels: usize, hidden: usize, rng: &mut Rng) -> Result<Self> {
        if hidden == 0 || hidden > MAX_HIDDEN {
            return Err(Error::InvalidParameter(format!("hidden width must be in 1..={MAX_HIDDEN}, got {hidden}")));
        }
        let mut params = Params::zeros(input_channels, hidden);
        let mut fill = |t: &mut Vec<f64>, fan_in: usize| {
            let scale = INIT_GAIN / (fan_in as f64).sqrt();
            t.iter_mut().for_each(|w| *w = scale * rng.random_range(-1.0..1.0));
        };
        fill(&mut params.lift, input_channels * STENCIL);
        fill(&mut params.conv, hidden * NEIGHBORHOOD);
        fill(&mut params.head, hidden);
        Ok(Self { geometry, input_channels, hidden, params })
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geometry
    }

    pub fn input_channels(&self) -> usize {
        self.input_channels
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    /// Spin-up probabilities, one per lattice site.
    pub fn predict(&self, image: &[f64]) -> Vec<f64> {
        self.forward(image).probs
    }

    pub fn forward(&self, image: &[f64]) -> Forward {
        let geo = &*self.geometry;
        let (order, pixels, hidden, cin) = (geo.order, geo.pixels, self.hidden, self.input_channels);
        assert_eq!(image.len(), cin * pixels, "image has wrong size for this network");
        let p = &self.params;

        let mut a1 = vec![0.0; hidden * order];
        for g in 0..order {
            let idx = &geo.lift[g * STENCIL..(g + 1) * STENCIL];
            for c in 0..hidden {
                let mut z = p.lift_bias[c];
                for ci in 0..cin {
                    let plane = &image[ci * pixels..(ci + 1) * pixels];
                    let k = &p.lift[(c * cin + ci) * STENCIL..(c * cin + ci + 1) * STENCIL];
                    z += k.iter().zip(idx).map(|(w, &u)| w * plane[u as usize]).sum::<f64>();
                }
                a1[c * order + g] = z.tanh();
            }
        }

        let mut a2 = vec![0.0; hidden * order];
        let mut gathered = vec![0.0; hidden * NEIGHBORHOOD];
        for g in 0..order {
            let idx = &geo.conv[g * NEIGHBORHOOD..(g + 1) * NEIGHBORHOOD];
            for c in 0..hidden {
                for (j, &s) in idx.iter().enumerate() {
                    gathered[c * NEIGHBORHOOD + j] = a1[c * order + s as usize];
                }
            }
            for d in 0..hidden {
                let w = &p.conv[d * hidden * NEIGHBORHOOD..(d + 1) * hidden * NEIGHBORHOOD];
                let z = p.conv_bias[d] + w.iter().zip(&gathered).map(|(a, b)| a * b).sum::<f64>();
                a2[d * order + g] = z.tanh();
            }
        }

        let sites = geo.sites;
        let coset = (order / sites) as f64;
        let mut pooled = vec![0.0; hidden * sites];
        for d in 0..hidden {
            for g in 0..order {
                pooled[d * sites + geo.site_of[g] as usize] += a2[d * order + g];
            }
        }
        pooled.iter_mut().for_each(|v| *v /= coset);
        let probs = (0..sites)
            .map(|s| {
                let logit = p.head_bias[0] + (0..hidden).map(|d| p.head[d] * pooled[d * sites + s]).sum::<f64>();
                sigmoid(logit)
            })
            .collect();
        Forward { input: image.to_vec(), a1, a2, pooled, probs }
    }

    /// Gradients of a loss with `∂loss/∂probs = dprobs`. Returns parameter
    /// gradients and, if asked, the gradient with respect to input plane
    /// `input_plane`.
    pub fn backward(&self, fwd: &Forward, dprobs: &[f64], input_plane: Option<usize>) -> (Params, Option<Vec<f64>>) {
        let geo = &*self.geometry;
        let (order, pixels, hidden, cin, sites) = (geo.order, geo.pixels, self.hidden, self.input_channels, geo.sites);
        let p = &self.params;
        let mut grad = Params::zeros(cin, hidden);
        let coset = (order / sites) as f64;

        let dlogit: Vec<f64> = fwd.probs.iter().zip(dprobs).map(|(q, d)| d * q * (1.0 - q)).collect();
        grad.head_bias[0] = dlogit.iter().sum();
        for d in 0..hidden {
            grad.head[d] = (0..sites).map(|s| dlogit[s] * fwd.pooled[d * sites + s]).sum();
        }

        let mut dz2 = vec![0.0; hidden * order];
        for d in 0..hidden {
            for g in 0..order {
                let a = fwd.a2[d * order + g];
                let da = dlogit[geo.site_of[g] as usize] * p.head[d] / coset;
                dz2[d * order + g] = da * (1.0 - a * a);
            }
            grad.conv_bias[d] = dz2[d * order..(d + 1) * order].iter().sum();
        }

        let mut da1 = vec![0.0; hidden * order];
        for g in 0..order {
            let idx = &geo.conv[g * NEIGHBORHOOD..(g + 1) * NEIGHBORHOOD];
            for d in 0..hidden {
                let dz = dz2[d * order + g];
                if dz == 0.0 {
                    continue;
                }
                for c in 0..hidden {
                    let off = (d * hidden + c) * NEIGHBORHOOD;
                    for (j, &s) in idx.iter().enumerate() {
                        let s = c * order + s as usize;
                        grad.conv[off + j] += dz * fwd.a1[s];
                        da1[s] += dz * p.conv[off + j];
                    }
                }
            }
        }

        let mut dinput = input_plane.map(|_| vec![0.0; pixels]);
        for c in 0..hidden {
            let mut bias = 0.0;
            for g in 0..order {
                let a = fwd.a1[c * order + g];
                let dz = da1[c * order + g] * (1.0 - a * a);
                bias += dz;
                let idx = &geo.lift[g * STENCIL..(g + 1) * STENCIL];
                for ci in 0..cin {
                    let plane = &fwd.input[ci * pixels..(ci + 1) * pixels];
                    let off = (c * cin + ci) * STENCIL;
                    for (k, &u) in idx.iter().enumerate() {
                        grad.lift[off + k] += dz * plane[u as usize];
                    }
                    if let (Some(dx), Some(plane_idx)) = (dinput.as_mut(), input_plane) {
                        if plane_idx == ci {
                            for (k, &u) in idx.iter().enumerate() {
                                dx[u as usize] += dz * p.lift[off + k];
                            }
                        }
                    }
                }
            }
            grad.lift_bias[c] = bias;
        }
        (grad, dinput)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupAction;
    use crate::rng;

    fn random_image(n: usize, rng: &mut Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn equivariant_on_all_of_p4m4() {
        let geo = Arc::new(Geometry::new(4).unwrap());
        let mut rng = rng::seeded(0);
        let net = GroupConvNet::new(geo.clone(), 3, 3, &mut rng).unwrap();
        let img = random_image(3 * geo.pixels(), &mut rng);
        let out = net.predict(&img);
        let images = geo.pixel_action().with_channels(3);
        let sites = geo.p4m().site_action();
        for g in geo.p4m().group().elements() {
            let moved = net.predict(&images.apply(g, &img));
            let expected = sites.apply(g, &out);
            let err = moved.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-9, "element {g}: {err}");
        }
    }

    #[test]
    fn stencil_tables_have_expected_shape() {
        let geo = Geometry::new(4).unwrap();
        assert_eq!(geo.lift.len(), 128 * STENCIL);
        assert_eq!(geo.conv.len(), 128 * NEIGHBORHOOD);
        // identity: stencil centered on pixel 0; neighborhood starts at e
        assert_eq!(geo.lift[4], 0);
        assert_eq!(geo.conv[0], 0);
        // every coset has the size of the point group
        let mut counts = [0; 16];
        geo.site_of.iter().for_each(|&s| counts[s as usize] += 1);
        assert!(counts.iter().all(|&c| c == 8));
    }
}
