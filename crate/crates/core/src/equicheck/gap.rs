use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::numeric::exact_sum;
use super::reynolds::reynolds_average;
use crate::error::{Error, Result};
use crate::groups::{Element, GroupAction};
use crate::rng::{self, Rng};

/// Monte Carlo estimates of `R(f)`, `R(f̄)` and `‖f⊥‖²` under squared loss.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub samples: usize,
    pub risk_f: f64,
    pub risk_fbar: f64,
    pub orth_norm_sq: f64,
    /// Standard error of the per-sample residual `‖f−y‖² − ‖f̄−y‖² − ‖f−f̄‖²`,
    /// the quantity whose mean the identity claims is zero.
    pub monte_carlo_stderr: f64,
    /// Standard error of the per-sample risk difference.
    pub gap_stderr: f64,
}

impl GapReport {
    pub fn gap(&self) -> f64 {
        self.risk_f - self.risk_fbar
    }

    pub fn residual(&self) -> f64 {
        self.gap() - self.orth_norm_sq
    }

    /// `|Δ − ‖f⊥‖²| ≤ 4·stderr`, with a rounding floor for the degenerate
    /// zero-variance case.
    pub fn identity_holds(&self) -> bool {
        let floor = 1e-12 * self.risk_f.abs().max(1.0);
        self.residual().abs() <= 4.0 * self.monte_carlo_stderr + floor
    }
}

/// Joint actions and sampling budget for [`generalization_gap`].
pub struct GapSetup<'a> {
    pub action_x: &'a dyn GroupAction,
    pub action_z: &'a dyn GroupAction,
    pub action_y: &'a dyn GroupAction,
    pub samples: usize,
    pub seed: u64,
}

const CHUNK: usize = 1024;

/// Estimates the generalization gap of `f(x, z)` against its projection
/// `f̄(x, z) = (1/|G|) Σ_g g⁻¹ f(gx, gz)`.
///
/// `sample_x` is symmetrized by a uniform group element, so the input law is
/// invariant whatever the caller's sampler. `sample_z` must be an equivariant
/// kernel and `sample_y` an equivariant ground truth.
pub fn generalization_gap<F, X, Z, Y>(f: F, sample_x: X, sample_z: Z, sample_y: Y, setup: &GapSetup) -> Result<GapReport>
where
    F: Fn(&[f64], &[f64]) -> Vec<f64> + Sync,
    X: Fn(&mut Rng) -> Vec<f64> + Sync,
    Z: Fn(&[f64], &mut Rng) -> Vec<f64> + Sync,
    Y: Fn(&[f64], &mut Rng) -> Vec<f64> + Sync,
{
    let n = setup.samples;
    if n < 100 {
        return Err(Error::TooFewSamples(n));
    }
    let (ax, az, ay) = (setup.action_x, setup.action_z, setup.action_y);
    let group = ax.group();
    let dx = ax.dim();
    let joint = JointAction { x: ax, z: az };
    let f_joint = |xz: &[f64]| f(&xz[..dx], &xz[dx..]);

    // (‖f−y‖², ‖f̄−y‖², ‖f−f̄‖²) per sample
    let rows: Vec<[f64; 3]> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = rng::stream(setup.seed, chunk as u64);
            let end = ((chunk + 1) * CHUNK).min(n);
            (chunk * CHUNK..end)
                .map(|_| {
                    let base = sample_x(&mut rng);
                    let g = Element(rng.random_range(0..group.order() as u32));
                    let x = ax.apply(g, &base);
                    let z = sample_z(&x, &mut rng);
                    let y = sample_y(&x, &mut rng);
                    let mut xz = x;
                    xz.extend_from_slice(&z);
                    let fx = f_joint(&xz);
                    let fbar = reynolds_average(f_joint, &joint, ay, &xz);
                    [sq_dist(&fx, &y), sq_dist(&fbar, &y), sq_dist(&fx, &fbar)]
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let column = |k: usize| rows.iter().map(move |r| r[k]);
    let mean = |it: &mut dyn Iterator<Item = f64>| exact_sum(it) / n as f64;
    let risk_f = mean(&mut column(0));
    let risk_fbar = mean(&mut column(1));
    let orth_norm_sq = mean(&mut column(2));
    let residual: Vec<f64> = rows.iter().map(|r| r[0] - r[1] - r[2]).collect();
    let gap: Vec<f64> = rows.iter().map(|r| r[0] - r[1]).collect();
    Ok(GapReport {
        samples: n,
        risk_f,
        risk_fbar,
        orth_norm_sq,
        monte_carlo_stderr: stderr(&residual),
        gap_stderr: stderr(&gap),
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

fn stderr(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = exact_sum(values.iter().copied()) / n;
    let var = exact_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    (var / n).sqrt()
}

/// Diagonal action on concatenated `(x, z)`.
struct JointAction<'a> {
    x: &'a dyn GroupAction,
    z: &'a dyn GroupAction,
}

impl GroupAction for JointAction<'_> {
    fn group(&self) -> &std::sync::Arc<crate::groups::FiniteGroup> {
        self.x.group()
    }

    fn dim(&self) -> usize {
        self.x.dim() + self.z.dim()
    }

    fn apply(&self, g: Element, xz: &[f64]) -> Vec<f64> {
        let (x, z) = xz.split_at(self.x.dim());
        let mut out = self.x.apply(g, x);
        out.extend(self.z.apply(g, z));
        out
    }

    fn kind(&self) -> crate::groups::ActionKind {
        self.x.kind()
    }
}
