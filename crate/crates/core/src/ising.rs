//! The anisotropic Ising model on an `L × L` torus with constant couplings.
//!
//! `H(σ) = −Jx Σ σ(x,y)σ(x+1,y) − Jy Σ σ(x,y)σ(x,y+1) − h Σ σ(x,y)`, each
//! nearest-neighbor bond counted once, reported per site. Sites are row-major,
//! `index = y * L + x`, matching [`crate::groups::P4m`].

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::energies_tie;
use crate::error::{Error, Result};
use crate::format::format_g;
use crate::groups::{Element, GroupAction, P4m};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsingInstance {
    pub side: usize,
    pub jx: f64,
    pub jy: f64,
    pub h: f64,
}

impl IsingInstance {
    pub fn new(side: usize, jx: f64, jy: f64, h: f64) -> Result<Self> {
        if side < 2 || side % 2 == 1 {
            return Err(Error::InvalidParameter(format!("lattice side must be even and at least 2, got {side}")));
        }
        if !(jx.is_finite() && jy.is_finite() && h.is_finite()) {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        Ok(Self { side, jx, jy, h })
    }

    pub fn sites(&self) -> usize {
        self.side * self.side
    }

    /// `g·(J, h)`: constant couplings are only permuted between the axes.
    pub fn transform(&self, p4m: &P4m, g: Element) -> Self {
        if p4m.label(g).swaps_axes() {
            Self { jx: self.jy, jy: self.jx, ..*self }
        } else {
            *self
        }
    }
}

/// Spins in `{−1, +1}`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SpinConfig {
    side: usize,
    values: Vec<i8>,
}

impl SpinConfig {
    pub fn new(side: usize, values: Vec<i8>) -> Result<Self> {
        if values.len() != side * side {
            return Err(Error::DimensionMismatch { expected: side * side, actual: values.len() });
        }
        if values.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("spins must be exactly ±1".into()));
        }
        Ok(Self { side, values })
    }

    fn from_fn(side: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let values = (0..side * side).map(|i| if f(i % side, i / side) { 1 } else { -1 }).collect();
        Self { side, values }
    }

    pub fn uniform(side: usize, up: bool) -> Self {
        Self::from_fn(side, |_, _| up)
    }

    /// `+1` on sites with `x + y` even when `phase` is true.
    pub fn checkerboard(side: usize, phase: bool) -> Self {
        Self::from_fn(side, |x, y| ((x + y) % 2 == 0) == phase)
    }

    /// Rows alternate in sign; `+1` on even rows when `phase` is true.
    pub fn row_stripes(side: usize, phase: bool) -> Self {
        Self::from_fn(side, |_, y| (y % 2 == 0) == phase)
    }

    /// Columns alternate in sign; `+1` on even columns when `phase` is true.
    pub fn column_stripes(side: usize, phase: bool) -> Self {
        Self::from_fn(side, |x, _| (x % 2 == 0) == phase)
    }

    /// Bit `i` set means spin `i` is `+1`.
    pub fn from_bits(side: usize, bits: u64) -> Self {
        Self::from_fn(side, |x, y| bits >> (y * side + x) & 1 == 1)
    }

    /// Thresholds a real vector at zero (`≥ 0 ↦ +1`).
    pub fn from_signs(side: usize, v: &[f64]) -> Result<Self> {
        Self::new(side, v.iter().map(|&s| if s >= 0.0 { 1 } else { -1 }).collect())
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.values[(y % self.side) * self.side + x % self.side]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn flipped(&self) -> Self {
        Self { side: self.side, values: self.values.iter().map(|s| -s).collect() }
    }

    /// `(gσ)(g·i) = σ(i)`.
    pub fn transform(&self, p4m: &P4m, g: Element) -> Self {
        let moved = p4m.site_action().apply(g, &self.to_f64());
        Self::from_signs(self.side, &moved).expect("permutation preserves shape")
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.values.chunks(self.side) {
            let line: String = row.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Integer bond and magnetization sums `(Σ σσ_x̂, Σ σσ_ŷ, Σ σ)`.
fn sums(sigma: &SpinConfig) -> (i64, i64, i64) {
    let l = sigma.side;
    let (mut sx, mut sy, mut m) = (0i64, 0i64, 0i64);
    for y in 0..l {
        for x in 0..l {
            let s = i64::from(sigma.get(x, y));
            sx += s * i64::from(sigma.get(x + 1, y));
            sy += s * i64::from(sigma.get(x, y + 1));
            m += s;
        }
    }
    (sx, sy, m)
}

fn energy_from_sums(inst: &IsingInstance, (sx, sy, m): (i64, i64, i64)) -> f64 {
    -(inst.jx * sx as f64 + inst.jy * sy as f64 + inst.h * m as f64) / inst.sites() as f64
}

pub fn energy_per_site(inst: &IsingInstance, sigma: &SpinConfig) -> f64 {
    assert_eq!(inst.side, sigma.side, "instance and configuration sizes differ");
    energy_from_sums(inst, sums(sigma))
}

/// One-hot bond states over `[(1,1), (1,−1), (−1,1), (−1,−1)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bonds {
    pub side: usize,
    /// Bond from site `i` to its `+x` neighbor.
    pub horizontal: Vec<[u8; 4]>,
    /// Bond from site `i` to its `+y` neighbor.
    pub vertical: Vec<[u8; 4]>,
}

const BOND_STATES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn one_hot(a: i8, b: i8) -> [u8; 4] {
    let mut v = [0u8; 4];
    v[BOND_STATES.iter().position(|&s| s == (a, b)).expect("spins are ±1")] = 1;
    v
}

pub fn spins_to_bonds(sigma: &SpinConfig) -> Bonds {
    let l = sigma.side;
    let site = |i: usize| (i % l, i / l);
    let horizontal = (0..l * l).map(|i| {
        let (x, y) = site(i);
        one_hot(sigma.get(x, y), sigma.get(x + 1, y))
    });
    let vertical = (0..l * l).map(|i| {
        let (x, y) = site(i);
        one_hot(sigma.get(x, y), sigma.get(x, y + 1))
    });
    Bonds { side: l, horizontal: horizontal.collect(), vertical: vertical.collect() }
}

/// Recovers `σ` from bonds, checking that every bond incident to a site
/// agrees on that site's spin.
pub fn bonds_to_spins(b: &Bonds) -> Result<SpinConfig> {
    let l = b.side;
    let n = l * l;
    if b.horizontal.len() != n || b.vertical.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: b.horizontal.len().min(b.vertical.len()) });
    }
    let decode = |v: &[u8; 4], which: &str, i: usize| -> Result<(i8, i8)> {
        match v.iter().position(|&e| e == 1) {
            Some(k) if v.iter().sum::<u8>() == 1 => Ok(BOND_STATES[k]),
            _ => Err(Error::InfeasibleBonds(format!("{which} bond {i} is not one-hot"))),
        }
    };
    let mut spins = vec![0i8; n];
    let mut assign = |i: usize, s: i8| -> Result<()> {
        if spins[i] != 0 && spins[i] != s {
            return Err(Error::InfeasibleBonds(format!("bonds disagree on the spin at site {i}")));
        }
        spins[i] = s;
        Ok(())
    };
    for i in 0..n {
        let (x, y) = (i % l, i / l);
        let (a, c) = decode(&b.horizontal[i], "horizontal", i)?;
        assign(i, a)?;
        assign(y * l + (x + 1) % l, c)?;
        let (a, c) = decode(&b.vertical[i], "vertical", i)?;
        assign(i, a)?;
        assign(((y + 1) % l) * l + x, c)?;
    }
    SpinConfig::new(l, spins)
}

/// Total energy in bond variables, the field split evenly across the two
/// bond families: each bond carries `−(Jα s s' + (h/4)(s + s'))`.
pub fn bond_energy(inst: &IsingInstance, b: &Bonds) -> Result<f64> {
    bonds_to_spins(b)?;
    let coeffs = |j: f64| -> [f64; 4] {
        let coupling = [1.0, -1.0, -1.0, 1.0];
        let field = [1.0, 0.0, 0.0, -1.0];
        std::array::from_fn(|k| -(j * coupling[k] + 0.5 * inst.h * field[k]))
    };
    let (cx, cy) = (coeffs(inst.jx), coeffs(inst.jy));
    let dot = |v: &[u8; 4], c: &[f64; 4]| -> f64 { v.iter().zip(c).map(|(&e, &w)| f64::from(e) * w).sum() };
    let total = b.horizontal.iter().map(|v| dot(v, &cx)).sum::<f64>() + b.vertical.iter().map(|v| dot(v, &cy)).sum::<f64>();
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhaseLabel {
    Fm,
    Afm,
    /// Column-alternating: antialigned along x, aligned along y.
    StripesX,
    /// Row-alternating: aligned along x, antialigned along y.
    StripesY,
    Boundary,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fm => "FM",
            Self::Afm => "AFM",
            Self::StripesX => "STRIPES_X",
            Self::StripesY => "STRIPES_Y",
            Self::Boundary => "BOUNDARY",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundState {
    pub phase: PhaseLabel,
    /// Phases whose candidate energies tie at the minimum (one unless on a
    /// boundary).
    pub tied: Vec<PhaseLabel>,
    pub configs: Vec<SpinConfig>,
    pub energy_per_site: f64,
}

/// The four ordered candidates for `h ≥ 0`: their minimum is the ground state
/// energy on any even torus.
fn candidates(l: usize, h_zero: bool) -> [(PhaseLabel, Vec<SpinConfig>); 4] {
    let fm = if h_zero {
        vec![SpinConfig::uniform(l, true), SpinConfig::uniform(l, false)]
    } else {
        vec![SpinConfig::uniform(l, true)]
    };
    [
        (PhaseLabel::Fm, fm),
        (PhaseLabel::Afm, vec![SpinConfig::checkerboard(l, true), SpinConfig::checkerboard(l, false)]),
        (PhaseLabel::StripesX, vec![SpinConfig::column_stripes(l, true), SpinConfig::column_stripes(l, false)]),
        (PhaseLabel::StripesY, vec![SpinConfig::row_stripes(l, true), SpinConfig::row_stripes(l, false)]),
    ]
}

pub fn analytic_ground_state(inst: &IsingInstance) -> GroundState {
    let flip = inst.h < 0.0;
    let reduced = IsingInstance { h: inst.h.abs(), ..*inst };
    let scored: Vec<(PhaseLabel, Vec<SpinConfig>, f64)> = candidates(inst.side, reduced.h == 0.0)
        .into_iter()
        .map(|(phase, configs)| {
            let e = energy_per_site(&reduced, &configs[0]);
            (phase, configs, e)
        })
        .collect();
    let min = scored.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let winners: Vec<&(PhaseLabel, Vec<SpinConfig>, f64)> =
        scored.iter().filter(|c| energies_tie(min, c.2)).collect();
    let tied: Vec<PhaseLabel> = winners.iter().map(|c| c.0).collect();
    let mut configs: Vec<SpinConfig> = winners.iter().flat_map(|c| c.1.iter().cloned()).collect();
    if flip {
        configs = configs.iter().map(SpinConfig::flipped).collect();
    }
    let phase = if tied.len() == 1 { tied[0] } else { PhaseLabel::Boundary };
    GroundState { phase, tied, configs, energy_per_site: min }
}

pub const BRUTE_FORCE_MAX_SITES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForce {
    pub energy_per_site: f64,
    pub argmin: Vec<SpinConfig>,
}

/// Exhaustive minimum over all `2^{L²}` configurations.
pub fn brute_force_ground_state(inst: &IsingInstance, max_sites: usize) -> Result<BruteForce> {
    let n = inst.sites();
    if n > max_sites || n > 40 {
        return Err(Error::TooLarge { what: format!("{n} sites"), limit: max_sites.min(40) });
    }
    let energies: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| energy_from_sums(inst, sums(&SpinConfig::from_bits(inst.side, bits))))
        .collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| energies_tie(min, e))
        .map(|(bits, _)| SpinConfig::from_bits(inst.side, bits as u64))
        .collect();
    Ok(BruteForce { energy_per_site: min, argmin })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderParams {
    pub o_fm: f64,
    pub o_afm: f64,
    pub o_sx: f64,
    pub o_sy: f64,
}

impl OrderParams {
    pub fn abs(&self) -> Self {
        Self { o_fm: self.o_fm.abs(), o_afm: self.o_afm.abs(), o_sx: self.o_sx.abs(), o_sy: self.o_sy.abs() }
    }

    pub fn of(&self, phase: PhaseLabel) -> Option<f64> {
        match phase {
            PhaseLabel::Fm => Some(self.o_fm),
            PhaseLabel::Afm => Some(self.o_afm),
            PhaseLabel::StripesX => Some(self.o_sx),
            PhaseLabel::StripesY => Some(self.o_sy),
            PhaseLabel::Boundary => None,
        }
    }
}

pub fn order_parameters(sigma: &SpinConfig) -> OrderParams {
    let l = sigma.side;
    let (mut fm, mut afm, mut sx, mut sy) = (0i64, 0i64, 0i64, 0i64);
    for y in 0..l {
        for x in 0..l {
            let s = i64::from(sigma.get(x, y));
            let sign = |k: usize| if k.is_multiple_of(2) { s } else { -s };
            fm += s;
            afm += sign(x + y);
            sx += sign(x);
            sy += sign(y);
        }
    }
    let n = (l * l) as f64;
    OrderParams { o_fm: fm as f64 / n, o_afm: afm as f64 / n, o_sx: sx as f64 / n, o_sy: sy as f64 / n }
}

pub const IMAGE_CHANNELS: usize = 2;

/// Two-channel `2L × 2L` image, channel-major, pixel index `v * 2L + u`:
/// channel 0 holds `Jx` at `(2x+1, 2y)` and `Jy` at `(2x, 2y+1)`, channel 1
/// holds `h` at `(2x, 2y)`; every other pixel is zero.
pub fn image_encode(inst: &IsingInstance) -> Vec<f64> {
    let l = inst.side;
    let w = 2 * l;
    let plane = w * w;
    let mut img = vec![0.0; IMAGE_CHANNELS * plane];
    for y in 0..l {
        for x in 0..l {
            img[(2 * y) * w + 2 * x + 1] = inst.jx;
            img[(2 * y + 1) * w + 2 * x] = inst.jy;
            img[plane + (2 * y) * w + 2 * x] = inst.h;
        }
    }
    img
}

/// Pixel index of lattice site `i` in the image plane.
pub fn site_pixel(side: usize, i: usize) -> usize {
    let (x, y) = (i % side, i / side);
    (2 * y) * (2 * side) + 2 * x
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub jy: f64,
    pub h: f64,
    pub phase: PhaseLabel,
    pub o_fm: f64,
    pub o_afm: f64,
    pub o_sx: f64,
    pub energy_per_site: f64,
}

/// Rectangular `(Jy, h)` grid at fixed `Jx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseGrid {
    pub side: usize,
    pub jx: f64,
    pub jy_range: (f64, f64),
    pub h_range: (f64, f64),
    pub jy_steps: usize,
    pub h_steps: usize,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self { side: 4, jx: -1.0, jy_range: (-3.0, 3.0), h_range: (0.0, 2.0), jy_steps: 61, h_steps: 41 }
    }
}

fn linspace((lo, hi): (f64, f64), steps: usize, k: usize) -> f64 {
    if k + 1 == steps { hi } else { lo + (hi - lo) * k as f64 / (steps - 1) as f64 }
}

/// Analytic ground state at every grid point, `Jy` outermost. Order
/// parameters are absolute values on the first representative.
pub fn phase_diagram(grid: &PhaseGrid) -> Result<Vec<PhaseRecord>> {
    if grid.jy_steps < 2 || grid.h_steps < 2 {
        return Err(Error::InvalidParameter("grid resolution must be at least 2 in each direction".into()));
    }
    IsingInstance::new(grid.side, grid.jx, 0.0, 0.0)?;
    let records = (0..grid.jy_steps * grid.h_steps)
        .into_par_iter()
        .map(|k| {
            let jy = linspace(grid.jy_range, grid.jy_steps, k / grid.h_steps);
            let h = linspace(grid.h_range, grid.h_steps, k % grid.h_steps);
            let inst = IsingInstance { side: grid.side, jx: grid.jx, jy, h };
            let gs = analytic_ground_state(&inst);
            let o = order_parameters(&gs.configs[0]).abs();
            PhaseRecord { jy, h, phase: gs.phase, o_fm: o.o_fm, o_afm: o.o_afm, o_sx: o.o_sx, energy_per_site: gs.energy_per_site }
        })
        .collect();
    Ok(records)
}

pub const PHASE_CSV_HEADER: &str = "jy,h,phase,o_fm,o_afm,o_sx,energy_per_site";

pub fn write_phase_csv(records: &[PhaseRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{PHASE_CSV_HEADER}")?;
    for r in records {
        let g = |v: f64| format_g(v, 9);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            g(r.jy),
            g(r.h),
            r.phase,
            g(r.o_fm),
            g(r.o_afm),
            g(r.o_sx),
            g(r.energy_per_site)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::make_p4m;

    fn inst(l: usize, jx: f64, jy: f64, h: f64) -> IsingInstance {
        IsingInstance::new(l, jx, jy, h).unwrap()
    }

    /// Term-by-term Hamiltonian, independent of the bond-sum shortcut.
    fn direct(inst: &IsingInstance, s: &SpinConfig) -> f64 {
        let l = inst.side;
        let mut e = 0.0;
        for y in 0..l {
            for x in 0..l {
                let v = f64::from(s.get(x, y));
                e -= inst.jx * v * f64::from(s.get(x + 1, y));
                e -= inst.jy * v * f64::from(s.get(x, y + 1));
                e -= inst.h * v;
            }
        }
        e / (l * l) as f64
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy_per_site(&inst(4, 1.0, 1.0, 0.5), &SpinConfig::uniform(4, true)), -2.5);
        assert_eq!(energy_per_site(&inst(4, -1.0, -1.0, 0.0), &SpinConfig::checkerboard(4, true)), -2.0);
        let s = SpinConfig::from_bits(4, 0xB3C5);
        assert_eq!(energy_per_site(&inst(4, 0.0, 0.0, 0.0), &s), 0.0);
        let i = inst(4, 0.3, -1.1, 0.7);
        assert!((energy_per_site(&i, &s) - direct(&i, &s)).abs() < 1e-14);
    }

    #[test]
    fn analytic_examples() {
        let fm = analytic_ground_state(&inst(4, 1.0, 1.0, 0.5));
        assert_eq!((fm.phase, fm.energy_per_site), (PhaseLabel::Fm, -2.5));
        assert_eq!(fm.configs, vec![SpinConfig::uniform(4, true)]);

        let afm = analytic_ground_state(&inst(4, -1.0, -1.0, 0.0));
        assert_eq!((afm.phase, afm.energy_per_site, afm.configs.len()), (PhaseLabel::Afm, -2.0, 2));

        let sy = analytic_ground_state(&inst(4, 1.0, -2.0, 0.0));
        assert_eq!((sy.phase, sy.energy_per_site), (PhaseLabel::StripesY, -3.0));
        assert!(sy.configs.contains(&SpinConfig::row_stripes(4, true)));
    }

    #[test]
    fn negative_field_flips() {
        let gs = analytic_ground_state(&inst(4, 1.0, 1.0, -0.5));
        assert_eq!(gs.configs, vec![SpinConfig::uniform(4, false)]);
        assert_eq!(gs.energy_per_site, -2.5);
    }

    #[test]
    fn zero_coupling_is_a_boundary() {
        let gs = analytic_ground_state(&inst(4, 0.0, -1.0, 0.0));
        assert_eq!(gs.phase, PhaseLabel::Boundary);
        assert_eq!(gs.tied, vec![PhaseLabel::Afm, PhaseLabel::StripesY]);
    }

    #[test]
    fn brute_force_small_cases() {
        let bf = brute_force_ground_state(&inst(2, 1.0, 1.0, 0.0), BRUTE_FORCE_MAX_SITES).unwrap();
        assert_eq!(bf.energy_per_site, -2.0);
        assert_eq!(bf.argmin, vec![SpinConfig::uniform(2, false), SpinConfig::uniform(2, true)]);
        let zero = brute_force_ground_state(&inst(2, 0.0, 0.0, 0.0), BRUTE_FORCE_MAX_SITES).unwrap();
        assert_eq!(zero.argmin.len(), 16);
        assert!(brute_force_ground_state(&inst(6, 1.0, 1.0, 0.0), BRUTE_FORCE_MAX_SITES).is_err());
    }

    #[test]
    fn bond_form_agrees() {
        let i = inst(4, 0.7, -1.3, 0.4);
        for bits in [0u64, 0xFFFF, 0x5A5A, 0x1234] {
            let s = SpinConfig::from_bits(4, bits);
            let total = bond_energy(&i, &spins_to_bonds(&s)).unwrap();
            assert!((total - 16.0 * energy_per_site(&i, &s)).abs() < 1e-12);
        }
        let up = spins_to_bonds(&SpinConfig::uniform(4, true));
        assert!(up.horizontal.iter().chain(&up.vertical).all(|b| b == &[1, 0, 0, 0]));
    }

    #[test]
    fn checkerboard_bonds_alternate() {
        let b = spins_to_bonds(&SpinConfig::checkerboard(4, true));
        assert_eq!(b.horizontal[0], [0, 1, 0, 0]);
        assert_eq!(b.horizontal[1], [0, 0, 1, 0]);
    }

    #[test]
    fn infeasible_bonds_rejected() {
        let mut b = spins_to_bonds(&SpinConfig::uniform(4, true));
        b.horizontal[3] = [0, 0, 0, 1];
        assert!(matches!(bond_energy(&inst(4, 1.0, 1.0, 0.0), &b), Err(Error::InfeasibleBonds(_))));
        b.horizontal[3] = [1, 1, 0, 0];
        assert!(matches!(bonds_to_spins(&b), Err(Error::InfeasibleBonds(_))));
    }

    #[test]
    fn order_parameter_examples() {
        let up = order_parameters(&SpinConfig::uniform(4, true));
        assert_eq!(up, OrderParams { o_fm: 1.0, o_afm: 0.0, o_sx: 0.0, o_sy: 0.0 });
        assert_eq!(order_parameters(&SpinConfig::checkerboard(4, true)).o_afm, 1.0);
        assert_eq!(order_parameters(&SpinConfig::row_stripes(4, true)).o_sy, 1.0);
    }

    #[test]
    fn rotation_swaps_couplings_and_translation_flips_checkerboard() {
        let p = make_p4m(4).unwrap();
        let r = inst(4, 1.0, -2.0, 0.3).transform(&p, p.rotation90());
        assert_eq!((r.jx, r.jy), (-2.0, 1.0));
        let cb = SpinConfig::checkerboard(4, true);
        let moved = cb.transform(&p, p.translation(1, 0));
        assert_eq!(moved, cb.flipped());
        assert_eq!(order_parameters(&moved).o_afm, -1.0);
    }

    #[test]
    fn image_layout() {
        let img = image_encode(&inst(2, 1.0, 2.0, 3.0));
        assert_eq!(img.len(), 32);
        let (ch0, ch1) = img.split_at(16);
        assert_eq!(ch0.iter().filter(|&&v| v == 1.0).count(), 4);
        assert_eq!(ch0.iter().filter(|&&v| v == 2.0).count(), 4);
        assert_eq!(ch1.iter().filter(|&&v| v == 3.0).count(), 4);
        assert_eq!(ch0[5], 0.0);
        assert_eq!(ch1[5], 0.0);
        assert!(image_encode(&inst(4, 0.0, 0.0, 0.0)).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phase_diagram_slice() {
        let grid = PhaseGrid { jy_steps: 7, h_steps: 3, ..PhaseGrid::default() };
        let rows = phase_diagram(&grid).unwrap();
        assert_eq!(rows.len(), 21);
        assert!(rows.iter().all(|r| r.phase != PhaseLabel::Fm));
        let at = |jy: f64, h: f64| rows.iter().find(|r| r.jy == jy && r.h == h).unwrap();
        assert_eq!(at(2.0, 1.0).phase, PhaseLabel::StripesX);
        assert_eq!(at(-2.0, 0.0).phase, PhaseLabel::Afm);
        assert_eq!(at(0.0, 1.0).phase, PhaseLabel::Boundary);
        let mut csv = Vec::new();
        write_phase_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("jy,h,phase,o_fm,o_afm,o_sx,energy_per_site\n-3,0,AFM,0,1,0,-4\n"));
    }
}
