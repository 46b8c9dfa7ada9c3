use crate::error::{Error, Result};
use crate::ising::IsingInstance;

/// Mean-field energy per site of independent spins with `P(σ_s = +1) = p_s`:
/// `−(1/N)[Jx Σ m_s m_{s+x̂} + Jy Σ m_s m_{s+ŷ} + h Σ m_s]`, `m = 2p − 1`.
pub fn expected_energy_loss(inst: &IsingInstance, probs: &[f64]) -> Result<f64> {
    Ok(loss_and_grad(inst, probs)?.0)
}

/// Loss together with `∂loss/∂p_s`.
pub fn loss_and_grad(inst: &IsingInstance, probs: &[f64]) -> Result<(f64, Vec<f64>)> {
    let l = inst.side;
    let n = l * l;
    if probs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: probs.len() });
    }
    if probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::ProbabilityOutOfRange);
    }
    let m: Vec<f64> = probs.iter().map(|p| 2.0 * p - 1.0).collect();
    let at = |x: usize, y: usize| m[(y % l) * l + x % l];
    let mut e = 0.0;
    let mut grad = vec![0.0; n];
    for y in 0..l {
        for x in 0..l {
            let s = m[y * l + x];
            e += inst.jx * s * at(x + 1, y) + inst.jy * s * at(x, y + 1) + inst.h * s;
            let field = inst.jx * (at(x + 1, y) + at(x + l - 1, y)) + inst.jy * (at(x, y + 1) + at(x, y + l - 1)) + inst.h;
            grad[y * l + x] = -2.0 * field / n as f64;
        }
    }
    Ok((-e / n as f64, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(jx: f64, jy: f64, h: f64) -> IsingInstance {
        IsingInstance::new(4, jx, jy, h).unwrap()
    }

    #[test]
    fn half_probabilities_give_zero() {
        assert_eq!(expected_energy_loss(&inst(0.3, -2.0, 1.1), &[0.5; 16]).unwrap(), 0.0);
    }

    #[test]
    fn saturated_ferromagnet_approaches_ground_energy() {
        let e = expected_energy_loss(&inst(1.0, 1.0, 0.5), &[1.0 - 1e-12; 16]).unwrap();
        assert!((e + 2.5).abs() < 1e-10);
    }

    #[test]
    fn rejects_closed_interval() {
        assert_eq!(expected_energy_loss(&inst(1.0, 1.0, 0.0), &[1.0; 16]), Err(Error::ProbabilityOutOfRange));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let i = inst(0.7, -1.3, 0.4);
        let p: Vec<f64> = (0..16).map(|k| 0.05 + 0.9 * ((k * 7 % 16) as f64) / 16.0).collect();
        let (_, g) = loss_and_grad(&i, &p).unwrap();
        let h = 1e-6;
        for k in 0..16 {
            let mut up = p.clone();
            let mut dn = p.clone();
            up[k] += h;
            dn[k] -= h;
            let fd = (expected_energy_loss(&i, &up).unwrap() - expected_energy_loss(&i, &dn).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).abs() <= 1e-5 * g[k].abs().max(1e-3), "site {k}: {fd} vs {}", g[k]);
        }
    }
}
