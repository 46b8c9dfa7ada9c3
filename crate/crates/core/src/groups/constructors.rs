use std::sync::Arc;

use super::{FiniteGroup, LinearAction};
use crate::error::{Error, Result};

pub const MAX_SYMMETRIC_DEGREE: usize = 8;

/// Cyclic group ℤ_n; element `k` shifts indices right by `k`.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidParameter("cyclic group order must be at least 1".into()));
    }
    let perms = (0..n)
        .map(|k| (0..n).map(|i| ((i + k) % n) as u32).collect())
        .collect();
    FiniteGroup::assemble(format!("C{n}"), perms)
}

/// All permutations of `0..n`, in lexicographic order.
pub fn make_symmetric(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidParameter("symmetric group degree must be at least 1".into()));
    }
    if n > MAX_SYMMETRIC_DEGREE {
        return Err(Error::TooLarge { what: format!("S{n}"), limit: MAX_SYMMETRIC_DEGREE });
    }
    FiniteGroup::assemble(format!("S{n}"), lexicographic_permutations(n))
}

pub(crate) fn lexicographic_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut current: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![current.clone()];
    // next permutation in lexicographic order
    while let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) {
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
    out
}

/// Dihedral group of order `2n` acting on the vertices of a regular n-gon.
pub fn make_dihedral(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::InvalidParameter("dihedral group needs n >= 3".into()));
    }
    let rotation: Vec<u32> = (0..n).map(|i| ((i + 1) % n) as u32).collect();
    let reflection: Vec<u32> = (0..n).map(|i| ((n - i) % n) as u32).collect();
    FiniteGroup::generate(format!("D{n}"), n, &[rotation, reflection])
}

/// Hyperoctahedral group of signed permutation matrices on `ℝ^n`, with its
/// defining linear action. The stored permutation representation acts on
/// the `2n` signed basis vectors (`2i ↔ +e_i`, `2i+1 ↔ -e_i`).
pub fn make_signed_permutations(n: usize) -> Result<(Arc<FiniteGroup>, LinearAction)> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidParameter("signed permutations supported for 1 <= n <= 4".into()));
    }
    let mut perms = Vec::new();
    let mut matrices = Vec::new();
    for sigma in lexicographic_permutations(n) {
        for mask in 0..(1u32 << n) {
            let mut perm = vec![0u32; 2 * n];
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                let target = sigma[i] as usize;
                let negative = mask >> i & 1 == 1;
                let (plus, minus) = if negative {
                    (2 * target + 1, 2 * target)
                } else {
                    (2 * target, 2 * target + 1)
                };
                perm[2 * i] = plus as u32;
                perm[2 * i + 1] = minus as u32;
                m[target * n + i] = if negative { -1.0 } else { 1.0 };
            }
            perms.push(perm);
            matrices.push(m);
        }
    }
    let group = Arc::new(FiniteGroup::assemble(format!("B{n}"), perms)?);
    let action = LinearAction::new(group.clone(), matrices, n)?;
    Ok((group, action))
}
