use std::collections::HashMap;

use super::histogram::output_key;
use super::numeric::symmetric_mean;
use crate::error::{Error, Result};
use crate::groups::GroupAction;

/// A vector-valued function tabulated on a finite point set.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedFunction {
    points: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    index: HashMap<Vec<u8>, usize>,
}

impl TabulatedFunction {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), actual: values.len() });
        }
        let index = points.iter().enumerate().map(|(i, p)| (output_key(p), i)).collect();
        Ok(Self { points, values, index })
    }

    pub fn from_fn(points: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let values = points.iter().map(|p| f(p)).collect();
        Self::new(points, values).expect("lengths agree by construction")
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.index.get(&output_key(x)).copied()
    }

    pub fn value_at(&self, x: &[f64]) -> Option<&[f64]> {
        self.position(x).map(|i| self.values[i].as_slice())
    }
}

/// `orbit_index[g][i]` = grid position of `g·points[i]`.
fn orbit_index(points: &[Vec<f64>], lookup: impl Fn(&[f64]) -> Option<usize>, action: &dyn GroupAction) -> Result<Vec<Vec<usize>>> {
    action
        .group()
        .elements()
        .map(|g| points.iter().map(|p| lookup(&action.apply(g, p)).ok_or(Error::GridNotClosed)).collect())
        .collect()
}

fn average_columns(terms: &[Vec<f64>]) -> Vec<f64> {
    let width = terms[0].len();
    let mut column = vec![0.0; terms.len()];
    (0..width)
        .map(|k| {
            for (slot, t) in column.iter_mut().zip(terms) {
                *slot = t[k];
            }
            symmetric_mean(&column)
        })
        .collect()
}

/// `(Rf)(x) = (1/|G|) Σ_g g⁻¹ f(gx)` at one point.
pub fn reynolds_average<F>(f: F, action_in: &dyn GroupAction, action_out: &dyn GroupAction, x: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let terms: Vec<Vec<f64>> = action_in
        .group()
        .elements()
        .map(|g| action_out.apply_inverse(g, &f(&action_in.apply(g, x))))
        .collect();
    average_columns(&terms)
}

/// Reynolds projection of a tabulated function. `action_in` is the (joint)
/// action on the grid points, which must be closed under it.
///
/// Averages are exactly rounded, so the result is exactly equivariant for
/// permutation and sign actions and the projection is exactly idempotent.
pub fn reynolds_project(
    f: &TabulatedFunction,
    action_in: &dyn GroupAction,
    action_out: &dyn GroupAction,
) -> Result<TabulatedFunction> {
    let moved = orbit_index(&f.points, |p| f.position(p), action_in)?;
    let group = action_in.group();
    let values = (0..f.len())
        .map(|i| {
            let terms: Vec<Vec<f64>> =
                group.elements().map(|g| action_out.apply_inverse(g, &f.values[moved[g.index()][i]])).collect();
            average_columns(&terms)
        })
        .collect();
    TabulatedFunction::new(f.points.clone(), values)
}

/// Exact check `f(gx) = g·f(x)` on every grid point.
pub fn is_equivariant_table(f: &TabulatedFunction, action_in: &dyn GroupAction, action_out: &dyn GroupAction) -> bool {
    action_in.group().elements().all(|g| {
        f.points.iter().zip(&f.values).all(|(x, fx)| {
            f.value_at(&action_in.apply(g, x)).is_some_and(|fgx| fgx == action_out.apply(g, fx).as_slice())
        })
    })
}

/// Conditional pmf `p(y | x)` tabulated on finite `x` and `y` sets.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    inputs: TabulatedFunction,
    outcomes: Vec<Vec<f64>>,
    outcome_index: HashMap<Vec<u8>, usize>,
}

/// Row-sum slack accepted as normalized.
const NORMALIZATION_SLACK: f64 = 1e-9;

impl KernelTable {
    /// `rows[i][j] = p(outcomes[j] | inputs[i])`.
    pub fn new(inputs: Vec<Vec<f64>>, outcomes: Vec<Vec<f64>>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != outcomes.len()) {
            return Err(Error::DimensionMismatch { expected: outcomes.len(), actual: r.len() });
        }
        for (row, r) in rows.iter().enumerate() {
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_SLACK || r.iter().any(|&p| p < 0.0) {
                return Err(Error::Unnormalized { row, sum });
            }
        }
        let outcome_index = outcomes.iter().enumerate().map(|(j, y)| (output_key(y), j)).collect();
        Ok(Self { inputs: TabulatedFunction::new(inputs, rows)?, outcomes, outcome_index })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        self.inputs.points()
    }

    pub fn outcomes(&self) -> &[Vec<f64>] {
        &self.outcomes
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        self.inputs.values()
    }

    pub fn probability(&self, y: &[f64], x: &[f64]) -> Option<f64> {
        let j = self.outcome_index.get(&output_key(y))?;
        self.inputs.value_at(x).map(|row| row[*j])
    }
}

/// `(Rp)(y|x) = (1/|G|) Σ_g p(gy | gx)`.
pub fn reynolds_project_kernel(
    p: &KernelTable,
    action_in: &dyn GroupAction,
    action_out: &dyn GroupAction,
) -> Result<KernelTable> {
    let xs = orbit_index(p.inputs(), |x| p.inputs.position(x), action_in)?;
    let ys = orbit_index(&p.outcomes, |y| p.outcome_index.get(&output_key(y)).copied(), action_out)?;
    let rows = p.rows();
    let order = action_in.group().order();
    let mut column = vec![0.0; order];
    let projected = (0..rows.len())
        .map(|i| {
            (0..p.outcomes.len())
                .map(|j| {
                    for (g, slot) in column.iter_mut().enumerate() {
                        *slot = rows[xs[g][i]][ys[g][j]];
                    }
                    symmetric_mean(&column)
                })
                .collect()
        })
        .collect();
    KernelTable::new(p.inputs().to_vec(), p.outcomes.clone(), projected)
}

/// Exact check `p(gy | gx) = p(y | x)` over the whole table.
pub fn is_equivariant_kernel(p: &KernelTable, action_in: &dyn GroupAction, action_out: &dyn GroupAction) -> bool {
    action_in.group().elements().all(|g| {
        p.inputs().iter().zip(p.rows()).all(|(x, row)| {
            let gx = action_in.apply(g, x);
            p.outcomes.iter().zip(row).all(|(y, &pyx)| p.probability(&action_out.apply(g, y), &gx) == Some(pyx))
        })
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::groups::{make_cyclic, orbit, LinearAction, PermutationAction};

    fn c2_sign() -> LinearAction {
        LinearAction::sign_flip(Arc::new(make_cyclic(2).unwrap()), 1).unwrap()
    }

    #[test]
    fn sign_flip_kills_constants() {
        let act = c2_sign();
        let f = TabulatedFunction::from_fn(vec![vec![0.5], vec![-0.5]], |_| vec![1.0]);
        let fbar = reynolds_project(&f, &act, &act).unwrap();
        assert!(fbar.values().iter().all(|v| v == &vec![0.0]));
    }

    #[test]
    fn equivariant_function_is_fixed() {
        let act = PermutationAction::natural(Arc::new(make_cyclic(3).unwrap()));
        let pts = orbit(&act, &[0.2, 0.5, 0.9]);
        let f = TabulatedFunction::from_fn(pts, |x| x.iter().map(|v| v * v).collect());
        assert!(is_equivariant_table(&f, &act, &act));
        assert_eq!(reynolds_project(&f, &act, &act).unwrap(), f);
    }

    #[test]
    fn open_grid_is_rejected() {
        let act = c2_sign();
        let f = TabulatedFunction::from_fn(vec![vec![0.5]], |_| vec![1.0]);
        assert_eq!(reynolds_project(&f, &act, &act).unwrap_err(), Error::GridNotClosed);
    }

    #[test]
    fn point_mass_kernel_becomes_half_half() {
        // C2 swaps the two inputs and the two outcomes; p ignores x.
        let act = PermutationAction::natural(Arc::new(make_cyclic(2).unwrap()));
        let xs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let ys = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let p = KernelTable::new(xs, ys, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(!is_equivariant_kernel(&p, &act, &act));
        let rp = reynolds_project_kernel(&p, &act, &act).unwrap();
        assert_eq!(rp.rows(), &[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(is_equivariant_kernel(&rp, &act, &act));
    }

    #[test]
    fn unnormalized_rows_rejected() {
        let err = KernelTable::new(vec![vec![0.0]], vec![vec![0.0], vec![1.0]], vec![vec![0.5, 0.6]]).unwrap_err();
        assert!(matches!(err, Error::Unnormalized { row: 0, .. }));
    }
}
