//! Quadratic-time oracles for conjugation and Lipschitz regularization.

use crate::conjugation::{ConjugateMethod, ConjugateTable, GridFunction};
use crate::error::{Error, Result};
use crate::ext::{ExtReal, PosInf};
use crate::orlicz::{dot, norm};

/// Direct `sup_x ⟨s, x⟩ − g(x)` over every grid node for every dual node.
///
/// A value is flagged `+∞` when the input has at least two finite samples
/// and the maximiser is unique and sits on the boundary of the grid: the
/// sampled function gives no evidence that the supremum stops there.
pub fn grid_sup(g: &GridFunction, dual_axes: &[Vec<f64>]) -> Result<ConjugateTable> {
    if dual_axes.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: dual_axes.len(),
        });
    }
    let finite: Vec<(Vec<f64>, f64, bool)> = (0..g.len())
        .filter_map(|i| g.value(i).finite().map(|v| (g.point(i), v, g.on_boundary(i))))
        .collect();
    if finite.is_empty() {
        return Err(Error::AllInfinite);
    }
    let dual = GridFunction::new(dual_axes.to_vec(), vec![ExtReal::ZERO; dual_axes.iter().map(Vec::len).product()])?;
    let values = (0..dual.len())
        .map(|j| {
            let s = dual.point(j);
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            let mut unique = true;
            for (k, (x, v, _)) in finite.iter().enumerate() {
                let val = dot(&s, x) - v;
                if val > best {
                    best = val;
                    arg = k;
                    unique = true;
                } else if val == best {
                    unique = false;
                }
            }
            if finite.len() >= 2 && unique && finite[arg].2 {
                PosInf
            } else {
                ExtReal::from(best)
            }
        })
        .collect();
    Ok(ConjugateTable {
        input: g.clone(),
        dual: GridFunction::new(dual_axes.to_vec(), values)?,
        method: ConjugateMethod::GridSup,
    })
}

/// `min_y g(y) + λ‖x − y‖` by direct minimisation over all grid pairs.
pub fn lipschitz_envelope(g: &GridFunction, lambda: f64) -> Result<GridFunction> {
    let finite: Vec<(Vec<f64>, f64)> = (0..g.len())
        .filter_map(|i| g.value(i).finite().map(|v| (g.point(i), v)))
        .collect();
    if finite.is_empty() {
        return Err(Error::AllInfinite);
    }
    let values = (0..g.len())
        .map(|i| {
            let x = g.point(i);
            let best = finite
                .iter()
                .map(|(y, v)| {
                    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    v + lambda * norm(&d)
                })
                .fold(f64::INFINITY, f64::min);
            ExtReal::from(best)
        })
        .collect();
    GridFunction::new(g.axes().to_vec(), values)
}
