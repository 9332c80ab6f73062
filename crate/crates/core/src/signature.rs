//! Signatures and log-signatures of piecewise-linear paths.
//!
//! A linear segment with increment `v` has signature `exp(Σ vᵢ eᵢ)`; the
//! signature of the whole path is the left-to-right tensor product of its
//! segment signatures (Chen's identity). [`iterated_integral_oracle`] is an
//! independent quadrature of the defining recursion, used to cross-check.

use crate::path::PiecewiseLinearPath;
use crate::tensor::{TensorSeries, Word};

/// Signature of a straight segment: the tensor exponential of its increment.
///
/// Level `k` is the `k`-fold outer power of `increment` divided by `k!`,
/// which is what the exponential series reduces to for a level-one argument.
pub fn segment_signature(increment: &[f64], depth: usize) -> TensorSeries {
    let alphabet = increment.len();
    let mut levels: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 1..=depth {
        let prev = &levels[k - 1];
        let mut next = Vec::with_capacity(prev.len() * alphabet);
        for &a in prev {
            next.extend(increment.iter().map(|&v| a * v / k as f64));
        }
        levels.push(next);
    }
    let flat: Vec<f64> = levels.concat();
    TensorSeries::unflatten(alphabet, depth, &flat, true).expect("segment levels have the declared shape")
}

/// Truncated signature of `path` at `depth`.
pub fn signature(path: &PiecewiseLinearPath, depth: usize) -> TensorSeries {
    path.increments().fold(TensorSeries::unit(path.dim(), depth), |acc, inc| {
        acc.mul(&segment_signature(&inc, depth)).expect("segments share the path's shape")
    })
}

/// Truncated log-signature, kept in tensor-algebra coordinates.
pub fn log_signature(path: &PiecewiseLinearPath, depth: usize) -> TensorSeries {
    signature(path, depth).log().expect("signatures have unit constant term")
}

/// Iterated integral `S^w` of `path` by direct quadrature of
/// `S_k(t) = ∫ S_{k-1} dX^{w_k}` with the trapezoidal rule on a grid of
/// `steps` sub-intervals per segment.
///
/// Letters outside the path's dimension yield an integrand of zero.
pub fn iterated_integral_oracle(path: &PiecewiseLinearPath, word: &Word, steps: usize) -> f64 {
    let steps = steps.max(1);
    let dim = path.dim();
    // sample every coordinate on the grid
    let mut grid: Vec<Vec<f64>> = vec![path.initial().to_vec()];
    for i in 1..path.num_knots() {
        let (a, b) = (path.knot(i - 1), path.knot(i));
        for j in 1..=steps {
            let s = j as f64 / steps as f64;
            grid.push((0..dim).map(|c| a[c] * (1.0 - s) + b[c] * s).collect());
        }
    }

    let mut running = vec![1.0; grid.len()];
    for &letter in word.letters() {
        let coord = letter.wrapping_sub(1);
        let mut next = vec![0.0; grid.len()];
        for n in 1..grid.len() {
            let dx = if coord < dim { grid[n][coord] - grid[n - 1][coord] } else { 0.0 };
            next[n] = next[n - 1] + 0.5 * (running[n - 1] + running[n]) * dx;
        }
        running = next;
    }
    *running.last().unwrap()
}
