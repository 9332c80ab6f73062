//! Streams of observations and the piecewise-linear paths they generate.

use crate::error::{Error, Result};

/// Tolerance on the junction position when concatenating paths.
pub const ENDPOINT_TOLERANCE: f64 = 1e-9;

/// `n` observations of a `d`-dimensional quantity, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Stream {
    dim: usize,
    values: Vec<f64>,
}

impl Stream {
    /// Builds a stream from rows of equal width.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or_else(|| Error::Input("empty stream".into()))?;
        if dim == 0 {
            return Err(Error::Input("observations must have at least one coordinate".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Input(format!(
                    "row {} has {} coordinates, expected {dim}",
                    i + 1,
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(dim, values)
    }

    /// Builds a stream from row-major values.
    pub fn from_flat(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.is_empty() {
            return Err(Error::Input("empty stream".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::Input(format!("{} values do not form rows of width {dim}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("stream contains non-finite values".into()));
        }
        Ok(Stream { dim, values })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn first(&self) -> &[f64] {
        self.row(0)
    }

    pub fn last(&self) -> &[f64] {
        self.row(self.len() - 1)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// A continuous path given by linear interpolation between knots.
///
/// Knot times are strictly increasing. A single knot is a constant path.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearPath {
    dim: usize,
    times: Vec<f64>,
    positions: Vec<f64>,
}

impl PiecewiseLinearPath {
    pub fn new(times: Vec<f64>, positions: Vec<Vec<f64>>) -> Result<Self> {
        let dim = positions.first().map(Vec::len).ok_or_else(|| Error::Input("path needs at least one knot".into()))?;
        if positions.iter().any(|p| p.len() != dim) {
            return Err(Error::Input("knot positions have differing dimensions".into()));
        }
        Self::from_flat(dim, times, positions.concat())
    }

    fn from_flat(dim: usize, times: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if times.is_empty() || dim == 0 {
            return Err(Error::Input("path needs at least one knot of positive dimension".into()));
        }
        if times.len() * dim != positions.len() {
            return Err(Error::Input(format!(
                "{} times but {} position values at dimension {dim}",
                times.len(),
                positions.len()
            )));
        }
        if times.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
            return Err(Error::Input("knot times must be strictly increasing".into()));
        }
        if times.iter().chain(&positions).any(|v| !v.is_finite()) {
            return Err(Error::Input("path contains non-finite values".into()));
        }
        Ok(PiecewiseLinearPath { dim, times, positions })
    }

    /// Knots at consecutive integer times `0, 1, …`.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let times = (0..points.len()).map(|i| i as f64).collect();
        Self::new(times, points)
    }

    /// The interpolation of a stream: knot `i` sits at time `i` (1-based).
    pub fn from_stream(stream: &Stream) -> Self {
        let times = (1..=stream.len()).map(|i| i as f64).collect();
        PiecewiseLinearPath { dim: stream.dim(), times, positions: stream.values.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_knots(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn knot(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn knots(&self) -> impl Iterator<Item = &[f64]> {
        self.positions.chunks_exact(self.dim)
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Initial position `I(X)`.
    pub fn initial(&self) -> &[f64] {
        self.knot(0)
    }

    /// Tail position `T(X)`.
    pub fn tail(&self) -> &[f64] {
        self.knot(self.num_knots() - 1)
    }

    /// Per-segment increments, one row per segment.
    pub fn increments(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.positions
            .chunks_exact(self.dim)
            .zip(self.positions.chunks_exact(self.dim).skip(1))
            .map(|(a, b)| b.iter().zip(a).map(|(y, x)| y - x).collect())
    }

    /// Position at time `t`, or `None` outside the parameter interval.
    pub fn evaluate(&self, t: f64) -> Option<Vec<f64>> {
        if t < self.start_time() || t > self.end_time() {
            return None;
        }
        // index of the last knot with time <= t
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if i + 1 == self.num_knots() {
            return Some(self.knot(i).to_vec());
        }
        let lambda = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        let (a, b) = (self.knot(i), self.knot(i + 1));
        Some(a.iter().zip(b).map(|(x, y)| x + lambda * (y - x)).collect())
    }

    /// `self * other`: traverse `self`, then `other` with its times shifted to
    /// start where `self` ends. The junction knot is stored once.
    pub fn concat(&self, other: &PiecewiseLinearPath) -> Result<PiecewiseLinearPath> {
        if self.dim != other.dim {
            return Err(Error::Input(format!("cannot concatenate dimensions {} and {}", self.dim, other.dim)));
        }
        let gap = self
            .tail()
            .iter()
            .zip(other.initial())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if gap > ENDPOINT_TOLERANCE {
            return Err(Error::Precondition(format!(
                "tail of first path does not meet start of second (max coordinate deviation {gap:e})"
            )));
        }
        let shift = self.end_time() - other.start_time();
        let mut times = self.times.clone();
        times.extend(other.times[1..].iter().map(|t| t + shift));
        let mut positions = self.positions.clone();
        positions.extend_from_slice(&other.positions[self.dim..]);
        Ok(PiecewiseLinearPath { dim: self.dim, times, positions })
    }

    /// Time reversal on the same parameter interval.
    pub fn reverse(&self) -> PiecewiseLinearPath {
        let (a, b) = (self.start_time(), self.end_time());
        let times = self.times.iter().rev().map(|t| a + b - t).collect();
        let positions = self.positions.chunks_exact(self.dim).rev().flatten().copied().collect();
        PiecewiseLinearPath { dim: self.dim, times, positions }
    }

    pub fn translate(&self, offset: &[f64]) -> Result<PiecewiseLinearPath> {
        if offset.len() != self.dim {
            return Err(Error::Input(format!("offset has dimension {}, path has {}", offset.len(), self.dim)));
        }
        let positions = self
            .positions
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(offset).map(|(x, c)| x + c))
            .collect();
        Ok(PiecewiseLinearPath { dim: self.dim, times: self.times.clone(), positions })
    }

    /// Splits every segment into `pieces` equal collinear sub-segments.
    pub fn refine(&self, pieces: usize) -> Result<PiecewiseLinearPath> {
        if pieces < 1 {
            return Err(Error::Input("refinement needs at least one piece per segment".into()));
        }
        let mut times = vec![self.start_time()];
        let mut positions = self.initial().to_vec();
        for i in 1..self.num_knots() {
            let (t0, t1) = (self.times[i - 1], self.times[i]);
            let (a, b) = (self.knot(i - 1), self.knot(i));
            for j in 1..=pieces {
                if j == pieces {
                    times.push(t1);
                    positions.extend_from_slice(b);
                } else {
                    let lambda = j as f64 / pieces as f64;
                    times.push(t0 + lambda * (t1 - t0));
                    positions.extend(a.iter().zip(b).map(|(x, y)| x + lambda * (y - x)));
                }
            }
        }
        Ok(PiecewiseLinearPath { dim: self.dim, times, positions })
    }

    /// Appends a constant coordinate to every knot.
    pub(crate) fn with_appended_coordinate(&self, value: f64) -> PiecewiseLinearPath {
        let positions = self
            .positions
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().copied().chain(std::iter::once(value)))
            .collect();
        PiecewiseLinearPath { dim: self.dim + 1, times: self.times.clone(), positions }
    }
}

impl From<&Stream> for PiecewiseLinearPath {
    fn from(stream: &Stream) -> Self {
        PiecewiseLinearPath::from_stream(stream)
    }
}
