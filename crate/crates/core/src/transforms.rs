//! Stream transformations applied before signature extraction.
//!
//! The visibility transformations append one coordinate, always the last,
//! that flags whether the path lies on the visibility plane (`1`) or the
//! invisibility plane (`0`).
//!
//! - I-visibility starts at the origin, runs on the invisibility plane to the
//!   first observation, then rises onto the visibility plane and follows the data.
//! - T-visibility follows the data on the visibility plane, drops to the
//!   invisibility plane at the last observation, then returns to the origin.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::path::{PiecewiseLinearPath, Stream};

/// Which endpoint a visibility transformation anchors to the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Visibility {
    /// Initial-position variant: prefix from the origin.
    I,
    /// Tail-position variant: suffix back to the origin.
    T,
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::I => "I",
            Visibility::T => "T",
        })
    }
}

/// One step of a transform chain.
///
/// The text form is used on the command line: `time`, `leadlag`, `vis_i`,
/// `vis_t`, `basepoint`, `scale:<factor>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransformSpec {
    Time,
    LeadLag,
    VisI,
    VisT,
    Basepoint,
    Scale(f64),
}

impl TransformSpec {
    pub fn is_visibility(&self) -> bool {
        matches!(self, TransformSpec::VisI | TransformSpec::VisT)
    }

    /// Output dimension for an input of dimension `dim`.
    pub fn output_dim(&self, dim: usize) -> usize {
        match self {
            TransformSpec::Time | TransformSpec::VisI | TransformSpec::VisT => dim + 1,
            TransformSpec::LeadLag => 2 * dim,
            TransformSpec::Basepoint | TransformSpec::Scale(_) => dim,
        }
    }

    pub fn apply(&self, stream: &Stream) -> Result<Stream> {
        match *self {
            TransformSpec::Time => Ok(time_augment(stream)),
            TransformSpec::LeadLag => lead_lag(stream),
            TransformSpec::VisI => Ok(visibility_i_discrete(stream)),
            TransformSpec::VisT => Ok(visibility_t_discrete(stream)),
            TransformSpec::Basepoint => Ok(basepoint(stream)),
            TransformSpec::Scale(factor) => Ok(scale(stream, factor)),
        }
    }

    /// Parses a comma-separated chain such as `time,leadlag,vis_i`.
    /// The empty string is the empty chain.
    pub fn parse_chain(text: &str) -> Result<Vec<TransformSpec>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let chain = text.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
        validate_chain(&chain)?;
        Ok(chain)
    }

    pub fn format_chain(chain: &[TransformSpec]) -> String {
        chain.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

impl FromStr for TransformSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "time" => Ok(TransformSpec::Time),
            "leadlag" => Ok(TransformSpec::LeadLag),
            "vis_i" => Ok(TransformSpec::VisI),
            "vis_t" => Ok(TransformSpec::VisT),
            "basepoint" => Ok(TransformSpec::Basepoint),
            _ => match s.strip_prefix("scale:") {
                Some(factor) => {
                    let factor: f64 = factor
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid scale factor {factor:?}")))?;
                    if !factor.is_finite() {
                        return Err(Error::Config(format!("scale factor must be finite, got {factor}")));
                    }
                    Ok(TransformSpec::Scale(factor))
                }
                None => Err(Error::Config(format!("unknown transform {s:?}"))),
            },
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::Time => f.write_str("time"),
            TransformSpec::LeadLag => f.write_str("leadlag"),
            TransformSpec::VisI => f.write_str("vis_i"),
            TransformSpec::VisT => f.write_str("vis_t"),
            TransformSpec::Basepoint => f.write_str("basepoint"),
            TransformSpec::Scale(factor) => write!(f, "scale:{factor}"),
        }
    }
}

/// A visibility transform may appear at most once, and only as the last step.
pub fn validate_chain(chain: &[TransformSpec]) -> Result<()> {
    let visible: Vec<usize> = chain.iter().enumerate().filter(|(_, t)| t.is_visibility()).map(|(i, _)| i).collect();
    if visible.len() > 1 {
        return Err(Error::Config("at most one visibility transform per chain".into()));
    }
    if let Some(&i) = visible.first() {
        if i + 1 != chain.len() {
            return Err(Error::Config(format!("{} must be the last transform in the chain", chain[i])));
        }
    }
    Ok(())
}

/// Applies `chain` left to right.
pub fn apply_chain(stream: &Stream, chain: &[TransformSpec]) -> Result<Stream> {
    validate_chain(chain)?;
    chain.iter().try_fold(stream.clone(), |s, t| t.apply(&s))
}

/// Output dimension of `chain` for inputs of dimension `dim`.
pub fn chain_output_dim(chain: &[TransformSpec], dim: usize) -> usize {
    chain.iter().fold(dim, |d, t| t.output_dim(d))
}

fn build(dim: usize, rows: impl IntoIterator<Item = Vec<f64>>) -> Stream {
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    Stream::from_flat(dim, values).expect("transform output is non-empty and rectangular")
}

fn with_flag(row: &[f64], flag: f64) -> Vec<f64> {
    let mut v = row.to_vec();
    v.push(flag);
    v
}

/// Discrete I-visibility: `0`, `(x₁, 0)`, `(x₁, 1)`, …, `(xₙ, 1)`.
pub fn visibility_i_discrete(stream: &Stream) -> Stream {
    let d = stream.dim();
    let head = [vec![0.0; d + 1], with_flag(stream.first(), 0.0)];
    build(d + 1, head.into_iter().chain(stream.rows().map(|r| with_flag(r, 1.0))))
}

/// Discrete T-visibility: `(x₁, 1)`, …, `(xₙ, 1)`, `(xₙ, 0)`, `0`.
pub fn visibility_t_discrete(stream: &Stream) -> Stream {
    let d = stream.dim();
    let tail = [with_flag(stream.last(), 0.0), vec![0.0; d + 1]];
    build(d + 1, stream.rows().map(|r| with_flag(r, 1.0)).chain(tail))
}

pub fn visibility_discrete(stream: &Stream, variant: Visibility) -> Stream {
    match variant {
        Visibility::I => visibility_i_discrete(stream),
        Visibility::T => visibility_t_discrete(stream),
    }
}

/// The prefix `f_{x0}`: origin → `(x0, 0)` → `(x0, 1)` at times 0, ½, 1.
pub fn visibility_prefix_path(x0: &[f64]) -> PiecewiseLinearPath {
    let d = x0.len();
    let mut rise = with_flag(x0, 0.0);
    let run = rise.clone();
    rise[d] = 1.0;
    PiecewiseLinearPath::new(vec![0.0, 0.5, 1.0], vec![vec![0.0; d + 1], run, rise])
        .expect("prefix path is well formed")
}

/// The suffix `(x1, 1)` → `(x1, 0)` → origin, the reversal of the prefix at `x1`.
pub fn visibility_suffix_path(x1: &[f64]) -> PiecewiseLinearPath {
    visibility_prefix_path(x1).reverse()
}

/// `L_X`: the path with a constant trailing coordinate `1`.
pub fn lift_visible(path: &PiecewiseLinearPath) -> PiecewiseLinearPath {
    path.with_appended_coordinate(1.0)
}

/// Continuous visibility transformation: `f_{I(X)} * L_X` or `L_X * suffix(T(X))`.
pub fn visibility_lift(path: &PiecewiseLinearPath, variant: Visibility) -> PiecewiseLinearPath {
    let lifted = lift_visible(path);
    let joined = match variant {
        Visibility::I => visibility_prefix_path(path.initial()).concat(&lifted),
        Visibility::T => lifted.concat(&visibility_suffix_path(path.tail())),
    };
    joined.expect("visibility segments meet the lifted path exactly")
}

/// Prepends a time coordinate normalised to `[0, 1]` (`0` for a single observation).
pub fn time_augment(stream: &Stream) -> Stream {
    let n = stream.len();
    let rows = stream.rows().enumerate().map(|(i, r)| {
        let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        std::iter::once(t).chain(r.iter().copied()).collect()
    });
    build(stream.dim() + 1, rows)
}

/// Lead-lag transform with columns `[lead, lag]` and `2n - 1` rows: the lead
/// half steps to `x_{i+1}` before the lag half follows.
pub fn lead_lag(stream: &Stream) -> Result<Stream> {
    let n = stream.len();
    if n < 2 {
        return Err(Error::Input(format!("lead-lag needs at least 2 observations, got {n}")));
    }
    let mut rows = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        let x = stream.row(i);
        rows.push([x, x].concat());
        if i + 1 < n {
            rows.push([stream.row(i + 1), x].concat());
        }
    }
    Ok(build(2 * stream.dim(), rows))
}

/// Prepends an observation at the origin.
pub fn basepoint(stream: &Stream) -> Stream {
    let d = stream.dim();
    build(d, std::iter::once(vec![0.0; d]).chain(stream.rows().map(<[f64]>::to_vec)))
}

pub fn scale(stream: &Stream, factor: f64) -> Stream {
    build(stream.dim(), stream.rows().map(|r| r.iter().map(|v| v * factor).collect()))
}
