//! Numerical checks of the identities satisfied by signatures of concatenated
//! and visibility-transformed paths.
//!
//! Each check computes both sides of an identity through independent routes
//! and reports the largest absolute coefficient deviation. Tolerances are
//! absolute because many exact coefficients are zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::path::PiecewiseLinearPath;
use crate::signature::signature;
use crate::tensor::{TensorSeries, Word};
use crate::transforms::{
    visibility_discrete, visibility_lift, visibility_prefix_path, visibility_suffix_path, Visibility,
};

/// Absolute tolerance for identities involving signature products.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Absolute tolerance for the level-one corollary and exact rearrangements.
pub const TIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub max_abs_error: f64,
    pub num_coefficients: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    /// Builds a report from `(left, right)` coefficient pairs.
    pub fn from_pairs(name: impl Into<String>, tolerance: f64, pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut max_abs_error: f64 = 0.0;
        let mut num_coefficients = 0;
        for (lhs, rhs) in pairs {
            let err = (lhs - rhs).abs();
            // NaN must fail the check
            max_abs_error = if err.is_nan() { f64::NAN } else { max_abs_error.max(err) };
            num_coefficients += 1;
        }
        Self::from_error(name, tolerance, max_abs_error, num_coefficients)
    }

    fn from_error(name: impl Into<String>, tolerance: f64, max_abs_error: f64, num_coefficients: usize) -> Self {
        CheckReport {
            name: name.into(),
            max_abs_error,
            num_coefficients,
            tolerance,
            passed: num_coefficients > 0 && max_abs_error <= tolerance,
        }
    }

    fn from_series(name: impl Into<String>, tolerance: f64, a: &TensorSeries, b: &TensorSeries) -> Self {
        Self::from_pairs(name, tolerance, a.as_slice().iter().copied().zip(b.as_slice().iter().copied()))
    }

    /// Re-evaluates `passed` against another tolerance.
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self::from_error(self.name, tolerance, self.max_abs_error, self.num_coefficients)
    }

    /// Worst case of two reports; keeps this report's name and tolerance.
    pub fn merge(self, other: &CheckReport) -> Self {
        let max = if self.max_abs_error.is_nan() || other.max_abs_error.is_nan() {
            f64::NAN
        } else {
            self.max_abs_error.max(other.max_abs_error)
        };
        Self::from_error(self.name, self.tolerance, max, self.num_coefficients + other.num_coefficients)
    }
}

fn vis_series(path: &PiecewiseLinearPath, variant: Visibility, depth: usize) -> TensorSeries {
    signature(&visibility_lift(path, variant), depth)
}

fn c(t: &TensorSeries, w: &Word) -> f64 {
    t.coeff(w).expect("word fits the series")
}

/// Decomposition of the lifted signature over splits of each word.
///
/// For every word `J` over `1..=d+1` with `|J| ≤ depth`, compares the lifted
/// signature against `Σ S_f^{J₁} S_X^{J₂}` over splits `(J₁|J₂) = J` with
/// `d+1 ∉ J₂` (I), or `Σ S_X^{J₁} S_g^{J₂}` with `d+1 ∉ J₁` (T). Here `f` and
/// `g` are the three-knot prefix and suffix paths; the concatenated path is
/// never formed on the right-hand side.
pub fn check_general2(path: &PiecewiseLinearPath, variant: Visibility, depth: usize) -> CheckReport {
    let d = path.dim();
    let vis = d + 1;
    let lhs = vis_series(path, variant, depth);
    let sx = signature(path, depth);
    let sf = match variant {
        Visibility::I => signature(&visibility_prefix_path(path.initial()), depth),
        Visibility::T => signature(&visibility_suffix_path(path.tail()), depth),
    };
    let pairs = Word::all(vis, depth).map(|word| {
        let rhs: f64 = word
            .splits()
            .filter_map(|(head, rest)| match variant {
                Visibility::I if !rest.contains(vis) => Some(c(&sf, &head) * c(&sx, &rest)),
                Visibility::T if !head.contains(vis) => Some(c(&sx, &head) * c(&sf, &rest)),
                _ => None,
            })
            .sum();
        (c(&lhs, &word), rhs)
    });
    CheckReport::from_pairs(format!("general2_{variant}"), DEFAULT_TOLERANCE, pairs)
}

fn monomial(position: &[f64], word: &Word) -> f64 {
    let factorial: f64 = (1..=word.len()).map(|k| k as f64).product();
    word.letters().iter().map(|&l| position[l - 1]).product::<f64>() / factorial
}

/// The four closed forms for words with the visibility letter at one end,
/// over all `J` in `1..=d` with `|J| ≤ depth - 1`:
///
/// - `general1_a`: `S(γ_I)^{(d+1|J)} = S_X^J`
/// - `general1_b`: `S(γ_I)^{(J|d+1)} = Π_{j∈J} X₀^j / |J|!`
/// - `general1_c`: `S(γ_T)^{(J|d+1)} = -S_X^J`
/// - `general1_d`: `S(γ_T)^{(d+1|J)} = (-1)^{|J|+1} Π_{j∈J} X₁^j / |J|!`
///
/// The suffix path descends the visibility coordinate by one before moving
/// anything else, which is where the minus sign in `general1_c` comes from.
pub fn general1_identities(path: &PiecewiseLinearPath, depth: usize) -> [CheckReport; 4] {
    let d = path.dim();
    let vis = Word::from([d + 1]);
    let short = depth.saturating_sub(1);
    let si = vis_series(path, Visibility::I, depth);
    let st = vis_series(path, Visibility::T, depth);
    let sx = signature(path, depth);
    let (x0, x1) = (path.initial(), path.tail());
    let words = || Word::all(d, short);

    [
        CheckReport::from_pairs(
            "general1_a",
            DEFAULT_TOLERANCE,
            words().map(|j| (c(&si, &vis.concat(&j)), c(&sx, &j))),
        ),
        CheckReport::from_pairs(
            "general1_b",
            DEFAULT_TOLERANCE,
            words().map(|j| (c(&si, &j.concat(&vis)), monomial(x0, &j))),
        ),
        CheckReport::from_pairs(
            "general1_c",
            DEFAULT_TOLERANCE,
            words().map(|j| (c(&st, &j.concat(&vis)), -c(&sx, &j))),
        ),
        CheckReport::from_pairs(
            "general1_d",
            DEFAULT_TOLERANCE,
            words().map(|j| {
                let sign = if j.len() % 2 == 0 { -1.0 } else { 1.0 };
                (c(&st, &vis.concat(&j)), sign * monomial(x1, &j))
            }),
        ),
    ]
}

/// All four [`general1_identities`] folded into one report.
pub fn check_general1(path: &PiecewiseLinearPath, depth: usize) -> CheckReport {
    let [a, rest @ ..] = general1_identities(path, depth);
    let merged = rest.iter().fold(a, |acc, r| acc.merge(r));
    CheckReport { name: "general1".into(), ..merged }
}

/// Level one of the lifted signatures: `X₁` for I, `-X₀` for T.
pub fn check_corollary(path: &PiecewiseLinearPath) -> CheckReport {
    let d = path.dim();
    let si = vis_series(path, Visibility::I, 1);
    let st = vis_series(path, Visibility::T, 1);
    let pairs = (0..d)
        .map(|j| (si.level(1)[j], path.tail()[j]))
        .chain((0..d).map(|j| (st.level(1)[j], -path.initial()[j])));
    CheckReport::from_pairs("corollary", TIGHT_TOLERANCE, pairs)
}

/// Chen's identity: `S(X * Y) = S(X) ⊗ S(Y)`.
pub fn check_chen(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, depth: usize) -> Result<CheckReport> {
    let joined = signature(&x.concat(y)?, depth);
    let product = signature(x, depth).mul(&signature(y, depth))?;
    Ok(CheckReport::from_series("chen", DEFAULT_TOLERANCE, &joined, &product))
}

/// `S(X * reverse(X))` is the unit series.
pub fn check_cancellation(x: &PiecewiseLinearPath, depth: usize) -> CheckReport {
    let there_and_back = x.concat(&x.reverse()).expect("a path meets its reversal");
    let unit = TensorSeries::unit(x.dim(), depth);
    CheckReport::from_series("cancellation", DEFAULT_TOLERANCE, &signature(&there_and_back, depth), &unit)
}

/// Coefficients on repeated letters are powers of the increment over `k!`.
pub fn check_repeated_index(x: &PiecewiseLinearPath, depth: usize) -> CheckReport {
    let s = signature(x, depth);
    let inc: Vec<f64> = x.tail().iter().zip(x.initial()).map(|(b, a)| b - a).collect();
    let pairs = (1..=x.dim()).flat_map(|l| {
        let s = &s;
        let inc = &inc;
        (1..=depth).map(move |k| {
            let word = Word::new(vec![l; k]);
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            (c(s, &word), inc[l - 1].powi(k as i32) / fact)
        })
    });
    CheckReport::from_pairs("repeated_index", DEFAULT_TOLERANCE, pairs)
}

/// Lifted signatures of `x` and `y` agree for both variants. Meaningful when
/// `y` is tree-like equivalent to `x`.
pub fn check_preservation_against(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, depth: usize) -> CheckReport {
    let i = CheckReport::from_series(
        "preservation",
        DEFAULT_TOLERANCE,
        &vis_series(x, Visibility::I, depth),
        &vis_series(y, Visibility::I, depth),
    );
    let t = CheckReport::from_series(
        "preservation",
        DEFAULT_TOLERANCE,
        &vis_series(x, Visibility::T, depth),
        &vis_series(y, Visibility::T, depth),
    );
    i.merge(&t)
}

/// Preservation against `refine(x, 3)`, which traces the same image.
pub fn check_preservation(x: &PiecewiseLinearPath, depth: usize) -> CheckReport {
    check_preservation_against(x, &x.refine(3).expect("3 pieces is valid"), depth)
}

/// `x` followed by an excursion `+v` then `-v` from its tail.
pub fn with_spur(x: &PiecewiseLinearPath, v: &[f64]) -> PiecewiseLinearPath {
    let tail = x.tail();
    let tip: Vec<f64> = tail.iter().zip(v).map(|(a, b)| a + b).collect();
    let spur = PiecewiseLinearPath::from_points(vec![tail.to_vec(), tip, tail.to_vec()]).expect("spur is well formed");
    x.concat(&spur).expect("spur starts at the tail")
}

/// Discrete visibility of the knot sequence matches the continuous construction.
pub fn check_discrete_consistency(x: &PiecewiseLinearPath, depth: usize) -> CheckReport {
    let stream = crate::path::Stream::new(x.knots().map(<[f64]>::to_vec).collect()).expect("paths have knots");
    let mut report: Option<CheckReport> = None;
    for variant in [Visibility::I, Visibility::T] {
        let discrete = signature(&PiecewiseLinearPath::from_stream(&visibility_discrete(&stream, variant)), depth);
        let r = CheckReport::from_series("discrete_consistency", TIGHT_TOLERANCE, &discrete, &vis_series(x, variant, depth));
        report = Some(match report {
            Some(acc) => acc.merge(&r),
            None => r,
        });
    }
    report.expect("two variants checked")
}

/// Random path with knots at times `0, 1, …` and coordinates uniform in
/// `[-half_width, half_width]`.
pub fn random_path<R: Rng>(rng: &mut R, dim: usize, knots: usize, half_width: f64) -> PiecewiseLinearPath {
    let points = (0..knots)
        .map(|_| (0..dim).map(|_| rng.gen_range(-half_width..=half_width)).collect())
        .collect();
    PiecewiseLinearPath::from_points(points).expect("random knots are finite")
}

/// Random path starting at `start`.
pub fn random_path_from<R: Rng>(rng: &mut R, start: &[f64], knots: usize, half_width: f64) -> PiecewiseLinearPath {
    let p = random_path(rng, start.len(), knots, half_width);
    let shift: Vec<f64> = start.iter().zip(p.initial()).map(|(s, a)| s - a).collect();
    p.translate(&shift).expect("shift matches dimension")
}

/// Runs every check on `trials` random paths for each `d ∈ {1,2,3}` and
/// depth in `2..=5`, with 2 to 8 knots and coordinates in `[-2, 2]`.
/// Returns one aggregated report per check, in a fixed order.
pub fn run_suite(trials: usize, seed: u64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut record = |r: CheckReport| match reports.iter_mut().find(|e| e.name == r.name) {
        Some(existing) => *existing = existing.clone().merge(&r),
        None => reports.push(r),
    };
    for dim in 1..=3 {
        for depth in 2..=5 {
            for _ in 0..trials {
                let knots = rng.gen_range(2..=8);
                let x = random_path(&mut rng, dim, knots, 2.0);
                let y_knots = rng.gen_range(2..=8);
                let y = random_path_from(&mut rng, x.tail(), y_knots, 2.0);
                record(check_chen(&x, &y, depth).expect("endpoints match by construction"));
                record(check_cancellation(&x, depth));
                record(check_repeated_index(&x, depth));
                record(check_general2(&x, Visibility::I, depth));
                record(check_general2(&x, Visibility::T, depth));
                for r in general1_identities(&x, depth) {
                    record(r);
                }
                record(check_corollary(&x));
                record(check_preservation(&x, depth));
                let spur: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                record(CheckReport { name: "preservation_spur".into(), ..check_preservation_against(&x, &with_spur(&x, &spur), depth) });
                record(check_discrete_consistency(&x, depth));
            }
        }
    }
    reports
}
