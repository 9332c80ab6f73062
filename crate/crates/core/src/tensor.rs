//! Truncated tensor algebra over an alphabet of `d` letters.
//!
//! A [`TensorSeries`] stores one coefficient per word of length at most the
//! truncation depth `p`. Storage is dense and level-major: the constant term,
//! then the `d` words of length one, then the `d²` words of length two, and so
//! on. Within a level, words are ordered lexicographically by letter value, so
//! the offset of a word inside its level is its base-`d` numeral.

use std::fmt;

use crate::error::{Error, Result};

/// Number of non-empty words of length at most `depth` over `alphabet` letters.
///
/// This is the length of a truncated signature without its constant term:
/// `d(d^p - 1)/(d - 1)`, or `p` when `d = 1`.
pub fn word_count(alphabet: usize, depth: usize) -> usize {
    match alphabet {
        0 => 0,
        1 => depth,
        d => (1..=depth).map(|k| d.pow(k as u32)).sum(),
    }
}

/// An ordered multi-index `(i₁, …, i_k)` with 1-based letters.
///
/// The empty word indexes the constant term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: impl Into<Vec<usize>>) -> Self {
        Word(letters.into())
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, letter: usize) -> bool {
        self.0.contains(&letter)
    }

    /// `(self | other)`: `other` appended to `self`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// All `(prefix, suffix)` pairs with `prefix | suffix == self`, shortest prefix first.
    pub fn splits(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (0..=self.0.len()).map(move |k| (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec())))
    }

    /// Every word over `alphabet` letters with length at most `depth`, in
    /// canonical (level-major, lexicographic) order, starting with the empty word.
    pub fn all(alphabet: usize, depth: usize) -> impl Iterator<Item = Word> {
        (0..=depth).flat_map(move |k| Word::of_length(alphabet, k))
    }

    /// Words of exactly length `len`, in lexicographic order.
    pub fn of_length(alphabet: usize, len: usize) -> impl Iterator<Item = Word> {
        let total = if alphabet == 0 && len > 0 { 0 } else { alphabet.pow(len as u32) };
        (0..total).map(move |mut index| {
            let mut letters = vec![0; len];
            for slot in letters.iter_mut().rev() {
                *slot = index % alphabet + 1;
                index /= alphabet;
            }
            Word(letters)
        })
    }

    /// Column label used in CSV headers: letters concatenated for alphabets of
    /// at most nine letters (`s_12`), dash-separated otherwise (`s_1-10`).
    /// The empty word is written `s_0`.
    pub fn feature_name(&self, alphabet: usize) -> String {
        if self.is_empty() {
            return "s_0".to_string();
        }
        let sep = if alphabet <= 9 { "" } else { "-" };
        let letters: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        format!("s_{}", letters.join(sep))
    }
}

impl From<&[usize]> for Word {
    fn from(letters: &[usize]) -> Self {
        Word(letters.to_vec())
    }
}

impl<const N: usize> From<[usize; N]> for Word {
    fn from(letters: [usize; N]) -> Self {
        Word(letters.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", letters.join(","))
    }
}

/// An element of the tensor algebra truncated at a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeries {
    alphabet: usize,
    depth: usize,
    coeffs: Vec<f64>,
}

impl TensorSeries {
    pub fn zero(alphabet: usize, depth: usize) -> Self {
        assert!(alphabet >= 1, "alphabet must have at least one letter");
        TensorSeries { alphabet, depth, coeffs: vec![0.0; 1 + word_count(alphabet, depth)] }
    }

    /// The multiplicative identity `1`.
    pub fn unit(alphabet: usize, depth: usize) -> Self {
        let mut t = Self::zero(alphabet, depth);
        t.coeffs[0] = 1.0;
        t
    }

    /// The level-one element `Σ vᵢ eᵢ`.
    pub fn from_level1(values: &[f64], depth: usize) -> Self {
        let mut t = Self::zero(values.len(), depth);
        if depth >= 1 {
            t.coeffs[1..=values.len()].copy_from_slice(values);
        }
        t
    }

    /// Builds a series by evaluating `f` on every word in canonical order.
    pub fn from_fn(alphabet: usize, depth: usize, mut f: impl FnMut(&Word) -> f64) -> Self {
        let coeffs = Word::all(alphabet, depth).map(|w| f(&w)).collect();
        TensorSeries { alphabet, depth, coeffs }
    }

    /// Inverse of [`flatten`](Self::flatten). When `include_constant` is false
    /// the constant term is set to zero.
    pub fn unflatten(
        alphabet: usize,
        depth: usize,
        values: &[f64],
        include_constant: bool,
    ) -> Result<Self> {
        let expected = word_count(alphabet, depth) + usize::from(include_constant);
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} coefficients for alphabet {alphabet}, depth {depth}, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite coefficient {v}")));
        }
        let mut t = Self::zero(alphabet, depth);
        let start = usize::from(!include_constant);
        t.coeffs[start..].copy_from_slice(values);
        Ok(t)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn constant(&self) -> f64 {
        self.coeffs[0]
    }

    fn level_offset(&self, level: usize) -> usize {
        match level {
            0 => 0,
            k => 1 + word_count(self.alphabet, k - 1),
        }
    }

    fn level_range(&self, level: usize) -> std::ops::Range<usize> {
        let start = self.level_offset(level);
        start..start + self.alphabet.pow(level as u32)
    }

    /// Coefficients of all words of length `level`, lexicographically ordered.
    pub fn level(&self, level: usize) -> &[f64] {
        assert!(level <= self.depth, "level {level} exceeds depth {}", self.depth);
        &self.coeffs[self.level_range(level)]
    }

    fn level_mut(&mut self, level: usize) -> &mut [f64] {
        let range = self.level_range(level);
        &mut self.coeffs[range]
    }

    fn index_of(&self, word: &Word) -> Result<usize> {
        if word.len() > self.depth {
            return Err(Error::Index(format!("word {word} is longer than depth {}", self.depth)));
        }
        let mut index = 0;
        for &letter in word.letters() {
            if letter == 0 || letter > self.alphabet {
                return Err(Error::Index(format!(
                    "letter {letter} of word {word} outside 1..={}",
                    self.alphabet
                )));
            }
            index = index * self.alphabet + (letter - 1);
        }
        Ok(self.level_offset(word.len()) + index)
    }

    /// Coefficient of `word`.
    pub fn coeff(&self, word: &Word) -> Result<f64> {
        Ok(self.coeffs[self.index_of(word)?])
    }

    /// Coefficient vector in canonical order: level-major, lexicographic by
    /// letter within a level. The constant term leads when requested.
    pub fn flatten(&self, include_constant: bool) -> Vec<f64> {
        let start = usize::from(!include_constant);
        self.coeffs[start..].to_vec()
    }

    /// All coefficients including the constant term, in canonical order.
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    fn check_shape(&self, other: &TensorSeries) -> Result<()> {
        if self.alphabet != other.alphabet || self.depth != other.depth {
            return Err(Error::Shape(format!(
                "(alphabet {}, depth {}) vs (alphabet {}, depth {})",
                self.alphabet, self.depth, other.alphabet, other.depth
            )));
        }
        Ok(())
    }

    /// Truncated tensor product: the coefficient of `w` is the sum over all
    /// splits `w = (u|v)` of `self[u] * other[v]`.
    pub fn mul(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_shape(other)?;
        let mut out = TensorSeries::zero(self.alphabet, self.depth);
        for total in 0..=self.depth {
            let width = |k: usize| self.alphabet.pow(k as u32);
            let mut acc = vec![0.0; width(total)];
            for left in 0..=total {
                let a = self.level(left);
                let b = other.level(total - left);
                let stride = b.len();
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0.0 {
                        continue;
                    }
                    let row = &mut acc[i * stride..(i + 1) * stride];
                    for (slot, &bj) in row.iter_mut().zip(b) {
                        *slot += ai * bj;
                    }
                }
            }
            out.level_mut(total).copy_from_slice(&acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TensorSeries { coeffs, ..*self })
    }

    pub fn sub(&self, other: &TensorSeries) -> Result<TensorSeries> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TensorSeries { coeffs, ..*self })
    }

    pub fn scale(&self, factor: f64) -> TensorSeries {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        TensorSeries { coeffs, ..*self }
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &TensorSeries) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Tensor exponential `Σ_{k≤p} x^{⊗k}/k!` of a series with zero constant term.
    pub fn exp(&self) -> Result<TensorSeries> {
        if self.constant() != 0.0 {
            return Err(Error::Precondition(format!(
                "exp requires a zero constant term, got {}",
                self.constant()
            )));
        }
        // Horner form: 1 + x(1 + x/2(1 + x/3(…)))
        let unit = TensorSeries::unit(self.alphabet, self.depth);
        let mut acc = unit.clone();
        for k in (1..=self.depth).rev() {
            acc = self.scale(1.0 / k as f64).mul(&acc)?.add(&unit)?;
        }
        Ok(acc)
    }

    /// Tensor logarithm `Σ_{k≤p} (-1)^{k+1} (x-1)^{⊗k}/k` of a series with unit constant term.
    pub fn log(&self) -> Result<TensorSeries> {
        if self.constant() != 1.0 {
            return Err(Error::Precondition(format!(
                "log requires a unit constant term, got {}",
                self.constant()
            )));
        }
        let unit = TensorSeries::unit(self.alphabet, self.depth);
        let y = self.sub(&unit)?;
        // Horner form: y(1 - y(1/2 - y(1/3 - …)))
        let mut acc = TensorSeries::zero(self.alphabet, self.depth);
        for k in (1..=self.depth).rev() {
            let c = unit.scale(1.0 / k as f64);
            acc = c.sub(&y.mul(&acc)?)?;
        }
        y.mul(&acc)
    }
}
