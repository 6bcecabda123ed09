//! Classical permutation machinery: word representation, both Fisher-Yates
//! directions, replay from a draw record and recursive enumeration.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest `n` for which the full symmetric group is materialised.
pub const MAX_ENUMERATE: usize = 8;

/// Inverted one-line notation of a permutation `σ`: `word[k] = σ⁻¹(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationWord(Vec<usize>);

impl PermutationWord {
    pub fn identity(n: usize) -> Self {
        PermutationWord((0..n).collect())
    }

    /// Checks that `word` contains each of `0..word.len()` exactly once.
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n];
        for &v in &word {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotAPermutation(format!("{word:?}")));
            }
        }
        Ok(PermutationWord(word))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// The permutation `σ` itself (one-line notation), i.e. the inverse of
    /// the word.
    pub fn permutation(&self) -> Vec<usize> {
        let mut sigma = vec![0; self.0.len()];
        for (k, &v) in self.0.iter().enumerate() {
            sigma[v] = k;
        }
        sigma
    }
}

impl fmt::Display for PermutationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.iter().join(","))
    }
}

/// Word of the bijection `k ↦ sigma[k]`.
pub fn word_of_permutation(sigma: &[usize]) -> Result<PermutationWord> {
    let checked = PermutationWord::new(sigma.to_vec())?;
    Ok(PermutationWord(checked.permutation()))
}

/// Exchange indices `(j_1, …, j_{n-1})` with `0 <= j_i <= i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DrawSequence(Vec<usize>);

impl DrawSequence {
    pub fn new(draws: Vec<usize>) -> Result<Self> {
        for (idx, &j) in draws.iter().enumerate() {
            let step = idx + 1;
            if j > step {
                return Err(Error::DrawOutOfRange { step, draw: j });
            }
        }
        Ok(DrawSequence(draws))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Draw of step `i` (1-based).
    pub fn draw(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    /// All `n!` draw sequences for `n` elements, in mixed-radix order.
    pub fn all(n: usize) -> Box<dyn Iterator<Item = DrawSequence>> {
        if n <= 1 {
            return Box::new(std::iter::once(DrawSequence(Vec::new())));
        }
        Box::new((1..n).map(|i| 0..=i).multi_cartesian_product().map(DrawSequence))
    }
}

/// Runs the ascending-index shuffle with the given draws, starting from
/// `a[k] = k`.
pub fn replay_reversed_fisher_yates(n: usize, draws: &DrawSequence) -> Result<PermutationWord> {
    if draws.0.len() != n.saturating_sub(1) {
        return Err(Error::InvalidSpec(format!(
            "expected {} draws for n = {n}, got {}",
            n.saturating_sub(1),
            draws.0.len()
        )));
    }
    let mut a: Vec<usize> = (0..n).collect();
    for i in 1..n {
        a.swap(draws.draw(i), i);
    }
    Ok(PermutationWord(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Descending index (Durstenfeld).
    Forward,
    /// Ascending index.
    Reversed,
}

pub fn sample_fisher_yates<R: Rng + ?Sized>(n: usize, direction: Direction, rng: &mut R) -> PermutationWord {
    let mut a: Vec<usize> = (0..n).collect();
    let mut step = |i: usize| {
        let j = rng.random_range(0..=i);
        a.swap(j, i);
    };
    match direction {
        Direction::Forward => (1..n).rev().for_each(&mut step),
        Direction::Reversed => (1..n).for_each(&mut step),
    }
    PermutationWord(a)
}

/// Word of `τ_{j,i} σ̃`, where `σ̃` extends `σ ∈ S_i` by fixing `i`.
///
/// On words, left multiplication by the transposition exchanges entries `j`
/// and `i`: `(τσ̃)⁻¹(j) = i` and `(τσ̃)⁻¹(i) = σ⁻¹(j)`.
pub fn extend_with_transposition(word: &PermutationWord, j: usize) -> PermutationWord {
    let i = word.len();
    debug_assert!(j <= i);
    let mut w = Vec::with_capacity(i + 1);
    w.extend_from_slice(&word.0);
    w.push(i);
    w.swap(j, i);
    PermutationWord(w)
}

/// Maps all of `S_i` to all of `S_{i+1}` via `(j, σ) ↦ τ_{j,i} σ̃`.
pub fn extend_all(words: &[PermutationWord]) -> Result<Vec<PermutationWord>> {
    let i = words.first().map(|w| w.len()).ok_or_else(|| Error::InvalidWordSet("empty input".into()))?;
    let expected: usize = (1..=i).product();
    if words.len() != expected {
        return Err(Error::InvalidWordSet(format!("expected {expected} words of length {i}, got {}", words.len())));
    }
    let mut seen = HashSet::with_capacity(words.len());
    for w in words {
        if w.len() != i {
            return Err(Error::InvalidWordSet(format!("mixed lengths {} and {i}", w.len())));
        }
        PermutationWord::new(w.0.clone())?;
        if !seen.insert(w) {
            return Err(Error::InvalidWordSet(format!("duplicate word {w}")));
        }
    }
    Ok(words.iter().flat_map(|w| (0..=i).map(move |j| extend_with_transposition(w, j))).collect())
}

/// All words of `S_n` in lexicographic order.
pub fn enumerate_sn(n: usize) -> Result<Vec<PermutationWord>> {
    if n > MAX_ENUMERATE {
        return Err(Error::TooLarge { n, max: MAX_ENUMERATE });
    }
    Ok((0..n).permutations(n).map(PermutationWord).collect())
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
