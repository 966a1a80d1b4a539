//! (c,k)-nacci sequences and their greedy (generalized Zeckendorf) decompositions.
//!
//! A `(c,k)`-nacci sequence starts at `S_1 = 1`. The first `k` successors are
//! `S_{i+1} = c·(S_i + … + S_1) + 1`; after that the recurrence is
//! `S_{i+1} = c·(S_i + … + S_{i-k})`. `(1,1)` gives the Fibonacci numbers
//! `1, 2, 3, 5, 8, …` and `(1,2)` the Tribonacci numbers `1, 2, 4, 7, 13, …`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A uniform-coefficient recurrence together with every term that fits in a `u64`.
///
/// The table is computed eagerly on construction and never mutated afterwards, so a
/// spec can be cloned and shared between threads freely.
#[derive(Clone)]
pub struct SequenceSpec {
    c: u32,
    k: u32,
    values: Arc<[u64]>,
}

impl SequenceSpec {
    pub fn new(c: u32, k: u32) -> Result<Self> {
        if c == 0 || k == 0 {
            return Err(Error::InvalidInput(format!(
                "c and k must be positive (got c={c}, k={k})"
            )));
        }
        let values = build_table(c as u64, k as usize);
        Ok(SequenceSpec {
            c,
            k,
            values: values.into(),
        })
    }

    pub fn fibonacci() -> Self {
        Self::new(1, 1).expect("(1,1) is a valid spec")
    }

    pub fn tribonacci() -> Self {
        Self::new(1, 2).expect("(1,2) is a valid spec")
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Length of the recurrence window, `k + 1`.
    pub fn window(&self) -> usize {
        self.k as usize + 1
    }

    pub fn is_fibonacci(&self) -> bool {
        self.c == 1 && self.k == 1
    }

    /// `S_i` for `i ≥ 1`.
    pub fn term(&self, i: usize) -> Result<u64> {
        if i == 0 {
            return Err(Error::InvalidInput("sequence indices start at 1".into()));
        }
        self.values.get(i - 1).copied().ok_or(Error::Overflow {
            c: self.c,
            k: self.k,
            index: i,
        })
    }

    /// Number of terms representable without overflow.
    pub fn max_index(&self) -> usize {
        self.values.len()
    }

    /// All representable terms, `values()[i - 1] = S_i`.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Largest index `i` with `S_i ≤ n`, or `None` when `n == 0`.
    pub fn largest_index_at_most(&self, n: u64) -> Option<usize> {
        match self.values.partition_point(|&v| v <= n) {
            0 => None,
            i => Some(i),
        }
    }

    /// Symbol used when printing terms: `F` for Fibonacci, `S` otherwise.
    pub(crate) fn symbol(&self) -> char {
        if self.is_fibonacci() {
            'F'
        } else {
            'S'
        }
    }
}

impl PartialEq for SequenceSpec {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.k == other.k
    }
}

impl Eq for SequenceSpec {}

impl std::hash::Hash for SequenceSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.c, self.k).hash(state);
    }
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SequenceSpec(c={}, k={})", self.c, self.k)
    }
}

fn build_table(c: u64, k: usize) -> Vec<u64> {
    let mut values: Vec<u64> = vec![1];
    // Running sum of the last (up to) k+1 terms.
    let mut window_sum: u64 = 1;
    loop {
        let i = values.len(); // computing S_{i+1}
        let next = if i < k + 1 {
            c.checked_mul(window_sum).and_then(|v| v.checked_add(1))
        } else {
            c.checked_mul(window_sum)
        };
        let Some(next) = next else { break };
        values.push(next);
        // Slide the window to cover S_{i+1-k} ..= S_{i+1}.
        let Some(sum) = window_sum.checked_add(next) else {
            break;
        };
        window_sum = sum;
        if values.len() > k + 1 {
            window_sum -= values[values.len() - k - 2];
        }
    }
    values
}

/// A decomposition of `n` as `Σ a_i·S_i`, stored densely by index.
#[derive(Clone, PartialEq, Eq)]
pub struct Decomposition {
    spec: SequenceSpec,
    /// `coeffs[i - 1] = a_i`; the last entry is nonzero.
    coeffs: Vec<u32>,
    n: u64,
}

impl Decomposition {
    /// Builds a decomposition from `(index, multiplicity)` pairs. Repeated indices add up.
    pub fn from_pairs(spec: &SequenceSpec, pairs: &[(usize, u32)]) -> Result<Self> {
        let mut coeffs: Vec<u32> = Vec::new();
        for &(i, a) in pairs {
            if i == 0 {
                return Err(Error::InvalidInput("sequence indices start at 1".into()));
            }
            if coeffs.len() < i {
                coeffs.resize(i, 0);
            }
            coeffs[i - 1] = coeffs[i - 1]
                .checked_add(a)
                .ok_or_else(|| Error::InvalidInput("multiplicity overflow".into()))?;
        }
        Self::from_dense(spec, coeffs)
    }

    pub(crate) fn from_dense(spec: &SequenceSpec, mut coeffs: Vec<u32>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let mut n: u64 = 0;
        for (idx, &a) in coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let term = spec.term(idx + 1)?;
            n = term
                .checked_mul(a as u64)
                .and_then(|v| v.checked_add(n))
                .ok_or(Error::Overflow {
                    c: spec.c,
                    k: spec.k,
                    index: idx + 1,
                })?;
        }
        Ok(Decomposition {
            spec: spec.clone(),
            coeffs,
            n,
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// The represented integer.
    pub fn value(&self) -> u64 {
        self.n
    }

    /// Coefficient `a_i` (zero when absent).
    pub fn coefficient(&self, i: usize) -> u32 {
        i.checked_sub(1)
            .and_then(|idx| self.coeffs.get(idx))
            .copied()
            .unwrap_or(0)
    }

    pub fn dense(&self) -> &[u32] {
        &self.coeffs
    }

    /// Nonzero `(index, coefficient)` pairs in ascending index order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(idx, &a)| (idx + 1, a))
    }

    /// `Σ a_i`: GZD(n) for the greedy decomposition, Z(n) in the Fibonacci case.
    pub fn summand_count(&self) -> u64 {
        self.coeffs.iter().map(|&a| a as u64).sum()
    }

    /// `Σ i·a_i`: IGZD(n) for the greedy decomposition.
    pub fn index_sum(&self) -> u64 {
        self.terms().map(|(i, a)| i as u64 * a as u64).sum()
    }

    pub fn is_legal(&self) -> bool {
        is_legal_word(&self.spec, &self.coeffs)
    }
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Decomposition")
            .field("spec", &self.spec)
            .field("terms", &self.terms().collect::<Vec<_>>())
            .field("n", &self.n)
            .finish()
    }
}

/// Renders as `10 = F_5 + F_2`, with repeated summands written `2·S_1`.
impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.n)?;
        let sym = self.spec.symbol();
        let mut first = true;
        for (i, a) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let sep = if first { " " } else { " + " };
            first = false;
            if a == 1 {
                write!(f, "{sep}{sym}_{i}")?;
            } else {
                write!(f, "{sep}{a}·{sym}_{i}")?;
            }
        }
        if first {
            write!(f, " 0")?;
        }
        Ok(())
    }
}

/// `S_i` for the given spec; see [`SequenceSpec::term`].
pub fn term(spec: &SequenceSpec, i: usize) -> Result<u64> {
    spec.term(i)
}

/// Greedy decomposition: repeatedly subtract the largest term not exceeding the remainder.
pub fn greedy_decompose(spec: &SequenceSpec, n: u64) -> Result<Decomposition> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let top = spec
        .largest_index_at_most(n)
        .expect("S_1 = 1 bounds every positive n");
    let mut coeffs = vec![0u32; top];
    let mut rest = n;
    while rest > 0 {
        let i = spec.largest_index_at_most(rest).expect("rest ≥ 1");
        let value = spec.values()[i - 1];
        let times = rest / value;
        coeffs[i - 1] += times as u32;
        rest -= times * value;
    }
    Ok(Decomposition {
        spec: spec.clone(),
        coeffs,
        n,
    })
}

/// Legality test for a decomposition given densely by ascending index.
pub fn is_legal(d: &Decomposition) -> bool {
    d.is_legal()
}

/// Reads the coefficient word from the highest index down. The word is legal when
/// either it is a full prefix `(c, …, c)` shorter than the window, or it opens with
/// `(c, …, c, a_s)` where `a_s < c` and `s` lies within the window, followed by
/// zeros and a legal tail (an empty tail is legal).
fn is_legal_word(spec: &SequenceSpec, ascending: &[u32]) -> bool {
    let c = spec.c;
    let window = spec.window();
    let word: Vec<u32> = ascending.iter().rev().copied().collect();
    let mut pos = 0;
    // The zero decomposition has no leading coefficient.
    if word.first().is_none_or(|&a| a == 0) {
        return false;
    }
    loop {
        let rest = &word[pos..];
        if rest.is_empty() {
            return true;
        }
        debug_assert!(rest[0] > 0);
        // Condition (1): the remainder is a run of c's shorter than the window.
        if rest.len() < window && rest.iter().all(|&a| a == c) {
            return true;
        }
        // Condition (2): locate the first entry that breaks the run of c's.
        let Some(s) = rest.iter().take(window).position(|&a| a != c) else {
            return false;
        };
        if rest[s] > c {
            return false;
        }
        pos += s + 1;
        while pos < word.len() && word[pos] == 0 {
            pos += 1;
        }
    }
}
