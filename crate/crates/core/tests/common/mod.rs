//! Test-only oracles, independent of the engine's own code paths.
#![allow(dead_code)]

/// Every coefficient vector (ascending by index) over `terms ≤ n` summing to `n`,
/// with each coefficient at most `max_coeff`.
pub fn decompositions_bounded(terms: &[u64], n: u64, max_coeff: u64) -> Vec<Vec<u32>> {
    fn go(
        terms: &[u64],
        top: usize,
        rest: u64,
        cap: u64,
        acc: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if top == 0 {
            if rest == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let value = terms[top - 1];
        for a in 0..=(rest / value).min(cap) {
            acc[top - 1] = a as u32;
            go(terms, top - 1, rest - a * value, cap, acc, out);
        }
        acc[top - 1] = 0;
    }
    let top = terms.iter().take_while(|&&v| v <= n).count();
    let mut out = Vec::new();
    go(terms, top, n, max_coeff, &mut vec![0; top], &mut out);
    out
}

pub fn all_decompositions(terms: &[u64], n: u64) -> Vec<Vec<u32>> {
    decompositions_bounded(terms, n, u64::MAX)
}

/// Classical Zeckendorf condition: 0/1 digits, no two adjacent indices.
pub fn non_adjacent(coeffs: &[u32]) -> bool {
    coeffs.iter().any(|&a| a > 0)
        && coeffs.iter().all(|&a| a <= 1)
        && coeffs.windows(2).all(|w| !(w[0] == 1 && w[1] == 1))
}

/// Fibonacci numbers 1, 2, 3, 5, 8, …
pub fn fibs(len: usize) -> Vec<u64> {
    let mut f = vec![1u64, 2];
    while f.len() < len {
        let next = f[f.len() - 1] + f[f.len() - 2];
        f.push(next);
    }
    f
}

/// Number of summands in the Zeckendorf decomposition, by repeated subtraction.
pub fn zeckendorf_count(n: u64) -> u64 {
    let f = fibs(90);
    let mut rest = n;
    let mut count = 0;
    while rest > 0 {
        let largest = *f.iter().rev().find(|&&v| v <= rest).unwrap();
        rest -= largest;
        count += 1;
    }
    count
}
