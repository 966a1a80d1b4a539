//! Move system checks: the Fibonacci instance against a direct encoding of the
//! two-player Zeckendorf rules, value conservation, the δ monovariant and termination.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use zeck_core::game::{GameState, Move, MoveKind};
use zeck_core::sequence::{greedy_decompose, SequenceSpec};
use zeck_core::simulate::random_playout;

/// Position as value → multiplicity, with the Fibonacci numbers 1, 2, 3, 5, …
type ValueBag = BTreeMap<u64, u32>;

fn fibs() -> Vec<u64> {
    let mut f = vec![1u64, 2];
    while f.len() < 40 {
        let next = f[f.len() - 1] + f[f.len() - 2];
        f.push(next);
    }
    f
}

fn take(bag: &mut ValueBag, v: u64, times: u32) {
    let m = bag.get_mut(&v).unwrap();
    *m -= times;
    if *m == 0 {
        bag.remove(&v);
    }
}

fn put(bag: &mut ValueBag, v: u64) {
    *bag.entry(v).or_insert(0) += 1;
}

/// Successors under the Fibonacci rules, written against values:
/// combine consecutive `F_{i-1}, F_i` into `F_{i+1}`; split duplicates
/// `F_1,F_1 → F_2`, `F_2,F_2 → F_1,F_3`, `F_i,F_i → F_{i-2},F_{i+1}`.
fn oracle_children(bag: &ValueBag) -> BTreeSet<Vec<(u64, u32)>> {
    let f = fibs();
    let idx = |v: u64| f.iter().position(|&x| x == v).unwrap();
    let mut out = BTreeSet::new();
    for (&v, &m) in bag {
        let i = idx(v);
        if i >= 1 && bag.contains_key(&f[i - 1]) {
            let mut next = bag.clone();
            take(&mut next, f[i - 1], 1);
            take(&mut next, v, 1);
            put(&mut next, f[i + 1]);
            out.insert(next.into_iter().collect());
        }
        if m >= 2 {
            let mut next = bag.clone();
            take(&mut next, v, 2);
            match i {
                0 => put(&mut next, f[1]),
                1 => {
                    put(&mut next, f[0]);
                    put(&mut next, f[2]);
                }
                _ => {
                    put(&mut next, f[i - 2]);
                    put(&mut next, f[i + 1]);
                }
            }
            out.insert(next.into_iter().collect());
        }
    }
    out
}

fn as_values(s: &GameState) -> Vec<(u64, u32)> {
    s.pairs()
        .into_iter()
        .map(|(i, m)| (s.spec().term(i as usize).unwrap(), m))
        .collect()
}

#[test]
fn fibonacci_instance_matches_direct_rules() {
    let fib = SequenceSpec::fibonacci();
    for n in 1..=20u64 {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([GameState::initial(&fib, n).unwrap()]);
        while let Some(s) = queue.pop_front() {
            if !seen.insert(s.key()) {
                continue;
            }
            let bag: ValueBag = as_values(&s).into_iter().collect();
            let expected = oracle_children(&bag);
            let moves = s.legal_moves();
            let got: BTreeSet<Vec<(u64, u32)>> = moves
                .iter()
                .map(|&m| as_values(&s.apply(m).unwrap()))
                .collect();
            assert_eq!(got, expected, "n={n} at {s}");
            // Distinct moves give distinct children.
            assert_eq!(got.len(), moves.len(), "n={n} at {s}");
            for m in moves {
                queue.push_back(s.apply(m).unwrap());
            }
        }
    }
}

#[test]
fn every_rewrite_conserves_value() {
    for c in 1..=4u32 {
        for k in 1..=4u32 {
            let spec = SequenceSpec::new(c, k).unwrap();
            let value = |items: Vec<(u32, u32)>| -> u128 {
                items
                    .into_iter()
                    .map(|(i, m)| spec.term(i as usize).unwrap() as u128 * m as u128)
                    .sum()
            };
            for pivot in 1..=20u32 {
                let mut moves = vec![Move::reduce(pivot)];
                if pivot > k {
                    moves.push(Move::full_combine(pivot));
                }
                if (2..=k).contains(&pivot) {
                    moves.push(Move::low_combine(pivot));
                }
                for m in moves {
                    assert_eq!(
                        value(m.consumed(c, k)),
                        value(m.produced(c, k)),
                        "({c},{k}) {m}"
                    );
                }
            }
        }
    }
}

#[test]
fn terminal_iff_legal_decomposition() {
    for (c, k) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3)] {
        let spec = SequenceSpec::new(c, k).unwrap();
        for n in 1..=25u64 {
            let mut seen = HashSet::new();
            let mut stack = vec![GameState::initial(&spec, n).unwrap()];
            let mut terminals = 0;
            while let Some(s) = stack.pop() {
                if !seen.insert(s.key()) {
                    continue;
                }
                assert_eq!(
                    s.is_terminal(),
                    s.as_decomposition().is_legal(),
                    "({c},{k}) {s}"
                );
                if s.is_terminal() {
                    terminals += 1;
                    assert_eq!(s.as_decomposition(), greedy_decompose(&spec, n).unwrap());
                }
                stack.extend(s.legal_moves().into_iter().map(|m| s.apply(m).unwrap()));
            }
            assert_eq!(terminals, 1, "({c},{k}) n={n}");
        }
    }
}

fn check_playout(c: u32, k: u32, n: u64, seed: u64) -> Result<(), TestCaseError> {
    let spec = SequenceSpec::new(c, k).unwrap();
    let greedy = greedy_decompose(&spec, n).unwrap();
    let p = random_playout(&spec, n, seed).unwrap();
    let mut s = GameState::initial(&spec, n).unwrap();
    for &m in &p.trace {
        prop_assert!(s.legal_moves().contains(&m));
        let next = s.apply(m).unwrap();
        prop_assert_eq!(next.total(), n);
        prop_assert_eq!(next.recomputed_total().unwrap(), n);
        if spec.is_fibonacci() {
            prop_assert!(next.delta() <= s.delta());
            let reduce2 = m.kind == MoveKind::Reduce && m.pivot == 2;
            prop_assert_eq!(next.delta() == s.delta(), reduce2);
        } else {
            prop_assert!(next.delta() < s.delta());
        }
        s = next;
    }
    prop_assert!(s.is_terminal());
    prop_assert_eq!(&s, &p.final_state);
    prop_assert_eq!(s.as_decomposition(), greedy.clone());
    if !spec.is_fibonacci() {
        prop_assert!(p.move_count <= 2 * n - greedy.summand_count() - greedy.index_sum());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn playouts_conserve_value_and_respect_monovariant(
        c in 1u32..=3, k in 1u32..=3, n in 1u64..=60, seed in any::<u64>()
    ) {
        check_playout(c, k, n, seed)?;
    }
}
