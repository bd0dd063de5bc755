//! Independent oracles shared by the integration suites.
//!
//! Everything here recomputes ground truth by a route deliberately
//! different from the library implementation it checks: raw product
//! enumeration with a validity filter, row-permutation products, and
//! containment counting over a fully materialized square list.

#![allow(dead_code)]

use critset::{Entry, LatinSquare, PartialLatinSquare};

/// All permutations of 1..=n.
pub fn permutations(n: u8) -> Vec<Vec<u8>> {
    fn rec(remaining: &mut Vec<u8>, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining.is_empty() {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            current.push(v);
            rec(remaining, current, out);
            current.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Every Latin square of order n, built as all n-tuples of row
/// permutations filtered by the column property. Feasible for n <= 4.
pub fn all_latin_squares(n: u8) -> Vec<LatinSquare> {
    let perms = permutations(n);
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    fn rec(n: u8, perms: &[Vec<u8>], rows: &mut Vec<Vec<u8>>, out: &mut Vec<LatinSquare>) {
        if rows.len() == n as usize {
            out.push(LatinSquare::from_rows(rows).expect("column-checked rows"));
            return;
        }
        'next: for p in perms {
            for c in 0..n as usize {
                for prev in rows.iter() {
                    if prev[c] == p[c] {
                        continue 'next;
                    }
                }
            }
            rows.push(p.clone());
            rec(n, perms, rows, out);
            rows.pop();
        }
    }
    rec(n, &perms, &mut rows, &mut out);
    out
}

/// Counts of partial Latin squares of order n by size, via raw
/// enumeration of all (n+1)^(n^2) symbol assignments with a direct
/// validity scan. Feasible for n <= 3.
pub fn brute_force_census(n: usize) -> Vec<u64> {
    let cells = n * n;
    let mut counts = vec![0u64; cells + 1];
    let mut assignment = vec![0u8; cells];
    loop {
        if let Some(size) = valid_size(n, &assignment) {
            counts[size] += 1;
        }
        // odometer increment over base n+1
        let mut i = 0;
        loop {
            if i == cells {
                return counts;
            }
            if assignment[i] < n as u8 {
                assignment[i] += 1;
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

/// Runs `visit` on every valid assignment of 0..=n to the n^2 cells.
pub fn for_each_valid_assignment(n: usize, visit: &mut dyn FnMut(&[u8])) {
    let cells = n * n;
    let mut assignment = vec![0u8; cells];
    loop {
        if valid_size(n, &assignment).is_some() {
            visit(&assignment);
        }
        let mut i = 0;
        loop {
            if i == cells {
                return;
            }
            if assignment[i] < n as u8 {
                assignment[i] += 1;
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

pub fn is_valid_assignment(n: usize, assignment: &[u8]) -> bool {
    valid_size(n, assignment).is_some()
}

/// Size of the assignment if it is a valid partial Latin square.
fn valid_size(n: usize, assignment: &[u8]) -> Option<usize> {
    let mut size = 0;
    for r in 0..n {
        for c in 0..n {
            let s = assignment[r * n + c];
            if s == 0 {
                continue;
            }
            size += 1;
            for c2 in c + 1..n {
                if assignment[r * n + c2] == s {
                    return None;
                }
            }
            for r2 in r + 1..n {
                if assignment[r2 * n + c] == s {
                    return None;
                }
            }
        }
    }
    Some(size)
}

/// Number of squares in `squares` containing every entry of `entries`.
pub fn containment_count(squares: &[LatinSquare], entries: &[Entry]) -> usize {
    squares
        .iter()
        .filter(|sq| entries.iter().all(|&e| sq.contains(e)))
        .count()
}

/// Smallest k such that some k-subset of the square's entries lies in
/// exactly one square of the order, by bitmask sweep over all subsets.
/// Returns (k, witness). Feasible for n <= 3 (2^9 masks at n = 3).
pub fn scs_by_subset_sweep(square: &LatinSquare) -> (usize, Vec<Entry>) {
    let n = square.order();
    let entries: Vec<Entry> = square.entries().collect();
    let all = all_latin_squares(n as u8);
    let cells = n * n;
    assert!(cells <= 16, "sweep oracle meant for tiny orders");
    for k in 0..=cells {
        for mask in 0u32..(1u32 << cells) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let subset: Vec<Entry> = (0..cells)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| entries[i])
                .collect();
            if containment_count(&all, &subset) == 1 {
                return (k, subset);
            }
        }
    }
    unreachable!("the full square is always uniquely completable");
}

/// A valid partial Latin square assembled by attempting seeded random
/// insertions and keeping the ones that stay conflict-free.
pub fn random_valid_pls(order: usize, attempts: usize, seed: u64) -> PartialLatinSquare {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pls = PartialLatinSquare::empty(order).unwrap();
    for _ in 0..attempts {
        let e = Entry::new(
            rng.random_range(1..=order as u8),
            rng.random_range(1..=order as u8),
            rng.random_range(1..=order as u8),
        );
        if let Ok(next) = pls.with_entry(e) {
            pls = next;
        }
    }
    pls
}
