//! Exact enumeration of partial Latin squares — totals by size and per
//! shape — plus an exact Latin square counter.
//!
//! The counters here are independent of the completion module's search so
//! the two can cross-check each other. Counts are arbitrary-precision;
//! every entry point is protected by a cheap work estimate and a runtime
//! node budget so oversized requests fail fast instead of running forever.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{full_mask, ModelError, Shape, MAX_ORDER};

/// Default runtime search-node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

/// Hard order cap for the full Latin square counter.
pub const LATIN_COUNT_ORDER_GUARD: usize = 5;

/// Hard order cap for per-shape counting.
pub const SHAPE_ORDER_GUARD: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("size {0} exceeds the {1}x{1} array")]
    SizeOutOfRange(usize, usize),
    #[error("order {0} exceeds the enumeration guard {1}")]
    OrderGuard(usize, usize),
    #[error("estimated {estimate} search nodes exceed the budget {budget}")]
    BudgetExceeded { estimate: BigUint, budget: u64 },
    #[error("search exceeded the node budget {0}")]
    NodeLimit(u64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Exact counts of partial Latin squares of one order, indexed by size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub order: usize,
    /// counts[k] = number of partial Latin squares of size k, k = 0..=n^2.
    pub counts: Vec<BigUint>,
}

impl CensusTable {
    /// CSV with header `k,count` and one decimal row per size.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,count\n");
        for (k, count) in self.counts.iter().enumerate() {
            out.push_str(&format!("{k},{count}\n"));
        }
        out
    }
}

fn falling_factorial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= BigUint::from((n - i) as u64);
    }
    acc
}

fn binomial_big(a: usize, b: usize) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b);
    let mut acc = BigUint::from(1u32);
    for i in 0..b {
        acc *= BigUint::from((a - i) as u64);
        acc /= BigUint::from(i as u64 + 1);
    }
    acc
}

/// Loose node estimate for the size-k enumeration: the coefficient of z^k
/// in the n-th power of the single-row generating polynomial
/// sum_j C(n,j) * n!/(n-j)! * z^j, i.e. the number of ways to fill rows
/// independently ignoring column constraints.
fn estimate_size_nodes(n: usize, k: usize) -> BigUint {
    let row_poly: Vec<BigUint> = (0..=n)
        .map(|j| binomial_big(n, j) * falling_factorial(n, j))
        .collect();
    let mut acc = vec![BigUint::from(1u32)];
    for _ in 0..n {
        let mut next = vec![BigUint::from(0u32); (acc.len() + n).min(k + 1)];
        for (i, a) in acc.iter().enumerate() {
            for (j, r) in row_poly.iter().enumerate() {
                if i + j < next.len() {
                    next[i + j] += a * r;
                }
            }
        }
        acc = next;
    }
    acc.into_iter()
        .nth(k)
        .unwrap_or_else(|| BigUint::from(0u32))
}

struct NodeBudget<'a> {
    used: &'a AtomicU64,
    budget: u64,
}

impl NodeBudget<'_> {
    #[inline]
    fn tick(&self) -> Result<(), CensusError> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.budget {
            Err(CensusError::NodeLimit(self.budget))
        } else {
            Ok(())
        }
    }
}

/// State after deciding every cell of the first row: column masks plus the
/// number of filled cells. Enumeration parallelizes over these states.
fn first_row_states(n: usize, max_fill: usize) -> Vec<(Vec<u64>, usize)> {
    let full = full_mask(n);
    let mut states = Vec::new();
    let mut col_used = vec![0u64; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        n: usize,
        full: u64,
        col: usize,
        row_used: u64,
        filled: usize,
        max_fill: usize,
        col_used: &mut Vec<u64>,
        states: &mut Vec<(Vec<u64>, usize)>,
    ) {
        if col == n {
            states.push((col_used.clone(), filled));
            return;
        }
        rec(
            n,
            full,
            col + 1,
            row_used,
            filled,
            max_fill,
            col_used,
            states,
        );
        if filled < max_fill {
            let mut cand = full & !row_used;
            while cand != 0 {
                let bit = cand & cand.wrapping_neg();
                cand &= cand - 1;
                col_used[col] = bit;
                rec(
                    n,
                    full,
                    col + 1,
                    row_used | bit,
                    filled + 1,
                    max_fill,
                    col_used,
                    states,
                );
                col_used[col] = 0;
            }
        }
    }
    rec(n, full, 0, 0, 0, max_fill, &mut col_used, &mut states);
    states
}

/// Counts fillings of rows `row..n` that bring the total to exactly `k`.
#[allow(clippy::too_many_arguments)]
fn count_from_row(
    n: usize,
    full: u64,
    row: usize,
    col: usize,
    row_used: u64,
    col_used: &mut [u64],
    filled: usize,
    k: usize,
    budget: &NodeBudget<'_>,
) -> Result<u64, CensusError> {
    budget.tick()?;
    if filled > k {
        return Ok(0);
    }
    let cells_left = (n - row) * n - col;
    if filled + cells_left < k {
        return Ok(0);
    }
    if row == n {
        return Ok(u64::from(filled == k));
    }
    let (next_row, next_col) = if col + 1 == n {
        (row + 1, 0)
    } else {
        (row, col + 1)
    };
    let next_row_used = if col + 1 == n { 0 } else { row_used };
    let mut total = count_from_row(
        n,
        full,
        next_row,
        next_col,
        next_row_used,
        col_used,
        filled,
        k,
        budget,
    )?;
    if filled < k {
        let mut cand = full & !row_used & !col_used[col];
        while cand != 0 {
            let bit = cand & cand.wrapping_neg();
            cand &= cand - 1;
            col_used[col] |= bit;
            let sub = count_from_row(
                n,
                full,
                next_row,
                next_col,
                if col + 1 == n { 0 } else { row_used | bit },
                col_used,
                filled + 1,
                k,
                budget,
            )?;
            col_used[col] &= !bit;
            total += sub;
        }
    }
    Ok(total)
}

/// Exact number of partial Latin squares of order `n` with exactly `k`
/// filled cells, by depth-first enumeration over cells in row-major order.
pub fn count_pls_by_size(n: usize, k: usize, budget: u64) -> Result<BigUint, CensusError> {
    if !(1..=MAX_ORDER).contains(&n) {
        return Err(CensusError::Model(ModelError::OrderOutOfRange(n)));
    }
    if k > n * n {
        return Err(CensusError::SizeOutOfRange(k, n));
    }
    let estimate = estimate_size_nodes(n, k);
    if estimate > BigUint::from(budget) {
        return Err(CensusError::BudgetExceeded { estimate, budget });
    }
    let full = full_mask(n);
    let used = AtomicU64::new(0);
    let states = first_row_states(n, k);
    let partials: Result<Vec<u64>, CensusError> = states
        .into_par_iter()
        .map(|(mut col_used, filled)| {
            let budget = NodeBudget {
                used: &used,
                budget,
            };
            count_from_row(n, full, 1, 0, 0, &mut col_used, filled, k, &budget)
        })
        .collect();
    let total: u128 = partials?.into_iter().map(u128::from).sum();
    Ok(BigUint::from(total))
}

/// The full census for every size k = 0..=n^2.
pub fn census_table(n: usize, budget: u64) -> Result<CensusTable, CensusError> {
    if !(1..=MAX_ORDER).contains(&n) {
        return Err(CensusError::Model(ModelError::OrderOutOfRange(n)));
    }
    let counts = (0..=n * n)
        .map(|k| count_pls_by_size(n, k, budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CensusTable { order: n, counts })
}

/// Exact number of symbol assignments to the shape's cells that form a
/// valid partial Latin square, by row-by-row backtracking.
pub fn count_pls_of_shape(shape: &Shape, budget: u64) -> Result<BigUint, CensusError> {
    let n = shape.order();
    if n > SHAPE_ORDER_GUARD {
        return Err(CensusError::OrderGuard(n, SHAPE_ORDER_GUARD));
    }
    // Loose estimate: cumulative products of per-row injective choices,
    // ignoring column constraints.
    let mut estimate = BigUint::from(0u32);
    let mut prefix = BigUint::from(1u32);
    for &r in shape.row_counts() {
        prefix *= falling_factorial(n, r);
        estimate += &prefix;
    }
    if estimate > BigUint::from(budget) {
        return Err(CensusError::BudgetExceeded { estimate, budget });
    }

    let full = full_mask(n);
    let cells = shape.cells();
    let used = AtomicU64::new(0);
    let node_budget = NodeBudget {
        used: &used,
        budget,
    };
    let mut row_used = vec![0u64; n];
    let mut col_used = vec![0u64; n];

    fn rec(
        cells: &[(u8, u8)],
        i: usize,
        full: u64,
        row_used: &mut [u64],
        col_used: &mut [u64],
        budget: &NodeBudget<'_>,
    ) -> Result<u64, CensusError> {
        budget.tick()?;
        if i == cells.len() {
            return Ok(1);
        }
        let (r, c) = cells[i];
        let (r, c) = (r as usize - 1, c as usize - 1);
        let mut total = 0u64;
        let mut cand = full & !row_used[r] & !col_used[c];
        while cand != 0 {
            let bit = cand & cand.wrapping_neg();
            cand &= cand - 1;
            row_used[r] |= bit;
            col_used[c] |= bit;
            total += rec(cells, i + 1, full, row_used, col_used, budget)?;
            row_used[r] &= !bit;
            col_used[c] &= !bit;
        }
        Ok(total)
    }

    let total = rec(cells, 0, full, &mut row_used, &mut col_used, &node_budget)?;
    Ok(BigUint::from(total))
}

/// Exact number of Latin squares of order `n` by backtracking over the
/// full grid, parallel over first-row permutations.
pub fn count_latin_squares(n: usize, budget: u64) -> Result<BigUint, CensusError> {
    if n < 1 {
        return Err(CensusError::Model(ModelError::OrderOutOfRange(n)));
    }
    if n > LATIN_COUNT_ORDER_GUARD {
        return Err(CensusError::OrderGuard(n, LATIN_COUNT_ORDER_GUARD));
    }
    let full = full_mask(n);
    let used = AtomicU64::new(0);
    let states = first_row_states(n, n)
        .into_iter()
        .filter(|(_, filled)| *filled == n)
        .collect::<Vec<_>>();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        n: usize,
        full: u64,
        row: usize,
        col: usize,
        row_used: u64,
        col_used: &mut [u64],
        budget: &NodeBudget<'_>,
    ) -> Result<u64, CensusError> {
        budget.tick()?;
        if row == n {
            return Ok(1);
        }
        let (next_row, next_col) = if col + 1 == n {
            (row + 1, 0)
        } else {
            (row, col + 1)
        };
        let mut total = 0u64;
        let mut cand = full & !row_used & !col_used[col];
        while cand != 0 {
            let bit = cand & cand.wrapping_neg();
            cand &= cand - 1;
            col_used[col] |= bit;
            total += rec(
                n,
                full,
                next_row,
                next_col,
                if col + 1 == n { 0 } else { row_used | bit },
                col_used,
                budget,
            )?;
            col_used[col] &= !bit;
        }
        Ok(total)
    }

    let partials: Result<Vec<u64>, CensusError> = states
        .into_par_iter()
        .map(|(mut col_used, _)| {
            let node_budget = NodeBudget {
                used: &used,
                budget,
            };
            rec(n, full, 1, 0, 0, &mut col_used, &node_budget)
        })
        .collect();
    let total: u128 = partials?.into_iter().map(u128::from).sum();
    Ok(BigUint::from(total))
}

/// Iterator over every size-k shape of the n x n array, in lexicographic
/// order of row-major cell positions.
#[derive(Debug, Clone)]
pub struct Shapes {
    n: usize,
    k: usize,
    indices: Option<Vec<usize>>,
}

impl Iterator for Shapes {
    type Item = Shape;

    fn next(&mut self) -> Option<Shape> {
        let indices = self.indices.as_mut()?;
        let cells: Vec<(u8, u8)> = indices
            .iter()
            .map(|&i| ((i / self.n) as u8 + 1, (i % self.n) as u8 + 1))
            .collect();
        let shape = Shape::new(self.n, cells).expect("distinct in-range cells");

        // advance to the next combination of n^2 choose k
        let m = self.n * self.n;
        let k = self.k;
        let mut i = k;
        loop {
            if i == 0 {
                self.indices = None;
                return Some(shape);
            }
            i -= 1;
            if indices[i] != i + m - k {
                break;
            }
            if i == 0 {
                self.indices = None;
                return Some(shape);
            }
        }
        indices[i] += 1;
        for j in i + 1..k {
            indices[j] = indices[j - 1] + 1;
        }
        Some(shape)
    }
}

/// Emits every k-subset of the n^2 cells exactly once.
pub fn enumerate_shapes(n: usize, k: usize, budget: u64) -> Result<Shapes, CensusError> {
    if !(1..=MAX_ORDER).contains(&n) {
        return Err(CensusError::Model(ModelError::OrderOutOfRange(n)));
    }
    if k > n * n {
        return Err(CensusError::SizeOutOfRange(k, n));
    }
    let estimate = binomial_big(n * n, k);
    if estimate > BigUint::from(budget) {
        return Err(CensusError::BudgetExceeded { estimate, budget });
    }
    Ok(Shapes {
        n,
        k,
        indices: Some((0..k).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::count_completions;
    use crate::model::PartialLatinSquare;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn order_two_counts() {
        assert_eq!(
            count_pls_by_size(2, 0, DEFAULT_NODE_BUDGET).unwrap(),
            big(1)
        );
        assert_eq!(
            count_pls_by_size(2, 1, DEFAULT_NODE_BUDGET).unwrap(),
            big(8)
        );
        assert_eq!(
            count_pls_by_size(2, 2, DEFAULT_NODE_BUDGET).unwrap(),
            big(16)
        );
        assert_eq!(
            count_pls_by_size(2, 3, DEFAULT_NODE_BUDGET).unwrap(),
            big(8)
        );
        assert_eq!(
            count_pls_by_size(2, 4, DEFAULT_NODE_BUDGET).unwrap(),
            big(2)
        );
    }

    #[test]
    fn order_one_table() {
        let table = census_table(1, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(table.counts, vec![big(1), big(1)]);
        assert_eq!(table.to_csv(), "k,count\n0,1\n1,1\n");
    }

    #[test]
    fn single_cell_count_equals_n_cubed() {
        // n^2 cells times n symbols.
        for n in 1..=4 {
            assert_eq!(
                count_pls_by_size(n, 1, DEFAULT_NODE_BUDGET).unwrap(),
                big((n * n * n) as u64)
            );
        }
    }

    #[test]
    fn size_out_of_range_is_rejected() {
        assert_eq!(
            count_pls_by_size(2, 5, DEFAULT_NODE_BUDGET).unwrap_err(),
            CensusError::SizeOutOfRange(5, 2)
        );
    }

    #[test]
    fn tiny_budget_is_rejected_up_front() {
        match count_pls_by_size(4, 8, 10).unwrap_err() {
            CensusError::BudgetExceeded { budget, .. } => assert_eq!(budget, 10),
            other => panic!("expected budget rejection, got {other:?}"),
        }
    }

    #[test]
    fn shape_counts() {
        let full = Shape::full(2).unwrap();
        assert_eq!(
            count_pls_of_shape(&full, DEFAULT_NODE_BUDGET).unwrap(),
            big(2)
        );

        let single = Shape::new(3, vec![(1, 1)]).unwrap();
        assert_eq!(
            count_pls_of_shape(&single, DEFAULT_NODE_BUDGET).unwrap(),
            big(3)
        );

        let empty = Shape::new(3, vec![]).unwrap();
        assert_eq!(
            count_pls_of_shape(&empty, DEFAULT_NODE_BUDGET).unwrap(),
            big(1)
        );
    }

    #[test]
    fn shape_order_guard() {
        let shape = Shape::full(6).unwrap();
        assert_eq!(
            count_pls_of_shape(&shape, DEFAULT_NODE_BUDGET).unwrap_err(),
            CensusError::OrderGuard(6, SHAPE_ORDER_GUARD)
        );
    }

    #[test]
    fn latin_square_counts() {
        let expected = [1u64, 2, 12, 576, 161_280];
        for (i, &count) in expected.iter().enumerate() {
            assert_eq!(
                count_latin_squares(i + 1, DEFAULT_NODE_BUDGET).unwrap(),
                big(count),
                "order {}",
                i + 1
            );
        }
        assert_eq!(
            count_latin_squares(6, DEFAULT_NODE_BUDGET).unwrap_err(),
            CensusError::OrderGuard(6, LATIN_COUNT_ORDER_GUARD)
        );
    }

    #[test]
    fn census_agrees_with_completion_search() {
        for n in 1..=4 {
            let empty = PartialLatinSquare::empty(n).unwrap();
            let via_search = count_completions(&empty, u64::MAX).count;
            assert_eq!(
                count_latin_squares(n, DEFAULT_NODE_BUDGET).unwrap(),
                big(via_search),
                "order {n}"
            );
        }
    }

    #[test]
    fn shape_enumeration_counts() {
        assert_eq!(enumerate_shapes(2, 4, 1_000).unwrap().count(), 1);
        assert_eq!(enumerate_shapes(2, 1, 1_000).unwrap().count(), 4);
        assert_eq!(enumerate_shapes(2, 2, 1_000).unwrap().count(), 6);
        assert_eq!(enumerate_shapes(3, 0, 1_000).unwrap().count(), 1);
    }

    #[test]
    fn shape_enumeration_is_lexicographic() {
        let shapes: Vec<Shape> = enumerate_shapes(2, 2, 1_000).unwrap().collect();
        assert_eq!(shapes[0].cells(), &[(1, 1), (1, 2)]);
        assert_eq!(shapes[1].cells(), &[(1, 1), (2, 1)]);
        assert_eq!(shapes[5].cells(), &[(2, 1), (2, 2)]);
    }

    #[test]
    fn shape_enumeration_budget_guard() {
        assert!(matches!(
            enumerate_shapes(8, 32, 1_000).unwrap_err(),
            CensusError::BudgetExceeded { .. }
        ));
    }

    #[test]
    fn per_shape_sum_matches_direct_count() {
        for n in 1..=3usize {
            for k in 0..=n * n {
                let direct = count_pls_by_size(n, k, DEFAULT_NODE_BUDGET).unwrap();
                let mut sum = BigUint::from(0u32);
                for shape in enumerate_shapes(n, k, DEFAULT_NODE_BUDGET).unwrap() {
                    sum += count_pls_of_shape(&shape, DEFAULT_NODE_BUDGET).unwrap();
                }
                assert_eq!(sum, direct, "n={n} k={k}");
            }
        }
    }
}
