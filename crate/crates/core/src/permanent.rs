//! Exact permanents of rectangular 0-1 matrices and the Brégman-type
//! row-sum upper bound.
//!
//! For an m x n matrix with m <= n the permanent sums, over all injections
//! from rows into columns, the products of the selected entries; for 0-1
//! matrices it counts systems of distinct representatives. The fast path
//! recurses over rows with a used-column bitmask and memoizes on the mask;
//! the naive path enumerates injections directly and serves as an
//! independent oracle.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::bounds::lg;

/// Column guard for the memoized permanent (cost grows as 2^n).
pub const EXACT_COLS_GUARD: usize = 24;

/// Column guard for the naive permanent (cost grows as n!/(n-m)!).
pub const NAIVE_COLS_GUARD: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermanentError {
    #[error("matrix must have 1 <= rows <= cols <= 64, got {rows} x {cols}")]
    BadDimensions { rows: usize, cols: usize },
    #[error("row {row} has an entry in column {col}, outside {cols} columns")]
    EntryOutOfRange { row: usize, col: usize, cols: usize },
    #[error("{cols} columns exceed the guard {guard}")]
    GuardExceeded { cols: usize, guard: usize },
    #[error("row {0} has no ones; the bound needs every row occupied")]
    ZeroRow(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An m x n matrix over {0, 1} with m <= n <= 64, one column bitmask per
/// row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    row_masks: Vec<u64>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize, row_masks: Vec<u64>) -> Result<Self, PermanentError> {
        if rows < 1 || rows > cols || cols > 64 || row_masks.len() != rows {
            return Err(PermanentError::BadDimensions { rows, cols });
        }
        let full = if cols == 64 {
            u64::MAX
        } else {
            (1u64 << cols) - 1
        };
        for (i, &mask) in row_masks.iter().enumerate() {
            if mask & !full != 0 {
                return Err(PermanentError::EntryOutOfRange {
                    row: i + 1,
                    col: (mask & !full).trailing_zeros() as usize + 1,
                    cols,
                });
            }
        }
        Ok(BinaryMatrix {
            rows,
            cols,
            row_masks,
        })
    }

    /// Builds from rows of 0/1 values.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, PermanentError> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if m < 1 || n < 1 || rows.iter().any(|r| r.len() != n) {
            return Err(PermanentError::BadDimensions { rows: m, cols: n });
        }
        let masks = rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0)
                    .fold(0u64, |mask, (c, _)| mask | (1u64 << c))
            })
            .collect();
        BinaryMatrix::new(m, n, masks)
    }

    pub fn all_ones(rows: usize, cols: usize) -> Result<Self, PermanentError> {
        let full = if cols == 64 {
            u64::MAX
        } else {
            (1u64 << cols) - 1
        };
        BinaryMatrix::new(rows, cols, vec![full; rows])
    }

    pub fn identity(n: usize) -> Result<Self, PermanentError> {
        BinaryMatrix::new(n, n, (0..n).map(|i| 1u64 << i).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_mask(&self, row: usize) -> u64 {
        self.row_masks[row]
    }

    /// Ones per row.
    pub fn row_ones(&self) -> Vec<u32> {
        self.row_masks.iter().map(|m| m.count_ones()).collect()
    }

    /// Parses the matrix text format: first line `m n`, then m lines of n
    /// characters from {0, 1}.
    pub fn parse_text(text: &str) -> Result<Self, PermanentError> {
        let parse_err = |line: usize, msg: String| PermanentError::Parse { line, msg };
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty input".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(parse_err(1, format!("expected \"m n\", got {header:?}")));
        }
        let m: usize = dims[0]
            .parse()
            .map_err(|_| parse_err(1, format!("invalid row count {:?}", dims[0])))?;
        let n: usize = dims[1]
            .parse()
            .map_err(|_| parse_err(1, format!("invalid column count {:?}", dims[1])))?;
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| parse_err(i + 2, format!("expected {m} matrix rows, found {i}")))?;
            let row: Vec<u8> = line
                .trim()
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(parse_err(i + 2, format!("invalid character {other:?}"))),
                })
                .collect::<Result<_, _>>()?;
            if row.len() != n {
                return Err(parse_err(
                    i + 2,
                    format!("expected {n} columns, found {}", row.len()),
                ));
            }
            rows.push(row);
        }
        BinaryMatrix::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for &mask in &self.row_masks {
            for c in 0..self.cols {
                out.push(if mask & (1u64 << c) != 0 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Exact permanent by row recursion over a used-column bitmask, memoized
/// on the mask (the row index is its popcount).
pub fn permanent_exact(a: &BinaryMatrix) -> Result<BigUint, PermanentError> {
    if a.cols() > EXACT_COLS_GUARD {
        return Err(PermanentError::GuardExceeded {
            cols: a.cols(),
            guard: EXACT_COLS_GUARD,
        });
    }
    fn rec(a: &BinaryMatrix, row: usize, used: u64, memo: &mut HashMap<u64, BigUint>) -> BigUint {
        if row == a.rows() {
            return BigUint::from(1u32);
        }
        if let Some(hit) = memo.get(&used) {
            return hit.clone();
        }
        let mut total = BigUint::from(0u32);
        let mut cand = a.row_mask(row) & !used;
        while cand != 0 {
            let bit = cand & cand.wrapping_neg();
            cand &= cand - 1;
            total += rec(a, row + 1, used | bit, memo);
        }
        memo.insert(used, total.clone());
        total
    }
    Ok(rec(a, 0, 0, &mut HashMap::new()))
}

/// Direct sum over all injections; the independent oracle for
/// [`permanent_exact`].
pub fn permanent_naive(a: &BinaryMatrix) -> Result<BigUint, PermanentError> {
    if a.cols() > NAIVE_COLS_GUARD {
        return Err(PermanentError::GuardExceeded {
            cols: a.cols(),
            guard: NAIVE_COLS_GUARD,
        });
    }
    fn rec(a: &BinaryMatrix, row: usize, used: &mut Vec<bool>) -> u64 {
        if row == a.rows() {
            return 1;
        }
        let mut total = 0;
        for col in 0..a.cols() {
            if !used[col] && a.row_mask(row) & (1u64 << col) != 0 {
                used[col] = true;
                total += rec(a, row + 1, used);
                used[col] = false;
            }
        }
        total
    }
    let mut used = vec![false; a.cols()];
    Ok(BigUint::from(rec(a, 0, &mut used)))
}

/// Natural log of the row-sum bound
/// n!^((n-m)/n) / (n-m)! * prod_i (r_i!)^(1/r_i)
/// on the permanent of an m x n 0-1 matrix. Every row must contain a one;
/// a zero row makes the permanent zero and the product term undefined, so
/// callers handle that case separately.
pub fn bregman_rect_bound(a: &BinaryMatrix) -> Result<f64, PermanentError> {
    let m = a.rows();
    let n = a.cols();
    let mut total = 0.0f64;
    for (i, ones) in a.row_ones().iter().enumerate() {
        if *ones == 0 {
            return Err(PermanentError::ZeroRow(i + 1));
        }
        let r = *ones as f64;
        total += lg(r + 1.0) / r;
    }
    let nf = n as f64;
    total += (n - m) as f64 / nf * lg(nf + 1.0) - lg((n - m) as f64 + 1.0);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{log_of_biguint, SLACK_TOL};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn identity_has_unit_permanent() {
        let a = BinaryMatrix::identity(3).unwrap();
        assert_eq!(permanent_exact(&a).unwrap(), big(1));
        assert_eq!(permanent_naive(&a).unwrap(), big(1));
    }

    #[test]
    fn all_ones_squares() {
        let a = BinaryMatrix::all_ones(3, 3).unwrap();
        assert_eq!(permanent_exact(&a).unwrap(), big(6));
        let b = BinaryMatrix::all_ones(2, 2).unwrap();
        assert_eq!(permanent_naive(&b).unwrap(), big(2));
    }

    #[test]
    fn rectangular_all_ones() {
        let a = BinaryMatrix::all_ones(1, 3).unwrap();
        assert_eq!(permanent_exact(&a).unwrap(), big(3));
        let b = BinaryMatrix::all_ones(2, 3).unwrap();
        assert_eq!(permanent_naive(&b).unwrap(), big(6));
        assert_eq!(permanent_exact(&b).unwrap(), big(6));
    }

    #[test]
    fn zero_row_kills_the_permanent() {
        let a = BinaryMatrix::new(2, 3, vec![0b101, 0]).unwrap();
        assert_eq!(permanent_exact(&a).unwrap(), big(0));
        assert_eq!(permanent_naive(&a).unwrap(), big(0));
        assert_eq!(
            bregman_rect_bound(&a).unwrap_err(),
            PermanentError::ZeroRow(2)
        );
    }

    #[test]
    fn guards_reject_oversized_matrices() {
        let a = BinaryMatrix::all_ones(2, 25).unwrap();
        assert_eq!(
            permanent_exact(&a).unwrap_err(),
            PermanentError::GuardExceeded {
                cols: 25,
                guard: EXACT_COLS_GUARD
            }
        );
        let b = BinaryMatrix::all_ones(2, 9).unwrap();
        assert_eq!(
            permanent_naive(&b).unwrap_err(),
            PermanentError::GuardExceeded {
                cols: 9,
                guard: NAIVE_COLS_GUARD
            }
        );
    }

    #[test]
    fn bound_is_tight_on_all_ones_squares() {
        for n in 1..=8usize {
            let a = BinaryMatrix::all_ones(n, n).unwrap();
            let bound = bregman_rect_bound(&a).unwrap();
            let exact = log_of_biguint(&permanent_exact(&a).unwrap());
            assert!((bound - exact).abs() <= SLACK_TOL, "n={n}");
        }
    }

    #[test]
    fn bound_examples() {
        let identity = BinaryMatrix::identity(3).unwrap();
        assert!(bregman_rect_bound(&identity).unwrap().abs() < 1e-12);

        let wide = BinaryMatrix::all_ones(1, 3).unwrap();
        assert!((bregman_rect_bound(&wide).unwrap() - 3f64.ln()).abs() < 1e-10);
    }

    // Blocks of all-ones down the diagonal multiply the permanent and add
    // the bound in log space, so equality survives.
    #[test]
    fn bound_is_tight_on_block_diagonal_ones() {
        let sizes = [2usize, 3, 1];
        let n: usize = sizes.iter().sum();
        let mut masks = Vec::new();
        let mut offset = 0usize;
        for &s in &sizes {
            let block = ((1u64 << s) - 1) << offset;
            masks.extend(std::iter::repeat_n(block, s));
            offset += s;
        }
        let a = BinaryMatrix::new(n, n, masks).unwrap();
        let exact = permanent_exact(&a).unwrap();
        // 2! x 3! x 1!
        assert_eq!(exact, big(12));
        let bound = bregman_rect_bound(&a).unwrap();
        assert!((bound - log_of_biguint(&exact)).abs() <= SLACK_TOL);
    }

    #[test]
    fn exact_matches_naive_on_seeded_matrices() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..60 {
            let m = rng.random_range(1..=6usize);
            let n = rng.random_range(m..=8usize);
            let density = [0.3, 0.5, 0.8][trial % 3];
            let rows: Vec<Vec<u8>> = (0..m)
                .map(|_| (0..n).map(|_| u8::from(rng.random_bool(density))).collect())
                .collect();
            let a = BinaryMatrix::from_rows(&rows).unwrap();
            let exact = permanent_exact(&a).unwrap();
            assert_eq!(exact, permanent_naive(&a).unwrap(), "trial {trial}");
            if a.row_ones().iter().all(|&r| r > 0) {
                let bound = bregman_rect_bound(&a).unwrap();
                assert!(bound >= log_of_biguint(&exact) - SLACK_TOL, "trial {trial}");
            }
        }
    }

    #[test]
    fn permanent_is_invariant_under_row_and_column_permutations() {
        use rand::seq::SliceRandom;
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = rng.random_range(1..=5usize);
            let n = rng.random_range(m..=7usize);
            let rows: Vec<Vec<u8>> = (0..m)
                .map(|_| (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect())
                .collect();
            let a = BinaryMatrix::from_rows(&rows).unwrap();
            let before = permanent_exact(&a).unwrap();

            let mut shuffled_rows = rows.clone();
            shuffled_rows.shuffle(&mut rng);
            let mut cols: Vec<usize> = (0..n).collect();
            cols.shuffle(&mut rng);
            let permuted: Vec<Vec<u8>> = shuffled_rows
                .iter()
                .map(|row| cols.iter().map(|&c| row[c]).collect())
                .collect();
            let b = BinaryMatrix::from_rows(&permuted).unwrap();
            assert_eq!(before, permanent_exact(&b).unwrap());
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = BinaryMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let text = a.to_text();
        assert_eq!(text, "2 3\n101\n011\n");
        assert_eq!(BinaryMatrix::parse_text(&text).unwrap(), a);
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(matches!(
            BinaryMatrix::parse_text("2 3\n101\n"),
            Err(PermanentError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            BinaryMatrix::parse_text("2 3\n10x\n011\n"),
            Err(PermanentError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            BinaryMatrix::parse_text("hello\n"),
            Err(PermanentError::Parse { line: 1, .. })
        ));
        // rows exceeding columns violate the m <= n requirement
        assert!(matches!(
            BinaryMatrix::parse_text("3 2\n10\n01\n11\n"),
            Err(PermanentError::BadDimensions { rows: 3, cols: 2 })
        ));
    }
}
