//! Randomized construction of uniquely completable sets, minimization down
//! to critical sets, square generation, Monte Carlo size statistics, and
//! exhaustive smallest-critical-set search at tiny orders.
//!
//! The construction assigns each entry of a fixed Latin square a random
//! birth time and keeps exactly the entries not forced by their strictly
//! earlier predecessors. Birth times are never materialized as reals: a
//! uniformly random permutation of the entries is sampled directly, which
//! is the exact discrete equivalent (ties have probability zero).
//!
//! All randomness comes from ChaCha8 seeded with a caller-provided 64-bit
//! seed. Parallel trials derive substream `t + 1` for trial index `t` from
//! the same seed, so serial and parallel runs produce identical statistics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::completion::{count_completions, is_uniquely_completable};
use crate::model::{full_mask, symbol_bit, Entry, LatinSquare, ModelError, PartialLatinSquare};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("entry order is not a permutation of the square's entries")]
    NotAPermutation,
    #[error("input is not uniquely completable to the given square")]
    NotUniquelyCompletable,
    #[error("removal order must list each entry of the input exactly once")]
    RemovalOrderMismatch,
    #[error("order {0} exceeds the exhaustive-search guard {1}")]
    OrderGuard(usize, usize),
    #[error("no uniquely completable subset of size at most {0}")]
    SizeLimitExceeded(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A permutation of all n^2 entries of a fixed Latin square, listed in
/// increasing birth time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirthOrder {
    order: usize,
    entries: Vec<Entry>,
}

impl BirthOrder {
    /// Checks that `entries` is a bijection onto the square's entry set.
    pub fn new(square: &LatinSquare, entries: Vec<Entry>) -> Result<Self, ConstructError> {
        let n = square.order();
        if entries.len() != n * n {
            return Err(ConstructError::NotAPermutation);
        }
        let mut seen = vec![false; n * n];
        for e in &entries {
            if !square.contains(*e) {
                return Err(ConstructError::NotAPermutation);
            }
            let idx = (e.row as usize - 1) * n + (e.col as usize - 1);
            if seen[idx] {
                return Err(ConstructError::NotAPermutation);
            }
            seen[idx] = true;
        }
        Ok(BirthOrder { order: n, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }
}

/// The square with cell (i, j) holding ((i + j - 2) mod n) + 1.
pub fn cyclic_latin_square(n: usize) -> Result<LatinSquare, ModelError> {
    if !(1..=crate::model::MAX_ORDER).contains(&n) {
        return Err(ModelError::OrderOutOfRange(n));
    }
    let rows: Vec<Vec<u8>> = (0..n)
        .map(|r| (0..n).map(|c| ((r + c) % n) as u8 + 1).collect())
        .collect();
    LatinSquare::from_rows(&rows)
}

/// A seeded Latin square built by row-by-row backtracking with shuffled
/// candidate lists.
///
/// Deterministic for a fixed seed. The sampling is not uniform over all
/// Latin squares of the order; it only provides arbitrary valid test
/// squares.
pub fn random_latin_square(n: usize, seed: u64) -> Result<LatinSquare, ModelError> {
    if !(1..=crate::model::MAX_ORDER).contains(&n) {
        return Err(ModelError::OrderOutOfRange(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = full_mask(n);
    let mut grid = vec![0u8; n * n];
    let mut col_used = vec![0u64; n];

    // Any r x n Latin rectangle extends row by row, so backtracking within
    // a single row always succeeds and never has to cross rows.
    #[allow(clippy::too_many_arguments)]
    fn fill_row(
        n: usize,
        full: u64,
        row: usize,
        col: usize,
        row_used: u64,
        grid: &mut [u8],
        col_used: &mut [u64],
        rng: &mut ChaCha8Rng,
    ) -> bool {
        if col == n {
            return true;
        }
        let mask = full & !row_used & !col_used[col];
        let mut symbols: Vec<u8> = SymbolBits(mask).collect();
        symbols.shuffle(rng);
        for s in symbols {
            let bit = symbol_bit(s);
            grid[row * n + col] = s;
            col_used[col] |= bit;
            if fill_row(n, full, row, col + 1, row_used | bit, grid, col_used, rng) {
                return true;
            }
            grid[row * n + col] = 0;
            col_used[col] &= !bit;
        }
        false
    }

    for row in 0..n {
        let ok = fill_row(n, full, row, 0, 0, &mut grid, &mut col_used, &mut rng);
        debug_assert!(ok, "every Latin rectangle extends by one row");
    }
    let rows: Vec<Vec<u8>> = (0..n).map(|r| grid[r * n..(r + 1) * n].to_vec()).collect();
    LatinSquare::from_rows(&rows)
}

struct SymbolBits(u64);

impl Iterator for SymbolBits {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if self.0 == 0 {
            None
        } else {
            let s = self.0.trailing_zeros() as u8 + 1;
            self.0 &= self.0 - 1;
            Some(s)
        }
    }
}

fn birth_order_from_rng(square: &LatinSquare, rng: &mut ChaCha8Rng) -> BirthOrder {
    let mut entries: Vec<Entry> = square.entries().collect();
    entries.shuffle(rng);
    BirthOrder {
        order: square.order(),
        entries,
    }
}

/// A uniformly random permutation of the square's entries, deterministic
/// per seed.
pub fn random_birth_order(square: &LatinSquare, seed: u64) -> BirthOrder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    birth_order_from_rng(square, &mut rng)
}

/// Which set the forcing test in [`birth_time_construct_with`] runs
/// against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForcingBase {
    /// The full prefix of earlier-born entries, kept or not.
    #[default]
    Prefix,
    /// Only the entries accumulated so far; a comparison variant.
    Accumulated,
}

/// Scans the entries in birth order and keeps each one not forced by the
/// base set at its turn; the result is uniquely completable to `square`.
pub fn birth_time_construct(square: &LatinSquare, order: &BirthOrder) -> PartialLatinSquare {
    birth_time_construct_with(square, order, ForcingBase::Prefix)
}

pub fn birth_time_construct_with(
    square: &LatinSquare,
    order: &BirthOrder,
    base: ForcingBase,
) -> PartialLatinSquare {
    let n = square.order();
    assert_eq!(order.order(), n, "birth order and square must agree");
    let full = full_mask(n);
    // Masks of the set the forcing test looks at: the whole prefix, or the
    // accumulated kept set.
    let mut row_used = vec![0u64; n];
    let mut col_used = vec![0u64; n];
    let mut kept = PartialLatinSquare::empty(n).expect("order already validated");
    for &e in order.entries() {
        let r = e.row as usize - 1;
        let c = e.col as usize - 1;
        let cand = full & !row_used[r] & !col_used[c];
        debug_assert!(cand & symbol_bit(e.symbol) != 0);
        let forced = cand.count_ones() == 1;
        if !forced {
            kept.insert(e)
                .expect("subset of a Latin square is conflict-free");
        }
        if base == ForcingBase::Prefix || !forced {
            row_used[r] |= symbol_bit(e.symbol);
            col_used[c] |= symbol_bit(e.symbol);
        }
    }
    kept
}

/// Replays the birth order and checks that every entry outside `kept` is
/// forced by its full prefix at its position. A successful replay
/// certifies unique completability of `kept` without any search.
pub fn replay_certifies(
    square: &LatinSquare,
    order: &BirthOrder,
    kept: &PartialLatinSquare,
) -> bool {
    let n = square.order();
    if order.order() != n || kept.order() != n {
        return false;
    }
    if kept.is_contained_in(square) != Ok(true) {
        return false;
    }
    let full = full_mask(n);
    let mut row_used = vec![0u64; n];
    let mut col_used = vec![0u64; n];
    for &e in order.entries() {
        let r = e.row as usize - 1;
        let c = e.col as usize - 1;
        if kept.get(e.row, e.col) != Some(e.symbol) {
            let cand = full & !row_used[r] & !col_used[c];
            if cand != symbol_bit(e.symbol) {
                return false;
            }
        }
        row_used[r] |= symbol_bit(e.symbol);
        col_used[c] |= symbol_bit(e.symbol);
    }
    true
}

/// Sample statistics over the sizes produced by repeated construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub trials: usize,
    pub sizes: Vec<u32>,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single trial.
    pub sd: f64,
    /// sd / sqrt(trials).
    pub stderr: f64,
    pub min: u32,
    pub max: u32,
}

impl TrialStats {
    pub fn from_sizes(sizes: Vec<u32>) -> Self {
        assert!(!sizes.is_empty(), "at least one trial required");
        let trials = sizes.len();
        let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / trials as f64;
        let sd = if trials > 1 {
            let ss: f64 = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
            (ss / (trials - 1) as f64).sqrt()
        } else {
            0.0
        };
        TrialStats {
            trials,
            mean,
            sd,
            stderr: sd / (trials as f64).sqrt(),
            min: *sizes.iter().min().unwrap(),
            max: *sizes.iter().max().unwrap(),
            sizes,
        }
    }
}

/// Runs the construction over `trials` independent random birth orders and
/// gathers size statistics. Trials run in parallel; trial `t` uses ChaCha8
/// stream `t + 1` of `seed`, so the result is deterministic and identical
/// to a serial run.
pub fn sample_uc_sizes(square: &LatinSquare, trials: usize, seed: u64) -> TrialStats {
    assert!(trials >= 1, "at least one trial required");
    let sizes: Vec<u32> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let order = birth_order_from_rng(square, &mut rng);
            birth_time_construct(square, &order).len() as u32
        })
        .collect();
    TrialStats::from_sizes(sizes)
}

/// The entries of `set` ordered by decreasing birth time (latest born
/// first); the default minimization order.
pub fn removal_order_latest_born(order: &BirthOrder, set: &PartialLatinSquare) -> Vec<Entry> {
    order
        .entries()
        .iter()
        .rev()
        .copied()
        .filter(|e| set.get(e.row, e.col) == Some(e.symbol))
        .collect()
}

/// The entries of `set` in a seeded shuffled order.
pub fn removal_order_shuffled(set: &PartialLatinSquare, seed: u64) -> Vec<Entry> {
    let mut entries: Vec<Entry> = set.entries().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    entries.shuffle(&mut rng);
    entries
}

/// Greedily removes entries in the given order whenever the remainder
/// still has exactly one completion. One pass suffices: a removal that
/// leaves two completions would still leave at least two from any subset.
/// The result is a critical set of `square`.
pub fn minimize_to_critical(
    ucset: &PartialLatinSquare,
    square: &LatinSquare,
    removal_order: &[Entry],
) -> Result<PartialLatinSquare, ConstructError> {
    match is_uniquely_completable(ucset) {
        Some(found) if found == *square => {}
        _ => return Err(ConstructError::NotUniquelyCompletable),
    }
    if removal_order.len() != ucset.len() {
        return Err(ConstructError::RemovalOrderMismatch);
    }
    let mut seen = std::collections::HashSet::new();
    for e in removal_order {
        if ucset.get(e.row, e.col) != Some(e.symbol) || !seen.insert((e.row, e.col)) {
            return Err(ConstructError::RemovalOrderMismatch);
        }
    }
    let mut current = ucset.clone();
    for &e in removal_order {
        let trial = current
            .without_entry(e)
            .expect("removal order entries stay present until tried");
        let count = count_completions(&trial, 2);
        if count.count == 1 && !count.capped {
            current = trial;
        }
    }
    Ok(current)
}

/// A smallest critical set together with its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScsResult {
    pub size: usize,
    pub witness: PartialLatinSquare,
}

/// Exhaustive-search guard: subset sweeps above this order are rejected.
pub const SCS_ORDER_GUARD: usize = 4;

/// Finds a smallest uniquely completable subset of the square's entries by
/// sweeping subset sizes k = 0, 1, 2, ... in lexicographic order. A
/// minimum-size uniquely completable set is automatically a critical set.
pub fn scs_exhaustive(
    square: &LatinSquare,
    size_limit: Option<usize>,
) -> Result<ScsResult, ConstructError> {
    let n = square.order();
    if n > SCS_ORDER_GUARD {
        return Err(ConstructError::OrderGuard(n, SCS_ORDER_GUARD));
    }
    let entries: Vec<Entry> = square.entries().collect();
    let total = entries.len();
    let limit = size_limit.unwrap_or(total).min(total);
    for k in 0..=limit {
        let mut found: Option<PartialLatinSquare> = None;
        for_each_combination(total, k, &mut |chosen| {
            if found.is_some() {
                return;
            }
            let subset = PartialLatinSquare::from_entries(n, chosen.iter().map(|&i| entries[i]))
                .expect("subset of a Latin square is conflict-free");
            let count = count_completions(&subset, 2);
            if count.count == 1 && !count.capped {
                found = Some(subset);
            }
        });
        if let Some(witness) = found {
            return Ok(ScsResult { size: k, witness });
        }
    }
    Err(ConstructError::SizeLimitExceeded(limit))
}

/// Visits every k-subset of 0..m in lexicographic order.
pub(crate) fn for_each_combination(m: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
