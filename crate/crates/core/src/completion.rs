//! Forcing, forcing closure, completion counting, and unique completability.
//!
//! A partial square forces a symbol into an empty cell when every other
//! symbol would violate the Latin property there (the naked-single rule).
//! Unique completability is always decided by full backtracking search,
//! never by forcing alone; the two notions are kept deliberately separate.

use thiserror::Error;

use crate::model::{full_mask, symbol_bit, LatinSquare, PartialLatinSquare};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("cell ({0}, {1}) is already filled")]
    CellFilled(u8, u8),
}

/// A set of symbols out of 1..=n, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolSet {
    mask: u64,
}

impl SymbolSet {
    pub(crate) fn from_mask(mask: u64) -> Self {
        SymbolSet { mask }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.mask & symbol_bit(symbol) != 0
    }

    /// Symbols in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u8> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let s = rest.trailing_zeros() as u8 + 1;
                rest &= rest - 1;
                Some(s)
            }
        })
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }
}

/// Per-cell candidate masks for a partial square: for an empty cell the
/// symbols not excluded by its row and column, for a filled cell exactly
/// the placed symbol.
#[derive(Debug, Clone)]
pub struct CandidateGrid {
    order: usize,
    masks: Vec<u64>,
}

impl CandidateGrid {
    pub fn of(pls: &PartialLatinSquare) -> Self {
        let n = pls.order();
        let full = full_mask(n);
        let mut masks = vec![0u64; n * n];
        for r in 1..=n as u8 {
            for c in 1..=n as u8 {
                let i = (r as usize - 1) * n + (c as usize - 1);
                masks[i] = match pls.get(r, c) {
                    Some(s) => symbol_bit(s),
                    None => full & !pls.row_used_mask(r) & !pls.col_used_mask(c),
                };
            }
        }
        CandidateGrid { order: n, masks }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self, row: u8, col: u8) -> SymbolSet {
        SymbolSet::from_mask(self.masks[(row as usize - 1) * self.order + (col as usize - 1)])
    }
}

/// Symbols that can be placed at the empty cell without breaking the
/// Latin property.
pub fn candidates(
    pls: &PartialLatinSquare,
    row: u8,
    col: u8,
) -> Result<SymbolSet, CompletionError> {
    if pls.is_filled(row, col) {
        return Err(CompletionError::CellFilled(row, col));
    }
    let mask = full_mask(pls.order()) & !pls.row_used_mask(row) & !pls.col_used_mask(col);
    Ok(SymbolSet::from_mask(mask))
}

/// The symbol forced into the empty cell, if the candidate set is a
/// singleton; `None` otherwise (including the zero-candidate dead end).
pub fn forced_symbol(
    pls: &PartialLatinSquare,
    row: u8,
    col: u8,
) -> Result<Option<u8>, CompletionError> {
    let set = candidates(pls, row, col)?;
    Ok(if set.len() == 1 {
        set.iter().next()
    } else {
        None
    })
}

/// Result of running forcing to a fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    /// Input plus every entry added by forcing; contains the input even
    /// when the closure halted on a contradiction.
    pub square: PartialLatinSquare,
    /// True when some empty cell ended up with no candidate at all.
    pub contradictory: bool,
}

/// Repeatedly adds every forced entry until no empty cell is forced.
///
/// An empty cell with zero candidates halts the closure and flags the
/// result as contradictory. The operation is idempotent and its result
/// always contains the input.
pub fn forcing_closure(pls: &PartialLatinSquare) -> Closure {
    let mut current = pls.clone();
    let n = current.order();
    let full = full_mask(n);
    loop {
        let mut changed = false;
        for r in 1..=n as u8 {
            for c in 1..=n as u8 {
                if current.cell_raw(r, c) != 0 {
                    continue;
                }
                let mask = full & !current.row_used_mask(r) & !current.col_used_mask(c);
                if mask == 0 {
                    return Closure {
                        square: current,
                        contradictory: true,
                    };
                }
                if mask.count_ones() == 1 {
                    let s = mask.trailing_zeros() as u8 + 1;
                    current
                        .insert(crate::model::Entry::new(r, c, s))
                        .expect("forced entry is conflict-free");
                    changed = true;
                }
            }
        }
        if !changed {
            return Closure {
                square: current,
                contradictory: false,
            };
        }
    }
}

/// A completion count, possibly truncated at a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletionCount {
    pub count: u64,
    /// True iff counting stopped at the cap; then `count == cap` and the
    /// true number of completions is at least the cap.
    pub capped: bool,
}

struct CompletionSearch {
    n: usize,
    full: u64,
    grid: Vec<u8>,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
    empties: usize,
    cap: u64,
    count: u64,
    capped: bool,
    first: Option<Vec<u8>>,
}

impl CompletionSearch {
    fn new(pls: &PartialLatinSquare, cap: u64) -> Self {
        let n = pls.order();
        let mut grid = vec![0u8; n * n];
        let mut row_used = vec![0u64; n];
        let mut col_used = vec![0u64; n];
        for e in pls.entries() {
            grid[(e.row as usize - 1) * n + (e.col as usize - 1)] = e.symbol;
            row_used[e.row as usize - 1] |= symbol_bit(e.symbol);
            col_used[e.col as usize - 1] |= symbol_bit(e.symbol);
        }
        let empties = n * n - pls.len();
        CompletionSearch {
            n,
            full: full_mask(n),
            grid,
            row_used,
            col_used,
            empties,
            cap,
            count: 0,
            capped: false,
            first: None,
        }
    }

    #[inline]
    fn place(&mut self, idx: usize, s: u8) {
        self.grid[idx] = s;
        self.row_used[idx / self.n] |= symbol_bit(s);
        self.col_used[idx % self.n] |= symbol_bit(s);
        self.empties -= 1;
    }

    #[inline]
    fn unplace(&mut self, idx: usize) {
        let s = self.grid[idx];
        self.grid[idx] = 0;
        self.row_used[idx / self.n] &= !symbol_bit(s);
        self.col_used[idx % self.n] &= !symbol_bit(s);
        self.empties += 1;
    }

    /// Places every naked single reachable from the current state,
    /// recording placements on the trail. Returns false on a cell with
    /// zero candidates.
    fn propagate(&mut self, trail: &mut Vec<usize>) -> bool {
        loop {
            let mut changed = false;
            for idx in 0..self.n * self.n {
                if self.grid[idx] != 0 {
                    continue;
                }
                let mask = self.full & !self.row_used[idx / self.n] & !self.col_used[idx % self.n];
                if mask == 0 {
                    return false;
                }
                if mask.count_ones() == 1 {
                    self.place(idx, mask.trailing_zeros() as u8 + 1);
                    trail.push(idx);
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Minimum-remaining-values branching with forcing closure at every
    /// node; ties broken in row-major order, symbols tried ascending.
    fn search(&mut self) {
        let mut trail: Vec<usize> = Vec::new();
        if self.propagate(&mut trail) {
            if self.empties == 0 {
                self.count += 1;
                if self.first.is_none() {
                    self.first = Some(self.grid.clone());
                }
                if self.count >= self.cap {
                    self.capped = true;
                }
            } else {
                let mut best_idx = usize::MAX;
                let mut best_mask = 0u64;
                let mut best_len = u32::MAX;
                for idx in 0..self.n * self.n {
                    if self.grid[idx] != 0 {
                        continue;
                    }
                    let mask =
                        self.full & !self.row_used[idx / self.n] & !self.col_used[idx % self.n];
                    let len = mask.count_ones();
                    if len < best_len {
                        best_len = len;
                        best_mask = mask;
                        best_idx = idx;
                    }
                }
                let mut rest = best_mask;
                while rest != 0 {
                    let s = rest.trailing_zeros() as u8 + 1;
                    rest &= rest - 1;
                    self.place(best_idx, s);
                    self.search();
                    self.unplace(best_idx);
                    if self.capped {
                        break;
                    }
                }
            }
        }
        for idx in trail.into_iter().rev() {
            self.unplace(idx);
        }
    }
}

/// Number of Latin squares of the ambient order containing `pls`, exact
/// when below `cap`, else truncated at `cap`.
///
/// # Panics
/// Panics if `cap` is zero.
pub fn count_completions(pls: &PartialLatinSquare, cap: u64) -> CompletionCount {
    assert!(cap >= 1, "cap must be at least 1");
    let mut search = CompletionSearch::new(pls, cap);
    search.search();
    CompletionCount {
        count: search.count,
        capped: search.capped,
    }
}

/// The unique completion of `pls`, when exactly one exists.
pub fn is_uniquely_completable(pls: &PartialLatinSquare) -> Option<LatinSquare> {
    let mut search = CompletionSearch::new(pls, 2);
    search.search();
    if search.count == 1 {
        let grid = search.first.expect("a counted completion was recorded");
        let n = pls.order();
        let rows: Vec<Vec<u8>> = (0..n).map(|r| grid[r * n..(r + 1) * n].to_vec()).collect();
        Some(LatinSquare::from_rows(&rows).expect("search produces a valid square"))
    } else {
        None
    }
}
