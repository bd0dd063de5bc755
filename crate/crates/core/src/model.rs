//! Data model for partial Latin squares, Latin squares, and shapes.
//!
//! Symbols and coordinates are 1-based everywhere on the public surface;
//! 0 stands for an empty cell in the text format. Orders are capped at 64
//! so one `u64` holds a full row or column occupancy mask.

use std::fmt;

use thiserror::Error;

/// Largest supported order; keeps every occupancy mask in one machine word.
pub const MAX_ORDER: usize = 64;

/// Returns the mask with the low `n` symbol bits set.
pub(crate) fn full_mask(n: usize) -> u64 {
    debug_assert!((1..=MAX_ORDER).contains(&n));
    if n == MAX_ORDER {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Bit for symbol `s` (1-based) in an occupancy mask.
#[inline]
pub(crate) fn symbol_bit(s: u8) -> u64 {
    1u64 << (s - 1)
}

/// One filled cell: `symbol` placed at (`row`, `col`), all in `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub row: u8,
    pub col: u8,
    pub symbol: u8,
}

impl Entry {
    pub fn new(row: u8, col: u8, symbol: u8) -> Self {
        Entry { row, col, symbol }
    }

    fn in_range(&self, order: usize) -> bool {
        let n = order as u8;
        (1..=n).contains(&self.row) && (1..=n).contains(&self.col) && (1..=n).contains(&self.symbol)
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{})", self.row, self.col, self.symbol)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("order {0} out of range 1..={MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("entry {0} out of range for order {1}")]
    EntryOutOfRange(Entry, usize),
    #[error("cell ({0}, {1}) is already filled")]
    CellFilled(u8, u8),
    #[error("duplicate symbol in row {0}")]
    RowConflict(u8),
    #[error("duplicate symbol in column {0}")]
    ColConflict(u8),
    #[error("entry {0} is not present")]
    EntryAbsent(Entry),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("cell ({0}, {1}) is empty; not a complete Latin square")]
    IncompleteSquare(u8, u8),
    #[error("duplicate cell ({0}, {1}) in shape")]
    DuplicateCell(u8, u8),
    #[error("cell ({0}, {1}) out of range for order {2}")]
    CellOutOfRange(u8, u8, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        msg: msg.into(),
    }
}

/// A conflict-free set of filled cells of a fixed order.
///
/// The entry set, the per-row/per-column symbol masks, and the per-row
/// filled-cell masks are kept consistent by construction; [`audit`]
/// re-derives everything from the cell array and checks agreement.
/// Values are immutable through the public surface: building operations
/// return new values.
///
/// [`audit`]: PartialLatinSquare::audit
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialLatinSquare {
    order: usize,
    /// Row-major cells, 0 = empty, 1..=n = symbol.
    cells: Vec<u8>,
    /// Bit s-1 set iff symbol s occurs in the row.
    row_used: Vec<u64>,
    /// Bit s-1 set iff symbol s occurs in the column.
    col_used: Vec<u64>,
    /// Bit c-1 set iff cell (row, c) is filled.
    row_filled: Vec<u64>,
    size: usize,
}

impl PartialLatinSquare {
    /// The empty partial square of the given order.
    pub fn empty(order: usize) -> Result<Self, ModelError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(ModelError::OrderOutOfRange(order));
        }
        Ok(PartialLatinSquare {
            order,
            cells: vec![0; order * order],
            row_used: vec![0; order],
            col_used: vec![0; order],
            row_filled: vec![0; order],
            size: 0,
        })
    }

    /// Builds a partial square from entries, rejecting any conflict.
    pub fn from_entries<I>(order: usize, entries: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Entry>,
    {
        let mut pls = PartialLatinSquare::empty(order)?;
        for e in entries {
            pls.insert(e)?;
        }
        Ok(pls)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of filled cells.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    fn idx(&self, row: u8, col: u8) -> usize {
        (row as usize - 1) * self.order + (col as usize - 1)
    }

    /// Symbol at (row, col), or `None` when the cell is empty.
    ///
    /// # Panics
    /// Panics if the coordinates are outside `1..=order`.
    pub fn get(&self, row: u8, col: u8) -> Option<u8> {
        assert!(
            (1..=self.order as u8).contains(&row) && (1..=self.order as u8).contains(&col),
            "cell ({row}, {col}) out of range"
        );
        match self.cells[self.idx(row, col)] {
            0 => None,
            s => Some(s),
        }
    }

    pub fn is_filled(&self, row: u8, col: u8) -> bool {
        self.get(row, col).is_some()
    }

    /// Entries in canonical row-major order.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        let n = self.order;
        self.cells
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s != 0)
            .map(move |(i, &s)| Entry::new((i / n) as u8 + 1, (i % n) as u8 + 1, s))
    }

    #[inline]
    pub(crate) fn row_used_mask(&self, row: u8) -> u64 {
        self.row_used[row as usize - 1]
    }

    #[inline]
    pub(crate) fn col_used_mask(&self, col: u8) -> u64 {
        self.col_used[col as usize - 1]
    }

    pub(crate) fn cell_raw(&self, row: u8, col: u8) -> u8 {
        self.cells[self.idx(row, col)]
    }

    /// Inserts an entry in place; the building blocks for the public
    /// value-returning operations. Any Latin-property violation is
    /// rejected and leaves the value untouched.
    pub(crate) fn insert(&mut self, e: Entry) -> Result<(), ModelError> {
        if !e.in_range(self.order) {
            return Err(ModelError::EntryOutOfRange(e, self.order));
        }
        let r = e.row as usize - 1;
        let c = e.col as usize - 1;
        if self.row_filled[r] & (1u64 << c) != 0 {
            return Err(ModelError::CellFilled(e.row, e.col));
        }
        let bit = symbol_bit(e.symbol);
        if self.row_used[r] & bit != 0 {
            return Err(ModelError::RowConflict(e.row));
        }
        if self.col_used[c] & bit != 0 {
            return Err(ModelError::ColConflict(e.col));
        }
        self.cells[r * self.order + c] = e.symbol;
        self.row_used[r] |= bit;
        self.col_used[c] |= bit;
        self.row_filled[r] |= 1u64 << c;
        self.size += 1;
        Ok(())
    }

    pub(crate) fn remove(&mut self, row: u8, col: u8) -> Option<u8> {
        let r = row as usize - 1;
        let c = col as usize - 1;
        let s = self.cells[r * self.order + c];
        if s == 0 {
            return None;
        }
        let bit = symbol_bit(s);
        self.cells[r * self.order + c] = 0;
        self.row_used[r] &= !bit;
        self.col_used[c] &= !bit;
        self.row_filled[r] &= !(1u64 << c);
        self.size -= 1;
        Some(s)
    }

    /// New value with `e` added; rejects conflicts.
    pub fn with_entry(&self, e: Entry) -> Result<Self, ModelError> {
        let mut next = self.clone();
        next.insert(e)?;
        Ok(next)
    }

    /// New value with `e` removed; the entry must be present exactly.
    pub fn without_entry(&self, e: Entry) -> Result<Self, ModelError> {
        if !e.in_range(self.order) || self.get(e.row, e.col) != Some(e.symbol) {
            return Err(ModelError::EntryAbsent(e));
        }
        let mut next = self.clone();
        next.remove(e.row, e.col);
        Ok(next)
    }

    /// True iff the raw entry list satisfies the partial Latin property:
    /// no two entries share a cell, and no symbol repeats in a row or column.
    pub fn is_valid_entry_set(order: usize, entries: &[Entry]) -> bool {
        if !(1..=MAX_ORDER).contains(&order) {
            return false;
        }
        PartialLatinSquare::from_entries(order, entries.iter().copied()).is_ok()
    }

    /// Re-derives every mask from the cell array and checks that the stored
    /// masks agree and that the Latin property holds.
    pub fn audit(&self) -> bool {
        let n = self.order;
        let mut row_used = vec![0u64; n];
        let mut col_used = vec![0u64; n];
        let mut row_filled = vec![0u64; n];
        let mut size = 0;
        for (i, &s) in self.cells.iter().enumerate() {
            if s == 0 {
                continue;
            }
            if s as usize > n {
                return false;
            }
            let (r, c) = (i / n, i % n);
            let bit = symbol_bit(s);
            if row_used[r] & bit != 0 || col_used[c] & bit != 0 {
                return false;
            }
            row_used[r] |= bit;
            col_used[c] |= bit;
            row_filled[r] |= 1u64 << c;
            size += 1;
        }
        row_used == self.row_used
            && col_used == self.col_used
            && row_filled == self.row_filled
            && size == self.size
    }

    /// The set of filled positions, with per-row and per-column counts.
    pub fn shape(&self) -> Shape {
        let cells: Vec<(u8, u8)> = self.entries().map(|e| (e.row, e.col)).collect();
        Shape::new(self.order, cells).expect("positions of a valid square form a shape")
    }

    /// True iff every entry of `self` appears in `square`.
    pub fn is_contained_in(&self, square: &LatinSquare) -> Result<bool, ModelError> {
        if self.order != square.order() {
            return Err(ModelError::OrderMismatch(self.order, square.order()));
        }
        Ok(self.entries().all(|e| square.get(e.row, e.col) == e.symbol))
    }

    /// Converts to a complete Latin square; errors on the first empty cell.
    pub fn try_into_square(&self) -> Result<LatinSquare, ModelError> {
        let n = self.order;
        for r in 0..n {
            for c in 0..n {
                if self.cells[r * n + c] == 0 {
                    return Err(ModelError::IncompleteSquare(r as u8 + 1, c as u8 + 1));
                }
            }
        }
        Ok(LatinSquare {
            order: n,
            grid: self.cells.clone(),
        })
    }

    /// Parses the square text format: first line the order, then one line
    /// per row of whitespace-separated symbols, 0 for an empty cell.
    pub fn parse_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let order: usize = first
            .trim()
            .parse()
            .map_err(|_| parse_err(1, format!("invalid order {:?}", first.trim())))?;
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(parse_err(
                1,
                format!("order {order} out of range 1..={MAX_ORDER}"),
            ));
        }
        let mut pls = PartialLatinSquare::empty(order)?;
        for r in 1..=order {
            let line_no = r + 1;
            let line = lines.next().ok_or_else(|| {
                parse_err(line_no, format!("expected {order} rows, found {}", r - 1))
            })?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != order {
                return Err(parse_err(
                    line_no,
                    format!("expected {order} cells in row {r}, found {}", tokens.len()),
                ));
            }
            for (c, tok) in tokens.iter().enumerate() {
                let value: usize = tok.parse().map_err(|_| {
                    parse_err(
                        line_no,
                        format!("row {r}, col {}: invalid cell {tok:?}", c + 1),
                    )
                })?;
                if value == 0 {
                    continue;
                }
                if value > order {
                    return Err(parse_err(
                        line_no,
                        format!(
                            "row {r}, col {}: symbol {value} out of range 1..={order}",
                            c + 1
                        ),
                    ));
                }
                let entry = Entry::new(r as u8, c as u8 + 1, value as u8);
                pls.insert(entry)
                    .map_err(|e| parse_err(line_no, e.to_string()))?;
            }
        }
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(parse_err(
                order + 2,
                format!("unexpected extra line {extra:?} after {order} rows"),
            ));
        }
        Ok(pls)
    }

    /// Serializes to the square text format; round-trips through
    /// [`parse_text`](Self::parse_text).
    pub fn to_text(&self) -> String {
        let n = self.order;
        let mut out = String::new();
        out.push_str(&n.to_string());
        out.push('\n');
        for r in 0..n {
            for c in 0..n {
                if c > 0 {
                    out.push(' ');
                }
                out.push_str(&self.cells[r * n + c].to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// A completely filled partial Latin square.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    order: usize,
    grid: Vec<u8>,
}

impl LatinSquare {
    /// Builds a square from row-major rows, checking the Latin property.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, ModelError> {
        let order = rows.len();
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(ModelError::OrderOutOfRange(order));
        }
        let mut pls = PartialLatinSquare::empty(order)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(ModelError::OrderMismatch(row.len(), order));
            }
            for (c, &s) in row.iter().enumerate() {
                pls.insert(Entry::new(r as u8 + 1, c as u8 + 1, s))?;
            }
        }
        pls.try_into_square()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Symbol at (row, col), 1-based.
    ///
    /// # Panics
    /// Panics if the coordinates are outside `1..=order`.
    pub fn get(&self, row: u8, col: u8) -> u8 {
        assert!(
            (1..=self.order as u8).contains(&row) && (1..=self.order as u8).contains(&col),
            "cell ({row}, {col}) out of range"
        );
        self.grid[(row as usize - 1) * self.order + (col as usize - 1)]
    }

    pub fn entry_at(&self, row: u8, col: u8) -> Entry {
        Entry::new(row, col, self.get(row, col))
    }

    /// All n^2 entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        let n = self.order;
        self.grid
            .iter()
            .enumerate()
            .map(move |(i, &s)| Entry::new((i / n) as u8 + 1, (i % n) as u8 + 1, s))
    }

    pub fn contains(&self, e: Entry) -> bool {
        e.in_range(self.order) && self.get(e.row, e.col) == e.symbol
    }

    pub fn to_partial(&self) -> PartialLatinSquare {
        PartialLatinSquare::from_entries(self.order, self.entries())
            .expect("a Latin square is a valid partial square")
    }

    /// The sub-square of `self` on the cells of `shape`.
    pub fn restrict_to(&self, shape: &Shape) -> Result<PartialLatinSquare, ModelError> {
        if shape.order() != self.order {
            return Err(ModelError::OrderMismatch(shape.order(), self.order));
        }
        PartialLatinSquare::from_entries(
            self.order,
            shape.cells().iter().map(|&(r, c)| self.entry_at(r, c)),
        )
    }

    pub fn parse_text(text: &str) -> Result<Self, ModelError> {
        PartialLatinSquare::parse_text(text)?.try_into_square()
    }

    pub fn to_text(&self) -> String {
        self.to_partial().to_text()
    }
}

/// A set of cell positions of a fixed order, without symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    order: usize,
    /// (row, col) positions in row-major order.
    cells: Vec<(u8, u8)>,
    row_counts: Vec<usize>,
    col_counts: Vec<usize>,
}

impl Shape {
    pub fn new(order: usize, mut cells: Vec<(u8, u8)>) -> Result<Self, ModelError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(ModelError::OrderOutOfRange(order));
        }
        cells.sort_unstable();
        let mut row_counts = vec![0usize; order];
        let mut col_counts = vec![0usize; order];
        let mut prev: Option<(u8, u8)> = None;
        for &(r, c) in &cells {
            if !(1..=order as u8).contains(&r) || !(1..=order as u8).contains(&c) {
                return Err(ModelError::CellOutOfRange(r, c, order));
            }
            if prev == Some((r, c)) {
                return Err(ModelError::DuplicateCell(r, c));
            }
            prev = Some((r, c));
            row_counts[r as usize - 1] += 1;
            col_counts[c as usize - 1] += 1;
        }
        Ok(Shape {
            order,
            cells,
            row_counts,
            col_counts,
        })
    }

    /// The shape containing every cell of the array.
    pub fn full(order: usize) -> Result<Self, ModelError> {
        let n = order as u8;
        let cells = (1..=n).flat_map(|r| (1..=n).map(move |c| (r, c))).collect();
        Shape::new(order, cells)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[(u8, u8)] {
        &self.cells
    }

    /// Cells per row, indexed 0-based by row.
    pub fn row_counts(&self) -> &[usize] {
        &self.row_counts
    }

    /// Cells per column, indexed 0-based by column.
    pub fn col_counts(&self) -> &[usize] {
        &self.col_counts
    }
}
