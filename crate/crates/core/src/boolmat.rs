//! Bit-packed Boolean matrices and combinatorial rectangles.
//!
//! Storage is row-major with one `u64` word run per row. Bits past `cols` in
//! the last word of each row are always zero, so word-level popcounts never
//! need masking on the read path. Column scans go through a transposed copy
//! that is built on first use and cached for the lifetime of the matrix.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => !0,
        rem => (1u64 << rem) - 1,
    }
}

/// Iterate the positions of set bits in a word slice, lowest first.
pub(crate) fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * WORD_BITS + bit)
        })
    })
}

/// A dense 0/1 matrix, one bit per entry (1 = one-entry).
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    transposed: OnceLock<Box<BoolMatrix>>,
}

impl BoolMatrix {
    /// All-zero `rows x cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions { rows, cols });
        }
        let words_per_row = words_for(cols);
        Ok(Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
            transposed: OnceLock::new(),
        })
    }

    /// All-one `rows x cols` matrix.
    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        let mask = tail_mask(cols);
        for r in 0..rows {
            let row = m.row_words_mut(r);
            row.fill(!0);
            *row.last_mut().unwrap() = mask;
        }
        Ok(m)
    }

    /// `n x n` matrix with ones exactly on the diagonal.
    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.put(i, i, true);
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.put(r, c, true);
                }
            }
        }
        Ok(m)
    }

    /// Build from textual rows such as `["101", "010"]`. Whitespace inside a
    /// row is ignored.
    pub fn from_bit_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed: Vec<Vec<bool>> = rows
            .iter()
            .map(|row| {
                row.as_ref()
                    .chars()
                    .filter(|ch| !ch.is_whitespace())
                    .map(|ch| match ch {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::Parse(format!("unexpected character {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, Vec::len);
        if parsed.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged rows".into()));
        }
        Self::from_fn(parsed.len(), cols, |r, c| parsed[r][c])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    fn check(&self, row: usize, col: usize) -> Result<()> {
        if row < self.rows && col < self.cols {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// The stored bit at `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> Result<bool> {
        self.check(row, col)?;
        Ok(self.get(row, col))
    }

    /// Unchecked-by-`Result` read; panics on out-of-range indices.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols, "index out of range");
        let word = self.bits[row * self.words_per_row + col / WORD_BITS];
        (word >> (col % WORD_BITS)) & 1 == 1
    }

    #[inline]
    fn put(&mut self, row: usize, col: usize, value: bool) {
        let idx = row * self.words_per_row + col / WORD_BITS;
        let mask = 1u64 << (col % WORD_BITS);
        if value {
            self.bits[idx] |= mask;
        } else {
            self.bits[idx] &= !mask;
        }
    }

    /// Overwrite one entry. Drops the cached transpose.
    pub fn set(&mut self, row: usize, col: usize, value: bool) -> Result<()> {
        self.check(row, col)?;
        self.put(row, col, value);
        self.transposed = OnceLock::new();
        Ok(())
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        let start = row * self.words_per_row;
        &self.bits[start..start + self.words_per_row]
    }

    fn row_words_mut(&mut self, row: usize) -> &mut [u64] {
        let start = row * self.words_per_row;
        &mut self.bits[start..start + self.words_per_row]
    }

    /// Mask of valid bits in the last word of a row.
    pub fn last_word_mask(&self) -> u64 {
        tail_mask(self.cols)
    }

    /// Column indices of the one-entries in `row`, ascending.
    pub fn row_ones(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        set_bits(self.row_words(row))
    }

    /// All one-entries in row-major order.
    pub fn ones_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| self.row_ones(r).map(move |c| (r, c)))
    }

    pub fn row_popcount(&self, row: usize) -> usize {
        self.row_words(row).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of one-entries.
    pub fn popcount(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of zero-entries.
    pub fn count_zeros(&self) -> usize {
        self.rows * self.cols - self.popcount()
    }

    /// Transposed copy, built once and cached.
    pub fn transposed(&self) -> &BoolMatrix {
        self.transposed.get_or_init(|| {
            let mut t = BoolMatrix::zeros(self.cols, self.rows).expect("dimensions already validated");
            for (r, c) in self.ones_iter() {
                t.put(c, r, true);
            }
            Box::new(t)
        })
    }

    /// Column `col` as a bit vector over rows.
    pub fn col_words(&self, col: usize) -> &[u64] {
        self.transposed().row_words(col)
    }

    /// Bit mask over this matrix's columns with exactly `cols` set.
    pub fn col_mask(&self, cols: &[usize]) -> Vec<u64> {
        let mut mask = vec![0u64; self.words_per_row];
        for &c in cols {
            mask[c / WORD_BITS] |= 1u64 << (c % WORD_BITS);
        }
        mask
    }

    fn check_rect(&self, rect: &Rectangle) -> Result<()> {
        if let Some(&r) = rect.rows.last() {
            if r >= self.rows {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: rect.cols.first().copied().unwrap_or(0),
                    rows: self.rows,
                    cols: self.cols,
                });
            }
        }
        if let Some(&c) = rect.cols.last() {
            if c >= self.cols {
                return Err(Error::IndexOutOfRange {
                    row: rect.rows.first().copied().unwrap_or(0),
                    col: c,
                    rows: self.rows,
                    cols: self.cols,
                });
            }
        }
        Ok(())
    }

    /// True iff every entry of `rect` is 1. Empty rectangles are vacuously
    /// monochromatic.
    pub fn is_monochromatic_one(&self, rect: &Rectangle) -> Result<bool> {
        self.check_rect(rect)?;
        if rect.is_empty() {
            return Ok(true);
        }
        let mask = self.col_mask(&rect.cols);
        Ok(rect.rows.iter().all(|&r| {
            self.row_words(r)
                .iter()
                .zip(&mask)
                .all(|(&row, &m)| row & m == m)
        }))
    }

    /// First zero-entry inside `rect`, row-major.
    pub fn first_zero_in(&self, rect: &Rectangle) -> Result<Option<(usize, usize)>> {
        self.check_rect(rect)?;
        let mask = self.col_mask(&rect.cols);
        for &r in &rect.rows {
            let missing: Vec<u64> = self
                .row_words(r)
                .iter()
                .zip(&mask)
                .map(|(&row, &m)| !row & m)
                .collect();
            let first = set_bits(&missing).next();
            if let Some(c) = first {
                return Ok(Some((r, c)));
            }
        }
        Ok(None)
    }

    /// Some 2x2 all-zero submatrix, if one exists.
    ///
    /// Scans column pairs `(c1, c2)` in lexicographic order, intersecting the
    /// complemented columns; the witness is the first pair whose common zero
    /// rows number at least two, with the two lowest such rows.
    pub fn find_zero_2x2(&self) -> Option<ZeroBlock> {
        let t = self.transposed();
        let mask = t.last_word_mask();
        let last = t.words_per_row - 1;
        (0..self.cols).into_par_iter().find_map_first(|c1| {
            let a = t.row_words(c1);
            (c1 + 1..self.cols).find_map(|c2| {
                let b = t.row_words(c2);
                let mut found: [usize; 2] = [0; 2];
                let mut seen = 0;
                for (w, (&x, &y)) in a.iter().zip(b).enumerate() {
                    let mut common = !x & !y;
                    if w == last {
                        common &= mask;
                    }
                    while common != 0 && seen < 2 {
                        found[seen] = w * WORD_BITS + common.trailing_zeros() as usize;
                        common &= common - 1;
                        seen += 1;
                    }
                    if seen == 2 {
                        return Some(ZeroBlock {
                            r1: found[0],
                            r2: found[1],
                            c1,
                            c2,
                        });
                    }
                }
                None
            })
        })
    }

    /// Every one-entry not contained in any rectangle of `cover`, row-major.
    pub fn coverage_defect(&self, cover: &[Rectangle]) -> Result<Vec<(usize, usize)>> {
        for rect in cover {
            self.check_rect(rect)?;
        }
        let mut covered = vec![0u64; self.bits.len()];
        for rect in cover {
            if rect.is_empty() {
                continue;
            }
            let mask = self.col_mask(&rect.cols);
            for &r in &rect.rows {
                let start = r * self.words_per_row;
                for (dst, &m) in covered[start..start + self.words_per_row].iter_mut().zip(&mask) {
                    *dst |= m;
                }
            }
        }
        let mut defect = Vec::new();
        for r in 0..self.rows {
            let start = r * self.words_per_row;
            let missing: Vec<u64> = self
                .row_words(r)
                .iter()
                .zip(&covered[start..start + self.words_per_row])
                .map(|(&bits, &cov)| bits & !cov)
                .collect();
            defect.extend(set_bits(&missing).map(|c| (r, c)));
        }
        Ok(defect)
    }
}

impl Clone for BoolMatrix {
    fn clone(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            words_per_row: self.words_per_row,
            bits: self.bits.clone(),
            transposed: OnceLock::new(),
        }
    }
}

impl PartialEq for BoolMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.bits == other.bits
    }
}

impl Eq for BoolMatrix {}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix {}x{}", self.rows, self.cols)?;
        if self.rows * self.cols <= 4096 {
            for r in 0..self.rows {
                let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

/// Rows `r1 < r2` and columns `c1 < c2` whose four entries are all zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroBlock {
    pub r1: usize,
    pub r2: usize,
    pub c1: usize,
    pub c2: usize,
}

impl fmt::Display for ZeroBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows ({}, {}) x cols ({}, {})", self.r1, self.r2, self.c1, self.c2)
    }
}

/// A combinatorial rectangle `rows x cols`. Both index lists are kept sorted
/// and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "RawRectangle")]
pub struct Rectangle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

#[derive(Deserialize)]
struct RawRectangle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl From<RawRectangle> for Rectangle {
    fn from(raw: RawRectangle) -> Self {
        Rectangle::new(raw.rows, raw.cols)
    }
}

impl Rectangle {
    pub fn new(rows: impl IntoIterator<Item = usize>, cols: impl IntoIterator<Item = usize>) -> Self {
        let mut rows: Vec<usize> = rows.into_iter().collect();
        let mut cols: Vec<usize> = cols.into_iter().collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Self { rows, cols }
    }

    /// Every row and column of `matrix`.
    pub fn full(matrix: &BoolMatrix) -> Self {
        Self {
            rows: (0..matrix.rows()).collect(),
            cols: (0..matrix.cols()).collect(),
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.rows.binary_search(&row).is_ok() && self.cols.binary_search(&col).is_ok()
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .flat_map(move |&r| self.cols.iter().map(move |&c| (r, c)))
    }
}
