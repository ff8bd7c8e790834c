//! Brute-force oracles shared by the integration suites. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rectcover::{BoolMatrix, Rectangle};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p_one: f64) -> BoolMatrix {
    BoolMatrix::from_fn(rows, cols, |_, _| rng.random_bool(p_one)).unwrap()
}

/// Every `rows x cols` matrix, bits taken from `code` row-major.
pub fn matrix_from_code(rows: usize, cols: usize, code: u64) -> BoolMatrix {
    BoolMatrix::from_fn(rows, cols, |r, c| (code >> (r * cols + c)) & 1 == 1).unwrap()
}

/// Count incident (point, line) pairs by evaluating the line equation on
/// every pair of `{1..m} x {1..2m^2}`.
pub fn brute_zero_count(m: u64) -> u64 {
    let h = 2 * m * m;
    let mut zeros = 0;
    for x in 1..=m {
        for y in 1..=h {
            for slope in 1..=m {
                for intercept in 1..=h {
                    if slope * x + intercept == y {
                        zeros += 1;
                    }
                }
            }
        }
    }
    zeros
}

/// Quadruple loop; returns the lexicographically first `(c1, c2)` with at
/// least two common zero rows, and those two lowest rows.
pub fn naive_zero_2x2(m: &BoolMatrix) -> Option<(usize, usize, usize, usize)> {
    for c1 in 0..m.cols() {
        for c2 in c1 + 1..m.cols() {
            let rows: Vec<usize> = (0..m.rows()).filter(|&r| !m.get(r, c1) && !m.get(r, c2)).collect();
            if rows.len() >= 2 {
                return Some((rows[0], rows[1], c1, c2));
            }
        }
    }
    None
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

fn all_ones(m: &BoolMatrix, rows: &[usize], cols: &[usize]) -> bool {
    rows.iter().all(|&r| cols.iter().all(|&c| m.get(r, c)))
}

/// All inclusion-maximal all-one rectangles by checking every pair of
/// nonempty row and column subsets and trying to extend each by one line.
pub fn brute_maximal(m: &BoolMatrix) -> Vec<Rectangle> {
    let mut out = Vec::new();
    for rows in subsets(m.rows()) {
        for cols in subsets(m.cols()) {
            if !all_ones(m, &rows, &cols) {
                continue;
            }
            let row_ext = (0..m.rows()).any(|r| !rows.contains(&r) && cols.iter().all(|&c| m.get(r, c)));
            let col_ext = (0..m.cols()).any(|c| !cols.contains(&c) && rows.iter().all(|&r| m.get(r, c)));
            if !row_ext && !col_ext {
                out.push(Rectangle::new(rows.clone(), cols));
            }
        }
    }
    out.sort();
    out
}

/// Smallest number of maximal rectangles covering all ones, by trying
/// subsets in order of size.
pub fn brute_min_cover(m: &BoolMatrix) -> usize {
    let ones: Vec<(usize, usize)> = (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| m.get(r, c))
        .collect();
    if ones.is_empty() {
        return 0;
    }
    let rects = brute_maximal(m);
    let masks: Vec<u64> = rects
        .iter()
        .map(|rect| {
            ones.iter()
                .enumerate()
                .filter(|(_, &(r, c))| rect.contains(r, c))
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let full = (1u64 << ones.len()) - 1;
    let k = rects.len();
    let mut best = usize::MAX;
    for choice in 1u64..(1 << k) {
        let size = choice.count_ones() as usize;
        if size >= best {
            continue;
        }
        let union = (0..k).filter(|i| choice >> i & 1 == 1).fold(0, |acc, i| acc | masks[i]);
        if union == full {
            best = size;
        }
    }
    best
}

/// One-entries of `m` not in any rectangle, cell by cell.
pub fn naive_defect(m: &BoolMatrix, cover: &[Rectangle]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if m.get(r, c) && !cover.iter().any(|rect| rect.contains(r, c)) {
                out.push((r, c));
            }
        }
    }
    out
}

/// A cell whose flip from 1 to 0 creates a 2x2 all-zero block.
pub fn block_creating_flip(m: &BoolMatrix) -> Option<(usize, usize)> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !m.get(r, c) {
                continue;
            }
            for r2 in 0..m.rows() {
                if r2 == r || m.get(r2, c) {
                    continue;
                }
                for c2 in 0..m.cols() {
                    if c2 != c && !m.get(r, c2) && !m.get(r2, c2) {
                        return Some((r, c));
                    }
                }
            }
        }
    }
    None
}
