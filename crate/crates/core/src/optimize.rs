//! Covering-number machinery for arbitrary matrices.
//!
//! Every cover can be normalized to one that uses only inclusion-maximal
//! all-one rectangles (grow each rectangle until it is closed), so the greedy
//! and exact solvers both draw candidates from that family. Maximal
//! rectangles are exactly the pairs `(rows, cols)` where `cols` is the set of
//! columns shared by `rows` and `rows` is every row containing `cols`; the
//! column sides are the nonempty intersections of row supports.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::Serialize;

use crate::boolmat::{set_bits, BoolMatrix, Rectangle};
use crate::construction::density_of;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverLimits {
    /// Largest `rows * cols` enumerated without an explicit cap.
    pub max_entries: usize,
    /// Exact solver: most one-entries.
    pub max_ones: usize,
    /// Exact solver: most maximal rectangles.
    pub max_candidates: usize,
    /// Greedy: most maximal rectangles before falling back to closures.
    pub greedy_cap: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        Self {
            max_entries: 1024,
            max_ones: 64,
            max_candidates: 512,
            greedy_cap: 1 << 14,
        }
    }
}

/// All rows whose support contains `cols`.
fn rows_containing(matrix: &BoolMatrix, cols: &[u64]) -> Vec<usize> {
    (0..matrix.rows())
        .filter(|&r| matrix.row_words(r).iter().zip(cols).all(|(&row, &c)| row & c == c))
        .collect()
}

/// Columns shared by every row in `rows`.
fn common_cols(matrix: &BoolMatrix, rows: &[usize]) -> Vec<u64> {
    let mut acc = vec![!0u64; matrix.words_per_row()];
    *acc.last_mut().unwrap() = matrix.last_word_mask();
    for &r in rows {
        for (a, &w) in acc.iter_mut().zip(matrix.row_words(r)) {
            *a &= w;
        }
    }
    acc
}

fn closed_rectangle(matrix: &BoolMatrix, cols: &[u64]) -> Rectangle {
    Rectangle::new(rows_containing(matrix, cols), set_bits(cols))
}

/// Every inclusion-maximal all-one rectangle, sorted by `(rows, cols)`.
/// Fails once more than `cap` are found.
pub fn maximal_rectangles(matrix: &BoolMatrix, cap: usize) -> Result<Vec<Rectangle>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut intents: Vec<Vec<u64>> = Vec::new();
    for r in 0..matrix.rows() {
        let support = matrix.row_words(r);
        if support.iter().all(|&w| w == 0) {
            continue;
        }
        let mut fresh: Vec<Vec<u64>> = Vec::new();
        for intent in intents.iter().map(|i| i.as_slice()).chain([support]) {
            let meet: Vec<u64> = intent.iter().zip(support).map(|(&a, &b)| a & b).collect();
            if meet.iter().any(|&w| w != 0) && !seen.contains(&meet) {
                seen.insert(meet.clone());
                fresh.push(meet);
            }
        }
        intents.extend(fresh);
        if intents.len() > cap {
            return Err(Error::EnumerationOverflow { cap });
        }
    }
    let mut rects: Vec<Rectangle> = intents.iter().map(|c| closed_rectangle(matrix, c)).collect();
    rects.sort();
    Ok(rects)
}

/// [`maximal_rectangles`] with the entry-count guard applied.
pub fn maximal_rectangles_guarded(matrix: &BoolMatrix, limits: &SolverLimits) -> Result<Vec<Rectangle>> {
    let entries = matrix.rows() * matrix.cols();
    if entries > limits.max_entries {
        return Err(Error::SizeGuard {
            what: "matrix entries",
            actual: entries,
            limit: limits.max_entries,
        });
    }
    maximal_rectangles(matrix, limits.max_candidates)
}

/// Grow an all-one rectangle to a maximal one containing it. Empty
/// rectangles come back unchanged.
pub fn expand_to_maximal(matrix: &BoolMatrix, rect: &Rectangle) -> Rectangle {
    if rect.is_empty() {
        return rect.clone();
    }
    let cols = common_cols(matrix, rect.rows());
    closed_rectangle(matrix, &cols)
}

/// The maximal rectangles generated by single rows and single columns. Every
/// one-entry lies in the closure of its own row, so this family is a cover
/// source of size at most `rows + cols`.
pub fn closure_candidates(matrix: &BoolMatrix) -> Vec<Rectangle> {
    let mut out: HashSet<Rectangle> = HashSet::new();
    for r in 0..matrix.rows() {
        let support = matrix.row_words(r);
        if support.iter().any(|&w| w != 0) {
            out.insert(closed_rectangle(matrix, support));
        }
    }
    for c in 0..matrix.cols() {
        let rows: Vec<usize> = set_bits(matrix.col_words(c)).collect();
        if !rows.is_empty() {
            out.insert(closed_rectangle(matrix, &common_cols(matrix, &rows)));
        }
    }
    let mut rects: Vec<Rectangle> = out.into_iter().collect();
    rects.sort();
    rects
}

/// Greedy set cover over `candidates`: repeatedly take the rectangle covering
/// the most uncovered one-entries, ties to the earliest candidate.
pub fn greedy_select(matrix: &BoolMatrix, candidates: &[Rectangle]) -> Result<Vec<Rectangle>> {
    let wpr = matrix.words_per_row();
    let mut uncovered: Vec<u64> = (0..matrix.rows()).flat_map(|r| matrix.row_words(r).to_vec()).collect();
    let mut remaining = matrix.popcount();
    let masks: Vec<Vec<u64>> = candidates.iter().map(|c| matrix.col_mask(c.cols())).collect();
    let gain = |uncovered: &[u64], i: usize| -> usize {
        candidates[i]
            .rows()
            .iter()
            .map(|&r| {
                uncovered[r * wpr..(r + 1) * wpr]
                    .iter()
                    .zip(&masks[i])
                    .map(|(&u, &m)| (u & m).count_ones() as usize)
                    .sum::<usize>()
            })
            .sum()
    };
    // Gains only shrink as entries get covered, so stale heap keys are upper
    // bounds and a refreshed key that still beats the next one is the max.
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..candidates.len()).map(|i| (gain(&uncovered, i), Reverse(i))).collect();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let Some((_, Reverse(i))) = heap.pop() else {
            return Err(Error::InvalidCover(format!(
                "candidate family leaves {remaining} one-entries uncovered"
            )));
        };
        let fresh = gain(&uncovered, i);
        if fresh == 0 {
            continue;
        }
        if let Some(&top) = heap.peek() {
            if (fresh, Reverse(i)) < top {
                heap.push((fresh, Reverse(i)));
                continue;
            }
        }
        for &r in candidates[i].rows() {
            for (u, &m) in uncovered[r * wpr..(r + 1) * wpr].iter_mut().zip(&masks[i]) {
                *u &= !m;
            }
        }
        remaining -= fresh;
        chosen.push(candidates[i].clone());
    }
    Ok(chosen)
}

/// Greedy cover over all maximal rectangles (at most `cap` of them).
pub fn greedy_cover(matrix: &BoolMatrix, cap: usize) -> Result<Vec<Rectangle>> {
    let candidates = maximal_rectangles(matrix, cap)?;
    greedy_select(matrix, &candidates)
}

/// Greedy cover over [`closure_candidates`]; works at any size.
pub fn greedy_cover_closures(matrix: &BoolMatrix) -> Result<Vec<Rectangle>> {
    greedy_select(matrix, &closure_candidates(matrix))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// The search ran to completion, so no smaller cover exists.
    pub optimal: bool,
    pub candidates: usize,
    pub nodes: u64,
    /// Greedy size the search started from.
    pub initial_upper: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCover {
    pub rects: Vec<Rectangle>,
    pub certificate: Certificate,
}

impl ExactCover {
    pub fn size(&self) -> usize {
        self.rects.len()
    }
}

struct Search<'a> {
    cand: &'a [u64],
    containing: &'a [Vec<usize>],
    best: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, uncovered: u64, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if uncovered == 0 {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        let widest = self
            .cand
            .iter()
            .map(|&c| (c & uncovered).count_ones())
            .max()
            .unwrap_or(0);
        if widest == 0 {
            return;
        }
        let lower = uncovered.count_ones().div_ceil(widest) as usize;
        if chosen.len() + lower >= self.best.len() {
            return;
        }
        // Fail-first: the uncovered entry with the fewest candidates.
        let pivot = set_bits(&[uncovered])
            .min_by_key(|&e| self.containing[e].len())
            .expect("uncovered is nonzero");
        let mut options: Vec<usize> = self.containing[pivot].clone();
        options.sort_by_key(|&i| (Reverse((self.cand[i] & uncovered).count_ones()), i));
        for i in options {
            chosen.push(i);
            self.run(uncovered & !self.cand[i], chosen);
            chosen.pop();
        }
    }
}

/// Minimum cover by branch and bound over maximal rectangles.
pub fn exact_min_cover(matrix: &BoolMatrix, limits: &SolverLimits) -> Result<ExactCover> {
    let ones: Vec<(usize, usize)> = matrix.ones_iter().collect();
    if ones.len() > limits.max_ones {
        return Err(Error::SizeGuard {
            what: "one-entries",
            actual: ones.len(),
            limit: limits.max_ones,
        });
    }
    if ones.is_empty() {
        return Ok(ExactCover {
            rects: Vec::new(),
            certificate: Certificate {
                optimal: true,
                candidates: 0,
                nodes: 0,
                initial_upper: 0,
            },
        });
    }
    let candidates = maximal_rectangles(matrix, limits.max_candidates).map_err(|_| Error::SizeGuard {
        what: "maximal rectangles",
        actual: limits.max_candidates + 1,
        limit: limits.max_candidates,
    })?;
    let bit_of = |r: usize, c: usize| ones.binary_search(&(r, c)).expect("cell is a one-entry");
    let cand: Vec<u64> = candidates
        .iter()
        .map(|rect| rect.cells().fold(0u64, |acc, (r, c)| acc | 1 << bit_of(r, c)))
        .collect();
    let mut containing = vec![Vec::new(); ones.len()];
    for (i, &mask) in cand.iter().enumerate() {
        for e in set_bits(&[mask]) {
            containing[e].push(i);
        }
    }
    let greedy = greedy_select(matrix, &candidates)?;
    let initial: Vec<usize> = greedy
        .iter()
        .map(|g| candidates.binary_search(g).expect("greedy picks from candidates"))
        .collect();
    let initial_upper = initial.len();
    let mut search = Search {
        cand: &cand,
        containing: &containing,
        best: initial,
        nodes: 0,
    };
    let full = if ones.len() == 64 { !0 } else { (1u64 << ones.len()) - 1 };
    search.run(full, &mut Vec::new());
    let mut picked = search.best.clone();
    picked.sort_unstable();
    Ok(ExactCover {
        rects: picked.into_iter().map(|i| candidates[i].clone()).collect(),
        certificate: Certificate {
            optimal: true,
            candidates: candidates.len(),
            nodes: search.nodes,
            initial_upper,
        },
    })
}

/// A set of one-entries no two of which fit in one all-one rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoolingSet {
    pub witness: Vec<(usize, usize)>,
}

impl FoolingSet {
    pub fn size(&self) -> usize {
        self.witness.len()
    }
}

/// Two one-entries conflict when one of the cross entries is zero.
pub fn conflicts(matrix: &BoolMatrix, a: (usize, usize), b: (usize, usize)) -> bool {
    !matrix.get(a.0, b.1) || !matrix.get(b.0, a.1)
}

/// Greedy fooling set: scan one-entries from the sparsest row/column
/// neighbourhood outwards and keep each entry that conflicts with every one
/// kept so far.
pub fn fooling_lower_bound(matrix: &BoolMatrix) -> FoolingSet {
    let row_w: Vec<usize> = (0..matrix.rows()).map(|r| matrix.row_popcount(r)).collect();
    let t = matrix.transposed();
    let col_w: Vec<usize> = (0..matrix.cols()).map(|c| t.row_popcount(c)).collect();
    let mut ones: Vec<(usize, usize)> = matrix.ones_iter().collect();
    ones.sort_by_key(|&(r, c)| (row_w[r] + col_w[c], r, c));
    let mut witness: Vec<(usize, usize)> = Vec::new();
    for e in ones {
        if witness.iter().all(|&w| conflicts(matrix, w, e)) {
            witness.push(e);
        }
    }
    witness.sort_unstable();
    FoolingSet { witness }
}

/// Where the greedy candidates came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateFamily {
    AllMaximal,
    Closures,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverStats {
    #[serde(skip)]
    pub rows: usize,
    #[serde(skip)]
    pub cols: usize,
    pub ones: usize,
    pub zeros: usize,
    pub d: f64,
    pub explicit: Option<usize>,
    pub greedy: usize,
    #[serde(skip)]
    pub greedy_family: CandidateFamily,
    pub exact: Option<usize>,
    pub optimal: bool,
    pub lower: usize,
    /// Why the exact solver did not run.
    #[serde(skip)]
    pub guard: Option<String>,
}

/// Tabulate every available covering quantity for `matrix`. `explicit` is
/// the size of an externally supplied cover.
pub fn stats(matrix: &BoolMatrix, explicit: Option<usize>, limits: &SolverLimits) -> Result<CoverStats> {
    let (greedy, greedy_family) = match greedy_cover(matrix, limits.greedy_cap) {
        Ok(cover) => (cover.len(), CandidateFamily::AllMaximal),
        Err(Error::EnumerationOverflow { .. }) => (greedy_cover_closures(matrix)?.len(), CandidateFamily::Closures),
        Err(e) => return Err(e),
    };
    let (exact, optimal, guard) = match exact_min_cover(matrix, limits) {
        Ok(ex) => (Some(ex.size()), ex.certificate.optimal, None),
        Err(e @ Error::SizeGuard { .. }) => (None, false, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(CoverStats {
        rows: matrix.rows(),
        cols: matrix.cols(),
        ones: matrix.popcount(),
        zeros: matrix.count_zeros(),
        d: density_of(matrix).value(),
        explicit,
        greedy,
        greedy_family,
        exact,
        optimal,
        lower: fooling_lower_bound(matrix).size(),
        guard,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&str]) -> BoolMatrix {
        BoolMatrix::from_bit_rows(rows).unwrap()
    }

    #[test]
    fn maximal_examples() {
        let ones = BoolMatrix::ones(2, 2).unwrap();
        assert_eq!(maximal_rectangles(&ones, 16).unwrap(), vec![Rectangle::full(&ones)]);

        let id = BoolMatrix::identity(2).unwrap();
        assert_eq!(
            maximal_rectangles(&id, 16).unwrap(),
            vec![Rectangle::new([0], [0]), Rectangle::new([1], [1])]
        );

        let co = mat(&["011", "101", "110"]);
        assert_eq!(maximal_rectangles(&co, 16).unwrap().len(), 6);

        assert!(maximal_rectangles(&BoolMatrix::zeros(3, 3).unwrap(), 16).unwrap().is_empty());
    }

    #[test]
    fn maximal_cap_overflows() {
        let co = mat(&["0111", "1011", "1101", "1110"]);
        assert_eq!(maximal_rectangles(&co, 14).unwrap().len(), 14);
        assert!(matches!(maximal_rectangles(&co, 13), Err(Error::EnumerationOverflow { cap: 13 })));
    }

    #[test]
    fn entry_guard() {
        let big = BoolMatrix::ones(40, 40).unwrap();
        assert!(matches!(
            maximal_rectangles_guarded(&big, &SolverLimits::default()),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn greedy_examples() {
        let ones = BoolMatrix::ones(4, 5).unwrap();
        assert_eq!(greedy_cover(&ones, 64).unwrap().len(), 1);
        let id = BoolMatrix::identity(6).unwrap();
        assert_eq!(greedy_cover(&id, 64).unwrap().len(), 6);
        assert_eq!(greedy_cover_closures(&id).unwrap().len(), 6);
    }

    #[test]
    fn greedy_prefers_earliest_on_ties() {
        let m = mat(&["10", "01"]);
        let cover = greedy_cover(&m, 8).unwrap();
        assert_eq!(cover, vec![Rectangle::new([0], [0]), Rectangle::new([1], [1])]);
    }

    #[test]
    fn exact_examples() {
        let limits = SolverLimits::default();
        let zero = exact_min_cover(&BoolMatrix::zeros(3, 3).unwrap(), &limits).unwrap();
        assert_eq!(zero.size(), 0);
        assert!(zero.certificate.optimal);
        let id = exact_min_cover(&BoolMatrix::identity(4).unwrap(), &limits).unwrap();
        assert_eq!(id.size(), 4);
        // Complement of the 3x3 identity needs 3 rectangles.
        let co = exact_min_cover(&mat(&["011", "101", "110"]), &limits).unwrap();
        assert_eq!(co.size(), 3);
    }

    #[test]
    fn exact_guard() {
        let limits = SolverLimits::default();
        let big = BoolMatrix::ones(9, 9).unwrap();
        assert!(matches!(exact_min_cover(&big, &limits), Err(Error::SizeGuard { what: "one-entries", .. })));
        let tight = SolverLimits { max_candidates: 3, ..limits };
        assert!(matches!(
            exact_min_cover(&mat(&["011", "101", "110"]), &tight),
            Err(Error::SizeGuard { what: "maximal rectangles", .. })
        ));
    }

    #[test]
    fn fooling_examples() {
        assert_eq!(fooling_lower_bound(&BoolMatrix::ones(3, 4).unwrap()).size(), 1);
        assert_eq!(fooling_lower_bound(&BoolMatrix::identity(7).unwrap()).size(), 7);
        assert_eq!(fooling_lower_bound(&BoolMatrix::zeros(2, 2).unwrap()).size(), 0);
    }

    #[test]
    fn expand_reaches_a_maximal_superset() {
        let m = mat(&["1101", "1111", "0111"]);
        let grown = expand_to_maximal(&m, &Rectangle::new([1], [1]));
        assert!(m.is_monochromatic_one(&grown).unwrap());
        assert!(grown.contains(1, 1));
        assert!(maximal_rectangles(&m, 64).unwrap().contains(&grown));
    }

    #[test]
    fn stats_for_identity() {
        let s = stats(&BoolMatrix::identity(5).unwrap(), None, &SolverLimits::default()).unwrap();
        assert_eq!(s.d, 4.0);
        assert_eq!(s.exact, Some(5));
        assert_eq!(s.greedy, 5);
        assert_eq!(s.lower, 5);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"ones":5,"zeros":20,"d":4.0,"explicit":null,"greedy":5,"exact":5,"optimal":true,"lower":5}"#
        );
    }
}
