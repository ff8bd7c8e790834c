//! The point-line incidence instance.
//!
//! Points and lines both range over `{1..m} x {1..2m^2}`. A point `(x, y)` and
//! a line `(slope, intercept)` meet when `slope * x + intercept == y`; the
//! matrix has rows indexed by points, columns by lines, and a zero exactly at
//! incident pairs.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::boolmat::{BoolMatrix, ZeroBlock};
use crate::error::{Error, Result};

/// Largest `m` materialized by [`build`] (n = 3456).
pub const DEFAULT_MAX_M: u64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    pub x: u64,
    pub y: u64,
}

/// The line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Line {
    pub slope: u64,
    pub intercept: u64,
}

impl Line {
    pub fn passes_through(&self, p: Point) -> bool {
        self.slope * p.x + self.intercept == p.y
    }
}

#[derive(Clone, Debug)]
pub struct IncidenceInstance {
    m: u64,
    points: Vec<Point>,
    lines: Vec<Line>,
    matrix: BoolMatrix,
}

/// Matrix dimension `2m^3`.
pub fn dimension(m: u64) -> u128 {
    2 * (m as u128).pow(3)
}

/// Largest `m` with `2m^3 <= max_n`.
pub fn max_m_for(max_n: u64) -> u64 {
    let mut m = 0;
    while dimension(m + 1) <= max_n as u128 {
        m += 1;
    }
    m
}

/// Build the instance for `m`, refusing `m > DEFAULT_MAX_M`.
pub fn build(m: u64) -> Result<IncidenceInstance> {
    build_bounded(m, DEFAULT_MAX_M)
}

pub fn build_bounded(m: u64, max_m: u64) -> Result<IncidenceInstance> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    if m > max_m {
        return Err(Error::Parameter(format!(
            "m = {m} exceeds the materialization limit m <= {max_m} (n = {})",
            dimension(max_m)
        )));
    }
    let height = 2 * m * m;
    let n = (m * height) as usize;
    let grid = || (1..=m).flat_map(move |a| (1..=height).map(move |b| (a, b)));
    let points: Vec<Point> = grid().map(|(x, y)| Point { x, y }).collect();
    let lines: Vec<Line> = grid()
        .map(|(slope, intercept)| Line { slope, intercept })
        .collect();

    let mut matrix = BoolMatrix::ones(n, n)?;
    for (row, p) in points.iter().enumerate() {
        for slope in 1..=m {
            // intercept = y - slope * x must land in [1, 2m^2]
            if let Some(intercept) = p.y.checked_sub(slope * p.x).filter(|&b| b >= 1) {
                let col = index_of(m, slope, intercept);
                matrix.set(row, col, false)?;
            }
        }
    }
    Ok(IncidenceInstance {
        m,
        points,
        lines,
        matrix,
    })
}

/// Row/column index of the pair `(first, second)`: `(first-1) * 2m^2 + (second-1)`.
pub fn index_of(m: u64, first: u64, second: u64) -> usize {
    ((first - 1) * 2 * m * m + (second - 1)) as usize
}

/// Exact zero count `sum over x, slope of (2m^2 - slope*x)`, which reduces to
/// `2m^4 - (m(m+1)/2)^2` since `slope * x <= m^2 < 2m^2`.
pub fn exact_zero_count(m: u64) -> u128 {
    let m = m as u128;
    let tri = m * (m + 1) / 2;
    2 * m.pow(4) - tri * tri
}

impl IncidenceInstance {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn matrix(&self) -> &BoolMatrix {
        &self.matrix
    }

    /// Mutable access for fault-injection tests; the instance no longer
    /// matches its geometry afterwards.
    pub fn matrix_mut(&mut self) -> &mut BoolMatrix {
        &mut self.matrix
    }

    pub fn point_index(&self, p: Point) -> usize {
        index_of(self.m, p.x, p.y)
    }

    pub fn line_index(&self, l: Line) -> usize {
        index_of(self.m, l.slope, l.intercept)
    }

    pub fn density(&self) -> Density {
        density_of(&self.matrix)
    }

    pub fn meta(&self) -> InstanceMeta {
        let d = self.density();
        InstanceMeta {
            m: self.m,
            n: self.n(),
            zeros: self.matrix.count_zeros(),
            density: d.value(),
        }
    }

    /// The point shared by two lines, if it lies in the point set.
    fn shared_point(&self, a: Line, b: Line) -> Option<Point> {
        if a.slope == b.slope {
            return None;
        }
        let (hi, lo) = if a.slope > b.slope { (a, b) } else { (b, a) };
        // (hi.slope - lo.slope) * x = lo.intercept - hi.intercept
        let rise = lo.intercept.checked_sub(hi.intercept)?;
        let run = hi.slope - lo.slope;
        if rise % run != 0 {
            return None;
        }
        let x = rise / run;
        let y = hi.slope * x + hi.intercept;
        let height = 2 * self.m * self.m;
        ((1..=self.m).contains(&x) && (1..=height).contains(&y)).then_some(Point { x, y })
    }
}

/// `zeros / n` kept as an exact ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Density {
    pub zeros: u64,
    pub n: u64,
}

impl Density {
    pub fn value(&self) -> f64 {
        self.zeros as f64 / self.n as f64
    }

    /// Lowest-terms numerator and denominator.
    pub fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.zeros, self.n).max(1);
        (self.zeros / g, self.n / g)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.reduced();
        write!(f, "{num}/{den}")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zero density of an arbitrary matrix: zero-entries per row.
pub fn density_of(matrix: &BoolMatrix) -> Density {
    Density {
        zeros: matrix.count_zeros() as u64,
        n: matrix.rows() as u64,
    }
}

/// `{"m":…,"n":…,"zeros":…,"density":…}`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceMeta {
    pub m: u64,
    pub n: usize,
    pub zeros: usize,
    pub density: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoZeroBlockReport {
    pub m: u64,
    pub n: usize,
    pub scan_passed: bool,
    pub analytic_passed: bool,
    pub line_pairs: u64,
    pub intersecting_pairs: u64,
    #[serde(skip)]
    pub scan_time: Duration,
    #[serde(skip)]
    pub analytic_time: Duration,
}

enum PairFault {
    Block(ZeroBlock),
    Mismatch { c1: usize, c2: usize, predicted: usize, found: usize },
}

/// Check that no two points share two lines, twice over: the exhaustive
/// column-pair scan of the matrix, then an algebraic pass that intersects
/// every pair of distinct lines and confirms the matrix has exactly the
/// predicted number (0 or 1) of common zero rows.
pub fn verify_no_zero_block(inst: &IncidenceInstance) -> Result<NoZeroBlockReport> {
    let start = Instant::now();
    if let Some(witness) = inst.matrix.find_zero_2x2() {
        return Err(Error::StructuralFailure(witness));
    }
    let scan_time = start.elapsed();

    let start = Instant::now();
    let n = inst.n();
    let t = inst.matrix.transposed();
    let mask = t.last_word_mask();
    let per_line: Vec<std::result::Result<u64, PairFault>> = (0..n)
        .into_par_iter()
        .map(|c1| {
            let a = t.row_words(c1);
            let mut intersecting = 0;
            for c2 in c1 + 1..n {
                let predicted = inst.shared_point(inst.lines[c1], inst.lines[c2]);
                let b = t.row_words(c2);
                let last = a.len() - 1;
                let common: Vec<u64> = a
                    .iter()
                    .zip(b)
                    .enumerate()
                    .map(|(w, (&x, &y))| if w == last { !x & !y & mask } else { !x & !y })
                    .collect();
                let rows: Vec<usize> = crate::boolmat::set_bits(&common).take(2).collect();
                if rows.len() == 2 {
                    return Err(PairFault::Block(ZeroBlock { r1: rows[0], r2: rows[1], c1, c2 }));
                }
                let expected_row = predicted.map(|p| inst.point_index(p));
                if rows.first().copied() != expected_row {
                    return Err(PairFault::Mismatch {
                        c1,
                        c2,
                        predicted: usize::from(predicted.is_some()),
                        found: rows.len(),
                    });
                }
                intersecting += u64::from(predicted.is_some());
            }
            Ok(intersecting)
        })
        .collect();
    let mut intersecting_pairs = 0;
    for outcome in per_line {
        match outcome {
            Ok(count) => intersecting_pairs += count,
            Err(PairFault::Block(w)) => return Err(Error::StructuralFailure(w)),
            Err(PairFault::Mismatch { c1, c2, predicted, found }) => {
                return Err(Error::ConstructionBug(format!(
                    "lines {c1} and {c2}: geometry predicts {predicted} shared point(s), matrix has {found}"
                )))
            }
        }
    }
    let analytic_time = start.elapsed();
    let n64 = n as u64;
    Ok(NoZeroBlockReport {
        m: inst.m,
        n,
        scan_passed: true,
        analytic_passed: true,
        line_pairs: n64 * n64.saturating_sub(1) / 2,
        intersecting_pairs,
        scan_time,
        analytic_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_has_single_zero() {
        let inst = build(1).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.matrix().count_zeros(), 1);
        let p = inst.point_index(Point { x: 1, y: 2 });
        let l = inst.line_index(Line { slope: 1, intercept: 1 });
        assert!(!inst.matrix().get(p, l));
    }

    #[test]
    fn m2_entry_example() {
        let inst = build(2).unwrap();
        let p = inst.point_index(Point { x: 1, y: 3 });
        let l = inst.line_index(Line { slope: 1, intercept: 2 });
        assert!(!inst.matrix().entry(p, l).unwrap());
        assert_eq!(inst.matrix().count_zeros(), 23);
    }

    #[test]
    fn parameters_guarded() {
        assert!(matches!(build(0), Err(Error::Parameter(_))));
        assert!(matches!(build(13), Err(Error::Parameter(_))));
        assert!(build_bounded(3, 2).is_err());
    }

    #[test]
    fn closed_form_small_values() {
        assert_eq!(exact_zero_count(1), 1);
        assert_eq!(exact_zero_count(2), 23);
        assert_eq!(exact_zero_count(3), 126);
    }

    #[test]
    fn index_mapping_is_the_fixed_bijection() {
        let inst = build(2).unwrap();
        for (i, p) in inst.points().iter().enumerate() {
            assert_eq!(inst.point_index(*p), i);
        }
        assert_eq!(index_of(2, 2, 1), 8);
    }

    #[test]
    fn max_m_for_limits() {
        assert_eq!(max_m_for(3456), 12);
        assert_eq!(max_m_for(3455), 11);
        assert_eq!(max_m_for(1), 0);
    }

    #[test]
    fn density_examples() {
        let d = build(2).unwrap().density();
        assert_eq!(d.to_string(), "23/16");
        assert_eq!(density_of(&BoolMatrix::ones(4, 4).unwrap()).value(), 0.0);
        assert_eq!(density_of(&BoolMatrix::identity(5).unwrap()).value(), 4.0);
    }

    #[test]
    fn parallel_lines_share_nothing() {
        let inst = build(2).unwrap();
        let a = Line { slope: 1, intercept: 2 };
        let b = Line { slope: 1, intercept: 5 };
        assert_eq!(inst.shared_point(a, b), None);
        let c = Line { slope: 2, intercept: 1 };
        // 1*x + 2 = 2*x + 1 at x = 1, y = 3
        assert_eq!(inst.shared_point(a, c), Some(Point { x: 1, y: 3 }));
    }

    #[test]
    fn verify_passes_on_built_instances() {
        for m in 1..=3 {
            let report = verify_no_zero_block(&build(m).unwrap()).unwrap();
            assert!(report.scan_passed && report.analytic_passed);
        }
    }

    #[test]
    fn mismatch_without_block_is_a_construction_bug() {
        let mut inst = build(2).unwrap();
        // Point (1,3) lies on lines (1,2) and (2,1). Turning one incidence
        // back into a one creates no block, but the geometry no longer matches.
        let r = inst.point_index(Point { x: 1, y: 3 });
        let c = inst.line_index(Line { slope: 2, intercept: 1 });
        assert!(!inst.matrix().get(r, c));
        inst.matrix_mut().set(r, c, true).unwrap();
        assert!(matches!(verify_no_zero_block(&inst), Err(Error::ConstructionBug(_))));
    }
}
