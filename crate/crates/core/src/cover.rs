//! Prime-residue rectangle covers of the incidence matrix.
//!
//! For a prime `q` and residues `(a, b, c)`, the rectangle `R(q,a,b,c)` takes
//! the points with `x = a` and `y != a*b + c` and the lines with `slope = b`
//! and `intercept = c`, everything mod `q`. On any such cell
//! `slope*x + intercept = ab + c != y (mod q)`, so the point is off the line
//! and the entry is one. A one-entry escapes every rectangle for a set of
//! primes only when `y - (slope*x + intercept)` is divisible by all of them,
//! which is impossible once their product exceeds the largest possible gap.
//! With `slope*x + intercept <= m*m + 2m^2`, that bound is `3m^2`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::boolmat::Rectangle;
use crate::construction::{dimension, IncidenceInstance};
use crate::error::{Error, Result};
use crate::primes::{is_prime, primes, primes_up_to};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All primes below `ceil(log2(2m^2))`.
    Paper,
    /// Shortest prime prefix whose product exceeds `3m^2`.
    #[default]
    Adaptive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Adaptive => "adaptive",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "adaptive" => Ok(Mode::Adaptive),
            other => Err(Error::Parameter(format!("unknown mode {other:?} (expected paper|adaptive)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimePlan {
    pub m: u64,
    pub mode: Mode,
    /// `ceil(log2(2m^2))`
    pub k_paper: u32,
    pub primes: Vec<u64>,
    pub primorial: u128,
    /// Largest value of `slope*x + intercept`, `3m^2`.
    pub bound: u128,
    /// `primorial > bound`
    pub sufficient: bool,
}

impl PrimePlan {
    /// `sum of q^3` over the chosen primes.
    pub fn total_slots(&self) -> u128 {
        self.primes.iter().map(|&q| (q as u128).pow(3)).sum()
    }
}

fn ceil_log2(v: u128) -> u32 {
    if v <= 1 {
        0
    } else {
        128 - (v - 1).leading_zeros()
    }
}

pub fn select_primes(m: u64, mode: Mode) -> PrimePlan {
    let m128 = m as u128;
    let height = 2 * m128 * m128;
    let bound = 3 * m128 * m128;
    let k_paper = ceil_log2(height);
    let chosen: Vec<u64> = match mode {
        Mode::Paper => primes_up_to(u64::from(k_paper).saturating_sub(1)),
        Mode::Adaptive => {
            let mut product = 1u128;
            primes()
                .take_while(|&q| {
                    let keep = product <= bound;
                    product = product.saturating_mul(q as u128);
                    keep
                })
                .collect()
        }
    };
    let primorial = chosen
        .iter()
        .try_fold(1u128, |acc, &q| acc.checked_mul(q as u128))
        .expect("primorial fits in u128 for any supported m");
    PrimePlan {
        m,
        mode,
        k_paper,
        primes: chosen,
        primorial,
        bound,
        sufficient: primorial > bound,
    }
}

/// `R(q,a,b,c)` on the 1-based coordinates of `inst`.
pub fn residue_rectangle(inst: &IncidenceInstance, q: u64, a: u64, b: u64, c: u64) -> Result<Rectangle> {
    if !is_prime(q) {
        return Err(Error::Parameter(format!("modulus {q} is not prime")));
    }
    if a >= q || b >= q || c >= q {
        return Err(Error::Parameter(format!("residues ({a}, {b}, {c}) must be below {q}")));
    }
    Ok(residue_rectangle_unchecked(inst, q, a, b, c))
}

fn residue_rectangle_unchecked(inst: &IncidenceInstance, q: u64, a: u64, b: u64, c: u64) -> Rectangle {
    let excluded = (a * b + c) % q;
    let rows = inst
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.x % q == a && p.y % q != excluded)
        .map(|(i, _)| i);
    let cols = inst
        .lines()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.slope % q == b && l.intercept % q == c)
        .map(|(i, _)| i);
    Rectangle::new(rows, cols)
}

/// One slot of the family, labelled by its modulus and residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueRect {
    pub q: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub rect: Rectangle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPlan {
    pub plan: PrimePlan,
    pub rectangles: Vec<ResidueRect>,
    pub total_slots: u128,
    pub nonempty_count: usize,
}

impl CoverPlan {
    pub fn rects(&self) -> Vec<Rectangle> {
        self.rectangles.iter().map(|r| r.rect.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    pub fn export(&self) -> CoverExport<'_> {
        CoverExport {
            m: self.plan.m,
            mode: self.plan.mode,
            primes: &self.plan.primes,
            primorial: self.plan.primorial,
            total_slots: self.total_slots,
            nonempty: self.nonempty_count,
            rects: self.rectangles.iter().map(|r| &r.rect).collect(),
        }
    }
}

/// `{"m":…,"mode":…,"primes":[…],"primorial":…,"total_slots":…,"nonempty":…,"rects":[…]}`
#[derive(Serialize)]
pub struct CoverExport<'a> {
    pub m: u64,
    pub mode: Mode,
    pub primes: &'a [u64],
    pub primorial: u128,
    pub total_slots: u128,
    pub nonempty: usize,
    pub rects: Vec<&'a Rectangle>,
}

fn check_same_m(inst: &IncidenceInstance, plan: &PrimePlan) -> Result<()> {
    if inst.m() != plan.m {
        return Err(Error::Parameter(format!(
            "plan is for m = {} but instance has m = {}",
            plan.m,
            inst.m()
        )));
    }
    Ok(())
}

/// Materialize every slot `(q, a, b, c)`, empty ones included, ordered by `q`
/// then `(a, b, c)` lexicographically.
pub fn generate_cover(inst: &IncidenceInstance, plan: &PrimePlan) -> Result<CoverPlan> {
    check_same_m(inst, plan)?;
    let slots: Vec<(u64, u64, u64, u64)> = plan
        .primes
        .iter()
        .flat_map(|&q| (0..q).flat_map(move |a| (0..q).flat_map(move |b| (0..q).map(move |c| (q, a, b, c)))))
        .collect();
    let rectangles: Vec<ResidueRect> = slots
        .into_par_iter()
        .map(|(q, a, b, c)| ResidueRect {
            q,
            a,
            b,
            c,
            rect: residue_rectangle_unchecked(inst, q, a, b, c),
        })
        .collect();
    let nonempty_count = rectangles.iter().filter(|r| !r.rect.is_empty()).count();
    Ok(CoverPlan {
        plan: plan.clone(),
        rectangles,
        total_slots: plan.total_slots(),
        nonempty_count,
    })
}

/// Where the monochromaticity check tripped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroInRect {
    pub slot: usize,
    pub q: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub m: u64,
    pub mode: Mode,
    pub sufficient: bool,
    pub rectangles: usize,
    pub monochromatic: bool,
    pub covered: bool,
    pub crt: bool,
    pub zero_in_rect: Option<ZeroInRect>,
    pub defects: usize,
    pub defect_witness: Option<(usize, usize)>,
    /// Entry `i` counts the one-entries whose first separating prime is
    /// `primes[i]`, i.e. those left uncovered by the prefix `primes[..i]`.
    pub first_separator: Vec<u64>,
    pub crt_witness: Option<(usize, usize)>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.monochromatic && self.covered && self.crt
    }
}

/// Check that every rectangle is all-ones, that the family covers every
/// one-entry, and that each one-entry's gap `y - (slope*x + intercept)` is
/// separated by some prime of the plan (and, when the separating slot is
/// present, that its rectangle contains the entry).
///
/// A failure under a sufficient plan is a construction bug and comes back as
/// [`Error::CoverCheckFailed`]; insufficient plans just report.
pub fn verify_cover(inst: &IncidenceInstance, cp: &CoverPlan) -> Result<CoverReport> {
    check_same_m(inst, &cp.plan)?;
    let matrix = inst.matrix();

    let zeros: Vec<Option<(usize, usize)>> = cp
        .rectangles
        .par_iter()
        .map(|r| matrix.first_zero_in(&r.rect))
        .collect::<Result<_>>()?;
    let zero_in_rect = zeros.iter().enumerate().find_map(|(slot, hit)| {
        hit.map(|(row, col)| {
            let r = &cp.rectangles[slot];
            ZeroInRect { slot, q: r.q, a: r.a, b: r.b, c: r.c, row, col }
        })
    });

    let defect = matrix.coverage_defect(&cp.rects())?;

    let slot_of: HashMap<(u64, u64, u64, u64), usize> = cp
        .rectangles
        .iter()
        .enumerate()
        .map(|(i, r)| ((r.q, r.a, r.b, r.c), i))
        .collect();
    let primes = &cp.plan.primes;
    // (separator histogram, first CRT witness) per row
    type RowTally = (Vec<u64>, Option<(usize, usize)>);
    let per_row: Vec<RowTally> = (0..inst.n())
        .into_par_iter()
        .map(|row| {
            let p = inst.points()[row];
            let mut hist = vec![0u64; primes.len()];
            for col in matrix.row_ones(row) {
                let l = inst.lines()[col];
                let gap = p.y as i128 - (l.slope * p.x + l.intercept) as i128;
                if gap == 0 {
                    return (hist, Some((row, col)));
                }
                let Some(i) = primes.iter().position(|&q| gap % q as i128 != 0) else {
                    return (hist, Some((row, col)));
                };
                let q = primes[i];
                let key = (q, p.x % q, l.slope % q, l.intercept % q);
                if let Some(&slot) = slot_of.get(&key) {
                    if !cp.rectangles[slot].rect.contains(row, col) {
                        return (hist, Some((row, col)));
                    }
                }
                hist[i] += 1;
            }
            (hist, None)
        })
        .collect();
    let mut first_separator = vec![0u64; primes.len()];
    let mut crt_witness = None;
    for (hist, witness) in per_row {
        for (acc, h) in first_separator.iter_mut().zip(hist) {
            *acc += h;
        }
        if crt_witness.is_none() {
            crt_witness = witness;
        }
    }

    let report = CoverReport {
        m: cp.plan.m,
        mode: cp.plan.mode,
        sufficient: cp.plan.sufficient,
        rectangles: cp.rectangles.len(),
        monochromatic: zero_in_rect.is_none(),
        covered: defect.is_empty(),
        crt: crt_witness.is_none(),
        zero_in_rect,
        defects: defect.len(),
        defect_witness: defect.first().copied(),
        first_separator,
        crt_witness,
    };
    if cp.plan.sufficient && !report.passed() {
        return Err(Error::CoverCheckFailed(Box::new(report)));
    }
    Ok(report)
}

/// Drop rectangles that are empty or add nothing, scanning from the last
/// slot back to the first. The result still covers every one-entry.
pub fn prune_cover(inst: &IncidenceInstance, cp: &CoverPlan) -> Result<CoverPlan> {
    let report = verify_cover(inst, cp)?;
    if !report.monochromatic || !report.covered {
        return Err(Error::InvalidCover(format!(
            "cannot prune an invalid cover ({} uncovered one-entries, monochromatic = {})",
            report.defects, report.monochromatic
        )));
    }
    let n = inst.n();
    let mut multiplicity = vec![0u32; n * n];
    for r in &cp.rectangles {
        for (row, col) in r.rect.cells() {
            multiplicity[row * n + col] += 1;
        }
    }
    let mut keep = vec![true; cp.rectangles.len()];
    for (i, r) in cp.rectangles.iter().enumerate().rev() {
        let redundant = r.rect.cells().all(|(row, col)| multiplicity[row * n + col] >= 2);
        if redundant {
            keep[i] = false;
            for (row, col) in r.rect.cells() {
                multiplicity[row * n + col] -= 1;
            }
        }
    }
    let rectangles: Vec<ResidueRect> = cp
        .rectangles
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(CoverPlan {
        plan: cp.plan.clone(),
        nonempty_count: rectangles.len(),
        rectangles,
        total_slots: cp.total_slots,
    })
}

/// How many integers in `1..=len` are congruent to `r` mod `q`.
pub fn residue_class_size(len: u64, q: u64, r: u64) -> u64 {
    if r == 0 {
        len / q
    } else if r <= len {
        (len - r) / q + 1
    } else {
        0
    }
}

/// Nonempty slots for modulus `q`, counted slot by slot from residue-class
/// sizes without materializing the matrix.
pub fn nonempty_slots_enumerated(m: u64, q: u64) -> u128 {
    let height = 2 * m * m;
    let xs: Vec<u64> = (0..q).map(|r| residue_class_size(m, q, r)).collect();
    let ys: Vec<u64> = (0..q).map(|r| residue_class_size(height, q, r)).collect();
    let mut count = 0u128;
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let rows = xs[a as usize] * (height - ys[((a * b + c) % q) as usize]);
                let cols = xs[b as usize] * ys[c as usize];
                count += u128::from(rows > 0 && cols > 0);
            }
        }
    }
    count
}

/// Closed form of [`nonempty_slots_enumerated`]: `min(m,q)^2 * min(2m^2,q)`.
///
/// A range `1..=len` hits `min(len, q)` residues, and the row condition
/// `y != ab + c` never empties a row class because `1..=2m^2` always holds two
/// consecutive integers.
pub fn nonempty_slots(m: u64, q: u64) -> u128 {
    let height = 2 * (m as u128) * (m as u128);
    let hit = (m as u128).min(q as u128);
    hit * hit * height.min(q as u128)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub m: u64,
    pub n: u128,
    pub primes: usize,
    pub total_slots: u128,
    pub nonempty: u128,
    /// `total_slots / (log2 n)^4`
    pub ratio: f64,
}

pub const CURVE_CSV_HEADER: &str = "m,n,primes,total_slots,nonempty,ratio";

impl CurvePoint {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6}",
            self.m, self.n, self.primes, self.total_slots, self.nonempty, self.ratio
        )
    }
}

/// Cover sizes by counting alone; no matrix is built.
pub fn cover_size_curve(ms: &[u64], mode: Mode) -> Vec<CurvePoint> {
    ms.iter()
        .map(|&m| {
            let plan = select_primes(m, mode);
            let n = dimension(m);
            let log_n = (n as f64).log2();
            let total_slots = plan.total_slots();
            CurvePoint {
                m,
                n,
                primes: plan.primes.len(),
                total_slots,
                nonempty: plan.primes.iter().map(|&q| nonempty_slots(m, q)).sum(),
                ratio: total_slots as f64 / log_n.powi(4),
            }
        })
        .collect()
}

pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(CURVE_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}
