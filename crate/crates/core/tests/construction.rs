mod common;

use common::{block_creating_flip, brute_zero_count};
use rectcover::construction::{build, exact_zero_count, verify_no_zero_block, Line, Point};
use rectcover::formats::to_pbm;
use rectcover::Error;

#[test]
fn zero_count_matches_brute_force_and_closed_form() {
    for m in 1..=8u64 {
        let brute = brute_zero_count(m);
        let inst = build(m).unwrap();
        assert_eq!(inst.n() as u64, 2 * m * m * m);
        assert_eq!(inst.matrix().count_zeros() as u64, brute, "m = {m}");
        assert_eq!(exact_zero_count(m), brute as u128, "m = {m}");
        assert!(brute >= m.pow(4));
    }
}

#[test]
fn closed_form_is_the_double_sum() {
    for m in 1..=200u128 {
        let h = 2 * m * m;
        let sum: u128 = (1..=m)
            .flat_map(|x| (1..=m).map(move |s| h.saturating_sub(s * x)))
            .sum();
        assert_eq!(exact_zero_count(m as u64), sum);
        assert!(sum >= m.pow(4));
    }
}

#[test]
fn zero_pattern_is_the_incidence_relation() {
    let inst = build(3).unwrap();
    for (r, &p) in inst.points().iter().enumerate() {
        for (c, &l) in inst.lines().iter().enumerate() {
            assert_eq!(inst.matrix().get(r, c), !l.passes_through(p));
        }
    }
}

#[test]
fn m1_layout() {
    let inst = build(1).unwrap();
    assert_eq!(inst.points(), &[Point { x: 1, y: 1 }, Point { x: 1, y: 2 }]);
    assert_eq!(
        inst.lines(),
        &[Line { slope: 1, intercept: 1 }, Line { slope: 1, intercept: 2 }]
    );
    assert_eq!(format!("{:?}", inst.matrix()).lines().skip(1).collect::<Vec<_>>(), ["  11", "  01"]);
}

#[test]
fn no_zero_block_for_small_m() {
    for m in 1..=6 {
        let inst = build(m).unwrap();
        assert_eq!(inst.matrix().find_zero_2x2(), None, "m = {m}");
        let report = verify_no_zero_block(&inst).unwrap();
        assert!(report.scan_passed && report.analytic_passed);
    }
}

#[test]
fn corrupted_instances_yield_witnesses() {
    for m in 2..=4 {
        let mut inst = build(m).unwrap();
        let (r, c) = block_creating_flip(inst.matrix()).expect("some flip creates a block");
        inst.matrix_mut().set(r, c, false).unwrap();
        match verify_no_zero_block(&inst) {
            Err(Error::StructuralFailure(w)) => {
                let mat = inst.matrix();
                assert!(w.r1 < w.r2 && w.c1 < w.c2);
                for (a, b) in [(w.r1, w.c1), (w.r1, w.c2), (w.r2, w.c1), (w.r2, w.c2)] {
                    assert!(!mat.get(a, b));
                }
            }
            other => panic!("expected a witness for m = {m}, got {other:?}"),
        }
    }
}

#[test]
fn build_is_deterministic() {
    for m in 1..=5 {
        let a = build(m).unwrap();
        let b = build(m).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(to_pbm(a.matrix()), to_pbm(b.matrix()));
    }
}

#[test]
fn transpose_keeps_zero_count_but_not_pattern() {
    let inst = build(2).unwrap();
    let t = inst.matrix().transposed();
    assert_eq!(t.count_zeros(), inst.matrix().count_zeros());
    assert_ne!(t, inst.matrix());
}

#[test]
fn density_and_metadata() {
    let inst = build(2).unwrap();
    let d = inst.density();
    assert_eq!(d.reduced(), (23, 16));
    let meta = serde_json::to_string(&inst.meta()).unwrap();
    assert_eq!(meta, r#"{"m":2,"n":16,"zeros":23,"density":1.4375}"#);
    for m in 1..=8u64 {
        let d = build(m).unwrap().density();
        assert!(d.zeros >= m.pow(4));
    }
}
