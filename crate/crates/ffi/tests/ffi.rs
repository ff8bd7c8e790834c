use std::ffi::{CStr, CString};
use std::ptr;

use rectcover::construction::exact_zero_count;
use rectcover_ffi::*;

fn last_error() -> String {
    let p = rc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn matrix(rows: &[&str]) -> *mut RcMatrix {
    let mut m = ptr::null_mut();
    let cols = rows[0].len();
    assert_eq!(unsafe { rc_matrix_new(rows.len(), cols, &mut m) }, RcStatus::Ok);
    for (r, row) in rows.iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            assert_eq!(unsafe { rc_matrix_set(m, r, c, ch == '1') }, RcStatus::Ok);
        }
    }
    m
}

#[test]
fn matrix_roundtrip_and_bounds() {
    let m = matrix(&["101", "011"]);
    unsafe {
        assert_eq!(rc_matrix_rows(m), 2);
        assert_eq!(rc_matrix_cols(m), 3);
        let mut v = false;
        assert_eq!(rc_matrix_get(m, 1, 2, &mut v), RcStatus::Ok);
        assert!(v);
        assert_eq!(rc_matrix_get(m, 0, 1, &mut v), RcStatus::Ok);
        assert!(!v);
        assert_eq!(rc_matrix_get(m, 2, 0, &mut v), RcStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        assert_eq!(rc_matrix_set(m, 0, 3, true), RcStatus::OutOfRange);

        let mut zeros = 0;
        assert_eq!(rc_matrix_count_zeros(m, &mut zeros), RcStatus::Ok);
        assert_eq!(zeros, 2);

        let mut text = ptr::null_mut();
        assert_eq!(rc_matrix_to_pbm(m, &mut text), RcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(rc_matrix_from_pbm(text, &mut back), RcStatus::Ok);
        for r in 0..2 {
            for c in 0..3 {
                let (mut a, mut b) = (false, false);
                rc_matrix_get(m, r, c, &mut a);
                rc_matrix_get(back, r, c, &mut b);
                assert_eq!(a, b);
            }
        }
        rc_string_free(text);
        rc_matrix_free(back);
        rc_matrix_free(m);
    }
}

#[test]
fn status_codes_for_bad_input() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(rc_matrix_new(0, 3, &mut m), RcStatus::InvalidArgument);
        assert!(m.is_null());
        assert_eq!(rc_matrix_new(2, 2, ptr::null_mut()), RcStatus::NullPointer);

        let bad = CString::new("P1\n2 2\n1 0 1").unwrap();
        assert_eq!(rc_matrix_from_pbm(bad.as_ptr(), &mut m), RcStatus::Parse);
        assert_eq!(rc_matrix_from_pbm(ptr::null(), &mut m), RcStatus::NullPointer);

        let mut inst = ptr::null_mut();
        assert_eq!(rc_instance_build(0, 0, &mut inst), RcStatus::InvalidArgument);
        assert_eq!(rc_instance_build(13, 0, &mut inst), RcStatus::InvalidArgument);
        assert!(last_error().contains("materialization limit"));
        assert_eq!(rc_instance_build(13, 13, &mut inst), RcStatus::Ok);
        rc_instance_free(inst);

        let mut z = 0u64;
        assert_eq!(rc_exact_zero_count(0, &mut z), RcStatus::InvalidArgument);

        // null handles are tolerated by the free and size functions
        rc_matrix_free(ptr::null_mut());
        rc_instance_free(ptr::null_mut());
        rc_cover_free(ptr::null_mut());
        rc_string_free(ptr::null_mut());
        assert_eq!(rc_matrix_rows(ptr::null()), 0);
        assert_eq!(rc_cover_len(ptr::null()), 0);
    }
}

#[test]
fn success_clears_last_error() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(rc_matrix_new(0, 0, &mut m), RcStatus::InvalidArgument);
        assert!(!rc_last_error().is_null());
        assert_eq!(rc_matrix_new(1, 1, &mut m), RcStatus::Ok);
        assert!(rc_last_error().is_null());
        rc_matrix_free(m);
    }
}

#[test]
fn zero_block_detection() {
    let m = matrix(&["1001", "0110", "1001"]);
    unsafe {
        let mut found = false;
        let mut block = [usize::MAX; 4];
        assert_eq!(rc_matrix_find_zero_2x2(m, &mut found, block.as_mut_ptr()), RcStatus::Ok);
        assert!(found);
        let [r1, r2, c1, c2] = block;
        for r in [r1, r2] {
            for c in [c1, c2] {
                let mut v = true;
                rc_matrix_get(m, r, c, &mut v);
                assert!(!v, "({r},{c}) is one");
            }
        }
        assert!(r1 < r2 && c1 < c2);
        rc_matrix_free(m);
    }
}

#[test]
fn instance_cover_pipeline() {
    unsafe {
        for m in 1..=4u64 {
            let mut inst = ptr::null_mut();
            assert_eq!(rc_instance_build(m, 0, &mut inst), RcStatus::Ok);
            assert_eq!(rc_instance_n(inst), (2 * m * m * m) as usize);
            assert_eq!(rc_instance_verify(inst), RcStatus::Ok);

            let mut mat = ptr::null_mut();
            assert_eq!(rc_instance_matrix(inst, &mut mat), RcStatus::Ok);
            let mut zeros = 0usize;
            rc_matrix_count_zeros(mat, &mut zeros);
            let mut z = 0u64;
            assert_eq!(rc_exact_zero_count(m, &mut z), RcStatus::Ok);
            assert_eq!(zeros as u128, exact_zero_count(m));
            assert_eq!(z as u128, exact_zero_count(m));

            let mut cover = ptr::null_mut();
            assert_eq!(rc_cover_generate(inst, RcMode::Adaptive, &mut cover), RcStatus::Ok);
            let mut check = RcCoverCheck::default();
            assert_eq!(rc_cover_verify(inst, cover, &mut check), RcStatus::Ok);
            assert!(check.sufficient && check.monochromatic && check.covered && check.crt);
            assert_eq!(check.defects, 0);

            let mut pruned = ptr::null_mut();
            assert_eq!(rc_cover_prune(inst, cover, &mut pruned), RcStatus::Ok);
            assert!(rc_cover_len(pruned) <= rc_cover_nonempty(cover));
            assert!(rc_cover_nonempty(cover) <= rc_cover_len(cover));
            assert_eq!(rc_cover_verify(inst, pruned, &mut check), RcStatus::Ok);
            assert_eq!(check.defects, 0);

            let mut json = ptr::null_mut();
            assert_eq!(rc_cover_to_json(pruned, &mut json), RcStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
            assert_eq!(v["m"], m);
            assert_eq!(v["rects"].as_array().unwrap().len(), rc_cover_len(pruned));
            rc_string_free(json);

            rc_cover_free(pruned);
            rc_cover_free(cover);
            rc_matrix_free(mat);
            rc_instance_free(inst);
        }
    }
}

#[test]
fn insufficient_plan_reports_without_error() {
    unsafe {
        // m = 2: primes below ceil(log2 8) = 3 are {2}, product 2 <= 12
        let mut inst = ptr::null_mut();
        assert_eq!(rc_instance_build(2, 0, &mut inst), RcStatus::Ok);
        let mut cover = ptr::null_mut();
        assert_eq!(rc_cover_generate(inst, RcMode::Paper, &mut cover), RcStatus::Ok);
        let mut check = RcCoverCheck::default();
        assert_eq!(rc_cover_verify(inst, cover, &mut check), RcStatus::Ok);
        assert!(!check.sufficient);
        assert!(check.monochromatic);
        assert!(!check.covered);
        assert!(check.defects > 0);
        rc_cover_free(cover);
        rc_instance_free(inst);
    }
}

#[test]
fn exact_solver_and_guard() {
    let m = matrix(&["110", "011", "111"]);
    unsafe {
        let mut size = 0;
        let mut optimal = false;
        assert_eq!(rc_exact_min_cover(m, ptr::null(), &mut size, &mut optimal), RcStatus::Ok);
        assert_eq!(size, 2);
        assert!(optimal);

        let mut limits = rc_limits_default();
        limits.max_ones = 3;
        assert_eq!(rc_exact_min_cover(m, &limits, &mut size, &mut optimal), RcStatus::GuardExceeded);

        let mut json = ptr::null_mut();
        assert_eq!(rc_stats_json(m, ptr::null(), &mut json), RcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["ones"], 7);
        assert_eq!(v["zeros"], 2);
        assert_eq!(v["exact"], 2);
        assert!(v["lower"].as_u64().unwrap() <= 2);
        rc_string_free(json);
        rc_matrix_free(m);
    }
}
